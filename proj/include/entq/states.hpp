#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "entq/complex_matrix.hpp"
#include "entq/errors.hpp"
#include "entq/measures.hpp"
#include "entq/rng.hpp"
#include "entq/state_types.hpp"

namespace entq {

// Haar-random pure state: normalized vector of iid complex Gaussians.
inline PureState sample_haar_pure(std::size_t dim, RngStream& rng) {
    if (dim != 4 && dim != 8) throw DomainError("sample_haar_pure: dim must be 4 or 8");
    for (;;) {
        std::vector<cplx> amps(dim);
        double n2 = 0.0;
        for (cplx& a : amps) {
            a = rng.complex_gaussian();
            n2 += std::norm(a);
        }
        if (n2 > 0.0) return PureState::normalized(std::move(amps));
    }
}

// rho = A A^dag / Tr(A A^dag) with A a dim x rank complex Gaussian matrix.
inline DensityMatrix sample_wishart_mixed(std::size_t dim, std::size_t rank, RngStream& rng) {
    if (dim != 4 && dim != 8) throw DomainError("sample_wishart_mixed: dim must be 4 or 8");
    if (rank < 1 || rank > dim) throw DomainError("sample_wishart_mixed: rank out of range");
    ComplexMatrix a(dim, rank);
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < rank; ++j) a(i, j) = rng.complex_gaussian();
    ComplexMatrix rho = a * a.dagger();
    const double tr = rho.trace().real();
    rho *= cplx(1.0 / tr);
    // Exact Hermitian symmetrization: A A^dag is Hermitian up to roundoff.
    for (std::size_t i = 0; i < dim; ++i) {
        rho(i, i) = cplx(rho(i, i).real(), 0.0);
        for (std::size_t j = i + 1; j < dim; ++j) {
            const cplx v = 0.5 * (rho(i, j) + std::conj(rho(j, i)));
            rho(i, j) = v;
            rho(j, i) = std::conj(v);
        }
    }
    return DensityMatrix(std::move(rho));
}

// Haar-random 2x2 unitary: Ginibre draw + Gram-Schmidt QR.  Gram-Schmidt
// leaves R with a positive real diagonal, which is exactly the phase fix that
// makes the Q factor Haar-distributed.
inline ComplexMatrix sample_haar_unitary(std::size_t dim, RngStream& rng) {
    if (dim != 2) throw DomainError("sample_haar_unitary: only dim 2 is supported");
    for (;;) {
        const cplx g00 = rng.complex_gaussian(), g01 = rng.complex_gaussian();
        const cplx g10 = rng.complex_gaussian(), g11 = rng.complex_gaussian();
        const double r00 = std::sqrt(std::norm(g00) + std::norm(g10));
        if (r00 == 0.0) continue;
        const cplx q00 = g00 / r00, q10 = g10 / r00;
        const cplx r01 = std::conj(q00) * g01 + std::conj(q10) * g11;
        const cplx v0 = g01 - r01 * q00, v1 = g11 - r01 * q10;
        const double r11 = std::sqrt(std::norm(v0) + std::norm(v1));
        if (r11 == 0.0) continue;
        return ComplexMatrix{{q00, v0 / r11}, {q10, v1 / r11}};
    }
}

namespace detail {

// Haar-random single-qubit state vector.
inline std::vector<cplx> haar_qubit(RngStream& rng) {
    for (;;) {
        std::vector<cplx> v(2);
        double n2 = 0.0;
        for (cplx& x : v) {
            x = rng.complex_gaussian();
            n2 += std::norm(x);
        }
        if (n2 > 0.0) {
            const double inv = 1.0 / std::sqrt(n2);
            for (cplx& x : v) x *= inv;
            return v;
        }
    }
}

// Dirichlet(1,...,1): uniform weights on the simplex.
inline std::vector<double> dirichlet_uniform(std::size_t k, RngStream& rng) {
    std::vector<double> w(k);
    double sum = 0.0;
    for (double& v : w) {
        v = -std::log(rng.uniform_pos());
        sum += v;
    }
    for (double& v : w) v /= sum;
    return w;
}

inline PureState apply_local_2q(const ComplexMatrix& ua, const ComplexMatrix& ub,
                                const PureState& psi) {
    std::vector<cplx> out(4, 0.0);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j)
            for (std::size_t k = 0; k < 2; ++k)
                for (std::size_t l = 0; l < 2; ++l)
                    out[2 * i + j] += ua(i, k) * ub(j, l) * psi[2 * k + l];
    return PureState::normalized(std::move(out));
}

inline PureState apply_local_3q(const ComplexMatrix& ua, const ComplexMatrix& ub,
                                const ComplexMatrix& uc, const PureState& psi) {
    std::vector<cplx> out(8, 0.0);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j)
            for (std::size_t k = 0; k < 2; ++k) {
                cplx acc = 0.0;
                for (std::size_t p = 0; p < 2; ++p)
                    for (std::size_t q = 0; q < 2; ++q)
                        for (std::size_t r = 0; r < 2; ++r)
                            acc += ua(i, p) * ub(j, q) * uc(k, r) * psi[4 * p + 2 * q + r];
                out[4 * i + 2 * j + k] = acc;
            }
    return PureState::normalized(std::move(out));
}

inline ComplexMatrix rot_z(double angle) {
    return {{std::polar(1.0, -0.5 * angle), 0.0}, {0.0, std::polar(1.0, 0.5 * angle)}};
}

inline ComplexMatrix rot_y(double angle) {
    const double c = std::cos(0.5 * angle), s = std::sin(0.5 * angle);
    return {{c, -s}, {s, c}};
}

inline ComplexMatrix euler_u2(double alpha, double beta, double gamma) {
    return rot_z(alpha) * rot_y(beta) * rot_z(gamma);
}

}  // namespace detail

// Fixed local reference frame applied to the canonical GHZ- and W-class
// forms.  The frame must be asymmetric between the qubits and complex: the
// correlation features read only the all-flip coherences of the state, so the
// canonical forms are partly (GHZ) or entirely (W) invisible to them, a
// per-state random frame scrambles the feature-label relation, and a
// qubit-symmetric frame folds distinct states onto equal features.  Any
// generic fixed choice works; these Euler angles are frozen so datasets are
// stable across versions.
inline const std::array<ComplexMatrix, 3>& class_frame_3q() {
    static const std::array<ComplexMatrix, 3> frame = {
        detail::euler_u2(0.9, 0.4, 1.7),
        detail::euler_u2(2.1, 1.2, 0.3),
        detail::euler_u2(0.5, 2.4, 1.1)};
    return frame;
}

// Schmidt form sqrt(lam)|00> + sqrt(1-lam)|11> with lam = (1+sqrt(1-c^2))/2
// has concurrence exactly c; random local unitaries then spread the state
// over its orbit without changing the label.
inline PureState make_pure_2q_with_concurrence(double c, RngStream& rng) {
    if (!(c >= 0.0 && c <= 1.0)) throw DomainError("make_pure_2q_with_concurrence: c outside [0,1]");
    const double lam = 0.5 * (1.0 + std::sqrt(std::max(0.0, 1.0 - c * c)));
    const PureState schmidt(
        {std::sqrt(lam), 0.0, 0.0, std::sqrt(std::max(0.0, 1.0 - lam))});
    const ComplexMatrix ua = sample_haar_unitary(2, rng);
    const ComplexMatrix ub = sample_haar_unitary(2, rng);
    return detail::apply_local_2q(ua, ub, schmidt);
}

// White-noise mixing rho(p) = p |psi><psi| + (1-p) I/4 with |psi> of
// concurrence bin_hi; p is bisected so the Wootters concurrence lands inside
// (bin_lo, bin_hi).  Rejection from the Wishart ensemble would be hopeless in
// the high-concurrence bins.
inline DensityMatrix make_mixed_2q_in_bin(double bin_lo, double bin_hi, RngStream& rng) {
    if (!(bin_lo >= 0.0 && bin_lo < bin_hi && bin_hi <= 1.0))
        throw DomainError("make_mixed_2q_in_bin: need 0 <= lo < hi <= 1");

    const ComplexMatrix eye = ComplexMatrix::identity(4) * cplx(0.25);
    for (int attempt = 0; attempt < 100; ++attempt) {
        const PureState psi = make_pure_2q_with_concurrence(bin_hi, rng);
        const ComplexMatrix proj = psi.projector();
        const double target = bin_lo + (bin_hi - bin_lo) * rng.uniform_pos();

        auto mix = [&](double p) {
            return DensityMatrix(proj * cplx(p) + eye * cplx(1.0 - p));
        };
        auto conc = [&](double p) { return concurrence_mixed(mix(p)).value; };

        double lo = 0.0, hi = 1.0;  // conc(0) = 0 <= target <= conc(1) = bin_hi
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo + hi);
            (conc(mid) < target ? lo : hi) = mid;
        }
        const double p = 0.5 * (lo + hi);
        const DensityMatrix rho = mix(p);
        const double c = concurrence_mixed(rho).value;
        if (c > bin_lo && c < bin_hi && rho.purity() < 1.0 - 1e-6) return rho;
    }
    throw SamplingError("make_mixed_2q_in_bin: target bin [" + std::to_string(bin_lo) + ", " +
                        std::to_string(bin_hi) + ") unreachable after 100 attempts");
}

// Separable two-qubit states: a random product projector, or a convex mixture
// of 2..4 of them with Dirichlet-uniform weights.  Zero concurrence either way.
inline DensityMatrix sample_separable_2q(bool pure, RngStream& rng) {
    auto product_projector = [&]() {
        const std::vector<cplx> a = detail::haar_qubit(rng), b = detail::haar_qubit(rng);
        std::vector<cplx> amps(4);
        for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t j = 0; j < 2; ++j) amps[2 * i + j] = a[i] * b[j];
        return PureState::normalized(std::move(amps)).projector();
    };

    if (pure) return DensityMatrix(product_projector());

    const std::size_t k = 2 + rng.uniform_int(3);
    const std::vector<double> w = detail::dirichlet_uniform(k, rng);
    ComplexMatrix rho(4, 4);
    for (std::size_t i = 0; i < k; ++i) rho += product_projector() * cplx(w[i]);
    return DensityMatrix(std::move(rho));
}

// GHZ-class sample: generalized Schmidt form
// l0|000> + l1 e^{i phi}|100> + l2|101> + l3|110> + l4|111> with squared
// coefficients Dirichlet-uniform, floors l0, l4 >= 0.1 keeping samples away
// from the class boundary, phi uniform in [0, pi]; emitted in the fixed
// class frame.
inline PureState sample_ghz_class(RngStream& rng) {
    std::array<double, 5> lam{};
    for (;;) {
        const std::vector<double> w = detail::dirichlet_uniform(5, rng);
        for (std::size_t i = 0; i < 5; ++i) lam[i] = std::sqrt(w[i]);
        if (lam[0] >= 0.1 && lam[4] >= 0.1) break;
    }
    const double phi = rng.uniform() * std::numbers::pi;
    std::vector<cplx> amps(8, 0.0);
    amps[0] = lam[0];
    amps[4] = std::polar(lam[1], phi);
    amps[5] = lam[2];
    amps[6] = lam[3];
    amps[7] = lam[4];
    const auto& u = class_frame_3q();
    return detail::apply_local_3q(u[0], u[1], u[2], PureState::normalized(std::move(amps)));
}

// W-class sample: a|100> + b|010> + c|001> + d|000> with squared coefficients
// Dirichlet-uniform and floors a, b, c >= 0.05; emitted in the fixed class
// frame.
inline PureState sample_w_class(RngStream& rng) {
    std::array<double, 4> coef{};
    for (;;) {
        const std::vector<double> w = detail::dirichlet_uniform(4, rng);
        for (std::size_t i = 0; i < 4; ++i) coef[i] = std::sqrt(w[i]);
        if (coef[0] >= 0.05 && coef[1] >= 0.05 && coef[2] >= 0.05) break;
    }
    std::vector<cplx> amps(8, 0.0);
    amps[4] = coef[0];
    amps[2] = coef[1];
    amps[1] = coef[2];
    amps[0] = coef[3];
    const auto& u = class_frame_3q();
    return detail::apply_local_3q(u[0], u[1], u[2], PureState::normalized(std::move(amps)));
}

// Biseparable 3-qubit pure state: fully product with probability 1/4,
// otherwise a Haar single qubit against a Haar pair across one of the three
// cuts.  GME concurrence vanishes by construction.
inline PureState sample_biseparable_3q(RngStream& rng) {
    const std::uint64_t which = rng.uniform_int(4);

    if (which == 3) {
        const std::vector<cplx> a = detail::haar_qubit(rng), b = detail::haar_qubit(rng),
                                c = detail::haar_qubit(rng);
        std::vector<cplx> amps(8);
        for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t j = 0; j < 2; ++j)
                for (std::size_t k = 0; k < 2; ++k) amps[4 * i + 2 * j + k] = a[i] * b[j] * c[k];
        return PureState::normalized(std::move(amps));
    }

    const std::vector<cplx> single = detail::haar_qubit(rng);
    const PureState pair = sample_haar_pure(4, rng);
    std::vector<cplx> amps(8);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j)
            for (std::size_t k = 0; k < 2; ++k) {
                const std::size_t idx = 4 * i + 2 * j + k;
                if (which == 0) amps[idx] = single[i] * pair[2 * j + k];       // A | BC
                else if (which == 1) amps[idx] = single[j] * pair[2 * i + k];  // B | AC
                else amps[idx] = single[k] * pair[2 * i + j];                  // C | AB
            }
    return PureState::normalized(std::move(amps));
}

}  // namespace entq
