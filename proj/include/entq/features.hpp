#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "entq/complex_matrix.hpp"
#include "entq/errors.hpp"
#include "entq/state_types.hpp"

namespace entq {

// The nine two-qubit Pauli correlations Tr(rho (sigma_i x sigma_j)), ordered
// (T11, T12, T13, T21, ..., T33) with 1=x, 2=y, 3=z.
struct CorrelationFeatures2Q {
    std::array<double, 9> t;
};

inline const std::vector<std::string>& feature_names_2q() {
    static const std::vector<std::string> names = {"T11", "T12", "T13", "T21", "T22",
                                                   "T23", "T31", "T32", "T33"};
    return names;
}

inline std::vector<double> to_vector(const CorrelationFeatures2Q& f) {
    return std::vector<double>(f.t.begin(), f.t.end());
}

// Measurement settings for the three-qubit correlation features.  Defaults:
// A = sx, A' = sy, B = sx, B' = sy, C = (sx+sy)/sqrt2, C' = (sx-sy)/sqrt2.
struct SvetlichnySettings {
    ComplexMatrix a, a_prime, b, b_prime, c, c_prime;

    static const SvetlichnySettings& defaults() {
        static const SvetlichnySettings s = [] {
            const PauliBasis& p = pauli_basis();
            const double inv = 1.0 / std::sqrt(2.0);
            return SvetlichnySettings{p.sigma_x,
                                      p.sigma_y,
                                      p.sigma_x,
                                      p.sigma_y,
                                      (p.sigma_x + p.sigma_y) * cplx(inv),
                                      (p.sigma_x - p.sigma_y) * cplx(inv)};
        }();
        return s;
    }
};

// Expectations of the eight unsigned Svetlichny terms, ordered
// (ABC, ABC', AB'C, A'BC, A'B'C', A'B'C, A'BC', AB'C').  Signs belong to the
// operator sum, not to the features; see svetlichny_value.
struct SvetlichnyFeatures3Q {
    std::array<double, 8> f;
};

inline const std::vector<std::string>& feature_names_3q() {
    static const std::vector<std::string> names = {"ABC",    "ABCp",   "ABpC",  "ApBC",
                                                   "ApBpCp", "ApBpC",  "ApBCp", "ABpCp"};
    return names;
}

inline std::vector<double> to_vector(const SvetlichnyFeatures3Q& f) {
    return std::vector<double>(f.f.begin(), f.f.end());
}

namespace detail {

inline std::array<ComplexMatrix, 8> svetlichny_terms(const SvetlichnySettings& s) {
    return {kron(kron(s.a, s.b), s.c),
            kron(kron(s.a, s.b), s.c_prime),
            kron(kron(s.a, s.b_prime), s.c),
            kron(kron(s.a_prime, s.b), s.c),
            kron(kron(s.a_prime, s.b_prime), s.c_prime),
            kron(kron(s.a_prime, s.b_prime), s.c),
            kron(kron(s.a_prime, s.b), s.c_prime),
            kron(kron(s.a, s.b_prime), s.c_prime)};
}

// <psi|O|psi> without forming the projector.
inline double pure_expectation(const PureState& psi, const ComplexMatrix& obs) {
    const std::size_t d = psi.dim();
    cplx acc = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        cplx row = 0.0;
        for (std::size_t j = 0; j < d; ++j) row += obs(i, j) * psi[j];
        acc += std::conj(psi[i]) * row;
    }
    if (std::abs(acc.imag()) > 1e-9)
        throw NumericError("pure_expectation: imaginary residue " + std::to_string(acc.imag()));
    return acc.real();
}

}  // namespace detail

inline CorrelationFeatures2Q pauli_correlations(const DensityMatrix& rho) {
    if (rho.dim() != 4) throw DomainError("pauli_correlations: expected a 2-qubit state");
    static const std::array<ComplexMatrix, 9> ops = [] {
        const PauliBasis& p = pauli_basis();
        const std::array<const ComplexMatrix*, 3> s = {&p.sigma_x, &p.sigma_y, &p.sigma_z};
        std::array<ComplexMatrix, 9> out;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) out[3 * i + j] = kron(*s[i], *s[j]);
        return out;
    }();
    CorrelationFeatures2Q out;
    for (int k = 0; k < 9; ++k) out.t[k] = expectation(rho.matrix(), ops[k]);
    return out;
}

inline CorrelationFeatures2Q pauli_correlations(const PureState& psi) {
    return pauli_correlations(DensityMatrix::from_pure(psi));
}

inline SvetlichnyFeatures3Q svetlichny_features(
    const PureState& psi, const SvetlichnySettings& settings = SvetlichnySettings::defaults()) {
    if (psi.dim() != 8) throw DomainError("svetlichny_features: expected a 3-qubit state");
    const std::array<ComplexMatrix, 8> terms = detail::svetlichny_terms(settings);
    SvetlichnyFeatures3Q out;
    for (int k = 0; k < 8; ++k) out.f[k] = detail::pure_expectation(psi, terms[k]);
    return out;
}

inline SvetlichnyFeatures3Q svetlichny_features(
    const DensityMatrix& rho, const SvetlichnySettings& settings = SvetlichnySettings::defaults()) {
    if (rho.dim() != 8) throw DomainError("svetlichny_features: expected a 3-qubit state");
    const std::array<ComplexMatrix, 8> terms = detail::svetlichny_terms(settings);
    SvetlichnyFeatures3Q out;
    for (int k = 0; k < 8; ++k) out.f[k] = expectation(rho.matrix(), terms[k]);
    return out;
}

// Signed sum of the operator: ABC + ABC' + AB'C + A'BC - A'B'C' - A'B'C
// - A'BC' - AB'C'.  Diagnostic only; the regression features are unsigned.
inline double svetlichny_value(const SvetlichnyFeatures3Q& f) {
    return f.f[0] + f.f[1] + f.f[2] + f.f[3] - f.f[4] - f.f[5] - f.f[6] - f.f[7];
}

}  // namespace entq
