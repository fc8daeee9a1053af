#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "entq/complex_matrix.hpp"
#include "entq/errors.hpp"

namespace entq {

struct EigResult {
    std::vector<double> eigenvalues;  // ascending
    ComplexMatrix eigenvectors;       // column k pairs with eigenvalues[k]
};

// Cyclic Jacobi for complex Hermitian matrices.  Each sweep annihilates every
// off-diagonal pair (p,q) with a complex plane rotation; for the tiny (<= 8x8)
// matrices used here this converges in a handful of sweeps.
inline EigResult hermitian_eig(const ComplexMatrix& m) {
    if (m.rows() == 0 || m.rows() != m.cols())
        throw DomainError("hermitian_eig: matrix must be square and non-empty");
    if (hermiticity_defect(m) > 1e-10)
        throw DomainError("hermitian_eig: input not Hermitian within tolerance");

    const std::size_t n = m.rows();
    ComplexMatrix a = m;
    // Symmetrize exactly so roundoff in the input cannot accumulate.
    for (std::size_t i = 0; i < n; ++i) {
        a(i, i) = cplx(a(i, i).real(), 0.0);
        for (std::size_t j = i + 1; j < n; ++j) {
            const cplx v = 0.5 * (a(i, j) + std::conj(a(j, i)));
            a(i, j) = v;
            a(j, i) = std::conj(v);
        }
    }
    ComplexMatrix v = ComplexMatrix::identity(n);

    auto off_norm = [&]() {
        double s = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) s += std::norm(a(p, q));
        return std::sqrt(2.0 * s);
    };

    const std::size_t cap = 100 * n * n;
    std::size_t rotations = 0;
    while (off_norm() > 1e-12) {
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const cplx apq = a(p, q);
                const double r = std::abs(apq);
                if (r == 0.0) continue;
                if (++rotations > cap)
                    throw NumericError("hermitian_eig: no convergence within iteration cap");

                const cplx e = apq / r;  // e^{i phi}
                const double theta = (a(q, q).real() - a(p, p).real()) / (2.0 * r);
                const double t =
                    (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                for (std::size_t i = 0; i < n; ++i) {
                    if (i == p || i == q) continue;
                    const cplx aip = a(i, p);
                    const cplx aiq = a(i, q);
                    a(i, p) = c * aip - s * std::conj(e) * aiq;
                    a(i, q) = s * e * aip + c * aiq;
                    a(p, i) = std::conj(a(i, p));
                    a(q, i) = std::conj(a(i, q));
                }
                const double app = a(p, p).real();
                const double aqq = a(q, q).real();
                a(p, p) = app - t * r;
                a(q, q) = aqq + t * r;
                a(p, q) = 0.0;
                a(q, p) = 0.0;

                for (std::size_t i = 0; i < n; ++i) {
                    const cplx vip = v(i, p);
                    const cplx viq = v(i, q);
                    v(i, p) = c * vip - s * std::conj(e) * viq;
                    v(i, q) = s * e * vip + c * viq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        const double di = a(i, i).real(), dj = a(j, j).real();
        return di < dj || (di == dj && i < j);
    });

    EigResult out;
    out.eigenvalues.resize(n);
    out.eigenvectors = ComplexMatrix(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        out.eigenvalues[k] = a(order[k], order[k]).real();
        for (std::size_t i = 0; i < n; ++i) out.eigenvectors(i, k) = v(i, order[k]);
    }
    return out;
}

// Hermitian PSD square root via the eigendecomposition.  Eigenvalues in
// [-1e-10, 0) are treated as roundoff and clamped; anything more negative is
// a genuinely non-PSD input.
inline ComplexMatrix psd_sqrt(const ComplexMatrix& m) {
    const EigResult eig = hermitian_eig(m);
    const std::size_t n = m.rows();
    std::vector<double> roots(n);
    for (std::size_t k = 0; k < n; ++k) {
        if (eig.eigenvalues[k] < -1e-10)
            throw DomainError("psd_sqrt: matrix not positive semidefinite (eigenvalue " +
                              std::to_string(eig.eigenvalues[k]) + ")");
        roots[k] = std::sqrt(std::max(0.0, eig.eigenvalues[k]));
    }
    const ComplexMatrix& vec = eig.eigenvectors;
    ComplexMatrix out(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            cplx acc = 0.0;
            for (std::size_t k = 0; k < n; ++k) acc += roots[k] * vec(i, k) * std::conj(vec(j, k));
            out(i, j) = acc;
        }
    return out;
}

}  // namespace entq
