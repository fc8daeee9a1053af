#pragma once

#include <algorithm>
#include <cmath>

#include "entq/complex_matrix.hpp"
#include "entq/eig.hpp"
#include "entq/errors.hpp"
#include "entq/state_types.hpp"

namespace entq {

struct EntanglementLabel {
    enum class Kind { concurrence, gme_concurrence };
    double value;
    Kind kind;
};

namespace detail {

inline double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

inline double reduction_purity(const ComplexMatrix& red) {
    // red is a 2x2 Hermitian reduction; Tr red^2 is real.
    return (red(0, 0) * red(0, 0) + red(1, 1) * red(1, 1)).real() + 2.0 * std::norm(red(0, 1));
}

// det of the one-qubit reduction for qubit `which`, computed per Cauchy-Binet
// as the sum of squared 2x2 minors of the 2 x (dim/2) amplitude matrix of the
// cut.  For a normalized state 2 (1 - Tr rho^2) == 4 det rho on a 2x2
// reduction, but the minor sum has no cancellation against 1, so states on the
// separable boundary come out at ~1e-16 instead of the ~1e-8 noise floor the
// purity route leaves behind.
inline double reduction_det(const PureState& psi, std::size_t which) {
    const std::size_t high = psi.qubits() - 1 - which;  // bit position of the cut qubit
    const std::size_t rest = psi.dim() / 2;
    const std::size_t lowmask = (std::size_t(1) << high) - 1;
    auto splice = [&](std::size_t r, std::size_t bit) {
        return ((r >> high) << (high + 1)) | (bit << high) | (r & lowmask);
    };
    double sum = 0.0;
    for (std::size_t r = 0; r < rest; ++r)
        for (std::size_t s = r + 1; s < rest; ++s)
            sum += std::norm(psi[splice(r, 0)] * psi[splice(s, 1)] -
                             psi[splice(s, 0)] * psi[splice(r, 1)]);
    return sum;
}

}  // namespace detail

// Pure-state concurrence sqrt(2 (1 - Tr rho_A^2)) for two qubits, evaluated as
// 2 |a00 a11 - a01 a10|.
inline EntanglementLabel concurrence_pure(const PureState& psi) {
    if (psi.dim() != 4) throw DomainError("concurrence_pure: expected a 2-qubit state");
    const double c = 2.0 * std::sqrt(detail::reduction_det(psi, 0));
    return {detail::clamp01(c), EntanglementLabel::Kind::concurrence};
}

// Wootters concurrence max(0, l1 - l2 - l3 - l4) with l1 >= ... >= l4 the
// square roots of the eigenvalues of rho * rho_tilde.  Those are the singular
// values of K = sqrt(rho) * (sy (x) sy) * conj(sqrt(rho)): K K^dag equals the
// Hermitian similarity sqrt(rho) * rho_tilde * sqrt(rho).  Reading the l_i off
// the augmented Hermitian pencil [[0, K], [K^dag, 0]] (eigenvalues +-l_i)
// keeps absolute precision; diagonalizing K K^dag first would square-root-
// amplify rounding noise in the near-zero eigenvalues of separable states.
inline EntanglementLabel concurrence_mixed(const DensityMatrix& rho) {
    if (rho.dim() != 4) throw DomainError("concurrence_mixed: expected a 2-qubit state");
    const ComplexMatrix yy = kron(pauli_basis().sigma_y, pauli_basis().sigma_y);
    const ComplexMatrix root = psd_sqrt(rho.matrix());
    const ComplexMatrix k = root * yy * root.conjugate();
    ComplexMatrix aug(8, 8);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) {
            aug(i, 4 + j) = k(i, j);
            aug(4 + i, j) = std::conj(k(j, i));
        }
    const EigResult eig = hermitian_eig(aug);  // ascending: -l1 ... -l4, l4 ... l1
    double c = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
        const double li = 0.5 * (eig.eigenvalues[7 - i] - eig.eigenvalues[i]);
        c += (i == 0 ? 1.0 : -1.0) * li;
    }
    return {detail::clamp01(std::max(0.0, c)), EntanglementLabel::Kind::concurrence};
}

// GME concurrence for a 3-qubit pure state: the minimum over the three
// one-vs-two bipartitions of sqrt(2 (1 - Tr rho_gamma^2)) = 2 sqrt(det
// rho_gamma), with each det taken straight from the amplitude minors.
inline EntanglementLabel gme_concurrence_pure(const PureState& psi) {
    if (psi.dim() != 8) throw DomainError("gme_concurrence_pure: expected a 3-qubit state");
    double best = 2.0;
    for (std::size_t q = 0; q < 3; ++q)
        best = std::min(best, 2.0 * std::sqrt(detail::reduction_det(psi, q)));
    return {detail::clamp01(best), EntanglementLabel::Kind::gme_concurrence};
}

}  // namespace entq
