#pragma once

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "entq/complex_matrix.hpp"
#include "entq/errors.hpp"

namespace entq {

// Unit-norm amplitude vector over 4 (two-qubit) or 8 (three-qubit) basis
// states.  Qubit 0 is the most significant bit of the basis index.
class PureState {
public:
    explicit PureState(std::vector<cplx> amplitudes) : amps_(std::move(amplitudes)) {
        if (amps_.size() != 4 && amps_.size() != 8)
            throw DomainError("PureState: dimension must be 4 or 8");
        double n2 = 0.0;
        for (const cplx& a : amps_) n2 += std::norm(a);
        if (std::abs(n2 - 1.0) > 1e-12) throw DomainError("PureState: amplitudes not normalized");
    }

    // Normalizes the given amplitudes; rejects the zero vector.
    static PureState normalized(std::vector<cplx> amplitudes) {
        double n2 = 0.0;
        for (const cplx& a : amplitudes) n2 += std::norm(a);
        if (n2 <= 0.0) throw DomainError("PureState: cannot normalize zero vector");
        const double inv = 1.0 / std::sqrt(n2);
        for (cplx& a : amplitudes) a *= inv;
        return PureState(std::move(amplitudes));
    }

    std::size_t dim() const { return amps_.size(); }
    std::size_t qubits() const { return amps_.size() == 4 ? 2 : 3; }
    const std::vector<cplx>& amplitudes() const { return amps_; }
    const cplx& operator[](std::size_t i) const { return amps_[i]; }

    ComplexMatrix projector() const {
        const std::size_t d = dim();
        ComplexMatrix p(d, d);
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j) p(i, j) = amps_[i] * std::conj(amps_[j]);
        return p;
    }

private:
    std::vector<cplx> amps_;
};

// Trace-one Hermitian PSD matrix (4x4 or 8x8).  Construction checks
// Hermiticity and trace; positivity is cheaper to verify where eigenvalues
// are computed anyway (see psd_sqrt and the test suite).
class DensityMatrix {
public:
    explicit DensityMatrix(ComplexMatrix m) : m_(std::move(m)) {
        if (m_.rows() != m_.cols() || (m_.rows() != 4 && m_.rows() != 8))
            throw DomainError("DensityMatrix: must be 4x4 or 8x8");
        if (hermiticity_defect(m_) > 1e-10)
            throw DomainError("DensityMatrix: not Hermitian within tolerance");
        if (std::abs(m_.trace() - cplx(1.0)) > 1e-10)
            throw DomainError("DensityMatrix: trace differs from one");
    }

    static DensityMatrix from_pure(const PureState& psi) { return DensityMatrix(psi.projector()); }

    std::size_t dim() const { return m_.rows(); }
    std::size_t qubits() const { return m_.rows() == 4 ? 2 : 3; }
    const ComplexMatrix& matrix() const { return m_; }

    double purity() const {
        double p = 0.0;
        for (std::size_t i = 0; i < m_.rows(); ++i)
            for (std::size_t j = 0; j < m_.cols(); ++j)
                p += (m_(i, j) * m_(j, i)).real();
        return p;
    }

private:
    ComplexMatrix m_;
};

// Single-qubit reduction of a pure state, contracted directly from the
// amplitudes (cheaper than building the projector and partial-tracing it;
// the two paths agree and the tests compare them).
inline ComplexMatrix one_qubit_reduction(const PureState& psi, std::size_t which) {
    const std::size_t q = psi.qubits();
    if (which >= q) throw DomainError("one_qubit_reduction: qubit index out of range");
    const std::size_t rest = psi.dim() / 2;
    const std::size_t high = q - 1 - which;  // shift of the kept qubit's bit
    ComplexMatrix red(2, 2);
    for (std::size_t a = 0; a < 2; ++a)
        for (std::size_t b = 0; b < 2; ++b) {
            cplx acc = 0.0;
            for (std::size_t r = 0; r < rest; ++r) {
                // Reassemble full indices with the kept bit spliced back in.
                const std::size_t lowmask = (std::size_t(1) << high) - 1;
                const std::size_t tail = r & lowmask;
                const std::size_t head = (r >> high) << (high + 1);
                const std::size_t ia = head | (a << high) | tail;
                const std::size_t ib = head | (b << high) | tail;
                acc += psi[ia] * std::conj(psi[ib]);
            }
            red(a, b) = acc;
        }
    return red;
}

}  // namespace entq
