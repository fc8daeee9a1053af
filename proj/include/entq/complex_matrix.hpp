#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

#include "entq/errors.hpp"

namespace entq {

using cplx = std::complex<double>;

// Dense row-major complex matrix.  Everything in this library is 8x8 or
// smaller, so no attempt is made at being clever about storage.
class ComplexMatrix {
public:
    ComplexMatrix() = default;

    ComplexMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols) {}

    ComplexMatrix(std::initializer_list<std::initializer_list<cplx>> init) {
        rows_ = init.size();
        cols_ = rows_ ? init.begin()->size() : 0;
        data_.reserve(rows_ * cols_);
        for (const auto& row : init) {
            if (row.size() != cols_) throw DomainError("ComplexMatrix: ragged initializer");
            data_.insert(data_.end(), row.begin(), row.end());
        }
    }

    static ComplexMatrix identity(std::size_t n) {
        ComplexMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    cplx& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const cplx& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    const std::vector<cplx>& data() const { return data_; }

    ComplexMatrix dagger() const {
        ComplexMatrix out(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) out(j, i) = std::conj((*this)(i, j));
        return out;
    }

    ComplexMatrix conjugate() const {
        ComplexMatrix out(rows_, cols_);
        for (std::size_t k = 0; k < data_.size(); ++k) out.data_[k] = std::conj(data_[k]);
        return out;
    }

    ComplexMatrix transpose() const {
        ComplexMatrix out(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
        return out;
    }

    cplx trace() const {
        if (rows_ != cols_) throw DomainError("trace: matrix not square");
        cplx t = 0.0;
        for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
        return t;
    }

    bool all_finite() const {
        for (const cplx& v : data_)
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
        return true;
    }

    ComplexMatrix& operator+=(const ComplexMatrix& o) {
        check_same_shape(o, "operator+=");
        for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
        return *this;
    }

    ComplexMatrix& operator-=(const ComplexMatrix& o) {
        check_same_shape(o, "operator-=");
        for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
        return *this;
    }

    ComplexMatrix& operator*=(const cplx& s) {
        for (cplx& v : data_) v *= s;
        return *this;
    }

    friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
    friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
    friend ComplexMatrix operator*(ComplexMatrix a, const cplx& s) { return a *= s; }
    friend ComplexMatrix operator*(const cplx& s, ComplexMatrix a) { return a *= s; }

    friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
        if (a.cols_ != b.rows_) throw DomainError("operator*: inner dimensions disagree");
        ComplexMatrix out(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const cplx aik = a(i, k);
                if (aik == cplx(0.0)) continue;
                for (std::size_t j = 0; j < b.cols_; ++j) out(i, j) += aik * b(k, j);
            }
        return out;
    }

private:
    void check_same_shape(const ComplexMatrix& o, const char* what) const {
        if (rows_ != o.rows_ || cols_ != o.cols_)
            throw DomainError(std::string(what) + ": shape mismatch");
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cplx> data_;
};

// Largest absolute entry; handy for tolerance checks.
inline double max_abs(const ComplexMatrix& m) {
    double d = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) d = std::max(d, std::abs(m(i, j)));
    return d;
}

inline double hermiticity_defect(const ComplexMatrix& m) {
    if (m.rows() != m.cols()) throw DomainError("hermiticity_defect: matrix not square");
    double d = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = i; j < m.cols(); ++j)
            d = std::max(d, std::abs(m(i, j) - std::conj(m(j, i))));
    return d;
}

inline bool is_hermitian(const ComplexMatrix& m, double tol = 1e-10) {
    return m.rows() == m.cols() && hermiticity_defect(m) <= tol;
}

inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.empty() || b.empty()) throw DomainError("kron: empty operand");
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) {
            const cplx aij = a(i, j);
            for (std::size_t k = 0; k < b.rows(); ++k)
                for (std::size_t l = 0; l < b.cols(); ++l)
                    out(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
        }
    return out;
}

// Trace out every subsystem not listed in `keep`.  Subsystem 0 is the most
// significant factor of the tensor product; `dims` lists all subsystem
// dimensions in that order.
inline ComplexMatrix partial_trace(const ComplexMatrix& rho,
                                   std::vector<std::size_t> keep,
                                   const std::vector<std::size_t>& dims) {
    if (rho.rows() != rho.cols()) throw DomainError("partial_trace: matrix not square");
    std::size_t total = 1;
    for (std::size_t d : dims) total *= d;
    if (total != rho.rows() || dims.empty())
        throw DomainError("partial_trace: dims inconsistent with matrix size");
    std::sort(keep.begin(), keep.end());
    keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
    if (keep.empty()) throw DomainError("partial_trace: keep set empty");
    for (std::size_t s : keep)
        if (s >= dims.size()) throw DomainError("partial_trace: keep index out of range");

    std::vector<std::size_t> traced;
    for (std::size_t s = 0; s < dims.size(); ++s)
        if (!std::binary_search(keep.begin(), keep.end(), s)) traced.push_back(s);

    // Row-major strides over the full index.
    std::vector<std::size_t> stride(dims.size(), 1);
    for (std::size_t s = dims.size(); s-- > 1;) stride[s - 1] = stride[s] * dims[s];

    auto expand = [&](std::size_t linear, const std::vector<std::size_t>& subs) {
        // Maps a linear index over the listed subsystems to a full-index offset.
        std::size_t offset = 0;
        for (std::size_t s = subs.size(); s-- > 0;) {
            const std::size_t d = dims[subs[s]];
            offset += (linear % d) * stride[subs[s]];
            linear /= d;
        }
        return offset;
    };

    std::size_t dim_keep = 1, dim_traced = 1;
    for (std::size_t s : keep) dim_keep *= dims[s];
    for (std::size_t s : traced) dim_traced *= dims[s];

    ComplexMatrix out(dim_keep, dim_keep);
    for (std::size_t rk = 0; rk < dim_keep; ++rk) {
        const std::size_t row_base = expand(rk, keep);
        for (std::size_t ck = 0; ck < dim_keep; ++ck) {
            const std::size_t col_base = expand(ck, keep);
            cplx acc = 0.0;
            for (std::size_t t = 0; t < dim_traced; ++t) {
                const std::size_t off = expand(t, traced);
                acc += rho(row_base + off, col_base + off);
            }
            out(rk, ck) = acc;
        }
    }
    return out;
}

// Re Tr(rho * obs).  The imaginary part of the trace must vanish; a residue
// above tolerance means the observable is not Hermitian or the state is
// corrupted.
inline double expectation(const ComplexMatrix& rho, const ComplexMatrix& obs) {
    if (rho.rows() != rho.cols() || obs.rows() != obs.cols() || rho.rows() != obs.rows())
        throw DomainError("expectation: dimension mismatch");
    cplx tr = 0.0;
    for (std::size_t i = 0; i < rho.rows(); ++i)
        for (std::size_t j = 0; j < rho.cols(); ++j) tr += rho(i, j) * obs(j, i);
    if (std::abs(tr.imag()) > 1e-9)
        throw NumericError("expectation: imaginary trace residue " + std::to_string(tr.imag()));
    return tr.real();
}

struct PauliBasis {
    ComplexMatrix sigma_x, sigma_y, sigma_z, identity;
};

inline const PauliBasis& pauli_basis() {
    static const PauliBasis basis{
        {{0.0, 1.0}, {1.0, 0.0}},
        {{0.0, cplx(0.0, -1.0)}, {cplx(0.0, 1.0), 0.0}},
        {{1.0, 0.0}, {0.0, -1.0}},
        ComplexMatrix::identity(2)};
    return basis;
}

}  // namespace entq
