#pragma once

// Dense matrices over F_p / F_{p^2} with exact Gaussian elimination.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ffield.hpp"
#include "mpoly.hpp"

namespace charp_qkz {

using Vec = std::vector<FieldElement>;

class Matrix {
public:
    Matrix(const FieldCtx& ctx, std::size_t rows, std::size_t cols)
        : ctx_(&ctx), rows_(rows), cols_(cols), data_(rows * cols, FieldElement::zero(ctx)) {}

    static Matrix identity(const FieldCtx& ctx, std::size_t n) {
        Matrix m(ctx, n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = FieldElement::one(ctx);
        return m;
    }
    /// Matrix whose columns are the given vectors.
    static Matrix from_columns(const FieldCtx& ctx, std::size_t rows, const std::vector<Vec>& cols) {
        Matrix m(ctx, rows, cols.size());
        for (std::size_t j = 0; j < cols.size(); ++j)
            for (std::size_t i = 0; i < rows; ++i) m(i, j) = cols[j].at(i);
        return m;
    }

    [[nodiscard]] const FieldCtx& ctx() const { return *ctx_; }
    [[nodiscard]] std::size_t rows() const { return rows_; }
    [[nodiscard]] std::size_t cols() const { return cols_; }

    FieldElement& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    [[nodiscard]] const FieldElement& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    [[nodiscard]] Vec column(std::size_t j) const {
        Vec v;
        for (std::size_t i = 0; i < rows_; ++i) v.push_back((*this)(i, j));
        return v;
    }

    [[nodiscard]] bool is_zero() const {
        for (const auto& x : data_)
            if (!x.is_zero()) return false;
        return true;
    }

    [[nodiscard]] Matrix transpose() const {
        Matrix t(*ctx_, cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    friend Matrix operator+(const Matrix& a, const Matrix& b) { return zip(a, b, false); }
    friend Matrix operator-(const Matrix& a, const Matrix& b) { return zip(a, b, true); }
    friend Matrix operator*(const Matrix& a, const FieldElement& s) {
        Matrix r(*join_ctx(a.ctx_, &s.ctx()), a.rows_, a.cols_);
        for (std::size_t i = 0; i < a.data_.size(); ++i) r.data_[i] = a.data_[i] * s;
        return r;
    }
    friend Matrix operator*(const Matrix& a, const Matrix& b) {
        if (a.cols_ != b.rows_) throw StructuralError("matrix product shape mismatch");
        Matrix r(*join_ctx(a.ctx_, b.ctx_), a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t l = 0; l < a.cols_; ++l) {
                const FieldElement& x = a(i, l);
                if (x.is_zero()) continue;
                for (std::size_t j = 0; j < b.cols_; ++j) r(i, j) += x * b(l, j);
            }
        return r;
    }
    friend Vec operator*(const Matrix& a, const Vec& v) {
        if (a.cols_ != v.size()) throw StructuralError("matrix-vector shape mismatch");
        const FieldCtx* c = a.ctx_;
        for (const auto& x : v) c = join_ctx(c, &x.ctx());
        Vec r(a.rows_, FieldElement::zero(*c));
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t j = 0; j < a.cols_; ++j) r[i] += a(i, j) * v[j];
        return r;
    }
    friend bool operator==(const Matrix& a, const Matrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

    [[nodiscard]] std::string to_string() const {
        std::string s = "[";
        for (std::size_t i = 0; i < rows_; ++i) {
            s += i ? ", [" : "[";
            for (std::size_t j = 0; j < cols_; ++j) s += (j ? ", " : "") + (*this)(i, j).to_string();
            s += "]";
        }
        return s + "]";
    }

private:
    static Matrix zip(const Matrix& a, const Matrix& b, bool subtract) {
        if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw StructuralError("matrix shape mismatch");
        Matrix r(*join_ctx(a.ctx_, b.ctx_), a.rows_, a.cols_);
        for (std::size_t i = 0; i < a.data_.size(); ++i)
            r.data_[i] = subtract ? a.data_[i] - b.data_[i] : a.data_[i] + b.data_[i];
        return r;
    }

    const FieldCtx* ctx_;
    std::size_t rows_;
    std::size_t cols_;
    std::vector<FieldElement> data_;
};

/// Row echelon form in place; returns the pivot columns.
inline std::vector<std::size_t> row_reduce(Matrix& m) {
    std::vector<std::size_t> pivots;
    std::size_t row = 0;
    for (std::size_t col = 0; col < m.cols() && row < m.rows(); ++col) {
        std::size_t piv = row;
        while (piv < m.rows() && m(piv, col).is_zero()) ++piv;
        if (piv == m.rows()) continue;
        if (piv != row)
            for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(piv, j), m(row, j));
        const FieldElement s = inv(m(row, col));
        for (std::size_t j = col; j < m.cols(); ++j) m(row, j) *= s;
        for (std::size_t i = 0; i < m.rows(); ++i) {
            if (i == row || m(i, col).is_zero()) continue;
            const FieldElement f = m(i, col);
            for (std::size_t j = col; j < m.cols(); ++j) m(i, j) -= f * m(row, j);
        }
        pivots.push_back(col);
        ++row;
    }
    return pivots;
}

inline std::size_t rank(Matrix m) { return row_reduce(m).size(); }

inline FieldElement det(Matrix m) {
    if (m.rows() != m.cols()) throw StructuralError("determinant of a non-square matrix");
    FieldElement d = FieldElement::one(m.ctx());
    const std::size_t n = m.rows();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        while (piv < n && m(piv, col).is_zero()) ++piv;
        if (piv == n) return FieldElement::zero(m.ctx());
        if (piv != col) {
            for (std::size_t j = 0; j < n; ++j) std::swap(m(piv, j), m(col, j));
            d = -d;
        }
        d *= m(col, col);
        const FieldElement s = inv(m(col, col));
        for (std::size_t i = col + 1; i < n; ++i) {
            if (m(i, col).is_zero()) continue;
            const FieldElement f = m(i, col) * s;
            for (std::size_t j = col; j < n; ++j) m(i, j) -= f * m(col, j);
        }
    }
    return d;
}

/// Basis of {x : m x = 0}.
inline std::vector<Vec> kernel_basis(Matrix m) {
    const auto pivots = row_reduce(m);
    std::vector<bool> is_pivot(m.cols(), false);
    for (auto c : pivots) is_pivot[c] = true;
    std::vector<Vec> basis;
    for (std::size_t free = 0; free < m.cols(); ++free) {
        if (is_pivot[free]) continue;
        Vec x(m.cols(), FieldElement::zero(m.ctx()));
        x[free] = FieldElement::one(m.ctx());
        for (std::size_t r = 0; r < pivots.size(); ++r) x[pivots[r]] = -m(r, free);
        basis.push_back(std::move(x));
    }
    return basis;
}

/// The unique solution of a x = b, or nothing if the system is inconsistent or underdetermined.
inline std::optional<Vec> solve_unique(const Matrix& a, const Vec& b) {
    Matrix aug(*join_ctx(&a.ctx(), b.empty() ? &a.ctx() : &b.front().ctx()), a.rows(), a.cols() + 1);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) aug(i, j) = a(i, j);
        aug(i, a.cols()) = b.at(i);
    }
    const auto pivots = row_reduce(aug);
    if (!pivots.empty() && pivots.back() == a.cols()) return std::nullopt;
    if (pivots.size() != a.cols()) return std::nullopt;
    Vec x(a.cols(), FieldElement::zero(aug.ctx()));
    for (std::size_t r = 0; r < pivots.size(); ++r) x[pivots[r]] = aug(r, a.cols());
    return x;
}

/// Dimension of the span of a set of vectors of length n.
inline std::size_t span_dim(const FieldCtx& ctx, std::size_t n, const std::vector<Vec>& vs) {
    if (vs.empty()) return 0;
    return rank(Matrix::from_columns(ctx, n, vs));
}

/// Whether v lies in the span of vs.
inline bool in_span(const FieldCtx& ctx, const Vec& v, const std::vector<Vec>& vs) {
    auto with = vs;
    with.push_back(v);
    return span_dim(ctx, v.size(), with) == span_dim(ctx, v.size(), vs);
}

}  // namespace charp_qkz
