#pragma once

// Dense coefficient boxes over F_p: a polynomial in z_1..z_n stored as a full array
// indexed by exponent vectors with e_i < dims[i]. Used where sparse products are too slow.

#include <cstdint>
#include <vector>

#include "mpoly.hpp"

namespace charp_qkz {

class DenseBox {
public:
    DenseBox(std::uint32_t p, std::vector<unsigned> dims) : p_(p), dims_(std::move(dims)) {
        strides_.assign(dims_.size(), 1);
        std::size_t size = 1;
        for (std::size_t i = dims_.size(); i-- > 0;) {
            strides_[i] = size;
            size *= dims_[i];
        }
        data_.assign(size, 0);
    }

    static DenseBox from_mpoly(const MPoly& f, std::vector<unsigned> dims) {
        if (f.ctx().ext_degree() != 1 && !f.has_prime_field_coefficients())
            throw StructuralError("dense box needs prime-field coefficients");
        DenseBox b(f.ctx().p(), std::move(dims));
        for (const Term& t : f.terms()) {
            std::size_t idx = 0;
            for (std::size_t i = 0; i < b.dims_.size(); ++i) {
                const unsigned e = mono::exponent(t.mono, i);
                if (e >= b.dims_[i]) throw StructuralError("polynomial does not fit the dense box");
                idx += e * b.strides_[i];
            }
            b.data_[idx] = t.c.a0;
        }
        return b;
    }

    [[nodiscard]] MPoly to_mpoly(const FieldCtx& ctx) const {
        std::vector<Term> raw;
        std::vector<unsigned> e(dims_.size(), 0);
        for (std::size_t idx = 0; idx < data_.size(); ++idx) {
            if (data_[idx]) raw.push_back({mono::make(e), Coef{data_[idx], 0}});
            for (std::size_t i = dims_.size(); i-- > 0;) {
                if (++e[i] < dims_[i]) break;
                e[i] = 0;
            }
        }
        return MPoly::from_unsorted(ctx, dims_.size(), std::move(raw));
    }

    [[nodiscard]] const std::vector<unsigned>& dims() const { return dims_; }
    [[nodiscard]] std::size_t size() const { return data_.size(); }

    /// this * (z_i - z_j - c); pass j = i to omit z_j. Throws if the product leaves the box.
    [[nodiscard]] DenseBox times_linear(std::size_t i, std::size_t j, std::uint32_t c) const {
        DenseBox r(p_, dims_);
        const std::uint32_t nc = c % p_ ? p_ - c % p_ : 0;
        for (std::size_t k = 0; k < data_.size(); ++k) r.data_[k] = (nc * data_[k]) % p_;
        add_raised(r, i, false);
        if (j != i) add_raised(r, j, true);
        return r;
    }

    /// f(z_1, ..., z_a + delta, ..., z_n), in place.
    void shift_axis(std::size_t a, std::uint32_t delta) {
        delta %= p_;
        if (!delta) return;
        const std::size_t d = dims_[a], s = strides_[a], block = d * s;
        // weight[m][e] = C(m, e) delta^(m-e)
        std::vector<std::vector<std::uint32_t>> binom(d, std::vector<std::uint32_t>(d, 0));
        for (std::size_t m = 0; m < d; ++m) {
            binom[m][0] = binom[m][m] = 1;
            for (std::size_t e = 1; e < m; ++e) binom[m][e] = (binom[m - 1][e - 1] + binom[m - 1][e]) % p_;
        }
        std::vector<std::uint32_t> dp(d, 1);
        for (std::size_t e = 1; e < d; ++e) dp[e] = static_cast<std::uint32_t>((dp[e - 1] * std::uint64_t{delta}) % p_);
        std::vector<std::uint64_t> acc(block);
        for (std::size_t o = 0; o < data_.size(); o += block) {
            std::fill(acc.begin(), acc.end(), 0);
            std::uint32_t* base = data_.data() + o;
            for (std::size_t m = 0; m < d; ++m) {
                const std::uint32_t* row = base + m * s;
                for (std::size_t e = 0; e <= m; ++e) {
                    const std::uint64_t w = (std::uint64_t{binom[m][e]} * dp[m - e]) % p_;
                    if (!w) continue;
                    std::uint64_t* out = acc.data() + e * s;
                    for (std::size_t r = 0; r < s; ++r) out[r] += w * row[r];
                }
            }
            for (std::size_t k = 0; k < block; ++k) base[k] = static_cast<std::uint32_t>(acc[k] % p_);
        }
    }

    /// this += s * g.
    void axpy(std::uint32_t s, const DenseBox& g) {
        if (g.dims_ != dims_) throw StructuralError("dense box shape mismatch");
        s %= p_;
        for (std::size_t k = 0; k < data_.size(); ++k) data_[k] = (data_[k] + s * g.data_[k]) % p_;
    }

    friend bool operator==(const DenseBox& f, const DenseBox& g) { return f.dims_ == g.dims_ && f.data_ == g.data_; }

    /// Exponent vector of the first differing entry, if any.
    [[nodiscard]] std::vector<unsigned> first_difference(const DenseBox& g) const {
        for (std::size_t k = 0; k < data_.size(); ++k)
            if (data_[k] != g.data_[k]) {
                std::vector<unsigned> e(dims_.size());
                for (std::size_t i = 0; i < dims_.size(); ++i) e[i] = static_cast<unsigned>((k / strides_[i]) % dims_[i]);
                return e;
            }
        return {};
    }

private:
    // r += (+/-) z_axis * this.
    void add_raised(DenseBox& r, std::size_t axis, bool subtract) const {
        const std::size_t d = dims_[axis], s = strides_[axis], block = d * s;
        for (std::size_t o = 0; o < data_.size(); o += block) {
            const std::uint32_t* top = data_.data() + o + (d - 1) * s;
            for (std::size_t k = 0; k < s; ++k)
                if (top[k]) throw StructuralError("dense box overflow");
            const std::uint32_t* in = data_.data() + o;
            std::uint32_t* out = r.data_.data() + o + s;
            for (std::size_t k = 0; k + s < block; ++k) {
                const std::uint32_t v = subtract ? (in[k] ? p_ - in[k] : 0) : in[k];
                out[k] = (out[k] + v) % p_;
            }
        }
    }

    std::uint32_t p_;
    std::vector<unsigned> dims_;
    std::vector<std::size_t> strides_;
    std::vector<std::uint32_t> data_;
};

}  // namespace charp_qkz
