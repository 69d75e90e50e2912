#pragma once

// Sparse multivariate polynomials in z_1..z_n over F_p or F_{p^2}.
//
// A monomial is packed into one 64-bit key: the top byte holds the total
// degree, the following bytes hold the exponents of z_1, z_2, ... in that
// order. Comparing keys as integers is therefore the length-lexicographic
// order with z_1 the most significant variable, and multiplying monomials is
// adding keys (as long as no byte overflows, which is checked up front).
// Terms are stored in strictly decreasing key order with nonzero coefficients.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <queue>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ffield.hpp"

namespace charp_qkz {

using MonoKey = std::uint64_t;

inline constexpr std::size_t kMaxVars = 7;
inline constexpr unsigned kMaxDegree = 255;

class StructuralError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class DivisibilityError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

namespace mono {

inline unsigned degree(MonoKey k) { return static_cast<unsigned>(k >> 56); }
inline unsigned exponent(MonoKey k, std::size_t i) {
    return static_cast<unsigned>((k >> (8 * (6 - i))) & 0xffu);
}
/// Key of the single variable z_{i+1}.
inline MonoKey var(std::size_t i) { return (MonoKey{1} << 56) | (MonoKey{1} << (8 * (6 - i))); }

inline MonoKey make(std::span<const unsigned> exps) {
    if (exps.size() > kMaxVars) throw StructuralError("at most 7 variables are supported");
    unsigned total = 0;
    MonoKey k = 0;
    for (std::size_t i = 0; i < exps.size(); ++i) {
        total += exps[i];
        if (exps[i] > kMaxDegree || total > kMaxDegree)
            throw StructuralError("monomial degree exceeds 255");
        k |= static_cast<MonoKey>(exps[i]) << (8 * (6 - i));
    }
    return k | (static_cast<MonoKey>(total) << 56);
}

inline std::vector<unsigned> exponents(MonoKey k, std::size_t nvars) {
    std::vector<unsigned> e(nvars);
    for (std::size_t i = 0; i < nvars; ++i) e[i] = exponent(k, i);
    return e;
}

/// Key with the exponent of variable i removed.
inline MonoKey drop(MonoKey k, std::size_t i) {
    const MonoKey e = exponent(k, i);
    return k - e * var(i);
}

}  // namespace mono

struct Term {
    MonoKey mono;
    Coef c;
};

/// z_i - z_j - c, or z_i - c when j is absent. Indices are 0-based.
struct LinearForm {
    std::size_t i;
    std::optional<std::size_t> j;
    FieldElement c;

    [[nodiscard]] FieldElement eval(std::span<const FieldElement> z) const {
        FieldElement v = z[i] - c;
        if (j) v -= z[*j];
        return v;
    }
    [[nodiscard]] std::string to_string() const {
        std::string s = "z" + std::to_string(i + 1);
        if (j) s += " - z" + std::to_string(*j + 1);
        if (!c.is_zero()) s += " - (" + c.to_string() + ")";
        return s;
    }
    friend bool operator==(const LinearForm& a, const LinearForm& b) {
        return a.i == b.i && a.j == b.j && a.c == b.c;
    }
};

class MPoly {
public:
    MPoly(const FieldCtx& ctx, std::size_t nvars) : ctx_(&ctx), nvars_(nvars) {
        if (nvars > kMaxVars) throw StructuralError("at most 7 variables are supported");
    }

    static MPoly constant(const FieldElement& c, std::size_t nvars) {
        MPoly f(c.ctx(), nvars);
        if (!c.is_zero()) f.terms_.push_back({0, c.coef()});
        return f;
    }
    static MPoly variable(const FieldCtx& ctx, std::size_t nvars, std::size_t i) {
        if (i >= nvars) throw StructuralError("variable index out of range");
        MPoly f(ctx, nvars);
        f.terms_.push_back({mono::var(i), Coef{1, 0}});
        return f;
    }
    static MPoly monomial(const FieldElement& c, std::span<const unsigned> exps) {
        MPoly f(c.ctx(), exps.size());
        if (!c.is_zero()) f.terms_.push_back({mono::make(exps), c.coef()});
        return f;
    }
    static MPoly from_terms(const FieldCtx& ctx, std::size_t nvars,
                            const std::vector<std::pair<std::vector<unsigned>, FieldElement>>& terms) {
        std::vector<Term> raw;
        const FieldCtx* c = &ctx;
        for (const auto& [e, v] : terms) {
            if (e.size() != nvars) throw StructuralError("exponent vector length != nvars");
            c = join_ctx(c, &v.ctx());
            raw.push_back({mono::make(e), v.coef()});
        }
        return from_unsorted(*c, nvars, std::move(raw));
    }
    static MPoly from_linear_form(const FieldCtx& ctx, std::size_t nvars, const LinearForm& L) {
        MPoly f = variable(ctx, nvars, L.i) - constant(L.c, nvars);
        if (L.j) f = f - variable(ctx, nvars, *L.j);
        return f;
    }

    /// Builds a canonical polynomial from terms in any order, combining duplicates.
    static MPoly from_unsorted(const FieldCtx& ctx, std::size_t nvars, std::vector<Term> raw) {
        std::sort(raw.begin(), raw.end(), [](const Term& a, const Term& b) { return a.mono > b.mono; });
        MPoly f(ctx, nvars);
        f.terms_.reserve(raw.size());
        for (const Term& t : raw) {
            if (!f.terms_.empty() && f.terms_.back().mono == t.mono) {
                f.terms_.back().c = ctx.add(f.terms_.back().c, t.c);
            } else {
                if (!f.terms_.empty() && f.terms_.back().c.is_zero()) f.terms_.pop_back();
                f.terms_.push_back(t);
            }
        }
        if (!f.terms_.empty() && f.terms_.back().c.is_zero()) f.terms_.pop_back();
        return f;
    }

    /// Adopts terms already in strictly decreasing order with nonzero coefficients.
    static MPoly from_sorted(const FieldCtx& ctx, std::size_t nvars, std::vector<Term> sorted) {
        MPoly f(ctx, nvars);
        f.terms_ = std::move(sorted);
        return f;
    }

    [[nodiscard]] const FieldCtx& ctx() const { return *ctx_; }
    [[nodiscard]] std::size_t nvars() const { return nvars_; }
    [[nodiscard]] const std::vector<Term>& terms() const { return terms_; }
    [[nodiscard]] std::size_t size() const { return terms_.size(); }
    [[nodiscard]] bool is_zero() const { return terms_.empty(); }
    [[nodiscard]] bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_[0].mono == 0); }

    [[nodiscard]] unsigned degree() const {
        if (is_zero()) throw std::domain_error("degree of the zero polynomial");
        return mono::degree(terms_.front().mono);
    }
    [[nodiscard]] unsigned degree_in(std::size_t i) const {
        unsigned d = 0;
        for (const Term& t : terms_) d = std::max(d, mono::exponent(t.mono, i));
        return d;
    }
    [[nodiscard]] FieldElement element(Coef c) const { return {*ctx_, c}; }
    [[nodiscard]] FieldElement coeff(std::span<const unsigned> exps) const {
        const MonoKey k = mono::make(exps);
        auto it = std::lower_bound(terms_.begin(), terms_.end(), k,
                                   [](const Term& t, MonoKey key) { return t.mono > key; });
        if (it != terms_.end() && it->mono == k) return element(it->c);
        return FieldElement::zero(*ctx_);
    }
    [[nodiscard]] FieldElement constant_term() const {
        if (!terms_.empty() && terms_.back().mono == 0) return element(terms_.back().c);
        return FieldElement::zero(*ctx_);
    }
    /// True when every coefficient lies in F_p.
    [[nodiscard]] bool has_prime_field_coefficients() const {
        return std::all_of(terms_.begin(), terms_.end(), [](const Term& t) { return t.c.a1 == 0; });
    }

    /// Same polynomial viewed over another context of the same characteristic.
    [[nodiscard]] MPoly in(const FieldCtx& other) const {
        if (other.p() != ctx_->p()) throw FieldError("cannot move polynomial across characteristics");
        if (other.ext_degree() == 1 && !has_prime_field_coefficients())
            throw FieldError("polynomial has coefficients outside the prime field");
        MPoly f(other, nvars_);
        f.terms_ = terms_;
        return f;
    }

    // ---- arithmetic ------------------------------------------------------

    friend MPoly operator+(const MPoly& f, const MPoly& g) { return combine(f, g, false); }
    friend MPoly operator-(const MPoly& f, const MPoly& g) { return combine(f, g, true); }
    MPoly operator-() const {
        MPoly r = *this;
        for (Term& t : r.terms_) t.c = ctx_->neg(t.c);
        return r;
    }
    MPoly& operator+=(const MPoly& g) { return *this = *this + g; }
    MPoly& operator-=(const MPoly& g) { return *this = *this - g; }
    MPoly& operator*=(const MPoly& g) { return *this = *this * g; }

    friend MPoly operator*(const MPoly& f, const FieldElement& s) {
        const FieldCtx* c = join_ctx(f.ctx_, &s.ctx());
        MPoly r(*c, f.nvars_);
        if (s.is_zero()) return r;
        r.terms_.reserve(f.terms_.size());
        for (const Term& t : f.terms_) {
            const Coef v = c->mul(t.c, s.coef());
            if (!v.is_zero()) r.terms_.push_back({t.mono, v});
        }
        return r;
    }
    friend MPoly operator*(const FieldElement& s, const MPoly& f) { return f * s; }
    friend MPoly operator*(const MPoly& f, std::int64_t s) { return f * FieldElement(*f.ctx_, s); }
    friend MPoly operator*(std::int64_t s, const MPoly& f) { return f * s; }

    friend MPoly operator*(const MPoly& f, const MPoly& g) {
        check_compatible(f, g);
        const FieldCtx* c = join_ctx(f.ctx_, g.ctx_);
        MPoly r(*c, f.nvars_);
        if (f.is_zero() || g.is_zero()) return r;
        if (f.degree() + g.degree() > kMaxDegree) throw StructuralError("product degree exceeds 255");
        const MPoly& big = f.size() >= g.size() ? f : g;
        const MPoly& small = f.size() >= g.size() ? g : f;
        if (small.size() == 1) {
            const Term s = small.terms_[0];
            r.terms_.reserve(big.size());
            for (const Term& t : big.terms_) {
                const Coef v = c->mul(t.c, s.c);
                if (!v.is_zero()) r.terms_.push_back({t.mono + s.mono, v});
            }
            return r;
        }
        r.terms_ = heap_product(*c, big.terms_, small.terms_);
        return r;
    }

    friend bool operator==(const MPoly& f, const MPoly& g) {
        if (f.ctx_->p() != g.ctx_->p() || f.nvars_ != g.nvars_ || f.size() != g.size()) return false;
        for (std::size_t i = 0; i < f.size(); ++i)
            if (f.terms_[i].mono != g.terms_[i].mono || !(f.terms_[i].c == g.terms_[i].c)) return false;
        return true;
    }

    /// f + s*g in one merge pass.
    [[nodiscard]] MPoly axpy(const FieldElement& s, const MPoly& g) const {
        check_compatible(*this, g);
        const FieldCtx* c = join_ctx(join_ctx(ctx_, g.ctx_), &s.ctx());
        MPoly r(*c, nvars_);
        r.terms_.reserve(size() + g.size());
        auto a = terms_.begin();
        auto b = g.terms_.begin();
        while (a != terms_.end() || b != g.terms_.end()) {
            if (b == g.terms_.end() || (a != terms_.end() && a->mono > b->mono)) {
                r.terms_.push_back(*a++);
            } else {
                const Coef sb = c->mul(b->c, s.coef());
                if (a != terms_.end() && a->mono == b->mono) {
                    const Coef v = c->add(a->c, sb);
                    if (!v.is_zero()) r.terms_.push_back({a->mono, v});
                    ++a;
                } else if (!sb.is_zero()) {
                    r.terms_.push_back({b->mono, sb});
                }
                ++b;
            }
        }
        return r;
    }

    // ---- evaluation and substitution -----------------------------------

    [[nodiscard]] FieldElement eval(std::span<const FieldElement> z) const {
        if (z.size() != nvars_) throw StructuralError("evaluation point has wrong length");
        const FieldCtx* c = ctx_;
        for (const auto& zi : z) c = join_ctx(c, &zi.ctx());
        if (is_zero()) return FieldElement::zero(*c);
        const auto pw = power_table(*c, z, degree());
        Coef acc{0, 0};
        for (const Term& t : terms_) {
            Coef v = t.c;
            for (std::size_t i = 0; i < nvars_; ++i) {
                const unsigned e = mono::exponent(t.mono, i);
                if (e) v = c->mul(v, pw[i][e]);
            }
            acc = c->add(acc, v);
        }
        return {*c, acc};
    }

    /// f(z_1, ..., z_a + delta, ..., z_n).
    [[nodiscard]] MPoly shift_var(std::size_t a, const FieldElement& delta) const {
        if (a >= nvars_) throw StructuralError("shift_var: index out of range");
        const FieldCtx* c = join_ctx(ctx_, &delta.ctx());
        if (delta.is_zero() || is_zero()) return in_joined(*c);
        const unsigned dmax = degree_in(a);
        const auto binom = binomial_rows(*c, dmax);
        std::vector<Coef> dp(dmax + 1);
        dp[0] = Coef{1, 0};
        for (unsigned e = 1; e <= dmax; ++e) dp[e] = c->mul(dp[e - 1], delta.coef());
        std::vector<Term> raw;
        raw.reserve(terms_.size() * 2);
        for (const Term& t : terms_) {
            const unsigned e = mono::exponent(t.mono, a);
            const MonoKey base = mono::drop(t.mono, a);
            for (unsigned i = 0; i <= e; ++i) {
                const Coef v = c->mul(t.c, c->mul(binom[e][i], dp[e - i]));
                if (!v.is_zero()) raw.push_back({base + i * mono::var(a), v});
            }
        }
        return from_unsorted(*c, nvars_, std::move(raw));
    }

    /// Replaces the assigned variables by values; their slots remain with exponent 0.
    [[nodiscard]] MPoly substitute(const std::map<std::size_t, FieldElement>& assignment) const {
        const FieldCtx* c = ctx_;
        for (const auto& [i, v] : assignment) {
            if (i >= nvars_) throw StructuralError("substitute: index out of range");
            c = join_ctx(c, &v.ctx());
        }
        if (assignment.empty() || is_zero()) return in_joined(*c);
        const unsigned dmax = degree();
        std::vector<std::pair<std::size_t, std::vector<Coef>>> pw;
        for (const auto& [i, v] : assignment) {
            std::vector<Coef> row(dmax + 1);
            row[0] = Coef{1, 0};
            for (unsigned e = 1; e <= dmax; ++e) row[e] = c->mul(row[e - 1], v.coef());
            pw.emplace_back(i, std::move(row));
        }
        std::vector<Term> raw;
        raw.reserve(terms_.size());
        for (const Term& t : terms_) {
            MonoKey k = t.mono;
            Coef v = t.c;
            for (const auto& [i, row] : pw) {
                const unsigned e = mono::exponent(k, i);
                if (e) {
                    v = c->mul(v, row[e]);
                    k = mono::drop(k, i);
                }
            }
            if (!v.is_zero()) raw.push_back({k, v});
        }
        return from_unsorted(*c, nvars_, std::move(raw));
    }

    /// f(-z_1, ..., -z_n).
    [[nodiscard]] MPoly negate_vars() const {
        MPoly r = *this;
        for (Term& t : r.terms_)
            if (mono::degree(t.mono) % 2) t.c = ctx_->neg(t.c);
        return r;
    }

    /// Formal partial derivative in z_{i+1}.
    [[nodiscard]] MPoly derivative(std::size_t i) const {
        if (i >= nvars_) throw StructuralError("derivative: index out of range");
        MPoly r(*ctx_, nvars_);
        for (const Term& t : terms_) {
            const unsigned e = mono::exponent(t.mono, i);
            if (e == 0) continue;
            const Coef v = ctx_->mul(t.c, ctx_->reduce(e));
            if (!v.is_zero()) r.terms_.push_back({t.mono - mono::var(i), v});
        }
        return r;
    }

    // ---- structure -------------------------------------------------------

    [[nodiscard]] MPoly homogeneous_part(unsigned d) const {
        MPoly r(*ctx_, nvars_);
        for (const Term& t : terms_)
            if (mono::degree(t.mono) == d) r.terms_.push_back(t);
        return r;
    }

    [[nodiscard]] MPoly pow(unsigned e) const {
        MPoly r = constant(FieldElement::one(*ctx_), nvars_), b = *this;
        for (; e; e >>= 1) {
            if (e & 1U) r = r * b;
            if (e > 1) b = b * b;
        }
        return r;
    }

    [[nodiscard]] MPoly top_degree_part() const {
        if (is_zero()) throw std::domain_error("top_degree_part of the zero polynomial");
        return homogeneous_part(degree());
    }

    /// Largest term in the length-lexicographic order (z_1 most significant).
    [[nodiscard]] std::pair<std::vector<unsigned>, FieldElement> leading_term() const {
        if (is_zero()) throw std::domain_error("leading_term of the zero polynomial");
        return {mono::exponents(terms_.front().mono, nvars_), element(terms_.front().c)};
    }

    /// Coefficients of f as a polynomial in z_{i+1}: entry e is the coefficient of z_{i+1}^e.
    [[nodiscard]] std::vector<MPoly> slices(std::size_t i) const {
        std::vector<std::vector<Term>> parts(is_zero() ? 0 : degree_in(i) + 1);
        for (const Term& t : terms_) {
            const unsigned e = mono::exponent(t.mono, i);
            parts[e].push_back({mono::drop(t.mono, i), t.c});
        }
        std::vector<MPoly> out;
        out.reserve(parts.size());
        for (auto& part : parts) out.push_back(from_sorted(*ctx_, nvars_, std::move(part)));
        return out;
    }

    /// Inverse of slices(): sum of z_{i+1}^e * parts[e]; parts must be free of z_{i+1}.
    static MPoly from_slices(const FieldCtx& ctx, std::size_t nvars, std::size_t i,
                             const std::vector<MPoly>& parts) {
        std::vector<Term> raw;
        const FieldCtx* c = &ctx;
        for (std::size_t e = 0; e < parts.size(); ++e) {
            c = join_ctx(c, &parts[e].ctx());
            for (const Term& t : parts[e].terms_) {
                if (mono::exponent(t.mono, i) != 0) throw StructuralError("from_slices: slice depends on the variable");
                if (mono::degree(t.mono) + e > kMaxDegree) throw StructuralError("degree exceeds 255");
                raw.push_back({t.mono + e * mono::var(i), t.c});
            }
        }
        return from_unsorted(*c, nvars, std::move(raw));
    }

    /// Exact quotient by the linear form L; throws DivisibilityError if L does not divide f.
    [[nodiscard]] MPoly divide_exact_linear(const LinearForm& L) const {
        if (L.i >= nvars_ || (L.j && (*L.j >= nvars_ || *L.j == L.i)))
            throw StructuralError("divide_exact_linear: bad linear form");
        const FieldCtx* c = join_ctx(ctx_, &L.c.ctx());
        if (is_zero()) return in_joined(*c);
        // f = (z_i - w) q with w = z_j + c; synthetic division in z_i.
        MPoly w = constant(L.c, nvars_);
        if (L.j) w = w + variable(*c, nvars_, *L.j);
        auto s = slices(L.i);
        const std::size_t D = s.size() - 1;
        std::vector<MPoly> q(D, MPoly(*c, nvars_));
        if (D == 0) throw DivisibilityError("linear form " + L.to_string() + " does not divide the polynomial");
        q[D - 1] = s[D];
        for (std::size_t e = D - 1; e >= 1; --e) q[e - 1] = s[e] + w * q[e];
        const MPoly rem = s[0] + w * q[0];
        if (!rem.is_zero())
            throw DivisibilityError("linear form " + L.to_string() + " does not divide the polynomial");
        return from_slices(*c, nvars_, L.i, q);
    }

    /// Writes f as Y(h(z_1), ..., h(z_n)) with h(x) = x^p - x, returning Y
    /// (slot i of Y holds the exponent of h(z_i)), or nothing if f is not of that form.
    [[nodiscard]] std::optional<MPoly> expand_in_h() const {
        const std::uint32_t p = ctx_->p();
        MPoly cur = *this;
        for (std::size_t i = 0; i < nvars_; ++i) {
            if (cur.is_zero()) break;
            auto s = cur.slices(i);
            std::vector<MPoly> digits;
            while (!s.empty()) {
                // divide the polynomial in z_i with coefficients s by z_i^p - z_i
                std::vector<MPoly> quot(s.size() > p ? s.size() - p : 0, MPoly(cur.ctx(), nvars_));
                for (std::size_t e = s.size(); e-- > p;) {
                    if (s[e].is_zero()) continue;
                    quot[e - p] += s[e];
                    s[e - p + 1] += s[e];
                    s[e] = MPoly(cur.ctx(), nvars_);
                }
                for (std::size_t e = 1; e < std::min<std::size_t>(s.size(), p); ++e)
                    if (!s[e].is_zero()) return std::nullopt;
                digits.push_back(s[0]);
                while (!quot.empty() && quot.back().is_zero()) quot.pop_back();
                s = std::move(quot);
            }
            cur = from_slices(cur.ctx(), nvars_, i, digits);
        }
        return cur;
    }

    [[nodiscard]] std::string to_string(const std::vector<std::string>& names = {}) const {
        if (is_zero()) return "0";
        std::ostringstream os;
        bool first = true;
        for (const Term& t : terms_) {
            const FieldElement v = element(t.c);
            bool negative = false;
            std::string coef;
            if (v.in_prime_field()) {
                std::int64_t s = v.symmetric();
                negative = s < 0;
                if (negative) s = -s;
                coef = std::to_string(s);
            } else {
                coef = "(" + v.to_string() + ")";
            }
            if (first) {
                if (negative) os << "-";
            } else {
                os << (negative ? " - " : " + ");
            }
            first = false;
            std::string mon;
            for (std::size_t i = 0; i < nvars_; ++i) {
                const unsigned e = mono::exponent(t.mono, i);
                if (!e) continue;
                if (!mon.empty()) mon += "*";
                mon += i < names.size() ? names[i] : "z" + std::to_string(i + 1);
                if (e > 1) mon += "^" + std::to_string(e);
            }
            if (mon.empty()) {
                os << coef;
            } else {
                if (coef != "1") os << coef << "*";
                os << mon;
            }
        }
        return os.str();
    }

private:
    static void check_compatible(const MPoly& f, const MPoly& g) {
        if (f.nvars_ != g.nvars_) throw StructuralError("polynomials have different numbers of variables");
    }

    [[nodiscard]] MPoly in_joined(const FieldCtx& c) const {
        MPoly r = *this;
        r.ctx_ = &c;
        return r;
    }

    static MPoly combine(const MPoly& f, const MPoly& g, bool subtract) {
        return f.axpy(subtract ? FieldElement(*g.ctx_, -1) : FieldElement::one(*g.ctx_), g);
    }

    static std::vector<std::vector<Coef>> power_table(const FieldCtx& c, std::span<const FieldElement> z,
                                                      unsigned dmax) {
        std::vector<std::vector<Coef>> pw(z.size(), std::vector<Coef>(dmax + 1));
        for (std::size_t i = 0; i < z.size(); ++i) {
            pw[i][0] = Coef{1, 0};
            for (unsigned e = 1; e <= dmax; ++e) pw[i][e] = c.mul(pw[i][e - 1], z[i].coef());
        }
        return pw;
    }

    static std::vector<std::vector<Coef>> binomial_rows(const FieldCtx& c, unsigned dmax) {
        std::vector<std::vector<Coef>> b(dmax + 1);
        for (unsigned e = 0; e <= dmax; ++e) {
            b[e].resize(e + 1);
            b[e][0] = b[e][e] = Coef{1, 0};
            for (unsigned i = 1; i < e; ++i) b[e][i] = c.add(b[e - 1][i - 1], b[e - 1][i]);
        }
        return b;
    }

    // Each term of `small` times `big` is a sorted stream; merge them with a heap.
    static std::vector<Term> heap_product(const FieldCtx& c, const std::vector<Term>& big,
                                          const std::vector<Term>& small) {
        using Entry = std::pair<MonoKey, std::uint32_t>;
        std::priority_queue<Entry> heap;
        std::vector<std::size_t> pos(small.size(), 0);
        for (std::uint32_t s = 0; s < small.size(); ++s) heap.emplace(big[0].mono + small[s].mono, s);
        std::vector<Term> out;
        out.reserve(big.size() + small.size());
        while (!heap.empty()) {
            const MonoKey key = heap.top().first;
            Coef acc{0, 0};
            while (!heap.empty() && heap.top().first == key) {
                const std::uint32_t s = heap.top().second;
                heap.pop();
                acc = c.add(acc, c.mul(big[pos[s]].c, small[s].c));
                if (++pos[s] < big.size()) heap.emplace(big[pos[s]].mono + small[s].mono, s);
            }
            if (!acc.is_zero()) out.push_back({key, acc});
        }
        return out;
    }

    const FieldCtx* ctx_;
    std::size_t nvars_;
    std::vector<Term> terms_;
};

inline std::ostream& operator<<(std::ostream& os, const MPoly& f) { return os << f.to_string(); }

/// Sum of many polynomials by pairwise merging.
inline MPoly sum_all(std::vector<MPoly> parts, const FieldCtx& ctx, std::size_t nvars) {
    if (parts.empty()) return MPoly(ctx, nvars);
    while (parts.size() > 1) {
        std::vector<MPoly> next;
        next.reserve((parts.size() + 1) / 2);
        for (std::size_t i = 0; i + 1 < parts.size(); i += 2) next.push_back(parts[i] + parts[i + 1]);
        if (parts.size() % 2) next.push_back(std::move(parts.back()));
        parts = std::move(next);
    }
    return std::move(parts.front());
}

/// h(x) = x^p - x evaluated at the variable z_{i+1}.
inline MPoly h_of_var(const FieldCtx& ctx, std::size_t nvars, std::size_t i) {
    std::vector<unsigned> e(nvars, 0);
    e[i] = ctx.p();
    return MPoly::monomial(FieldElement::one(ctx), e) - MPoly::variable(ctx, nvars, i);
}

}  // namespace charp_qkz
