#pragma once

// Polynomials in t with MPoly coefficients, the Pochhammer basis
// (t;k)_m = t (t - k) ... (t - (m-1) k), and Stirling numbers mod p.

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ffield.hpp"
#include "mpoly.hpp"
#include "report.hpp"

namespace charp_qkz {

/// C(m, i) mod p by Pascal's rule; valid for every m, including m >= p.
inline FieldElement binomial_mod(const FieldCtx& ctx, unsigned m, unsigned i) {
    if (i > m) return FieldElement::zero(ctx);
    std::vector<Coef> row(m + 1, Coef{0, 0});
    row[0] = Coef{1, 0};
    for (unsigned r = 1; r <= m; ++r)
        for (unsigned j = r; j >= 1; --j) row[j] = ctx.add(row[j], row[j - 1]);
    return {ctx, row[i]};
}

inline FieldElement factorial_mod(const FieldCtx& ctx, unsigned l) {
    FieldElement r = FieldElement::one(ctx);
    for (unsigned i = 2; i <= l; ++i) r *= FieldElement(ctx, static_cast<std::int64_t>(i));
    return r;
}

/// Signed Stirling numbers of the first kind s_1(m, l) and Stirling numbers of
/// the second kind s_2(m, l), reduced mod p, for 0 <= l <= m <= max_m.
class StirlingTable {
public:
    StirlingTable(const FieldCtx& ctx, unsigned max_m) : ctx_(&ctx), s1_(max_m + 1), s2_(max_m + 1) {
        s1_[0] = s2_[0] = {Coef{1, 0}};
        for (unsigned m = 0; m < max_m; ++m) {
            s1_[m + 1].assign(m + 2, Coef{0, 0});
            s2_[m + 1].assign(m + 2, Coef{0, 0});
            const Coef mm = ctx.reduce(m);
            for (unsigned l = 0; l <= m + 1; ++l) {
                const Coef prev1 = l >= 1 ? s1_[m][l - 1] : Coef{0, 0};
                const Coef prev2 = l >= 1 ? s2_[m][l - 1] : Coef{0, 0};
                const Coef same1 = l <= m ? s1_[m][l] : Coef{0, 0};
                const Coef same2 = l <= m ? s2_[m][l] : Coef{0, 0};
                // s1(m+1,l) = s1(m,l-1) - m s1(m,l);  s2(m+1,l) = s2(m,l-1) + l s2(m,l)
                s1_[m + 1][l] = ctx.sub(prev1, ctx.mul(mm, same1));
                s2_[m + 1][l] = ctx.add(prev2, ctx.mul(ctx.reduce(l), same2));
            }
        }
    }

    [[nodiscard]] unsigned max_m() const { return static_cast<unsigned>(s1_.size() - 1); }
    [[nodiscard]] FieldElement s1(unsigned m, unsigned l) const { return {*ctx_, at(s1_, m, l)}; }
    [[nodiscard]] FieldElement s2(unsigned m, unsigned l) const { return {*ctx_, at(s2_, m, l)}; }
    [[nodiscard]] Coef s2_raw(unsigned m, unsigned l) const { return at(s2_, m, l); }

private:
    [[nodiscard]] Coef at(const std::vector<std::vector<Coef>>& t, unsigned m, unsigned l) const {
        if (l > m) throw std::domain_error("Stirling number with l > m");
        if (m > max_m()) throw std::out_of_range("Stirling table too small");
        return t[m][l];
    }

    const FieldCtx* ctx_;
    std::vector<std::vector<Coef>> s1_;
    std::vector<std::vector<Coef>> s2_;
};

/// s_1(m, l) (kind = 1) or s_2(m, l) (kind = 2) reduced mod p.
inline FieldElement stirling(int kind, unsigned m, unsigned l, const FieldCtx& ctx) {
    if (kind != 1 && kind != 2) throw std::invalid_argument("Stirling kind must be 1 or 2");
    if (l > m) throw std::domain_error("Stirling number with l > m");
    StirlingTable t(ctx, m);
    return kind == 1 ? t.s1(m, l) : t.s2(m, l);
}

/// Polynomial in t whose coefficients are polynomials in z_1..z_n.
class TPoly {
public:
    TPoly(const FieldCtx& ctx, std::size_t nvars) : ctx_(&ctx), nvars_(nvars) {}
    TPoly(const FieldCtx& ctx, std::size_t nvars, std::vector<MPoly> coeffs)
        : ctx_(&ctx), nvars_(nvars), coeffs_(std::move(coeffs)) {
        for (const auto& c : coeffs_) {
            if (c.nvars() != nvars_) throw StructuralError("TPoly coefficient has wrong nvars");
            ctx_ = join_ctx(ctx_, &c.ctx());
        }
        trim();
    }

    /// The polynomial t.
    static TPoly t(const FieldCtx& ctx, std::size_t nvars) {
        return TPoly(ctx, nvars, {MPoly(ctx, nvars), MPoly::constant(FieldElement::one(ctx), nvars)});
    }
    static TPoly constant(const MPoly& c) { return TPoly(c.ctx(), c.nvars(), {c}); }
    /// t - w for a polynomial w in z.
    static TPoly t_minus(const MPoly& w) {
        return TPoly(w.ctx(), w.nvars(), {-w, MPoly::constant(FieldElement::one(w.ctx()), w.nvars())});
    }

    [[nodiscard]] const FieldCtx& ctx() const { return *ctx_; }
    [[nodiscard]] std::size_t nvars() const { return nvars_; }
    [[nodiscard]] bool is_zero() const { return coeffs_.empty(); }
    /// Degree in t; -1 for the zero polynomial.
    [[nodiscard]] int deg_t() const { return static_cast<int>(coeffs_.size()) - 1; }
    [[nodiscard]] const std::vector<MPoly>& coeffs() const { return coeffs_; }
    [[nodiscard]] MPoly coeff(std::size_t i) const {
        return i < coeffs_.size() ? coeffs_[i] : MPoly(*ctx_, nvars_);
    }
    [[nodiscard]] std::size_t term_count() const {
        std::size_t n = 0;
        for (const auto& c : coeffs_) n += c.size();
        return n;
    }

    friend TPoly operator+(const TPoly& f, const TPoly& g) { return combine(f, g, false); }
    friend TPoly operator-(const TPoly& f, const TPoly& g) { return combine(f, g, true); }
    friend TPoly operator*(const TPoly& f, const MPoly& s) {
        std::vector<MPoly> out;
        out.reserve(f.coeffs_.size());
        for (const auto& c : f.coeffs_) out.push_back(c * s);
        return TPoly(*join_ctx(f.ctx_, &s.ctx()), f.nvars_, std::move(out));
    }
    friend TPoly operator*(const TPoly& f, const FieldElement& s) {
        std::vector<MPoly> out;
        out.reserve(f.coeffs_.size());
        for (const auto& c : f.coeffs_) out.push_back(c * s);
        return TPoly(*join_ctx(f.ctx_, &s.ctx()), f.nvars_, std::move(out));
    }
    friend TPoly operator*(const TPoly& f, const TPoly& g) {
        if (f.nvars_ != g.nvars_) throw StructuralError("TPoly nvars mismatch");
        const FieldCtx* c = join_ctx(f.ctx_, g.ctx_);
        if (f.is_zero() || g.is_zero()) return TPoly(*c, f.nvars_);
        const std::size_t n = f.coeffs_.size() + g.coeffs_.size() - 1;
        std::vector<MPoly> out;
        out.reserve(n);
        for (std::size_t s = 0; s < n; ++s) {
            std::vector<MPoly> parts;
            const std::size_t lo = s >= g.coeffs_.size() ? s - g.coeffs_.size() + 1 : 0;
            for (std::size_t i = lo; i <= s && i < f.coeffs_.size(); ++i) {
                const MPoly& a = f.coeffs_[i];
                const MPoly& b = g.coeffs_[s - i];
                if (!a.is_zero() && !b.is_zero()) parts.push_back(a * b);
            }
            out.push_back(sum_all(std::move(parts), *c, f.nvars_));
        }
        return TPoly(*c, f.nvars_, std::move(out));
    }
    friend bool operator==(const TPoly& f, const TPoly& g) {
        if (f.nvars_ != g.nvars_ || f.coeffs_.size() != g.coeffs_.size()) return false;
        for (std::size_t i = 0; i < f.coeffs_.size(); ++i)
            if (!(f.coeffs_[i] == g.coeffs_[i])) return false;
        return true;
    }

    [[nodiscard]] FieldElement eval(const FieldElement& t, std::span<const FieldElement> z) const {
        FieldElement acc = FieldElement::zero(*join_ctx(ctx_, &t.ctx()));
        for (std::size_t i = coeffs_.size(); i-- > 0;) acc = acc * t + coeffs_[i].eval(z);
        return acc;
    }

    /// Applies a map to every coefficient (e.g. a substitution in z).
    template <class F>
    [[nodiscard]] TPoly map_coeffs(F&& fn) const {
        std::vector<MPoly> out;
        out.reserve(coeffs_.size());
        const FieldCtx* c = ctx_;
        for (const auto& x : coeffs_) {
            out.push_back(fn(x));
            c = join_ctx(c, &out.back().ctx());
        }
        return TPoly(*c, nvars_, std::move(out));
    }

    /// Exact quotient by (t - c); throws DivisibilityError on a nonzero remainder.
    [[nodiscard]] TPoly divide_by_t_minus(const FieldElement& c) const {
        const FieldCtx* k = join_ctx(ctx_, &c.ctx());
        if (is_zero()) return TPoly(*k, nvars_);
        const std::size_t D = coeffs_.size() - 1;
        if (D == 0) throw DivisibilityError("(t - c) does not divide a nonzero constant in t");
        std::vector<MPoly> q(D, MPoly(*k, nvars_));
        q[D - 1] = coeffs_[D];
        for (std::size_t e = D - 1; e >= 1; --e) q[e - 1] = coeffs_[e].axpy(c, q[e]);
        if (!coeffs_[0].axpy(c, q[0]).is_zero()) throw DivisibilityError("(t - c) does not divide the polynomial");
        return TPoly(*k, nvars_, std::move(q));
    }

    [[nodiscard]] std::string to_string() const {
        if (is_zero()) return "0";
        std::string s;
        for (std::size_t i = coeffs_.size(); i-- > 0;) {
            if (coeffs_[i].is_zero()) continue;
            if (!s.empty()) s += " + ";
            s += "(" + coeffs_[i].to_string() + ")";
            if (i > 0) s += i == 1 ? "*t" : "*t^" + std::to_string(i);
        }
        return s;
    }

private:
    void trim() {
        while (!coeffs_.empty() && coeffs_.back().is_zero()) coeffs_.pop_back();
    }

    static TPoly combine(const TPoly& f, const TPoly& g, bool subtract) {
        if (f.nvars_ != g.nvars_) throw StructuralError("TPoly nvars mismatch");
        const FieldCtx* c = join_ctx(f.ctx_, g.ctx_);
        std::vector<MPoly> out(std::max(f.coeffs_.size(), g.coeffs_.size()), MPoly(*c, f.nvars_));
        for (std::size_t i = 0; i < out.size(); ++i) {
            MPoly a = f.coeff(i);
            out[i] = subtract ? a - g.coeff(i) : a + g.coeff(i);
        }
        return TPoly(*c, f.nvars_, std::move(out));
    }

    const FieldCtx* ctx_;
    std::size_t nvars_;
    std::vector<MPoly> coeffs_;
};

/// (t - w; k)_m = prod_{i=1}^{m} (t - w - (i-1) k) for a polynomial w in z.
inline TPoly poch_shifted(const MPoly& w, const FieldElement& kappa, unsigned m) {
    const FieldCtx& ctx = *join_ctx(&w.ctx(), &kappa.ctx());
    TPoly r = TPoly::constant(MPoly::constant(FieldElement::one(ctx), w.nvars()));
    FieldElement shift = FieldElement::zero(ctx);
    for (unsigned i = 0; i < m; ++i) {
        r = r * TPoly::t_minus(w + MPoly::constant(shift, w.nvars()));
        shift += kappa;
    }
    return r;
}

/// (t; k)_m with constant coefficients in `nvars` variables.
inline TPoly poch_poly(const FieldElement& kappa, unsigned m, std::size_t nvars = 0) {
    return poch_shifted(MPoly(kappa.ctx(), nvars), kappa, m);
}

/// (x; k)_m for a polynomial x in z.
inline MPoly poch_of(const MPoly& x, const FieldElement& kappa, unsigned m) {
    MPoly r = MPoly::constant(FieldElement::one(*join_ctx(&x.ctx(), &kappa.ctx())), x.nvars());
    FieldElement shift = FieldElement::zero(kappa.ctx());
    for (unsigned i = 0; i < m; ++i) {
        r = r * (x - MPoly::constant(shift, x.nvars()));
        shift += kappa;
    }
    return r;
}

/// Coefficients of f in the basis (t;k)_0, (t;k)_1, ...
struct PochhammerForm {
    FieldElement kappa;
    std::vector<MPoly> coeffs;
};

namespace detail {

// Monomial-basis coefficients of (t;k)_i for i = 0..D.
inline std::vector<std::vector<Coef>> pochhammer_rows(const FieldCtx& ctx, const FieldElement& kappa, unsigned D) {
    std::vector<std::vector<Coef>> rows(D + 1);
    rows[0] = {Coef{1, 0}};
    Coef root{0, 0};
    for (unsigned i = 0; i < D; ++i) {
        // multiply by (t - i k)
        const auto& prev = rows[i];
        auto& cur = rows[i + 1];
        cur.assign(prev.size() + 1, Coef{0, 0});
        for (std::size_t j = 0; j < prev.size(); ++j) {
            cur[j + 1] = ctx.add(cur[j + 1], prev[j]);
            cur[j] = ctx.sub(cur[j], ctx.mul(root, prev[j]));
        }
        root = ctx.add(root, kappa.coef());
    }
    return rows;
}

}  // namespace detail

/// Triangular elimination from the top degree: each (t;k)_i is monic of degree i.
inline PochhammerForm to_pochhammer_basis(const TPoly& f, const FieldElement& kappa) {
    const FieldCtx& ctx = *join_ctx(&f.ctx(), &kappa.ctx());
    PochhammerForm pf{kappa, {}};
    if (f.is_zero()) return pf;
    const unsigned D = static_cast<unsigned>(f.deg_t());
    const auto rows = detail::pochhammer_rows(ctx, kappa, D);
    std::vector<MPoly> work = f.coeffs();
    pf.coeffs.assign(D + 1, MPoly(ctx, f.nvars()));
    for (unsigned i = D + 1; i-- > 0;) {
        const MPoly c = work[i];
        pf.coeffs[i] = c;
        if (c.is_zero()) continue;
        for (unsigned j = 0; j < i; ++j) {
            if (rows[i][j].is_zero()) continue;
            work[j] = work[j].axpy(-FieldElement(ctx, rows[i][j]), c);
        }
    }
    return pf;
}

inline TPoly from_pochhammer_basis(const PochhammerForm& pf, std::size_t nvars) {
    const FieldCtx& ctx = pf.kappa.ctx();
    TPoly r(ctx, nvars);
    if (pf.coeffs.empty()) return r;
    const auto rows = detail::pochhammer_rows(ctx, pf.kappa, static_cast<unsigned>(pf.coeffs.size() - 1));
    std::vector<MPoly> out(pf.coeffs.size(), MPoly(ctx, nvars));
    for (std::size_t i = 0; i < pf.coeffs.size(); ++i) {
        if (pf.coeffs[i].is_zero()) continue;
        for (std::size_t j = 0; j <= i; ++j)
            if (!rows[i][j].is_zero()) out[j] = out[j].axpy(FieldElement(ctx, rows[i][j]), pf.coeffs[i]);
    }
    return TPoly(ctx, nvars, std::move(out));
}

/// Coefficient of (t;k)_i in f, through t^m = sum_l s_2(m,l) k^{m-l} (t;k)_l.
/// Touches each coefficient of f once; used when only a few indices are needed.
inline MPoly pochhammer_coefficient(const TPoly& f, const FieldElement& kappa, unsigned i,
                                    const StirlingTable* table = nullptr) {
    const FieldCtx& ctx = *join_ctx(&f.ctx(), &kappa.ctx());
    if (f.deg_t() < static_cast<int>(i)) return MPoly(ctx, f.nvars());
    const unsigned D = static_cast<unsigned>(f.deg_t());
    std::optional<StirlingTable> local;
    if (!table || table->max_m() < D) {
        local.emplace(ctx, D);
        table = &*local;
    }
    std::vector<MPoly> parts;
    FieldElement kp = FieldElement::one(ctx);
    for (unsigned m = i; m <= D; ++m) {
        const FieldElement w = table->s2(m, i) * kp;
        if (!w.is_zero() && !f.coeffs()[m].is_zero()) parts.push_back(f.coeffs()[m] * w);
        kp *= kappa;
    }
    return sum_all(std::move(parts), ctx, f.nvars());
}

// ---- identity suite ---------------------------------------------------------

namespace detail {

using UPoly = std::vector<FieldElement>;

inline void trim(UPoly& f) {
    while (!f.empty() && f.back().is_zero()) f.pop_back();
}

inline UPoly umul(const UPoly& f, const UPoly& g) {
    if (f.empty() || g.empty()) return {};
    UPoly r(f.size() + g.size() - 1, FieldElement::zero(f[0].ctx()));
    for (std::size_t i = 0; i < f.size(); ++i)
        for (std::size_t j = 0; j < g.size(); ++j) r[i + j] += f[i] * g[j];
    trim(r);
    return r;
}

inline UPoly uaxpy(UPoly f, const FieldElement& s, const UPoly& g) {
    if (f.size() < g.size()) f.resize(g.size(), FieldElement::zero(s.ctx()));
    for (std::size_t i = 0; i < g.size(); ++i) f[i] += s * g[i];
    trim(f);
    return f;
}

// f(t + c) by Horner.
inline UPoly ushift(const UPoly& f, const FieldElement& c) {
    UPoly r;
    for (std::size_t i = f.size(); i-- > 0;) {
        r = umul(r, UPoly{c, FieldElement::one(c.ctx())});
        r = uaxpy(r, FieldElement::one(c.ctx()), UPoly{f[i]});
    }
    return r;
}

inline UPoly upoch(const FieldElement& kappa, unsigned m, const FieldElement& start) {
    UPoly r{FieldElement::one(kappa.ctx())};
    FieldElement root = start;
    for (unsigned i = 0; i < m; ++i) {
        r = umul(r, UPoly{-root, FieldElement::one(kappa.ctx())});
        root += kappa;
    }
    return r;
}

}  // namespace detail

/// Mechanical check of the Pochhammer identities for one kappa and all m, i, j <= max_m:
/// shifts, binomial convolution, the product rule, both Stirling expansions, additivity
/// at p, and the quasi-constant law.
inline Report verify_pochhammer_identities(const FieldElement& kappa, unsigned max_m) {
    using detail::UPoly;
    const FieldCtx& F = kappa.ctx();
    const unsigned p = F.p();
    const FieldElement zero = FieldElement::zero(F), one = FieldElement::one(F);
    Report rep("pochhammer identities p=" + std::to_string(p) + " kappa=" + kappa.to_string());
    const unsigned top = 2 * max_m + 1;
    std::vector<UPoly> P;
    for (unsigned m = 0; m <= top; ++m) P.push_back(detail::upoch(kappa, m, zero));
    const StirlingTable st(F, top);
    const UPoly t{zero, one};
    auto fail_at = [](const std::string& what, unsigned a, unsigned b = 0) {
        return what + " fails at (" + std::to_string(a) + ", " + std::to_string(b) + ")";
    };

    std::string w;
    for (unsigned m = 0; m <= max_m && w.empty(); ++m) {
        const UPoly down = detail::upoch(kappa, m, kappa);
        const UPoly up = detail::upoch(kappa, m, -kappa);
        const FieldElement km = kappa * static_cast<std::int64_t>(m);
        if (detail::umul(down, t) != detail::umul(P[m], UPoly{-km, one})) w = fail_at("shift down", m);
        const FieldElement r = kappa * static_cast<std::int64_t>(m) - kappa;
        if (w.empty() && detail::umul(up, UPoly{-r, one}) != detail::umul(P[m], UPoly{kappa, one}))
            w = fail_at("shift up", m);
    }
    rep.add("shifts", w.empty(), w);

    w.clear();
    for (unsigned i = 0; i <= max_m && w.empty(); ++i)
        for (unsigned j = 0; j <= max_m && w.empty(); ++j) {
            UPoly rhs;
            FieldElement kl = one;
            for (unsigned l = 0; l <= std::min(i, j); ++l) {
                const FieldElement c = binomial_mod(F, i, l) * binomial_mod(F, j, l) * factorial_mod(F, l) * kl;
                rhs = detail::uaxpy(rhs, c, P[i + j - l]);
                kl *= kappa;
            }
            if (detail::umul(P[i], P[j]) != rhs) w = fail_at("product rule", i, j);
        }
    rep.add("product rule", w.empty(), w);

    w.clear();
    for (unsigned m = 0; m <= max_m && w.empty(); ++m) {
        UPoly via_s1, via_s2, tm{one};
        for (unsigned l = 0; l <= m; ++l) {
            const FieldElement kp = pow(kappa, m - l);
            UPoly tl(l + 1, zero);
            tl[l] = one;
            via_s1 = detail::uaxpy(via_s1, st.s1(m, l) * kp, tl);
            via_s2 = detail::uaxpy(via_s2, st.s2(m, l) * kp, P[l]);
        }
        for (unsigned l = 0; l < m; ++l) tm = detail::umul(tm, t);
        if (via_s1 != P[m]) w = fail_at("first-kind expansion", m);
        if (w.empty() && via_s2 != tm) w = fail_at("second-kind expansion", m);
        if (w.empty()) {
            std::vector<MPoly> c;
            for (const auto& x : tm) c.push_back(MPoly::constant(x, 0));
            const auto pf = to_pochhammer_basis(TPoly(F, 0, c), kappa);
            for (unsigned l = 0; l <= m && w.empty(); ++l)
                if (!(pf.coeffs[l] == MPoly::constant(st.s2(m, l) * pow(kappa, m - l), 0)))
                    w = fail_at("basis conversion of t^m", m, l);
        }
    }
    rep.add("stirling expansions", w.empty(), w);

    // Two formal variables: z is the MPoly variable, t the TPoly variable.
    w.clear();
    const MPoly z = MPoly::variable(F, 1, 0);
    for (unsigned m = 0; m <= max_m && w.empty(); ++m) {
        const TPoly lhs = poch_shifted(-z, kappa, m);
        TPoly rhs(F, 1);
        for (unsigned i = 0; i <= m; ++i)
            rhs = rhs + poch_poly(kappa, i, 1) * (poch_of(z, kappa, m - i) * binomial_mod(F, m, i));
        if (!(lhs == rhs)) w = fail_at("binomial convolution", m);
    }
    rep.add("binomial convolution", w.empty(), w);

    const TPoly lhs = poch_shifted(-z, kappa, p);
    const TPoly rhs = poch_poly(kappa, p, 1) + TPoly::constant(poch_of(z, kappa, p));
    rep.add("additivity at p", lhs == rhs, lhs == rhs ? "" : "(t+z;k)_p != (t;k)_p + (z;k)_p");

    w.clear();
    {
        UPoly tp(p + 1, zero);
        tp[p] = one;
        tp[1] = -pow(kappa, p - 1);
        if (P[p] != tp) w = "(t;k)_p != t^p - k^(p-1) t";
        UPoly power{one};
        for (unsigned a = 0; a * p <= top && w.empty(); ++a) {
            if (P[a * p] != power) w = fail_at("(t;k)_{pa} = (t^p - k^(p-1) t)^a", a);
            if (w.empty() && detail::ushift(P[a * p], -kappa) != P[a * p]) w = fail_at("quasi-constant shift", a);
            power = detail::umul(power, tp);
        }
        for (unsigned m = 1; m <= max_m && w.empty(); ++m)
            if (m % p != 0 && detail::ushift(P[m], -kappa) == P[m]) w = fail_at("non-multiple of p is invariant", m);
    }
    rep.add("quasi-constants", w.empty(), w);
    return rep;
}

}  // namespace charp_qkz
