#pragma once

// p-hypergeometric solutions of qKZ and KZ, their leading terms and minors,
// special restrictions, the orthogonality pairing, and quasi-hypergeometric sections.
//
// Q_a(t, z) = prod_{j<a} (t - z_j - k; k)_k * (t - z_a - k; k)_{k-1} * prod_{j>a} (t - z_j; k)_k
// (kappa written k above), and Q^i is the coefficient of (t; kappa)_i in Q.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "ffield.hpp"
#include "linalg.hpp"
#include "mpoly.hpp"
#include "pochhammer.hpp"
#include "qkz_core.hpp"
#include "report.hpp"

namespace charp_qkz {

class RankError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

struct SolutionSet {
    QkzParams params;
    std::vector<VectorPoly> solutions;  // entry l-1 is Q^{lp-1}
};

namespace detail {

using URow = std::vector<std::uint32_t>;

struct FactorSpec {
    std::uint32_t shift;  // c in (t - z_j - c; kappa)_m
    unsigned length;      // m
};

inline std::vector<FactorSpec> q_factor_specs(const QkzParams& P, std::size_t a) {
    require_prime_field_kappa(P);
    const unsigned k = *P.k;
    const std::uint32_t kap = P.kappa.a0();
    std::vector<FactorSpec> specs;
    for (std::size_t j = 0; j < P.n; ++j) {
        if (j < a) specs.push_back({kap, k});
        else if (j == a) specs.push_back({kap, k - 1});
        else specs.push_back({0, k});
    }
    return specs;
}

// (t - z - c; kappa)_m over F_p as rows[e][s] = coefficient of z^e t^s.
inline std::vector<URow> poch_factor_rows(std::uint32_t p, std::uint32_t c, std::uint32_t kappa, unsigned m) {
    std::vector<URow> rows(m + 1, URow(m + 1, 0));
    rows[0][0] = 1;
    std::uint32_t root = c % p;
    for (unsigned i = 0; i < m; ++i) {
        std::vector<URow> next(m + 1, URow(m + 1, 0));
        for (unsigned e = 0; e <= i; ++e)
            for (unsigned s = 0; e + s <= i; ++s) {
                const std::uint32_t v = rows[e][s];
                if (!v) continue;
                next[e][s + 1] = (next[e][s + 1] + v) % p;
                next[e + 1][s] = (next[e + 1][s] + p - v) % p;
                next[e][s] = static_cast<std::uint32_t>((next[e][s] + std::uint64_t{p - root} * v) % p);
            }
        rows = std::move(next);
        root = (root + kappa) % p;
    }
    for (auto& r : rows)
        while (!r.empty() && r.back() == 0) r.pop_back();
    return rows;
}

// (t - z)^m as rows[e] = C(m, e) (-1)^e t^{m-e}.
inline std::vector<URow> power_factor_rows(std::uint32_t p, unsigned m) {
    const FieldCtx& F = make_field(p);
    std::vector<URow> rows(m + 1);
    for (unsigned e = 0; e <= m; ++e) {
        rows[e].assign(m - e + 1, 0);
        const std::uint32_t b = binomial_mod(F, m, e).a0();
        rows[e][m - e] = (e % 2 && b) ? p - b : b;
    }
    return rows;
}

// Functional t^m -> coefficient of (t; kappa)_i, for m = 0..T.
inline URow pochhammer_functional(const StirlingTable& st, const FieldElement& kappa, unsigned i, unsigned T) {
    URow lam(T + 1, 0);
    FieldElement kp = FieldElement::one(kappa.ctx());
    for (unsigned m = i; m <= T; ++m) {
        lam[m] = (st.s2(m, i) * kp).a0();
        kp *= kappa;
    }
    return lam;
}

inline URow umul_mod(const URow& f, const URow& g, std::uint32_t p) {
    if (f.empty() || g.empty()) return {};
    std::vector<std::uint64_t> acc(f.size() + g.size() - 1, 0);
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (!f[i]) continue;
        for (std::size_t j = 0; j < g.size(); ++j) acc[i + j] += std::uint64_t{f[i]} * g[j];
    }
    URow r(acc.size());
    for (std::size_t i = 0; i < acc.size(); ++i) r[i] = static_cast<std::uint32_t>(acc[i] % p);
    return r;
}

/// For a product of factors F_j(t, z_j) (factor j given by rows over powers of z_j)
/// and linear functionals on the t-coefficients of that product, returns for each
/// functional the polynomial in z obtained by applying it coefficientwise.
/// Each z-monomial coefficient of the product is a product of univariate t-polynomials,
/// so the product in t is never expanded as a whole.
inline std::vector<MPoly> separable_functionals(const FieldCtx& F, const std::vector<std::vector<URow>>& factors,
                                                const std::vector<URow>& lambdas) {
    const std::uint32_t p = F.p();
    const std::size_t n = factors.size();
    std::vector<std::vector<Term>> out(lambdas.size());
    if (n == 0 || lambdas.empty()) {
        std::vector<MPoly> r;
        for (std::size_t l = 0; l < lambdas.size(); ++l) r.emplace_back(F, n);
        return r;
    }
    std::size_t T = 0;
    for (const auto& lam : lambdas) T = std::max(T, lam.size());
    // mu[e][l][m] = sum_s rows_last[e][s] lambda_l[m + s]
    const auto& last = factors.back();
    std::vector<std::vector<URow>> mu(last.size(), std::vector<URow>(lambdas.size(), URow(T, 0)));
    for (std::size_t e = 0; e < last.size(); ++e)
        for (std::size_t l = 0; l < lambdas.size(); ++l)
            for (std::size_t m = 0; m < T; ++m) {
                std::uint64_t acc = 0;
                for (std::size_t s = 0; s < last[e].size() && m + s < lambdas[l].size(); ++s)
                    acc += std::uint64_t{last[e][s]} * lambdas[l][m + s];
                mu[e][l][m] = static_cast<std::uint32_t>(acc % p);
            }
    std::vector<unsigned> exps(n, 0);
    std::function<void(std::size_t, const URow&)> walk = [&](std::size_t depth, const URow& prefix) {
        if (depth + 1 == n) {
            for (std::size_t e = 0; e < last.size(); ++e) {
                if (last[e].empty()) continue;
                exps[depth] = static_cast<unsigned>(e);
                MonoKey key = 0;
                bool have_key = false;
                for (std::size_t l = 0; l < lambdas.size(); ++l) {
                    std::uint64_t acc = 0;
                    const URow& w = mu[e][l];
                    for (std::size_t m = 0; m < prefix.size() && m < w.size(); ++m) acc += std::uint64_t{prefix[m]} * w[m];
                    const auto v = static_cast<std::uint32_t>(acc % p);
                    if (!v) continue;
                    if (!have_key) {
                        key = mono::make(exps);
                        have_key = true;
                    }
                    out[l].push_back({key, Coef{v, 0}});
                }
            }
            return;
        }
        const auto& rows = factors[depth];
        for (std::size_t e = 0; e < rows.size(); ++e) {
            if (rows[e].empty()) continue;
            exps[depth] = static_cast<unsigned>(e);
            walk(depth + 1, umul_mod(prefix, rows[e], p));
        }
        exps[depth] = 0;
    };
    walk(0, URow{1});
    std::vector<MPoly> r;
    for (auto& terms : out) r.push_back(MPoly::from_unsorted(F, n, std::move(terms)));
    return r;
}

}  // namespace detail

/// Q_a(t, z) as polynomials in t over F_p[z], built from the product formula with sparse arithmetic.
inline std::vector<TPoly> q_vector(const QkzParams& P) {
    std::vector<TPoly> Q;
    for (std::size_t a = 0; a < P.n; ++a) {
        TPoly q = TPoly::constant(MPoly::constant(FieldElement::one(*P.ctx), P.n));
        const auto specs = detail::q_factor_specs(P, a);
        for (std::size_t j = 0; j < P.n; ++j) {
            const MPoly w = MPoly::variable(*P.ctx, P.n, j) + MPoly::constant(FieldElement(*P.ctx, specs[j].shift), P.n);
            q = q * poch_shifted(w, P.kappa, specs[j].length);
        }
        Q.push_back(std::move(q));
    }
    return Q;
}

/// Q_a(t, z) at a point, multiplying out the product formula.
inline FieldElement q_value(const QkzParams& P, std::size_t a, const FieldElement& t, const Vec& z) {
    const auto specs = detail::q_factor_specs(P, a);
    FieldElement r = FieldElement::one(*join_ctx(&t.ctx(), &z.at(0).ctx()));
    for (std::size_t j = 0; j < P.n; ++j) {
        FieldElement root = z[j] + FieldElement(*P.ctx, specs[j].shift);
        for (unsigned i = 0; i < specs[j].length; ++i) {
            r *= t - root;
            root += P.kappa;
        }
    }
    return r;
}

/// Q_a = Phi eta_a with Phi = prod_j (t - z_j; kappa)_k and
/// eta_a = (t - z_a)^{-1} prod_{j<a} (t - z_j + 1)/(t - z_j), compared with denominators cleared
/// at random points (t, z) over F_{p^2}.
inline Report verify_weight_function_formula(const QkzParams& P, std::size_t count, std::uint64_t seed) {
    require_prime_field_kappa(P);
    Report rep("product formula vs Phi*eta " + P.label());
    const FieldCtx& E = P.ext();
    std::mt19937_64 rng(seed);
    const unsigned k = *P.k;
    for (std::size_t a = 0; a < P.n; ++a) {
        std::string witness;
        for (std::size_t it = 0; it < count && witness.empty(); ++it) {
            Vec z;
            for (std::size_t j = 0; j < P.n; ++j) z.push_back(random_element(E, rng));
            const FieldElement t = random_element(E, rng);
            FieldElement phi = FieldElement::one(E);
            for (std::size_t j = 0; j < P.n; ++j) phi *= poch_of(MPoly::constant(t - z[j], 0), P.kappa, k).constant_term();
            FieldElement lhs = q_value(P, a, t, z) * (t - z[a]);
            FieldElement rhs = phi;
            for (std::size_t j = 0; j < a; ++j) {
                lhs *= t - z[j];
                rhs *= t - z[j] + 1;
            }
            if (!(lhs == rhs)) witness = "at t=" + t.to_string() + " z=" + point_string(z);
        }
        rep.add("a=" + std::to_string(a + 1), witness.empty(), witness);
    }
    return rep;
}

/// Coefficients of (t;kappa)_i, i in `indices`, of every Q_a: result[idx][a].
inline std::vector<VectorPoly> pochhammer_coefficients(const QkzParams& P, const std::vector<unsigned>& indices) {
    require_prime_field_kappa(P);
    const std::uint32_t p = P.p();
    const unsigned T = static_cast<unsigned>(P.n) * *P.k - 1;
    const StirlingTable st(*P.ctx, T);
    std::vector<detail::URow> lambdas;
    for (unsigned i : indices) lambdas.push_back(i <= T ? detail::pochhammer_functional(st, P.kappa, i, T) : detail::URow{});
    std::vector<VectorPoly> out(indices.size(), VectorPoly(P.n, MPoly(*P.ctx, P.n)));
    for (std::size_t a = 0; a < P.n; ++a) {
        std::vector<std::vector<detail::URow>> factors;
        for (const auto& s : detail::q_factor_specs(P, a))
            factors.push_back(detail::poch_factor_rows(p, s.shift, P.kappa.a0(), s.length));
        auto polys = detail::separable_functionals(*P.ctx, factors, lambdas);
        for (std::size_t l = 0; l < indices.size(); ++l) out[l][a] = std::move(polys[l]);
    }
    return out;
}

/// Q^{lp-1}, l = 1..d(kappa).
inline SolutionSet extract_solutions(const QkzParams& P) {
    require_prime_field_kappa(P);
    std::vector<unsigned> idx;
    for (unsigned l = 1; l <= *P.d; ++l) idx.push_back(l * P.p() - 1);
    return {P, pochhammer_coefficients(P, idx)};
}

/// Q^{lp-1} = 0 for d(kappa) < l <= n, since lp - 1 exceeds deg_t Q_a = nk - 1.
inline Report verify_vanishing_beyond_d(const QkzParams& P) {
    require_prime_field_kappa(P);
    Report rep("vanishing beyond d " + P.label());
    std::vector<unsigned> idx;
    for (unsigned l = *P.d + 1; l <= P.n; ++l) idx.push_back(l * P.p() - 1);
    const auto coeffs = pochhammer_coefficients(P, idx);
    for (std::size_t i = 0; i < idx.size(); ++i) {
        bool zero = true;
        for (const auto& c : coeffs[i]) zero = zero && c.is_zero();
        rep.add("l=" + std::to_string(*P.d + 1 + i), zero, zero ? "" : "nonzero coefficient");
    }
    return rep;
}

/// Values of Q^{lp-1}(z), l = 1..d(kappa), at a point, from the product formula in t.
inline std::vector<Vec> solution_values_at(const QkzParams& P, const Vec& z) {
    require_prime_field_kappa(P);
    const FieldCtx& E = *join_ctx(P.ctx, &z.at(0).ctx());
    const unsigned T = static_cast<unsigned>(P.n) * *P.k - 1;
    const StirlingTable st(*P.ctx, T);
    std::vector<Vec> out(*P.d, Vec(P.n, FieldElement::zero(E)));
    for (std::size_t a = 0; a < P.n; ++a) {
        std::vector<FieldElement> u{FieldElement::one(E)};
        const auto specs = detail::q_factor_specs(P, a);
        for (std::size_t j = 0; j < P.n; ++j) {
            FieldElement root = z[j] + FieldElement(E, specs[j].shift);
            for (unsigned i = 0; i < specs[j].length; ++i) {
                std::vector<FieldElement> next(u.size() + 1, FieldElement::zero(E));
                for (std::size_t m = 0; m < u.size(); ++m) {
                    next[m + 1] += u[m];
                    next[m] -= root * u[m];
                }
                u = std::move(next);
                root += P.kappa;
            }
        }
        for (unsigned l = 1; l <= *P.d; ++l) {
            const auto lam = detail::pochhammer_functional(st, P.kappa, l * P.p() - 1, T);
            FieldElement v = FieldElement::zero(E);
            for (std::size_t m = 0; m < u.size(); ++m)
                if (lam[m]) v += u[m] * static_cast<std::int64_t>(lam[m]);
            out[l - 1][a] = v;
        }
    }
    return out;
}

/// Coefficients of t^{lp-1} in bar-Q_a = prod_{j != a}(t - z_j)^k (t - z_a)^{k-1}, l = 1..d(kappa).
inline SolutionSet barq_solutions(const QkzParams& P) {
    require_prime_field_kappa(P);
    const std::uint32_t p = P.p();
    const unsigned k = *P.k, T = static_cast<unsigned>(P.n) * k - 1;
    std::vector<detail::URow> lambdas;
    for (unsigned l = 1; l <= *P.d; ++l) {
        detail::URow lam(T + 1, 0);
        lam[l * p - 1] = 1;
        lambdas.push_back(std::move(lam));
    }
    SolutionSet out{P, std::vector<VectorPoly>(*P.d, VectorPoly(P.n, MPoly(*P.ctx, P.n)))};
    for (std::size_t a = 0; a < P.n; ++a) {
        std::vector<std::vector<detail::URow>> factors;
        for (std::size_t j = 0; j < P.n; ++j) factors.push_back(detail::power_factor_rows(p, j == a ? k - 1 : k));
        auto polys = detail::separable_functionals(*P.ctx, factors, lambdas);
        for (std::size_t l = 0; l < polys.size(); ++l) out.solutions[l][a] = std::move(polys[l]);
    }
    return out;
}

// ---- leading terms -----------------------------------------------------------

struct LeadingTermData {
    unsigned ell = 0;
    unsigned r = 0;
    unsigned a = 0;
    Vec u;
    std::vector<unsigned> monomial;
};

struct VectorTerm {
    std::vector<unsigned> monomial;
    Vec coeffs;
    friend bool operator==(const VectorTerm&, const VectorTerm&) = default;
};

inline std::string to_string(const VectorTerm& t) {
    std::string s = "z^(";
    for (std::size_t i = 0; i < t.monomial.size(); ++i) s += (i ? "," : "") + std::to_string(t.monomial[i]);
    s += ") * (";
    for (std::size_t i = 0; i < t.coeffs.size(); ++i) s += (i ? ", " : "") + t.coeffs[i].to_string();
    return s + ")";
}

/// Largest monomial occurring in any coordinate, with the vector of its coefficients.
inline std::optional<VectorTerm> vector_leading_term(const VectorPoly& f) {
    std::optional<MonoKey> best;
    for (const auto& c : f)
        if (!c.is_zero() && (!best || c.terms().front().mono > *best)) best = c.terms().front().mono;
    if (!best) return std::nullopt;
    VectorTerm t{mono::exponents(*best, f.at(0).nvars()), {}};
    for (const auto& c : f) t.coeffs.push_back(c.coeff(t.monomial));
    return t;
}

inline void require_p_not_dividing_n(const QkzParams& P) {
    if (P.n % P.p() == 0) throw std::domain_error("this statement needs p not dividing n");
}

inline LeadingTermData leading_term_data(const QkzParams& P, unsigned ell) {
    require_prime_field_kappa(P);
    require_p_not_dividing_n(P);
    if (ell < 1 || ell > *P.d) throw std::out_of_range("solution index out of range");
    const unsigned k = *P.k, D = static_cast<unsigned>(P.n) * k - ell * P.p();
    LeadingTermData L;
    L.ell = ell;
    L.r = D / k;
    L.a = D - L.r * k;
    const FieldCtx& F = *P.ctx;
    FieldElement scale = binomial_mod(F, k, L.a) / FieldElement(F, k);
    if (D % 2) scale = -scale;
    L.u.assign(P.n, FieldElement::zero(F));
    L.u[L.r] = scale * static_cast<std::int64_t>(k - L.a);
    for (std::size_t i = L.r + 1; i < P.n; ++i) L.u[i] = scale * static_cast<std::int64_t>(k);
    L.monomial.assign(P.n, 0);
    for (std::size_t i = 0; i < L.r; ++i) L.monomial[i] = k;
    L.monomial[L.r] = L.a;
    return L;
}

/// Leading term for n = 3, d(kappa) = 1 as displayed case by case:
/// p/2 < k < 2p/3: z1^k z2^{2k-p} (-1)^{3k-p}/k C(k, 2k-p) (0, p-k, k);
/// p/3 < k < p/2:  z1^{3k-p} (-1)^k/k C(k, 3k-p) (p-2k, k, k).
inline std::optional<VectorTerm> three_point_example_term(const QkzParams& P) {
    require_prime_field_kappa(P);
    if (P.n != 3 || *P.d != 1) return std::nullopt;
    const FieldCtx& F = *P.ctx;
    const long p = P.p(), k = *P.k;
    VectorTerm t{{0, 0, 0}, {}};
    FieldElement s = FieldElement::one(F);
    if (2 * k > p && 3 * k < 2 * p) {
        t.monomial = {static_cast<unsigned>(k), static_cast<unsigned>(2 * k - p), 0};
        s = binomial_mod(F, k, 2 * k - p) / FieldElement(F, k);
        if ((3 * k - p) % 2) s = -s;
        t.coeffs = {FieldElement::zero(F), s * (p - k), s * k};
    } else if (3 * k > p && 2 * k < p) {
        t.monomial = {static_cast<unsigned>(3 * k - p), 0, 0};
        s = binomial_mod(F, k, 3 * k - p) / FieldElement(F, k);
        if (k % 2) s = -s;
        t.coeffs = {s * (p - 2 * k), s * k, s * k};
    } else {
        return std::nullopt;
    }
    return t;
}

enum class LeadMutation { none, permuted_u };

/// Leading terms of Q^{lp-1} against the closed formula, and against bar-Q^{lp-1}.
inline Report verify_leading_terms(const SolutionSet& sols, const SolutionSet& barq,
                                   LeadMutation mut = LeadMutation::none) {
    const QkzParams& P = sols.params;
    Report rep("leading terms " + P.label());
    for (unsigned l = 1; l <= *P.d; ++l) {
        const auto L = leading_term_data(P, l);
        VectorTerm predicted{L.monomial, L.u};
        if (mut == LeadMutation::permuted_u) std::rotate(predicted.coeffs.begin(), predicted.coeffs.begin() + 1, predicted.coeffs.end());
        const auto got = vector_leading_term(sols.solutions[l - 1]);
        const auto bar = vector_leading_term(barq.solutions[l - 1]);
        const std::string name = "l=" + std::to_string(l);
        rep.add(name + " formula", got && *got == predicted,
                "expected " + to_string(predicted) + ", got " + (got ? to_string(*got) : "zero"));
        rep.add(name + " equals bar-Q", got && bar && *got == *bar,
                "bar-Q leading term " + (bar ? to_string(*bar) : "zero"));
    }
    return rep;
}

// ---- minors and independence ---------------------------------------------------

/// Determinant of the rows I of the n x d matrix of solutions (cofactor expansion).
inline MPoly minor(const SolutionSet& sols, const std::vector<std::size_t>& I) {
    const std::size_t d = sols.solutions.size();
    if (I.size() != d || d == 0) throw std::invalid_argument("minor needs |I| = d(kappa) >= 1");
    const FieldCtx& F = *sols.params.ctx;
    const std::size_t n = sols.params.n;
    std::function<MPoly(std::vector<std::size_t>, std::size_t)> expand = [&](std::vector<std::size_t> rows,
                                                                              std::size_t col) -> MPoly {
        if (col == d) return MPoly::constant(FieldElement::one(F), n);
        MPoly acc(F, n);
        for (std::size_t r = 0; r < rows.size(); ++r) {
            auto rest = rows;
            rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(r));
            const MPoly term = sols.solutions[col].at(rows[r]) * expand(rest, col + 1);
            acc = r % 2 ? acc - term : acc + term;
        }
        return acc;
    };
    return expand(I, 0);
}

inline std::vector<std::vector<std::size_t>> index_sets(std::size_t n, std::size_t size) {
    std::vector<std::vector<std::size_t>> out;
    std::vector<std::size_t> cur;
    std::function<void(std::size_t)> rec = [&](std::size_t start) {
        if (cur.size() == size) {
            out.push_back(cur);
            return;
        }
        for (std::size_t i = start; i < n; ++i) {
            cur.push_back(i);
            rec(i + 1);
            cur.pop_back();
        }
    };
    rec(0);
    return out;
}

inline std::string index_set_string(const std::vector<std::size_t>& I) {
    std::string s = "{";
    for (std::size_t i = 0; i < I.size(); ++i) s += (i ? "," : "") + std::to_string(I[i] + 1);
    return s + "}";
}

/// Some d x d minor is a nonzero polynomial, witnessed by a nonzero value at a sampled point.
/// Notes list every index set that is nonzero somewhere, and the status of the pivot set {r(l)+1}.
inline Report verify_independence(const SolutionSet& sols, const std::vector<Vec>& points) {
    const QkzParams& P = sols.params;
    Report rep("independence " + P.label());
    const std::size_t d = sols.solutions.size();
    if (d == 0) {
        rep.note("d(kappa)=0: nothing to check");
        return rep;
    }
    const auto sets = index_sets(P.n, d);
    std::vector<bool> nonzero(sets.size(), false);
    for (const auto& z : points) {
        std::vector<Vec> cols;
        for (const auto& s : sols.solutions) cols.push_back(eval(s, z));
        const Matrix M = Matrix::from_columns(z[0].ctx(), P.n, cols);
        for (std::size_t s = 0; s < sets.size(); ++s) {
            if (nonzero[s]) continue;
            Matrix sub(M.ctx(), d, d);
            for (std::size_t i = 0; i < d; ++i)
                for (std::size_t j = 0; j < d; ++j) sub(i, j) = M(sets[s][i], j);
            nonzero[s] = !det(sub).is_zero();
        }
    }
    std::string found;
    for (std::size_t s = 0; s < sets.size(); ++s)
        if (nonzero[s]) found += (found.empty() ? "" : " ") + index_set_string(sets[s]);
    rep.add("some minor nonzero", !found.empty(), found.empty() ? "all minors vanish at the sampled points" : "");
    rep.note("nonzero minors at rows: " + (found.empty() ? std::string("none") : found));
    if (P.n % P.p() != 0) {
        std::vector<std::size_t> pivots;
        for (unsigned l = 1; l <= d; ++l) pivots.push_back(leading_term_data(P, l).r);
        std::sort(pivots.begin(), pivots.end());
        const auto it = std::find(sets.begin(), sets.end(), pivots);
        rep.note("pivot rows " + index_set_string(pivots) + ": " +
                 (it != sets.end() && nonzero[static_cast<std::size_t>(it - sets.begin())] ? "nonzero" : "zero"));
    }
    return rep;
}

// ---- special restrictions -------------------------------------------------------

/// z_{i_b} = ((b-1)k - 1) kappa for I = {i_1 < ... < i_a}.
inline std::map<std::size_t, FieldElement> special_assignment(const QkzParams& P, const std::vector<std::size_t>& I) {
    require_prime_field_kappa(P);
    std::map<std::size_t, FieldElement> m;
    const long k = *P.k;
    for (std::size_t b = 0; b < I.size(); ++b) m.emplace(I[b], P.kappa * (static_cast<long>(b) * k - 1));
    return m;
}

inline VectorPoly restrict_special(const QkzParams& P, const VectorPoly& f, const std::vector<std::size_t>& I) {
    const auto m = special_assignment(P, I);
    VectorPoly r;
    for (const auto& c : f) r.push_back(c.substitute(m));
    return r;
}

/// Q(t, z)_{S_I} as a vector of t-polynomials (sparse path).
inline std::vector<TPoly> restrict_special(const QkzParams& P, const std::vector<TPoly>& Q, const std::vector<std::size_t>& I) {
    const auto m = special_assignment(P, I);
    std::vector<TPoly> r;
    for (const auto& q : Q) r.push_back(q.map_coeffs([&](const MPoly& c) { return c.substitute(m); }));
    return r;
}

/// For every nonempty I: Q(t, z)_{S_I} is divisible by (t; kappa)_{|I|k-1} with quotient of t-degree (n-|I|)k,
/// and Q^{lp-1}_{S_I} = 0 whenever lp < |I|k.
inline Report verify_restrictions(const SolutionSet& sols) {
    const QkzParams& P = sols.params;
    Report rep("special restrictions " + P.label());
    const std::uint32_t p = P.p();
    const unsigned k = *P.k;
    std::string div_witness, van_witness;
    std::size_t van_checked = 0;
    for (std::size_t size = 1; size <= P.n; ++size)
        for (const auto& I : index_sets(P.n, size)) {
            const auto assign = special_assignment(P, I);
            const unsigned a = static_cast<unsigned>(size);
            // The substituted factors form a univariate polynomial in t; the rest stays in z.
            for (std::size_t c = 0; c < P.n && div_witness.empty(); ++c) {
                const auto specs = detail::q_factor_specs(P, c);
                std::vector<FieldElement> u{FieldElement::one(*P.ctx)};
                unsigned rest_deg = 0;
                for (std::size_t j = 0; j < P.n; ++j) {
                    if (!assign.count(j)) {
                        rest_deg += specs[j].length;
                        continue;
                    }
                    FieldElement root = assign.at(j) + FieldElement(*P.ctx, specs[j].shift);
                    for (unsigned i = 0; i < specs[j].length; ++i) {
                        u = detail::umul(u, {-root, FieldElement::one(*P.ctx)});
                        root += P.kappa;
                    }
                }
                std::vector<MPoly> coeffs;
                for (const auto& x : u) coeffs.push_back(MPoly::constant(x, 0));
                TPoly q(*P.ctx, 0, coeffs);
                try {
                    FieldElement root = FieldElement::zero(*P.ctx);
                    for (unsigned s = 0; s + 1 < a * k; ++s) {
                        q = q.divide_by_t_minus(root);
                        root += P.kappa;
                    }
                    if (static_cast<unsigned>(q.deg_t()) + rest_deg != (P.n - a) * k)
                        div_witness = "I=" + index_set_string(I) + " a=" + std::to_string(c + 1) + ": quotient degree";
                } catch (const DivisibilityError&) {
                    div_witness = "I=" + index_set_string(I) + " a=" + std::to_string(c + 1) + ": not divisible";
                }
            }
            for (unsigned l = 1; l <= sols.solutions.size() && van_witness.empty(); ++l) {
                if (l * p >= a * k) continue;
                ++van_checked;
                for (const auto& c : sols.solutions[l - 1])
                    if (!c.substitute(assign).is_zero()) {
                        van_witness = "l=" + std::to_string(l) + " I=" + index_set_string(I);
                        break;
                    }
            }
        }
    rep.add("pochhammer divisibility", div_witness.empty(), div_witness);
    rep.add("restricted solutions vanish (" + std::to_string(van_checked) + " cases)", van_witness.empty(), van_witness);
    return rep;
}

// ---- orthogonality ----------------------------------------------------------------

namespace detail {

/// Values of f on the grid X_0 x ... x X_{n-1}, last axis fastest.
inline std::vector<Coef> evaluate_on_grid(const MPoly& f, const FieldCtx& E, const std::vector<std::vector<Coef>>& axes) {
    const std::size_t n = axes.size();
    std::vector<std::size_t> dims(n);
    for (std::size_t i = 0; i < n; ++i) dims[i] = f.degree_in(i) + 1;
    auto total = [&] {
        std::size_t s = 1;
        for (auto d : dims) s *= d;
        return s;
    };
    std::vector<Coef> data(total(), Coef{0, 0});
    for (const Term& t : f.terms()) {
        std::size_t idx = 0;
        for (std::size_t i = 0; i < n; ++i) idx = idx * dims[i] + mono::exponent(t.mono, i);
        data[idx] = E.reduce(t.c.a0, t.c.a1);
    }
    for (std::size_t ax = 0; ax < n; ++ax) {
        const std::size_t d = dims[ax], q = axes[ax].size();
        std::size_t inner = 1, outer = 1;
        for (std::size_t i = ax + 1; i < n; ++i) inner *= dims[i];
        for (std::size_t i = 0; i < ax; ++i) outer *= dims[i];
        std::vector<std::vector<Coef>> pw(q, std::vector<Coef>(d));
        for (std::size_t x = 0; x < q; ++x) {
            pw[x][0] = Coef{1, 0};
            for (std::size_t e = 1; e < d; ++e) pw[x][e] = E.mul(pw[x][e - 1], axes[ax][x]);
        }
        std::vector<Coef> next(outer * q * inner, Coef{0, 0});
        for (std::size_t o = 0; o < outer; ++o)
            for (std::size_t e = 0; e < d; ++e) {
                const Coef* src = data.data() + (o * d + e) * inner;
                for (std::size_t x = 0; x < q; ++x) {
                    const Coef w = pw[x][e];
                    Coef* dst = next.data() + (o * q + x) * inner;
                    for (std::size_t r = 0; r < inner; ++r)
                        if (!src[r].is_zero()) dst[r] = E.add(dst[r], E.mul(w, src[r]));
                }
            }
        data = std::move(next);
        dims[ax] = q;
    }
    return data;
}

}  // namespace detail

struct OrthogonalityResult {
    std::vector<std::vector<MPoly>> G;  // G[l-1][m-1]
    std::size_t grid_points = 0;
};

/// G_{l,m}(z) = sum_a Q^{mp-1}_a(-z; -kappa) Q^{lp-1}_a(z; kappa).
/// deg_{z_j} G <= p, so G vanishes identically iff it vanishes on a grid with p+1 points per axis;
/// the grid lives in F_{p^2}. A nonzero G is expanded symbolically.
inline OrthogonalityResult orthogonality_pairing(const SolutionSet& sols, const SolutionSet& dual) {
    const QkzParams& P = sols.params;
    require_p_greater_than_n(P);
    const std::size_t n = P.n;
    const FieldCtx& E = P.ext();
    std::vector<VectorPoly> neg;
    for (const auto& g : dual.solutions) neg.push_back(negate_vars(g));
    std::vector<std::vector<Coef>> axes(n);
    for (std::size_t i = 0; i < n; ++i) {
        unsigned bound = 0;
        for (const auto& f : sols.solutions)
            for (const auto& g : neg)
                for (std::size_t a = 0; a < n; ++a) bound = std::max(bound, f[a].degree_in(i) + g[a].degree_in(i));
        for (unsigned x = 0; x <= bound; ++x)
            axes[i].push_back(x < P.p() ? Coef{x, 0} : Coef{x - P.p(), 1});
    }
    OrthogonalityResult res;
    res.grid_points = 1;
    for (const auto& ax : axes) res.grid_points *= ax.size();
    std::vector<std::vector<std::vector<Coef>>> fv, gv;
    for (const auto& f : sols.solutions) {
        fv.emplace_back();
        for (const auto& c : f) fv.back().push_back(detail::evaluate_on_grid(c, E, axes));
    }
    for (const auto& g : neg) {
        gv.emplace_back();
        for (const auto& c : g) gv.back().push_back(detail::evaluate_on_grid(c, E, axes));
    }
    for (std::size_t l = 0; l < fv.size(); ++l) {
        res.G.emplace_back();
        for (std::size_t m = 0; m < gv.size(); ++m) {
            bool zero = true;
            for (std::size_t x = 0; x < res.grid_points && zero; ++x) {
                Coef s{0, 0};
                for (std::size_t a = 0; a < n; ++a) s = E.add(s, E.mul(fv[l][a][x], gv[m][a][x]));
                zero = s.is_zero();
            }
            res.G.back().push_back(zero ? MPoly(*P.ctx, n) : shapovalov(neg[m], sols.solutions[l]));
        }
    }
    return res;
}

inline Report verify_orthogonality(const SolutionSet& sols, const SolutionSet& dual) {
    const QkzParams& P = sols.params;
    Report rep("orthogonality " + P.label());
    const auto res = orthogonality_pairing(sols, dual);
    for (std::size_t l = 0; l < res.G.size(); ++l)
        for (std::size_t m = 0; m < res.G[l].size(); ++m) {
            const MPoly& G = res.G[l][m];
            std::string detail;
            if (!G.is_zero()) {
                const auto h = G.expand_in_h();
                detail = "G = " + G.to_string() + (h ? " (lies in F_p[h(z)])" : " (not in F_p[h(z)])");
            }
            rep.add("G(" + std::to_string(l + 1) + "," + std::to_string(m + 1) + ")", G.is_zero(), detail);
        }
    rep.note("grid points: " + std::to_string(res.grid_points));
    return rep;
}

// ---- quasi-hypergeometric sections -------------------------------------------------

/// T^l(z), l = 1..d(-kappa): S(Q^{mp-1}(-z;-kappa), T^l) = delta_{lm}, T^l in V, and
/// S(Q^{l'p-1}(z;kappa), T^l) = 0 for every l' (this fixes the class in V / span).
inline std::vector<Vec> quasi_sections_at(const QkzParams& P, const Vec& z) {
    require_p_greater_than_n(P);
    require_p_not_dividing_n(P);
    const QkzParams M = negated(P);
    const auto own = solution_values_at(P, z);
    const auto dual = solution_values_at(M, negated(z));
    const FieldCtx& E = z.at(0).ctx();
    const std::size_t n = P.n, dd = dual.size();
    if (own.size() + dd + 1 != n) throw std::logic_error("d(kappa) + d(-kappa) != n - 1");
    Matrix A(E, n, n);
    for (std::size_t m = 0; m < dd; ++m)
        for (std::size_t i = 0; i < n; ++i) A(m, i) = dual[m][i];
    for (std::size_t i = 0; i < n; ++i) A(dd, i) = FieldElement::one(E);
    for (std::size_t l = 0; l < own.size(); ++l)
        for (std::size_t i = 0; i < n; ++i) A(dd + 1 + l, i) = own[l][i];
    std::vector<Vec> T;
    for (std::size_t l = 0; l < dd; ++l) {
        Vec b(n, FieldElement::zero(E));
        b[l] = FieldElement::one(E);
        auto x = solve_unique(A, b);
        if (!x) throw RankError("quasi-section system is degenerate at z=" + point_string(z));
        T.push_back(std::move(*x));
    }
    return T;
}

/// K_a(z) T^l(z) - T^l(z - kappa e_a) lies in span{Q^{l'p-1}(z - kappa e_a)} at every usable point.
inline Report verify_quasi_flatness(const QkzParams& P, const std::vector<Vec>& points) {
    Report rep("quasi-section flatness " + P.label());
    for (std::size_t a = 0; a < P.n; ++a) {
        std::string witness;
        std::size_t used = 0;
        for (const auto& z : points) {
            try {
                const Vec zs = shifted(z, a, -P.kappa);
                const auto T0 = quasi_sections_at(P, z);
                const auto T1 = quasi_sections_at(P, zs);
                const Matrix K = k_operator_at(P, a, z);
                const auto span = solution_values_at(P, zs);
                ++used;
                for (std::size_t l = 0; l < T0.size() && witness.empty(); ++l) {
                    Vec diff = K * T0[l];
                    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] -= T1[l][i];
                    if (!in_span(z[0].ctx(), diff, span))
                        witness = "l=" + std::to_string(l + 1) + " at z=" + point_string(z);
                }
            } catch (const RankError& e) {
                rep.note(std::string("skipped: ") + e.what());
            } catch (const SingularPointError& e) {
                rep.note(std::string("skipped: ") + e.what());
            }
        }
        rep.add("a=" + std::to_string(a + 1) + " (" + std::to_string(used) + " points)", witness.empty() && used > 0,
                used ? witness : "no usable points");
    }
    return rep;
}

}  // namespace charp_qkz
