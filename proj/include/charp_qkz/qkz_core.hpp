#pragma once

// Weight space L^{(x)n}[n-2] = K^n, rational R-matrix, qKZ operators K_a,
// Gaudin Hamiltonians H_a, Shapovalov form, and the equation checkers.
//
// Indices are 0-based in code; rendered names (z1, ..., "a=1") are 1-based.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dense.hpp"
#include "ffield.hpp"
#include "linalg.hpp"
#include "mpoly.hpp"
#include "report.hpp"

namespace charp_qkz {

/// Point on (or numerically degenerate for) one of the hyperplanes z_i - z_j = m.
class SingularPointError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

inline std::string kappa_string(const FieldElement& x) {
    if (x.in_prime_field()) return std::to_string(x.a0());
    return std::to_string(x.a0()) + "+" + std::to_string(x.a1()) + "*g";
}

inline std::string point_string(const Vec& z) {
    std::string s = "(";
    for (std::size_t i = 0; i < z.size(); ++i) s += (i ? ", " : "") + kappa_string(z[i]);
    return s + ")";
}

/// k with kappa k = -1 mod p and 0 < k < p.
inline unsigned k_from_kappa(const FieldElement& kappa) {
    if (kappa.is_zero() || !kappa.in_prime_field())
        throw std::domain_error("k is defined only for kappa in F_p^x");
    const std::uint32_t p = kappa.ctx().p();
    for (unsigned k = 1; k < p; ++k)
        if ((static_cast<std::uint64_t>(kappa.a0()) * k) % p == p - 1) return k;
    throw std::logic_error("unreachable: kappa invertible");
}

/// d(kappa) = floor(n k / p).
inline unsigned d_of_kappa(std::size_t n, const FieldElement& kappa) {
    return static_cast<unsigned>(n * k_from_kappa(kappa) / kappa.ctx().p());
}

struct QkzParams {
    const FieldCtx* ctx;  // smallest field holding kappa
    std::size_t n;
    FieldElement kappa;
    std::optional<unsigned> k;
    std::optional<unsigned> d;

    [[nodiscard]] std::uint32_t p() const { return ctx->p(); }
    [[nodiscard]] bool kappa_in_prime_field() const { return kappa.in_prime_field(); }
    /// F_{p^2}, where evaluation points live.
    [[nodiscard]] const FieldCtx& ext() const { return make_field(p(), 2); }
    [[nodiscard]] std::string label() const {
        return "p=" + std::to_string(p()) + " n=" + std::to_string(n) + " kappa=" + kappa_string(kappa);
    }
};

/// Accepts 2 <= n <= p; statements that need p > n call require_p_greater_than_n.
inline QkzParams make_params(std::uint32_t p, std::size_t n, const FieldElement& kappa) {
    const FieldCtx& base = make_field(p);
    if (kappa.ctx().p() != p) throw FieldError("kappa lives in a field of another characteristic");
    if (n < 2) throw std::invalid_argument("n must be at least 2");
    if (n > p) throw std::invalid_argument("n must not exceed p");
    if (n > kMaxVars) throw std::invalid_argument("n exceeds the supported number of variables");
    if (kappa.is_zero()) throw std::invalid_argument("kappa must be nonzero");
    QkzParams P{&base, n, kappa.in_prime_field() ? kappa.in(base) : kappa, std::nullopt, std::nullopt};
    if (!kappa.in_prime_field()) {
        P.ctx = &make_field(p, 2);
        P.kappa = kappa.in(*P.ctx);
    } else {
        P.k = k_from_kappa(P.kappa);
        P.d = static_cast<unsigned>(n * *P.k / p);
    }
    return P;
}

inline QkzParams make_params(std::uint32_t p, std::size_t n, std::int64_t kappa) {
    return make_params(p, n, FieldElement(make_field(p), kappa));
}

/// Same n, step -kappa.
inline QkzParams negated(const QkzParams& P) { return make_params(P.p(), P.n, -P.kappa); }

inline void require_p_greater_than_n(const QkzParams& P) {
    if (P.n >= P.p()) throw std::invalid_argument("this statement assumes p > n (" + P.label() + ")");
}

inline void require_prime_field_kappa(const QkzParams& P) {
    if (!P.kappa_in_prime_field()) throw std::domain_error("this construction needs kappa in F_p^x");
}

/// V-valued (or K^n-valued) polynomial function of z, coordinates in the basis v^(i).
using VectorPoly = std::vector<MPoly>;
using PolyMatrix = std::vector<std::vector<MPoly>>;

inline MPoly coordinate_sum(const VectorPoly& f) {
    if (f.empty()) throw StructuralError("empty vector");
    return sum_all(f, f.front().ctx(), f.front().nvars());
}

inline Vec eval(const VectorPoly& f, const Vec& z) {
    Vec r;
    r.reserve(f.size());
    for (const auto& c : f) r.push_back(c.eval(z));
    return r;
}

inline VectorPoly shift_var(const VectorPoly& f, std::size_t a, const FieldElement& delta) {
    VectorPoly r;
    r.reserve(f.size());
    for (const auto& c : f) r.push_back(c.shift_var(a, delta));
    return r;
}

inline VectorPoly negate_vars(const VectorPoly& f) {
    VectorPoly r;
    r.reserve(f.size());
    for (const auto& c : f) r.push_back(c.negate_vars());
    return r;
}

inline Vec shifted(Vec z, std::size_t a, const FieldElement& delta) {
    z.at(a) += delta;
    return z;
}

inline Vec negated(Vec z) {
    for (auto& x : z) x = -x;
    return z;
}

/// Operator num / prod(den) with every denominator factor of the form z_i - z_j - c.
struct RatOpMatrix {
    PolyMatrix num;
    std::vector<LinearForm> den;

    [[nodiscard]] std::size_t size() const { return num.size(); }

    [[nodiscard]] MPoly den_poly() const {
        const MPoly& ref = num.at(0).at(0);
        MPoly d = MPoly::constant(FieldElement::one(ref.ctx()), ref.nvars());
        for (const auto& L : den) d = d * MPoly::from_linear_form(ref.ctx(), ref.nvars(), L);
        return d;
    }

    [[nodiscard]] Matrix eval(const Vec& z) const {
        FieldElement dv = FieldElement::one(z.at(0).ctx());
        for (const auto& L : den) {
            const FieldElement v = L.eval(z);
            if (v.is_zero()) throw SingularPointError("pole on " + L.to_string() + " = 0");
            dv *= v;
        }
        const FieldElement s = inv(dv);
        Matrix m(s.ctx(), size(), size());
        for (std::size_t i = 0; i < size(); ++i)
            for (std::size_t j = 0; j < size(); ++j) m(i, j) = num[i][j].eval(z) * s;
        return m;
    }
};

inline PolyMatrix poly_identity(const FieldCtx& ctx, std::size_t nvars, std::size_t dim) {
    PolyMatrix m(dim, std::vector<MPoly>(dim, MPoly(ctx, nvars)));
    for (std::size_t i = 0; i < dim; ++i) m[i][i] = MPoly::constant(FieldElement::one(ctx), nvars);
    return m;
}

inline PolyMatrix poly_mul(const PolyMatrix& a, const PolyMatrix& b) {
    const std::size_t n = a.size(), m = b.at(0).size(), l = b.size();
    const FieldCtx& ctx = *join_ctx(&a[0][0].ctx(), &b[0][0].ctx());
    const std::size_t nv = a[0][0].nvars();
    PolyMatrix r(n, std::vector<MPoly>(m, MPoly(ctx, nv)));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            std::vector<MPoly> parts;
            for (std::size_t t = 0; t < l; ++t)
                if (!a[i][t].is_zero() && !b[t][j].is_zero()) parts.push_back(a[i][t] * b[t][j]);
            r[i][j] = sum_all(std::move(parts), ctx, nv);
        }
    return r;
}

inline Matrix eval(const PolyMatrix& m, const Vec& z) {
    Matrix r(z.at(0).ctx(), m.size(), m.at(0).size());
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < m[i].size(); ++j) r(i, j) = m[i][j].eval(z);
    return r;
}

/// Negative controls for the operator checks.
enum class KMutation { none, drop_factor, reversed_order };

/// One factor R^{(a,j)}(u) with u = z_a - z_j - shift.
struct RFactor {
    std::size_t j;
    FieldElement shift;
};

/// Factors of K_a in printed order (leftmost first):
/// R^{(a,a-1)}(z_a - z_{a-1} - kappa) ... R^{(a,1)}(...) R^{(a,n)}(z_a - z_n) ... R^{(a,a+1)}(...).
inline std::vector<RFactor> k_factors(const QkzParams& P, std::size_t a, KMutation mut = KMutation::none) {
    if (a >= P.n) throw std::out_of_range("operator index out of range");
    std::vector<RFactor> f;
    for (std::size_t j = a; j-- > 0;) f.push_back({j, P.kappa});
    for (std::size_t j = P.n; j-- > a + 1;) f.push_back({j, FieldElement::zero(*P.ctx)});
    if (mut == KMutation::drop_factor && !f.empty()) f.erase(f.begin());
    if (mut == KMutation::reversed_order) std::reverse(f.begin(), f.end());
    return f;
}

/// Symbolic K_a: numerator prod (u I - P^{(a,j)}), denominator prod (u - 1).
inline RatOpMatrix k_operator(const QkzParams& P, std::size_t a, KMutation mut = KMutation::none) {
    const auto factors = k_factors(P, a, mut);
    const FieldCtx& ctx = *P.ctx;
    RatOpMatrix K{poly_identity(ctx, P.n, P.n), {}};
    const MPoly one = MPoly::constant(FieldElement::one(ctx), P.n);
    for (auto it = factors.rbegin(); it != factors.rend(); ++it) {
        const LinearForm uf{a, it->j, it->shift};
        const MPoly u = MPoly::from_linear_form(ctx, P.n, uf);
        const MPoly um1 = u - one;
        auto& M = K.num;
        for (std::size_t i = 0; i < P.n; ++i) {
            if (i == a || i == it->j) continue;
            for (auto& x : M[i]) x = x * um1;
        }
        for (std::size_t c = 0; c < P.n; ++c) {
            const MPoly ra = u * M[a][c] - M[it->j][c];
            const MPoly rj = u * M[it->j][c] - M[a][c];
            M[a][c] = ra;
            M[it->j][c] = rj;
        }
        K.den.push_back({a, it->j, it->shift + 1});
    }
    return K;
}

/// Numerator of K_a applied to a vector of polynomials (no matrix is formed).
inline VectorPoly apply_k_numerator(const QkzParams& P, std::size_t a, VectorPoly f,
                                    KMutation mut = KMutation::none) {
    if (f.size() != P.n) throw StructuralError("vector length must equal n");
    const auto factors = k_factors(P, a, mut);
    const FieldCtx& ctx = *join_ctx(P.ctx, &f.front().ctx());
    const MPoly one = MPoly::constant(FieldElement::one(ctx), P.n);
    for (auto it = factors.rbegin(); it != factors.rend(); ++it) {
        const MPoly u = MPoly::from_linear_form(ctx, P.n, {a, it->j, it->shift});
        const MPoly um1 = u - one;
        for (std::size_t i = 0; i < P.n; ++i)
            if (i != a && i != it->j) f[i] = f[i] * um1;
        const MPoly fa = u * f[a] - f[it->j];
        const MPoly fj = u * f[it->j] - f[a];
        f[a] = fa;
        f[it->j] = fj;
    }
    return f;
}

inline std::vector<LinearForm> k_denominator(const QkzParams& P, std::size_t a, KMutation mut = KMutation::none) {
    std::vector<LinearForm> den;
    for (const auto& f : k_factors(P, a, mut)) den.push_back({a, f.j, f.shift + 1});
    return den;
}

/// K_a(z) assembled factor by factor at a point of F_{p^2}^n.
/// Throws SingularPointError when some factor has a pole (u = 1) or is not invertible (u = -1).
inline Matrix k_operator_at(const QkzParams& P, std::size_t a, const Vec& z, KMutation mut = KMutation::none) {
    if (z.size() != P.n) throw StructuralError("point length must equal n");
    const auto factors = k_factors(P, a, mut);
    const FieldCtx& ctx = *join_ctx(P.ctx, &z.front().ctx());
    Matrix M = Matrix::identity(ctx, P.n);
    for (auto it = factors.rbegin(); it != factors.rend(); ++it) {
        const FieldElement u = z[a] - z[it->j] - it->shift;
        const std::string plane = "z" + std::to_string(a + 1) + " - z" + std::to_string(it->j + 1);
        if ((u - 1).is_zero())
            throw SingularPointError("pole: " + plane + " = " + kappa_string(it->shift + 1));
        if ((u + 1).is_zero())
            throw SingularPointError("degenerate R-matrix: " + plane + " = " + kappa_string(it->shift - 1));
        const FieldElement s = inv(u - 1);
        for (std::size_t c = 0; c < P.n; ++c) {
            const FieldElement ra = (u * M(a, c) - M(it->j, c)) * s;
            const FieldElement rj = (u * M(it->j, c) - M(a, c)) * s;
            M(a, c) = ra;
            M(it->j, c) = rj;
        }
    }
    return M;
}

/// Checks (prod den_a) f(z - kappa e_a) = num_a f(z) for every a, as polynomial identities.
inline Report verify_qkz_solution(const QkzParams& P, const VectorPoly& f, KMutation mut = KMutation::none) {
    Report rep("qkz solution " + P.label());
    if (f.size() != P.n) throw StructuralError("vector length must equal n");
    const FieldCtx& ctx = *join_ctx(P.ctx, &f.front().ctx());
    for (std::size_t a = 0; a < P.n; ++a) {
        VectorPoly lhs = shift_var(f, a, -P.kappa);
        for (const auto& L : k_denominator(P, a, mut)) {
            const MPoly lf = MPoly::from_linear_form(ctx, P.n, L);
            for (auto& c : lhs) c = c * lf;
        }
        const VectorPoly rhs = apply_k_numerator(P, a, f, mut);
        std::string witness;
        for (std::size_t i = 0; i < P.n && witness.empty(); ++i)
            if (!(lhs[i] == rhs[i])) witness = "coordinate " + std::to_string(i + 1) + " differs";
        rep.add("a=" + std::to_string(a + 1), witness.empty(), witness);
    }
    return rep;
}

/// Same identities as verify_qkz_solution, evaluated on dense coefficient boxes.
/// Requires kappa and all coefficients of f in F_p.
inline Report verify_qkz_solution_dense(const QkzParams& P, const VectorPoly& f, KMutation mut = KMutation::none) {
    require_prime_field_kappa(P);
    Report rep("qkz solution " + P.label());
    if (f.size() != P.n) throw StructuralError("vector length must equal n");
    const std::uint32_t p = P.p();
    std::vector<unsigned> deg(P.n, 0);
    for (const auto& c : f)
        for (std::size_t i = 0; i < P.n; ++i) deg[i] = std::max(deg[i], c.degree_in(i));
    for (std::size_t a = 0; a < P.n; ++a) {
        const auto factors = k_factors(P, a, mut);
        std::vector<unsigned> dims(P.n);
        for (std::size_t i = 0; i < P.n; ++i) dims[i] = deg[i] + 2;
        dims[a] = deg[a] + 1 + static_cast<unsigned>(factors.size());
        std::vector<DenseBox> lhs, rhs;
        for (const auto& c : f) rhs.push_back(DenseBox::from_mpoly(c, dims));
        for (const auto& b : rhs) {
            DenseBox x = b;
            x.shift_axis(a, p - P.kappa.a0());
            for (const auto& L : k_denominator(P, a, mut)) x = x.times_linear(a, *L.j, L.c.a0());
            lhs.push_back(std::move(x));
        }
        for (auto it = factors.rbegin(); it != factors.rend(); ++it) {
            const std::size_t j = it->j;
            const std::uint32_t c = it->shift.a0();
            for (std::size_t i = 0; i < P.n; ++i)
                if (i != a && i != j) rhs[i] = rhs[i].times_linear(a, j, (c + 1) % p);
            DenseBox xa = rhs[a].times_linear(a, j, c);
            DenseBox xj = rhs[j].times_linear(a, j, c);
            xa.axpy(p - 1, rhs[j]);
            xj.axpy(p - 1, rhs[a]);
            rhs[a] = std::move(xa);
            rhs[j] = std::move(xj);
        }
        std::string witness;
        for (std::size_t i = 0; i < P.n && witness.empty(); ++i)
            if (!(lhs[i] == rhs[i])) witness = "coordinate " + std::to_string(i + 1) + " differs";
        rep.add("a=" + std::to_string(a + 1), witness.empty(), witness);
    }
    return rep;
}

/// Gaudin Hamiltonian H_a = sum_{j != a} (P^{(a,j)} - 1) / (z_a - z_j), over a common denominator.
inline RatOpMatrix gaudin_operator(const QkzParams& P, std::size_t a) {
    if (a >= P.n) throw std::out_of_range("operator index out of range");
    const FieldCtx& ctx = *P.ctx;
    const FieldElement zero = FieldElement::zero(ctx);
    RatOpMatrix H{PolyMatrix(P.n, std::vector<MPoly>(P.n, MPoly(ctx, P.n))), {}};
    for (std::size_t j = 0; j < P.n; ++j) {
        if (j == a) continue;
        H.den.push_back({a, j, zero});
        MPoly w = MPoly::constant(FieldElement::one(ctx), P.n);
        for (std::size_t l = 0; l < P.n; ++l)
            if (l != a && l != j) w = w * MPoly::from_linear_form(ctx, P.n, {a, l, zero});
        H.num[a][a] -= w;
        H.num[j][j] -= w;
        H.num[a][j] += w;
        H.num[j][a] += w;
    }
    return H;
}

/// Checks kappa prod_{j != a}(z_a - z_j) df/dz_a = num(H_a) f for every a.
inline Report verify_kz_solution(const QkzParams& P, const VectorPoly& f) {
    Report rep("kz solution " + P.label());
    if (f.size() != P.n) throw StructuralError("vector length must equal n");
    const FieldCtx& ctx = *join_ctx(P.ctx, &f.front().ctx());
    const FieldElement zero = FieldElement::zero(ctx);
    for (std::size_t a = 0; a < P.n; ++a) {
        MPoly den = MPoly::constant(P.kappa, P.n);
        for (std::size_t j = 0; j < P.n; ++j)
            if (j != a) den = den * MPoly::from_linear_form(ctx, P.n, {a, j, zero});
        VectorPoly rhs(P.n, MPoly(ctx, P.n));
        for (std::size_t j = 0; j < P.n; ++j) {
            if (j == a) continue;
            MPoly w = MPoly::constant(FieldElement::one(ctx), P.n);
            for (std::size_t l = 0; l < P.n; ++l)
                if (l != a && l != j) w = w * MPoly::from_linear_form(ctx, P.n, {a, l, zero});
            const MPoly diff = w * (f[j] - f[a]);
            rhs[a] += diff;
            rhs[j] -= diff;
        }
        std::string witness;
        for (std::size_t i = 0; i < P.n && witness.empty(); ++i)
            if (!(den * f[i].derivative(a) == rhs[i])) witness = "coordinate " + std::to_string(i + 1) + " differs";
        rep.add("a=" + std::to_string(a + 1), witness.empty(), witness);
    }
    return rep;
}

// ---- Shapovalov form ------------------------------------------------------

/// On the weight basis v^(i) the Shapovalov form is the dot product.
inline FieldElement shapovalov(const Vec& x, const Vec& y) {
    if (x.size() != y.size() || x.empty()) throw StructuralError("shapovalov: length mismatch");
    FieldElement s = x[0] * y[0];
    for (std::size_t i = 1; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

inline MPoly shapovalov(const VectorPoly& x, const VectorPoly& y) {
    if (x.size() != y.size() || x.empty()) throw StructuralError("shapovalov: length mismatch");
    std::vector<MPoly> parts;
    for (std::size_t i = 0; i < x.size(); ++i) parts.push_back(x[i] * y[i]);
    return sum_all(std::move(parts), *join_ctx(&x[0].ctx(), &y[0].ctx()), x[0].nvars());
}

/// Columns e_i = v^(i) - v^(i+1), i = 1..n-1: a basis of V.
inline Matrix v_basis(const FieldCtx& ctx, std::size_t n) {
    Matrix B(ctx, n, n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        B(i, i) = FieldElement::one(ctx);
        B(i + 1, i) = -FieldElement::one(ctx);
    }
    return B;
}

/// Gram matrix of the Shapovalov form on the basis e_i of V.
inline Matrix v_gram(const FieldCtx& ctx, std::size_t n) {
    const Matrix B = v_basis(ctx, n);
    return B.transpose() * B;
}

/// Coordinates of x in V with respect to e_1..e_{n-1} (prefix sums); x must have zero coordinate sum.
inline Vec v_coordinates(const Vec& x) {
    Vec c;
    FieldElement acc = FieldElement::zero(x.at(0).ctx());
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        acc += x[i];
        c.push_back(acc);
    }
    if (!(acc + x.back()).is_zero()) throw std::domain_error("vector does not lie in V");
    return c;
}

/// S(K_a(-z; -kappa) x, K_a(z; kappa) y) = S(x, y), i.e. K_a(-z;-kappa)^T K_a(z;kappa) = 1.
inline Report verify_pm_identity(const QkzParams& P, const std::vector<Vec>& points) {
    Report rep("pairing identity " + P.label());
    const QkzParams M = negated(P);
    for (std::size_t a = 0; a < P.n; ++a) {
        std::string witness;
        std::size_t used = 0;
        for (const auto& z : points) {
            try {
                const Matrix lhs = k_operator_at(M, a, negated(z)).transpose() * k_operator_at(P, a, z);
                ++used;
                if (!(lhs == Matrix::identity(lhs.ctx(), P.n)) && witness.empty()) witness = "at z=" + point_string(z);
            } catch (const SingularPointError& e) {
                rep.note("skipped z=" + point_string(z) + ": " + e.what());
            }
        }
        rep.add("a=" + std::to_string(a + 1) + " (" + std::to_string(used) + " points)", witness.empty() && used > 0,
                used ? witness : "no usable points");
    }
    return rep;
}

/// Lemma-level periodicity: S(g(-z), f(z)) is unchanged by z -> z - kappa e_a,
/// for f a step-kappa solution and g a step-(-kappa) solution.
inline Report verify_pairing_periodicity(const QkzParams& P, const VectorPoly& f, const VectorPoly& g,
                                         const std::vector<Vec>& points) {
    Report rep("pairing periodicity " + P.label());
    for (std::size_t a = 0; a < P.n; ++a) {
        std::string witness;
        for (const auto& z : points) {
            const FieldElement lhs = shapovalov(eval(g, negated(z)), eval(f, z));
            const Vec zs = shifted(z, a, -P.kappa);
            const FieldElement rhs = shapovalov(eval(g, negated(zs)), eval(f, zs));
            if (!(lhs == rhs)) {
                witness = "at z=" + point_string(z);
                break;
            }
        }
        rep.add("a=" + std::to_string(a + 1), witness.empty(), witness);
    }
    return rep;
}

/// S(g(-z), f(z)) as a polynomial, and whether it lies in F_p[h(z_1), ..., h(z_n)], h(x) = x^p - x.
inline std::pair<MPoly, bool> pairing_in_h_subring(const VectorPoly& f, const VectorPoly& g) {
    const MPoly s = shapovalov(negate_vars(g), f);
    const bool ok = s.has_prime_field_coefficients() && s.expand_in_h().has_value();
    return {s, ok};
}

// ---- R-matrix identities on L^{(x)2} and L^{(x)3} -------------------------

/// Negative controls for the R-matrix check. sign_flipped replaces P by -P, which
/// still satisfies both identities (u + P = -R-numerator at -u); perturbed adds a
/// matrix unit to P and breaks them.
enum class RMutation { none, sign_flipped, perturbed };

namespace detail {

// 4x4 integer matrix acting on L (x) L, basis index 2*b1 + b2.
using Small = std::vector<std::vector<int>>;

inline Small swap_matrix(RMutation mut) {
    Small P(4, std::vector<int>(4, 0));
    P[0][0] = P[3][3] = 1;
    P[1][2] = P[2][1] = 1;
    if (mut == RMutation::sign_flipped)
        for (auto& row : P)
            for (auto& x : row) x = -x;
    if (mut == RMutation::perturbed) P[0][1] += 1;
    return P;
}

// X acting on tensor factors (i, j) of L^{(x)m}; dim 2^m, factor 0 is the most significant bit.
inline Small embed(const Small& X, std::size_t m, std::size_t i, std::size_t j) {
    const std::size_t dim = std::size_t{1} << m;
    auto bit = [m](std::size_t idx, std::size_t f) { return (idx >> (m - 1 - f)) & 1U; };
    Small r(dim, std::vector<int>(dim, 0));
    for (std::size_t out = 0; out < dim; ++out)
        for (std::size_t in = 0; in < dim; ++in) {
            bool same = true;
            for (std::size_t f = 0; f < m; ++f)
                if (f != i && f != j && bit(out, f) != bit(in, f)) same = false;
            if (!same) continue;
            r[out][in] = X[2 * bit(out, i) + bit(out, j)][2 * bit(in, i) + bit(in, j)];
        }
    return r;
}

// u Id - X as a polynomial matrix.
inline PolyMatrix numerator(const MPoly& u, const Small& X) {
    const std::size_t dim = X.size();
    PolyMatrix r(dim, std::vector<MPoly>(dim, MPoly(u.ctx(), u.nvars())));
    for (std::size_t a = 0; a < dim; ++a)
        for (std::size_t b = 0; b < dim; ++b) {
            r[a][b] = MPoly::constant(FieldElement(u.ctx(), -X[a][b]), u.nvars());
            if (a == b) r[a][b] += u;
        }
    return r;
}

inline std::string first_difference(const PolyMatrix& a, const PolyMatrix& b) {
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a[i].size(); ++j)
            if (!(a[i][j] == b[i][j]))
                return "entry (" + std::to_string(i) + "," + std::to_string(j) + "): " + a[i][j].to_string() +
                       " vs " + b[i][j].to_string();
    return {};
}

}  // namespace detail

/// Unitarity (u - P)(-u - P21) = (u - 1)(-u - 1) on L^{(x)2} and Yang-Baxter on
/// L^{(x)3}, both with denominators cleared, for formal u, v.
inline Report verify_rmatrix_identities(const FieldCtx& ctx, RMutation mut = RMutation::none) {
    using namespace detail;
    Report rep("R-matrix identities p=" + std::to_string(ctx.p()));
    const Small P = swap_matrix(mut);

    {
        const MPoly u = MPoly::variable(ctx, 1, 0);
        const Small P21 = embed(P, 2, 1, 0);
        const PolyMatrix lhs = poly_mul(numerator(u, embed(P, 2, 0, 1)), numerator(-u, P21));
        const MPoly one = MPoly::constant(FieldElement::one(ctx), 1);
        const MPoly scal = (u - one) * (-u - one);
        PolyMatrix rhs = poly_identity(ctx, 1, 4);
        for (std::size_t i = 0; i < 4; ++i) rhs[i][i] = scal;
        const auto diff = first_difference(lhs, rhs);
        rep.add("unitarity", diff.empty(), diff);
    }
    {
        const MPoly u = MPoly::variable(ctx, 2, 0);
        const MPoly v = MPoly::variable(ctx, 2, 1);
        const PolyMatrix r12 = numerator(u - v, embed(P, 3, 0, 1));
        const PolyMatrix r13 = numerator(u, embed(P, 3, 0, 2));
        const PolyMatrix r23 = numerator(v, embed(P, 3, 1, 2));
        const PolyMatrix lhs = poly_mul(poly_mul(r12, r13), r23);
        const PolyMatrix rhs = poly_mul(poly_mul(r23, r13), r12);
        const auto diff = first_difference(lhs, rhs);
        rep.add("yang-baxter", diff.empty(), diff);
    }
    return rep;
}

// ---- flatness ----------------------------------------------------------------

/// K_a(z - kappa e_b) K_b(z) = K_b(z - kappa e_a) K_a(z) at each point, for all a < b.
inline Report verify_flatness(const QkzParams& P, const std::vector<Vec>& points, KMutation mut = KMutation::none) {
    Report rep("flatness " + P.label());
    for (std::size_t a = 0; a < P.n; ++a)
        for (std::size_t b = a + 1; b < P.n; ++b) {
            std::string witness;
            std::size_t used = 0;
            for (const auto& z : points) {
                try {
                    const Matrix lhs = k_operator_at(P, a, shifted(z, b, -P.kappa), mut) * k_operator_at(P, b, z, mut);
                    const Matrix rhs = k_operator_at(P, b, shifted(z, a, -P.kappa), mut) * k_operator_at(P, a, z, mut);
                    ++used;
                    if (!(lhs == rhs) && witness.empty()) witness = "at z=" + point_string(z);
                } catch (const SingularPointError& e) {
                    rep.note("skipped z=" + point_string(z) + ": " + e.what());
                }
            }
            rep.add("(a,b)=(" + std::to_string(a + 1) + "," + std::to_string(b + 1) + ") " + std::to_string(used) +
                        " points",
                    witness.empty() && used > 0, used ? witness : "no usable points");
        }
    return rep;
}

/// Nonsingular points of F_{p^2}^n, deterministic in the seed.
inline std::vector<Vec> sample_points(const QkzParams& P, std::size_t count, std::uint64_t seed) {
    std::vector<Vec> pts;
    pts.reserve(count);
    for (std::size_t i = 0; i < count; ++i) pts.push_back(sample_point(P.ext(), P.n, seed * 1000003ULL + i));
    return pts;
}

}  // namespace charp_qkz
