#pragma once

// p-curvature of the qKZ connection.
//
// C_a(z) = K_a(z - (p-1) kappa e_a) ... K_a(z - kappa e_a) K_a(z), reduced form C_a - 1,
// normalized form D_a (C_a - 1) with D_a = prod_{j != a} prod_{m < p} (z_a - z_j - m kappa - 1).

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hypergeo.hpp"
#include "linalg.hpp"
#include "mpoly.hpp"
#include "pochhammer.hpp"
#include "qkz_core.hpp"
#include "report.hpp"

namespace charp_qkz {

inline Matrix curvature_at(const QkzParams& P, std::size_t a, const Vec& z, KMutation mut = KMutation::none) {
    Matrix C = k_operator_at(P, a, z, mut);
    for (std::uint32_t m = 1; m < P.p(); ++m)
        C = k_operator_at(P, a, shifted(z, a, -P.kappa * static_cast<std::int64_t>(m)), mut) * C;
    return C;
}

inline Matrix reduced_curvature_at(const QkzParams& P, std::size_t a, const Vec& z, KMutation mut = KMutation::none) {
    const Matrix C = curvature_at(P, a, z, mut);
    return C - Matrix::identity(C.ctx(), P.n);
}

inline std::vector<LinearForm> curvature_denominator_forms(const QkzParams& P, std::size_t a) {
    std::vector<LinearForm> forms;
    for (std::size_t j = 0; j < P.n; ++j) {
        if (j == a) continue;
        for (std::uint32_t m = 0; m < P.p(); ++m)
            forms.push_back({a, j, P.kappa * static_cast<std::int64_t>(m) + 1});
    }
    return forms;
}

inline FieldElement curvature_denominator_at(const QkzParams& P, std::size_t a, const Vec& z) {
    FieldElement v = FieldElement::one(z.at(0).ctx());
    for (const auto& L : curvature_denominator_forms(P, a)) v *= L.eval(z);
    return v;
}

inline MPoly curvature_denominator(const QkzParams& P, std::size_t a) {
    MPoly d = MPoly::constant(FieldElement::one(*P.ctx), P.n);
    for (const auto& L : curvature_denominator_forms(P, a)) d = d * MPoly::from_linear_form(*P.ctx, P.n, L);
    return d;
}

// ---- symbolic path ----------------------------------------------------------

struct SymbolicCurvature {
    RatOpMatrix product;  // C_a as a single fraction
    PolyMatrix normalized;
    MPoly denominator;
    unsigned degree = 0;
};

/// Desk scale only (p <= 7, n <= 3). Throws DivisibilityError if D_a does not clear
/// the denominator of C_a.
inline SymbolicCurvature curvature_symbolic(const QkzParams& P, std::size_t a) {
    if (P.p() > 7 || P.n > 3) throw std::invalid_argument("symbolic curvature is limited to p <= 7, n <= 3");
    const RatOpMatrix K = k_operator(P, a);
    SymbolicCurvature S{{poly_identity(*P.ctx, P.n, P.n), {}}, {}, curvature_denominator(P, a), 0};
    for (std::uint32_t m = 0; m < P.p(); ++m) {
        const FieldElement delta = -P.kappa * static_cast<std::int64_t>(m);
        PolyMatrix Km = K.num;
        for (auto& row : Km)
            for (auto& x : row) x = x.shift_var(a, delta);
        S.product.num = poly_mul(Km, S.product.num);
        for (LinearForm L : K.den) {
            L.c -= delta;
            S.product.den.push_back(L);
        }
    }
    MPoly q = S.denominator;
    for (const auto& L : S.product.den) q = q.divide_exact_linear(L);
    S.normalized = S.product.num;
    for (std::size_t i = 0; i < P.n; ++i)
        for (std::size_t j = 0; j < P.n; ++j) {
            auto& x = S.normalized[i][j];
            x = x * q;
            if (i == j) x = x - S.denominator;
            if (!x.is_zero()) S.degree = std::max(S.degree, x.degree());
        }
    return S;
}

/// Polynomial-ness, the degree bound (n-2)p, rank <= 1 of the top part, the closed
/// form of D_a, and agreement with the pointwise product.
inline Report verify_symbolic_curvature(const QkzParams& P, const std::vector<Vec>& points) {
    require_p_greater_than_n(P);
    Report rep("symbolic curvature " + P.label());
    const unsigned bound = static_cast<unsigned>(P.n - 2) * P.p();
    const MPoly one = MPoly::constant(FieldElement::one(*P.ctx), P.n);
    for (std::size_t a = 0; a < P.n; ++a) {
        const std::string ax = "a=" + std::to_string(a + 1) + " ";
        std::optional<SymbolicCurvature> opt;
        try {
            opt = curvature_symbolic(P, a);
        } catch (const DivisibilityError& e) {
            rep.add(ax + "D_a clears the denominator", false, e.what());
            continue;
        }
        rep.add(ax + "D_a clears the denominator", true);
        const SymbolicCurvature& S = *opt;

        MPoly closed = one;
        const MPoly za = MPoly::variable(*P.ctx, P.n, a);
        for (std::size_t j = 0; j < P.n; ++j) {
            if (j == a) continue;
            const MPoly x = za - MPoly::variable(*P.ctx, P.n, j) - one;
            const MPoly by_poch = poch_of(x, P.kappa, P.p());
            const FieldElement kp = pow(P.kappa, P.p() - 1);
            const MPoly display = za.pow(P.p()) - za * kp + (-MPoly::variable(*P.ctx, P.n, j)).pow(P.p()) +
                                  MPoly::variable(*P.ctx, P.n, j) * kp + one * pow(-FieldElement::one(*P.ctx), P.p()) +
                                  one * kp;
            rep.add(ax + "j=" + std::to_string(j + 1) + " factor of D_a", by_poch == display,
                    by_poch == display ? "" : "(z_a - z_j - 1; kappa)_p differs from its expansion");
            closed = closed * by_poch;
        }
        rep.add(ax + "D_a as Pochhammer product", closed == S.denominator);

        rep.add(ax + "degree " + std::to_string(S.degree) + " <= " + std::to_string(bound), S.degree <= bound);
        const bool trivial = *P.d == 0 || *P.d + 1 == P.n;
        bool zero = true;
        for (const auto& row : S.normalized)
            for (const auto& x : row) zero = zero && x.is_zero();
        if (trivial) rep.add(ax + "normalized curvature vanishes", zero);

        PolyMatrix top = S.normalized;
        for (auto& row : top)
            for (auto& x : row) x = x.homogeneous_part(bound);
        std::string witness;
        std::string mismatch;
        for (const auto& z : points) {
            const std::size_t r = rank(eval(top, z));
            if (r > 1 && witness.empty()) witness = "rank " + std::to_string(r) + " at z=" + point_string(z);
            try {
                const Matrix direct = reduced_curvature_at(P, a, z) * curvature_denominator_at(P, a, z);
                if (!(direct == eval(S.normalized, z)) && mismatch.empty()) mismatch = "at z=" + point_string(z);
            } catch (const SingularPointError& e) {
                rep.note(ax + "skipped z=" + point_string(z) + ": " + e.what());
            }
        }
        rep.add(ax + "top-degree part has rank <= 1", witness.empty(), witness);
        rep.add(ax + "matches the pointwise product", mismatch.empty(), mismatch);
    }
    return rep;
}

// ---- pointwise battery --------------------------------------------------------

enum class DualityMutation { none, sign_flipped };

struct CurvatureAxis {
    std::size_t a = 0;
    bool nonzero = false;
    std::size_t rank = 0;         // within V
    std::size_t kernel_dim = 0;   // within V
    bool image_in_span = false;
    bool span_in_kernel = false;  // C_a fixes every solution value
    std::vector<bool> products_zero;
    bool duality_zero = false;
    bool normalized_duality_zero = false;
    std::optional<FieldElement> det;  // of C_a - 1 on V, in the basis e_i
};

struct CurvatureReport {
    std::string params;
    std::string point;
    std::vector<CurvatureAxis> axes;
    std::size_t image_sum_dim = 0;
    bool commute = false;
    bool endomorphism = false;
};

namespace detail {

// Matrix of an operator preserving V in the coordinates of the basis e_i.
inline Matrix on_v(const Matrix& A) {
    const std::size_t n = A.rows();
    const Matrix AB = A * v_basis(A.ctx(), n);
    Matrix M(A.ctx(), n - 1, n - 1);
    for (std::size_t j = 0; j + 1 < n; ++j) {
        const Vec c = v_coordinates(AB.column(j));
        for (std::size_t i = 0; i + 1 < n; ++i) M(i, j) = c[i];
    }
    return M;
}

}  // namespace detail

/// Shapovalov duality residues on V at z:
/// S(x, C^(-z; kappa) y) + S(C^(z; -kappa) x, y) and, for D_a-normalized operators,
/// S(C~(z; -kappa) x, y) - (-1)^n S(x, C~(-z; kappa) y). The control flips both signs.
inline std::pair<Matrix, Matrix> duality_residues(const QkzParams& P, std::size_t a, const Vec& z,
                                                  DualityMutation mut = DualityMutation::none) {
    const QkzParams M = negated(P);
    const Vec mz = negated(z);
    const Matrix B = v_basis(z.at(0).ctx(), P.n);
    const Matrix Cminus = reduced_curvature_at(P, a, mz);
    const Matrix Cdual = reduced_curvature_at(M, a, z);
    const Matrix lhs = B.transpose() * Cminus * B;
    const Matrix rhs = B.transpose() * Cdual.transpose() * B;
    const bool flip = mut == DualityMutation::sign_flipped;
    const Matrix plain = flip ? lhs - rhs : lhs + rhs;

    const FieldElement sign = P.n % 2 == 0 ? FieldElement::one(z[0].ctx()) : -FieldElement::one(z[0].ctx());
    const Matrix nminus = B.transpose() * (Cminus * curvature_denominator_at(P, a, mz)).transpose() * B;
    const Matrix ndual = B.transpose() * (Cdual * curvature_denominator_at(M, a, z)) * B;
    const Matrix normalized = flip ? ndual + nminus * sign : ndual - nminus * sign;
    return {plain, normalized};
}

/// Every check of the curvature battery at one point. Throws SingularPointError.
inline CurvatureReport curvature_report_at(const QkzParams& P, const Vec& z, DualityMutation mut = DualityMutation::none) {
    require_prime_field_kappa(P);
    const FieldCtx& E = z.at(0).ctx();
    CurvatureReport R{P.label(), point_string(z), {}, 0, true, true};
    const auto sols = solution_values_at(P, z);
    std::vector<Matrix> C, H;
    for (std::size_t a = 0; a < P.n; ++a) {
        C.push_back(curvature_at(P, a, z));
        H.push_back(C.back() - Matrix::identity(E, P.n));
    }
    const Matrix B = v_basis(E, P.n);
    std::vector<Vec> images;
    for (std::size_t a = 0; a < P.n; ++a) {
        CurvatureAxis X;
        X.a = a;
        const Matrix HB = H[a] * B;
        X.nonzero = !HB.is_zero();
        X.rank = rank(HB);
        X.kernel_dim = P.n - 1 - X.rank;
        X.image_in_span = true;
        for (std::size_t j = 0; j + 1 < P.n; ++j) {
            images.push_back(HB.column(j));
            if (!in_span(E, HB.column(j), sols)) X.image_in_span = false;
        }
        X.span_in_kernel = true;
        for (const auto& s : sols)
            if (!(C[a] * s == s)) X.span_in_kernel = false;
        for (std::size_t b = 0; b < P.n; ++b) X.products_zero.push_back((H[a] * H[b] * B).is_zero());
        const auto [plain, normalized] = duality_residues(P, a, z, mut);
        X.duality_zero = plain.is_zero();
        X.normalized_duality_zero = normalized.is_zero();
        R.axes.push_back(std::move(X));
        for (std::size_t b = 0; b < P.n; ++b) {
            if (!(C[a] * C[b] == C[b] * C[a])) R.commute = false;
            const Matrix Kb = k_operator_at(P, b, z);
            if (!(Kb * C[a] == curvature_at(P, a, shifted(z, b, -P.kappa)) * Kb)) R.endomorphism = false;
        }
    }
    R.image_sum_dim = span_dim(E, P.n, images);
    return R;
}

struct KernelImageRanks {
    std::vector<std::size_t> kernel_dim;
    std::vector<std::size_t> rank;
    std::size_t image_sum_dim = 0;
};

inline KernelImageRanks kernel_image_ranks(const QkzParams& P, const Vec& z) {
    const FieldCtx& E = z.at(0).ctx();
    const Matrix B = v_basis(E, P.n);
    KernelImageRanks out;
    std::vector<Vec> images;
    for (std::size_t a = 0; a < P.n; ++a) {
        const Matrix HB = reduced_curvature_at(P, a, z) * B;
        out.rank.push_back(rank(HB));
        out.kernel_dim.push_back(P.n - 1 - out.rank.back());
        for (std::size_t j = 0; j + 1 < P.n; ++j) images.push_back(HB.column(j));
    }
    out.image_sum_dim = span_dim(E, P.n, images);
    return out;
}

/// The curvature battery over a set of points. For 0 < d < n-1 each C_a - 1 is nonzero,
/// squares to zero against every C_b - 1, has image inside the solution span and kills it;
/// for d in {0, n-1} every C_a - 1 vanishes.
inline Report verify_curvature(const QkzParams& P, const std::vector<Vec>& points,
                               DualityMutation mut = DualityMutation::none) {
    require_p_greater_than_n(P);
    Report rep("curvature " + P.label());
    const unsigned d = *P.d;
    const bool middle = d > 0 && d + 1 < P.n;
    std::vector<std::string> w(12);
    enum { NONZERO, ZERO, RANK, KERNEL, IMAGE, FIXED, NILPOTENT, DUALITY, NORMALIZED, COMMUTE, ENDO, NONE };
    std::size_t used = 0;
    auto fail = [&](int slot, const std::string& text) {
        if (w[slot].empty()) w[slot] = text;
    };
    std::vector<std::size_t> sums;
    for (const auto& z : points) {
        CurvatureReport R;
        try {
            R = curvature_report_at(P, z, mut);
        } catch (const SingularPointError& e) {
            rep.note("skipped z=" + point_string(z) + ": " + e.what());
            continue;
        }
        ++used;
        sums.push_back(R.image_sum_dim);
        const std::string at = " at z=" + R.point;
        for (const auto& X : R.axes) {
            const std::string ax = "a=" + std::to_string(X.a + 1);
            if (middle && !X.nonzero) fail(NONZERO, ax + at);
            if (!middle && X.nonzero) fail(ZERO, ax + at);
            if (X.rank > d) fail(RANK, ax + " rank " + std::to_string(X.rank) + at);
            if (X.kernel_dim < d) fail(KERNEL, ax + " kernel " + std::to_string(X.kernel_dim) + at);
            if (!X.image_in_span) fail(IMAGE, ax + at);
            if (!X.span_in_kernel) fail(FIXED, ax + at);
            for (std::size_t b = 0; b < X.products_zero.size(); ++b)
                if (!X.products_zero[b]) fail(NILPOTENT, ax + " b=" + std::to_string(b + 1) + at);
            if (!X.duality_zero) fail(DUALITY, ax + at);
            if (!X.normalized_duality_zero) fail(NORMALIZED, ax + at);
        }
        if (!R.commute) fail(COMMUTE, at.substr(1));
        if (!R.endomorphism) fail(ENDO, at.substr(1));
    }
    const std::string count = " (" + std::to_string(used) + " points)";
    if (used == 0) w[NONE] = "no usable points";
    rep.add("usable points", used > 0, w[NONE]);
    if (middle) rep.add("C_a - 1 nonzero" + count, w[NONZERO].empty(), w[NONZERO]);
    else rep.add("C_a - 1 vanishes" + count, w[ZERO].empty(), w[ZERO]);
    rep.add("rank C_a - 1 <= d on V", w[RANK].empty(), w[RANK]);
    rep.add("kernel of C_a - 1 on V has dim >= d", w[KERNEL].empty(), w[KERNEL]);
    rep.add("image inside the solution span", w[IMAGE].empty(), w[IMAGE]);
    rep.add("C_a fixes the solutions", w[FIXED].empty(), w[FIXED]);
    rep.add("(C_a - 1)(C_b - 1) = 0", w[NILPOTENT].empty(), w[NILPOTENT]);
    rep.add("duality", w[DUALITY].empty(), w[DUALITY]);
    rep.add("normalized duality", w[NORMALIZED].empty(), w[NORMALIZED]);
    rep.add("C_a commute", w[COMMUTE].empty(), w[COMMUTE]);
    rep.add("K_b C_a = C_a(z - kappa e_b) K_b", w[ENDO].empty(), w[ENDO]);
    if (!sums.empty()) {
        std::string dims;
        for (std::size_t s : sums) dims += (dims.empty() ? "" : ",") + std::to_string(s);
        rep.note("dim of the sum of images per point: " + dims);
    }
    return rep;
}

/// For kappa outside F_p: det(C_a - 1) on V is nonzero at `count` usable points per axis.
inline Report verify_ext_kappa(const QkzParams& P, std::size_t count, std::uint64_t seed) {
    if (P.kappa_in_prime_field()) throw std::domain_error("kappa lies in F_p; the ext_kappa suite needs kappa outside");
    Report rep("ext kappa " + P.label());
    for (std::size_t a = 0; a < P.n; ++a) {
        std::size_t used = 0, skipped = 0;
        std::string witness;
        for (std::uint64_t i = 0; used < count && i < 20 * count; ++i) {
            const Vec z = sample_point(P.ext(), P.n, seed * 1000003ULL + i);
            try {
                const FieldElement dt = det(detail::on_v(reduced_curvature_at(P, a, z)));
                ++used;
                if (dt.is_zero() && witness.empty()) witness = "det = 0 at z=" + point_string(z);
            } catch (const SingularPointError&) {
                ++skipped;
            }
        }
        if (skipped) rep.note("a=" + std::to_string(a + 1) + ": skipped " + std::to_string(skipped) + " singular points");
        rep.add("a=" + std::to_string(a + 1) + " det nonzero at " + std::to_string(used) + " points",
                witness.empty() && used == count, used == count ? witness : "too few usable points");
    }
    return rep;
}

}  // namespace charp_qkz
