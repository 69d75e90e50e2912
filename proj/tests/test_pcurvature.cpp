#include <gtest/gtest.h>

#include "charp_qkz/pcurvature.hpp"

using namespace charp_qkz;

namespace {

// C_a assembled from the symbolic K_a, evaluated at each shifted point.
Matrix curvature_from_symbolic(const QkzParams& P, std::size_t a, const Vec& z) {
    const RatOpMatrix K = k_operator(P, a);
    Matrix C = Matrix::identity(z[0].ctx(), P.n);
    for (std::uint32_t m = 0; m < P.p(); ++m) C = K.eval(shifted(z, a, -P.kappa * static_cast<std::int64_t>(m))) * C;
    return C;
}

bool middle(const QkzParams& P) { return *P.d > 0 && *P.d + 1 < P.n; }

}  // namespace

TEST(Curvature, MatchesSymbolicOperatorProduct) {
    for (auto [p, n, c] : {std::tuple{5u, 3u, 2L}, {7u, 4u, 3L}, {5u, 2u, 1L}}) {
        const auto P = make_params(p, n, c);
        for (const auto& z : sample_points(P, 5, 3))
            for (std::size_t a = 0; a < n; ++a) EXPECT_EQ(curvature_at(P, a, z), curvature_from_symbolic(P, a, z));
    }
}

TEST(Curvature, IdentityWhenDIsZeroOrMaximal) {
    for (long c : {3L, 2L}) {
        const auto P = make_params(5, 2, c);
        for (const auto& z : sample_points(P, 10, 1)) {
            EXPECT_EQ(curvature_at(P, 0, z), Matrix::identity(z[0].ctx(), 2));
            EXPECT_TRUE(reduced_curvature_at(P, 1, z).is_zero());
        }
    }
}

TEST(Curvature, FixesSolutions) {
    const auto P = make_params(7, 4, 2);
    ASSERT_GT(*P.d, 0u);
    for (const auto& z : sample_points(P, 8, 5)) {
        const auto sols = solution_values_at(P, z);
        for (std::size_t a = 0; a < P.n; ++a)
            for (const auto& s : sols) EXPECT_EQ(curvature_at(P, a, z) * s, s);
    }
}

TEST(Curvature, DeskCaseRanks) {
    const auto P = make_params(5, 3, 2);
    ASSERT_EQ(*P.d, 1u);
    for (const auto& z : sample_points(P, 10, 8)) {
        const auto r = kernel_image_ranks(P, z);
        for (std::size_t a = 0; a < 3; ++a) {
            EXPECT_EQ(r.rank[a], 1u);
            EXPECT_EQ(r.kernel_dim[a], 1u);
            const Matrix H = reduced_curvature_at(P, a, z);
            EXPECT_FALSE(H.is_zero());
            for (std::size_t b = 0; b < 3; ++b) EXPECT_TRUE((H * reduced_curvature_at(P, b, z)).is_zero());
        }
    }
}

TEST(Curvature, BatteryAcrossSmallSweep) {
    for (std::uint32_t p : {5u, 7u})
        for (std::size_t n = 2; n < p && n <= 4; ++n)
            for (long c = 1; c < static_cast<long>(p); ++c) {
                const auto P = make_params(p, n, c);
                const auto rep = verify_curvature(P, sample_points(P, 6, 11));
                EXPECT_TRUE(rep.passed()) << rep.summary();
            }
}

TEST(Curvature, SignFlippedDualityIsRejected) {
    for (auto [p, n, c] : {std::tuple{5u, 3u, 2L}, {7u, 4u, 2L}, {7u, 5u, 3L}}) {
        const auto P = make_params(p, n, c);
        ASSERT_TRUE(middle(P)) << P.label();
        const auto z = sample_points(P, 1, 2).at(0);
        const auto [plain, normalized] = duality_residues(P, 0, z, DualityMutation::sign_flipped);
        EXPECT_FALSE(plain.is_zero());
        EXPECT_FALSE(normalized.is_zero());
        EXPECT_FALSE(verify_curvature(P, {z}, DualityMutation::sign_flipped).passed());
    }
}

TEST(Curvature, DenominatorFactorsMatchShiftedOperators) {
    const auto P = make_params(7, 3, 3);
    for (std::size_t a = 0; a < 3; ++a) {
        std::vector<LinearForm> den;
        for (std::uint32_t m = 0; m < 7; ++m)
            for (LinearForm L : k_denominator(P, a)) {
                L.c += P.kappa * static_cast<std::int64_t>(m);
                den.push_back(L);
            }
        auto want = curvature_denominator_forms(P, a);
        ASSERT_EQ(den.size(), want.size());
        for (const auto& L : den) {
            auto it = std::find(want.begin(), want.end(), L);
            ASSERT_NE(it, want.end()) << L.to_string();
            want.erase(it);
        }
    }
}

TEST(SymbolicCurvature, DeskCases) {
    for (long c = 1; c <= 4; ++c) {
        const auto P = make_params(5, 3, c);
        const auto rep = verify_symbolic_curvature(P, sample_points(P, 10, 21));
        EXPECT_TRUE(rep.passed()) << rep.summary();
        const auto S = curvature_symbolic(P, 0);
        if (middle(P)) {
            EXPECT_EQ(S.degree, 5u);
        }
    }
    const auto P2 = make_params(5, 2, 3);
    for (const auto& row : curvature_symbolic(P2, 0).normalized)
        for (const auto& x : row) EXPECT_TRUE(x.is_zero());
    EXPECT_THROW((void)curvature_symbolic(make_params(11, 3, 2), 0), std::invalid_argument);
}

TEST(ExtKappa, DeterminantNonzero) {
    const auto& E5 = make_field(5, 2);
    const auto& E7 = make_field(7, 2);
    const auto rep5 = verify_ext_kappa(make_params(5, 2, FieldElement::gen(E5)), 50, 1);
    EXPECT_TRUE(rep5.passed()) << rep5.summary();
    const auto rep7 = verify_ext_kappa(make_params(7, 3, FieldElement::gen(E7) + 1), 50, 2);
    EXPECT_TRUE(rep7.passed()) << rep7.summary();
    EXPECT_THROW((void)verify_ext_kappa(make_params(5, 2, 3), 5, 1), std::domain_error);
}
