#include <gtest/gtest.h>

#include <random>

#include "charp_qkz/pochhammer.hpp"

using namespace charp_qkz;

namespace {

// Stirling numbers over plain integers (exact, small m), reduced afterwards.
long ref_s1(int m, int l) {
    std::vector<std::vector<long>> s(m + 1, std::vector<long>(m + 1, 0));
    s[0][0] = 1;
    for (int a = 0; a < m; ++a)
        for (int b = 0; b <= a + 1; ++b)
            s[a + 1][b] = (b ? s[a][b - 1] : 0) - a * (b <= a ? s[a][b] : 0);
    return s[m][l];
}

long ref_s2(int m, int l) {
    std::vector<std::vector<long>> s(m + 1, std::vector<long>(m + 1, 0));
    s[0][0] = 1;
    for (int a = 0; a < m; ++a)
        for (int b = 0; b <= a + 1; ++b) s[a + 1][b] = (b ? s[a][b - 1] : 0) + b * (b <= a ? s[a][b] : 0);
    return s[m][l];
}

TPoly univariate(const FieldCtx& F, std::vector<long> c) {
    std::vector<MPoly> out;
    for (long v : c) out.push_back(MPoly::constant(FieldElement(F, v), 0));
    return TPoly(F, 0, out);
}

}  // namespace

TEST(Pochhammer, SmallExamples) {
    const auto& F = make_field(7);
    const FieldElement kappa(F, 3);
    EXPECT_EQ(poch_poly(kappa, 2), univariate(F, {0, -3, 1}));
    EXPECT_EQ(poch_poly(kappa, 0), univariate(F, {1}));
    const auto& F5 = make_field(5);
    EXPECT_EQ(poch_poly(FieldElement(F5, 2), 5), univariate(F5, {0, -1, 0, 0, 0, 1}));
}

TEST(Pochhammer, PowerPIdentity) {
    for (std::uint32_t p : {3u, 5u, 7u, 11u, 13u}) {
        const auto& F = make_field(p);
        for (std::uint32_t k = 1; k < p; ++k) {
            const FieldElement kappa(F, k);
            std::vector<long> expect(p + 1, 0);
            expect[p] = 1;
            expect[1] = -static_cast<long>(pow(kappa, p - 1).a0());
            EXPECT_EQ(poch_poly(kappa, p), univariate(F, expect));
        }
    }
}

TEST(Stirling, Examples) {
    const auto& F = make_field(5);
    EXPECT_EQ(stirling(1, 3, 2, F), FieldElement(F, 2));
    EXPECT_EQ(stirling(2, 4, 2, F), FieldElement(F, 2));
    for (unsigned m = 0; m < 12; ++m) {
        EXPECT_TRUE(stirling(1, m, m, F).is_one());
        EXPECT_TRUE(stirling(2, m, m, F).is_one());
    }
    EXPECT_THROW(stirling(1, 2, 3, F), std::domain_error);
}

TEST(Stirling, MatchesIntegerRecurrence) {
    for (std::uint32_t p : {3u, 5u, 13u}) {
        const auto& F = make_field(p);
        StirlingTable table(F, 14);
        for (int m = 0; m <= 14; ++m)
            for (int l = 0; l <= m; ++l) {
                EXPECT_EQ(table.s1(m, l), FieldElement(F, ref_s1(m, l)));
                EXPECT_EQ(table.s2(m, l), FieldElement(F, ref_s2(m, l)));
            }
    }
}

TEST(Binomial, PascalMod) {
    const auto& F = make_field(7);
    EXPECT_EQ(binomial_mod(F, 5, 2), FieldElement(F, 10));
    EXPECT_TRUE(binomial_mod(F, 7, 3).is_zero());
    EXPECT_TRUE(binomial_mod(F, 14, 7).in_prime_field());
    EXPECT_EQ(binomial_mod(F, 14, 7), FieldElement(F, 2));  // Lucas: C(2,1) C(0,0)
    EXPECT_TRUE(binomial_mod(F, 3, 4).is_zero());
}

TEST(PochhammerBasis, Examples) {
    const auto& F = make_field(11);
    const FieldElement kappa(F, 4);
    const auto pf = to_pochhammer_basis(univariate(F, {0, 0, 1}), kappa);
    ASSERT_EQ(pf.coeffs.size(), 3u);
    EXPECT_TRUE(pf.coeffs[0].is_zero());
    EXPECT_EQ(pf.coeffs[1], MPoly::constant(kappa, 0));
    EXPECT_EQ(pf.coeffs[2], MPoly::constant(FieldElement::one(F), 0));

    for (unsigned m = 0; m < 25; ++m) {
        const auto basis = to_pochhammer_basis(poch_poly(kappa, m), kappa);
        for (unsigned i = 0; i < basis.coeffs.size(); ++i)
            EXPECT_EQ(basis.coeffs[i].is_zero(), i != m);
    }

    PochhammerForm unit{kappa, std::vector<MPoly>(12, MPoly(F, 0))};
    unit.coeffs[11] = MPoly::constant(FieldElement::one(F), 0);
    std::vector<long> expect(12, 0);
    expect[11] = 1;
    expect[1] = -static_cast<long>(pow(kappa, 10).a0());
    EXPECT_EQ(from_pochhammer_basis(unit, 0), univariate(F, expect));
    EXPECT_TRUE(from_pochhammer_basis(PochhammerForm{kappa, {}}, 2).is_zero());
}

TEST(PochhammerBasis, RoundTripAndStirlingExtraction) {
    std::mt19937_64 rng(3);
    const auto& F = make_field(7);
    for (int it = 0; it < 100; ++it) {
        const FieldElement kappa = random_nonzero(F, rng);
        const std::size_t n = rng() % 3;
        const unsigned D = rng() % 20;
        std::vector<MPoly> coeffs;
        for (unsigned i = 0; i <= D; ++i) {
            MPoly c = MPoly::constant(random_element(F, rng), n);
            for (std::size_t v = 0; v < n; ++v) c += MPoly::variable(F, n, v) * random_element(F, rng);
            coeffs.push_back(c);
        }
        const TPoly f(F, n, coeffs);
        const auto pf = to_pochhammer_basis(f, kappa);
        EXPECT_EQ(from_pochhammer_basis(pf, n), f);
        StirlingTable table(F, D);
        for (unsigned i = 0; i < pf.coeffs.size(); ++i)
            EXPECT_EQ(pochhammer_coefficient(f, kappa, i, &table), pf.coeffs[i]);
    }
}

TEST(TPoly, DivideByLinear) {
    const auto& F = make_field(5);
    const FieldElement kappa(F, 2);
    const auto f = poch_poly(kappa, 4, 1);
    auto q = f;
    for (long r : {0, 2, 4, 6}) q = q.divide_by_t_minus(FieldElement(F, r));
    EXPECT_EQ(q, TPoly::constant(MPoly::constant(FieldElement::one(F), 1)));
    EXPECT_THROW(f.divide_by_t_minus(FieldElement(F, 3)), DivisibilityError);
}

TEST(TPoly, ShiftedFactorEvaluates) {
    const auto& E = make_field(7, 2);
    std::mt19937_64 rng(4);
    const FieldElement kappa(E, 3);
    const auto w = MPoly::variable(E, 2, 0) + MPoly::variable(E, 2, 1) * 2;
    const auto f = poch_shifted(w, kappa, 5);
    for (int it = 0; it < 20; ++it) {
        const std::vector<FieldElement> z{random_element(E, rng), random_element(E, rng)};
        const auto t = random_element(E, rng);
        FieldElement expect = FieldElement::one(E);
        for (int i = 0; i < 5; ++i) expect *= t - w.eval(z) - kappa * i;
        EXPECT_EQ(f.eval(t, z), expect);
    }
}

TEST(Identities, HoldForAllSweepFields) {
    for (std::uint32_t p : {3u, 5u, 7u, 11u, 13u}) {
        const auto& F = make_field(p);
        for (std::int64_t c = 1; c < static_cast<std::int64_t>(p); ++c) {
            const auto rep = verify_pochhammer_identities(FieldElement(F, c), 2 * p);
            EXPECT_TRUE(rep.passed()) << rep.summary();
        }
        const auto& E = make_field(p, 2);
        const FieldElement g = FieldElement::gen(E);
        for (const auto& kappa : {g, g + FieldElement::one(E) * 2}) {
            const auto rep = verify_pochhammer_identities(kappa, 2 * p);
            EXPECT_TRUE(rep.passed()) << rep.summary();
        }
    }
}
