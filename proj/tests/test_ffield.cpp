#include <gtest/gtest.h>

#include <random>

#include "charp_qkz/ffield.hpp"

using namespace charp_qkz;

namespace {

// Schoolbook product in F_p[g]/(g^2 - r) on plain integers.
std::pair<long, long> ref_mul(long a0, long a1, long b0, long b1, long p, long r) {
    return {((a0 * b0 + r * a1 * b1) % p + p) % p, ((a0 * b1 + a1 * b0) % p + p) % p};
}

long ref_smallest_nonresidue(long p) {
    for (long c = 2; c < p; ++c) {
        bool square = false;
        for (long x = 1; x < p && !square; ++x) square = (x * x) % p == c;
        if (!square) return c;
    }
    return -1;
}

}  // namespace

TEST(FieldCtx, Construction) {
    EXPECT_EQ(make_field(5, 1).p(), 5u);
    EXPECT_EQ(make_field(5, 2).nonresidue(), 2u);
    EXPECT_THROW(make_field(9, 1), FieldError);
    EXPECT_THROW(make_field(2, 1), FieldError);
    EXPECT_THROW(make_field(103, 1), FieldError);
    EXPECT_EQ(&make_field(7, 2), &make_field(7, 2));
}

TEST(FieldCtx, NonresidueMatchesScan) {
    for (std::uint32_t p : {3u, 5u, 7u, 11u, 13u, 17u, 19u, 23u, 29u, 31u, 97u, 101u})
        EXPECT_EQ(make_field(p, 2).nonresidue(), static_cast<std::uint32_t>(ref_smallest_nonresidue(p))) << p;
}

TEST(FieldElement, InverseExamples) {
    const auto& F = make_field(5);
    EXPECT_EQ(inv(FieldElement(F, 2)), FieldElement(F, 3));
    EXPECT_THROW(inv(FieldElement::zero(F)), DivisionByZero);

    const auto& E = make_field(5, 2);
    const auto g = FieldElement::gen(E);
    EXPECT_EQ(inv(g), FieldElement(E, 0, 3));
    EXPECT_TRUE((g * inv(g)).is_one());
}

TEST(FieldElement, PowExamples) {
    const auto& F = make_field(5);
    EXPECT_EQ(pow(FieldElement(F, 2), 4), FieldElement(F, 1));
    EXPECT_EQ(pow(FieldElement(F, 3), 0), FieldElement(F, 1));
    const auto& E = make_field(5, 2);
    EXPECT_EQ(pow(FieldElement::gen(E), 2), FieldElement(E, 2));
}

TEST(FieldElement, ExtensionProductMatchesSchoolbook) {
    std::mt19937_64 rng(11);
    for (std::uint32_t p : {3u, 5u, 7u, 13u, 101u}) {
        const auto& E = make_field(p, 2);
        for (int it = 0; it < 300; ++it) {
            const long a0 = rng() % p, a1 = rng() % p, b0 = rng() % p, b1 = rng() % p;
            const auto [c0, c1] = ref_mul(a0, a1, b0, b1, p, E.nonresidue());
            const auto prod = FieldElement(E, a0, a1) * FieldElement(E, b0, b1);
            EXPECT_EQ(prod.a0(), static_cast<std::uint32_t>(c0));
            EXPECT_EQ(prod.a1(), static_cast<std::uint32_t>(c1));
        }
    }
}

class FieldAxioms : public ::testing::TestWithParam<std::pair<std::uint32_t, int>> {};

TEST_P(FieldAxioms, RandomTriples) {
    const auto [p, ext] = GetParam();
    const auto& F = make_field(p, ext);
    std::mt19937_64 rng(p * 31 + ext);
    const auto one = FieldElement::one(F);
    const auto zero = FieldElement::zero(F);
    for (int it = 0; it < 1000; ++it) {
        const auto x = random_element(F, rng), y = random_element(F, rng), w = random_element(F, rng);
        EXPECT_EQ((x + y) + w, x + (y + w));
        EXPECT_EQ((x * y) * w, x * (y * w));
        EXPECT_EQ(x * (y + w), x * y + x * w);
        EXPECT_EQ(x + y, y + x);
        EXPECT_EQ(x * y, y * x);
        EXPECT_EQ(x + (-x), zero);
        EXPECT_EQ(x * one, x);
        if (!x.is_zero()) {
            EXPECT_EQ(x * inv(x), one);
            EXPECT_EQ((y / x) * x, y);
        }
        EXPECT_EQ(pow(x + y, p), pow(x, p) + pow(y, p));
        if (ext == 2 && !x.is_zero()) EXPECT_EQ(pow(x, std::uint64_t{p} * p - 1), one);
        if (ext == 1 && !x.is_zero()) EXPECT_EQ(pow(x, p - 1), one);
    }
}

INSTANTIATE_TEST_SUITE_P(Contexts, FieldAxioms,
                         ::testing::Values(std::pair{3u, 1}, std::pair{5u, 1}, std::pair{13u, 1},
                                           std::pair{3u, 2}, std::pair{5u, 2}, std::pair{7u, 2},
                                           std::pair{11u, 2}, std::pair{101u, 2}));

TEST(FieldElement, MixedContextsPromote) {
    const auto& F = make_field(7);
    const auto& E = make_field(7, 2);
    const auto s = FieldElement(F, 3) + FieldElement::gen(E);
    EXPECT_EQ(&s.ctx(), &E);
    EXPECT_EQ(s, FieldElement(E, 3, 1));
    EXPECT_THROW(FieldElement(F, 1) + FieldElement(make_field(5), 1), FieldError);
}

TEST(FieldElement, Rendering) {
    const auto& F = make_field(5);
    EXPECT_EQ(FieldElement(F, 3).to_string(), "-2");
    EXPECT_EQ(FieldElement(F, 2).to_string(), "2");
    const auto& E = make_field(5, 2);
    EXPECT_EQ(FieldElement(E, 1, 1).to_string(), "1+g");
}

TEST(Parse, ElementForms) {
    const auto& F = make_field(7);
    EXPECT_EQ(parse_element(F, "3"), FieldElement(F, 3));
    EXPECT_EQ(parse_element(F, "-1"), FieldElement(F, 6));
    const auto x = parse_element(F, "1+2*g");
    EXPECT_EQ(x.ctx().ext_degree(), 2);
    EXPECT_EQ(x.a0(), 1u);
    EXPECT_EQ(x.a1(), 2u);
    EXPECT_EQ(parse_element(F, "g").a1(), 1u);
    EXPECT_THROW(parse_element(F, "x"), FieldError);
    EXPECT_THROW(parse_element(F, ""), FieldError);
}

TEST(SamplePoint, AvoidsArrangement) {
    const auto& E = make_field(5, 2);
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto z = sample_point(E, 2, seed);
        ASSERT_EQ(z.size(), 2u);
        EXPECT_NE((z[0] - z[1]).a1(), 0u);
    }
    EXPECT_EQ(sample_point(E, 1, 3).size(), 1u);
    EXPECT_THROW(sample_point(make_field(5), 2, 0), FieldError);
    // Only p distinct g-components exist, so n > p is impossible.
    EXPECT_THROW(sample_point(E, 6, 0, 50), SamplingError);
}

TEST(SamplePoint, DeterministicInSeed) {
    const auto& E = make_field(11, 2);
    EXPECT_EQ(sample_point(E, 4, 42), sample_point(E, 4, 42));
}
