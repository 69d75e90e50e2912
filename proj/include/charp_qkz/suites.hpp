#pragma once

// Named verification suites over a parameter triple (p, n, kappa).

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hypergeo.hpp"
#include "pcurvature.hpp"
#include "pochhammer.hpp"
#include "qkz_core.hpp"
#include "report.hpp"

namespace charp_qkz {

inline const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names{"identities", "rmatrix", "solutions", "leading", "ortho",
                                                "restrict",   "curvature", "ext_kappa", "quasi",  "kz"};
    return names;
}

struct SuiteConfig {
    std::uint64_t seed = 1;
    std::size_t points = 50;
    bool sabotage = false;  // run the negative controls in place of the real checks
};

/// Lazily built objects shared by the suites of one triple.
class TripleContext {
public:
    explicit TripleContext(QkzParams P) : P_(std::move(P)) {}

    [[nodiscard]] const QkzParams& params() const { return P_; }
    const SolutionSet& solutions() {
        if (!sols_) sols_ = extract_solutions(P_);
        return *sols_;
    }
    const SolutionSet& barq() {
        if (!barq_) barq_ = barq_solutions(P_);
        return *barq_;
    }
    const SolutionSet& dual() {
        if (!dual_) dual_ = extract_solutions(negated(P_));
        return *dual_;
    }
    [[nodiscard]] std::vector<Vec> points(std::size_t count, std::uint64_t seed, std::uint64_t salt) const {
        const std::uint64_t key = (std::uint64_t{P_.p()} << 40) ^ (std::uint64_t{P_.n} << 32) ^
                                  (std::uint64_t{P_.kappa.coef().a0} << 16) ^ P_.kappa.coef().a1;
        return sample_points(P_, count, seed * 7919 + key * 31 + salt);
    }

private:
    QkzParams P_;
    std::optional<SolutionSet> sols_, barq_, dual_;
};

namespace detail {

inline bool needs_prime_field_kappa(const std::string& suite) {
    return suite != "identities" && suite != "rmatrix" && suite != "ext_kappa";
}

inline Report solutions_suite(TripleContext& T, const SuiteConfig& cfg) {
    const QkzParams& P = T.params();
    Report rep("solutions " + P.label());
    const auto& S = T.solutions();
    rep.add("count equals d(kappa)=" + std::to_string(*P.d), S.solutions.size() == *P.d);
    const KMutation mut = cfg.sabotage ? KMutation::drop_factor : KMutation::none;
    for (std::size_t l = 0; l < S.solutions.size(); ++l)
        rep.merge(verify_qkz_solution_dense(P, S.solutions[l], mut), "l=" + std::to_string(l + 1) + " ");
    rep.merge(verify_vanishing_beyond_d(P), "beyond d: ");
    rep.merge(verify_weight_function_formula(P, 5, cfg.seed), "product formula: ");
    if (P.n % P.p() != 0) {
        const unsigned dm = *negated(P).d;
        rep.add("d(kappa)+d(-kappa)=n-1", *P.d + dm + 1 == P.n,
                std::to_string(*P.d) + "+" + std::to_string(dm) + " vs n-1=" + std::to_string(P.n - 1));
    }
    return rep;
}

inline Report kz_suite(TripleContext& T) {
    const QkzParams& P = T.params();
    Report rep("kz " + P.label());
    const auto& S = T.solutions();
    const auto& B = T.barq();
    for (std::size_t l = 0; l < B.solutions.size(); ++l) {
        const std::string name = "l=" + std::to_string(l + 1) + " ";
        rep.merge(verify_kz_solution(P, B.solutions[l]), name + "bar-Q: ");
        unsigned deg = 0;
        for (const auto& x : S.solutions[l])
            if (!x.is_zero()) deg = std::max(deg, x.degree());
        VectorPoly top;
        for (const auto& x : S.solutions[l]) top.push_back(x.homogeneous_part(deg));
        rep.add(name + "top-degree part equals bar-Q", top == B.solutions[l]);
        rep.merge(verify_kz_solution(P, top), name + "top-degree part: ");
    }
    return rep;
}

inline Report leading_suite(TripleContext& T, const SuiteConfig& cfg) {
    const QkzParams& P = T.params();
    Report rep("leading " + P.label());
    require_p_not_dividing_n(P);
    const auto& S = T.solutions();
    rep.merge(verify_leading_terms(S, T.barq(), cfg.sabotage ? LeadMutation::permuted_u : LeadMutation::none));
    if (const auto shown = three_point_example_term(P)) {
        const auto got = vector_leading_term(S.solutions.at(0));
        const bool second = 2 * *P.k < P.p();
        VectorTerm expect = *shown;
        if (second)
            for (auto& x : expect.coeffs) x = -x;
        rep.add(std::string("three-point example, ") + (second ? "second branch (sign reversed)" : "first branch"),
                got && *got == expect, got ? to_string(*got) : "zero");
    }
    rep.merge(verify_independence(S, T.points(3, cfg.seed, 1)));
    return rep;
}

inline Report ortho_suite(TripleContext& T) {
    const QkzParams& P = T.params();
    if (*P.d == 0 || *P.d + 1 >= P.n) {
        Report rep("orthogonality " + P.label());
        rep.note("d(kappa)=" + std::to_string(*P.d) + ": no pairs to check");
        return rep;
    }
    return verify_orthogonality(T.solutions(), T.dual());
}

inline Report curvature_suite(TripleContext& T, const SuiteConfig& cfg) {
    const QkzParams& P = T.params();
    Report rep = verify_curvature(P, T.points(cfg.points, cfg.seed, 2),
                                  cfg.sabotage ? DualityMutation::sign_flipped : DualityMutation::none);
    if (P.p() <= 7 && P.n <= 3) rep.merge(verify_symbolic_curvature(P, T.points(10, cfg.seed, 3)), "symbolic: ");
    return rep;
}

}  // namespace detail

/// Runs one suite. Suites that do not apply to the triple return a passing report with a note.
inline Report run_suite(const std::string& name, TripleContext& T, const SuiteConfig& cfg) {
    const QkzParams& P = T.params();
    if (std::find(suite_names().begin(), suite_names().end(), name) == suite_names().end())
        throw std::invalid_argument("unknown suite: " + name);
    if (detail::needs_prime_field_kappa(name) && !P.kappa_in_prime_field()) {
        Report rep(name + " " + P.label());
        rep.note("skipped: kappa outside F_p");
        return rep;
    }
    if (name == "ext_kappa" && P.kappa_in_prime_field()) {
        Report rep(name + " " + P.label());
        rep.note("skipped: kappa in F_p");
        return rep;
    }
    if (name == "identities") return verify_pochhammer_identities(P.kappa, 2 * P.p());
    if (name == "rmatrix") {
        Report rep = verify_rmatrix_identities(make_field(P.p()), cfg.sabotage ? RMutation::perturbed : RMutation::none);
        rep.merge(verify_flatness(P, T.points(cfg.points, cfg.seed, 0)), "flatness: ");
        return rep;
    }
    if (name == "solutions") return detail::solutions_suite(T, cfg);
    if (name == "kz") return detail::kz_suite(T);
    if (name == "leading") return detail::leading_suite(T, cfg);
    if (name == "ortho") return detail::ortho_suite(T);
    if (name == "restrict") return verify_restrictions(T.solutions());
    if (name == "curvature") return detail::curvature_suite(T, cfg);
    if (name == "quasi") return verify_quasi_flatness(P, T.points(std::min<std::size_t>(cfg.points, 20), cfg.seed, 4));
    return verify_ext_kappa(P, cfg.points, cfg.seed);
}

}  // namespace charp_qkz
