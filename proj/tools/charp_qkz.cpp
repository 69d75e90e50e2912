// Command-line front end: solve, verify, curvature, ortho, report.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "charp_qkz/json_io.hpp"
#include "charp_qkz/suites.hpp"

using namespace charp_qkz;

namespace {

struct Options {
    std::vector<std::uint32_t> primes{5, 7, 11, 13};
    std::vector<std::size_t> ns{2, 3, 4, 5};
    std::vector<std::string> kappas{"all"};
    std::vector<std::string> suites;
    std::uint64_t seed = 1;
    std::size_t points = 50;
    std::string format = "text";
    std::string out;
    bool sabotage = false;
};

struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

void check_primes(const std::vector<std::uint32_t>& primes) {
    for (auto p : primes)
        if (p < 3 || !detail::is_prime(p)) throw UsageError("p = " + std::to_string(p) + " is not an odd prime");
}

std::vector<FieldElement> kappas_for(std::uint32_t p, const std::vector<std::string>& spec) {
    std::vector<FieldElement> out;
    const FieldCtx& E = make_field(p, 2);
    for (const auto& s : spec) {
        if (s == "all") {
            for (std::int64_t c = 1; c < static_cast<std::int64_t>(p); ++c) out.emplace_back(make_field(p), c);
            continue;
        }
        FieldElement x = parse_element(E, s);
        if (x.is_zero()) throw UsageError("kappa must be nonzero");
        out.push_back(x.in_prime_field() ? x.in(make_field(p)) : x);
    }
    return out;
}

struct Sweep {
    std::vector<QkzParams> triples;
    std::vector<std::string> skipped;
};

Sweep build_sweep(const Options& o) {
    check_primes(o.primes);
    Sweep s;
    for (auto p : o.primes)
        for (auto n : o.ns) {
            if (n < 2) throw UsageError("n must be at least 2");
            if (n >= p) {
                s.skipped.push_back("p=" + std::to_string(p) + " n=" + std::to_string(n) + ": needs n < p");
                continue;
            }
            if (n > kMaxVars) {
                s.skipped.push_back("p=" + std::to_string(p) + " n=" + std::to_string(n) + ": n too large");
                continue;
            }
            for (const auto& k : kappas_for(p, o.kappas)) s.triples.push_back(make_params(p, n, k));
        }
    return s;
}

void emit(const Options& o, const std::string& text) {
    if (o.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(o.out);
    if (!f) throw std::runtime_error("cannot write " + o.out);
    f << text;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

int cmd_solve(const Options& o) {
    check_primes(o.primes);
    if (o.primes.size() != 1 || o.ns.size() != 1 || o.kappas.size() != 1 || o.kappas[0] == "all")
        throw UsageError("solve needs a single --p, --n and --kappa");
    const auto kappa = kappas_for(o.primes[0], o.kappas).at(0);
    if (!kappa.in_prime_field()) throw UsageError("solve needs kappa in F_p");
    const QkzParams P = make_params(o.primes[0], o.ns[0], kappa);
    const SolutionSet S = extract_solutions(P);
    if (o.format == "json") {
        emit(o, dump(to_json(S)));
        return 0;
    }
    std::ostringstream os;
    os << P.label() << " k=" << *P.k << " d(kappa)=" << *P.d << "\n";
    for (std::size_t l = 0; l < S.solutions.size(); ++l) {
        unsigned deg = 0;
        for (const auto& x : S.solutions[l])
            if (!x.is_zero()) deg = std::max(deg, x.degree());
        os << "Q^" << (l + 1) * P.p() - 1 << " (degree " << deg << "):\n";
        for (std::size_t a = 0; a < P.n; ++a) os << "  [" << a + 1 << "] " << S.solutions[l][a].to_string() << "\n";
    }
    emit(o, os.str());
    return 0;
}

int cmd_verify(const Options& o) {
    const Sweep sw = build_sweep(o);
    std::vector<std::string> suites = o.suites;
    if (suites.empty()) suites = suite_names();
    for (const auto& s : suites)
        if (std::find(suite_names().begin(), suite_names().end(), s) == suite_names().end())
            throw UsageError("unknown suite: " + s);
    const SuiteConfig cfg{o.seed, o.points, o.sabotage};
    json results = json::object();
    std::ostringstream text;
    bool all = true;
    std::size_t failures = 0;
    for (const auto& P : sw.triples) {
        TripleContext T(P);
        std::vector<std::string> run = suites;
        if (!P.kappa_in_prime_field() && std::find(run.begin(), run.end(), "ext_kappa") == run.end())
            run.push_back("ext_kappa");
        for (const auto& s : run) {
            const Report r = run_suite(s, T, cfg);
            all = all && r.passed();
            failures += r.failures();
            results[s][P.label()] = to_json(r);
            if (r.checks().empty())
                text << "SKIP " << s << " " << P.label() << ": "
                     << (r.notes().empty() ? "nothing to check" : r.notes().front()) << "\n";
            else
                text << (r.passed() ? "PASS " : "FAIL ") << s << " " << P.label()
                     << (r.passed() ? "" : "  " + r.summary()) << "\n";
        }
    }
    for (const auto& s : sw.skipped) text << "SKIP " << s << "\n";
    text << (all ? "all checks passed" : std::to_string(failures) + " failing checks") << "\n";
    if (o.format == "json") {
        json doc{{"schema", kSchema}, {"seed", o.seed}, {"points", o.points}, {"passed", all},
                 {"results", results}, {"skipped", sw.skipped}};
        emit(o, dump(doc));
    } else {
        emit(o, text.str());
    }
    return all ? 0 : 1;
}

int cmd_curvature(const Options& o) {
    const Sweep sw = build_sweep(o);
    json doc{{"schema", kSchema}, {"seed", o.seed}, {"points", o.points}};
    std::ostringstream text;
    bool all = true;
    for (const auto& P : sw.triples) {
        TripleContext T(P);
        if (!P.kappa_in_prime_field()) {
            const Report r = verify_ext_kappa(P, o.points, o.seed);
            all = all && r.passed();
            doc["ext_kappa"][P.label()] = to_json(r);
            text << (r.passed() ? "PASS " : "FAIL ") << r.summary() << "\n";
            continue;
        }
        const auto pts = T.points(o.points, o.seed, 2);
        json records = json::array();
        for (const auto& z : pts) {
            try {
                records.push_back(to_json(curvature_report_at(P, z)));
            } catch (const SingularPointError& e) {
                records.push_back(json{{"point", point_string(z)}, {"skipped", e.what()}});
            }
        }
        const Report r = verify_curvature(P, pts, o.sabotage ? DualityMutation::sign_flipped : DualityMutation::none);
        all = all && r.passed();
        doc["triples"][P.label()] = json{{"k", *P.k}, {"d", *P.d}, {"points", records}, {"summary", to_json(r)}};
        text << (r.passed() ? "PASS " : "FAIL ") << r.summary() << "\n";
        if (!pts.empty()) {
            const auto ranks = kernel_image_ranks(P, pts.front());
            text << "  ranks on V at the first point:";
            for (auto x : ranks.rank) text << " " << x;
            text << "; kernel dims:";
            for (auto x : ranks.kernel_dim) text << " " << x;
            text << "; dim of the sum of images: " << ranks.image_sum_dim << "\n";
        }
    }
    doc["passed"] = all;
    emit(o, o.format == "json" ? dump(doc) : text.str());
    return all ? 0 : 1;
}

int cmd_ortho(const Options& o) {
    const Sweep sw = build_sweep(o);
    json doc{{"schema", kSchema}};
    std::ostringstream text;
    bool all = true;
    for (const auto& P : sw.triples) {
        if (!P.kappa_in_prime_field()) continue;
        TripleContext T(P);
        const Report r = detail::ortho_suite(T);
        all = all && r.passed();
        json entry{{"k", *P.k}, {"d", *P.d}, {"d_dual", *negated(P).d}, {"report", to_json(r)}};
        if (*P.d > 0 && *P.d + 1 < P.n) {
            const auto res = orthogonality_pairing(T.solutions(), T.dual());
            json G = json::array();
            for (const auto& row : res.G) {
                json jr = json::array();
                for (const auto& g : row) jr.push_back(g.to_string());
                G.push_back(jr);
            }
            entry["G"] = G;
        }
        doc["triples"][P.label()] = entry;
        text << (r.passed() ? "PASS " : "FAIL ") << r.summary()
             << (r.checks().empty() ? "  (" + r.notes().front() + ")" : "") << "\n";
    }
    doc["passed"] = all;
    emit(o, o.format == "json" ? dump(doc) : text.str());
    return all ? 0 : 1;
}

int cmd_report(const Options& o) {
    const Sweep sw = build_sweep(o);
    json rows = json::array();
    std::ostringstream text;
    text << "p   n  kappa  k   d  d(-k)  degrees        ranks      ortho  gram\n";
    bool all = true;
    for (const auto& P : sw.triples) {
        if (!P.kappa_in_prime_field()) continue;
        TripleContext T(P);
        const unsigned dm = *negated(P).d;
        std::vector<unsigned> degs;
        for (const auto& f : T.solutions().solutions) {
            unsigned deg = 0;
            for (const auto& x : f)
                if (!x.is_zero()) deg = std::max(deg, x.degree());
            degs.push_back(deg);
        }
        const auto z = T.points(1, o.seed, 2).at(0);
        const auto ranks = kernel_image_ranks(P, z);
        const Report orth = detail::ortho_suite(T);
        const bool gram = det(v_gram(*P.ctx, P.n)) == FieldElement(*P.ctx, static_cast<std::int64_t>(P.n));
        const std::string ortho = orth.checks().empty() ? "n/a" : (orth.passed() ? "ok" : "FAIL");
        all = all && orth.passed() && gram;
        rows.push_back(json{{"p", P.p()},
                            {"n", P.n},
                            {"kappa", to_json(P.kappa)},
                            {"k", *P.k},
                            {"d", *P.d},
                            {"d_dual", dm},
                            {"degrees", degs},
                            {"curvature_ranks", ranks.rank},
                            {"image_sum_dim", ranks.image_sum_dim},
                            {"orthogonality", ortho},
                            {"gram_det_is_n", gram}});
        std::string dstr, rstr;
        for (auto x : degs) dstr += (dstr.empty() ? "" : ",") + std::to_string(x);
        for (auto x : ranks.rank) rstr += (rstr.empty() ? "" : ",") + std::to_string(x);
        char line[160];
        std::snprintf(line, sizeof line, "%-3u %-2zu %-6s %-3u %-2u %-6u %-14s %-10s %-6s %s\n", P.p(), P.n,
                      kappa_string(P.kappa).c_str(), *P.k, *P.d, dm, dstr.empty() ? "-" : dstr.c_str(), rstr.c_str(),
                      ortho.c_str(), gram ? "ok" : "FAIL");
        text << line;
    }
    for (const auto& s : sw.skipped) text << "SKIP " << s << "\n";
    if (o.format == "json")
        emit(o, dump(json{{"schema", kSchema}, {"seed", o.seed}, {"rows", rows}, {"skipped", sw.skipped}}));
    else
        emit(o, text.str());
    return all ? 0 : 1;
}

void add_common(CLI::App* c, Options& o, bool sweep) {
    c->add_option("--p", o.primes, "prime(s)")->delimiter(',');
    c->add_option("--n", o.ns, "number(s) of points")->delimiter(',');
    c->add_option("--kappa", o.kappas, "step(s): c, a+b*g, or all")->delimiter(',');
    c->add_option("--format", o.format, "text or json")->check(CLI::IsMember({"text", "json"}));
    c->add_option("--out", o.out, "write output to a file");
    if (sweep) {
        c->add_option("--seed", o.seed, "sampling seed");
        c->add_option("--points", o.points, "points per pointwise suite");
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"p-hypergeometric solutions of the rational sl2 qKZ equations over F_p"};
    app.require_subcommand(1);
    Options o;
    auto* solve = app.add_subcommand("solve", "construct the p-hypergeometric solutions");
    add_common(solve, o, false);
    auto* verify = app.add_subcommand("verify", "run verification suites over a sweep");
    add_common(verify, o, true);
    verify->add_option("--suites", o.suites, "subset of the suites")->delimiter(',');
    verify->add_flag("--sabotage", o.sabotage, "run the negative controls (expected to fail)");
    auto* curvature = app.add_subcommand("curvature", "p-curvature records at sample points");
    add_common(curvature, o, true);
    curvature->add_flag("--sabotage", o.sabotage, "sign-flipped duality control");
    auto* ortho = app.add_subcommand("ortho", "orthogonality pairings");
    add_common(ortho, o, false);
    auto* report = app.add_subcommand("report", "summary table over a sweep");
    add_common(report, o, true);

    CLI11_PARSE(app, argc, argv);
    try {
        if (*solve) return cmd_solve(o);
        if (*verify) return cmd_verify(o);
        if (*curvature) return cmd_curvature(o);
        if (*ortho) return cmd_ortho(o);
        return cmd_report(o);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const FieldError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    }
}
