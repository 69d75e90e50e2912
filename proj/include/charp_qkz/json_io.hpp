#pragma once

// JSON documents for solution sets, verification reports and curvature records.
// Field elements are encoded as [a0, a1] meaning a0 + a1*g; polynomials as canonical strings.

#include <cctype>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "hypergeo.hpp"
#include "pcurvature.hpp"
#include "report.hpp"

namespace charp_qkz {

using json = nlohmann::json;

inline constexpr const char* kSchema = "charp-qkz/1";

inline json to_json(const FieldElement& x) { return json::array({x.coef().a0, x.coef().a1}); }

inline FieldElement element_from_json(const FieldCtx& ctx, const json& j) {
    if (!j.is_array() || j.size() != 2) throw std::invalid_argument("field element must be [a0, a1]");
    const std::int64_t a0 = j[0].get<std::int64_t>(), a1 = j[1].get<std::int64_t>();
    if (a1 != 0 && ctx.ext_degree() != 2) throw FieldError("element outside the prime field");
    FieldElement x(ctx, a0);
    if (a1) x += FieldElement::gen(ctx) * a1;
    return x;
}

/// Inverse of MPoly::to_string for polynomials in z1..z<nvars>.
inline MPoly parse_mpoly(const FieldCtx& ctx, std::size_t nvars, const std::string& text) {
    std::string s;
    for (char ch : text)
        if (ch != ' ') s += ch;
    if (s.empty()) throw std::invalid_argument("empty polynomial");
    MPoly f(ctx, nvars);
    if (s == "0") return f;
    std::vector<std::string> terms;
    std::string cur;
    int depth = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const char ch = s[i];
        if (ch == '(') ++depth;
        if (ch == ')') --depth;
        if ((ch == '+' || ch == '-') && depth == 0 && i > 0 && s[i - 1] != '^') {
            terms.push_back(cur);
            cur.clear();
        }
        cur += ch;
    }
    terms.push_back(cur);
    for (std::string t : terms) {
        if (t.empty()) continue;
        bool negative = false;
        if (t[0] == '+' || t[0] == '-') {
            negative = t[0] == '-';
            t.erase(0, 1);
        }
        FieldElement c = FieldElement::one(ctx);
        std::vector<unsigned> e(nvars, 0);
        std::size_t pos = 0;
        if (t[0] == '(') {
            const std::size_t close = t.find(')');
            if (close == std::string::npos) throw std::invalid_argument("unbalanced parenthesis in " + text);
            c = parse_element(ctx, t.substr(1, close - 1));
            pos = close + 1;
            if (pos < t.size() && t[pos] == '*') ++pos;
        } else if (std::isdigit(static_cast<unsigned char>(t[0]))) {
            while (pos < t.size() && std::isdigit(static_cast<unsigned char>(t[pos]))) ++pos;
            c = FieldElement(ctx, std::stoll(t.substr(0, pos)));
            if (pos < t.size() && t[pos] == '*') ++pos;
        }
        while (pos < t.size()) {
            if (t[pos] != 'z') throw std::invalid_argument("bad monomial in " + text);
            std::size_t q = ++pos;
            while (pos < t.size() && std::isdigit(static_cast<unsigned char>(t[pos]))) ++pos;
            if (q == pos) throw std::invalid_argument("bad variable in " + text);
            const std::size_t v = std::stoul(t.substr(q, pos - q));
            if (v == 0 || v > nvars) throw std::invalid_argument("variable out of range in " + text);
            unsigned power = 1;
            if (pos < t.size() && t[pos] == '^') {
                q = ++pos;
                while (pos < t.size() && std::isdigit(static_cast<unsigned char>(t[pos]))) ++pos;
                power = static_cast<unsigned>(std::stoul(t.substr(q, pos - q)));
            }
            e[v - 1] += power;
            if (pos < t.size() && t[pos] == '*') ++pos;
        }
        f = f + MPoly::monomial(negative ? -c : c, e);
    }
    return f;
}

inline json to_json(const SolutionSet& S) {
    const QkzParams& P = S.params;
    json sols = json::array();
    json degrees = json::array();
    for (const auto& f : S.solutions) {
        json coords = json::array();
        unsigned deg = 0;
        for (const auto& x : f) {
            coords.push_back(x.to_string());
            if (!x.is_zero()) deg = std::max(deg, x.degree());
        }
        sols.push_back(std::move(coords));
        degrees.push_back(deg);
    }
    json j{{"schema", kSchema}, {"p", P.p()},          {"n", P.n},          {"kappa", to_json(P.kappa)},
           {"solutions", sols}, {"degrees", degrees}};
    j["k"] = P.k ? json(*P.k) : json(nullptr);
    j["d"] = P.d ? json(*P.d) : json(nullptr);
    return j;
}

inline SolutionSet solution_set_from_json(const json& j) {
    if (j.at("schema") != kSchema) throw std::invalid_argument("unknown schema");
    const auto p = j.at("p").get<std::uint32_t>();
    const auto n = j.at("n").get<std::size_t>();
    const FieldElement kappa = element_from_json(make_field(p, 2), j.at("kappa"));
    SolutionSet S{make_params(p, n, kappa), {}};
    for (const auto& coords : j.at("solutions")) {
        VectorPoly f;
        for (const auto& c : coords) f.push_back(parse_mpoly(*S.params.ctx, n, c.get<std::string>()));
        if (f.size() != n) throw std::invalid_argument("solution has the wrong number of coordinates");
        S.solutions.push_back(std::move(f));
    }
    return S;
}

inline json to_json(const Report& r) {
    json checks = json::array();
    for (const auto& c : r.checks()) {
        json e{{"name", c.name}, {"passed", c.passed}};
        if (!c.detail.empty()) e["witness"] = c.detail;
        checks.push_back(std::move(e));
    }
    json j{{"title", r.title()}, {"passed", r.passed()}, {"checks", checks}};
    if (!r.notes().empty()) j["notes"] = r.notes();
    return j;
}

inline json to_json(const CurvatureReport& R) {
    json axes = json::array();
    for (const auto& X : R.axes) {
        json a{{"a", X.a + 1},
               {"nonzero", X.nonzero},
               {"rank", X.rank},
               {"kernel_dim", X.kernel_dim},
               {"image_in_span", X.image_in_span},
               {"span_in_kernel", X.span_in_kernel},
               {"products_zero", X.products_zero},
               {"duality_zero", X.duality_zero},
               {"normalized_duality_zero", X.normalized_duality_zero}};
        if (X.det) a["det"] = to_json(*X.det);
        axes.push_back(std::move(a));
    }
    return json{{"params", R.params},           {"point", R.point},   {"axes", axes},
                {"image_sum_dim", R.image_sum_dim}, {"commute", R.commute}, {"endomorphism", R.endomorphism}};
}

}  // namespace charp_qkz
