#pragma once

#include <algorithm>
#include <cctype>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "geoform/core/error.hpp"
#include "geoform/core/ids.hpp"
#include "geoform/geom/fact.hpp"

namespace geoform::deduce {

using geom::Fact;
using geom::Predicate;
using geom::Term;

/// Pattern variables: an uppercase-initial name stands for one point id; a
/// lowercase-initial name stands for a whole direction term (a line id or
/// a segment) or a carrier (line, circle, plane).
inline bool is_point_var(std::string_view v) { return !v.empty() && std::isupper(static_cast<unsigned char>(v[0])); }

/// A fact whose ids are variable names.
using Pattern = Fact;

struct Rule {
    std::string name;
    std::vector<Pattern> premises;
    Pattern conclusion;
    std::vector<std::pair<std::string, std::string>> distinct;
    bool planar_only = false;

    std::string str() const {
        std::string out = "rule " + name + ": ";
        for (std::size_t i = 0; i < premises.size(); ++i) {
            if (i) out += ", ";
            out += premises[i].str();
        }
        out += " => " + conclusion.str();
        for (std::size_t i = 0; i < distinct.size(); ++i) {
            out += i ? ", " : " if ";
            out += distinct[i].first + " != " + distinct[i].second;
        }
        if (planar_only) out += " @planar";
        return out;
    }
};

inline std::set<std::string> pattern_vars(const Pattern& p) {
    std::set<std::string> out;
    for (const auto& t : p.terms()) out.insert(t.begin(), t.end());
    return out;
}

namespace detail {

/// Splits on top-level commas (outside parentheses).
inline std::vector<std::string> split_top(std::string_view s) {
    std::vector<std::string> out;
    int depth = 0;
    std::size_t start = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '(') ++depth;
        if (s[i] == ')') --depth;
        if (s[i] == ',' && depth == 0) {
            out.push_back(trim(s.substr(start, i - start)));
            start = i + 1;
        }
    }
    out.push_back(trim(s.substr(start)));
    return out;
}

inline Pattern parse_pattern(const std::string& text, std::size_t line) {
    auto kinds = [](std::string_view v) -> std::optional<geom::ObjectKind> {
        return is_point_var(v) ? geom::ObjectKind::point : geom::ObjectKind::line;
    };
    try {
        return geom::parse_fact(text, kinds);
    } catch (const Error& e) {
        throw ParseError(ErrorCode::rule_syntax, line, 1, e.what());
    }
}

}  // namespace detail

/// Parses rules, one per line:
///   rule name: premise, premise => conclusion [if X != Y, ...] [@planar]
/// Blank lines and '#' comments are ignored.
inline std::vector<Rule> parse_rules(std::string_view text) {
    std::vector<Rule> rules;
    std::set<std::string> names;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        auto raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        auto hash = raw.find('#');
        auto line = trim(raw.substr(0, hash));
        if (line.empty()) continue;
        auto fail = [&](const std::string& msg) { throw ParseError(ErrorCode::rule_syntax, line_no, 1, msg); };

        if (line.rfind("rule ", 0) != 0) fail("expected 'rule name: ...'");
        auto colon = line.find(':');
        if (colon == std::string::npos) fail("missing ':' after rule name");
        Rule r;
        r.name = trim(std::string_view(line).substr(5, colon - 5));
        if (!is_identifier(r.name)) fail("bad rule name '" + r.name + "'");
        if (!names.insert(r.name).second) fail("duplicate rule name '" + r.name + "'");
        std::string body = trim(std::string_view(line).substr(colon + 1));

        auto at = body.find("@planar");
        if (at != std::string::npos) {
            if (trim(std::string_view(body).substr(at + 7)) != "") fail("'@planar' must end the rule");
            r.planar_only = true;
            body = trim(std::string_view(body).substr(0, at));
        }
        auto arrow = body.find("=>");
        if (arrow == std::string::npos) fail("missing '=>'");
        std::string lhs = trim(std::string_view(body).substr(0, arrow));
        std::string rhs = trim(std::string_view(body).substr(arrow + 2));
        std::string cond;
        auto if_pos = rhs.find(" if ");
        if (if_pos != std::string::npos) {
            cond = trim(std::string_view(rhs).substr(if_pos + 4));
            rhs = trim(std::string_view(rhs).substr(0, if_pos));
        }
        if (lhs.empty()) fail("rule has no premises");
        for (const auto& p : detail::split_top(lhs)) r.premises.push_back(detail::parse_pattern(p, line_no));
        r.conclusion = detail::parse_pattern(rhs, line_no);

        std::set<std::string> vars;
        for (const auto& p : r.premises) {
            auto v = pattern_vars(p);
            vars.insert(v.begin(), v.end());
        }
        for (const auto& v : pattern_vars(r.conclusion)) {
            if (!vars.count(v)) fail("conclusion variable '" + v + "' does not occur in a premise");
        }
        if (!cond.empty()) {
            for (const auto& c : detail::split_top(cond)) {
                auto ne = c.find("!=");
                if (ne == std::string::npos) fail("side condition must have the form X != Y");
                auto a = trim(std::string_view(c).substr(0, ne));
                auto b = trim(std::string_view(c).substr(ne + 2));
                if (!vars.count(a) || !vars.count(b)) fail("side condition on unknown variable");
                r.distinct.emplace_back(a, b);
            }
        }
        rules.push_back(std::move(r));
    }
    return rules;
}

/// The bundled rule set. docs/rules.md gives a numeric witness for each.
inline constexpr std::string_view bundled_rules_text = R"(# midpoints
rule midp_cong: midp(M,A,B) => cong(M,A,M,B)
rule midp_coll: midp(M,A,B) => coll(M,A,B)
rule eqdist_cong: eqdist(O,A,B) => cong(O,A,O,B)
# congruence
rule cong_trans: cong(A,B,C,D), cong(C,D,E,F) => cong(A,B,E,F)
# incidence
rule line_coll: on_line(A,l), on_line(B,l), on_line(C,l) => coll(A,B,C)
rule line_para: on_line(A,l), on_line(B,l) => para(A,B,l) if A != B
# parallel and perpendicular directions
rule para_trans: para(a,b), para(b,c) => para(a,c)
rule perp_para: perp(a,b), para(b,c) => perp(a,c)
rule perp_perp_para: perp(a,b), perp(b,c) => para(a,c) @planar
# circles
rule circumradius_cyclic: cong(O,A,O,B), cong(O,A,O,C), cong(O,A,O,D) => cyclic(A,B,C,D) @planar
rule circle_cyclic: on_circle(A,w), on_circle(B,w), on_circle(C,w), on_circle(D,w) => cyclic(A,B,C,D) @planar
rule cyclic_eqangle: cyclic(A,B,C,D) => eqangle(C,A,C,B,D,A,D,B) @planar
# angles
rule isosceles: cong(A,B,A,C) => eqangle(A,B,C,A,C,B)
rule eqangle_trans: eqangle(A,B,C,D,E,F), eqangle(D,E,F,G,H,I) => eqangle(A,B,C,G,H,I)
rule eqangle_dir_trans: eqangle(a,b,c,d), eqangle(c,d,e,f) => eqangle(a,b,e,f) @planar
)";

inline const std::vector<Rule>& bundled_rules() {
    static const std::vector<Rule> rules = parse_rules(bundled_rules_text);
    return rules;
}

/// Subset of `rules` by name, in the order given. Unknown names throw.
inline std::vector<Rule> select_rules(const std::vector<Rule>& rules, const std::vector<std::string>& names) {
    std::vector<Rule> out;
    for (const auto& n : names) {
        auto it = std::find_if(rules.begin(), rules.end(), [&](const Rule& r) { return r.name == n; });
        if (it == rules.end()) throw Error(ErrorCode::rule_syntax, "no rule named '" + n + "'");
        out.push_back(*it);
    }
    return out;
}

}  // namespace geoform::deduce
