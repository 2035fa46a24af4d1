#include <gtest/gtest.h>

#include <set>

#include "geoform/construct/program.hpp"
#include "geoform/construct/realize.hpp"
#include "geoform/construct/sampler.hpp"
#include "geoform/deduce/closure.hpp"
#include "geoform/deduce/dot.hpp"
#include "geoform/deduce/rule.hpp"
#include "geoform/geom/eval.hpp"
#include "support/naive_closure.hpp"

using namespace geoform;
using namespace geoform::deduce;
using geom::parse_fact;

namespace {

std::vector<Fact> facts(std::initializer_list<const char*> texts) {
    std::vector<Fact> out;
    for (const auto* t : texts) out.push_back(parse_fact(t));
    return out;
}

bool has(const std::set<Fact>& s, const char* text) { return s.count(parse_fact(text)) > 0; }

}  // namespace

TEST(Rules, BundledSetParses) {
    const auto& rules = bundled_rules();
    EXPECT_GE(rules.size(), 14u);
    for (const auto& r : rules) {
        // Round trip through the printed form.
        auto again = parse_rules(r.str());
        ASSERT_EQ(again.size(), 1u);
        EXPECT_EQ(again[0].str(), r.str());
    }
}

TEST(Rules, SyntaxErrors) {
    EXPECT_THROW(parse_rules("rule x: cong(A,B,C,D) => cong(A,B,E,F)"), ParseError);  // E, F unbound
    EXPECT_THROW(parse_rules("rule x cong(A,B,C,D) => coll(A,B,C)"), ParseError);
    EXPECT_THROW(parse_rules("rule x: cong(A,B,C) => coll(A,B,C)"), ParseError);
    EXPECT_THROW(parse_rules("rule x: midp(M,A,B) => coll(M,A,B)\nrule x: midp(M,A,B) => coll(M,A,B)"), ParseError);
    try {
        parse_rules("# ok\n\nrule y: midp(M,A,B) => bogus(M)");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3u);
        EXPECT_EQ(e.code(), ErrorCode::rule_syntax);
    }
}

TEST(Closure, MidpointTwoRuleSubset) {
    // Hand fixpoint: midp(m,a,b) gives cong(m,a,m,b) and coll(m,a,b); neither
    // rule fires on those, so the closure has exactly three facts.
    auto rules = select_rules(bundled_rules(), {"midp_cong", "midp_coll"});
    auto s = closure_set(facts({"midp(m,a,b)"}), rules);
    EXPECT_EQ(s.size(), 3u);
    EXPECT_TRUE(has(s, "cong(m,a,m,b)"));
    EXPECT_TRUE(has(s, "coll(a,m,b)"));
}

TEST(Closure, CongruenceTransitivity) {
    auto s = closure_set(facts({"cong(o,a,o,b)", "cong(o,b,o,c)"}), bundled_rules());
    EXPECT_TRUE(has(s, "cong(o,a,o,c)"));
}

TEST(Closure, ParallelAndPerpendicularChaining) {
    auto rules = select_rules(bundled_rules(), {"para_trans", "perp_para"});
    auto s = closure_set(facts({"para(l1,l2)", "para(l2,l3)"}), rules);
    EXPECT_TRUE(has(s, "para(l1,l3)"));
    auto s2 = closure_set(facts({"para(l1,l2)", "para(l2,l3)", "perp(l3,l4)"}), rules);
    EXPECT_TRUE(has(s2, "para(l1,l3)"));
    EXPECT_TRUE(has(s2, "perp(l1,l4)"));
    // Brute force over the same pair: l1..l3 mutually parallel, all perp to l4.
    std::set<Fact> expected;
    for (const char* f : {"para(l1,l2)", "para(l2,l3)", "para(l1,l3)", "perp(l3,l4)", "perp(l2,l4)", "perp(l1,l4)"}) {
        expected.insert(parse_fact(f));
    }
    EXPECT_EQ(s2, expected);
}

TEST(Closure, GoalAgnosticAndMonotone) {
    auto input = facts({"cong(o,a,o,b)", "cong(o,b,o,c)", "cong(o,c,o,d)"});
    auto s = closure_set(input, bundled_rules());
    for (const auto& f : input) EXPECT_TRUE(s.count(f));
    EXPECT_TRUE(has(s, "cyclic(a,b,c,d)"));
    // Idempotent.
    auto again = closure_set({s.begin(), s.end()}, bundled_rules());
    EXPECT_EQ(again, s);
}

TEST(Closure, SpatialModeSkipsPlanarRules) {
    auto input = facts({"cong(o,a,o,b)", "cong(o,b,o,c)", "cong(o,c,o,d)"});
    ClosureOptions opts;
    opts.planar = false;
    auto s = closure_set(input, bundled_rules(), opts);
    EXPECT_FALSE(has(s, "cyclic(a,b,c,d)"));
    EXPECT_TRUE(has(s, "cong(o,a,o,d)"));
}

TEST(Closure, DerivationGraphShape) {
    auto g = closure(facts({"cong(a,b,c,d)", "cong(c,d,e,f)", "cong(e,f,g,h)"}),
                     select_rules(bundled_rules(), {"cong_trans"}));
    auto goal = g.id_of(parse_fact("cong(a,b,g,h)"));
    ASSERT_TRUE(goal);
    EXPECT_FALSE(g.is_root(*goal));
    // Two ways: (ab=ef, ef=gh) and (ab=cd, cd=gh).
    EXPECT_EQ(g.derivations(*goal).size(), 2u);
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (g.is_root(i)) continue;
        ASSERT_FALSE(g.derivations(i).empty());
        // The first derivation only uses earlier facts, so it is acyclic.
        for (auto p : g.derivations(i).front().premises) EXPECT_LT(p, i);
    }
}

TEST(Closure, DerivationCapCountsOverflow) {
    // Congruent spokes give cong(o,a,o,c) a derivation through every other spoke.
    std::vector<Fact> input;
    const char* pts[] = {"a", "b", "c", "d", "e", "f", "g", "h", "i", "j", "k", "l", "m", "n", "p", "q", "r", "s", "t", "u"};
    for (std::size_t i = 0; i + 1 < std::size(pts); ++i) {
        input.push_back(geom::make_fact(geom::Predicate::cong, {"o", pts[i], "o", pts[i + 1]}));
    }
    ClosureOptions opts;
    opts.derivation_cap = 4;
    auto g = closure(input, select_rules(bundled_rules(), {"cong_trans"}), opts);
    auto id = g.id_of(parse_fact("cong(o,a,o,c)"));
    ASSERT_TRUE(id);
    EXPECT_EQ(g.derivations(*id).size(), 4u);
    EXPECT_GT(g.derivation_count(*id), 4u);
    EXPECT_TRUE(g.truncated(*id));
}

TEST(Closure, DeterministicGraph) {
    auto input = facts({"midp(m,a,b)", "cong(o,a,o,b)", "cong(o,b,o,c)"});
    auto reversed = input;
    std::reverse(reversed.begin(), reversed.end());
    auto g1 = closure(input, bundled_rules());
    auto g2 = closure(reversed, bundled_rules());
    EXPECT_EQ(to_dot(g1), to_dot(g2));
}

TEST(Match, SideConditionBlocksEqualVariables) {
    // Conclusion stays non-degenerate when A and B coincide, so only the
    // side condition can block it.
    auto guarded = parse_rules("rule r: on_line(A,l), on_line(B,l) => on_circle(A,l) if A != B");
    auto open = parse_rules("rule r: on_line(A,l), on_line(B,l) => on_circle(A,l)");
    EXPECT_EQ(closure_set(facts({"on_line(a,l)"}), guarded).size(), 1u);
    EXPECT_EQ(closure_set(facts({"on_line(a,l)"}), open).size(), 2u);
    auto s = closure_set(facts({"on_line(a,l)", "on_line(b,l)"}), guarded);
    EXPECT_EQ(s.size(), 4u);
    EXPECT_TRUE(has(s, "on_circle(b,l)"));
}

TEST(Match, EmptyAndSingleSubstitution) {
    auto rules = select_rules(bundled_rules(), {"cong_trans"});
    EXPECT_TRUE(closure_set({}, rules).empty());
    auto g = closure(facts({"cong(a,b,c,d)", "cong(c,d,e,f)"}), rules);
    EXPECT_EQ(g.size(), 3u);
    auto id = g.id_of(parse_fact("cong(a,b,e,f)"));
    ASSERT_TRUE(id);
    EXPECT_EQ(g.derivations(*id).size(), 1u);
}

TEST(Dot, RendersRootsAndEdges) {
    auto g = closure(facts({"midp(m,a,b)"}), bundled_rules());
    auto dot = to_dot(g);
    EXPECT_NE(dot.find("digraph"), std::string::npos);
    EXPECT_NE(dot.find("midp_cong"), std::string::npos);
    EXPECT_NE(dot.find("shape=\"box\""), std::string::npos);
}

// Semi-naive closure equals the naive tuple fixpoint on small sampled programs.
TEST(Property, SemiNaiveMatchesNaiveFixpoint) {
    int compared = 0;
    for (std::uint64_t seed = 0; compared < 100 && seed < 600; ++seed) {
        Rng r(seed);
        construct::Program p;
        try {
            p = construct::sample_program(r, construct::Limits{6, 6, 50});
        } catch (const Error&) {
            continue;
        }
        auto asserted = construct::asserted_facts(p);
        bool const planar = p.mode() != construct::SpaceMode::spatial;
        ClosureOptions opts;
        opts.planar = planar;
        auto fast = closure_set(asserted, bundled_rules(), opts);
        auto slow = naive::closure(asserted, bundled_rules(), planar);
        EXPECT_EQ(fast, slow) << construct::serialize(p);
        ++compared;
    }
    EXPECT_EQ(compared, 100);
}

// Graph completeness: every derived fact's stored derivations reference facts
// in the closure and re-derive it by one rule application.
TEST(Property, StoredDerivationsReplay) {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        Rng r(seed);
        construct::Program p;
        try {
            p = construct::sample_program(r, construct::Limits{});
        } catch (const Error&) {
            continue;
        }
        ClosureOptions opts;
        opts.planar = p.mode() != construct::SpaceMode::spatial;
        auto g = closure(construct::asserted_facts(p), bundled_rules(), opts);
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (g.is_root(i)) continue;
            ASSERT_FALSE(g.derivations(i).empty());
            for (const auto& d : g.derivations(i)) {
                std::vector<Fact> prem;
                for (auto id : d.premises) prem.push_back(g.fact(id));
                auto rule = select_rules(bundled_rules(), {g.rule_names()[d.rule]});
                EXPECT_TRUE(closure_set(prem, rule, opts).count(g.fact(i)));
            }
        }
    }
}

// Soundness bridge: closure facts hold on realizations of the program.
TEST(Property, ClosureFactsHoldNumerically) {
    geom::Tolerance tol;
    int checked = 0;
    for (std::uint64_t seed = 0; seed < 150; ++seed) {
        Rng r(seed);
        construct::Program p;
        try {
            p = construct::sample_program(r, construct::Limits{});
        } catch (const Error&) {
            continue;
        }
        ClosureOptions opts;
        opts.planar = p.mode() != construct::SpaceMode::spatial;
        auto s = closure_set(construct::asserted_facts(p), bundled_rules(), opts);
        Rng coords(derive_seed(seed, 99));
        auto res = construct::realize(p, coords, tol, 10.0);
        if (!res.ok) continue;
        ++checked;
        for (const auto& f : s) {
            EXPECT_TRUE(geom::eval_fact(f, res.realization, tol))
                << construct::serialize(p) << "\n  " << f.str() << " residual " << geom::residual(f, res.realization);
        }
    }
    EXPECT_GT(checked, 80);
}

// One concrete configuration per bundled rule (the same numbers appear in
// docs/rules.md): the premises hold numerically, the rule fires on them,
// and the conclusion holds too.
TEST(Rules, NumericWitnesses) {
    using geom::LineCoords, geom::PointCoords, geom::CircleCoords, geom::Vec3;
    auto P = [](double x, double y) { return geom::Coords{PointCoords{Vec3(x, y, 0)}}; };
    auto L = [](double x, double y, double dx, double dy) {
        return geom::Coords{LineCoords{Vec3(x, y, 0), Vec3(dx, dy, 0).normalized()}};
    };
    struct Witness {
        const char* rule;
        std::vector<std::pair<const char*, geom::Coords>> coords;
        std::vector<const char*> premises;
        const char* conclusion;
    };
    std::vector<Witness> const witnesses{
        {"midp_cong", {{"m", P(2, 1)}, {"a", P(0, 0)}, {"b", P(4, 2)}}, {"midp(m,a,b)"}, "cong(m,a,m,b)"},
        {"midp_coll", {{"m", P(2, 1)}, {"a", P(0, 0)}, {"b", P(4, 2)}}, {"midp(m,a,b)"}, "coll(m,a,b)"},
        {"eqdist_cong", {{"o", P(0, 0)}, {"a", P(3, 4)}, {"b", P(5, 0)}}, {"eqdist(o,a,b)"}, "cong(o,a,o,b)"},
        {"cong_trans",
         {{"a", P(0, 0)}, {"b", P(3, 4)}, {"c", P(1, 1)}, {"d", P(6, 1)}, {"e", P(0, 2)}, {"f", P(4, 5)}},
         {"cong(a,b,c,d)", "cong(c,d,e,f)"},
         "cong(a,b,e,f)"},
        {"line_coll",
         {{"a", P(0, 1)}, {"b", P(2, 3)}, {"c", P(-1, 0)}, {"l", L(0, 1, 1, 1)}},
         {"on_line(a,l)", "on_line(b,l)", "on_line(c,l)"},
         "coll(a,b,c)"},
        {"line_para", {{"a", P(0, 1)}, {"b", P(2, 3)}, {"l", L(0, 1, 1, 1)}}, {"on_line(a,l)", "on_line(b,l)"}, "para(a,b,l)"},
        {"para_trans",
         {{"k", L(0, 0, 1, 1)}, {"l", L(0, 1, 1, 1)}, {"n", L(0, -3, 1, 1)}},
         {"para(k,l)", "para(l,n)"},
         "para(k,n)"},
        {"perp_para",
         {{"k", L(0, 2, 1, -1)}, {"l", L(0, 0, 1, 1)}, {"n", L(0, 1, 1, 1)}},
         {"perp(k,l)", "para(l,n)"},
         "perp(k,n)"},
        {"perp_perp_para",
         {{"k", L(0, 0, 1, 0)}, {"l", L(1, 0, 0, 1)}, {"n", L(0, 3, 1, 0)}},
         {"perp(k,l)", "perp(l,n)"},
         "para(k,n)"},
        {"circumradius_cyclic",
         {{"o", P(0, 0)}, {"a", P(5, 0)}, {"b", P(3, 4)}, {"c", P(0, -5)}, {"d", P(-4, 3)}},
         {"cong(o,a,o,b)", "cong(o,a,o,c)", "cong(o,a,o,d)"},
         "cyclic(a,b,c,d)"},
        {"circle_cyclic",
         {{"w", geom::Coords{CircleCoords{Vec3(0, 0, 0), 5}}}, {"a", P(5, 0)}, {"b", P(3, 4)}, {"c", P(0, -5)}, {"d", P(-4, 3)}},
         {"on_circle(a,w)", "on_circle(b,w)", "on_circle(c,w)", "on_circle(d,w)"},
         "cyclic(a,b,c,d)"},
        {"cyclic_eqangle",
         {{"a", P(5, 0)}, {"b", P(3, 4)}, {"c", P(0, -5)}, {"d", P(-4, 3)}},
         {"cyclic(a,b,c,d)"},
         "eqangle(c,a,c,b,d,a,d,b)"},
        {"isosceles", {{"a", P(0, 3)}, {"b", P(-2, 0)}, {"c", P(2, 0)}}, {"cong(a,b,a,c)"}, "eqangle(a,b,c,a,c,b)"},
        {"eqangle_trans",
         {{"a", P(1, 0)}, {"b", P(0, 0)}, {"c", P(1, 1)}, {"d", P(5, 1)}, {"e", P(4, 1)}, {"f", P(5, 2)},
          {"g", P(2, -3)}, {"h", P(0, -3)}, {"i", P(2, -1)}},
         {"eqangle(a,b,c,d,e,f)", "eqangle(d,e,f,g,h,i)"},
         "eqangle(a,b,c,g,h,i)"},
        {"eqangle_dir_trans",
         {{"k", L(0, 0, 1, 0)}, {"l", L(0, 0, 1, 1)}, {"m", L(0, 1, 1, 0)}, {"n", L(0, 5, 1, 1)},
          {"p", L(0, -2, 1, 0)}, {"q", L(0, -1, 1, 1)}},
         {"eqangle(k,l,m,n)", "eqangle(m,n,p,q)"},
         "eqangle(k,l,p,q)"},
    };
    std::set<std::string> covered;
    for (const auto& w : witnesses) {
        geom::Realization r;
        for (const auto& [id, c] : w.coords) r.coords[id] = c;
        geom::KindLookup kinds = [&](std::string_view id) -> std::optional<geom::ObjectKind> {
            if (!r.has(id)) return std::nullopt;
            return geom::kind_of(r.at(id));
        };
        std::vector<Fact> prem;
        for (const auto* t : w.premises) {
            prem.push_back(parse_fact(t, kinds));
            EXPECT_TRUE(geom::eval_fact(prem.back(), r)) << w.rule << ": premise " << t;
        }
        auto const concl = parse_fact(w.conclusion, kinds);
        EXPECT_TRUE(geom::eval_fact(concl, r)) << w.rule << ": conclusion " << w.conclusion;
        EXPECT_TRUE(closure_set(prem, select_rules(bundled_rules(), {w.rule})).count(concl)) << w.rule;
        covered.insert(w.rule);
    }
    for (const auto& rule : bundled_rules()) EXPECT_TRUE(covered.count(rule.name)) << rule.name << " has no witness";
}
