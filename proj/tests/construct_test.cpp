#include <gtest/gtest.h>

#include <fstream>
#include <map>
#include <sstream>

#include "geoform/construct/program.hpp"
#include "geoform/construct/realize.hpp"
#include "geoform/construct/sampler.hpp"
#include "geoform/geom/eval.hpp"

using namespace geoform;
using namespace geoform::construct;

namespace {

ErrorCode code_of(const std::string& text, const Limits& limits = {}) {
    try {
        parse_program(text, limits);
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error for: " << text;
    return ErrorCode::io_error;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST(Parse, MidpointProgram) {
    auto p = parse_program("a = point; b = point; m = midpoint a b");
    ASSERT_EQ(p.steps.size(), 3u);
    EXPECT_EQ(p.object_count(), 3u);
    EXPECT_EQ(p.kind_of("m"), geom::ObjectKind::point);
}

TEST(Parse, CircleCircleIntersectionHasTwoOutputs) {
    auto p = parse_program("a = point; b = point; c = point\nc1 = circle a b\nc2 = circle c b\n"
                           "x y = circle_circle_intersection c1 c2");
    ASSERT_EQ(p.steps.size(), 6u);
    EXPECT_EQ(p.steps.back().outputs, (std::vector<std::string>{"x", "y"}));
    EXPECT_EQ(p.steps.back().inputs, (std::vector<std::string>{"c1", "c2"}));
}

TEST(Parse, Errors) {
    EXPECT_EQ(code_of("o = circumcenter a b c"), ErrorCode::unbound_id);
    EXPECT_EQ(code_of("a = point; b = frobnicate a"), ErrorCode::unknown_operator);
    EXPECT_EQ(code_of("a = point; b = midpoint a"), ErrorCode::arity_mismatch);
    EXPECT_EQ(code_of("a = point; b = point; l = line a b; c = midpoint a l"), ErrorCode::arity_mismatch);
    EXPECT_EQ(code_of("a = point; a = point"), ErrorCode::duplicate_id);
    EXPECT_EQ(code_of("a = point; b point"), ErrorCode::syntax_error);
    EXPECT_EQ(code_of("a = point; b = point; c = point", Limits{2, 2, 1}), ErrorCode::limit_exceeded);
    EXPECT_EQ(code_of("a = point; b = point; c = point; p = plane a b c; w = circle a b"),
              ErrorCode::dimension_conflict);
}

TEST(Parse, SyntaxErrorCarriesLocation) {
    try {
        parse_program("a = point\nb = point\nc = = midpoint a b");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.code(), ErrorCode::syntax_error);
        EXPECT_EQ(e.line(), 3u);
    }
}

TEST(Parse, CommentsAndGoal) {
    auto p = parse_program("# header\na = point # first\nb = point; l = line a b\n? on_line(a, l)\n");
    ASSERT_TRUE(p.goal.has_value());
    EXPECT_EQ(p.goal->str(), "on_line(a,l)");
    EXPECT_EQ(serialize(p), "a = point; b = point; l = line a b; ? on_line(a,l)");
}

TEST(AssertedFacts, PerOperator) {
    auto facts = [](const std::string& text) {
        std::vector<std::string> out;
        for (const auto& f : asserted_facts(parse_program(text))) out.push_back(f.str());
        return out;
    };
    using V = std::vector<std::string>;
    EXPECT_EQ(facts("a = point"), V{});
    EXPECT_EQ(facts("a = point; b = point; m = midpoint a b"), V{"midp(m,a,b)"});
    EXPECT_EQ(facts("a = point; b = point; c = point; o = circumcenter a b c"),
              (V{"cong(a,o,b,o)", "cong(b,o,c,o)"}));
    EXPECT_EQ(facts("a = point; b = point; c = point; l = line a b; f = foot_of_perpendicular c l"),
              (V{"perp(c,f,l)", "on_line(a,l)", "on_line(b,l)", "on_line(f,l)"}));
    EXPECT_EQ(facts("a = point; b = point; c = point; l = line a b; k = parallel_line c l"),
              (V{"para(k,l)", "on_line(a,l)", "on_line(b,l)", "on_line(c,k)"}));
    auto bis = facts("a = point; b = point; c = point; l = angle_bisector a b c");
    ASSERT_EQ(bis.size(), 2u);
    EXPECT_EQ(bis[0].rfind("eqangle(", 0), 0u);
}

TEST(Canonicalize, RelabelsInIntroductionOrder) {
    auto p = parse_program("z = point; q = point; m = midpoint q z");
    auto c = canonicalize(p);
    EXPECT_EQ(serialize(c.program), "a = point; b = point; c = midpoint a b");
    EXPECT_EQ(c.renaming.at("z"), "a");
    EXPECT_EQ(c.renaming.at("m"), "c");
}

TEST(Canonicalize, SortsSymmetricInputsOnly) {
    auto p = parse_program("a = point; b = point; c = point; d = midpoint b a; w = circle b a; "
                           "l = angle_bisector c a b");
    auto s = serialize(canonicalize(p).program);
    EXPECT_EQ(s, "a = point; b = point; c = point; d = midpoint a b; e = circle b a; f = angle_bisector b a c");
}

TEST(Canonicalize, IdempotentOnBundledPrograms) {
    for (const char* name : {"circumcenter.dsl", "midpoint.dsl", "orthocenter.dsl", "two_circles.dsl",
                             "prism_section.dsl"}) {
        auto text = read_file(std::string(GEOFORM_DATA_DIR) + "/programs/" + name);
        ASSERT_FALSE(text.empty()) << name;
        auto once = canonicalize(parse_program(text));
        auto twice = canonicalize(once.program);
        EXPECT_EQ(serialize(once.program), serialize(twice.program)) << name;
        // parse . serialize is the identity on canonical programs.
        EXPECT_EQ(serialize(parse_program(serialize(once.program))), serialize(once.program)) << name;
    }
}

TEST(Sample, DeterministicUnderSeed) {
    Limits limits{5, 20, 50};
    Rng a(7), b(7);
    EXPECT_EQ(serialize(sample_program(a, limits)), serialize(sample_program(b, limits)));
}

TEST(Sample, InvalidLimitsRejected) {
    Rng r(1);
    EXPECT_THROW(sample_program(r, Limits{5, 3, 10}), Error);
    EXPECT_THROW(sample_program(r, Limits{0, 3, 10}), Error);
}

TEST(Sample, PreconditionGating) {
    // With only two objects allowed, nothing needing two circles can run.
    OperatorWeights w{{"point", 1.0}, {"circle", 1.0}, {"circle_circle_intersection", 100.0}};
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        Rng r(seed);
        auto p = sample_program(r, Limits{2, 2, 50}, w);
        for (const auto& s : p.steps) EXPECT_NE(s.op, "circle_circle_intersection");
    }
    // Circle-circle steps only ever follow two circles.
    int sampled = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        Rng r(seed);
        Program p;
        try {
            p = sample_program(r, Limits{8, 12, 50}, w);
        } catch (const Error& e) {
            // Small pools run out of non-duplicate circles.
            EXPECT_EQ(e.code(), ErrorCode::sampling_exhausted);
            continue;
        }
        ++sampled;
        int circles = 0;
        for (const auto& s : p.steps) {
            if (s.op == "circle") ++circles;
            if (s.op == "circle_circle_intersection") EXPECT_GE(circles, 2);
        }
    }
    EXPECT_GT(sampled, 100);
}

TEST(Sample, EveryOperatorAppearsOverThousandSeeds) {
    std::map<std::string, int> counts;
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        Rng r(seed);
        try {
            for (const auto& s : sample_program(r, Limits{}).steps) ++counts[s.op];
        } catch (const Error&) {
        }
    }
    for (const auto& op : operator_table()) EXPECT_GT(counts[std::string(op.name)], 0) << op.name;
}

// Sampled programs validate unchanged, stay within limits, and are canonical.
TEST(Property, SampledProgramsAreValidCanonicalAndBounded) {
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
        Rng r(seed);
        Limits limits{1 + seed % 12, 20, 50};
        Program p;
        try {
            p = sample_program(r, limits);
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), ErrorCode::sampling_exhausted);
            continue;
        }
        EXPECT_LE(p.steps.size(), limits.max_steps);
        EXPECT_LE(p.object_count(), limits.max_objects);
        auto text = serialize(p);
        auto reparsed = parse_program(text, limits);
        EXPECT_EQ(serialize(reparsed), text);
        EXPECT_EQ(serialize(canonicalize(reparsed).program), text);
    }
}

// Bridge with the kernel: asserted facts hold on every accepted realization.
TEST(Property, AssertedFactsHoldOnRealizations) {
    geom::Tolerance tol;
    int realized = 0;
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
        Rng r(seed);
        Program p;
        try {
            p = sample_program(r, Limits{});
        } catch (const Error&) {
            continue;
        }
        auto facts = asserted_facts(p);
        for (std::uint64_t k = 0; k < 3; ++k) {
            Rng coords(derive_seed(seed, k));
            auto res = realize(p, coords, tol, 10.0);
            if (!res.ok) continue;
            ++realized;
            EXPECT_TRUE(res.realization.well_formed());
            for (const auto& f : facts) {
                EXPECT_TRUE(geom::eval_fact(f, res.realization, tol))
                    << serialize(p) << "\n  " << f.str() << " residual " << geom::residual(f, res.realization);
            }
        }
    }
    EXPECT_GT(realized, 300);
}

TEST(Realize, CollinearCircumcenterInputRejected) {
    auto p = parse_program("a = point; b = point; c = midpoint a b; o = circumcenter a b c");
    Rng r(3);
    auto res = realize(p, r);
    EXPECT_FALSE(res.ok);
    EXPECT_EQ(res.failed_step, 3u);
}
