#include <gtest/gtest.h>

#include "geoform/core/rng.hpp"
#include "geoform/dimension/concepts.hpp"
#include "geoform/dimension/dim_expr.hpp"
#include "support/termination_tables.hpp"

using namespace geoform;
using namespace geoform::dim;

namespace {

const ConceptTable& table() { return ConceptTable::bundled(); }

DimExpr random_dim(Rng& r) {
    std::array<Rational, base_count> e{};
    for (auto& x : e) {
        auto num = static_cast<long long>(r.index(13)) - 6;
        auto den = static_cast<long long>(r.index(3)) + 1;
        x = Rational(num, den);
    }
    return DimExpr(e);
}

}  // namespace

TEST(DimExpr, EnergyFromVelocityAndMass) {
    // Velocity = L T^-1, so M * V * V has exponents M:1, L:2, T:-2.
    auto velocity = DimExpr::of(0, 1, -1);
    auto e = dim_mul(DimExpr::base(Base::M), dim_mul(velocity, velocity));
    EXPECT_EQ(e, DimExpr::of(1, 2, -2));
    EXPECT_EQ(e.str(), "M L^2 T^-2");
}

TEST(DimExpr, IdentityAndZeroPower) {
    auto x = DimExpr::of(1, -3, 2, 1, 0);
    EXPECT_EQ(dim_mul(x, DimExpr::dimensionless()), x);
    EXPECT_TRUE(dim_pow(DimExpr::base(Base::L), 0).is_dimensionless());
    EXPECT_EQ(DimExpr::dimensionless().str(), "1");
}

TEST(DimExpr, RationalExponentsAndParsing) {
    auto root_len = dim_pow(DimExpr::base(Base::L), Rational(1, 2));
    EXPECT_EQ(root_len.str(), "L^1/2");
    EXPECT_EQ(dim_mul(root_len, root_len), DimExpr::base(Base::L));
    EXPECT_EQ(parse_dim("M L^2 T^-2"), DimExpr::of(1, 2, -2));
    EXPECT_EQ(parse_dim("Theta"), DimExpr::base(Base::Theta));
    EXPECT_EQ(parse_dim(root_len.str()), root_len);
    EXPECT_THROW(parse_dim("M X^2"), Error);
}

// Abelian group laws over random rational exponent vectors.
TEST(Property, GroupLaws) {
    Rng r(2024);
    auto one = DimExpr::dimensionless();
    for (int i = 0; i < 10000; ++i) {
        auto a = random_dim(r), b = random_dim(r), c = random_dim(r);
        ASSERT_EQ(dim_mul(a, b), dim_mul(b, a));
        ASSERT_EQ(dim_mul(dim_mul(a, b), c), dim_mul(a, dim_mul(b, c)));
        ASSERT_EQ(dim_mul(a, one), a);
        ASSERT_EQ(dim_mul(a, dim_inv(a)), one);
        ASSERT_EQ(parse_dim(a.str()), a);
    }
}

TEST(Classify, Examples) {
    auto mass = table().classify("Mass", Domain::physics);
    EXPECT_EQ(mass.kind, VerdictKind::dim);
    EXPECT_EQ(*mass.dim, DimExpr::base(Base::M));
    EXPECT_EQ(mass.str(), "Dim(M)");

    EXPECT_EQ(table().classify("GeometryPoint", Domain::math).kind, VerdictKind::primitive);
    EXPECT_EQ(table().classify("MaxwellEquations", "physics").kind, VerdictKind::axiom);

    auto r0 = table().classify("Resistance", Domain::physics, false);
    EXPECT_TRUE(r0.terminal());
    EXPECT_EQ(r0.category, Category::conditional_atomic);
    EXPECT_EQ(table().classify("Resistance", Domain::physics, true).kind, VerdictKind::non_terminal);

    EXPECT_EQ(table().classify("charge suspended by field", Domain::physics).kind, VerdictKind::non_terminal);
    EXPECT_EQ(table().classify("FooBar", Domain::math).kind, VerdictKind::non_terminal);
    EXPECT_THROW(table().classify("Mass", "chemistry"), Error);
}

TEST(Classify, NormalizedLookupAndNumericPattern) {
    EXPECT_EQ(table().classify("speed of light", Domain::physics).kind, VerdictKind::dim);
    EXPECT_EQ(table().classify("Newton_Laws", Domain::physics).kind, VerdictKind::axiom);
    auto c = table().classify("SideCount=4", Domain::math);
    EXPECT_EQ(c.kind, VerdictKind::primitive);
    EXPECT_EQ(c.category, Category::numeric_constraint);
    EXPECT_EQ(table().classify("EdgeCountEq12", Domain::math).category, Category::numeric_constraint);
    EXPECT_EQ(table().classify("Equation", Domain::math).kind, VerdictKind::non_terminal);
    // Numeric patterns are a math-table row only.
    EXPECT_EQ(table().classify("SideCount=4", Domain::physics).kind, VerdictKind::non_terminal);
}

TEST(DimOf, TabledQuantities) {
    EXPECT_EQ(table().dim_of("Force"), DimExpr::of(1, 1, -2));
    EXPECT_EQ(table().dim_of("Energy"), DimExpr::of(1, 2, -2));
    EXPECT_EQ(table().dim_of("Power"), DimExpr::of(1, 2, -3));
    for (const char* name : {"Re", "α", "β", "ε"}) {
        auto d = table().dim_of(name);
        ASSERT_TRUE(d) << name;
        EXPECT_TRUE(d->is_dimensionless()) << name;
    }
    EXPECT_FALSE(table().dim_of("FooBar"));
    EXPECT_FALSE(table().dim_of("NewtonLaws"));
}

TEST(DimOf, DerivedRowsAgreeWithDefinitions) {
    // F = dp/dt with p = m v; E = F L; P = E / T.
    auto m = *table().dim_of("Mass"), l = *table().dim_of("Length"), t = *table().dim_of("Time");
    auto v = l / t;
    auto force = (m * v) / t;
    EXPECT_EQ(*table().dim_of("Force"), force);
    EXPECT_EQ(*table().dim_of("Energy"), force * l);
    EXPECT_EQ(*table().dim_of("Power"), force * l / t);
    // Electrical rows: V = E/Q, I = Q/T, R = V/I, L = V T / I, C = Q / V.
    auto q = *table().dim_of("Charge");
    auto energy = force * l;
    auto volt = energy / q;
    auto amp = q / t;
    EXPECT_EQ(*table().dim_of("Resistance"), volt / amp);
    EXPECT_EQ(*table().dim_of("Inductance"), volt * t / amp);
    EXPECT_EQ(*table().dim_of("Capacitance"), q / volt);
    EXPECT_EQ(*table().dim_of("PlanckConstant"), energy * t);
}

TEST(Table, ParseErrors) {
    EXPECT_THROW(ConceptTable::parse("Mass physics atomic_parameter"), ParseError);
    EXPECT_THROW(ConceptTable::parse("Mass physics nonsense 1 0 0 0 0"), ParseError);
    EXPECT_THROW(ConceptTable::parse("Mass chemistry atomic_parameter 1 0 0 0 0"), ParseError);
    EXPECT_THROW(ConceptTable::parse("Law physics fundamental_law 1 0 0 0 0"), ParseError);
    EXPECT_THROW(ConceptTable::parse("X math primitive\nx math primitive"), ParseError);
    auto t = ConceptTable::parse("# c\nHalf physics derived_dimension 0 1/2 0 0 0\n");
    EXPECT_EQ(t.dim_of("Half"), dim_pow(DimExpr::base(Base::L), Rational(1, 2)));
}

TEST(Table, EveryEntryRespectsDimInvariant) {
    for (const auto& e : table().entries()) {
        if (e.category == Category::derived_dimension || e.category == Category::atomic_parameter) {
            EXPECT_TRUE(e.dim) << e.name;
        }
        if (e.category == Category::fundamental_law || e.category == Category::math_operation) {
            EXPECT_FALSE(e.dim) << e.name;
        }
    }
}

TEST(Classify, Pure) {
    for (const auto& e : table().entries()) {
        auto a = table().classify(e.name, e.domain);
        auto b = table().classify(e.name, e.domain);
        EXPECT_EQ(a.str(), b.str());
        EXPECT_EQ(a.reason, b.reason);
    }
}

TEST(Classify, EveryTabledConcept) {
    for (const auto& row : tables::rows()) {
        auto v = table().classify(row.name, row.domain);
        EXPECT_EQ(v.category, row.category) << row.name;
        EXPECT_EQ(v.kind, row.kind) << row.name;
        if (row.category == tables::Category::dimensionless_group) {
            EXPECT_TRUE(v.dim->is_dimensionless()) << row.name;
        }
        if (row.category == tables::Category::conditional_atomic) {
            EXPECT_EQ(table().classify(row.name, row.domain, true).kind, VerdictKind::non_terminal) << row.name;
        }
    }
}
