#pragma once

// Rows of the two termination tables, transcribed independently of
// data/concepts.txt so the bundled file is checked against them.

#include <string_view>
#include <vector>

#include "geoform/dimension/concepts.hpp"

namespace tables {

using geoform::dim::Category;
using geoform::dim::Domain;
using geoform::dim::VerdictKind;

struct Row {
    std::string_view name;
    Domain domain;
    Category category;
    VerdictKind kind;
};

inline std::vector<Row> rows() {
    using C = Category;
    using K = VerdictKind;
    std::vector<Row> out;
    auto add = [&](Domain d, C c, K k, std::initializer_list<std::string_view> names) {
        for (auto n : names) out.push_back({n, d, c, k});
    };
    auto const m = Domain::math;
    auto const p = Domain::physics;
    add(m, C::primitive, K::primitive, {"GeometryPoint", "Line", "Plane", "Vector", "Segment", "Set", "List", "Real"});
    add(m, C::standard_predicate, K::primitive,
        {"GeometryRegular", "GeometryRight", "GeometryConvexHull", "GeometryPlanar", "Parallel", "Coplanar"});
    add(m, C::numeric_constraint, K::primitive, {"SideCount=6", "Angle=90", "VertexCountEq6"});
    add(p, C::atomic_parameter, K::dim,
        {"Mass", "Charge", "Time", "Length", "Radius", "Area", "Angle", "Position", "Temperature", "Moles"});
    add(p, C::quantum_relativistic_parameter, K::dim,
        {"PlanckConstant", "SpeedOfLight", "Wavelength", "Frequency", "QuantumNumber"});
    add(p, C::primitive, K::primitive, {"Vector", "CoordinateSystem", "Axis", "Direction", "ReferenceFrame"});
    add(p, C::conditional_atomic, K::dim, {"Resistance", "Inductance", "Capacitance"});
    add(p, C::atomic_parameter, K::dim, {"M", "L", "T", "Q", "Θ"});
    add(p, C::derived_dimension, K::dim, {"Force", "Energy", "Power"});
    add(p, C::dimensionless_group, K::dim, {"Re", "α", "β", "ε"});
    add(p, C::fundamental_law, K::axiom, {"NewtonLaws", "ConservationLaws", "MaxwellEquations", "SchrodingerEquation"});
    add(p, C::base_abstract_type, K::primitive, {"Mechanics.Force", "Mechanics.Energy", "Mechanics.Power"});
    add(p, C::math_operation, K::primitive, {"Math.VectorSum", "Math.ScalarSum"});
    return out;
}

}  // namespace tables
