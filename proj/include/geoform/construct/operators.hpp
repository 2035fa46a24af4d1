#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "geoform/geom/fact.hpp"
#include "geoform/geom/types.hpp"

namespace geoform::construct {

using geom::Fact;
using geom::ObjectKind;
using geom::Predicate;

/// Which ambient dimension an operator is meaningful in.
enum class SpaceMode { any, planar, spatial };

/// How inputs may be reordered without changing the construction.
enum class InputSymmetry { none, all, ends };

struct OperatorSpec {
    std::string_view name;
    std::vector<ObjectKind> inputs;
    std::vector<ObjectKind> outputs;
    InputSymmetry symmetry = InputSymmetry::none;
    SpaceMode mode = SpaceMode::any;
};

inline const std::vector<OperatorSpec>& operator_table() {
    using K = ObjectKind;
    using S = InputSymmetry;
    using M = SpaceMode;
    static const std::vector<OperatorSpec> table{
        {"point", {}, {K::point}, S::none, M::any},
        {"line", {K::point, K::point}, {K::line}, S::all, M::any},
        {"circle", {K::point, K::point}, {K::circle}, S::none, M::planar},
        {"plane", {K::point, K::point, K::point}, {K::plane}, S::all, M::spatial},
        {"line_line_intersection", {K::line, K::line}, {K::point}, S::all, M::planar},
        {"line_circle_intersection", {K::line, K::circle}, {K::point, K::point}, S::none, M::planar},
        {"circle_circle_intersection", {K::circle, K::circle}, {K::point, K::point}, S::all, M::planar},
        {"line_plane_intersection", {K::line, K::plane}, {K::point}, S::none, M::spatial},
        {"plane_plane_intersection", {K::plane, K::plane}, {K::line}, S::all, M::spatial},
        {"midpoint", {K::point, K::point}, {K::point}, S::all, M::any},
        {"circumcenter", {K::point, K::point, K::point}, {K::point}, S::all, M::any},
        {"incenter", {K::point, K::point, K::point}, {K::point}, S::all, M::any},
        {"centroid", {K::point, K::point, K::point}, {K::point}, S::all, M::any},
        {"orthocenter", {K::point, K::point, K::point}, {K::point}, S::all, M::any},
        {"perpendicular_line", {K::point, K::line}, {K::line}, S::none, M::planar},
        {"parallel_line", {K::point, K::line}, {K::line}, S::none, M::any},
        {"foot_of_perpendicular", {K::point, K::line}, {K::point}, S::none, M::any},
        {"angle_bisector", {K::point, K::point, K::point}, {K::line}, S::ends, M::planar},
    };
    return table;
}

inline const OperatorSpec* find_operator(std::string_view name) {
    for (const auto& op : operator_table()) {
        if (op.name == name) return &op;
    }
    return nullptr;
}

/// Operators whose three point inputs must not be collinear.
inline bool needs_triangle(std::string_view op) {
    return op == "circumcenter" || op == "incenter" || op == "centroid" || op == "orthocenter" || op == "plane" ||
           op == "angle_bisector";
}

/// Defining facts a single step asserts. One root fact per defining
/// property; consequences (e.g. the congruence implied by a midpoint) are
/// left to deduction.
inline std::vector<Fact> step_facts(std::string_view op, const std::vector<std::string>& in,
                                    const std::vector<std::string>& out) {
    using geom::Term;
    auto F = [](Predicate p, std::vector<Term> terms) { return Fact(p, std::move(terms)); };
    std::vector<Fact> facts;
    if (op == "line") {
        facts = {F(Predicate::on_line, {{in[0]}, {out[0]}}), F(Predicate::on_line, {{in[1]}, {out[0]}})};
    } else if (op == "circle") {
        facts = {F(Predicate::on_circle, {{in[1]}, {out[0]}})};
    } else if (op == "plane") {
        for (const auto& p : in) facts.push_back(F(Predicate::on_plane, {{p}, {out[0]}}));
    } else if (op == "line_line_intersection") {
        facts = {F(Predicate::on_line, {{out[0]}, {in[0]}}), F(Predicate::on_line, {{out[0]}, {in[1]}})};
    } else if (op == "line_circle_intersection") {
        for (const auto& x : out) {
            facts.push_back(F(Predicate::on_line, {{x}, {in[0]}}));
            facts.push_back(F(Predicate::on_circle, {{x}, {in[1]}}));
        }
    } else if (op == "circle_circle_intersection") {
        for (const auto& x : out) {
            facts.push_back(F(Predicate::on_circle, {{x}, {in[0]}}));
            facts.push_back(F(Predicate::on_circle, {{x}, {in[1]}}));
        }
    } else if (op == "line_plane_intersection") {
        facts = {F(Predicate::on_line, {{out[0]}, {in[0]}}), F(Predicate::on_plane, {{out[0]}, {in[1]}})};
    } else if (op == "midpoint") {
        facts = {F(Predicate::midp, {{out[0]}, {in[0], in[1]}})};
    } else if (op == "circumcenter") {
        const auto& o = out[0];
        facts = {F(Predicate::cong, {{o, in[0]}, {o, in[1]}}), F(Predicate::cong, {{o, in[1]}, {o, in[2]}})};
    } else if (op == "incenter") {
        const auto& i = out[0];
        const auto &a = in[0], &b = in[1], &c = in[2];
        facts = {F(Predicate::eqangle, {{b, a, i}, {i, a, c}}), F(Predicate::eqangle, {{a, b, i}, {i, b, c}})};
    } else if (op == "orthocenter") {
        const auto& h = out[0];
        const auto &a = in[0], &b = in[1], &c = in[2];
        facts = {F(Predicate::perp, {{a, h}, {b, c}}), F(Predicate::perp, {{b, h}, {a, c}})};
    } else if (op == "perpendicular_line") {
        facts = {F(Predicate::on_line, {{in[0]}, {out[0]}}), F(Predicate::perp, {{out[0]}, {in[1]}})};
    } else if (op == "parallel_line") {
        facts = {F(Predicate::on_line, {{in[0]}, {out[0]}}), F(Predicate::para, {{out[0]}, {in[1]}})};
    } else if (op == "foot_of_perpendicular") {
        facts = {F(Predicate::on_line, {{out[0]}, {in[1]}}), F(Predicate::perp, {{in[0], out[0]}, {in[1]}})};
    } else if (op == "angle_bisector") {
        const auto &a = in[0], &b = in[1], &c = in[2];
        const auto& l = out[0];
        facts = {F(Predicate::on_line, {{b}, {l}}), F(Predicate::eqangle, {{b, a}, {l}, {l}, {b, c}})};
    }
    // point, centroid and plane_plane_intersection assert nothing the
    // predicate vocabulary can state directly.
    return facts;
}

}  // namespace geoform::construct
