#pragma once

#include <limits>
#include <optional>
#include <string>

#include "geoform/construct/program.hpp"
#include "geoform/core/rng.hpp"
#include "geoform/geom/kernel.hpp"
#include "geoform/geom/types.hpp"

namespace geoform::construct {

struct RealizeResult {
    geom::Realization realization;
    bool ok = false;
    std::optional<std::size_t> failed_step;
    std::string reason;
    double min_conditioning = std::numeric_limits<double>::infinity();
};

/// Draws free points from `rng` and evaluates every step in order. A step
/// fails when its conditioning is below margin * degen_tol, or when the
/// points it creates come within margin * degen_tol * L of an earlier point
/// (L = characteristic length of the finished realization).
inline RealizeResult realize(const Program& p, Rng& rng, const geom::Tolerance& tol = {}, double margin = 1.0) {
    using namespace geom;
    RealizeResult res;
    auto& r = res.realization;
    r.space_dim = p.space_dim();
    double const threshold = margin * tol.degen_tol;
    auto fail = [&](std::size_t i, std::string why) {
        res.ok = false;
        res.failed_step = i;
        res.reason = p.steps[i].op + ": " + why;
        return res;
    };
    for (std::size_t i = 0; i < p.steps.size(); ++i) {
        const auto& s = p.steps[i];
        const auto& in = s.inputs;
        const auto& out = s.outputs;
        auto P = [&](std::size_t k) -> const Vec3& { return r.point(in[k]); };
        auto L = [&](std::size_t k) -> const LineCoords& { return r.get<LineCoords>(in[k]); };
        auto C = [&](std::size_t k) -> const CircleCoords& { return r.get<CircleCoords>(in[k]); };
        auto Pl = [&](std::size_t k) -> const PlaneCoords& { return r.get<PlaneCoords>(in[k]); };

        // Every kernel call goes through `take`, which records conditioning
        // and stores outputs.
        bool failed = false;
        std::string why;
        auto take = [&](const auto& result, auto store) {
            res.min_conditioning = std::min(res.min_conditioning, result.conditioning());
            if (!result || result.conditioning() < threshold) {
                failed = true;
                why = result ? "near-degenerate" : result.reason();
                return;
            }
            store(*result);
        };
        auto set_point = [&](const Vec3& v) { r.coords[out[0]] = PointCoords{v}; };
        auto set_pair = [&](const PointPair& v) {
            r.coords[out[0]] = PointCoords{v.first};
            r.coords[out[1]] = PointCoords{v.second};
        };
        auto set_line = [&](const LineCoords& l) { r.coords[out[0]] = l; };

        const auto& op = s.op;
        double const dt = tol.degen_tol;
        if (op == "point") {
            r.coords[out[0]] = PointCoords{sample_free_point(rng, r.space_dim)};
        } else if (op == "line") {
            take(line_through(P(0), P(1), dt), set_line);
        } else if (op == "circle") {
            take(circle_through(P(0), P(1), dt), [&](const CircleCoords& c) { r.coords[out[0]] = c; });
        } else if (op == "plane") {
            take(plane_through(P(0), P(1), P(2), dt), [&](const PlaneCoords& pl) { r.coords[out[0]] = pl; });
        } else if (op == "line_line_intersection") {
            take(intersect_lines(L(0), L(1), dt), set_point);
        } else if (op == "line_circle_intersection") {
            take(intersect_line_circle(L(0), C(1), dt), set_pair);
        } else if (op == "circle_circle_intersection") {
            take(intersect_circles(C(0), C(1), dt), set_pair);
        } else if (op == "line_plane_intersection") {
            take(intersect_line_plane(L(0), Pl(1), dt), set_point);
        } else if (op == "plane_plane_intersection") {
            take(intersect_planes(Pl(0), Pl(1), dt), set_line);
        } else if (op == "midpoint") {
            take(midpoint_coords(P(0), P(1)), set_point);
        } else if (op == "circumcenter") {
            take(circumcenter_coords(P(0), P(1), P(2), dt), set_point);
        } else if (op == "incenter") {
            take(incenter_coords(P(0), P(1), P(2), dt), set_point);
        } else if (op == "centroid") {
            take(centroid_coords(P(0), P(1), P(2), dt), set_point);
        } else if (op == "orthocenter") {
            take(orthocenter_coords(P(0), P(1), P(2), dt), set_point);
        } else if (op == "perpendicular_line") {
            take(perpendicular_through(P(0), L(1)), set_line);
        } else if (op == "parallel_line") {
            take(parallel_through(P(0), L(1)), set_line);
        } else if (op == "foot_of_perpendicular") {
            take(foot_coords(P(0), L(1)), set_point);
        } else if (op == "angle_bisector") {
            take(bisector_coords(P(0), P(1), P(2), dt), set_line);
        } else {
            throw Error(ErrorCode::unknown_operator, "unknown operator '" + op + "'");
        }
        if (failed) return fail(i, why);
    }

    // Coincident points make segment-based predicates meaningless.
    double const min_gap = threshold * r.characteristic_length();
    std::vector<std::pair<std::size_t, const Vec3*>> pts;
    for (std::size_t i = 0; i < p.steps.size(); ++i) {
        for (const auto& o : p.steps[i].outputs) {
            if (auto const* pc = std::get_if<PointCoords>(&r.coords.at(o))) pts.emplace_back(i, &pc->p);
        }
    }
    for (std::size_t a = 0; a < pts.size(); ++a) {
        for (std::size_t b = a + 1; b < pts.size(); ++b) {
            if ((*pts[a].second - *pts[b].second).norm() < min_gap) return fail(pts[b].first, "coincident points");
        }
    }
    res.ok = true;
    return res;
}

}  // namespace geoform::construct
