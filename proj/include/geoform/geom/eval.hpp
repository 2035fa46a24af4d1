#pragma once

#include <cmath>
#include <limits>
#include <optional>

#include "geoform/geom/fact.hpp"
#include "geoform/geom/kernel.hpp"
#include "geoform/geom/types.hpp"

namespace geoform::geom {

namespace detail {

inline constexpr double inf = std::numeric_limits<double>::infinity();
inline constexpr double pi = 3.14159265358979323846;

/// Unit direction of a line id or a segment; nullopt for a zero segment.
inline std::optional<Vec3> direction(const Term& t, const Realization& r) {
    if (t.size() == 1) return r.get<LineCoords>(t[0]).dir;
    Vec3 const d = r.point(t[1]) - r.point(t[0]);
    double const n = d.norm();
    if (n == 0.0) return std::nullopt;
    return d / n;
}

/// Undirected angle in [0, pi] at vertex t[1].
inline double vertex_angle(const Term& t, const Realization& r) {
    Vec3 const u = r.point(t[0]) - r.point(t[1]);
    Vec3 const v = r.point(t[2]) - r.point(t[1]);
    return std::atan2(u.cross(v).norm(), u.dot(v));
}

inline double mod_pi(double x) {
    double m = std::fmod(x, pi);
    if (m < 0) m += pi;
    return m;
}

/// Distance between two angles taken modulo pi.
inline double angle_gap_mod_pi(double x, double y) {
    double const g = mod_pi(x - y);
    return std::min(g, pi - g);
}

inline double line_distance(const Vec3& p, const LineCoords& l) {
    Vec3 const w = p - l.point;
    return (w - w.dot(l.dir) * l.dir).norm();
}

}  // namespace detail

/// Scale-free residual of a fact; zero when it holds exactly. Lengths are
/// divided by the realization's characteristic length, angles are radians,
/// and parallelism/perpendicularity use sin/cos of the enclosed angle.
inline double residual(const Fact& f, const Realization& r) {
    using detail::inf;
    const auto& t = f.terms();
    double const L = r.characteristic_length();
    auto P = [&](const std::string& id) -> const Vec3& { return r.point(id); };
    switch (f.predicate()) {
    case Predicate::coll: {
        Vec3 const a = P(t[0][0]);
        return (P(t[1][0]) - a).cross(P(t[2][0]) - a).norm() / (L * L);
    }
    case Predicate::para:
    case Predicate::perp: {
        auto d1 = detail::direction(t[0], r);
        auto d2 = detail::direction(t[1], r);
        if (!d1 || !d2) return inf;
        return f.predicate() == Predicate::para ? d1->cross(*d2).norm() : std::abs(d1->dot(*d2));
    }
    case Predicate::cong:
        return std::abs((P(t[0][0]) - P(t[0][1])).norm() - (P(t[1][0]) - P(t[1][1])).norm()) / L;
    case Predicate::midp: return (P(t[0][0]) - (P(t[1][0]) + P(t[1][1])) / 2.0).norm() / L;
    case Predicate::eqdist: {
        Vec3 const o = P(t[0][0]);
        return std::abs((P(t[1][0]) - o).norm() - (P(t[1][1]) - o).norm()) / L;
    }
    case Predicate::on_line: return detail::line_distance(P(t[0][0]), r.get<LineCoords>(t[1][0])) / L;
    case Predicate::on_circle: {
        const auto& c = r.get<CircleCoords>(t[1][0]);
        return std::abs((P(t[0][0]) - c.center).norm() - c.radius) / L;
    }
    case Predicate::on_plane: {
        const auto& pl = r.get<PlaneCoords>(t[1][0]);
        return std::abs((P(t[0][0]) - pl.point).dot(pl.normal)) / L;
    }
    case Predicate::cyclic: {
        Vec3 const a = P(t[0][0]);
        Vec3 const b = P(t[1][0]);
        Vec3 const c = P(t[2][0]);
        auto o = circumcenter_coords(a, b, c, 0.0);
        if (!o || detail::triangle_conditioning(a, b, c) == 0.0) return inf;
        double const radius = (a - *o).norm();
        Vec3 const n = (b - a).cross(c - a).normalized();
        double worst = 0.0;
        for (std::size_t i = 3; i < t.size(); ++i) {
            Vec3 const p = P(t[i][0]);
            worst = std::max(worst, std::abs((p - *o).norm() - radius) / L);
            worst = std::max(worst, std::abs((p - a).dot(n)) / L);
        }
        return worst;
    }
    case Predicate::eqangle: {
        if (f.is_vertex_angle()) {
            return std::abs(detail::vertex_angle(t[0], r) - detail::vertex_angle(t[1], r));
        }
        // Directed angles between lines, modulo pi, measured in the z = 0
        // plane. Out-of-plane directions make the form meaningless.
        double ang[4];
        for (std::size_t i = 0; i < 4; ++i) {
            auto d = detail::direction(t[i], r);
            if (!d || std::abs(d->z()) > 1e-12) return inf;
            ang[i] = std::atan2(d->y(), d->x());
        }
        return detail::angle_gap_mod_pi(ang[1] - ang[0], ang[3] - ang[2]);
    }
    }
    return inf;
}

/// True iff the fact's residual is within tol.eq_tol.
inline bool eval_fact(const Fact& f, const Realization& r, const Tolerance& tol = {}) {
    return residual(f, r) <= tol.eq_tol;
}

}  // namespace geoform::geom
