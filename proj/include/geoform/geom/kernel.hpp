#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>

#include "geoform/core/rng.hpp"
#include "geoform/geom/types.hpp"

// Coordinate constructors for every operator. Each returns a KernelResult
// carrying a conditioning number in [0, 1]; values below degen_tol are
// reported as degenerate instead of producing a wildly inaccurate locus.

namespace geoform::geom {

template <typename T>
class KernelResult {
  public:
    static KernelResult ok(T value, double conditioning = 1.0) {
        KernelResult r;
        r.m_value = std::move(value);
        r.m_conditioning = conditioning;
        return r;
    }
    static KernelResult degenerate(std::string reason, double conditioning = 0.0) {
        KernelResult r;
        r.m_reason = std::move(reason);
        r.m_conditioning = conditioning;
        return r;
    }

    bool degenerate() const noexcept { return !m_value.has_value(); }
    explicit operator bool() const noexcept { return m_value.has_value(); }
    const T& value() const { return *m_value; }
    const T& operator*() const { return *m_value; }
    const T* operator->() const { return &*m_value; }
    double conditioning() const noexcept { return m_conditioning; }
    const std::string& reason() const noexcept { return m_reason; }

  private:
    std::optional<T> m_value;
    double m_conditioning = 0.0;
    std::string m_reason;
};

using PointPair = std::pair<Vec3, Vec3>;

namespace detail {

/// Scale of a set of points, used to make "too close" tests relative.
inline double point_scale(std::initializer_list<Vec3> pts) {
    double s = 1.0;
    for (const auto& p : pts) s = std::max(s, p.cwiseAbs().maxCoeff());
    return s;
}

/// 2 * area / longest_side^2; 0 for collinear, sqrt(3)/2 for equilateral.
inline double triangle_conditioning(const Vec3& a, const Vec3& b, const Vec3& c) {
    double const longest = std::max({(b - a).squaredNorm(), (c - b).squaredNorm(), (a - c).squaredNorm()});
    if (longest == 0.0) return 0.0;
    return (b - a).cross(c - a).norm() / longest;
}

}  // namespace detail

inline Vec3 sample_free_point(Rng& rng, int space_dim) {
    Vec3 p = Vec3::Zero();
    for (int i = 0; i < space_dim; ++i) p[i] = rng.uniform01();
    return p;
}

inline KernelResult<Vec3> midpoint_coords(const Vec3& a, const Vec3& b) { return KernelResult<Vec3>::ok((a + b) / 2.0); }

inline KernelResult<LineCoords> line_through(const Vec3& a, const Vec3& b, double degen_tol) {
    Vec3 const d = b - a;
    double const n = d.norm();
    if (n < degen_tol * detail::point_scale({a, b})) {
        return KernelResult<LineCoords>::degenerate("coincident points");
    }
    return KernelResult<LineCoords>::ok(LineCoords{a, d / n});
}

inline KernelResult<CircleCoords> circle_through(const Vec3& center, const Vec3& p, double degen_tol) {
    double const r = (p - center).norm();
    if (r < degen_tol * detail::point_scale({center, p})) {
        return KernelResult<CircleCoords>::degenerate("zero radius");
    }
    return KernelResult<CircleCoords>::ok(CircleCoords{center, r});
}

inline KernelResult<PlaneCoords> plane_through(const Vec3& a, const Vec3& b, const Vec3& c, double degen_tol) {
    double const cond = detail::triangle_conditioning(a, b, c);
    if (cond < degen_tol) return KernelResult<PlaneCoords>::degenerate("collinear points", cond);
    return KernelResult<PlaneCoords>::ok(PlaneCoords{a, (b - a).cross(c - a).normalized()}, cond);
}

/// Intersection of two coplanar lines.
inline KernelResult<Vec3> intersect_lines(const LineCoords& l1, const LineCoords& l2, double degen_tol) {
    Vec3 const cr = l1.dir.cross(l2.dir);
    double const sin_theta = cr.norm();
    if (sin_theta < degen_tol) return KernelResult<Vec3>::degenerate("parallel lines", sin_theta);
    Vec3 const w = l2.point - l1.point;
    if (std::abs(w.dot(cr)) / sin_theta > degen_tol * detail::point_scale({l1.point, l2.point})) {
        return KernelResult<Vec3>::degenerate("skew lines", sin_theta);
    }
    double const t = w.cross(l2.dir).dot(cr) / (sin_theta * sin_theta);
    return KernelResult<Vec3>::ok(l1.point + t * l1.dir, sin_theta);
}

/// Both intersections, ordered along the line direction.
inline KernelResult<PointPair> intersect_line_circle(const LineCoords& l, const CircleCoords& c, double degen_tol) {
    Vec3 const foot = l.point + (c.center - l.point).dot(l.dir) * l.dir;
    double const h = (foot - c.center).norm();
    if (h >= c.radius) return KernelResult<PointPair>::degenerate("line misses circle");
    double const half = std::sqrt(c.radius * c.radius - h * h);
    double const cond = half / c.radius;
    if (cond < degen_tol) return KernelResult<PointPair>::degenerate("tangent line", cond);
    return KernelResult<PointPair>::ok({foot - half * l.dir, foot + half * l.dir}, cond);
}

/// Both intersections of two planar circles; the first lies to the left of
/// the directed center line c1 -> c2.
inline KernelResult<PointPair> intersect_circles(const CircleCoords& c1, const CircleCoords& c2, double degen_tol) {
    Vec3 const delta = c2.center - c1.center;
    double const d = delta.norm();
    double const rmin = std::min(c1.radius, c2.radius);
    if (d < degen_tol * std::max(c1.radius, c2.radius)) {
        return KernelResult<PointPair>::degenerate("concentric circles");
    }
    if (d >= c1.radius + c2.radius || d <= std::abs(c1.radius - c2.radius)) {
        return KernelResult<PointPair>::degenerate("circles do not meet");
    }
    double const a = (d * d + c1.radius * c1.radius - c2.radius * c2.radius) / (2.0 * d);
    double const h = std::sqrt(std::max(0.0, c1.radius * c1.radius - a * a));
    double const cond = std::min(1.0, h / rmin);
    if (cond < degen_tol) return KernelResult<PointPair>::degenerate("tangent circles", cond);
    Vec3 const u = delta / d;
    Vec3 const left(-u.y(), u.x(), 0.0);
    Vec3 const mid = c1.center + a * u;
    return KernelResult<PointPair>::ok({mid + h * left, mid - h * left}, cond);
}

inline KernelResult<Vec3> intersect_line_plane(const LineCoords& l, const PlaneCoords& p, double degen_tol) {
    double const c = l.dir.dot(p.normal);
    if (std::abs(c) < degen_tol) return KernelResult<Vec3>::degenerate("line parallel to plane", std::abs(c));
    double const t = (p.point - l.point).dot(p.normal) / c;
    return KernelResult<Vec3>::ok(l.point + t * l.dir, std::abs(c));
}

inline KernelResult<LineCoords> intersect_planes(const PlaneCoords& p1, const PlaneCoords& p2, double degen_tol) {
    Vec3 const u = p1.normal.cross(p2.normal);
    double const s = u.norm();
    if (s < degen_tol) return KernelResult<LineCoords>::degenerate("parallel planes", s);
    double const d1 = p1.normal.dot(p1.point);
    double const d2 = p2.normal.dot(p2.point);
    Vec3 const point = (d1 * p2.normal.cross(u) + d2 * u.cross(p1.normal)) / (s * s);
    return KernelResult<LineCoords>::ok(LineCoords{point, u / s}, s);
}

inline KernelResult<Vec3> circumcenter_coords(const Vec3& a, const Vec3& b, const Vec3& c, double degen_tol) {
    double const cond = detail::triangle_conditioning(a, b, c);
    if (cond < degen_tol) return KernelResult<Vec3>::degenerate("collinear triangle", cond);
    Vec3 const u = b - a;
    Vec3 const v = c - a;
    Vec3 const w = u.cross(v);
    Vec3 const off = (u.squaredNorm() * v.cross(w) + v.squaredNorm() * w.cross(u)) / (2.0 * w.squaredNorm());
    return KernelResult<Vec3>::ok(a + off, cond);
}

inline KernelResult<Vec3> incenter_coords(const Vec3& a, const Vec3& b, const Vec3& c, double degen_tol) {
    double const cond = detail::triangle_conditioning(a, b, c);
    if (cond < degen_tol) return KernelResult<Vec3>::degenerate("collinear triangle", cond);
    double const la = (c - b).norm();
    double const lb = (a - c).norm();
    double const lc = (b - a).norm();
    return KernelResult<Vec3>::ok((la * a + lb * b + lc * c) / (la + lb + lc), cond);
}

inline KernelResult<Vec3> centroid_coords(const Vec3& a, const Vec3& b, const Vec3& c, double degen_tol) {
    double const cond = detail::triangle_conditioning(a, b, c);
    if (cond < degen_tol) return KernelResult<Vec3>::degenerate("collinear triangle", cond);
    return KernelResult<Vec3>::ok((a + b + c) / 3.0, cond);
}

inline KernelResult<Vec3> orthocenter_coords(const Vec3& a, const Vec3& b, const Vec3& c, double degen_tol) {
    auto o = circumcenter_coords(a, b, c, degen_tol);
    if (!o) return o;
    // Euler: H - O = (A - O) + (B - O) + (C - O).
    return KernelResult<Vec3>::ok(a + b + c - 2.0 * *o, o.conditioning());
}

inline KernelResult<Vec3> foot_coords(const Vec3& a, const LineCoords& l) {
    return KernelResult<Vec3>::ok(l.point + (a - l.point).dot(l.dir) * l.dir);
}

inline KernelResult<LineCoords> perpendicular_through(const Vec3& a, const LineCoords& l) {
    Vec3 const d(-l.dir.y(), l.dir.x(), 0.0);
    double const n = d.norm();
    if (n == 0.0) return KernelResult<LineCoords>::degenerate("line not planar");
    return KernelResult<LineCoords>::ok(LineCoords{a, d / n}, n);
}

inline KernelResult<LineCoords> parallel_through(const Vec3& a, const LineCoords& l) {
    return KernelResult<LineCoords>::ok(LineCoords{a, l.dir});
}

/// Internal bisector of angle a-b-c at vertex b.
inline KernelResult<LineCoords> bisector_coords(const Vec3& a, const Vec3& b, const Vec3& c, double degen_tol) {
    Vec3 const u = a - b;
    Vec3 const v = c - b;
    double const scale = degen_tol * detail::point_scale({a, b, c});
    if (u.norm() < scale || v.norm() < scale) return KernelResult<LineCoords>::degenerate("coincident points");
    Vec3 const s = u.normalized() + v.normalized();
    double const cond = s.norm() / 2.0;
    if (cond < degen_tol) return KernelResult<LineCoords>::degenerate("straight angle", cond);
    return KernelResult<LineCoords>::ok(LineCoords{b, s.normalized()}, cond);
}

}  // namespace geoform::geom
