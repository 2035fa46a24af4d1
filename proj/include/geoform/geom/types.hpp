#pragma once

#include <algorithm>
#include <cmath>
#include <iterator>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "geoform/core/error.hpp"
#include "geoform/core/ids.hpp"

namespace geoform::geom {

using Vec3 = Eigen::Vector3d;

enum class ObjectKind { point, line, circle, plane };

constexpr std::string_view to_string(ObjectKind kind) {
    switch (kind) {
    case ObjectKind::point: return "point";
    case ObjectKind::line: return "line";
    case ObjectKind::circle: return "circle";
    case ObjectKind::plane: return "plane";
    }
    return "?";
}

inline std::optional<ObjectKind> parse_kind(std::string_view s) {
    if (s == "point") return ObjectKind::point;
    if (s == "line") return ObjectKind::line;
    if (s == "circle") return ObjectKind::circle;
    if (s == "plane") return ObjectKind::plane;
    return std::nullopt;
}

/// A symbolic object. `step` is the index of the construction step that
/// introduced it.
struct GeoObject {
    std::string id;
    ObjectKind kind = ObjectKind::point;
    std::size_t step = 0;
};

struct Tolerance {
    double eq_tol = 1e-9;
    double degen_tol = 1e-7;

    bool valid() const { return 0.0 < eq_tol && eq_tol < degen_tol && degen_tol < 1.0; }
};

struct PointCoords {
    Vec3 p = Vec3::Zero();
};

/// Point plus unit direction.
struct LineCoords {
    Vec3 point = Vec3::Zero();
    Vec3 dir = Vec3::UnitX();
};

/// Planar circle in the z = 0 plane.
struct CircleCoords {
    Vec3 center = Vec3::Zero();
    double radius = 1.0;
};

/// Point plus unit normal.
struct PlaneCoords {
    Vec3 point = Vec3::Zero();
    Vec3 normal = Vec3::UnitZ();
};

using Coords = std::variant<PointCoords, LineCoords, CircleCoords, PlaneCoords>;

inline ObjectKind kind_of(const Coords& c) { return static_cast<ObjectKind>(c.index()); }

struct Realization {
    int space_dim = 2;
    std::map<std::string, Coords, ShortlexLess> coords;

    bool has(std::string_view id) const { return coords.find(std::string(id)) != coords.end(); }

    const Coords& at(std::string_view id) const {
        auto it = coords.find(std::string(id));
        if (it == coords.end()) {
            throw Error(ErrorCode::missing_coordinates, "no coordinates for '" + std::string(id) + "'");
        }
        return it->second;
    }

    template <typename T>
    const T& get(std::string_view id) const {
        const auto& c = at(id);
        if (auto const* v = std::get_if<T>(&c)) {
            return *v;
        }
        throw Error(ErrorCode::arity_mismatch, "object '" + std::string(id) + "' has kind " +
                                                   std::string(to_string(kind_of(c))));
    }

    const Vec3& point(std::string_view id) const { return get<PointCoords>(id).p; }

    /// Largest pairwise distance between realized points; 1 when fewer than
    /// two points exist.
    double characteristic_length() const {
        double best = 0.0;
        for (auto i = coords.begin(); i != coords.end(); ++i) {
            auto const* p = std::get_if<PointCoords>(&i->second);
            if (!p) continue;
            for (auto j = std::next(i); j != coords.end(); ++j) {
                if (auto const* q = std::get_if<PointCoords>(&j->second)) {
                    best = std::max(best, (p->p - q->p).norm());
                }
            }
        }
        return best > 0.0 ? best : 1.0;
    }

    /// Checks the unit-vector and positive-radius invariants.
    bool well_formed(double tol = 1e-9) const {
        for (const auto& [id, c] : coords) {
            if (auto const* l = std::get_if<LineCoords>(&c)) {
                if (std::abs(l->dir.norm() - 1.0) > tol) return false;
            } else if (auto const* pl = std::get_if<PlaneCoords>(&c)) {
                if (std::abs(pl->normal.norm() - 1.0) > tol) return false;
            } else if (auto const* ci = std::get_if<CircleCoords>(&c)) {
                if (!(ci->radius > 0.0)) return false;
            }
        }
        return true;
    }
};

}  // namespace geoform::geom
