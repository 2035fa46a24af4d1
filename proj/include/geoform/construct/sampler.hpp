#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "geoform/construct/program.hpp"
#include "geoform/core/error.hpp"
#include "geoform/core/rng.hpp"

namespace geoform::construct {

/// Relative operator weights; operators absent from the map get weight 0.
using OperatorWeights = std::map<std::string, double>;

inline OperatorWeights uniform_weights() {
    OperatorWeights w;
    for (const auto& op : operator_table()) w[std::string(op.name)] = 1.0;
    return w;
}

namespace detail {

/// Incidence knowledge that follows symbolically from the steps so far.
/// Used to reject steps that are degenerate for every realization.
class SymbolicState {
  public:
    void record(const Step& s) {
        const auto& in = s.inputs;
        const auto& out = s.outputs;
        const auto& op = s.op;
        if (op == "line") {
            line_points[out[0]] = {in[0], in[1]};
            line_class[out[0]] = new_class();
        } else if (op == "circle") {
            circle_center[out[0]] = in[0];
            circle_points[out[0]] = {in[1]};
        } else if (op == "line_line_intersection") {
            for (const auto& l : in) line_points[l].insert(out[0]);
        } else if (op == "line_circle_intersection") {
            for (const auto& x : out) {
                line_points[in[0]].insert(x);
                circle_points[in[1]].insert(x);
            }
        } else if (op == "circle_circle_intersection") {
            for (const auto& x : out) {
                circle_points[in[0]].insert(x);
                circle_points[in[1]].insert(x);
            }
        } else if (op == "line_plane_intersection") {
            line_points[in[0]].insert(out[0]);
        } else if (op == "plane_plane_intersection") {
            line_class[out[0]] = new_class();
        } else if (op == "midpoint") {
            triples.push_back({out[0], in[0], in[1]});
        } else if (op == "perpendicular_line") {
            line_points[out[0]] = {in[0]};
            line_class[out[0]] = perp_of(line_class[in[1]]);
        } else if (op == "parallel_line") {
            line_points[out[0]] = {in[0]};
            line_class[out[0]] = line_class[in[1]];
        } else if (op == "foot_of_perpendicular") {
            line_points[in[1]].insert(out[0]);
        } else if (op == "angle_bisector") {
            line_points[out[0]] = {in[1]};
            line_class[out[0]] = new_class();
        }
        auto key = s.op;
        auto ins = s.inputs;
        if (find_operator(s.op)->symmetry != InputSymmetry::none) std::sort(ins.begin(), ins.end());
        for (const auto& i : ins) key += " " + i;
        seen_steps.insert(key);
    }

    /// True when the step would be degenerate or duplicate an earlier one.
    bool rejects(const Step& s) const {
        const auto& in = s.inputs;
        const auto& op = s.op;
        auto key = s.op;
        auto ins = s.inputs;
        if (find_operator(s.op)->symmetry != InputSymmetry::none) std::sort(ins.begin(), ins.end());
        for (const auto& i : ins) key += " " + i;
        if (!in.empty() && seen_steps.count(key)) return true;
        if (needs_triangle(op) && known_collinear(in[0], in[1], in[2])) return true;
        if (op == "line") return on_common_line(in[0], in[1]);
        if (op == "line_line_intersection") {
            if (class_of(in[0]) == class_of(in[1])) return true;
            return shares(points_of(line_points, in[0]), points_of(line_points, in[1]));
        }
        if (op == "line_circle_intersection") {
            return shares(points_of(line_points, in[0]), points_of(circle_points, in[1]));
        }
        if (op == "circle_circle_intersection") {
            if (circle_center.at(in[0]) == circle_center.at(in[1])) return true;
            return shares(points_of(circle_points, in[0]), points_of(circle_points, in[1]));
        }
        if (op == "parallel_line" || op == "foot_of_perpendicular") {
            return points_of(line_points, in[1]).count(in[0]) > 0;
        }
        return false;
    }

  private:
    static const std::set<std::string>& points_of(const std::map<std::string, std::set<std::string>>& m,
                                                  const std::string& id) {
        static const std::set<std::string> empty;
        auto it = m.find(id);
        return it == m.end() ? empty : it->second;
    }

    static bool shares(const std::set<std::string>& a, const std::set<std::string>& b) {
        return std::any_of(a.begin(), a.end(), [&](const auto& x) { return b.count(x) > 0; });
    }

    bool on_common_line(const std::string& a, const std::string& b) const {
        for (const auto& [l, pts] : line_points) {
            if (pts.count(a) && pts.count(b)) return true;
        }
        for (const auto& t : triples) {
            if (std::count(t.begin(), t.end(), a) && std::count(t.begin(), t.end(), b)) return true;
        }
        return false;
    }

    bool known_collinear(const std::string& a, const std::string& b, const std::string& c) const {
        for (const auto& [l, pts] : line_points) {
            if (pts.count(a) && pts.count(b) && pts.count(c)) return true;
        }
        for (const auto& t : triples) {
            std::set<std::string> ts(t.begin(), t.end());
            if (ts.count(a) && ts.count(b) && ts.count(c)) return true;
        }
        return false;
    }

    int class_of(const std::string& l) const {
        auto it = line_class.find(l);
        return it == line_class.end() ? -1 : it->second;
    }

    int new_class() { return next_class++; }

    int perp_of(int c) {
        auto it = perp.find(c);
        if (it != perp.end()) return it->second;
        int const d = new_class();
        perp[c] = d;
        perp[d] = c;
        return d;
    }

    std::map<std::string, std::set<std::string>> line_points;
    std::map<std::string, std::set<std::string>> circle_points;
    std::map<std::string, std::string> circle_center;
    std::vector<std::vector<std::string>> triples;
    std::map<std::string, int> line_class;
    std::map<int, int> perp;
    std::set<std::string> seen_steps;
    int next_class = 0;
};

}  // namespace detail

/// Samples a program of up to max_steps steps. Each step draws an operator
/// by weight among those whose inputs are available and whose outputs fit
/// the object budget, then draws distinct inputs. Steps that are
/// symbolically degenerate are redrawn; after max_resamples redraws in
/// total, SamplingExhausted is thrown. The result is canonical.
inline Program sample_program(Rng& rng, const Limits& limits, const OperatorWeights& weights = uniform_weights()) {
    limits.check();
    Program p;
    p.limits = limits;
    detail::SymbolicState state;
    std::map<ObjectKind, std::vector<std::string>> pool;
    std::size_t objects = 0;
    std::size_t rejections = 0;
    SpaceMode mode = SpaceMode::any;

    while (p.steps.size() < limits.max_steps) {
        std::vector<const OperatorSpec*> feasible;
        std::vector<double> cumulative;
        double total = 0.0;
        for (const auto& op : operator_table()) {
            auto w = weights.find(std::string(op.name));
            if (w == weights.end() || !(w->second > 0.0)) continue;
            if (objects + op.outputs.size() > limits.max_objects) continue;
            if ((mode == SpaceMode::planar && op.mode == SpaceMode::spatial) ||
                (mode == SpaceMode::spatial && op.mode == SpaceMode::planar)) {
                continue;
            }
            std::map<ObjectKind, std::size_t> need;
            for (auto k : op.inputs) ++need[k];
            bool ok = true;
            for (auto [k, n] : need) ok = ok && pool[k].size() >= n;
            if (!ok) continue;
            feasible.push_back(&op);
            total += w->second;
            cumulative.push_back(total);
        }
        if (feasible.empty()) break;

        double const x = rng.uniform01() * total;
        auto const pick = static_cast<std::size_t>(std::upper_bound(cumulative.begin(), cumulative.end(), x) -
                                                   cumulative.begin());
        const auto& op = *feasible[std::min(pick, feasible.size() - 1)];

        Step s;
        s.op = std::string(op.name);
        std::map<ObjectKind, std::vector<std::string>> avail = pool;
        for (auto k : op.inputs) {
            auto& v = avail[k];
            auto const i = rng.index(v.size());
            s.inputs.push_back(v[i]);
            v.erase(v.begin() + static_cast<std::ptrdiff_t>(i));
        }
        if (state.rejects(s)) {
            if (++rejections >= limits.max_resamples) {
                throw Error(ErrorCode::sampling_exhausted,
                            std::to_string(rejections) + " rejected steps while sampling a construction");
            }
            continue;
        }
        for (auto k : op.outputs) {
            auto id = object_name(objects++);
            pool[k].push_back(id);
            s.outputs.push_back(id);
        }
        if (op.mode != SpaceMode::any) mode = op.mode;
        state.record(s);
        p.steps.push_back(std::move(s));
    }
    return canonicalize(p).program;
}

}  // namespace geoform::construct
