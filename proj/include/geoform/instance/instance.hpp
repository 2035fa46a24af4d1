#pragma once

#include <algorithm>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "geoform/construct/program.hpp"
#include "geoform/construct/realize.hpp"
#include "geoform/construct/sampler.hpp"
#include "geoform/core/dot.hpp"
#include "geoform/core/error.hpp"
#include "geoform/core/rng.hpp"
#include "geoform/deduce/closure.hpp"
#include "geoform/geom/eval.hpp"

namespace geoform::instance {

using construct::Limits;
using construct::Program;
using deduce::DerivationGraph;
using geom::Fact;
using json = nlohmann::ordered_json;

/// One rule application kept in an instance trace.
struct TraceStep {
    std::string rule;
    std::vector<Fact> premises;
    Fact conclusion;

    friend bool operator==(const TraceStep& a, const TraceStep& b) {
        return a.rule == b.rule && a.premises == b.premises && a.conclusion == b.conclusion;
    }
};

struct Extraction {
    std::vector<Fact> premises;  // sorted
    std::vector<TraceStep> trace;
    /// Some fact on the trace had more derivations than were stored.
    bool truncated = false;
};

/// Picks a derived, non-asserted fact with at least one recorded
/// derivation, uniformly (reservoir sampling over canonical order).
inline Fact select_goal(const DerivationGraph& g, const std::vector<Fact>& asserted, Rng& rng) {
    std::set<Fact> const roots(asserted.begin(), asserted.end());
    std::vector<Fact> candidates;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (g.is_root(i) || roots.count(g.fact(i)) || g.derivations(i).empty()) continue;
        candidates.push_back(g.fact(i));
    }
    std::sort(candidates.begin(), candidates.end());
    if (candidates.empty()) throw Error(ErrorCode::no_derived_goal, "closure adds nothing beyond asserted facts");
    std::optional<Fact> chosen;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (rng.index(i + 1) == 0) chosen = candidates[i];
    }
    return *chosen;
}

/// Walks every stored derivation backward from `goal`. Premises are the
/// root facts reached; the trace holds every rule application visited.
inline Extraction extract_premises(const DerivationGraph& g, const Fact& goal) {
    auto gid = g.id_of(goal);
    if (!gid) throw Error(ErrorCode::goal_not_in_graph, goal.str() + " is not in the derivation graph");
    Extraction ex;
    if (g.is_root(*gid)) {
        ex.premises = {goal};
        return ex;
    }
    std::set<std::size_t> seen{*gid};
    std::deque<std::size_t> queue{*gid};
    std::set<Fact> premises;
    std::vector<std::pair<std::size_t, TraceStep>> steps;
    while (!queue.empty()) {
        auto const id = queue.front();
        queue.pop_front();
        if (g.is_root(id)) {
            premises.insert(g.fact(id));
            continue;
        }
        ex.truncated = ex.truncated || g.truncated(id);
        for (const auto& d : g.derivations(id)) {
            TraceStep s{g.rule_names().at(d.rule), {}, g.fact(id)};
            for (auto p : d.premises) {
                s.premises.push_back(g.fact(p));
                if (seen.insert(p).second) queue.push_back(p);
            }
            steps.emplace_back(id, std::move(s));
        }
    }
    std::stable_sort(steps.begin(), steps.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (auto& [id, s] : steps) ex.trace.push_back(std::move(s));
    ex.premises.assign(premises.begin(), premises.end());
    return ex;
}

/// Steps needed to construct every id in `ids`, plus their ancestors.
inline Program prune_program(const Program& p, const std::set<std::string>& ids) {
    std::set<std::string> needed(ids.begin(), ids.end());
    std::vector<bool> keep(p.steps.size(), false);
    for (std::size_t i = p.steps.size(); i-- > 0;) {
        const auto& s = p.steps[i];
        bool const used = std::any_of(s.outputs.begin(), s.outputs.end(), [&](const auto& o) { return needed.count(o); });
        if (!used) continue;
        keep[i] = true;
        needed.insert(s.inputs.begin(), s.inputs.end());
    }
    Program out;
    out.limits = p.limits;
    for (std::size_t i = 0; i < p.steps.size(); ++i) {
        if (keep[i]) out.steps.push_back(p.steps[i]);
    }
    return out;
}

enum class RejectKind { degenerate_step, fact_violated, resamples_exhausted };

inline std::string_view to_string(RejectKind k) {
    switch (k) {
    case RejectKind::degenerate_step: return "DegenerateStep";
    case RejectKind::fact_violated: return "FactViolated";
    case RejectKind::resamples_exhausted: return "ResamplesExhausted";
    }
    return "?";
}

struct Verification {
    bool verified = false;
    geom::Realization realization;
    std::size_t attempts = 0;
    RejectKind reject = RejectKind::resamples_exhausted;
    std::optional<std::size_t> step;  // for DegenerateStep
    std::optional<Fact> fact;         // for FactViolated

    std::string reason() const {
        if (verified) return "Verified";
        std::string out(to_string(reject));
        if (step) out += "(" + std::to_string(*step) + ")";
        if (fact) out += "(" + fact->str() + ")";
        return out;
    }
};

/// Near-degenerate margin: every step's conditioning must exceed this
/// multiple of degen_tol.
inline constexpr double verification_margin = 10.0;

/// Realizes the program from `seed` and checks premises and goal. Each
/// failed attempt redraws the free points with a derived seed, up to
/// `max_resamples` attempts.
inline Verification verify_numeric(const Program& program, const std::vector<Fact>& premises, const Fact& goal,
                                   std::uint64_t seed, const geom::Tolerance& tol, std::size_t max_resamples) {
    Verification v;
    std::optional<Fact> violated;
    std::optional<std::size_t> degenerate_step;
    bool same_step = true;
    for (std::size_t k = 0; k < max_resamples; ++k) {
        ++v.attempts;
        Rng rng(derive_seed(seed, k));
        auto res = construct::realize(program, rng, tol, verification_margin);
        if (!res.ok) {
            if (degenerate_step && *degenerate_step != *res.failed_step) same_step = false;
            degenerate_step = res.failed_step;
            continue;
        }
        std::optional<Fact> bad;
        for (const auto& f : premises) {
            if (!geom::eval_fact(f, res.realization, tol)) {
                bad = f;
                break;
            }
        }
        if (!bad && !geom::eval_fact(goal, res.realization, tol)) bad = goal;
        if (bad) {
            if (!violated) violated = bad;
            continue;
        }
        v.verified = true;
        v.realization = std::move(res.realization);
        return v;
    }
    if (violated) {
        v.reject = RejectKind::fact_violated;
        v.fact = violated;
    } else if (degenerate_step && same_step) {
        v.reject = RejectKind::degenerate_step;
        v.step = degenerate_step;
    }
    return v;
}

struct Instance {
    std::uint64_t seed = 0;
    Program program;
    std::vector<Fact> premises;
    Fact goal;
    std::vector<TraceStep> trace;
    geom::Realization realization;
    json meta = json::object();
};

struct GenerateOptions {
    Limits limits;
    geom::Tolerance tol;
    construct::OperatorWeights weights = construct::uniform_weights();
    std::size_t max_restarts = 200;
};

inline TraceStep rename_step(const TraceStep& s, const std::map<std::string, std::string>& names) {
    TraceStep out{s.rule, {}, construct::rename_fact(s.conclusion, names)};
    for (const auto& p : s.premises) out.premises.push_back(construct::rename_fact(p, names));
    return out;
}

/// Full loop: sample, assert, close, pick a goal, extract premises, prune
/// and canonicalize, verify. Any failing stage restarts with a fresh
/// sub-seed; after max_restarts, GenerationExhausted.
inline Instance generate(std::uint64_t seed, const std::vector<deduce::Rule>& rules, const GenerateOptions& opts = {}) {
    opts.limits.check();
    std::map<std::string, std::size_t> failures;
    for (std::size_t restart = 0; restart < opts.max_restarts; ++restart) {
        Rng rng(derive_seed(seed, restart));
        Rng sample_rng = rng.split(1);
        Rng goal_rng = rng.split(2);
        Program program;
        try {
            program = construct::sample_program(sample_rng, opts.limits, opts.weights);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::sampling_exhausted) throw;
            ++failures["sampling"];
            continue;
        }
        auto const asserted = construct::asserted_facts(program);
        deduce::ClosureOptions copts;
        copts.planar = program.mode() != construct::SpaceMode::spatial;
        auto const graph = deduce::closure(asserted, rules, copts);
        Fact goal;
        try {
            goal = select_goal(graph, asserted, goal_rng);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::no_derived_goal) throw;
            ++failures["no_goal"];
            continue;
        }
        auto ex = extract_premises(graph, goal);

        std::set<std::string> ids;
        for (const auto& f : ex.premises) {
            auto s = f.ids();
            ids.insert(s.begin(), s.end());
        }
        auto g_ids = goal.ids();
        ids.insert(g_ids.begin(), g_ids.end());
        auto canon = construct::canonicalize(prune_program(program, ids));

        Instance inst;
        inst.seed = seed;
        inst.program = std::move(canon.program);
        for (const auto& f : ex.premises) inst.premises.push_back(construct::rename_fact(f, canon.renaming));
        std::sort(inst.premises.begin(), inst.premises.end());
        inst.goal = construct::rename_fact(goal, canon.renaming);
        for (const auto& s : ex.trace) inst.trace.push_back(rename_step(s, canon.renaming));

        auto v = verify_numeric(inst.program, inst.premises, inst.goal, rng.split(3).seed(), opts.tol,
                                opts.limits.max_resamples);
        if (!v.verified) {
            ++failures["verification"];
            continue;
        }
        inst.realization = std::move(v.realization);
        inst.meta["restarts"] = restart;
        inst.meta["verify_attempts"] = v.attempts;
        inst.meta["closure_size"] = graph.size();
        inst.meta["asserted"] = asserted.size();
        inst.meta["derivations_truncated"] = ex.truncated;
        return inst;
    }
    std::string detail;
    for (const auto& [k, n] : failures) detail += " " + k + "=" + std::to_string(n);
    throw Error(ErrorCode::generation_exhausted,
                std::to_string(opts.max_restarts) + " restarts without a verified instance;" + detail);
}

// ---- serialization ------------------------------------------------------

inline json vec_json(const geom::Vec3& v, int dim) {
    json a = json::array();
    for (int i = 0; i < dim; ++i) a.push_back(v[i]);
    return a;
}

inline geom::Vec3 vec_from_json(const json& a) {
    geom::Vec3 v = geom::Vec3::Zero();
    for (std::size_t i = 0; i < a.size() && i < 3; ++i) v[static_cast<int>(i)] = a.at(i).get<double>();
    return v;
}

inline json realization_json(const geom::Realization& r) {
    json coords = json::object();
    int const d = r.space_dim;
    for (const auto& [id, c] : r.coords) {
        json o;
        if (auto const* p = std::get_if<geom::PointCoords>(&c)) {
            o["kind"] = "point";
            o["p"] = vec_json(p->p, d);
        } else if (auto const* l = std::get_if<geom::LineCoords>(&c)) {
            o["kind"] = "line";
            o["point"] = vec_json(l->point, d);
            o["dir"] = vec_json(l->dir, d);
        } else if (auto const* ci = std::get_if<geom::CircleCoords>(&c)) {
            o["kind"] = "circle";
            o["center"] = vec_json(ci->center, d);
            o["radius"] = ci->radius;
        } else if (auto const* pl = std::get_if<geom::PlaneCoords>(&c)) {
            o["kind"] = "plane";
            o["point"] = vec_json(pl->point, d);
            o["normal"] = vec_json(pl->normal, d);
        }
        coords[id] = std::move(o);
    }
    json out;
    out["space_dim"] = d;
    out["coords"] = std::move(coords);
    return out;
}

inline geom::Realization realization_from_json(const json& j) {
    geom::Realization r;
    r.space_dim = j.at("space_dim").get<int>();
    for (const auto& [id, o] : j.at("coords").items()) {
        auto kind = o.at("kind").get<std::string>();
        if (kind == "point") {
            r.coords[id] = geom::PointCoords{vec_from_json(o.at("p"))};
        } else if (kind == "line") {
            r.coords[id] = geom::LineCoords{vec_from_json(o.at("point")), vec_from_json(o.at("dir"))};
        } else if (kind == "circle") {
            r.coords[id] = geom::CircleCoords{vec_from_json(o.at("center")), o.at("radius").get<double>()};
        } else if (kind == "plane") {
            r.coords[id] = geom::PlaneCoords{vec_from_json(o.at("point")), vec_from_json(o.at("normal"))};
        } else {
            throw Error(ErrorCode::syntax_error, "unknown object kind '" + kind + "'");
        }
    }
    return r;
}

inline json facts_json(const std::vector<Fact>& facts) {
    json a = json::array();
    for (const auto& f : facts) a.push_back(f.str());
    return a;
}

/// Field order is fixed: seed, dsl, premises, goal, trace, realization, meta.
inline json to_json(const Instance& inst) {
    json j;
    j["seed"] = inst.seed;
    j["dsl"] = construct::serialize(inst.program);
    j["premises"] = facts_json(inst.premises);
    j["goal"] = inst.goal.str();
    json trace = json::array();
    for (const auto& s : inst.trace) {
        json t;
        t["rule"] = s.rule;
        t["premises"] = facts_json(s.premises);
        t["conclusion"] = s.conclusion.str();
        trace.push_back(std::move(t));
    }
    j["trace"] = std::move(trace);
    j["realization"] = realization_json(inst.realization);
    j["meta"] = inst.meta;
    return j;
}

inline Instance from_json(const json& j, const Limits& limits = {}) {
    Instance inst;
    inst.seed = j.at("seed").get<std::uint64_t>();
    inst.program = construct::parse_program(j.at("dsl").get<std::string>(), limits);
    auto kinds = inst.program.kind_lookup();
    for (const auto& f : j.at("premises")) inst.premises.push_back(geom::parse_fact(f.get<std::string>(), kinds));
    inst.goal = geom::parse_fact(j.at("goal").get<std::string>(), kinds);
    for (const auto& t : j.at("trace")) {
        TraceStep s;
        s.rule = t.at("rule").get<std::string>();
        for (const auto& f : t.at("premises")) s.premises.push_back(geom::parse_fact(f.get<std::string>(), kinds));
        s.conclusion = geom::parse_fact(t.at("conclusion").get<std::string>(), kinds);
        inst.trace.push_back(std::move(s));
    }
    if (j.contains("realization")) inst.realization = realization_from_json(j.at("realization"));
    if (j.contains("meta")) inst.meta = j.at("meta");
    return inst;
}

/// Trace as a DOT digraph: premises as boxes, derived facts as ellipses.
inline std::string trace_dot(const Instance& inst) {
    DotWriter w("trace");
    w.graph_attr("rankdir", "LR");
    std::map<std::string, std::string> node_ids;
    std::set<std::string> const premises = [&] {
        std::set<std::string> s;
        for (const auto& f : inst.premises) s.insert(f.str());
        return s;
    }();
    auto node = [&](const Fact& f) {
        auto key = f.str();
        auto it = node_ids.find(key);
        if (it != node_ids.end()) return it->second;
        auto id = "f" + std::to_string(node_ids.size());
        node_ids.emplace(key, id);
        DotWriter::Attrs attrs{{"label", key}, {"shape", premises.count(key) ? "box" : "ellipse"}};
        if (f == inst.goal) attrs.emplace_back("peripheries", "2");
        w.node(id, attrs);
        return id;
    };
    for (const auto& f : inst.premises) node(f);
    node(inst.goal);
    for (const auto& s : inst.trace) {
        auto to = node(s.conclusion);
        for (const auto& p : s.premises) w.edge(node(p), to, {{"label", s.rule}});
    }
    return w.str();
}

}  // namespace geoform::instance
