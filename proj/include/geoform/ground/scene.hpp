#pragma once

#include <algorithm>
#include <array>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "geoform/core/error.hpp"
#include "geoform/dimension/concepts.hpp"
#include "geoform/index/declaration.hpp"

namespace geoform::ground {

using json = nlohmann::ordered_json;

enum class PrimitiveKind { point, line, region };

inline std::string_view to_string(PrimitiveKind k) {
    switch (k) {
    case PrimitiveKind::point: return "point";
    case PrimitiveKind::line: return "line";
    case PrimitiveKind::region: return "region";
    }
    return "?";
}

/// The closed relation vocabulary of scene files.
inline constexpr std::array<std::string_view, 9> relation_vocabulary{
    "adjacent", "parallel", "perpendicular", "contained_in", "incident",
    "equal_length", "connected", "acts_on", "opposite"};

inline bool known_relation(std::string_view r) {
    return std::find(relation_vocabulary.begin(), relation_vocabulary.end(), r) != relation_vocabulary.end();
}

struct ScenePrimitive {
    std::string id;
    PrimitiveKind kind = PrimitiveKind::point;
    std::string label;  // initial hypothesis
    std::map<std::string, std::string> attributes;
};

struct SceneRelation {
    std::string a;
    std::string b;
    std::string relation;
};

struct SceneGraph {
    std::string name;
    dim::Domain domain = dim::Domain::math;
    std::string problem;
    std::vector<std::string> roots;  // informal statements of the root node
    std::vector<ScenePrimitive> primitives;
    std::vector<SceneRelation> relations;
    std::map<std::string, double> quantities;
    std::string unit;                // display unit for evaluated formulas
    std::vector<std::string> rules;  // extra grounding rules, same syntax as the rule file
    bool construction_described = false;

    const ScenePrimitive* find(std::string_view id) const {
        for (const auto& p : primitives) {
            if (p.id == id) return &p;
        }
        return nullptr;
    }
    bool has(std::string_view id) const { return find(id) != nullptr; }

    std::vector<std::string> ids() const {
        std::vector<std::string> out;
        for (const auto& p : primitives) out.push_back(p.id);
        return out;
    }

    std::size_t count(PrimitiveKind k) const {
        return static_cast<std::size_t>(
            std::count_if(primitives.begin(), primitives.end(), [k](const auto& p) { return p.kind == k; }));
    }
};

namespace detail {

[[noreturn]] inline void scene_fail(const std::string& msg) { throw Error(ErrorCode::scene_parse_error, msg); }

inline std::string attr_string(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
}

}  // namespace detail

/// Validates and converts a parsed scene document.
inline SceneGraph scene_from_json(const json& j) {
    using detail::scene_fail;
    if (!j.is_object()) scene_fail("scene must be a JSON object");
    SceneGraph g;
    try {
        g.name = j.value("scene", "");
        g.domain = dim::parse_domain(j.value("domain", "math"));
        g.problem = j.value("problem", "");
        if (j.contains("root")) {
            const auto& r = j.at("root");
            if (r.is_string()) g.roots.push_back(r.get<std::string>());
            else
                for (const auto& s : r) g.roots.push_back(s.get<std::string>());
        }
        if (g.roots.empty()) scene_fail("scene needs at least one root statement");

        std::set<std::string> seen;
        for (const auto& p : j.value("primitives", json::array())) {
            ScenePrimitive sp;
            sp.id = p.at("id").get<std::string>();
            if (sp.id.empty()) scene_fail("empty primitive id");
            if (!seen.insert(sp.id).second) scene_fail("duplicate primitive id '" + sp.id + "'");
            auto kind = p.at("kind").get<std::string>();
            if (kind == "point") sp.kind = PrimitiveKind::point;
            else if (kind == "line") sp.kind = PrimitiveKind::line;
            else if (kind == "region") sp.kind = PrimitiveKind::region;
            else scene_fail("primitive '" + sp.id + "' has kind '" + kind + "' (expected point, line or region)");
            sp.label = p.value("label", "");
            json const attrs = p.value("attributes", json::object());
            for (const auto& [k, v] : attrs.items()) {
                sp.attributes[k] = detail::attr_string(v);
            }
            g.primitives.push_back(std::move(sp));
        }
        for (const auto& r : j.value("relations", json::array())) {
            if (!r.is_array() || r.size() != 3) scene_fail("relation must be [a, b, relation]");
            SceneRelation rel{r[0].get<std::string>(), r[1].get<std::string>(), r[2].get<std::string>()};
            if (!known_relation(rel.relation)) {
                throw Error(ErrorCode::unknown_relation, "unknown relation '" + rel.relation + "'");
            }
            for (const auto* end : {&rel.a, &rel.b}) {
                if (!seen.count(*end)) {
                    throw Error(ErrorCode::dangling_reference,
                                "relation " + rel.relation + " references missing primitive '" + *end + "'");
                }
            }
            g.relations.push_back(std::move(rel));
        }
        json const quantities = j.value("quantities", json::object());
        for (const auto& [k, v] : quantities.items()) g.quantities[k] = v.get<double>();
        g.unit = j.value("unit", "");
        if (!g.unit.empty() && !g.quantities.count(g.unit)) scene_fail("display unit '" + g.unit + "' has no quantity");
        for (const auto& r : j.value("rules", json::array())) g.rules.push_back(r.get<std::string>());
        g.construction_described = j.value("construction_described", false);
    } catch (const json::exception& e) {
        scene_fail(e.what());
    }
    return g;
}

inline SceneGraph parse_scene(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::scene_parse_error, e.what());
    }
    return scene_from_json(j);
}

inline SceneGraph load_scene(const std::filesystem::path& path) { return parse_scene(index::read_text(path)); }

inline json to_json(const SceneGraph& g) {
    json j;
    j["scene"] = g.name;
    j["domain"] = dim::to_string(g.domain);
    j["problem"] = g.problem;
    j["root"] = g.roots;
    json prims = json::array();
    for (const auto& p : g.primitives) {
        json pj{{"id", p.id}, {"kind", to_string(p.kind)}, {"label", p.label}};
        if (!p.attributes.empty()) pj["attributes"] = p.attributes;
        prims.push_back(std::move(pj));
    }
    j["primitives"] = std::move(prims);
    json rels = json::array();
    for (const auto& r : g.relations) rels.push_back(json::array({r.a, r.b, r.relation}));
    j["relations"] = std::move(rels);
    if (!g.quantities.empty()) j["quantities"] = g.quantities;
    if (!g.unit.empty()) j["unit"] = g.unit;
    if (!g.rules.empty()) j["rules"] = g.rules;
    if (g.construction_described) j["construction_described"] = true;
    return j;
}

}  // namespace geoform::ground
