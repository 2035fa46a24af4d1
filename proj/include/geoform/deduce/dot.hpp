#pragma once

#include <optional>
#include <set>
#include <string>

#include "geoform/core/dot.hpp"
#include "geoform/deduce/closure.hpp"

namespace geoform::deduce {

/// Renders facts as nodes (roots as boxes) and each stored derivation as
/// premise -> conclusion edges labelled with the rule name. When `only` is
/// given, facts outside it are omitted.
inline std::string to_dot(const DerivationGraph& g, const std::optional<std::set<std::size_t>>& only = std::nullopt,
                          const std::string& name = "derivation") {
    DotWriter w(name);
    w.graph_attr("rankdir", "LR");
    auto keep = [&](std::size_t id) { return !only || only->count(id) > 0; };
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!keep(i)) continue;
        DotWriter::Attrs attrs{{"label", g.fact(i).str()}};
        attrs.emplace_back("shape", g.is_root(i) ? "box" : "ellipse");
        w.node("f" + std::to_string(i), attrs);
    }
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!keep(i) || g.is_root(i)) continue;
        for (const auto& d : g.derivations(i)) {
            bool all = true;
            for (auto p : d.premises) all = all && keep(p);
            if (!all) continue;
            for (auto p : d.premises) {
                w.edge("f" + std::to_string(p), "f" + std::to_string(i), {{"label", g.rule_names().at(d.rule)}});
            }
        }
    }
    return w.str();
}

}  // namespace geoform::deduce
