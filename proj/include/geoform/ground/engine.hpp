#pragma once

#include <algorithm>
#include <cstdio>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "geoform/core/dot.hpp"
#include "geoform/core/error.hpp"
#include "geoform/dimension/concepts.hpp"
#include "geoform/ground/formula.hpp"
#include "geoform/ground/oracles.hpp"
#include "geoform/ground/scene.hpp"
#include "geoform/ground/statement.hpp"
#include "geoform/ground/types.hpp"
#include "geoform/index/index.hpp"

namespace geoform::ground {

struct PropChainEntry {
    std::size_t t = 0;
    std::optional<std::size_t> parent;  // dependency link
    Lemma lemma;
};

struct PropChain {
    std::vector<PropChainEntry> lemmas;
    std::size_t size() const noexcept { return lemmas.size(); }
};

struct AxiomEntry {
    std::size_t t = 0;
    std::string name;
};

struct DimEntry {
    std::size_t t = 0;
    std::string concept_name;
    dim::DimExpr dim;
};

struct AxiomChain {
    std::vector<AxiomEntry> axioms;
    std::vector<DimEntry> dims;
    std::size_t size() const noexcept { return axioms.size() + dims.size(); }
};

struct GroundResult {
    std::string scene;
    EngineConfig config;
    std::vector<GroundNode> nodes;
    PropChain prop_chain;
    AxiomChain axiom_chain;
    std::vector<Evaluation> evaluations;
    int check = -1;                  // chain-level semantic verdict, -1 when no checker
    std::string outcome = "complete";  // or the error name of an aborted run

    std::size_t node_count() const noexcept { return nodes.size(); }
    std::size_t depth() const {
        std::size_t d = 0;
        for (const auto& n : nodes) d = std::max(d, n.depth);
        return d;
    }
};

/// Failure of a run, with the graph as it stood when the run stopped.
class GroundError : public Error {
  public:
    GroundError(ErrorCode code, const std::string& msg, std::shared_ptr<const GroundResult> partial)
        : Error(code, msg), m_partial(std::move(partial)) {}

    const GroundResult* partial() const noexcept { return m_partial.get(); }

  private:
    std::shared_ptr<const GroundResult> m_partial;
};

// ------------------------------------------------------------- operations

/// Terminal only when every predicate is; the verdict is then that of the
/// lexicographically first predicate.
inline dim::TerminationVerdict terminate(const std::vector<std::string>& predicates, const dim::ConceptTable& table,
                                         dim::Domain domain, bool construction_described = false) {
    std::vector<std::string> sorted = predicates;
    std::sort(sorted.begin(), sorted.end());
    std::optional<dim::TerminationVerdict> first;
    for (const auto& p : sorted) {
        auto v = table.classify(p, domain, construction_described);
        if (!v.terminal()) return v;
        if (!first) first = v;
    }
    if (!first) return {};
    return *first;
}

inline Lemma retrieved_lemma(const index::Declaration& d) {
    Lemma l;
    l.name = d.name;
    l.prop = d.signature;
    l.proof = d.name;
    l.source = LemmaSource::retrieved;
    l.decl_id = d.id;
    l.formula = d.formula;
    l.declares = analyze_statement(d.signature).free_identifiers;
    l.declares.insert(d.name);
    return l;
}

/// Merged top-k over every predicate of the node (best score per
/// declaration), handed to the selector.
inline std::vector<Candidate> retrieve_candidates(const GroundNode& node, const index::Index& idx, std::size_t k) {
    std::map<std::size_t, double> best;
    for (const auto& p : node.predicates) {
        for (const auto& h : idx.search(p, k)) {
            auto& s = best[h.index];
            s = std::max(s, h.score);
        }
    }
    std::vector<Candidate> out;
    for (const auto& [i, s] : best) out.push_back({&idx.declarations()[i], s});
    std::sort(out.begin(), out.end(), [](const Candidate& a, const Candidate& b) {
        if (a.score != b.score) return a.score > b.score;
        return std::pair(a.decl->name, a.decl->id) < std::pair(b.decl->name, b.decl->id);
    });
    if (out.size() > k) out.resize(k);
    return out;
}

/// Maps a leaf's informal statements to a retrieved lemma.
inline Lemma ground_node(const GroundNode& node, const index::Index* idx, Selector& selector, std::size_t k) {
    if (!idx || idx->empty()) throw Error(ErrorCode::empty_index, "no declarations to retrieve for '" + node.informal + "'");
    auto cands = retrieve_candidates(node, *idx, k);
    auto pick = selector.select(node, cands);
    if (!pick || *pick >= cands.size()) {
        throw Error(ErrorCode::no_candidate, "no declaration accepted for '" + node.informal + "' (" +
                                                 std::to_string(cands.size()) + " candidates)");
    }
    return retrieved_lemma(*cands[*pick].decl);
}

/// Lemma for a terminated node. Dim verdicts state the dimension, citing a
/// declaration of the same name when the index has one; other verdicts use
/// that declaration outright, or become a bare axiom.
inline Lemma terminal_lemma(const dim::TerminationVerdict& v, const index::Index* idx, std::size_t k) {
    const index::Declaration* same = nullptr;
    if (idx && !idx->empty()) {
        auto key = dim::normalize_concept(v.name);
        for (const auto& h : idx->search(v.name, k)) {
            if (dim::normalize_concept(idx->at(h).name) == key) {
                same = &idx->at(h);
                break;
            }
        }
    }
    if (same && v.kind != dim::VerdictKind::dim) return retrieved_lemma(*same);
    Lemma l;
    if (same) {
        l.name = same->name;
        l.prop = "Quantity [" + v.dim->str() + "]";
        l.proof = same->name;
        l.source = LemmaSource::retrieved;
        l.decl_id = same->id;
        l.declares = {l.name};
        return l;
    }
    l.name = identifier_for(v.name);
    l.prop = v.kind == dim::VerdictKind::dim ? "Quantity [" + v.dim->str() + "]" : "Prop";
    l.proof = "axiom";
    l.source = LemmaSource::axiom;
    l.declares = {l.name};
    return l;
}

inline std::string display_value(double value, const SceneGraph& scene) {
    char buf[64];
    if (!scene.unit.empty()) {
        std::snprintf(buf, sizeof buf, "%.3g", value / scene.quantities.at(scene.unit));
        return std::string(buf) + scene.unit;
    }
    std::snprintf(buf, sizeof buf, "%.4g", value);
    return buf;
}

/// Evaluations a child contributes when its formula is fully bound by the
/// scene quantities.
inline std::optional<Evaluation> evaluate_lemma(const Lemma& l, const SceneGraph& scene) {
    if (l.formula.empty()) return std::nullopt;
    try {
        Formula f(l.formula);
        auto v = f.evaluate(scene.quantities);
        if (!v) return std::nullopt;
        return Evaluation{l.name, l.formula, *v, display_value(*v, scene)};
    } catch (const Error&) {
        return std::nullopt;
    }
}

/// Combines resolved children into the parent's lemma under pass@k: the
/// first candidate that passes the syntax check wins.
inline Lemma compose(const ComposeRequest& req, const SceneGraph& scene, Composer& composer, SyntaxChecker& syntax,
                     const EngineConfig& config) {
    std::set<std::string> declared{req.name};
    for (const auto* c : req.children) declared.insert(c->declares.begin(), c->declares.end());
    auto const k = config.samples_per_node;
    auto cands = composer.propose(req, config.temperature(), k);
    std::string last = "composer returned no candidates";
    for (std::size_t i = 0; i < k && i < cands.size(); ++i) {
        Lemma l;
        l.name = req.name;
        l.prop = cands[i];
        l.source = LemmaSource::composed;
        auto verdict = syntax.check(l.statement(), declared);
        if (!verdict.ok) {
            last = verdict.message;
            continue;
        }
        std::string proof = "⟨";
        for (std::size_t j = 0; j < req.children.size(); ++j) {
            if (j) proof += ", ";
            proof += req.children[j]->name;
        }
        l.proof = proof + "⟩";
        l.declares = declared;
        for (const auto* c : req.children) {
            l.evaluations.insert(l.evaluations.end(), c->evaluations.begin(), c->evaluations.end());
            if (auto e = evaluate_lemma(*c, scene)) l.evaluations.push_back(*e);
        }
        return l;
    }
    throw Error(ErrorCode::compose_failed,
                "'" + req.name + "' failed " + std::to_string(k) + " attempt(s): " + last);
}

inline int semantic_check(const SceneGraph& scene, const std::string& informal, const Lemma& lemma,
                          SemanticChecker* checker) {
    if (!checker) throw Error(ErrorCode::checker_unavailable, "no semantic checker wired");
    return checker->check(scene, informal, lemma) ? 1 : 0;
}

/// Conjunction of per-proposition verdicts; informal texts come from the
/// graph nodes.
inline int check_chain(const SceneGraph& scene, const PropChain& chain, const std::vector<GroundNode>& nodes,
                       SemanticChecker* checker) {
    if (!checker) throw Error(ErrorCode::checker_unavailable, "no semantic checker wired");
    int v = 1;
    for (const auto& e : chain.lemmas) {
        const auto& informal = e.t < nodes.size() ? nodes[e.t].informal : std::string();
        v = std::min(v, semantic_check(scene, informal, e.lemma, checker));
    }
    return v;
}

namespace detail {

inline void finish_chains(GroundResult& r) {
    r.prop_chain = {};
    r.axiom_chain = {};
    for (const auto& n : r.nodes) {
        if (n.lemma) r.prop_chain.lemmas.push_back({n.t, n.parent, *n.lemma});
        if (n.status == NodeStatus::terminated_dim) r.axiom_chain.dims.push_back({n.t, n.verdict.name, *n.verdict.dim});
        if (n.status == NodeStatus::terminated_axiom) r.axiom_chain.axioms.push_back({n.t, n.verdict.name});
    }
    if (!r.nodes.empty() && r.nodes[0].lemma) r.evaluations = r.nodes[0].lemma->evaluations;
}

[[noreturn]] inline void abort_run(GroundResult& r, ErrorCode code, const std::string& msg) {
    r.outcome = std::string(to_string(code));
    finish_chains(r);
    throw GroundError(code, msg, std::make_shared<const GroundResult>(r));
}

}  // namespace detail

/// SceneGraph -> PropChain -> AxiomChain. Nodes are expanded breadth-first
/// (each is first tested for termination), leaves are grounded by
/// retrieval, then lemmas are composed bottom-up to the root.
inline GroundResult run_pipeline(const SceneGraph& scene, const EngineConfig& config, const Oracles& oracles,
                                 const index::Index* idx,
                                 const dim::ConceptTable& table = dim::ConceptTable::bundled()) {
    config.validate();
    if (!oracles.grounder || !oracles.selector || !oracles.composer || !oracles.syntax) {
        throw Error(ErrorCode::invalid_config, "grounder, selector, composer and syntax checker are required");
    }
    GroundResult r;
    r.scene = scene.name;
    r.config = config;

    GroundNode root;
    root.t = 0;
    root.depth = 1;
    root.subgraph = scene.ids();
    root.predicates = scene.roots;
    for (std::size_t i = 0; i < scene.roots.size(); ++i) root.informal += (i ? "; " : "") + scene.roots[i];
    r.nodes.push_back(root);

    std::deque<std::size_t> queue{0};
    while (!queue.empty()) {
        auto const t = queue.front();
        queue.pop_front();
        auto v = terminate(r.nodes[t].predicates, table, scene.domain, scene.construction_described);
        r.nodes[t].verdict = v;
        if (v.terminal()) {
            r.nodes[t].status = v.kind == dim::VerdictKind::dim ? NodeStatus::terminated_dim : NodeStatus::terminated_axiom;
            r.nodes[t].lemma = terminal_lemma(v, idx, config.retrieval_k);
            continue;
        }
        auto specs = oracles.grounder->decompose(scene, r.nodes[t]);
        if (specs.empty()) {
            try {
                r.nodes[t].lemma = ground_node(r.nodes[t], idx, *oracles.selector, config.retrieval_k);
                r.nodes[t].status = NodeStatus::lemma;
            } catch (const Error& e) {
                if (e.code() != ErrorCode::no_candidate) detail::abort_run(r, e.code(), e.what());
                r.nodes[t].status = NodeStatus::failed;
                r.nodes[t].note = e.what();
            }
            continue;
        }
        std::set<std::string> const parent_ids(r.nodes[t].subgraph.begin(), r.nodes[t].subgraph.end());
        for (auto& spec : specs) {
            auto const depth = r.nodes[t].depth + 1;
            if (depth > config.max_depth) {
                r.nodes[t].note = "child '" + spec.informal + "' would sit at depth " + std::to_string(depth);
                detail::abort_run(r, ErrorCode::depth_budget_exceeded,
                                  "expanding '" + r.nodes[t].informal + "' needs depth " + std::to_string(depth) +
                                      " > " + std::to_string(config.max_depth));
            }
            if (r.nodes.size() + 1 > config.max_nodes) {
                r.nodes[t].note = "child '" + spec.informal + "' would exceed the node budget";
                detail::abort_run(r, ErrorCode::node_budget_exceeded,
                                  "expanding '" + r.nodes[t].informal + "' needs more than " +
                                      std::to_string(config.max_nodes) + " nodes");
            }
            GroundNode c;
            c.t = r.nodes.size();
            c.parent = t;
            c.depth = depth;
            c.informal = spec.informal;
            c.predicates = {spec.informal};
            // An oracle may only narrow the parent's slice.
            for (auto& id : spec.subgraph) {
                if (parent_ids.count(id)) c.subgraph.push_back(std::move(id));
            }
            r.nodes[t].children.push_back(c.t);
            queue.push_back(c.t);
            r.nodes.push_back(std::move(c));
        }
    }

    std::vector<std::string> failed;
    for (const auto& n : r.nodes) {
        if (n.status == NodeStatus::failed) failed.push_back(n.informal);
    }
    if (!failed.empty()) {
        std::string list;
        for (const auto& f : failed) list += (list.empty() ? "" : ", ") + f;
        detail::abort_run(r, ErrorCode::grounding_failed, "no grounding for: " + list);
    }

    // Children always carry larger indices than their parent.
    for (std::size_t t = r.nodes.size(); t-- > 0;) {
        auto& n = r.nodes[t];
        if (n.children.empty()) continue;
        ComposeRequest req;
        req.name = identifier_for(n.informal);
        req.informal = n.informal;
        req.subgraph = n.subgraph;
        req.predicates = n.predicates;
        for (auto c : n.children) req.children.push_back(&*r.nodes[c].lemma);
        try {
            n.lemma = compose(req, scene, *oracles.composer, *oracles.syntax, config);
            n.status = NodeStatus::lemma;
        } catch (const Error& e) {
            n.status = NodeStatus::failed;
            n.note = e.what();
            detail::abort_run(r, e.code(), e.what());
        }
    }

    detail::finish_chains(r);
    if (oracles.semantic) r.check = check_chain(scene, r.prop_chain, r.nodes, oracles.semantic.get());
    return r;
}

// ------------------------------------------------------------- reporting

inline json lemma_json(const Lemma& l) {
    json j{{"name", l.name},
           {"statement", l.statement()},
           {"proof", l.proof},
           {"source", to_string(l.source)}};
    if (!l.decl_id.empty()) j["declaration"] = l.decl_id;
    if (!l.formula.empty()) j["formula"] = l.formula;
    return j;
}

inline json evaluation_json(const Evaluation& e) {
    return json{{"lemma", e.lemma}, {"formula", e.formula}, {"value", e.value}, {"display", e.display}};
}

inline json config_json(const EngineConfig& c) {
    return json{{"max_nodes", c.max_nodes},
                {"max_depth", c.max_depth},
                {"retrieval_k", c.retrieval_k},
                {"samples_per_node", c.samples_per_node},
                {"temperature_greedy", c.temperature_greedy},
                {"temperature_diverse", c.temperature_diverse}};
}

/// Run report: metrics, per-node status, both chains and evaluations.
inline json report_json(const GroundResult& r) {
    json j;
    j["scene"] = r.scene;
    j["outcome"] = r.outcome;
    j["nodes"] = r.node_count();
    j["depth"] = r.depth();
    std::map<std::string, std::size_t> counts;
    for (const auto& n : r.nodes) ++counts[std::string(to_string(n.status))];
    j["status_counts"] = counts;
    j["check_chain"] = r.check < 0 ? json(nullptr) : json(r.check);

    json evals = json::array();
    for (const auto& e : r.evaluations) evals.push_back(evaluation_json(e));
    j["evaluations"] = std::move(evals);

    json pc = json::array();
    for (const auto& e : r.prop_chain.lemmas) {
        json le = lemma_json(e.lemma);
        json entry{{"t", e.t}, {"parent", e.parent ? json(*e.parent) : json(nullptr)}};
        entry.update(le);
        pc.push_back(std::move(entry));
    }
    j["prop_chain"] = std::move(pc);

    json axioms = json::array();
    for (const auto& a : r.axiom_chain.axioms) axioms.push_back(json{{"t", a.t}, {"name", a.name}});
    json dims = json::array();
    for (const auto& d : r.axiom_chain.dims) {
        dims.push_back(json{{"t", d.t}, {"concept", d.concept_name}, {"dim", d.dim.str()}});
    }
    j["axiom_chain"] = json{{"axioms", std::move(axioms)}, {"dims", std::move(dims)}};

    json nodes = json::array();
    for (const auto& n : r.nodes) {
        json nj{{"t", n.t},
                {"parent", n.parent ? json(*n.parent) : json(nullptr)},
                {"depth", n.depth},
                {"informal", n.informal},
                {"predicates", n.predicates},
                {"status", to_string(n.status)},
                {"verdict", n.verdict.str()},
                {"subgraph", n.subgraph},
                {"children", n.children}};
        if (n.lemma) nj["lemma"] = lemma_json(*n.lemma);
        if (!n.note.empty()) nj["note"] = n.note;
        nodes.push_back(std::move(nj));
    }
    j["graph"] = std::move(nodes);
    j["config"] = config_json(r.config);
    return j;
}

/// Grounding graph: terminated nodes red, retrieved green, composed blue,
/// failed or unexpanded grey.
inline std::string to_dot(const GroundResult& r) {
    DotWriter w("grounding");
    w.graph_attr("rankdir", "TB");
    for (const auto& n : r.nodes) {
        std::string fill = "#eeeeee";
        if (n.terminated()) fill = "#f4cccc";
        else if (n.status == NodeStatus::lemma && n.lemma && n.lemma->source == LemmaSource::retrieved) fill = "#d9ead3";
        else if (n.status == NodeStatus::lemma) fill = "#cfe2f3";
        std::string label = std::to_string(n.t) + ": " + n.informal + "\n" + std::string(to_string(n.status));
        if (n.verdict.terminal()) label += " " + n.verdict.str();
        w.node("n" + std::to_string(n.t), {{"label", label}, {"shape", "box"}, {"style", "filled"}, {"fillcolor", fill}});
    }
    for (const auto& n : r.nodes) {
        for (auto c : n.children) w.edge("n" + std::to_string(n.t), "n" + std::to_string(c));
    }
    return w.str();
}

}  // namespace geoform::ground
