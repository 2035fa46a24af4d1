#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "geoform/core/error.hpp"
#include "geoform/dimension/concepts.hpp"

namespace geoform::ground {

struct EngineConfig {
    std::size_t max_nodes = 100;
    std::size_t max_depth = 6;
    std::size_t retrieval_k = 10;
    std::size_t samples_per_node = 1;  // pass@k; 3 for the diverse setting
    double temperature_greedy = 0.1;
    double temperature_diverse = 0.6;

    void validate() const {
        auto bad = [](const std::string& m) { throw Error(ErrorCode::invalid_config, m); };
        if (max_nodes == 0 || max_depth == 0 || retrieval_k == 0 || samples_per_node == 0) {
            bad("budgets, k and samples_per_node must be positive");
        }
        if (max_depth > max_nodes) bad("max_depth must not exceed max_nodes");
        if (!(temperature_greedy > 0.0) || !(temperature_diverse > 0.0)) bad("temperatures must be positive");
    }

    /// Greedy decoding for a single sample, diverse sampling otherwise.
    double temperature() const { return samples_per_node == 1 ? temperature_greedy : temperature_diverse; }
};

enum class LemmaSource { retrieved, composed, axiom };

inline std::string_view to_string(LemmaSource s) {
    switch (s) {
    case LemmaSource::retrieved: return "Retrieved";
    case LemmaSource::composed: return "Composed";
    case LemmaSource::axiom: return "Axiom";
    }
    return "?";
}

/// A formula evaluated against scene quantities during composition.
struct Evaluation {
    std::string lemma;
    std::string formula;
    double value = 0.0;
    std::string display;  // e.g. "0.946c"
};

struct Lemma {
    std::string name;
    std::string prop;   // proposition body
    std::string proof;  // opaque proof text
    LemmaSource source = LemmaSource::composed;
    std::string decl_id;  // set for retrieved lemmas
    std::string formula;  // carried over from a retrieved declaration
    std::set<std::string> declares;
    std::vector<Evaluation> evaluations;

    std::string statement() const {
        return std::string(source == LemmaSource::axiom ? "axiom " : "theorem ") + name + " : " + prop;
    }
};

enum class NodeStatus { open, lemma, terminated_dim, terminated_axiom, failed };

inline std::string_view to_string(NodeStatus s) {
    switch (s) {
    case NodeStatus::open: return "Open";
    case NodeStatus::lemma: return "Lemma";
    case NodeStatus::terminated_dim: return "TerminatedDim";
    case NodeStatus::terminated_axiom: return "TerminatedAxiom";
    case NodeStatus::failed: return "Failed";
    }
    return "?";
}

struct GroundNode {
    std::size_t t = 0;
    std::optional<std::size_t> parent;
    std::size_t depth = 1;  // the root is at depth 1
    std::vector<std::string> subgraph;
    std::string informal;
    std::vector<std::string> predicates;
    NodeStatus status = NodeStatus::open;
    dim::TerminationVerdict verdict;
    std::optional<Lemma> lemma;
    std::vector<std::size_t> children;
    std::string note;  // failure diagnosis, if any

    bool terminated() const { return status == NodeStatus::terminated_dim || status == NodeStatus::terminated_axiom; }
};

}  // namespace geoform::ground
