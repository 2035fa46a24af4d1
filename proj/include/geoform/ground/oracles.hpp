#pragma once

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "geoform/core/error.hpp"
#include "geoform/core/ids.hpp"
#include "geoform/dimension/concepts.hpp"
#include "geoform/ground/scene.hpp"
#include "geoform/ground/statement.hpp"
#include "geoform/ground/types.hpp"
#include "geoform/index/index.hpp"

#ifndef GEOFORM_DATA_DIR
#define GEOFORM_DATA_DIR "data"
#endif

namespace geoform::ground {

// ---------------------------------------------------------------- grounder

struct ChildSpec {
    std::string informal;
    std::vector<std::string> subgraph;
};

class Grounder {
  public:
    virtual ~Grounder() = default;
    /// Proposes children for an open node; an empty result makes the node a
    /// retrieval leaf.
    virtual std::vector<ChildSpec> decompose(const SceneGraph& scene, const GroundNode& node) = 0;
};

/// One line of a grounding rule table:
///   Concept -> Child [kind=line label=base relation=parallel], Other, ...
struct GroundingRule {
    std::string concept_name;
    struct Child {
        std::string informal;
        std::map<std::string, std::string> filters;
    };
    std::vector<Child> children;
};

inline std::vector<GroundingRule> parse_grounding_rules(std::string_view text) {
    std::vector<GroundingRule> out;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        auto line = trim(text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos));
        pos = nl == std::string_view::npos ? text.size() : nl + 1;
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        auto fail = [&](const std::string& msg) { throw ParseError(ErrorCode::rule_syntax, line_no, 1, msg); };
        auto arrow = line.find("->");
        if (arrow == std::string::npos) fail("expected 'Concept -> Child, ...'");
        GroundingRule r;
        r.concept_name = trim(std::string_view(line).substr(0, arrow));
        if (r.concept_name.empty()) fail("empty concept");
        std::string_view rhs = std::string_view(line).substr(arrow + 2);
        std::string cur;
        int depth = 0;
        auto flush = [&] {
            auto item = trim(cur);
            cur.clear();
            if (item.empty()) fail("empty child");
            GroundingRule::Child c;
            auto lb = item.find('[');
            c.informal = trim(std::string_view(item).substr(0, lb));
            if (c.informal.empty()) fail("child without a name");
            if (lb != std::string::npos) {
                auto rb = item.rfind(']');
                if (rb == std::string::npos || rb < lb) fail("unclosed filter");
                std::string_view body = std::string_view(item).substr(lb + 1, rb - lb - 1);
                std::size_t p = 0;
                while (p < body.size()) {
                    auto sp = body.find(' ', p);
                    auto tok = body.substr(p, sp == std::string_view::npos ? std::string_view::npos : sp - p);
                    p = sp == std::string_view::npos ? body.size() : sp + 1;
                    if (tok.empty()) continue;
                    auto eq = tok.find('=');
                    if (eq == std::string_view::npos) fail("filter '" + std::string(tok) + "' is not key=value");
                    std::string key(tok.substr(0, eq));
                    if (key != "kind" && key != "label" && key != "relation") fail("unknown filter key '" + key + "'");
                    if (key == "relation" && !known_relation(tok.substr(eq + 1))) {
                        fail("unknown relation '" + std::string(tok.substr(eq + 1)) + "'");
                    }
                    c.filters[key] = std::string(tok.substr(eq + 1));
                }
            }
            r.children.push_back(std::move(c));
        };
        for (char ch : rhs) {
            if (ch == '[') ++depth;
            if (ch == ']') --depth;
            if (ch == ',' && depth == 0) {
                flush();
                continue;
            }
            cur += ch;
        }
        flush();
        out.push_back(std::move(r));
    }
    return out;
}

namespace detail {

inline std::string lower(std::string_view s) {
    std::string out;
    for (char c : s) out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

}  // namespace detail

/// Keeps the ids of `parent` that pass every filter. `kind` matches the
/// primitive kind, `label` is a case-insensitive substring of the label,
/// `relation` requires a relation of that name to another primitive of the
/// parent slice.
inline std::vector<std::string> filter_subgraph(const SceneGraph& scene, const std::vector<std::string>& parent,
                                                const std::map<std::string, std::string>& filters) {
    if (filters.empty()) return parent;
    std::set<std::string> const in_parent(parent.begin(), parent.end());
    std::vector<std::string> out;
    for (const auto& id : parent) {
        const auto* p = scene.find(id);
        if (!p) continue;
        bool keep = true;
        for (const auto& [k, v] : filters) {
            if (k == "kind") keep = keep && to_string(p->kind) == v;
            else if (k == "label") keep = keep && detail::lower(p->label).find(detail::lower(v)) != std::string::npos;
            else if (k == "relation") {
                bool any = false;
                for (const auto& r : scene.relations) {
                    if (r.relation != v) continue;
                    if ((r.a == id && in_parent.count(r.b)) || (r.b == id && in_parent.count(r.a))) any = true;
                }
                keep = keep && any;
            }
        }
        if (keep) out.push_back(id);
    }
    return out;
}

/// Default grounder: a rule table keyed by normalized concept name. Rules
/// carried by the scene take precedence over the table.
class RuleTableGrounder : public Grounder {
  public:
    RuleTableGrounder() = default;
    explicit RuleTableGrounder(const std::vector<GroundingRule>& rules) {
        for (const auto& r : rules) m_rules[dim::normalize_concept(r.concept_name)] = r;
    }

    static RuleTableGrounder from_text(std::string_view text) { return RuleTableGrounder(parse_grounding_rules(text)); }

    static RuleTableGrounder bundled() {
        return from_text(index::read_text(std::filesystem::path(GEOFORM_DATA_DIR) / "grounding.rules"));
    }

    const GroundingRule* find(std::string_view concept_name) const {
        auto it = m_rules.find(dim::normalize_concept(concept_name));
        return it == m_rules.end() ? nullptr : &it->second;
    }

    /// Children of every predicate that has a rule, in predicate order.
    std::vector<ChildSpec> decompose(const SceneGraph& scene, const GroundNode& node) override {
        std::map<std::string, GroundingRule> local;
        if (!scene.rules.empty()) {
            std::string text;
            for (const auto& r : scene.rules) text += r + "\n";
            for (auto& r : parse_grounding_rules(text)) local[dim::normalize_concept(r.concept_name)] = std::move(r);
        }
        std::vector<ChildSpec> out;
        for (const auto& p : node.predicates) {
            const GroundingRule* rule = nullptr;
            if (auto it = local.find(dim::normalize_concept(p)); it != local.end()) rule = &it->second;
            else rule = find(p);
            if (!rule) continue;
            for (const auto& c : rule->children) {
                out.push_back({c.informal, filter_subgraph(scene, node.subgraph, c.filters)});
            }
        }
        return out;
    }

  private:
    std::map<std::string, GroundingRule> m_rules;
};

// ---------------------------------------------------------------- selector

struct Candidate {
    const index::Declaration* decl = nullptr;
    double score = 0.0;
};

class Selector {
  public:
    virtual ~Selector() = default;
    /// Index into `candidates`, or nullopt to reject them all.
    virtual std::optional<std::size_t> select(const GroundNode& node, const std::vector<Candidate>& candidates) = 0;
};

/// Highest score, ties by declaration name then id.
class ArgmaxSelector : public Selector {
  public:
    std::optional<std::size_t> select(const GroundNode&, const std::vector<Candidate>& candidates) override {
        std::optional<std::size_t> best;
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            if (!best) {
                best = i;
                continue;
            }
            const auto& a = candidates[i];
            const auto& b = candidates[*best];
            if (a.score > b.score ||
                (a.score == b.score && std::pair(a.decl->name, a.decl->id) < std::pair(b.decl->name, b.decl->id))) {
                best = i;
            }
        }
        return best;
    }
};

// ---------------------------------------------------------------- composer

struct ComposeRequest {
    std::string name;  // identifier for the composed lemma
    std::string informal;
    std::vector<std::string> subgraph;
    std::vector<std::string> predicates;
    std::vector<const Lemma*> children;
};

class Composer {
  public:
    virtual ~Composer() = default;
    /// Up to k candidate propositions, best first.
    virtual std::vector<std::string> propose(const ComposeRequest& request, double temperature, std::size_t k) = 0;
};

/// Deterministic template: "Observed [@a, @b] → (c1) ∧ (c2)", or just the
/// conjunction when the node has no scene slice. Temperature is ignored.
class TemplateComposer : public Composer {
  public:
    static std::string render(const ComposeRequest& r) {
        std::string conj;
        for (std::size_t i = 0; i < r.children.size(); ++i) {
            if (i) conj += " ∧ ";
            conj += "(" + r.children[i]->prop + ")";
        }
        if (r.children.empty()) conj = "True";
        if (r.subgraph.empty()) return conj;
        std::string obs = "Observed [";
        for (std::size_t i = 0; i < r.subgraph.size(); ++i) {
            if (i) obs += ", ";
            obs += "@" + r.subgraph[i];
        }
        return obs + "] → " + conj;
    }

    std::vector<std::string> propose(const ComposeRequest& request, double, std::size_t k) override {
        return std::vector<std::string>(k, render(request));
    }
};

/// Remote or local language model, by interface only: given a context,
/// a temperature and k, it returns up to k ranked texts.
class TextModel {
  public:
    virtual ~TextModel() = default;
    virtual std::vector<std::string> complete(const std::string& context, double temperature, std::size_t k) = 0;
};

/// Adapts a TextModel into a Composer. The context lists the informal
/// hypothesis and the child statements.
class ModelComposer : public Composer {
  public:
    explicit ModelComposer(std::shared_ptr<TextModel> model) : m_model(std::move(model)) {}

    static std::string context_for(const ComposeRequest& r) {
        std::string ctx = "Informal: " + r.informal + "\n";
        if (!r.subgraph.empty()) {
            ctx += "Primitives:";
            for (const auto& id : r.subgraph) ctx += " @" + id;
            ctx += "\n";
        }
        for (const auto* c : r.children) ctx += "Child: " + c->statement() + "\n";
        ctx += "Compose: theorem " + r.name + " : ";
        return ctx;
    }

    std::vector<std::string> propose(const ComposeRequest& request, double temperature, std::size_t k) override {
        auto out = m_model->complete(context_for(request), temperature, k);
        if (out.size() > k) out.resize(k);
        return out;
    }

  private:
    std::shared_ptr<TextModel> m_model;
};

// ---------------------------------------------------------------- checkers

struct SyntaxVerdict {
    bool ok = true;
    std::string message;
};

class SyntaxChecker {
  public:
    virtual ~SyntaxChecker() = default;
    virtual SyntaxVerdict check(const std::string& statement, const std::set<std::string>& declared) = 0;
};

/// Balanced brackets, closed binders, and declared identifiers only.
class StructuralSyntaxChecker : public SyntaxChecker {
  public:
    SyntaxVerdict check(const std::string& statement, const std::set<std::string>& declared) override {
        auto shape = analyze_statement(statement);
        if (!shape.ok) return {false, shape.message};
        for (const auto& id : shape.free_identifiers) {
            if (!declared.count(id)) return {false, "undeclared identifier '" + id + "'"};
        }
        return {};
    }
};

class SemanticChecker {
  public:
    virtual ~SemanticChecker() = default;
    /// 1 accepts the (scene, informal, formal) triplet, 0 rejects it.
    virtual int check(const SceneGraph& scene, const std::string& informal, const Lemma& lemma) = 0;
};

/// Every @reference names a scene primitive and every identifier is
/// declared by the lemma.
class StructuralSemanticChecker : public SemanticChecker {
  public:
    int check(const SceneGraph& scene, const std::string&, const Lemma& lemma) override {
        if (lemma.name.empty() || lemma.prop.empty()) return 0;
        auto shape = analyze_statement(lemma.statement());
        if (!shape.ok) return 0;
        for (const auto& r : shape.refs) {
            if (!scene.has(r)) return 0;
        }
        for (const auto& id : shape.free_identifiers) {
            if (!lemma.declares.count(id)) return 0;
        }
        return 1;
    }
};

/// The oracle set of one run. Missing members get the defaults, except
/// the semantic checker: a null checker makes check_chain report
/// CheckerUnavailable.
struct Oracles {
    std::shared_ptr<Grounder> grounder;
    std::shared_ptr<Selector> selector;
    std::shared_ptr<Composer> composer;
    std::shared_ptr<SyntaxChecker> syntax;
    std::shared_ptr<SemanticChecker> semantic;

    static Oracles defaults() {
        return {std::make_shared<RuleTableGrounder>(RuleTableGrounder::bundled()), std::make_shared<ArgmaxSelector>(),
                std::make_shared<TemplateComposer>(), std::make_shared<StructuralSyntaxChecker>(),
                std::make_shared<StructuralSemanticChecker>()};
    }
};

}  // namespace geoform::ground
