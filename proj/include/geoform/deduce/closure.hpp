#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "geoform/deduce/rule.hpp"
#include "geoform/geom/fact.hpp"

namespace geoform::deduce {

/// Variable assignment: point variables map to a one-id term, direction
/// variables to the whole term they matched.
using Binding = std::vector<std::pair<std::string, Term>>;

inline const Term* lookup(const Binding& b, const std::string& var) {
    for (const auto& [v, t] : b) {
        if (v == var) return &t;
    }
    return nullptr;
}

namespace detail {

inline bool bind_var(Binding& b, const std::string& var, const Term& value) {
    if (const auto* cur = lookup(b, var)) return *cur == value;
    b.emplace_back(var, value);
    return true;
}

/// Extends `base` so that `pattern` matches one representation in `orbit`.
/// Appends every distinct extension to `out`.
inline void unify(const Pattern& pattern, const std::vector<std::vector<Term>>& orbit, const Binding& base,
                  std::vector<Binding>& out) {
    const auto& pt = pattern.terms();
    for (const auto& rep : orbit) {
        if (rep.size() != pt.size()) continue;
        Binding b = base;
        bool ok = true;
        for (std::size_t i = 0; ok && i < pt.size(); ++i) {
            if (pt[i].size() == 1 && !is_point_var(pt[i][0])) {
                ok = bind_var(b, pt[i][0], rep[i]);
                continue;
            }
            if (pt[i].size() != rep[i].size()) {
                ok = false;
                break;
            }
            for (std::size_t k = 0; ok && k < pt[i].size(); ++k) ok = bind_var(b, pt[i][k], Term{rep[i][k]});
        }
        if (ok && std::find(out.begin(), out.end(), b) == out.end()) out.push_back(std::move(b));
    }
}

}  // namespace detail

/// Builds the fact a pattern denotes under a complete binding.
inline std::optional<Fact> instantiate(const Pattern& pattern, const Binding& b) {
    std::vector<Term> terms;
    for (const auto& pt : pattern.terms()) {
        if (pt.size() == 1 && !is_point_var(pt[0])) {
            terms.push_back(*lookup(b, pt[0]));
            continue;
        }
        Term t;
        for (const auto& v : pt) {
            const auto* val = lookup(b, v);
            if (val->size() != 1) return std::nullopt;
            t.push_back((*val)[0]);
        }
        terms.push_back(std::move(t));
    }
    if (!geom::valid_shape(pattern.predicate(), terms)) return std::nullopt;
    return Fact(pattern.predicate(), std::move(terms));
}

inline bool side_conditions_hold(const Rule& r, const Binding& b) {
    for (const auto& [x, y] : r.distinct) {
        if (*lookup(b, x) == *lookup(b, y)) return false;
    }
    return true;
}

struct Derivation {
    std::size_t rule = 0;
    std::vector<std::size_t> premises;  // fact ids, in rule premise order
};

/// Facts in insertion order plus every recorded rule application.
class DerivationGraph {
  public:
    const std::vector<Fact>& facts() const noexcept { return m_facts; }
    std::size_t size() const noexcept { return m_facts.size(); }
    const Fact& fact(std::size_t id) const { return m_facts.at(id); }
    const std::vector<std::string>& rule_names() const noexcept { return m_rule_names; }

    std::optional<std::size_t> id_of(const Fact& f) const {
        auto it = m_ids.find(f);
        if (it == m_ids.end()) return std::nullopt;
        return it->second;
    }
    bool contains(const Fact& f) const { return m_ids.count(f) > 0; }

    bool is_root(std::size_t id) const { return m_root.at(id); }
    const std::vector<Derivation>& derivations(std::size_t id) const { return m_derivations.at(id); }
    /// Distinct derivations found, including those past the storage cap.
    std::size_t derivation_count(std::size_t id) const { return m_counts.at(id); }
    bool truncated(std::size_t id) const { return m_counts.at(id) > m_derivations.at(id).size(); }

    std::set<Fact> fact_set() const { return {m_facts.begin(), m_facts.end()}; }

    std::vector<Fact> roots() const {
        std::vector<Fact> out;
        for (std::size_t i = 0; i < m_facts.size(); ++i) {
            if (m_root[i]) out.push_back(m_facts[i]);
        }
        return out;
    }

    /// Inserts a fact; returns its id and whether it was new.
    std::pair<std::size_t, bool> add(const Fact& f, bool root) {
        auto [it, inserted] = m_ids.emplace(f, m_facts.size());
        if (inserted) {
            m_facts.push_back(f);
            m_root.push_back(root);
            m_derivations.emplace_back();
            m_seen.emplace_back();
            m_counts.push_back(0);
        } else if (root) {
            m_root[it->second] = true;
        }
        return {it->second, inserted};
    }

    void record(std::size_t conclusion, Derivation d, std::size_t cap) {
        std::vector<std::size_t> key = d.premises;
        std::sort(key.begin(), key.end());
        key.insert(key.begin(), d.rule);
        if (!m_seen[conclusion].insert(std::move(key)).second) return;
        ++m_counts[conclusion];
        if (m_derivations[conclusion].size() < cap) m_derivations[conclusion].push_back(std::move(d));
    }

    void set_rule_names(std::vector<std::string> names) { m_rule_names = std::move(names); }

  private:
    std::vector<Fact> m_facts;
    std::unordered_map<Fact, std::size_t, geom::FactHash> m_ids;
    std::vector<bool> m_root;
    std::vector<std::vector<Derivation>> m_derivations;
    std::vector<std::set<std::vector<std::size_t>>> m_seen;
    std::vector<std::size_t> m_counts;
    std::vector<std::string> m_rule_names;
};

struct ClosureOptions {
    /// Planar configurations may use rules marked @planar.
    bool planar = true;
    std::size_t derivation_cap = 16;
};

namespace detail {

/// Fact store with per-predicate and per-(predicate, id) indexes and
/// cached symmetry orbits.
class FactIndex {
  public:
    void add(std::size_t id, const Fact& f) {
        if (m_orbits.size() <= id) m_orbits.resize(id + 1);
        m_orbits[id] = f.orbit();
        auto const p = static_cast<std::size_t>(f.predicate());
        m_by_pred[p].push_back(id);
        for (const auto& x : f.ids()) m_by_id[{p, x}].push_back(id);
    }

    const std::vector<std::vector<Term>>& orbit(std::size_t id) const { return m_orbits[id]; }

    /// Smallest candidate list for a pattern under a partial binding.
    const std::vector<std::size_t>& candidates(const Pattern& pat, const Binding& b) const {
        auto const p = static_cast<std::size_t>(pat.predicate());
        const std::vector<std::size_t>* best = &m_by_pred[p];
        for (const auto& v : pattern_vars(pat)) {
            const auto* val = lookup(b, v);
            if (!val) continue;
            for (const auto& x : *val) {
                auto it = m_by_id.find({p, x});
                if (it == m_by_id.end()) return m_empty;
                if (it->second.size() < best->size()) best = &it->second;
            }
        }
        return *best;
    }

  private:
    std::vector<std::vector<std::vector<Term>>> m_orbits;
    std::vector<std::size_t> m_by_pred[geom::all_predicates.size()];
    std::map<std::pair<std::size_t, std::string>, std::vector<std::size_t>> m_by_id;
    std::vector<std::size_t> m_empty;
};

}  // namespace detail

/// Saturates `facts` under `rules` by semi-naive evaluation. In each round
/// one premise is matched against the facts added in the previous round
/// (the delta), earlier premises against strictly older facts, and later
/// premises against everything known, so each premise tuple is visited
/// exactly once over the whole run. Every distinct derivation met along
/// the way is recorded, up to `derivation_cap` per fact.
inline DerivationGraph closure(std::vector<Fact> facts, const std::vector<Rule>& rules,
                               const ClosureOptions& opts = {}) {
    std::sort(facts.begin(), facts.end());
    facts.erase(std::unique(facts.begin(), facts.end()), facts.end());

    DerivationGraph g;
    std::vector<std::string> names;
    for (const auto& r : rules) names.push_back(r.name);
    g.set_rule_names(std::move(names));

    detail::FactIndex index;
    for (const auto& f : facts) {
        if (f.degenerate()) continue;
        auto [id, fresh] = g.add(f, true);
        if (fresh) index.add(id, f);
    }

    std::size_t delta_begin = 0;
    std::size_t delta_end = g.size();
    while (delta_begin < delta_end) {
        for (std::size_t ri = 0; ri < rules.size(); ++ri) {
            const auto& rule = rules[ri];
            if (rule.planar_only && !opts.planar) continue;
            auto const n = rule.premises.size();
            for (std::size_t d = 0; d < n; ++d) {
                // Partial matches: bindings plus chosen fact ids per premise.
                struct Partial {
                    Binding binding;
                    std::vector<std::size_t> ids;
                };
                std::vector<Partial> partials;
                for (std::size_t id = delta_begin; id < delta_end; ++id) {
                    if (g.fact(id).predicate() != rule.premises[d].predicate()) continue;
                    std::vector<Binding> bs;
                    detail::unify(rule.premises[d], index.orbit(id), {}, bs);
                    for (auto& b : bs) {
                        std::vector<std::size_t> ids(n, 0);
                        ids[d] = id;
                        partials.push_back({std::move(b), std::move(ids)});
                    }
                }
                for (std::size_t j = 0; j < n && !partials.empty(); ++j) {
                    if (j == d) continue;
                    std::size_t const limit = j < d ? delta_begin : delta_end;
                    std::vector<Partial> next;
                    for (const auto& part : partials) {
                        for (auto id : index.candidates(rule.premises[j], part.binding)) {
                            if (id >= limit) break;
                            std::vector<Binding> bs;
                            detail::unify(rule.premises[j], index.orbit(id), part.binding, bs);
                            for (auto& b : bs) {
                                auto ids = part.ids;
                                ids[j] = id;
                                next.push_back({std::move(b), std::move(ids)});
                            }
                        }
                    }
                    partials = std::move(next);
                }
                for (const auto& part : partials) {
                    if (!side_conditions_hold(rule, part.binding)) continue;
                    auto concl = instantiate(rule.conclusion, part.binding);
                    if (!concl || concl->degenerate()) continue;
                    auto [cid, fresh] = g.add(*concl, false);
                    if (fresh) index.add(cid, *concl);
                    if (std::find(part.ids.begin(), part.ids.end(), cid) != part.ids.end()) continue;
                    g.record(cid, {ri, part.ids}, opts.derivation_cap);
                }
            }
        }
        delta_begin = delta_end;
        delta_end = g.size();
    }
    return g;
}

/// Convenience: the closed fact set only.
inline std::set<Fact> closure_set(const std::vector<Fact>& facts, const std::vector<Rule>& rules,
                                  const ClosureOptions& opts = {}) {
    return closure(facts, rules, opts).fact_set();
}

}  // namespace geoform::deduce
