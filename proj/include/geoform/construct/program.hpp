#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "geoform/construct/operators.hpp"
#include "geoform/core/error.hpp"
#include "geoform/core/ids.hpp"
#include "geoform/geom/fact.hpp"
#include "geoform/geom/types.hpp"

namespace geoform::construct {

struct Limits {
    std::size_t max_steps = 12;
    std::size_t max_objects = 20;
    std::size_t max_resamples = 50;

    bool valid() const { return max_steps > 0 && max_objects > 0 && max_resamples > 0 && max_objects >= max_steps; }

    void check() const {
        if (!valid()) {
            throw Error(ErrorCode::invalid_limits, "limits must be positive with max_objects >= max_steps");
        }
    }
};

struct Step {
    std::string op;
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;

    friend bool operator==(const Step& a, const Step& b) {
        return a.op == b.op && a.inputs == b.inputs && a.outputs == b.outputs;
    }
};

class Program {
  public:
    std::vector<Step> steps;
    std::optional<Fact> goal;
    Limits limits;

    std::vector<geom::GeoObject> objects() const {
        std::vector<geom::GeoObject> out;
        for (std::size_t i = 0; i < steps.size(); ++i) {
            const auto* spec = find_operator(steps[i].op);
            for (std::size_t k = 0; k < steps[i].outputs.size(); ++k) {
                out.push_back({steps[i].outputs[k], spec->outputs[k], i});
            }
        }
        return out;
    }

    std::size_t object_count() const {
        std::size_t n = 0;
        for (const auto& s : steps) n += s.outputs.size();
        return n;
    }

    std::optional<ObjectKind> kind_of(std::string_view id) const {
        for (const auto& s : steps) {
            for (std::size_t k = 0; k < s.outputs.size(); ++k) {
                if (s.outputs[k] == id) return find_operator(s.op)->outputs[k];
            }
        }
        return std::nullopt;
    }

    geom::KindLookup kind_lookup() const {
        return [this](std::string_view id) { return kind_of(id); };
    }

    /// Index of the step that binds `id`.
    std::optional<std::size_t> step_of(std::string_view id) const {
        for (std::size_t i = 0; i < steps.size(); ++i) {
            for (const auto& o : steps[i].outputs) {
                if (o == id) return i;
            }
        }
        return std::nullopt;
    }

    SpaceMode mode() const {
        for (const auto& s : steps) {
            if (find_operator(s.op)->mode == SpaceMode::spatial) return SpaceMode::spatial;
        }
        return SpaceMode::planar;
    }

    int space_dim() const { return mode() == SpaceMode::spatial ? 3 : 2; }
};

/// Renames every id of a fact; ids missing from the map are kept.
inline Fact rename_fact(const Fact& f, const std::map<std::string, std::string>& names) {
    std::vector<geom::Term> terms = f.terms();
    for (auto& t : terms) {
        for (auto& id : t) {
            auto it = names.find(id);
            if (it != names.end()) id = it->second;
        }
    }
    return Fact(f.predicate(), std::move(terms));
}

/// Union of the defining facts of every step, deduplicated, sorted.
inline std::vector<Fact> asserted_facts(const Program& p) {
    std::set<Fact> out;
    for (const auto& s : p.steps) {
        for (auto& f : step_facts(s.op, s.inputs, s.outputs)) out.insert(std::move(f));
    }
    return {out.begin(), out.end()};
}

namespace detail {

struct Token {
    std::string text;
    std::size_t line;
    std::size_t col;
};

struct Statement {
    std::vector<Token> tokens;
    std::string goal_text;  // raw text after '?', if any
    std::size_t line = 0;
    std::size_t col = 0;
    bool is_goal = false;
};

inline std::vector<Statement> split_statements(std::string_view text) {
    std::vector<Statement> out;
    Statement cur;
    std::size_t line = 1;
    std::size_t col = 1;
    auto flush = [&] {
        if (!cur.tokens.empty() || cur.is_goal) out.push_back(std::move(cur));
        cur = Statement{};
    };
    std::size_t i = 0;
    while (i < text.size()) {
        char const c = text[i];
        if (c == '\n' || c == ';') {
            flush();
            ++i;
            if (c == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
            continue;
        }
        if (c == '#') {
            while (i < text.size() && text[i] != '\n') ++i;
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            ++col;
            continue;
        }
        if (c == '?') {
            if (!cur.tokens.empty() || cur.is_goal) {
                throw ParseError(ErrorCode::syntax_error, line, col, "'?' must start a statement");
            }
            cur.is_goal = true;
            cur.line = line;
            cur.col = col;
            ++i;
            ++col;
            std::size_t start = i;
            while (i < text.size() && text[i] != '\n' && text[i] != ';' && text[i] != '#') ++i;
            cur.goal_text = std::string(text.substr(start, i - start));
            col += i - start;
            continue;
        }
        if (cur.is_goal) {
            throw ParseError(ErrorCode::syntax_error, line, col, "unexpected text after goal");
        }
        if (cur.tokens.empty()) {
            cur.line = line;
            cur.col = col;
        }
        if (c == '=') {
            cur.tokens.push_back({"=", line, col});
            ++i;
            ++col;
            continue;
        }
        std::size_t start = i;
        while (i < text.size() && (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '_')) ++i;
        if (i == start) {
            throw ParseError(ErrorCode::syntax_error, line, col, std::string("unexpected character '") + c + "'");
        }
        cur.tokens.push_back({std::string(text.substr(start, i - start)), line, col});
        col += i - start;
    }
    flush();
    return out;
}

}  // namespace detail

/// Validates referential integrity, kinds, limits and dimension mode.
/// Throws the matching Error on the first violation.
inline void validate(const Program& p) {
    std::map<std::string, ObjectKind> bound;
    bool spatial = false;
    bool planar_only = false;
    for (const auto& s : p.steps) {
        const auto* spec = find_operator(s.op);
        if (!spec) throw Error(ErrorCode::unknown_operator, "unknown operator '" + s.op + "'");
        if (s.inputs.size() != spec->inputs.size() || s.outputs.size() != spec->outputs.size()) {
            throw Error(ErrorCode::arity_mismatch, s.op + " takes " + std::to_string(spec->inputs.size()) +
                                                       " inputs and " + std::to_string(spec->outputs.size()) +
                                                       " outputs");
        }
        for (std::size_t k = 0; k < s.inputs.size(); ++k) {
            auto it = bound.find(s.inputs[k]);
            if (it == bound.end()) throw Error(ErrorCode::unbound_id, "'" + s.inputs[k] + "' is not bound");
            if (it->second != spec->inputs[k]) {
                throw Error(ErrorCode::arity_mismatch, s.op + " input " + std::to_string(k + 1) + " must be a " +
                                                           std::string(to_string(spec->inputs[k])));
            }
        }
        std::set<std::string> distinct(s.inputs.begin(), s.inputs.end());
        if (distinct.size() != s.inputs.size()) {
            throw Error(ErrorCode::arity_mismatch, s.op + " inputs must be distinct");
        }
        for (std::size_t k = 0; k < s.outputs.size(); ++k) {
            if (!is_identifier(s.outputs[k])) throw Error(ErrorCode::syntax_error, "bad id '" + s.outputs[k] + "'");
            if (!bound.emplace(s.outputs[k], spec->outputs[k]).second) {
                throw Error(ErrorCode::duplicate_id, "'" + s.outputs[k] + "' is already bound");
            }
        }
        spatial = spatial || spec->mode == SpaceMode::spatial;
        planar_only = planar_only || spec->mode == SpaceMode::planar;
        if (spatial && planar_only) {
            throw Error(ErrorCode::dimension_conflict, "'" + s.op + "' mixes planar-only and spatial operators");
        }
    }
    if (p.steps.size() > p.limits.max_steps) {
        throw Error(ErrorCode::limit_exceeded, std::to_string(p.steps.size()) + " steps exceed max_steps " +
                                                   std::to_string(p.limits.max_steps));
    }
    if (p.object_count() > p.limits.max_objects) {
        throw Error(ErrorCode::limit_exceeded, std::to_string(p.object_count()) + " objects exceed max_objects " +
                                                   std::to_string(p.limits.max_objects));
    }
    if (p.goal) {
        for (const auto& id : p.goal->ids()) {
            if (!bound.count(id)) throw Error(ErrorCode::unbound_id, "goal mentions unbound '" + id + "'");
        }
    }
}

/// Parses the construction DSL (see docs/dsl.md). User ids are kept;
/// call canonicalize() for the canonical naming.
inline Program parse_program(std::string_view text, const Limits& limits = {}) {
    Program p;
    p.limits = limits;
    std::map<std::string, ObjectKind> bound;
    for (auto& st : detail::split_statements(text)) {
        if (st.is_goal) {
            if (p.goal) throw ParseError(ErrorCode::syntax_error, st.line, st.col, "more than one goal");
            try {
                p.goal = geom::parse_fact(st.goal_text, p.kind_lookup());
            } catch (const ParseError&) {
                throw;
            } catch (const Error& e) {
                if (e.code() == ErrorCode::syntax_error) {
                    throw ParseError(ErrorCode::syntax_error, st.line, st.col, e.what());
                }
                throw;
            }
            continue;
        }
        auto eq = std::find_if(st.tokens.begin(), st.tokens.end(), [](const auto& t) { return t.text == "="; });
        if (eq == st.tokens.end()) throw ParseError(ErrorCode::syntax_error, st.line, st.col, "expected '='");
        if (eq == st.tokens.begin()) throw ParseError(ErrorCode::syntax_error, eq->line, eq->col, "missing outputs");
        if (std::next(eq) == st.tokens.end()) {
            throw ParseError(ErrorCode::syntax_error, eq->line, eq->col, "missing operator after '='");
        }
        Step s;
        for (auto it = st.tokens.begin(); it != eq; ++it) {
            if (!is_identifier(it->text)) {
                throw ParseError(ErrorCode::syntax_error, it->line, it->col, "bad id '" + it->text + "'");
            }
            s.outputs.push_back(it->text);
        }
        if (!is_identifier(std::next(eq)->text)) {
            throw ParseError(ErrorCode::syntax_error, std::next(eq)->line, std::next(eq)->col,
                             "expected an operator name, found '" + std::next(eq)->text + "'");
        }
        s.op = std::next(eq)->text;
        for (auto it = std::next(eq, 2); it != st.tokens.end(); ++it) {
            if (it->text == "=") throw ParseError(ErrorCode::syntax_error, it->line, it->col, "unexpected '='");
            s.inputs.push_back(it->text);
        }
        p.steps.push_back(std::move(s));
    }
    validate(p);
    return p;
}

inline std::string serialize(const Program& p) {
    std::string out;
    for (const auto& s : p.steps) {
        if (!out.empty()) out += "; ";
        for (std::size_t k = 0; k < s.outputs.size(); ++k) {
            if (k) out += ' ';
            out += s.outputs[k];
        }
        out += " = ";
        out += s.op;
        for (const auto& in : s.inputs) {
            out += ' ';
            out += in;
        }
    }
    if (p.goal) {
        if (!out.empty()) out += "; ";
        out += "? " + p.goal->str();
    }
    return out;
}

struct Canonical {
    Program program;
    std::map<std::string, std::string> renaming;  // old id -> canonical id
};

/// Relabels objects a, b, c, ... in order of introduction and sorts the
/// inputs of symmetric operators. Idempotent.
inline Canonical canonicalize(const Program& p) {
    Canonical c;
    c.program.limits = p.limits;
    std::size_t next = 0;
    for (const auto& s : p.steps) {
        Step t;
        t.op = s.op;
        for (const auto& in : s.inputs) t.inputs.push_back(c.renaming.at(in));
        for (const auto& out : s.outputs) {
            auto name = object_name(next++);
            c.renaming[out] = name;
            t.outputs.push_back(name);
        }
        switch (find_operator(s.op)->symmetry) {
        case InputSymmetry::all: std::sort(t.inputs.begin(), t.inputs.end(), ShortlexLess{}); break;
        case InputSymmetry::ends:
            if (shortlex_less(t.inputs.back(), t.inputs.front())) std::swap(t.inputs.front(), t.inputs.back());
            break;
        case InputSymmetry::none: break;
        }
        c.program.steps.push_back(std::move(t));
    }
    if (p.goal) c.program.goal = rename_fact(*p.goal, c.renaming);
    return c;
}

}  // namespace geoform::construct
