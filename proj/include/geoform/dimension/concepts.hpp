#pragma once

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "geoform/core/error.hpp"
#include "geoform/core/ids.hpp"
#include "geoform/dimension/dim_expr.hpp"

namespace geoform::dim {

enum class Domain { math, physics };

inline std::string_view to_string(Domain d) { return d == Domain::math ? "math" : "physics"; }

inline Domain parse_domain(std::string_view s) {
    if (s == "math") return Domain::math;
    if (s == "physics") return Domain::physics;
    throw Error(ErrorCode::unknown_domain, "unknown domain '" + std::string(s) + "' (expected math or physics)");
}

enum class Category {
    primitive,
    atomic_parameter,
    standard_predicate,
    quantum_relativistic_parameter,
    numeric_constraint,
    derived_dimension,
    dimensionless_group,
    fundamental_law,
    base_abstract_type,
    math_operation,
    conditional_atomic,
};

inline constexpr std::array<std::pair<Category, std::string_view>, 11> category_names{{
    {Category::primitive, "primitive"},
    {Category::atomic_parameter, "atomic_parameter"},
    {Category::standard_predicate, "standard_predicate"},
    {Category::quantum_relativistic_parameter, "quantum_relativistic_parameter"},
    {Category::numeric_constraint, "numeric_constraint"},
    {Category::derived_dimension, "derived_dimension"},
    {Category::dimensionless_group, "dimensionless_group"},
    {Category::fundamental_law, "fundamental_law"},
    {Category::base_abstract_type, "base_abstract_type"},
    {Category::math_operation, "math_operation"},
    {Category::conditional_atomic, "conditional_atomic"},
}};

inline std::string_view to_string(Category c) {
    for (const auto& [k, n] : category_names) {
        if (k == c) return n;
    }
    return "?";
}

inline std::optional<Category> parse_category(std::string_view s) {
    for (const auto& [k, n] : category_names) {
        if (n == s) return k;
    }
    return std::nullopt;
}

struct ConceptEntry {
    std::string name;
    Domain domain = Domain::math;
    Category category = Category::primitive;
    std::optional<DimExpr> dim;
};

enum class VerdictKind { dim, axiom, primitive, non_terminal };

inline std::string_view to_string(VerdictKind k) {
    switch (k) {
    case VerdictKind::dim: return "Dim";
    case VerdictKind::axiom: return "Axiom";
    case VerdictKind::primitive: return "Primitive";
    case VerdictKind::non_terminal: return "NonTerminal";
    }
    return "?";
}

struct TerminationVerdict {
    VerdictKind kind = VerdictKind::non_terminal;
    std::string name;                   // tabled name, or the query when untabled
    std::optional<DimExpr> dim;         // set iff kind == dim
    std::optional<Category> category;   // matched row
    std::string reason;

    bool terminal() const noexcept { return kind != VerdictKind::non_terminal; }

    std::string str() const {
        switch (kind) {
        case VerdictKind::dim: return "Dim(" + dim->str() + ")";
        case VerdictKind::axiom: return "Axiom(" + name + ")";
        case VerdictKind::primitive: return "Primitive(" + name + ")";
        case VerdictKind::non_terminal: return "NonTerminal";
        }
        return "?";
    }
};

/// Lookup key: ASCII case folded, with spaces, underscores, hyphens and
/// apostrophes dropped.
inline std::string normalize_concept(std::string_view s) {
    std::string out;
    for (char c : s) {
        if (c == ' ' || c == '_' || c == '-' || c == '\'' || c == '\t') continue;
        out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return out;
}

namespace detail {

/// "SideCount=6", "Angle = 90", "VertexCountEq6": a named quantity pinned
/// to a number.
inline bool is_numeric_constraint(std::string_view s) {
    auto key = normalize_concept(s);
    std::size_t split = key.find('=');
    std::size_t value_at = split == std::string::npos ? std::string::npos : split + 1;
    if (split == std::string::npos) {
        auto eq = key.rfind("eq");
        if (eq == std::string::npos || eq == 0) return false;
        split = eq;
        value_at = eq + 2;
    }
    if (split == 0 || value_at >= key.size()) return false;
    for (std::size_t i = 0; i < split; ++i) {
        if (!std::isalnum(static_cast<unsigned char>(key[i])) && key[i] != '.') return false;
    }
    bool digit = false;
    for (std::size_t i = value_at; i < key.size(); ++i) {
        char const c = key[i];
        if (std::isdigit(static_cast<unsigned char>(c))) digit = true;
        else if (c != '.' && !(c == '-' && i == value_at)) return false;
    }
    return digit;
}

}  // namespace detail

/// The termination table: both domains, loaded once and then read-only.
class ConceptTable {
  public:
    static ConceptTable parse(std::string_view text) {
        ConceptTable t;
        std::istringstream in{std::string(text)};
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            auto hash = line.find('#');
            auto body = trim(std::string_view(line).substr(0, hash));
            if (body.empty()) continue;
            std::istringstream fields(body);
            std::vector<std::string> tok;
            for (std::string f; fields >> f;) tok.push_back(f);
            auto fail = [&](const std::string& msg) {
                throw ParseError(ErrorCode::concept_table_syntax, line_no, 1, msg);
            };
            if (tok.size() != 3 && tok.size() != 3 + base_count) {
                fail("expected 'name domain category' optionally followed by 5 exponents");
            }
            ConceptEntry e;
            e.name = tok[0];
            try {
                e.domain = parse_domain(tok[1]);
            } catch (const Error& err) {
                fail(err.what());
            }
            auto cat = parse_category(tok[2]);
            if (!cat) fail("unknown category '" + tok[2] + "'");
            e.category = *cat;
            if (tok.size() > 3) {
                std::array<Rational, base_count> ex{};
                try {
                    for (std::size_t i = 0; i < base_count; ++i) ex[i] = detail::parse_rational(tok[3 + i]);
                } catch (const Error& err) {
                    fail(err.what());
                }
                e.dim = DimExpr(ex);
            }
            bool const needs_dim = e.category == Category::derived_dimension ||
                                   e.category == Category::atomic_parameter ||
                                   e.category == Category::dimensionless_group ||
                                   e.category == Category::conditional_atomic;
            if (needs_dim && !e.dim) fail(e.name + ": category " + tok[2] + " needs an exponent vector");
            if ((e.category == Category::fundamental_law || e.category == Category::math_operation) && e.dim) {
                fail(e.name + ": category " + tok[2] + " takes no exponent vector");
            }
            auto key = std::make_pair(e.domain, normalize_concept(e.name));
            if (t.m_index.count(key)) fail("duplicate concept '" + e.name + "' in " + tok[1]);
            t.m_index.emplace(key, t.m_entries.size());
            t.m_entries.push_back(std::move(e));
        }
        return t;
    }

    static ConceptTable load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw Error(ErrorCode::io_error, "cannot read concept table " + path);
        std::stringstream ss;
        ss << in.rdbuf();
        return parse(ss.str());
    }

#ifdef GEOFORM_DATA_DIR
    static const ConceptTable& bundled() {
        static const ConceptTable t = load(std::string(GEOFORM_DATA_DIR) + "/concepts.txt");
        return t;
    }
#endif

    const std::vector<ConceptEntry>& entries() const noexcept { return m_entries; }

    const ConceptEntry* find(std::string_view name, Domain domain) const {
        auto it = m_index.find({domain, normalize_concept(name)});
        return it == m_index.end() ? nullptr : &m_entries[it->second];
    }

    /// Table-driven verdict. Conditional atomics stay terminal unless the
    /// input describes how the component is constructed.
    TerminationVerdict classify(std::string_view concept_name, Domain domain,
                                bool construction_described = false) const {
        TerminationVerdict v;
        v.name = std::string(concept_name);
        const auto* e = find(concept_name, domain);
        if (!e) {
            if (domain == Domain::math && detail::is_numeric_constraint(concept_name)) {
                v.kind = VerdictKind::primitive;
                v.category = Category::numeric_constraint;
                v.reason = "math/numeric_constraint (pattern)";
                return v;
            }
            v.reason = "not in the " + std::string(to_string(domain)) + " table";
            return v;
        }
        v.name = e->name;
        v.category = e->category;
        v.reason = std::string(to_string(domain)) + "/" + std::string(to_string(e->category));
        switch (e->category) {
        case Category::fundamental_law: v.kind = VerdictKind::axiom; break;
        case Category::conditional_atomic:
            if (construction_described) {
                v.kind = VerdictKind::non_terminal;
                v.reason += " (construction described)";
                break;
            }
            [[fallthrough]];
        case Category::atomic_parameter:
        case Category::derived_dimension:
        case Category::dimensionless_group:
        case Category::quantum_relativistic_parameter:
            if (e->dim) {
                v.kind = VerdictKind::dim;
                v.dim = e->dim;
            } else {
                v.kind = VerdictKind::primitive;
            }
            break;
        default: v.kind = VerdictKind::primitive; break;
        }
        return v;
    }

    TerminationVerdict classify(std::string_view concept_name, std::string_view domain,
                                bool construction_described = false) const {
        return classify(concept_name, parse_domain(domain), construction_described);
    }

    /// Dimension of a tabled quantity, physics rows first.
    std::optional<DimExpr> dim_of(std::string_view concept_name) const {
        for (auto d : {Domain::physics, Domain::math}) {
            if (const auto* e = find(concept_name, d); e && e->dim) return e->dim;
        }
        return std::nullopt;
    }

  private:
    std::vector<ConceptEntry> m_entries;
    std::map<std::pair<Domain, std::string>, std::size_t> m_index;
};

}  // namespace geoform::dim
