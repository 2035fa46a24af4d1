#pragma once

#include <algorithm>
#include <array>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "geoform/core/error.hpp"
#include "geoform/core/ids.hpp"
#include "geoform/geom/types.hpp"

namespace geoform::geom {

enum class Predicate { coll, para, perp, cong, midp, eqangle, cyclic, on_line, on_circle, on_plane, eqdist };

inline constexpr std::array<Predicate, 11> all_predicates{
    Predicate::coll,    Predicate::para,    Predicate::perp,      Predicate::cong,
    Predicate::midp,    Predicate::eqangle, Predicate::cyclic,    Predicate::on_line,
    Predicate::on_circle, Predicate::on_plane, Predicate::eqdist,
};

constexpr std::string_view to_string(Predicate p) {
    switch (p) {
    case Predicate::coll: return "coll";
    case Predicate::para: return "para";
    case Predicate::perp: return "perp";
    case Predicate::cong: return "cong";
    case Predicate::midp: return "midp";
    case Predicate::eqangle: return "eqangle";
    case Predicate::cyclic: return "cyclic";
    case Predicate::on_line: return "on_line";
    case Predicate::on_circle: return "on_circle";
    case Predicate::on_plane: return "on_plane";
    case Predicate::eqdist: return "eqdist";
    }
    return "?";
}

inline std::optional<Predicate> parse_predicate(std::string_view s) {
    for (auto p : all_predicates) {
        if (to_string(p) == s) return p;
    }
    return std::nullopt;
}

/// True for predicates whose terms are directions (a line id or a segment).
constexpr bool is_directional(Predicate p) { return p == Predicate::para || p == Predicate::perp; }

/// A group of ids acting as one argument: a point, a line, a segment (2
/// points) or a vertex angle (3 points, vertex in the middle).
using Term = std::vector<std::string>;

inline bool term_less(const Term& a, const Term& b) {
    auto const n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (a[i] != b[i]) return shortlex_less(a[i], b[i]);
    }
    return a.size() < b.size();
}

inline bool terms_less(const std::vector<Term>& a, const std::vector<Term>& b) {
    auto const n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (a[i] != b[i]) return term_less(a[i], b[i]);
    }
    return a.size() < b.size();
}

namespace detail {

/// Closure of a set of generator permutations over n positions.
inline std::vector<std::vector<int>> permutation_group(int n, const std::vector<std::vector<int>>& gens) {
    std::vector<int> id(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) id[static_cast<std::size_t>(i)] = i;
    std::set<std::vector<int>> seen{id};
    std::vector<std::vector<int>> out{id};
    for (std::size_t k = 0; k < out.size(); ++k) {
        for (const auto& g : gens) {
            std::vector<int> next(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i) {
                next[static_cast<std::size_t>(i)] = out[k][static_cast<std::size_t>(g[static_cast<std::size_t>(i)])];
            }
            if (seen.insert(next).second) out.push_back(next);
        }
    }
    return out;
}

inline std::vector<std::vector<int>> symmetric_group(int n) {
    std::vector<std::vector<int>> gens;
    if (n >= 2) {
        std::vector<int> swap01(static_cast<std::size_t>(n)), cycle(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            swap01[static_cast<std::size_t>(i)] = i;
            cycle[static_cast<std::size_t>(i)] = (i + 1) % n;
        }
        std::swap(swap01[0], swap01[1]);
        gens = {swap01, cycle};
    }
    return permutation_group(n, gens);
}

}  // namespace detail

/// Whether `terms` is a valid argument shape for `p`.
inline bool valid_shape(Predicate p, const std::vector<Term>& terms) {
    auto sizes_are = [&](std::initializer_list<std::size_t> sizes) {
        if (terms.size() != sizes.size()) return false;
        std::size_t i = 0;
        for (auto s : sizes) {
            if (terms[i++].size() != s) return false;
        }
        return true;
    };
    auto all_directions = [&](std::size_t count) {
        if (terms.size() != count) return false;
        return std::all_of(terms.begin(), terms.end(), [](const Term& t) { return t.size() == 1 || t.size() == 2; });
    };
    for (const auto& t : terms) {
        for (const auto& id : t) {
            if (id.empty()) return false;
        }
    }
    switch (p) {
    case Predicate::coll: return sizes_are({1, 1, 1});
    case Predicate::cyclic:
        return terms.size() >= 4 &&
               std::all_of(terms.begin(), terms.end(), [](const Term& t) { return t.size() == 1; });
    case Predicate::cong: return sizes_are({2, 2});
    case Predicate::midp:
    case Predicate::eqdist: return sizes_are({1, 2});
    case Predicate::on_line:
    case Predicate::on_circle:
    case Predicate::on_plane: return sizes_are({1, 1});
    case Predicate::para:
    case Predicate::perp: return all_directions(2);
    case Predicate::eqangle: return sizes_are({3, 3}) || all_directions(4);
    }
    return false;
}

/// Term-permutation part of a predicate's symmetry group for the given
/// shape. Reversal of multi-id terms is handled separately.
inline const std::vector<std::vector<int>>& term_permutations(Predicate p, std::size_t nterms) {
    static const std::vector<std::vector<int>> identity1{{0}};
    static const std::vector<std::vector<int>> identity2{{0, 1}};
    static const std::vector<std::vector<int>> swap2 = detail::permutation_group(2, {{1, 0}});
    static const std::vector<std::vector<int>> s3 = detail::symmetric_group(3);
    static const std::vector<std::vector<int>> angle4 =
        detail::permutation_group(4, {{2, 3, 0, 1}, {1, 0, 3, 2}, {0, 2, 1, 3}});
    static std::map<std::size_t, std::vector<std::vector<int>>> cyclic_cache;
    switch (p) {
    case Predicate::coll: return s3;
    case Predicate::cyclic: {
        // Called with small n only; computed once per arity.
        static const std::vector<std::vector<int>> s4 = detail::symmetric_group(4);
        if (nterms == 4) return s4;
        auto it = cyclic_cache.find(nterms);
        if (it == cyclic_cache.end()) {
            it = cyclic_cache.emplace(nterms, detail::symmetric_group(static_cast<int>(nterms))).first;
        }
        return it->second;
    }
    case Predicate::cong:
    case Predicate::para:
    case Predicate::perp: return swap2;
    case Predicate::eqangle: return nterms == 2 ? swap2 : angle4;
    case Predicate::midp:
    case Predicate::eqdist:
    case Predicate::on_line:
    case Predicate::on_circle:
    case Predicate::on_plane: return identity2;
    }
    return identity1;
}

/// Whether term i of a fact may be reversed without changing its meaning
/// (segments and vertex angles).
inline bool reversible_term(Predicate p, const Term& t, std::size_t index) {
    if (t.size() < 2) return false;
    switch (p) {
    case Predicate::midp:
    case Predicate::eqdist: return index == 1;
    default: return true;
    }
}

inline Term normalized_term(Predicate p, const Term& t, std::size_t index) {
    if (!reversible_term(p, t, index)) return t;
    Term r(t.rbegin(), t.rend());
    return term_less(r, t) ? r : t;
}

/// A predicate instance in canonical form. Two facts that are equal under
/// the predicate's symmetry group have identical terms.
class Fact {
  public:
    Fact() = default;

    /// Builds and canonicalizes. Throws ArityMismatch on an invalid shape.
    Fact(Predicate predicate, std::vector<Term> terms) : m_predicate(predicate), m_terms(std::move(terms)) {
        if (!valid_shape(m_predicate, m_terms)) {
            throw Error(ErrorCode::arity_mismatch, "invalid arguments for " + std::string(to_string(m_predicate)));
        }
        canonicalize();
    }

    Predicate predicate() const noexcept { return m_predicate; }
    const std::vector<Term>& terms() const noexcept { return m_terms; }

    std::vector<std::string> args() const {
        std::vector<std::string> out;
        for (const auto& t : m_terms) out.insert(out.end(), t.begin(), t.end());
        return out;
    }

    /// Distinct ids mentioned by the fact.
    std::set<std::string, ShortlexLess> ids() const {
        std::set<std::string, ShortlexLess> out;
        for (const auto& t : m_terms) out.insert(t.begin(), t.end());
        return out;
    }

    bool is_vertex_angle() const { return m_predicate == Predicate::eqangle && m_terms.size() == 2; }

    /// Term positions that denote directions (line or segment).
    bool directional_terms() const {
        return is_directional(m_predicate) || (m_predicate == Predicate::eqangle && m_terms.size() == 4);
    }

    std::string str() const {
        std::string out(to_string(m_predicate));
        out += '(';
        bool first = true;
        for (const auto& t : m_terms) {
            for (const auto& id : t) {
                if (!first) out += ',';
                out += id;
                first = false;
            }
        }
        out += ')';
        return out;
    }

    /// Every representation equivalent to this fact under its symmetry
    /// group, including term reversals.
    std::vector<std::vector<Term>> orbit() const {
        std::vector<std::vector<Term>> out;
        std::set<std::vector<Term>> seen;
        for (const auto& perm : term_permutations(m_predicate, m_terms.size())) {
            std::vector<Term> base(m_terms.size());
            for (std::size_t i = 0; i < m_terms.size(); ++i) base[i] = m_terms[static_cast<std::size_t>(perm[i])];
            std::vector<std::size_t> flips;
            for (std::size_t i = 0; i < base.size(); ++i) {
                if (reversible_term(m_predicate, base[i], i)) flips.push_back(i);
            }
            for (std::size_t mask = 0; mask < (std::size_t{1} << flips.size()); ++mask) {
                auto rep = base;
                for (std::size_t b = 0; b < flips.size(); ++b) {
                    if (mask & (std::size_t{1} << b)) std::reverse(rep[flips[b]].begin(), rep[flips[b]].end());
                }
                if (seen.insert(rep).second) out.push_back(std::move(rep));
            }
        }
        return out;
    }

    /// Facts that hold trivially or cannot hold (repeated points, a segment
    /// compared with itself). Deduction never emits them.
    bool degenerate() const {
        for (std::size_t i = 0; i < m_terms.size(); ++i) {
            const auto& t = m_terms[i];
            for (std::size_t a = 0; a < t.size(); ++a) {
                for (std::size_t b = a + 1; b < t.size(); ++b) {
                    if (t[a] == t[b]) return true;
                }
            }
        }
        switch (m_predicate) {
        case Predicate::coll:
        case Predicate::cyclic: {
            auto ids = args();
            std::sort(ids.begin(), ids.end());
            return std::adjacent_find(ids.begin(), ids.end()) != ids.end();
        }
        case Predicate::midp:
        case Predicate::eqdist: {
            const auto& c = m_terms[0][0];
            return c == m_terms[1][0] || c == m_terms[1][1];
        }
        case Predicate::cong:
        case Predicate::para:
        case Predicate::perp: return m_terms[0] == m_terms[1];
        case Predicate::eqangle:
            if (m_terms.size() == 2) return m_terms[0] == m_terms[1];
            for (const auto& rep : orbit()) {
                if (rep[0] == rep[2] && rep[1] == rep[3]) return true;
            }
            return m_terms[0] == m_terms[1] && m_terms[2] == m_terms[3];
        default: return false;
        }
    }

    friend bool operator==(const Fact& a, const Fact& b) {
        return a.m_predicate == b.m_predicate && a.m_terms == b.m_terms;
    }
    friend bool operator!=(const Fact& a, const Fact& b) { return !(a == b); }
    friend bool operator<(const Fact& a, const Fact& b) {
        if (a.m_predicate != b.m_predicate) return a.m_predicate < b.m_predicate;
        return terms_less(a.m_terms, b.m_terms);
    }

  private:
    void canonicalize() {
        for (std::size_t i = 0; i < m_terms.size(); ++i) {
            // Reversibility depends on position only for midp/eqdist, whose
            // terms are never permuted.
            m_terms[i] = normalized_term(m_predicate, m_terms[i], i);
        }
        const auto& perms = term_permutations(m_predicate, m_terms.size());
        std::vector<Term> best = m_terms;
        std::vector<Term> cand(m_terms.size());
        for (const auto& perm : perms) {
            for (std::size_t i = 0; i < m_terms.size(); ++i) cand[i] = m_terms[static_cast<std::size_t>(perm[i])];
            if (terms_less(cand, best)) best = cand;
        }
        m_terms = std::move(best);
    }

    Predicate m_predicate = Predicate::coll;
    std::vector<Term> m_terms;
};

struct FactHash {
    std::size_t operator()(const Fact& f) const noexcept {
        std::uint64_t h = fnv1a(to_string(f.predicate()));
        for (const auto& t : f.terms()) {
            h = fnv1a("|", h);
            for (const auto& id : t) {
                h = fnv1a(id, h);
                h = fnv1a(",", h);
            }
        }
        return static_cast<std::size_t>(h);
    }
};

using KindLookup = std::function<std::optional<ObjectKind>(std::string_view)>;

namespace detail {

inline std::vector<Term> group_fixed(const std::vector<std::string>& ids, std::initializer_list<std::size_t> sizes) {
    std::vector<Term> out;
    std::size_t pos = 0;
    for (auto s : sizes) {
        if (pos + s > ids.size()) return {};
        out.emplace_back(ids.begin() + static_cast<std::ptrdiff_t>(pos), ids.begin() + static_cast<std::ptrdiff_t>(pos + s));
        pos += s;
    }
    if (pos != ids.size()) return {};
    return out;
}

/// Splits a flat id list into direction terms: a line id is one term, two
/// consecutive point ids form a segment.
inline std::vector<Term> group_directions(const std::vector<std::string>& ids, const KindLookup& kinds) {
    std::vector<Term> out;
    for (std::size_t i = 0; i < ids.size();) {
        auto k = kinds(ids[i]);
        if (k && *k == ObjectKind::line) {
            out.push_back({ids[i]});
            ++i;
        } else {
            if (i + 1 >= ids.size()) return {};
            auto k2 = kinds(ids[i + 1]);
            if (k2 && *k2 == ObjectKind::line) return {};
            out.push_back({ids[i], ids[i + 1]});
            i += 2;
        }
    }
    return out;
}

}  // namespace detail

/// Groups a flat argument list into terms. With no kind information,
/// directional predicates are resolved by arity alone (2 or 4 args for
/// para/perp; 4, 6 or 8 for eqangle).
inline Fact make_fact(Predicate p, const std::vector<std::string>& ids, const KindLookup& kinds = nullptr) {
    std::vector<Term> terms;
    switch (p) {
    case Predicate::coll: terms = detail::group_fixed(ids, {1, 1, 1}); break;
    case Predicate::cyclic:
        for (const auto& id : ids) terms.push_back({id});
        break;
    case Predicate::cong: terms = detail::group_fixed(ids, {2, 2}); break;
    case Predicate::midp:
    case Predicate::eqdist: terms = detail::group_fixed(ids, {1, 2}); break;
    case Predicate::on_line:
    case Predicate::on_circle:
    case Predicate::on_plane: terms = detail::group_fixed(ids, {1, 1}); break;
    case Predicate::para:
    case Predicate::perp:
        if (kinds) {
            terms = detail::group_directions(ids, kinds);
        } else if (ids.size() == 2) {
            terms = detail::group_fixed(ids, {1, 1});
        } else if (ids.size() == 4) {
            terms = detail::group_fixed(ids, {2, 2});
        }
        break;
    case Predicate::eqangle: {
        bool all_points = true;
        if (kinds) {
            for (const auto& id : ids) {
                auto k = kinds(id);
                if (k && *k != ObjectKind::point) all_points = false;
            }
        }
        if (ids.size() == 6 && all_points) {
            terms = detail::group_fixed(ids, {3, 3});
        } else if (kinds) {
            terms = detail::group_directions(ids, kinds);
        } else if (ids.size() == 4) {
            terms = detail::group_fixed(ids, {1, 1, 1, 1});
        } else if (ids.size() == 8) {
            terms = detail::group_fixed(ids, {2, 2, 2, 2});
        }
        break;
    }
    }
    if (terms.empty() || !valid_shape(p, terms)) {
        throw Error(ErrorCode::arity_mismatch,
                    std::string(to_string(p)) + " does not accept " + std::to_string(ids.size()) + " arguments");
    }
    return Fact(p, std::move(terms));
}

/// Parses `pred(a,b,c)`.
inline Fact parse_fact(std::string_view text, const KindLookup& kinds = nullptr) {
    auto s = trim(text);
    auto open = s.find('(');
    if (open == std::string::npos || s.empty() || s.back() != ')') {
        throw Error(ErrorCode::syntax_error, "expected pred(args): '" + s + "'");
    }
    auto name = trim(std::string_view(s).substr(0, open));
    auto pred = parse_predicate(name);
    if (!pred) {
        throw Error(ErrorCode::syntax_error, "unknown predicate '" + name + "'");
    }
    std::vector<std::string> ids;
    std::string_view body(s);
    body = body.substr(open + 1, body.size() - open - 2);
    std::size_t start = 0;
    while (start <= body.size()) {
        auto comma = body.find(',', start);
        auto piece = trim(body.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (!is_identifier(piece)) {
            throw Error(ErrorCode::syntax_error, "bad argument '" + piece + "' in '" + s + "'");
        }
        ids.push_back(piece);
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return make_fact(*pred, ids, kinds);
}

}  // namespace geoform::geom

template <>
struct std::hash<geoform::geom::Fact> : geoform::geom::FactHash {};
