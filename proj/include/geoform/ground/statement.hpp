#pragma once

#include <cctype>
#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace geoform::ground {

/// Tokens of a formal statement. Text is decoded as UTF-8 so that Greek
/// letters and letterlike symbols (ℝ, ℏ) are identifier characters.
enum class TokKind { ident, number, ref, symbol };

struct Token {
    TokKind kind;
    std::string text;
};

namespace detail {

inline std::size_t utf8_decode(std::string_view s, std::size_t i, char32_t& cp) {
    auto const b = static_cast<unsigned char>(s[i]);
    auto cont = [&](std::size_t k) -> unsigned {
        return i + k < s.size() ? static_cast<unsigned char>(s[i + k]) & 0x3Fu : 0u;
    };
    if (b < 0x80) {
        cp = b;
        return 1;
    }
    if ((b >> 5) == 0x6) {
        cp = ((b & 0x1Fu) << 6) | cont(1);
        return 2;
    }
    if ((b >> 4) == 0xE) {
        cp = ((b & 0x0Fu) << 12) | (cont(1) << 6) | cont(2);
        return 3;
    }
    cp = ((b & 0x07u) << 18) | (cont(1) << 12) | (cont(2) << 6) | cont(3);
    return 4;
}

inline bool ident_start(char32_t c) {
    if (c < 0x80) return std::isalpha(static_cast<int>(c)) || c == '_';
    return (c >= 0xC0 && c <= 0x24F && c != 0xD7 && c != 0xF7)  // Latin-1 and Latin Extended letters
           || (c >= 0x370 && c <= 0x3FF && c != 0x3BB)           // Greek, except λ
           || (c >= 0x2100 && c <= 0x214F);                       // letterlike symbols
}

inline bool ident_continue(char32_t c) {
    if (c < 0x80) return std::isalnum(static_cast<int>(c)) || c == '_' || c == '.' || c == '\'';
    return ident_start(c) || (c >= 0x2080 && c <= 0x209C) || c == 0x2032;  // subscripts, prime
}

}  // namespace detail

inline std::vector<Token> tokenize_statement(std::string_view s) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < s.size()) {
        char32_t c = 0;
        auto n = detail::utf8_decode(s, i, c);
        if (c < 0x80 && std::isspace(static_cast<int>(c))) {
            i += n;
            continue;
        }
        auto take_while = [&](std::size_t start, auto pred) {
            std::size_t j = start;
            while (j < s.size()) {
                char32_t d = 0;
                auto m = detail::utf8_decode(s, j, d);
                if (!pred(d)) break;
                j += m;
            }
            return j;
        };
        if (detail::ident_start(c)) {
            auto j = take_while(i + n, detail::ident_continue);
            // A trailing '.' belongs to the surrounding text, not the name.
            while (j > i + n && s[j - 1] == '.') --j;
            out.push_back({TokKind::ident, std::string(s.substr(i, j - i))});
            i = j;
        } else if (c < 0x80 && std::isdigit(static_cast<int>(c))) {
            auto j = take_while(i, [](char32_t d) { return d < 0x80 && (std::isdigit(static_cast<int>(d)) || d == '.'); });
            out.push_back({TokKind::number, std::string(s.substr(i, j - i))});
            i = j;
        } else if (c == '@') {
            auto j = take_while(i + 1, detail::ident_continue);
            out.push_back({TokKind::ref, std::string(s.substr(i + 1, j - i - 1))});
            i = j;
        } else {
            out.push_back({TokKind::symbol, std::string(s.substr(i, n))});
            i += n;
        }
    }
    return out;
}

/// Names every statement may use without declaring them.
inline const std::set<std::string>& statement_keywords() {
    static const std::set<std::string> k{
        "theorem", "lemma", "axiom", "def", "structure", "fun", "Observed", "Prop", "Type", "Quantity",
        "True",    "False", "Real",  "Nat", "Int",       "Set", "ℝ",        "ℕ",    "ℤ",    "ℂ",
        "sqrt",    "exp",   "log",   "sin", "cos",       "M",   "L",        "T",    "Q",    "Θ"};
    return k;
}

struct StatementShape {
    bool ok = true;
    std::string message;
    std::set<std::string> free_identifiers;  // neither bound nor keywords
    std::set<std::string> refs;              // @ids
};

inline bool is_binder(const Token& t) {
    return (t.kind == TokKind::symbol && (t.text == "∀" || t.text == "∃" || t.text == "λ")) ||
           (t.kind == TokKind::ident && (t.text == "fun" || t.text == "∃!"));
}

/// Structural analysis: balanced brackets, every binder closed by ',' (or
/// '=>' / '↦') before its group ends, and the free identifiers.
inline StatementShape analyze_statement(std::string_view statement) {
    StatementShape out;
    auto toks = tokenize_statement(statement);
    auto fail = [&](std::string msg) {
        if (out.ok) {
            out.ok = false;
            out.message = std::move(msg);
        }
    };
    if (toks.empty()) fail("empty statement");

    auto closer = [](const std::string& open) -> std::string {
        if (open == "(") return ")";
        if (open == "[") return "]";
        if (open == "{") return "}";
        if (open == "⟨") return "⟩";
        return "";
    };
    std::vector<std::string> stack;
    std::set<std::string> bound;
    // Open binders: the bracket depth they started at.
    std::vector<std::size_t> binders;
    bool in_binder_head = false;
    // Inside a binder head, names after ':' are types, not bound variables.
    constexpr std::size_t no_type = static_cast<std::size_t>(-1);
    std::size_t type_depth = no_type;

    for (std::size_t i = 0; i < toks.size(); ++i) {
        const auto& t = toks[i];
        if (t.kind == TokKind::symbol) {
            if (!closer(t.text).empty()) {
                stack.push_back(t.text);
                continue;
            }
            if (t.text == ")" || t.text == "]" || t.text == "}" || t.text == "⟩") {
                if (stack.empty() || closer(stack.back()) != t.text) {
                    fail("unbalanced '" + t.text + "'");
                    break;
                }
                if (!binders.empty() && in_binder_head && binders.back() == stack.size()) {
                    fail("binder without ',' before '" + t.text + "'");
                    break;
                }
                while (!binders.empty() && binders.back() >= stack.size()) binders.pop_back();
                if (type_depth != no_type && type_depth >= stack.size()) type_depth = no_type;
                stack.pop_back();
                continue;
            }
            bool const arrow = t.text == "↦" || (t.text == "=" && i + 1 < toks.size() && toks[i + 1].text == ">");
            if (in_binder_head && (t.text == "," || arrow) && binders.back() == stack.size()) {
                in_binder_head = false;
                type_depth = no_type;
                continue;
            }
            if (in_binder_head && t.text == ":") type_depth = stack.size();
        }
        if (is_binder(t)) {
            if (in_binder_head) {
                fail("nested binder inside a binder head");
                break;
            }
            binders.push_back(stack.size());
            in_binder_head = true;
            continue;
        }
        if (t.kind == TokKind::ident) {
            if (in_binder_head && type_depth == no_type) bound.insert(t.text);
            else if (!bound.count(t.text) && !statement_keywords().count(t.text)) out.free_identifiers.insert(t.text);
        } else if (t.kind == TokKind::ref) {
            if (t.text.empty()) fail("empty @reference");
            out.refs.insert(t.text);
        }
    }
    if (out.ok && !stack.empty()) fail("unclosed '" + stack.back() + "'");
    if (out.ok && in_binder_head) fail("binder without ','");
    return out;
}

/// Turns informal text into an identifier: words are capitalized and
/// joined, '=' becomes "Eq", '<' becomes "Lt".
inline std::string identifier_for(std::string_view text) {
    std::string out;
    bool cap = true;
    for (std::size_t i = 0; i < text.size();) {
        char32_t c = 0;
        auto n = detail::utf8_decode(text, i, c);
        if (c == '\'' || c == 0x2019) {
            // Apostrophes join: "Newton's" -> "Newtons".
        } else if (c == '=') {
            out += "Eq";
            cap = true;
        } else if (c == '<') {
            out += "Lt";
            cap = true;
        } else if (detail::ident_continue(c) && c != '.' && c != '\'') {
            if (cap && c < 0x80) out += static_cast<char>(std::toupper(static_cast<int>(c)));
            else out.append(text.substr(i, n));
            cap = false;
        } else {
            cap = true;
        }
        i += n;
    }
    if (out.empty()) return "Node";
    char32_t first = 0;
    detail::utf8_decode(out, 0, first);
    if (!detail::ident_start(first)) out = "N" + out;
    return out;
}

}  // namespace geoform::ground
