#pragma once

#include <cctype>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include "geoform/core/error.hpp"

namespace geoform::ground {

/// Closed-form expressions attached to declarations with @formula:
/// numbers, variables, + - * / ^, unary minus, parentheses and the
/// functions sqrt, exp, log, sin, cos, abs.
class Formula {
  public:
    explicit Formula(std::string text) : m_text(std::move(text)) {
        // Parse once up front so syntax errors surface at construction.
        Parser p{m_text, nullptr, &m_vars};
        p.run();
    }

    const std::string& text() const noexcept { return m_text; }
    const std::set<std::string>& variables() const noexcept { return m_vars; }

    /// nullopt when some variable is unbound.
    std::optional<double> evaluate(const std::map<std::string, double>& env) const {
        for (const auto& v : m_vars) {
            if (!env.count(v)) return std::nullopt;
        }
        Parser p{m_text, &env, nullptr};
        return p.run();
    }

  private:
    struct Parser {
        std::string_view s;
        const std::map<std::string, double>* env;
        std::set<std::string>* vars;
        std::size_t pos = 0;

        [[noreturn]] void fail(const std::string& msg) const {
            throw Error(ErrorCode::syntax_error,
                        "formula '" + std::string(s) + "' at " + std::to_string(pos + 1) + ": " + msg);
        }
        void skip() {
            while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
        }
        bool eat(char c) {
            skip();
            if (pos < s.size() && s[pos] == c) {
                ++pos;
                return true;
            }
            return false;
        }

        double run() {
            double v = sum();
            skip();
            if (pos != s.size()) fail("unexpected '" + std::string(1, s[pos]) + "'");
            return v;
        }
        double sum() {
            double v = product();
            for (;;) {
                if (eat('+')) v += product();
                else if (eat('-')) v -= product();
                else return v;
            }
        }
        double product() {
            double v = unary();
            for (;;) {
                if (eat('*')) v *= unary();
                else if (eat('/')) v /= unary();
                else return v;
            }
        }
        double unary() {
            if (eat('-')) return -unary();
            if (eat('+')) return unary();
            return power();
        }
        double power() {
            double base = atom();
            if (eat('^')) return std::pow(base, unary());  // right associative
            return base;
        }
        double atom() {
            skip();
            if (pos >= s.size()) fail("unexpected end");
            if (eat('(')) {
                double v = sum();
                if (!eat(')')) fail("expected ')'");
                return v;
            }
            char c = s[pos];
            if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
                std::size_t start = pos;
                while (pos < s.size() && (std::isdigit(static_cast<unsigned char>(s[pos])) || s[pos] == '.')) ++pos;
                if (pos < s.size() && (s[pos] == 'e' || s[pos] == 'E')) {
                    ++pos;
                    if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) ++pos;
                    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
                }
                try {
                    return std::stod(std::string(s.substr(start, pos - start)));
                } catch (const std::exception&) {
                    fail("bad number");
                }
            }
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                std::size_t start = pos;
                while (pos < s.size() && (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_')) ++pos;
                std::string name(s.substr(start, pos - start));
                if (eat('(')) {
                    double a = sum();
                    if (!eat(')')) fail("expected ')'");
                    return apply(name, a);
                }
                if (vars) vars->insert(name);
                if (!env) return 0.0;
                return env->at(name);
            }
            fail("unexpected '" + std::string(1, c) + "'");
        }
        double apply(const std::string& f, double a) {
            if (f == "sqrt") return std::sqrt(a);
            if (f == "exp") return std::exp(a);
            if (f == "log") return std::log(a);
            if (f == "sin") return std::sin(a);
            if (f == "cos") return std::cos(a);
            if (f == "abs") return std::abs(a);
            fail("unknown function '" + f + "'");
        }
    };

    std::string m_text;
    std::set<std::string> m_vars;
};

}  // namespace geoform::ground
