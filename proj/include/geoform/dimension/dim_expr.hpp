#pragma once

#include <array>
#include <boost/rational.hpp>
#include <cstddef>
#include <string>
#include <string_view>

#include "geoform/core/error.hpp"
#include "geoform/core/ids.hpp"

namespace geoform::dim {

using Rational = boost::rational<long long>;

enum class Base : std::size_t { M, L, T, Q, Theta };

inline constexpr std::size_t base_count = 5;
inline constexpr std::array<std::string_view, base_count> base_symbols{"M", "L", "T", "Q", "Θ"};

/// Exponent vector over (M, L, T, Q, Θ). The zero vector is dimensionless.
class DimExpr {
  public:
    DimExpr() = default;
    explicit DimExpr(const std::array<Rational, base_count>& e) : m_exp(e) {}

    static DimExpr dimensionless() { return {}; }
    static DimExpr base(Base b) {
        DimExpr d;
        d.m_exp[static_cast<std::size_t>(b)] = 1;
        return d;
    }
    static DimExpr of(long long m, long long l, long long t, long long q = 0, long long th = 0) {
        return DimExpr({Rational(m), Rational(l), Rational(t), Rational(q), Rational(th)});
    }

    const Rational& operator[](Base b) const { return m_exp[static_cast<std::size_t>(b)]; }
    const std::array<Rational, base_count>& exponents() const noexcept { return m_exp; }

    bool is_dimensionless() const {
        // Mixed rational/int comparisons recurse under C++20 rewritten
        // operators, so test the numerator instead.
        for (const auto& e : m_exp) {
            if (e.numerator() != 0) return false;
        }
        return true;
    }

    friend DimExpr dim_mul(const DimExpr& a, const DimExpr& b) {
        DimExpr out;
        for (std::size_t i = 0; i < base_count; ++i) out.m_exp[i] = a.m_exp[i] + b.m_exp[i];
        return out;
    }
    friend DimExpr dim_pow(const DimExpr& a, const Rational& k) {
        DimExpr out;
        for (std::size_t i = 0; i < base_count; ++i) out.m_exp[i] = a.m_exp[i] * k;
        return out;
    }
    friend DimExpr dim_inv(const DimExpr& a) { return dim_pow(a, Rational(-1)); }
    friend DimExpr dim_div(const DimExpr& a, const DimExpr& b) { return dim_mul(a, dim_inv(b)); }

    friend DimExpr operator*(const DimExpr& a, const DimExpr& b) { return dim_mul(a, b); }
    friend DimExpr operator/(const DimExpr& a, const DimExpr& b) { return dim_div(a, b); }
    friend bool operator==(const DimExpr& a, const DimExpr& b) { return a.m_exp == b.m_exp; }
    friend bool operator!=(const DimExpr& a, const DimExpr& b) { return !(a == b); }
    friend bool operator<(const DimExpr& a, const DimExpr& b) { return a.m_exp < b.m_exp; }

    /// "M L^2 T^-2", "L^1/2", or "1" when dimensionless.
    std::string str() const {
        std::string out;
        for (std::size_t i = 0; i < base_count; ++i) {
            const auto& e = m_exp[i];
            if (e.numerator() == 0) continue;
            if (!out.empty()) out += ' ';
            out += base_symbols[i];
            if (e.numerator() != 1 || e.denominator() != 1) {
                out += '^';
                out += std::to_string(e.numerator());
                if (e.denominator() != 1) out += "/" + std::to_string(e.denominator());
            }
        }
        return out.empty() ? "1" : out;
    }

  private:
    std::array<Rational, base_count> m_exp{};
};

namespace detail {

inline Rational parse_rational(std::string_view s) {
    auto slash = s.find('/');
    try {
        std::size_t used = 0;
        auto num = std::stoll(std::string(s.substr(0, slash)), &used);
        if (used != (slash == std::string_view::npos ? s.size() : slash)) throw std::invalid_argument("trailing");
        long long den = 1;
        if (slash != std::string_view::npos) {
            std::string d(s.substr(slash + 1));
            den = std::stoll(d, &used);
            if (used != d.size() || den == 0) throw std::invalid_argument("bad denominator");
        }
        return Rational(num, den);
    } catch (const std::exception&) {
        throw Error(ErrorCode::concept_table_syntax, "bad exponent '" + std::string(s) + "'");
    }
}

}  // namespace detail

/// Inverse of DimExpr::str. Also accepts "Theta" for Θ.
inline DimExpr parse_dim(std::string_view text) {
    auto s = trim(text);
    if (s == "1" || s.empty()) return {};
    std::array<Rational, base_count> e{};
    std::size_t pos = 0;
    while (pos < s.size()) {
        auto end = s.find(' ', pos);
        if (end == std::string::npos) end = s.size();
        std::string_view tok(s.data() + pos, end - pos);
        pos = end + 1;
        if (tok.empty()) continue;
        auto caret = tok.find('^');
        auto sym = tok.substr(0, caret);
        if (sym == "Theta") sym = "Θ";
        std::size_t idx = base_count;
        for (std::size_t i = 0; i < base_count; ++i) {
            if (base_symbols[i] == sym) idx = i;
        }
        if (idx == base_count) {
            throw Error(ErrorCode::concept_table_syntax, "unknown base dimension '" + std::string(sym) + "'");
        }
        e[idx] += caret == std::string_view::npos ? Rational(1) : detail::parse_rational(tok.substr(caret + 1));
    }
    return DimExpr(e);
}

}  // namespace geoform::dim
