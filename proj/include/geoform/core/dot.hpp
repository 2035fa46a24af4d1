#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace geoform {

inline std::string dot_quote(std::string_view s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        if (c == '\n') {
            out += "\\n";
            continue;
        }
        out += c;
    }
    out += '"';
    return out;
}

/// Minimal digraph emitter. Attribute values are always quoted.
class DotWriter {
  public:
    using Attrs = std::vector<std::pair<std::string, std::string>>;

    explicit DotWriter(std::string name) : m_name(std::move(name)) {}

    void graph_attr(const std::string& key, const std::string& value) { m_graph_attrs.emplace_back(key, value); }

    void node(const std::string& id, const Attrs& attrs) { m_lines.push_back("  " + dot_quote(id) + format(attrs) + ";"); }

    void edge(const std::string& from, const std::string& to, const Attrs& attrs = {}) {
        m_lines.push_back("  " + dot_quote(from) + " -> " + dot_quote(to) + format(attrs) + ";");
    }

    std::string str() const {
        std::string out = "digraph " + dot_quote(m_name) + " {\n";
        for (const auto& [k, v] : m_graph_attrs) out += "  " + k + "=" + dot_quote(v) + ";\n";
        for (const auto& l : m_lines) out += l + "\n";
        out += "}\n";
        return out;
    }

  private:
    static std::string format(const Attrs& attrs) {
        if (attrs.empty()) return "";
        std::string out = " [";
        for (std::size_t i = 0; i < attrs.size(); ++i) {
            if (i) out += ", ";
            out += attrs[i].first + "=" + dot_quote(attrs[i].second);
        }
        return out + "]";
    }

    std::string m_name;
    Attrs m_graph_attrs;
    std::vector<std::string> m_lines;
};

}  // namespace geoform
