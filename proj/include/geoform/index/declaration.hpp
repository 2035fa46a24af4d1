#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "geoform/core/error.hpp"
#include "geoform/core/ids.hpp"

namespace geoform::index {

enum class DeclKind { theorem, lemma, definition, structure };

inline std::string_view to_string(DeclKind k) {
    switch (k) {
    case DeclKind::theorem: return "theorem";
    case DeclKind::lemma: return "lemma";
    case DeclKind::definition: return "definition";
    case DeclKind::structure: return "structure";
    }
    return "?";
}

inline std::optional<DeclKind> parse_kind(std::string_view s) {
    for (auto k : {DeclKind::theorem, DeclKind::lemma, DeclKind::definition, DeclKind::structure}) {
        if (to_string(k) == s) return k;
    }
    return std::nullopt;
}

struct Declaration {
    std::string id;  // "<file>:<line>"
    std::string name;
    DeclKind kind = DeclKind::theorem;
    std::string signature;
    std::string doc;
    std::string formula;  // optional closed-form expression, empty if none
    std::string file;
    std::size_t line = 0;

    /// "theorem name : signature"
    std::string header() const { return std::string(to_string(kind)) + " " + name + " : " + signature; }
};

/// Parses one corpus file. Format:
///
///   -- comment
///   #kind name : signature
///     doc line
///     @formula expression
///
/// Header lines start at column 0; doc lines are indented.
inline std::vector<Declaration> parse_declarations(std::string_view text, const std::string& file) {
    std::vector<Declaration> out;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        auto raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() : nl + 1;
        ++line_no;
        if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
        auto fail = [&](const std::string& msg) {
            throw ParseError(ErrorCode::corpus_parse_error, line_no, 1, file + ": " + msg);
        };
        if (trim(raw).empty() || raw.substr(0, 2) == "--") continue;

        if (raw[0] == ' ' || raw[0] == '\t') {
            if (out.empty()) fail("doc line before any declaration");
            auto body = trim(raw);
            auto& d = out.back();
            if (body.rfind("@formula", 0) == 0) {
                if (!d.formula.empty()) fail("second @formula for " + d.name);
                d.formula = trim(std::string_view(body).substr(8));
                if (d.formula.empty()) fail("empty @formula");
                continue;
            }
            if (!d.doc.empty()) d.doc += ' ';
            d.doc += body;
            continue;
        }
        if (raw[0] != '#') fail("expected '#kind name : signature' or an indented doc line");
        auto space = raw.find(' ');
        auto kind = parse_kind(raw.substr(1, space == std::string_view::npos ? std::string_view::npos : space - 1));
        if (!kind) fail("unknown declaration kind in '" + std::string(raw) + "'");
        if (space == std::string_view::npos) fail("missing name");
        auto rest = raw.substr(space + 1);
        auto colon = rest.find(" : ");
        if (colon == std::string_view::npos) fail("missing ' : ' between name and signature");
        Declaration d;
        d.kind = *kind;
        d.name = trim(rest.substr(0, colon));
        d.signature = trim(rest.substr(colon + 3));
        if (d.name.empty() || d.name.find(' ') != std::string::npos) fail("bad declaration name '" + d.name + "'");
        if (d.signature.empty()) fail("empty signature for " + d.name);
        d.file = file;
        d.line = line_no;
        d.id = file + ":" + std::to_string(line_no);
        out.push_back(std::move(d));
    }
    return out;
}

inline std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::io_error, "cannot read " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Corpus files under `dir` with extension .decl, sorted by file name.
inline std::vector<std::filesystem::path> corpus_files(const std::filesystem::path& dir) {
    std::error_code ec;
    if (!std::filesystem::is_directory(dir, ec)) throw Error(ErrorCode::io_error, "not a directory: " + dir.string());
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(dir)) {
        if (e.is_regular_file() && e.path().extension() == ".decl") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end(),
              [](const auto& a, const auto& b) { return a.filename().string() < b.filename().string(); });
    return files;
}

/// Declarations of every file, ordered by (file name, line). Ids use the
/// bare file name so they do not depend on where the corpus lives.
inline std::vector<Declaration> ingest(const std::vector<std::filesystem::path>& files) {
    auto sorted = files;
    std::sort(sorted.begin(), sorted.end(),
              [](const auto& a, const auto& b) { return a.filename().string() < b.filename().string(); });
    std::vector<Declaration> out;
    for (const auto& f : sorted) {
        auto decls = parse_declarations(read_text(f), f.filename().string());
        out.insert(out.end(), decls.begin(), decls.end());
    }
    return out;
}

inline std::vector<Declaration> ingest_directory(const std::filesystem::path& dir) { return ingest(corpus_files(dir)); }

}  // namespace geoform::index
