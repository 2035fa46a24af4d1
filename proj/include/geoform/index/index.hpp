#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "geoform/core/error.hpp"
#include "geoform/core/ids.hpp"
#include "geoform/index/declaration.hpp"

namespace geoform::index {

using json = nlohmann::ordered_json;

/// Sparse feature vector: (dimension, weight) pairs sorted by dimension.
using FeatureVector = std::vector<std::pair<std::uint32_t, double>>;

inline double dot(const FeatureVector& a, const FeatureVector& b) {
    double s = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i].first < b[j].first) ++i;
        else if (b[j].first < a[i].first) ++j;
        else s += a[i++].second * b[j++].second;
    }
    return s;
}

inline const std::set<std::string>& stopwords() {
    static const std::set<std::string> words{"a",  "an", "and", "are", "as",   "at",   "be",   "by",   "for",
                                             "from", "in", "is",  "it",  "of",   "on",   "or",   "that", "the",
                                             "this", "to", "with", "its", "into", "then", "when", "which"};
    return words;
}

/// Lower-cased word tokens. Splits on anything that is not a letter or
/// digit, and inside words at lower-to-upper case changes, so
/// "velocityAddition" and "velocity_addition" both give {velocity,
/// addition}. Non-ASCII bytes count as letters. One-letter ASCII tokens
/// and a few stopwords are dropped.
inline std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> out;
    std::string cur;
    auto flush = [&] {
        if (cur.empty()) return;
        bool const short_ascii = cur.size() == 1 && static_cast<unsigned char>(cur[0]) < 0x80;
        if (!short_ascii && !stopwords().count(cur)) out.push_back(cur);
        cur.clear();
    };
    char prev = 0;
    for (char c : text) {
        auto const u = static_cast<unsigned char>(c);
        bool const word = std::isalnum(u) || u >= 0x80;
        if (!word) {
            flush();
            prev = 0;
            continue;
        }
        if (std::isupper(u) && prev && std::islower(static_cast<unsigned char>(prev))) flush();
        cur += static_cast<char>(u < 0x80 ? std::tolower(u) : u);
        prev = c;
    }
    flush();
    return out;
}

inline std::string declaration_text(const Declaration& d) { return d.name + " " + d.signature + " " + d.doc; }

/// Turns declarations and queries into feature vectors. Implementations
/// must be deterministic; `state` must capture everything needed to embed
/// queries after a reload.
class Embedder {
  public:
    virtual ~Embedder() = default;
    virtual std::string name() const = 0;
    virtual void fit(const std::vector<Declaration>& corpus) = 0;
    virtual FeatureVector embed_declaration(const Declaration& d) const = 0;
    virtual FeatureVector embed_query(std::string_view query) const = 0;
    virtual json state() const = 0;
    virtual void restore(const json& state) = 0;
};

/// Default embedder. Declaration vectors use sublinear term frequency
/// (1 + ln tf), normalized to unit length within each declaration. Query
/// terms are weighted by 1/sqrt(df). Neither weight depends on the corpus
/// size, and a declaration's vector depends only on its own text, so
/// adding declarations never moves existing ones.
class LexicalEmbedder : public Embedder {
  public:
    std::string name() const override { return "lexical-v1"; }

    void fit(const std::vector<Declaration>& corpus) override {
        std::map<std::string, std::size_t> df;
        for (const auto& d : corpus) {
            auto toks = tokenize(declaration_text(d));
            std::set<std::string> const uniq(toks.begin(), toks.end());
            for (const auto& t : uniq) ++df[t];
        }
        m_vocab.clear();
        m_df.clear();
        for (const auto& [t, n] : df) {
            m_vocab.emplace(t, static_cast<std::uint32_t>(m_df.size()));
            m_df.push_back(n);
        }
    }

    FeatureVector embed_declaration(const Declaration& d) const override {
        std::map<std::uint32_t, double> tf;
        for (const auto& t : tokenize(declaration_text(d))) {
            auto it = m_vocab.find(t);
            if (it != m_vocab.end()) tf[it->second] += 1.0;
        }
        FeatureVector v;
        double norm = 0.0;
        for (const auto& [dim, n] : tf) {
            double const w = 1.0 + std::log(n);
            v.emplace_back(dim, w);
            norm += w * w;
        }
        norm = std::sqrt(norm);
        for (auto& [dim, w] : v) w /= norm;
        return v;
    }

    FeatureVector embed_query(std::string_view query) const override {
        std::map<std::uint32_t, double> w;
        for (const auto& t : tokenize(query)) {
            auto it = m_vocab.find(t);
            if (it != m_vocab.end()) w[it->second] = 1.0 / std::sqrt(static_cast<double>(m_df[it->second]));
        }
        return {w.begin(), w.end()};
    }

    json state() const override {
        json vocab = json::array();
        for (const auto& [t, id] : m_vocab) vocab.push_back(json::array({t, m_df[id]}));
        return json{{"vocabulary", vocab}};
    }

    void restore(const json& state) override {
        m_vocab.clear();
        m_df.clear();
        for (const auto& entry : state.at("vocabulary")) {
            m_vocab.emplace(entry.at(0).get<std::string>(), static_cast<std::uint32_t>(m_df.size()));
            m_df.push_back(entry.at(1).get<std::size_t>());
        }
    }

    bool has_token(const std::string& t) const { return m_vocab.count(t) > 0; }
    std::size_t vocabulary_size() const { return m_vocab.size(); }
    std::vector<std::string> vocabulary() const {
        std::vector<std::string> out;
        for (const auto& [t, id] : m_vocab) out.push_back(t);
        return out;
    }

  private:
    std::map<std::string, std::uint32_t> m_vocab;  // sorted, so ids follow token order
    std::vector<std::size_t> m_df;
};

inline std::unique_ptr<Embedder> make_embedder(const std::string& name) {
    if (name == "lexical-v1") return std::make_unique<LexicalEmbedder>();
    throw Error(ErrorCode::index_format, "unknown embedder '" + name + "'");
}

inline constexpr std::size_t default_k = 10;
inline constexpr int index_format_version = 1;

struct Hit {
    std::size_t index = 0;  // position in Index::declarations()
    double score = 0.0;
};

inline std::string hex64(std::uint64_t h) {
    std::ostringstream os;
    os << std::hex;
    os.width(16);
    os.fill('0');
    os << h;
    return os.str();
}

/// Hash of the declaration records, independent of file locations.
inline std::string corpus_hash(const std::vector<Declaration>& decls) {
    std::uint64_t h = fnv1a("");
    for (const auto& d : decls) {
        for (const auto* field : {&d.id, &d.name, &d.signature, &d.doc, &d.formula}) {
            h = fnv1a(*field, h);
            h = fnv1a(std::string_view("\x1f", 1), h);
        }
        h = fnv1a(to_string(d.kind), h);
        h = fnv1a(std::string_view("\x1e", 1), h);
    }
    return hex64(h);
}

inline std::string normalize_name(std::string_view s) {
    std::string out;
    for (char c : trim(s)) out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

/// Immutable after build; concurrent searches are safe.
class Index {
  public:
    Index() : m_embedder(std::make_shared<LexicalEmbedder>()) {}

    static Index build(std::vector<Declaration> decls, std::unique_ptr<Embedder> embedder = nullptr) {
        if (decls.empty()) throw Error(ErrorCode::empty_corpus, "no declarations to index");
        if (!embedder) embedder = std::make_unique<LexicalEmbedder>();
        embedder->fit(decls);
        Index idx;
        idx.m_vectors.reserve(decls.size());
        for (const auto& d : decls) idx.m_vectors.push_back(embedder->embed_declaration(d));
        idx.m_hash = index::corpus_hash(decls);
        idx.m_decls = std::move(decls);
        idx.m_embedder = std::shared_ptr<const Embedder>(std::move(embedder));
        return idx;
    }

    const std::vector<Declaration>& declarations() const noexcept { return m_decls; }
    const std::vector<FeatureVector>& vectors() const noexcept { return m_vectors; }
    const Embedder& embedder() const { return *m_embedder; }
    const std::string& corpus_hash() const noexcept { return m_hash; }
    bool empty() const noexcept { return m_decls.empty(); }
    std::size_t size() const noexcept { return m_decls.size(); }

    /// Top-k by descending score, ties by name then id. Declarations with no
    /// feature overlap are left out. A query equal to a declaration name
    /// (case-insensitive) lifts it above every non-matching declaration.
    std::vector<Hit> search(std::string_view query, std::size_t k = default_k) const {
        std::vector<Hit> hits;
        if (k == 0) return hits;
        auto q = m_embedder->embed_query(query);
        double bound = 1.0;  // upper bound of any lexical score (unit doc vectors)
        for (const auto& [d, w] : q) bound += std::abs(w);
        auto const qname = normalize_name(query);
        for (std::size_t i = 0; i < m_decls.size(); ++i) {
            double s = dot(q, m_vectors[i]);
            if (!(s > 0.0)) continue;
            if (normalize_name(m_decls[i].name) == qname) s += bound;
            hits.push_back({i, s});
        }
        std::sort(hits.begin(), hits.end(), [&](const Hit& a, const Hit& b) {
            if (a.score != b.score) return a.score > b.score;
            const auto& da = m_decls[a.index];
            const auto& db = m_decls[b.index];
            if (da.name != db.name) return da.name < db.name;
            return da.id < db.id;
        });
        if (hits.size() > k) hits.resize(k);
        return hits;
    }

    const Declaration& at(const Hit& h) const { return m_decls.at(h.index); }

    /// JSON lines: a versioned header, then one record per declaration.
    std::string serialize() const {
        std::string out;
        json header{{"format", "geoform-index"},
                    {"version", index_format_version},
                    {"embedder", m_embedder->name()},
                    {"corpus_hash", m_hash},
                    {"count", m_decls.size()},
                    {"embedder_state", m_embedder->state()}};
        out += header.dump() + "\n";
        for (std::size_t i = 0; i < m_decls.size(); ++i) {
            const auto& d = m_decls[i];
            json vec = json::array();
            for (const auto& [dim, w] : m_vectors[i]) vec.push_back(json::array({dim, w}));
            json rec{{"id", d.id},         {"name", d.name}, {"kind", to_string(d.kind)},
                     {"signature", d.signature}, {"doc", d.doc},   {"formula", d.formula},
                     {"file", d.file},     {"line", d.line}, {"vector", vec}};
            out += rec.dump() + "\n";
        }
        return out;
    }

    static Index deserialize(std::string_view text) {
        std::istringstream in{std::string(text)};
        std::string line;
        auto fail = [](const std::string& msg) -> Index { throw Error(ErrorCode::index_format, msg); };
        if (!std::getline(in, line)) return fail("empty index file");
        json header;
        try {
            header = json::parse(line);
        } catch (const json::exception& e) {
            return fail(std::string("bad header: ") + e.what());
        }
        if (header.value("format", "") != "geoform-index") return fail("not a geoform index");
        if (header.value("version", 0) != index_format_version) {
            return fail("unsupported index version " + header.value("version", json(0)).dump());
        }
        Index idx;
        auto emb = make_embedder(header.at("embedder").get<std::string>());
        emb->restore(header.at("embedder_state"));
        idx.m_embedder = std::shared_ptr<const Embedder>(std::move(emb));
        idx.m_hash = header.at("corpus_hash").get<std::string>();
        while (std::getline(in, line)) {
            if (trim(line).empty()) continue;
            try {
                auto rec = json::parse(line);
                Declaration d;
                d.id = rec.at("id").get<std::string>();
                d.name = rec.at("name").get<std::string>();
                auto kind = parse_kind(rec.at("kind").get<std::string>());
                if (!kind) return fail("bad kind in record " + d.id);
                d.kind = *kind;
                d.signature = rec.at("signature").get<std::string>();
                d.doc = rec.at("doc").get<std::string>();
                d.formula = rec.at("formula").get<std::string>();
                d.file = rec.at("file").get<std::string>();
                d.line = rec.at("line").get<std::size_t>();
                FeatureVector v;
                for (const auto& e : rec.at("vector")) v.emplace_back(e.at(0).get<std::uint32_t>(), e.at(1).get<double>());
                idx.m_decls.push_back(std::move(d));
                idx.m_vectors.push_back(std::move(v));
            } catch (const json::exception& e) {
                return fail(std::string("bad record: ") + e.what());
            }
        }
        if (idx.m_decls.size() != header.at("count").get<std::size_t>()) return fail("record count mismatch");
        return idx;
    }

  private:
    std::vector<Declaration> m_decls;
    std::vector<FeatureVector> m_vectors;
    std::shared_ptr<const Embedder> m_embedder;
    std::string m_hash;
};

inline Index build_index(std::vector<Declaration> decls, std::unique_ptr<Embedder> embedder = nullptr) {
    return Index::build(std::move(decls), std::move(embedder));
}

inline std::vector<Hit> search(const Index& idx, std::string_view query, std::size_t k = default_k) {
    return idx.search(query, k);
}

}  // namespace geoform::index
