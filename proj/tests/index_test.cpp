#include <gtest/gtest.h>

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <set>

#include "geoform/core/rng.hpp"
#include "geoform/ground/statement.hpp"
#include "geoform/index/declaration.hpp"
#include "geoform/index/index.hpp"

using namespace geoform;
using namespace geoform::index;

namespace {

const std::filesystem::path corpus_dir = std::filesystem::path(GEOFORM_DATA_DIR) / "corpus";

const std::vector<Declaration>& bundled() {
    static const auto decls = ingest_directory(corpus_dir);
    return decls;
}

Declaration decl(std::string name, std::string sig, std::string doc = "", std::string id = "") {
    Declaration d;
    d.name = std::move(name);
    d.signature = std::move(sig);
    d.doc = std::move(doc);
    d.id = id.empty() ? "t:" + d.name : id;
    d.file = "t";
    return d;
}

std::vector<std::string> names(const Index& idx, const std::vector<Hit>& hits) {
    std::vector<std::string> out;
    for (const auto& h : hits) out.push_back(idx.at(h).name);
    return out;
}

const char* const three = R"(-- three records
#theorem midpoint_cong : ∀ (a b : Point), dist (midpoint a b) a = dist (midpoint a b) b
  The midpoint is equidistant from the endpoints.

#definition PhaseSpace : Type
  Pairs of position and momentum.
  @formula p^2 / (2 * m)
#structure Rectangle : Type
)";

}  // namespace

TEST(Ingest, ThreeDeclarationsInFileOrder) {
    auto ds = parse_declarations(three, "x.decl");
    ASSERT_EQ(ds.size(), 3u);
    EXPECT_EQ(ds[0].name, "midpoint_cong");
    EXPECT_EQ(ds[0].kind, DeclKind::theorem);
    EXPECT_EQ(ds[0].id, "x.decl:2");
    EXPECT_EQ(ds[0].doc, "The midpoint is equidistant from the endpoints.");
    EXPECT_EQ(ds[1].name, "PhaseSpace");
    EXPECT_EQ(ds[1].kind, DeclKind::definition);
    EXPECT_EQ(ds[1].formula, "p^2 / (2 * m)");
    EXPECT_EQ(ds[1].doc, "Pairs of position and momentum.");
    EXPECT_EQ(ds[2].kind, DeclKind::structure);
    EXPECT_EQ(ds[2].line, 8u);
    EXPECT_TRUE(ds[2].doc.empty());
}

TEST(Ingest, EmptyFileGivesNothing) {
    EXPECT_TRUE(parse_declarations("", "e.decl").empty());
    EXPECT_TRUE(parse_declarations("-- only a comment\n\n", "e.decl").empty());
}

TEST(Ingest, MalformedHeaderReportsLocation) {
    const char* bad = "#theorem ok : True\n  doc\n#axiom nope : True\n";
    try {
        parse_declarations(bad, "bad.decl");
        FAIL() << "expected CorpusParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.code(), ErrorCode::corpus_parse_error);
        EXPECT_EQ(e.line(), 3u);
        EXPECT_NE(std::string(e.what()).find("bad.decl"), std::string::npos);
    }
    for (const char* text : {"#theorem missing_colon True\n", "  orphan doc line\n", "theorem x : y\n",
                             "#lemma : sig\n", "#lemma x : \n"}) {
        EXPECT_THROW(parse_declarations(text, "b.decl"), ParseError) << text;
    }
}

TEST(Ingest, DirectoryOrderedByFileThenLine) {
    auto dir = std::filesystem::temp_directory_path() / "geoform_ingest_order";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    std::ofstream(dir / "b.decl") << "#theorem b1 : True\n#theorem b2 : True\n";
    std::ofstream(dir / "a.decl") << "#theorem a1 : True\n";
    std::ofstream(dir / "notes.txt") << "ignored\n";
    auto ds = ingest_directory(dir);
    ASSERT_EQ(ds.size(), 3u);
    EXPECT_EQ(ds[0].id, "a.decl:1");
    EXPECT_EQ(ds[1].id, "b.decl:1");
    EXPECT_EQ(ds[2].id, "b.decl:2");
    std::filesystem::remove_all(dir);
}

TEST(Tokenize, SplitsCamelCaseAndSeparators) {
    EXPECT_EQ(tokenize("velocityAddition"), (std::vector<std::string>{"velocity", "addition"}));
    EXPECT_EQ(tokenize("velocity_addition of u"), (std::vector<std::string>{"velocity", "addition"}));
    EXPECT_EQ(tokenize("SpeedOfLight"), (std::vector<std::string>{"speed", "light"}));  // "of" is a stopword
    EXPECT_EQ(tokenize("ψ a_b"), (std::vector<std::string>{"ψ"}));
}

TEST(Build, EmptyCorpusRejected) {
    try {
        build_index({});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::empty_corpus);
    }
}

TEST(Build, SingleDeclarationRanksFirstForItself) {
    auto idx = build_index({decl("hooke_law", "∀ (k x : ℝ), springForce k x = - k * x", "Hooke's law.")});
    ASSERT_EQ(idx.size(), 1u);
    auto hits = idx.search("hooke_law");
    ASSERT_EQ(hits.size(), 1u);
    EXPECT_EQ(idx.at(hits[0]).name, "hooke_law");
}

TEST(Build, IdenticalCorporaSerializeIdentically) {
    auto a = build_index(ingest_directory(corpus_dir)).serialize();
    auto b = build_index(ingest_directory(corpus_dir)).serialize();
    EXPECT_EQ(a, b);
    EXPECT_EQ(fnv1a(a), fnv1a(b));
}

TEST(Build, CorpusHashTracksContent) {
    auto ds = bundled();
    auto h0 = corpus_hash(ds);
    ds.back().doc += " changed";
    EXPECT_NE(corpus_hash(ds), h0);
}

TEST(Build, VocabularyMentionsCircumcenterIffCorpusDoes) {
    // Oracle: scan the raw corpus text for the word, independently of the tokenizer.
    std::string raw;
    for (const auto& f : corpus_files(corpus_dir)) raw += read_text(f);
    std::transform(raw.begin(), raw.end(), raw.begin(), [](unsigned char c) { return std::tolower(c); });
    bool const mentioned = raw.find("circumcenter") != std::string::npos;

    auto idx = build_index(bundled());
    const auto& lex = dynamic_cast<const LexicalEmbedder&>(idx.embedder());
    EXPECT_EQ(lex.has_token("circumcenter"), mentioned);
    EXPECT_TRUE(mentioned);

    auto small = build_index({decl("midpoint_cong", "dist m a = dist m b")});
    EXPECT_FALSE(dynamic_cast<const LexicalEmbedder&>(small.embedder()).has_token("circumcenter"));
}

TEST(Bundled, NamesUniqueAndCoverExemplars) {
    std::set<std::string> seen;
    for (const auto& d : bundled()) EXPECT_TRUE(seen.insert(d.name).second) << d.name;
    EXPECT_GE(bundled().size(), 150u);
    for (const char* n : {"midpoint_cong", "circumcenter", "PhaseSpace", "velocityAddition", "DecayConstant",
                          "SpeedOfLight", "regularHexagon_sides"}) {
        EXPECT_TRUE(seen.count(n)) << n;
    }
}

TEST(Bundled, SignaturesAreWellFormed) {
    for (const auto& d : bundled()) {
        auto shape = ground::analyze_statement(d.signature);
        EXPECT_TRUE(shape.ok) << d.id << " " << d.name << ": " << shape.message;
    }
}

TEST(Search, ExactNameRanksFirstOnBundledCorpus) {
    auto idx = build_index(bundled());
    for (const auto& d : idx.declarations()) {
        auto hits = idx.search(d.name);
        ASSERT_FALSE(hits.empty()) << d.name;
        EXPECT_EQ(idx.at(hits[0]).name, d.name);
    }
}

TEST(Search, DefaultKIsTen) {
    EXPECT_EQ(default_k, 10u);
    auto idx = build_index(bundled());
    auto hits = idx.search("velocity");
    EXPECT_EQ(hits.size(), 10u);
    EXPECT_EQ(search(idx, "velocity").size(), 10u);
}

TEST(Search, LargeKReturnsEveryOverlappingDeclarationRanked) {
    auto idx = build_index({decl("alpha_rule", "x", "alpha beta"), decl("beta_rule", "y", "beta gamma"),
                            decl("gamma_rule", "z", "gamma beta beta")});
    auto hits = idx.search("beta", 100);
    ASSERT_EQ(hits.size(), 3u);
    for (std::size_t i = 1; i < hits.size(); ++i) EXPECT_GE(hits[i - 1].score, hits[i].score);
    EXPECT_TRUE(idx.search("unrelated", 100).empty());
    EXPECT_TRUE(idx.search("beta", 0).empty());
}

TEST(Search, TiesBreakByName) {
    auto idx = build_index({decl("zeta", "p", "shared"), decl("eta", "p", "shared"), decl("theta", "p", "shared")});
    auto hits = idx.search("shared");
    EXPECT_EQ(names(idx, hits), (std::vector<std::string>{"eta", "theta", "zeta"}));
    EXPECT_DOUBLE_EQ(hits[0].score, hits[2].score);
}

TEST(Search, RoundTripPreservesResults) {
    auto idx = build_index(bundled());
    auto back = Index::deserialize(idx.serialize());
    EXPECT_EQ(back.serialize(), idx.serialize());
    for (const char* q : {"velocity addition", "circumcenter triangle", "PhaseSpace", "decay constant forbidden"}) {
        auto a = idx.search(q);
        auto b = back.search(q);
        ASSERT_EQ(a.size(), b.size()) << q;
        for (std::size_t i = 0; i < a.size(); ++i) {
            EXPECT_EQ(a[i].index, b[i].index);
            EXPECT_EQ(a[i].score, b[i].score);
        }
    }
}

TEST(Search, DeserializeRejectsGarbage) {
    for (const char* text : {"", "not json\n", "{\"format\":\"other\"}\n",
                             "{\"format\":\"geoform-index\",\"version\":99}\n"}) {
        try {
            Index::deserialize(text);
            ADD_FAILURE() << text;
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), ErrorCode::index_format) << text;
        }
    }
}

// Random corpora over a small vocabulary; the extra declaration uses words
// no query can contain.
TEST(SearchProperty, UnrelatedDeclarationKeepsRelativeOrder) {
    const std::vector<std::string> words{"mass",  "force", "angle",  "circle", "chord", "energy",
                                         "field", "wave",  "vertex", "prism",  "plane", "charge"};
    const std::vector<std::string> other{"zircon", "quokka", "marimba", "fjord"};
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        Rng rng(derive_seed(seed, 0x1dc));
        std::vector<Declaration> ds;
        auto n = 2 + rng.index(12);
        for (std::size_t i = 0; i < n; ++i) {
            std::string doc;
            for (std::size_t w = 0, m = 1 + rng.index(6); w < m; ++w) doc += words[rng.index(words.size())] + " ";
            ds.push_back(decl("d" + std::to_string(i), "Prop", doc));
        }
        std::string query;
        for (std::size_t w = 0, m = 1 + rng.index(3); w < m; ++w) query += words[rng.index(words.size())] + " ";

        auto before = build_index(ds);
        auto extra = ds;
        std::string doc;
        for (std::size_t w = 0, m = 1 + rng.index(4); w < m; ++w) doc += other[rng.index(other.size())] + " ";
        extra.insert(extra.begin() + static_cast<long>(rng.index(extra.size() + 1)), decl("u_extra", "Prop", doc));
        auto after = build_index(extra);

        auto a = names(before, before.search(query, 100));
        auto b = names(after, after.search(query, 100));
        EXPECT_EQ(a, b) << "seed " << seed << " query '" << query << "'";
    }
}

TEST(SearchProperty, ScoreMonotoneInOverlap) {
    // A declaration containing a superset of another's query terms never scores lower
    // when both have the same length.
    auto idx = build_index({decl("one", "Prop", "force wave wave"), decl("two", "Prop", "force wave mass")});
    auto hits = idx.search("force mass");
    ASSERT_EQ(hits.size(), 2u);
    EXPECT_EQ(idx.at(hits[0]).name, "two");
}

TEST(SearchProperty, PureFunctionOfInputs) {
    auto idx = build_index(bundled());
    for (const char* q : {"hexagon", "momentum rate of change", "boundary condition infinity"}) {
        auto a = idx.search(q, 7);
        auto b = idx.search(q, 7);
        ASSERT_EQ(a.size(), b.size());
        EXPECT_LE(a.size(), 7u);
        for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].index, b[i].index);
    }
}
