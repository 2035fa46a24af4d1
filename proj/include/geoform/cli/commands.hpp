#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "geoform/construct/program.hpp"
#include "geoform/core/error.hpp"
#include "geoform/core/ids.hpp"
#include "geoform/core/rng.hpp"
#include "geoform/deduce/closure.hpp"
#include "geoform/deduce/dot.hpp"
#include "geoform/deduce/rule.hpp"
#include "geoform/ground/engine.hpp"
#include "geoform/ground/scene.hpp"
#include "geoform/index/declaration.hpp"
#include "geoform/index/index.hpp"
#include "geoform/instance/instance.hpp"

namespace geoform::cli {

using json = nlohmann::ordered_json;

enum Exit : int { ok = 0, rejected = 1, exhausted = 2, usage = 3, io = 4 };

inline int exit_code(ErrorCode c) {
    switch (c) {
    case ErrorCode::generation_exhausted:
    case ErrorCode::sampling_exhausted:
    case ErrorCode::node_budget_exceeded:
    case ErrorCode::depth_budget_exceeded: return exhausted;
    case ErrorCode::io_error: return io;
    case ErrorCode::no_candidate:
    case ErrorCode::compose_failed:
    case ErrorCode::grounding_failed:
    case ErrorCode::checker_unavailable: return rejected;
    default: return usage;
    }
}

/// Where data and logs go. Data never goes to `log`.
struct Streams {
    std::ostream& out;
    std::ostream& log;
};

inline std::string default_data(const std::string& rel) { return std::string(GEOFORM_DATA_DIR) + "/" + rel; }

inline std::string read_file(const std::string& path) { return index::read_text(path); }

inline void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorCode::io_error, "cannot open '" + path + "' for writing");
    f << text;
    if (!f) throw Error(ErrorCode::io_error, "write to '" + path + "' failed");
}

/// Writes to `path`, or to `out` when the path is empty or "-".
inline void emit(const std::string& path, const std::string& text, Streams s) {
    if (path.empty() || path == "-") s.out << text;
    else write_file(path, text);
}

inline std::vector<deduce::Rule> load_rules(const std::string& path) {
    if (path.empty()) return deduce::bundled_rules();
    return deduce::parse_rules(read_file(path));
}

inline std::vector<std::string> read_lines(const std::string& path) {
    std::vector<std::string> out;
    std::istringstream in(read_file(path));
    std::string line;
    while (std::getline(in, line)) {
        if (!trim(line).empty()) out.push_back(line);
    }
    return out;
}

inline json parse_json_line(const std::string& line, const std::string& where) {
    try {
        return json::parse(line);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::syntax_error, where + ": " + e.what());
    }
}

// ---------------------------------------------------------------- generate

struct GenerateArgs {
    std::uint64_t seed = 0;
    std::size_t count = 1;
    std::string out;
    std::size_t jobs = 1;
    std::string rules;
    construct::Limits limits;
    geom::Tolerance tol;
    std::size_t max_restarts = 200;

    /// Content-affecting parameters only: output paths and job counts do
    /// not change the bytes and are left out so reruns stay identical.
    json config() const {
        return json{{"command", "generate"},
                    {"seed", seed},
                    {"count", count},
                    {"rules", rules.empty() ? "bundled" : rules},
                    {"max_steps", limits.max_steps},
                    {"max_objects", limits.max_objects},
                    {"max_resamples", limits.max_resamples},
                    {"max_restarts", max_restarts},
                    {"eq_tol", tol.eq_tol},
                    {"degen_tol", tol.degen_tol}};
    }
};

/// Instance i is generated from derive_seed(seed, i), so the output does
/// not depend on --jobs.
inline std::vector<instance::Instance> generate_batch(const GenerateArgs& a) {
    a.limits.check();
    if (!a.tol.valid()) throw Error(ErrorCode::invalid_config, "tolerances need 0 < eq_tol < degen_tol < 1");
    auto const rules = load_rules(a.rules);
    instance::GenerateOptions opts;
    opts.limits = a.limits;
    opts.tol = a.tol;
    opts.max_restarts = a.max_restarts;

    std::vector<std::optional<instance::Instance>> slots(a.count);
    std::vector<std::exception_ptr> errors(a.count);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < a.count; i = next++) {
            try {
                slots[i] = instance::generate(derive_seed(a.seed, i), rules, opts);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    std::size_t const jobs = std::clamp<std::size_t>(a.jobs, 1, std::max<std::size_t>(a.count, 1));
    std::vector<std::thread> pool;
    for (std::size_t j = 1; j < jobs; ++j) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    // Report the first failure in seed order, independent of scheduling.
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    std::vector<instance::Instance> out;
    out.reserve(a.count);
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

inline int run_generate(const GenerateArgs& a, Streams s) {
    auto batch = generate_batch(a);
    auto const cfg = a.config();
    std::string text;
    for (auto& inst : batch) {
        inst.meta["config"] = cfg;
        text += instance::to_json(inst).dump() + "\n";
    }
    emit(a.out, text, s);
    s.log << "generate: " << batch.size() << " instance(s)\n";
    return ok;
}

// ------------------------------------------------------ close / extract

struct CloseArgs {
    std::string dsl;
    std::string rules;
    std::string out;

    json config() const {
        return json{{"command", "close"}, {"dsl", dsl}, {"rules", rules.empty() ? "bundled" : rules}};
    }
};

inline construct::Program load_program(const std::string& path) { return construct::parse_program(read_file(path)); }

inline deduce::DerivationGraph close_program(const construct::Program& p, const std::vector<deduce::Rule>& rules) {
    deduce::ClosureOptions opts;
    opts.planar = p.mode() != construct::SpaceMode::spatial;
    return deduce::closure(construct::asserted_facts(p), rules, opts);
}

inline json graph_json(const deduce::DerivationGraph& g) {
    json facts = json::array();
    for (std::size_t i = 0; i < g.size(); ++i) {
        json f{{"id", i}, {"fact", g.fact(i).str()}, {"asserted", g.is_root(i)}};
        json ds = json::array();
        for (const auto& d : g.derivations(i)) ds.push_back(json{{"rule", g.rule_names().at(d.rule)}, {"premises", d.premises}});
        f["derivations"] = std::move(ds);
        facts.push_back(std::move(f));
    }
    return facts;
}

inline int run_close(const CloseArgs& a, Streams s) {
    auto const program = load_program(a.dsl);
    auto const g = close_program(program, load_rules(a.rules));
    json j{{"config", a.config()}, {"facts", json::array()}, {"graph", graph_json(g)}};
    for (const auto& f : g.facts()) j["facts"].push_back(f.str());
    emit(a.out, j.dump(2) + "\n", s);
    s.log << "close: " << g.size() << " fact(s), " << g.roots().size() << " asserted\n";
    return ok;
}

struct ExtractArgs {
    std::string dsl;
    std::string goal;  // defaults to the program's '?' goal
    std::string rules;
    std::string out;

    json config() const {
        return json{{"command", "extract"}, {"dsl", dsl}, {"goal", goal}, {"rules", rules.empty() ? "bundled" : rules}};
    }
};

inline int run_extract(const ExtractArgs& a, Streams s) {
    auto const program = load_program(a.dsl);
    std::optional<geom::Fact> goal;
    if (!a.goal.empty()) goal = geom::parse_fact(a.goal, program.kind_lookup());
    else if (program.goal) goal = *program.goal;
    else throw Error(ErrorCode::invalid_config, "no --goal given and the program has no '?' goal");
    auto const g = close_program(program, load_rules(a.rules));
    auto const ex = instance::extract_premises(g, *goal);
    auto cfg = a.config();
    cfg["goal"] = goal->str();
    json trace = json::array();
    for (const auto& st : ex.trace) {
        trace.push_back(json{{"rule", st.rule}, {"premises", instance::facts_json(st.premises)},
                             {"conclusion", st.conclusion.str()}});
    }
    json j{{"config", cfg},
           {"goal", goal->str()},
           {"premises", instance::facts_json(ex.premises)},
           {"trace", std::move(trace)},
           {"truncated", ex.truncated}};
    emit(a.out, j.dump(2) + "\n", s);
    return ok;
}

// ------------------------------------------------------------------ verify

struct VerifyArgs {
    std::string instances;
    std::uint64_t seed = 1;
    std::size_t max_resamples = 50;
    geom::Tolerance tol;
    std::string out;

    json config() const {
        return json{{"command", "verify"},    {"instance", instances}, {"seed", seed},
                    {"max_resamples", max_resamples}, {"eq_tol", tol.eq_tol}, {"degen_tol", tol.degen_tol}};
    }
};

/// Re-realizes every instance with a fresh coordinate seed, derived from
/// --seed and the line number, and re-checks premises and goal.
inline int run_verify(const VerifyArgs& a, Streams s) {
    auto const lines = read_lines(a.instances);
    json results = json::array();
    std::size_t passed = 0;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        auto where = a.instances + ":" + std::to_string(i + 1);
        auto inst = instance::from_json(parse_json_line(lines[i], where));
        auto v = instance::verify_numeric(inst.program, inst.premises, inst.goal, derive_seed(a.seed, i), a.tol,
                                          a.max_resamples);
        if (v.verified) ++passed;
        else s.log << "verify: " << where << " " << v.reason() << "\n";
        results.push_back(json{{"line", i + 1}, {"seed", inst.seed}, {"verdict", v.reason()}, {"attempts", v.attempts}});
    }
    json j{{"config", a.config()}, {"total", lines.size()}, {"verified", passed}, {"results", std::move(results)}};
    emit(a.out, j.dump(2) + "\n", s);
    s.log << "verify: " << passed << "/" << lines.size() << " verified\n";
    return passed == lines.size() ? ok : rejected;
}

// -------------------------------------------------------------- export-dot

struct ExportDotArgs {
    std::string in;
    std::size_t line = 1;  // which instance of a JSONL file
    std::string rules;
    std::string out;
};

/// Accepts a DSL program (full derivation graph, or the goal's support when
/// the program has a goal), an instance JSONL file (trace) or a ground
/// report (grounding graph).
inline int run_export_dot(const ExportDotArgs& a, Streams s) {
    std::string dot;
    if (std::filesystem::path(a.in).extension() == ".dsl") {
        auto const program = load_program(a.in);
        auto const g = close_program(program, load_rules(a.rules));
        std::optional<std::set<std::size_t>> only;
        if (program.goal) {
            auto const ex = instance::extract_premises(g, *program.goal);
            only.emplace();
            for (const auto& f : ex.premises) only->insert(*g.id_of(f));
            for (const auto& st : ex.trace) only->insert(*g.id_of(st.conclusion));
            only->insert(*g.id_of(*program.goal));
        }
        dot = deduce::to_dot(g, only);
    } else {
        auto const lines = read_lines(a.in);
        auto const text = read_file(a.in);
        json j;
        try {
            j = json::parse(text);
        } catch (const json::exception&) {
            if (a.line == 0 || a.line > lines.size()) {
                throw Error(ErrorCode::invalid_config, "--line " + std::to_string(a.line) + " out of range");
            }
            j = parse_json_line(lines[a.line - 1], a.in + ":" + std::to_string(a.line));
        }
        if (j.contains("dot")) dot = j.at("dot").get<std::string>();
        else dot = instance::trace_dot(instance::from_json(j));
    }
    emit(a.out, dot, s);
    return ok;
}

// ------------------------------------------------------------------ ground

struct GroundArgs {
    std::string scene;
    ground::EngineConfig engine;
    std::string corpus;  // default: bundled corpus
    std::string index;   // prebuilt index, overrides corpus
    std::string rules;   // grounding rule table, default bundled
    std::string out;
    std::string dot;

    json config() const {
        json j{{"command", "ground"}, {"scene", scene}};
        if (!index.empty()) j["index"] = index;
        else j["corpus"] = corpus.empty() ? "bundled" : corpus;
        j["rules"] = rules.empty() ? "bundled" : rules;
        j.update(ground::config_json(engine));
        return j;
    }
};

inline index::Index load_index(const std::string& path) { return index::Index::deserialize(read_file(path)); }

inline index::Index index_for(const std::string& index_path, const std::string& corpus) {
    if (!index_path.empty()) return load_index(index_path);
    return index::build_index(index::ingest_directory(corpus.empty() ? default_data("corpus") : corpus));
}

/// Report JSON (with the DOT rendering under "dot") goes to --out; a run
/// aborted by a budget still writes the partial report and DOT.
inline int run_ground(const GroundArgs& a, Streams s) {
    a.engine.validate();
    auto const scene = ground::load_scene(a.scene);
    auto const idx = index_for(a.index, a.corpus);
    auto oracles = ground::Oracles::defaults();
    if (!a.rules.empty()) {
        oracles.grounder = std::make_shared<ground::RuleTableGrounder>(ground::RuleTableGrounder::from_text(read_file(a.rules)));
    }
    auto write = [&](const ground::GroundResult& r) {
        auto j = ground::report_json(r);
        auto dot = ground::to_dot(r);
        j["config"] = a.config();
        j["dot"] = dot;
        emit(a.out, j.dump(2) + "\n", s);
        if (!a.dot.empty()) write_file(a.dot, dot);
    };
    try {
        auto r = ground::run_pipeline(scene, a.engine, oracles, &idx);
        write(r);
        s.log << "ground: " << scene.name << " " << r.node_count() << " node(s), depth " << r.depth() << ", check "
              << r.check << "\n";
        for (const auto& e : r.evaluations) s.log << "ground: " << e.lemma << " = " << e.display << "\n";
        return ok;
    } catch (const ground::GroundError& e) {
        if (e.partial()) write(*e.partial());
        throw;
    }
}

// -------------------------------------------------------- index / search

struct IndexArgs {
    std::string corpus;
    std::string out;

    json config() const { return json{{"command", "index"}, {"corpus", corpus}}; }
};

/// The serialized index with the resolved config added to its header line.
inline int run_index(const IndexArgs& a, Streams s) {
    auto idx = index::build_index(index::ingest_directory(a.corpus));
    auto text = idx.serialize();
    auto const nl = text.find('\n');
    auto header = json::parse(text.substr(0, nl));
    header["config"] = a.config();
    text = header.dump() + text.substr(nl);
    emit(a.out, text, s);
    s.log << "index: " << idx.size() << " declaration(s), corpus hash " << idx.corpus_hash() << "\n";
    return ok;
}

struct SearchArgs {
    std::string index;
    std::string corpus;
    std::string query;
    std::size_t k = index::default_k;
    std::string out;

    json config() const {
        json j{{"command", "search"}};
        if (!index.empty()) j["index"] = index;
        else j["corpus"] = corpus.empty() ? "bundled" : corpus;
        j["query"] = query;
        j["k"] = k;
        return j;
    }
};

inline int run_search(const SearchArgs& a, Streams s) {
    if (a.k == 0) throw Error(ErrorCode::invalid_config, "k must be positive");
    auto const idx = index_for(a.index, a.corpus);
    json hits = json::array();
    std::size_t rank = 0;
    for (const auto& h : index::search(idx, a.query, a.k)) {
        const auto& d = idx.at(h);
        hits.push_back(json{{"rank", ++rank},
                            {"name", d.name},
                            {"id", d.id},
                            {"kind", index::to_string(d.kind)},
                            {"score", h.score},
                            {"signature", d.signature}});
    }
    json j{{"config", a.config()}, {"hits", std::move(hits)}};
    emit(a.out, j.dump(2) + "\n", s);
    return ok;
}

// -------------------------------------------------------------------- app

/// Parses arguments and runs one subcommand. Flags override values from
/// the --config file.
inline int run(int argc, const char* const* argv, Streams s) {
    CLI::App app{"geoform: synthetic geometry instances and recursive grounding"};
    app.set_config("--config", "", "key = value config file; subcommand keys go under [command] sections");
    app.require_subcommand(1);

    GenerateArgs gen;
    auto* g = app.add_subcommand("generate", "sample, close, extract and verify instances (JSONL)");
    g->add_option("--seed", gen.seed)->required();
    g->add_option("--count", gen.count)->required();
    g->add_option("--out", gen.out, "output file, stdout when omitted");
    g->add_option("--jobs", gen.jobs, "worker threads");
    g->add_option("--rules", gen.rules, "deduction rule file");
    g->add_option("--max-steps", gen.limits.max_steps);
    g->add_option("--max-objects", gen.limits.max_objects);
    g->add_option("--max-resamples", gen.limits.max_resamples);
    g->add_option("--max-restarts", gen.max_restarts);
    g->add_option("--eq-tol", gen.tol.eq_tol);
    g->add_option("--degen-tol", gen.tol.degen_tol);

    CloseArgs cl;
    auto* c = app.add_subcommand("close", "deduction closure of a DSL program");
    c->add_option("--dsl", cl.dsl)->required();
    c->add_option("--rules", cl.rules);
    c->add_option("--out", cl.out);

    ExtractArgs ex;
    auto* e = app.add_subcommand("extract", "premises and trace for a goal");
    e->add_option("--dsl", ex.dsl)->required();
    e->add_option("--goal", ex.goal, "goal fact, default the program's '?' line");
    e->add_option("--rules", ex.rules);
    e->add_option("--out", ex.out);

    VerifyArgs ver;
    auto* v = app.add_subcommand("verify", "re-verify instances with fresh coordinates");
    v->add_option("--instance", ver.instances)->required();
    v->add_option("--seed", ver.seed);
    v->add_option("--max-resamples", ver.max_resamples);
    v->add_option("--eq-tol", ver.tol.eq_tol);
    v->add_option("--degen-tol", ver.tol.degen_tol);
    v->add_option("--out", ver.out);

    ExportDotArgs dx;
    auto* d = app.add_subcommand("export-dot", "DOT for a program, instance or ground report");
    d->add_option("--in", dx.in)->required();
    d->add_option("--line", dx.line, "instance line in a JSONL file (1-based)");
    d->add_option("--rules", dx.rules);
    d->add_option("--out", dx.out);

    GroundArgs gr;
    auto* gc = app.add_subcommand("ground", "recursive grounding of a scene");
    gc->add_option("--scene", gr.scene)->required();
    gc->add_option("--max-nodes", gr.engine.max_nodes);
    gc->add_option("--max-depth", gr.engine.max_depth);
    gc->add_option("--k", gr.engine.retrieval_k);
    gc->add_option("--passes", gr.engine.samples_per_node, "pass@k samples per node");
    gc->add_option("--temperature", gr.engine.temperature_greedy, "temperature for a single pass");
    gc->add_option("--diverse-temperature", gr.engine.temperature_diverse, "temperature for several passes");
    gc->add_option("--corpus", gr.corpus);
    gc->add_option("--index", gr.index);
    gc->add_option("--rules", gr.rules, "grounding rule table");
    gc->add_option("--out", gr.out);
    gc->add_option("--dot", gr.dot);

    IndexArgs ix;
    auto* ic = app.add_subcommand("index", "build a declaration index");
    ic->add_option("--corpus", ix.corpus)->required();
    ic->add_option("--out", ix.out);

    SearchArgs se;
    auto* sc = app.add_subcommand("search", "top-k declarations for a query");
    sc->add_option("--index", se.index);
    sc->add_option("--corpus", se.corpus);
    sc->add_option("--query", se.query)->required();
    sc->add_option("--k", se.k);
    sc->add_option("--out", se.out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& err) {
        s.out << app.help();
        return ok;
    } catch (const CLI::CallForAllHelp& err) {
        s.out << app.help("", CLI::AppFormatMode::All);
        return ok;
    } catch (const CLI::ParseError& err) {
        s.log << "geoform: " << err.what() << "\n";
        return usage;
    }

    try {
        if (g->parsed()) return run_generate(gen, s);
        if (c->parsed()) return run_close(cl, s);
        if (e->parsed()) return run_extract(ex, s);
        if (v->parsed()) return run_verify(ver, s);
        if (d->parsed()) return run_export_dot(dx, s);
        if (gc->parsed()) return run_ground(gr, s);
        if (ic->parsed()) return run_index(ix, s);
        if (sc->parsed()) return run_search(se, s);
    } catch (const Error& err) {
        s.log << "geoform: " << err.what() << "\n";
        return exit_code(err.code());
    } catch (const json::exception& err) {
        s.log << "geoform: malformed input: " << err.what() << "\n";
        return usage;
    }
    return usage;
}

}  // namespace geoform::cli
