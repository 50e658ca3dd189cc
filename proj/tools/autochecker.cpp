// autochecker command line: build the API-context databases, run the
// test-driven generation loop, and poke at the individual stages.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "autochecker/api_catalog.hpp"
#include "autochecker/api_db.hpp"
#include "autochecker/config.hpp"
#include "autochecker/errors.hpp"
#include "autochecker/eval.hpp"
#include "autochecker/harness.hpp"
#include "autochecker/llm.hpp"
#include "autochecker/minilint.hpp"
#include "autochecker/minisrc.hpp"
#include "autochecker/retrieval.hpp"
#include "autochecker/tdcd.hpp"

namespace fs = std::filesystem;
using namespace autochecker;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitPending = 2;
constexpr int kExitPartial = 3;

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
}

std::unique_ptr<Embedder> make_embedder(const Config& cfg) {
    if (cfg.embedder.mode == "http") {
        if (cfg.embedder.endpoint.empty())
            throw ConfigError("http embedder mode requires an endpoint");
        return std::make_unique<HttpEmbedder>(cfg.embedder.endpoint);
    }
    return std::make_unique<LexicalEmbedder>();
}

std::unique_ptr<LlmClient> make_llm(const Config& cfg) {
    cfg.validate_llm();
    if (cfg.llm.mode == "http")
        return std::make_unique<HttpLlmClient>(cfg.llm.endpoint, cfg.llm.model);
    return std::make_unique<ScriptedLlmClient>(
        load_transcript_file(cfg.llm.transcript_path));
}

struct DbBundle {
    Catalog catalog;
    FullApiDb full_db;
    MetaApiDb meta_db;
};

DbBundle load_dbs(const fs::path& db_dir) {
    DbBundle bundle;
    bundle.catalog = ingest_manifest(read_file(db_dir / "catalog.jsonl"));
    bundle.full_db = load_db_file((db_dir / "full_db.jsonl").string());
    bundle.meta_db = load_db_file((db_dir / "meta_db.jsonl").string());
    return bundle;
}

std::vector<MetaOp> load_metaops_file(const fs::path& path) {
    return parse_metaops(read_file(path));
}

struct CommonOpts {
    std::string config_path;
    Config cfg;

    void load() {
        if (!config_path.empty()) cfg = load_config(config_path);
    }
};

int cmd_build_db(const CommonOpts& common, const std::string& manifest_flag,
                 const std::string& metaops_flag, const std::string& snippets_flag,
                 const std::string& db_dir_flag, double match_threshold) {
    const Config& cfg = common.cfg;
    fs::path manifest_path =
        !manifest_flag.empty() ? manifest_flag : cfg.paths.manifest;
    fs::path metaops_path = !metaops_flag.empty() ? metaops_flag : cfg.paths.metaops;
    fs::path snippets_path =
        !snippets_flag.empty() ? snippets_flag : cfg.paths.snippets;
    fs::path db_dir = !db_dir_flag.empty() ? db_dir_flag : cfg.paths.db_dir;
    if (manifest_path.empty() || metaops_path.empty() || db_dir.empty())
        throw ConfigError("build-db needs --manifest, --metaops and --db-dir");

    Catalog catalog = ingest_manifest(read_file(manifest_path));
    std::vector<MetaOp> metaops = load_metaops_file(metaops_path);
    std::vector<Snippet> snippets;
    if (!snippets_path.empty() && fs::exists(snippets_path))
        snippets = parse_snippets(read_file(snippets_path));

    auto embedder = make_embedder(cfg);
    FullApiDb full_db = build_full_db(catalog, *embedder);
    auto [meta_db, unresolved] =
        build_meta_db(metaops, full_db, snippets, *embedder, match_threshold);

    fs::create_directories(db_dir);
    write_file(db_dir / "catalog.jsonl", render_manifest(catalog));
    save_db_file(full_db, (db_dir / "full_db.jsonl").string());
    save_db_file(meta_db, (db_dir / "meta_db.jsonl").string());
    write_file(db_dir / "unresolved.jsonl", render_metaops(unresolved));

    std::cout << "catalog: " << catalog.size() << " apis\n"
              << "full db: " << full_db.entries.size() << " contexts\n"
              << "meta db: " << meta_db.entries.size() << " contexts\n"
              << "unresolved meta-ops: " << unresolved.size() << "\n";
    if (!unresolved.empty()) {
        for (const auto& op : unresolved) std::cout << "  pending: " << op.text << "\n";
        return kExitPending;
    }
    return kExitOk;
}

RetrievalService make_retriever(const DbBundle& bundle, const std::vector<MetaOp>& metaops,
                                const Embedder& embedder, LlmClient* llm,
                                const RetrievalConfig& thresholds) {
    RetrievalService service;
    service.catalog = &bundle.catalog;
    service.full_db = &bundle.full_db;
    service.meta_db = &bundle.meta_db;
    service.metaops = &metaops;
    service.embedder = &embedder;
    service.llm = llm;
    service.config = thresholds;
    return service;
}

int cmd_gen(const CommonOpts& common, const std::string& rule_dir,
            const std::string& out_dir, const std::string& transcript_flag,
            const std::string& prior_path) {
    Config cfg = common.cfg;
    if (!transcript_flag.empty()) {
        cfg.llm.mode = "scripted";
        cfg.llm.transcript_path = transcript_flag;
    }
    if (cfg.paths.db_dir.empty() || cfg.paths.template_path.empty() ||
        cfg.paths.metaops.empty())
        throw ConfigError("gen needs paths.db_dir, paths.template and paths.metaops");

    auto [rule, suite] = load_suite(rule_dir);
    DbBundle bundle = load_dbs(cfg.paths.db_dir);
    auto metaops = load_metaops_file(cfg.paths.metaops);
    auto embedder = make_embedder(cfg);
    auto llm = make_llm(cfg);
    std::string tmpl = read_file(cfg.paths.template_path);

    RetrievalService retriever =
        make_retriever(bundle, metaops, *embedder, llm.get(), cfg.thresholds);
    MinilintBackend backend;
    TdcdDeps deps;
    deps.retriever = &retriever;
    deps.backend = &backend;
    deps.catalog = &bundle.catalog;
    deps.llm = llm.get();
    deps.template_source = tmpl;
    if (!prior_path.empty())
        deps.prior_checker = minilint::CheckerArtifact{read_file(prior_path), 0, 0};

    TdcdOutcome outcome = run_tdcd(rule, suite, deps, cfg.tdcd);

    fs::create_directories(out_dir);
    if (outcome.final_checker)
        write_file(fs::path(out_dir) / "checker.check", outcome.final_checker->source);
    write_file(fs::path(out_dir) / "replay.log", replay_log(outcome));
    if (outcome.final_report)
        write_file(fs::path(out_dir) / "report", report_to_json(*outcome.final_report));

    std::cout << "rounds: " << outcome.rounds << "  pr_f: "
              << outcome.final_pass_rate.str();
    if (outcome.round_cap_reached) std::cout << "  (round cap reached)";
    std::cout << "\n";
    return outcome.final_pass_rate == Rational(1, 1) ? kExitOk : kExitPartial;
}

int cmd_validate(const CommonOpts& common, const std::string& checker_path,
                 const std::string& suite_dir, const std::string& db_dir_flag) {
    const Config& cfg = common.cfg;
    std::string checker = read_file(checker_path);
    auto [rule, suite] = load_suite(suite_dir);
    Catalog catalog;
    fs::path db_dir = !db_dir_flag.empty() ? db_dir_flag : cfg.paths.db_dir;
    if (!db_dir.empty() && fs::exists(db_dir / "catalog.jsonl")) {
        catalog = ingest_manifest(read_file(db_dir / "catalog.jsonl"));
    } else if (!cfg.paths.manifest.empty()) {
        catalog = ingest_manifest(read_file(cfg.paths.manifest));
    } else {
        catalog = minilint::builtin_catalog();
    }
    MinilintBackend backend;
    ValidationReport report = validate_checker(checker, suite, backend, catalog);
    std::cout << report_summary(report);
    return report.pr == Rational(1, 1) ? kExitOk : kExitPartial;
}

int cmd_retrieve(const CommonOpts& common, const std::string& rule_path,
                 const std::string& test_path, const std::string& db_dir_flag,
                 double meta_threshold, double full_threshold) {
    Config cfg = common.cfg;
    if (meta_threshold > 0) cfg.thresholds.meta_threshold = meta_threshold;
    if (full_threshold > 0) cfg.thresholds.full_threshold = full_threshold;
    fs::path db_dir = !db_dir_flag.empty() ? db_dir_flag : cfg.paths.db_dir;
    if (db_dir.empty() || cfg.paths.metaops.empty())
        throw ConfigError("retrieve needs --db-dir and paths.metaops");

    nlohmann::json rule_doc = nlohmann::json::parse(read_file(rule_path));
    CheckerRule rule{rule_doc.value("name", "rule"), rule_doc.at("description")};
    std::string test_source = read_file(test_path);
    auto parsed = minisrc::parse_source(test_source);
    auto* ast = std::get_if<minisrc::AstPtr>(&parsed);
    if (!ast) {
        const auto& err = std::get<minisrc::ParseError>(parsed);
        throw Error("test does not parse (line " + std::to_string(err.line) +
                    "): " + err.message);
    }

    DbBundle bundle = load_dbs(db_dir);
    auto metaops = load_metaops_file(cfg.paths.metaops);
    auto embedder = make_embedder(cfg);
    auto llm = make_llm(cfg);
    RetrievalService retriever =
        make_retriever(bundle, metaops, *embedder, llm.get(), cfg.thresholds);

    RetrievalResult result = retriever.retrieve_contexts(rule, test_source, **ast);

    nlohmann::json doc;
    doc["per_subop"] = nlohmann::json::array();
    for (const auto& hit : result.per_subop) {
        nlohmann::json h;
        h["subop"] = hit.subop.text;
        h["hit"] = hit_kind_name(hit.kind);
        if (hit.score) h["score"] = *hit.score;
        if (hit.context) h["payload"] = hit.context->payload;
        doc["per_subop"].push_back(std::move(h));
    }
    doc["contexts"] = nlohmann::json::array();
    for (const auto& ctx : result.contexts) {
        doc["contexts"].push_back({{"description", ctx.description},
                                   {"payload_kind", payload_kind_name(ctx.payload_kind)},
                                   {"payload", ctx.payload}});
    }
    std::cout << doc.dump(2) << "\n";
    return kExitOk;
}

int cmd_decompose(const CommonOpts& common, const std::string& rule_path,
                  const std::string& test_path) {
    const Config& cfg = common.cfg;
    if (cfg.paths.metaops.empty()) throw ConfigError("decompose needs paths.metaops");
    nlohmann::json rule_doc = nlohmann::json::parse(read_file(rule_path));
    CheckerRule rule{rule_doc.value("name", "rule"), rule_doc.at("description")};
    std::string test_source = read_file(test_path);
    auto metaops = load_metaops_file(cfg.paths.metaops);
    auto llm = make_llm(cfg);
    auto subops = decompose_rule(rule, test_source, metaops, *llm);
    for (const auto& op : subops) std::cout << op.index << ". " << op.text << "\n";
    return kExitOk;
}

int cmd_eval(const CommonOpts& common, const std::string& ruleset_dir, int runs,
             int jobs, const std::string& out_path) {
    const Config& cfg = common.cfg;
    if (cfg.paths.db_dir.empty() || cfg.paths.template_path.empty() ||
        cfg.paths.metaops.empty())
        throw ConfigError("eval needs paths.db_dir, paths.template and paths.metaops");

    DbBundle bundle = load_dbs(cfg.paths.db_dir);
    auto metaops = load_metaops_file(cfg.paths.metaops);
    auto embedder = make_embedder(cfg);
    std::string tmpl = read_file(cfg.paths.template_path);
    MinilintBackend backend;

    RetrievalService retriever =
        make_retriever(bundle, metaops, *embedder, nullptr, cfg.thresholds);

    EvalEnv env;
    env.retriever = &retriever;
    env.backend = &backend;
    env.catalog = &bundle.catalog;
    env.template_source = tmpl;
    env.tdcd = cfg.tdcd;
    env.make_llm = [&cfg](const fs::path& rule_dir) -> std::unique_ptr<LlmClient> {
        if (cfg.llm.mode == "http")
            return std::make_unique<HttpLlmClient>(cfg.llm.endpoint, cfg.llm.model);
        // Scripted runs expect one transcript per rule directory.
        return std::make_unique<ScriptedLlmClient>(
            load_transcript_file((rule_dir / "transcript.jsonl").string()));
    };

    EvalDocument doc = run_eval(ruleset_dir, env, runs, jobs);
    std::cout << eval_to_table(doc);
    if (!out_path.empty()) write_file(out_path, eval_to_json(doc));
    return kExitOk;
}

int cmd_export_manifest(const std::string& out_path) {
    std::string manifest = minilint::export_manifest();
    if (out_path.empty()) {
        std::cout << manifest;
    } else {
        write_file(out_path, manifest);
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"LLM-driven test-driven checker generation"};
    app.require_subcommand(1);
    app.fallthrough();

    CommonOpts common;
    app.add_option("--config", common.config_path, "configuration file (JSON, version 1)");

    // build-db
    auto* build = app.add_subcommand("build-db", "build the Full-API and Meta-API databases");
    std::string manifest_flag, metaops_flag, snippets_flag, db_dir_flag;
    double match_threshold = 0.85;
    build->add_option("--manifest", manifest_flag, "API manifest (jsonl)");
    build->add_option("--metaops", metaops_flag, "meta-op set (jsonl)");
    build->add_option("--snippets", snippets_flag, "snippet document (jsonl)");
    build->add_option("--db-dir", db_dir_flag, "output directory");
    build->add_option("--match-threshold", match_threshold,
                      "meta-op to description alignment threshold");

    // gen
    auto* gen = app.add_subcommand("gen", "run test-driven checker generation for one rule");
    std::string rule_dir, out_dir = "out", transcript_flag, prior_path;
    gen->add_option("--rule-dir", rule_dir, "rule directory (rule.json + tests/)")->required();
    gen->add_option("--out", out_dir, "output directory for checker.check, replay.log, report");
    gen->add_option("--transcript", transcript_flag, "scripted transcript override");
    gen->add_option("--prior", prior_path,
                    "existing checker to refine incrementally instead of starting fresh");

    // validate
    auto* validate = app.add_subcommand("validate", "validate a checker against a suite");
    std::string checker_path, suite_dir, validate_db_dir;
    validate->add_option("--checker", checker_path, "checker script (.check)")->required();
    validate->add_option("--suite", suite_dir, "rule directory with tests/")->required();
    validate->add_option("--db-dir", validate_db_dir, "database directory for the catalog");

    // retrieve
    auto* retrieve = app.add_subcommand("retrieve", "run logic-guided API-context retrieval");
    std::string rule_path, test_path, retrieve_db_dir;
    double meta_threshold = 0, full_threshold = 0;
    retrieve->add_option("--rule", rule_path, "rule document (json)")->required();
    retrieve->add_option("--test", test_path, "test source (.minisrc)")->required();
    retrieve->add_option("--db-dir", retrieve_db_dir, "database directory");
    retrieve->add_option("--meta-threshold", meta_threshold, "meta tier threshold");
    retrieve->add_option("--full-threshold", full_threshold, "full tier threshold");

    // decompose
    auto* decompose = app.add_subcommand("decompose", "decompose a rule into sub-operations");
    std::string d_rule_path, d_test_path;
    decompose->add_option("--rule", d_rule_path, "rule document (json)")->required();
    decompose->add_option("--test", d_test_path, "test source (.minisrc)")->required();

    // eval
    auto* eval = app.add_subcommand("eval", "evaluate a ruleset and report metrics");
    std::string ruleset_dir, eval_out;
    int runs = 1, jobs = 1;
    eval->add_option("--ruleset", ruleset_dir, "directory of rule directories")->required();
    eval->add_option("--runs", runs, "runs per rule; the best is kept");
    eval->add_option("--jobs", jobs, "worker pool size");
    eval->add_option("--out", eval_out, "write the evaluation document here");

    // export-manifest
    auto* export_cmd =
        app.add_subcommand("export-manifest", "emit the reference backend's API manifest");
    std::string export_out;
    export_cmd->add_option("--out", export_out, "output file (stdout when omitted)");

    CLI11_PARSE(app, argc, argv);

    try {
        common.load();
        if (build->parsed())
            return cmd_build_db(common, manifest_flag, metaops_flag, snippets_flag,
                                db_dir_flag, match_threshold);
        if (gen->parsed())
            return cmd_gen(common, rule_dir, out_dir, transcript_flag, prior_path);
        if (validate->parsed())
            return cmd_validate(common, checker_path, suite_dir, validate_db_dir);
        if (retrieve->parsed())
            return cmd_retrieve(common, rule_path, test_path, retrieve_db_dir,
                                meta_threshold, full_threshold);
        if (decompose->parsed()) return cmd_decompose(common, d_rule_path, d_test_path);
        if (eval->parsed()) return cmd_eval(common, ruleset_dir, runs, jobs, eval_out);
        if (export_cmd->parsed()) return cmd_export_manifest(export_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
