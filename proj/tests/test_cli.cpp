#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include <json.hpp>

#include "support/test_support.hpp"

namespace fs = std::filesystem;

namespace {

struct CmdResult {
    int exit_code = -1;
    std::string output;
};

CmdResult run_cli(const std::string& args) {
    fs::path out_path = fs::temp_directory_path() /
                        ("autochecker_cli_out_" + std::to_string(::getpid()) + ".txt");
    std::string cmd = std::string(AUTOCHECKER_CLI_PATH) + " " + args + " > " +
                      out_path.string() + " 2>&1";
    int status = std::system(cmd.c_str());
    CmdResult result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    result.output = testsupport::read_file(out_path);
    fs::remove(out_path);
    return result;
}

fs::path make_temp_dir(const std::string& tag) {
    fs::path dir = fs::temp_directory_path() /
                   ("autochecker_cli_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

std::string data_path(const std::string& rel) {
    return (testsupport::data_dir() / rel).string();
}

// A config pointing at the shipped data with a db dir of our choosing.
fs::path write_config(const fs::path& dir, const fs::path& db_dir,
                      const std::string& transcript) {
    std::ostringstream cfg;
    cfg << "{\n"
        << "  \"version\": \"1\",\n"
        << "  \"llm\": {\"mode\": \"scripted\", \"transcript_path\": \"" << transcript
        << "\"},\n"
        << "  \"embedder\": {\"mode\": \"lexical\"},\n"
        << "  \"paths\": {\n"
        << "    \"db_dir\": \"" << db_dir.string() << "\",\n"
        << "    \"template\": \"" << data_path("template.check") << "\",\n"
        << "    \"manifest\": \"" << data_path("manifest.jsonl") << "\",\n"
        << "    \"metaops\": \"" << data_path("metaops.jsonl") << "\",\n"
        << "    \"snippets\": \"" << data_path("snippets.jsonl") << "\"\n"
        << "  }\n"
        << "}\n";
    fs::path path = dir / "config.json";
    write(path, cfg.str());
    return path;
}

struct CliWorld {
    fs::path dir;
    fs::path db_dir;
    fs::path config;

    CliWorld() {
        dir = make_temp_dir("world");
        db_dir = dir / "db";
        config = write_config(
            dir, db_dir,
            data_path("rules/assignment_nonfinal_static/transcript.jsonl"));
        CmdResult build = run_cli("build-db --config " + config.string());
        REQUIRE(build.exit_code == 0);
    }
    ~CliWorld() { fs::remove_all(dir); }
};

}  // namespace

TEST_CASE("build-db on the shipped data resolves every meta-op") {
    CliWorld world;
    CmdResult rebuild = run_cli("build-db --config " + world.config.string());
    CHECK(rebuild.exit_code == 0);
    CHECK(rebuild.output.find("unresolved meta-ops: 0") != std::string::npos);
    CHECK(fs::exists(world.db_dir / "full_db.jsonl"));
    CHECK(fs::exists(world.db_dir / "meta_db.jsonl"));
    CHECK(fs::exists(world.db_dir / "catalog.jsonl"));
}

TEST_CASE("build-db reports pending meta-ops with exit 2") {
    fs::path dir = make_temp_dir("pending");
    write(dir / "metaops.jsonl",
          R"({"text":"Completely unmatched operation","category":"Class"})" "\n");
    CmdResult result = run_cli("build-db --manifest " + data_path("manifest.jsonl") +
                               " --metaops " + (dir / "metaops.jsonl").string() +
                               " --db-dir " + (dir / "db").string());
    CHECK(result.exit_code == 2);
    CHECK(result.output.find("Completely unmatched operation") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("build-db without inputs is an error") {
    CmdResult result = run_cli("build-db --manifest /nonexistent/manifest.jsonl "
                               "--metaops /nonexistent/m.jsonl --db-dir /tmp/never");
    CHECK(result.exit_code == 1);
    CHECK(result.output.find("error:") != std::string::npos);
}

TEST_CASE("gen on the shipped fixture reaches a full pass") {
    CliWorld world;
    fs::path out = world.dir / "gen_out";
    CmdResult result =
        run_cli("gen --config " + world.config.string() + " --rule-dir " +
                data_path("rules/assignment_nonfinal_static") + " --out " + out.string());
    CHECK(result.exit_code == 0);
    CHECK(result.output.find("pr_f: 1/1") != std::string::npos);
    CHECK(fs::exists(out / "checker.check"));
    CHECK(fs::exists(out / "replay.log"));
    CHECK(fs::exists(out / "report"));
}

TEST_CASE("gen with a transcript that never passes skips and exits 3") {
    CliWorld world;
    // one-test rule whose transcript always emits a do-nothing checker
    fs::path rule_dir = world.dir / "stubborn";
    fs::create_directories(rule_dir / "tests");
    write(rule_dir / "rule.json", R"({"name":"stubborn","description":"always fails"})");
    write(rule_dir / "tests" / "01_x.minisrc", "class X {\n  int marker;\n}\n");
    write(rule_dir / "tests" / "01_x.expect", R"({"problems":1,"lines":[1]})");
    std::ostringstream transcript;
    transcript << R"({"role":"decompose","response":"1. Check the class name"})" << "\n";
    transcript << R"({"role":"generate","response":"on ClassDecl as c { }"})" << "\n";
    for (int i = 0; i < 4; ++i)
        transcript << R"({"role":"refine","response":"on ClassDecl as c { }"})" << "\n";
    write(rule_dir / "transcript.jsonl", transcript.str());

    fs::path out = world.dir / "stubborn_out";
    CmdResult result = run_cli("gen --config " + world.config.string() + " --rule-dir " +
                               rule_dir.string() + " --transcript " +
                               (rule_dir / "transcript.jsonl").string() + " --out " +
                               out.string());
    CHECK(result.exit_code == 3);
    std::string replay = testsupport::read_file(out / "replay.log");
    int attempts = 0;
    std::istringstream lines(replay);
    std::string line;
    while (std::getline(lines, line))
        if (!line.empty()) ++attempts;
    CHECK(attempts == 5);
    CHECK(replay.find("\"accepted\":false") != std::string::npos);
}

TEST_CASE("gen --prior refines an existing checker") {
    CliWorld world;
    // prior checker misses the final-static exemption; one refinement fixes it
    fs::path prior = world.dir / "prior.check";
    write(prior,
          "on CtorDecl as ctor {\n"
          "    for assign in ctor.descendants(AssignExpr) {\n"
          "        let target = assign.getTarget();\n"
          "        let cls = ctor.firstParentOfType(ClassDecl);\n"
          "        for field in cls.descendants(FieldDecl) {\n"
          "            if (field.getName() == target.getName() && field.isStatic()) {\n"
          "                report(assign, \"assignment to a non-final static field in a constructor\");\n"
          "            }\n"
          "        }\n"
          "    }\n"
          "}\n");
    fs::path transcript = world.dir / "prior_transcript.jsonl";
    std::string groundtruth = testsupport::read_file(
        testsupport::data_dir() / "rules" / "assignment_nonfinal_static" /
        "checker_groundtruth.check");
    std::ostringstream entries;
    entries << R"({"role":"decompose","response":"1. Check whether the field is static"})"
            << "\n";
    nlohmann::json refine;
    refine["role"] = "refine";
    refine["response"] = "```\n" + groundtruth + "```\n";
    entries << refine.dump() << "\n";
    write(transcript, entries.str());

    fs::path out = world.dir / "prior_out";
    CmdResult result = run_cli("gen --config " + world.config.string() + " --rule-dir " +
                               data_path("rules/assignment_nonfinal_static") +
                               " --transcript " + transcript.string() + " --prior " +
                               prior.string() + " --out " + out.string());
    CHECK(result.exit_code == 0);
    CHECK(result.output.find("rounds: 1") != std::string::npos);
}

TEST_CASE("bad config is an error") {
    fs::path dir = make_temp_dir("badcfg");
    write(dir / "config.json", "{\"version\": \"7\"}");
    CmdResult result =
        run_cli("gen --config " + (dir / "config.json").string() +
                " --rule-dir " + data_path("rules/assignment_nonfinal_static"));
    CHECK(result.exit_code == 1);
    fs::remove_all(dir);
}

TEST_CASE("validate prints the pass rate") {
    CliWorld world;
    CmdResult result = run_cli(
        "validate --checker " +
        data_path("rules/assignment_nonfinal_static/checker_groundtruth.check") +
        " --suite " + data_path("rules/assignment_nonfinal_static") + " --db-dir " +
        world.db_dir.string());
    CHECK(result.exit_code == 0);
    CHECK(result.output.find("pr: 1/1") != std::string::npos);
}

TEST_CASE("retrieve prints the per-sub-op table") {
    CliWorld world;
    fs::path transcript = world.dir / "retrieve_transcript.jsonl";
    write(transcript,
          R"({"role":"decompose","response":"1. Check whether the field is static"})" "\n");
    fs::path cfg = write_config(world.dir, world.db_dir, transcript.string());
    CmdResult result = run_cli(
        "retrieve --config " + cfg.string() + " --rule " +
        data_path("rules/assignment_nonfinal_static/rule.json") + " --test " +
        data_path("rules/assignment_nonfinal_static/tests/01_simple_assignment.minisrc") +
        " --db-dir " + world.db_dir.string());
    CHECK(result.exit_code == 0);
    CHECK(result.output.find("\"hit\": \"meta\"") != std::string::npos);
    CHECK(result.output.find("FieldDecl: bool isStatic()") != std::string::npos);
}

TEST_CASE("decompose prints the parsed sub-operations") {
    CliWorld world;
    fs::path transcript = world.dir / "decompose_transcript.jsonl";
    write(transcript, R"({"role":"decompose","response":"1. first\n2. second"})" "\n");
    fs::path cfg = write_config(world.dir, world.db_dir, transcript.string());
    CmdResult result = run_cli(
        "decompose --config " + cfg.string() + " --rule " +
        data_path("rules/assignment_nonfinal_static/rule.json") + " --test " +
        data_path("rules/assignment_nonfinal_static/tests/01_simple_assignment.minisrc"));
    CHECK(result.exit_code == 0);
    CHECK(result.output.find("1. first") != std::string::npos);
    CHECK(result.output.find("2. second") != std::string::npos);
}

TEST_CASE("eval emits the metrics table over the shipped ruleset") {
    CliWorld world;
    fs::path out = world.dir / "eval.json";
    CmdResult result = run_cli("eval --config " + world.config.string() + " --ruleset " +
                               data_path("rules") + " --runs 1 --jobs 2 --out " +
                               out.string());
    CHECK(result.exit_code == 0);
    CHECK(result.output.find("assignment_nonfinal_static") != std::string::npos);
    CHECK(result.output.find("null_assignment") != std::string::npos);
    CHECK(result.output.find("rule_pat=2") != std::string::npos);
    CHECK(fs::exists(out));
}

TEST_CASE("export-manifest matches the shipped manifest") {
    CmdResult result = run_cli("export-manifest");
    CHECK(result.exit_code == 0);
    CHECK(result.output == testsupport::read_file(testsupport::data_dir() / "manifest.jsonl"));
}
