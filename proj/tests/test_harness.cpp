#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <unistd.h>

#include "autochecker/errors.hpp"
#include "autochecker/eval.hpp"
#include "autochecker/harness.hpp"
#include "autochecker/minilint.hpp"

#include "support/scenario.hpp"

using namespace autochecker;
using testsupport::data_dir;
using testsupport::read_file;

namespace fs = std::filesystem;

namespace {

fs::path assignment_dir() {
    return data_dir() / "rules" / "assignment_nonfinal_static";
}

fs::path make_temp_dir(const std::string& tag) {
    fs::path dir = fs::temp_directory_path() /
                   ("autochecker_test_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

}  // namespace

TEST_CASE("rational arithmetic stays exact") {
    CHECK(Rational(2, 4) == Rational(1, 2));
    CHECK(Rational(0, 5) == Rational(0, 1));
    CHECK(rational_mean({Rational(1, 1), Rational(1, 2)}) == Rational(3, 4));
    CHECK(rational_mean({Rational(2, 3), Rational(1, 2)}) == Rational(7, 12));
    CHECK(rational_mean({}) == Rational(0, 1));
    CHECK(Rational(1, 2) < Rational(2, 3));
    CHECK_THROWS(Rational(1, 0));
}

TEST_CASE("load_suite on the shipped rule") {
    auto [rule, suite] = load_suite(assignment_dir());
    CHECK(rule.name == "assignment-non-final-static");
    CHECK(!rule.description.empty());
    REQUIRE(suite.size() == 6);
    for (std::size_t i = 0; i < suite.size(); ++i)
        CHECK(suite[i].ordinal == static_cast<int>(i) + 1);
    CHECK(suite[0].id == "01_simple_assignment");
    CHECK(suite[0].expected_lines == std::vector<int>{4});
    CHECK(suite[1].expected_problem_count == 0);  // negative test
    CHECK(suite[1].expected_lines.empty());
}

TEST_CASE("load_suite rejects malformed layouts") {
    SUBCASE("orphan source") {
        fs::path dir = make_temp_dir("orphan");
        write(dir / "rule.json", R"({"name":"r","description":"d"})");
        fs::create_directories(dir / "tests");
        write(dir / "tests" / "01_a.minisrc", "class A { }\n");
        CHECK_THROWS_AS(load_suite(dir), SuiteFormatError);
        fs::remove_all(dir);
    }
    SUBCASE("orphan expect") {
        fs::path dir = make_temp_dir("orphan_expect");
        write(dir / "rule.json", R"({"name":"r","description":"d"})");
        fs::create_directories(dir / "tests");
        write(dir / "tests" / "01_a.minisrc", "class A { }\n");
        write(dir / "tests" / "01_a.expect", R"({"problems":0,"lines":[]})");
        write(dir / "tests" / "02_b.expect", R"({"problems":0,"lines":[]})");
        CHECK_THROWS_AS(load_suite(dir), SuiteFormatError);
        fs::remove_all(dir);
    }
    SUBCASE("problem count and line list disagree") {
        fs::path dir = make_temp_dir("mismatch");
        write(dir / "rule.json", R"({"name":"r","description":"d"})");
        fs::create_directories(dir / "tests");
        write(dir / "tests" / "01_a.minisrc", "class A { }\n");
        write(dir / "tests" / "01_a.expect", R"({"problems":2,"lines":[1]})");
        CHECK_THROWS_AS(load_suite(dir), SuiteFormatError);
        fs::remove_all(dir);
    }
    SUBCASE("expected line outside the source") {
        fs::path dir = make_temp_dir("range");
        write(dir / "rule.json", R"({"name":"r","description":"d"})");
        fs::create_directories(dir / "tests");
        write(dir / "tests" / "01_a.minisrc", "class A { }\n");
        write(dir / "tests" / "01_a.expect", R"({"problems":1,"lines":[40]})");
        CHECK_THROWS_AS(load_suite(dir), SuiteFormatError);
        fs::remove_all(dir);
    }
}

TEST_CASE("validate_checker on the ground truth") {
    auto [rule, suite] = load_suite(assignment_dir());
    MinilintBackend backend;
    std::string checker = read_file(assignment_dir() / "checker_groundtruth.check");
    ValidationReport report =
        validate_checker(checker, suite, backend, minilint::builtin_catalog());
    CHECK(report.compile_ok);
    CHECK(report.passed.size() == 6);
    CHECK(report.failed.empty());
    CHECK(report.pr == Rational(1, 1));
    // partition invariant
    CHECK(report.passed.size() + report.failed.size() == suite.size());
    // revalidation reproduces the document byte for byte
    ValidationReport again =
        validate_checker(checker, suite, backend, minilint::builtin_catalog());
    CHECK(report_to_json(report) == report_to_json(again));
}

TEST_CASE("compile failure fails every test") {
    auto [rule, suite] = load_suite(assignment_dir());
    MinilintBackend backend;
    ValidationReport report = validate_checker(
        "on ClassDecl as c { let x = c.jjtGetNumChildren(); }\n", suite, backend,
        minilint::builtin_catalog());
    CHECK_FALSE(report.compile_ok);
    CHECK(report.passed.empty());
    CHECK(report.failed.size() == suite.size());
    CHECK(report.pr == Rational(0, 1));
    REQUIRE(report.compile_error.has_value());
    CHECK(report.compile_error->unknown_names.size() == 1);
}

TEST_CASE("do-nothing checker passes exactly the negative tests") {
    auto [rule, suite] = load_suite(assignment_dir());
    MinilintBackend backend;
    ValidationReport report = validate_checker("on ClassDecl as c { }\n", suite, backend,
                                               minilint::builtin_catalog());
    CHECK(report.compile_ok);
    // 02, 03, 04 are the negative tests of the shipped suite
    CHECK(report.passed.size() == 3);
    CHECK(report.pr == Rational(1, 2));
}

TEST_CASE("a runtime error fails only the affected test") {
    auto [rule, suite] = load_suite(assignment_dir());
    MinilintBackend backend;
    // dereferences the parent of the root: fails at runtime on every test,
    // which the harness records as ordinary failures rather than crashing
    ValidationReport report = validate_checker(
        "on CompilationUnit as u { report(u.getParent().getChild(0), \"x\"); }\n",
        suite, backend, minilint::builtin_catalog());
    CHECK(report.compile_ok);
    CHECK(report.passed.empty());
    for (const auto& [id, verdict] : report.per_test) {
        CHECK_FALSE(verdict.passed);
        CHECK(verdict.note.find("runtime error") != std::string::npos);
    }
}

TEST_CASE("duplicate violations count as distinct multiset members") {
    TestSuite suite(1);
    suite[0].id = "01_dup";
    suite[0].ordinal = 1;
    suite[0].source = "class A {\n  int x;\n}\n";
    suite[0].expected_problem_count = 1;
    suite[0].expected_lines = {2};
    MinilintBackend backend;
    // two reports on the same node: [2, 2] != [2]
    std::string doubled =
        "on FieldDecl as f { report(f, \"a\"); report(f, \"b\"); }\n";
    ValidationReport report =
        validate_checker(doubled, suite, backend, minilint::builtin_catalog());
    CHECK(report.passed.empty());

    suite[0].expected_problem_count = 2;
    suite[0].expected_lines = {2, 2};
    report = validate_checker(doubled, suite, backend, minilint::builtin_catalog());
    CHECK(report.passed.size() == 1);
}

TEST_CASE("unparseable test source is a suite bug") {
    TestSuite suite(1);
    suite[0].id = "01_bad";
    suite[0].ordinal = 1;
    suite[0].source = "class {";
    suite[0].expected_problem_count = 0;
    MinilintBackend backend;
    CHECK_THROWS_AS(validate_checker("on ClassDecl as c { }\n", suite, backend,
                                     minilint::builtin_catalog()),
                    SuiteFormatError);
}

TEST_CASE("compute_metrics") {
    auto report = [](bool compile_ok, int passed, int total) {
        ValidationReport r;
        r.compile_ok = compile_ok;
        for (int i = 0; i < total; ++i) {
            std::string id = "t" + std::to_string(i);
            if (compile_ok && i < passed) {
                r.passed.push_back(id);
            } else {
                r.failed.push_back(id);
            }
        }
        r.pr = Rational(compile_ok ? passed : 0, total);
        return r;
    };

    SUBCASE("hand-computed table") {
        std::map<std::string, ValidationReport> outcomes;
        outcomes["a"] = report(true, 4, 4);   // TPR 1.0
        outcomes["b"] = report(true, 2, 4);   // TPR 0.5
        Metrics m = compute_metrics(outcomes);
        CHECK(m.rule_pc == 2);
        CHECK(m.rule_pot == 2);
        CHECK(m.rule_pat == 1);
        CHECK(m.tc_pass == 6);
        CHECK(m.tpr_avg == Rational(3, 4));
        CHECK(m.tpr_per_rule.at("b") == Rational(1, 2));
    }
    SUBCASE("three of four") {
        std::map<std::string, ValidationReport> outcomes;
        outcomes["only"] = report(true, 3, 4);
        Metrics m = compute_metrics(outcomes);
        CHECK(m.tpr_avg == Rational(3, 4));
        CHECK(m.rule_pot == 1);
        CHECK(m.rule_pat == 0);
    }
    SUBCASE("non-compiling final contributes nothing") {
        std::map<std::string, ValidationReport> outcomes;
        outcomes["a"] = report(false, 0, 3);
        Metrics m = compute_metrics(outcomes);
        CHECK(m.rule_pc == 0);
        CHECK(m.rule_pot == 0);
        CHECK(m.rule_pat == 0);
        CHECK(m.tc_pass == 0);
    }
    SUBCASE("ordering chain on randomized synthetic reports") {
        std::mt19937 rng(31);
        for (int trial = 0; trial < 500; ++trial) {
            std::map<std::string, ValidationReport> outcomes;
            int rules = 1 + static_cast<int>(rng() % 6);
            for (int r = 0; r < rules; ++r) {
                int total = 1 + static_cast<int>(rng() % 8);
                bool compiles = rng() % 4 != 0;
                int passed = compiles ? static_cast<int>(rng() % (total + 1)) : 0;
                outcomes["rule" + std::to_string(r)] = report(compiles, passed, total);
            }
            Metrics m = compute_metrics(outcomes);
            CHECK(m.rule_pat <= m.rule_pot);
            CHECK(m.rule_pot <= m.rule_pc);
            CHECK(m.rule_pc <= rules);
        }
    }
}

TEST_CASE("run_eval keeps the best run and isolates failures") {
    const testsupport::ScenarioEnv& env = testsupport::scenario_env();

    fs::path ruleset = make_temp_dir("ruleset");
    // rule_a: scenario suite of 5 name-keyed tests, no transcript on disk
    fs::create_directories(ruleset / "rule_a" / "tests");
    write(ruleset / "rule_a" / "rule.json",
          R"({"name":"rule_a","description":"name-keyed scenario rule"})");
    for (int i = 1; i <= 5; ++i) {
        std::string stem = testsupport::scenario_test_id(i);
        write(ruleset / "rule_a" / "tests" / (stem + ".minisrc"),
              "class C" + std::to_string(i) + " {\n  int marker;\n}\n");
        write(ruleset / "rule_a" / "tests" / (stem + ".expect"),
              R"({"problems":1,"lines":[1]})");
    }
    // rule_b: loads but its transcript is exhausted immediately
    fs::create_directories(ruleset / "rule_b" / "tests");
    write(ruleset / "rule_b" / "rule.json",
          R"({"name":"rule_b","description":"broken transcript rule"})");
    write(ruleset / "rule_b" / "tests" / "01_x.minisrc", "class X {\n  int marker;\n}\n");
    write(ruleset / "rule_b" / "tests" / "01_x.expect", R"({"problems":1,"lines":[1]})");

    // run 1 passes 3 of 5 tests, run 2 passes 4 of 5; every attempt of a run
    // emits the same name-keyed checker, so the reference simulation shapes
    // the transcript (skip rounds burn five attempts each)
    auto scripted_run = [](const std::set<int>& pass_set) {
        std::vector<std::set<int>> plan(40, pass_set);
        testsupport::OracleRun oracle = testsupport::simulate_cycle(5, plan);
        return testsupport::transcript_for(oracle, plan);
    };
    std::vector<std::vector<TranscriptEntry>> runs = {
        scripted_run({1, 2, 3}),
        scripted_run({1, 2, 3, 4}),
    };
    int call_index = 0;

    RetrievalService retriever;
    retriever.catalog = &env.catalog;
    retriever.full_db = &env.full_db;
    retriever.meta_db = &env.meta_db;
    retriever.metaops = &env.metaops;
    retriever.embedder = &env.embedder;

    EvalEnv eval_env;
    eval_env.retriever = &retriever;
    eval_env.backend = &env.backend;
    eval_env.catalog = &env.catalog;
    eval_env.template_source = env.template_source;
    eval_env.make_llm = [&](const fs::path& rule_dir) -> std::unique_ptr<LlmClient> {
        if (rule_dir.filename() == "rule_b")
            return std::make_unique<ScriptedLlmClient>(std::vector<TranscriptEntry>{});
        return std::make_unique<ScriptedLlmClient>(runs[call_index++ % 2]);
    };

    EvalDocument doc = run_eval(ruleset, eval_env, 2);
    REQUIRE(doc.rules.size() == 2);
    CHECK(doc.rules[0].name == "rule_a");
    CHECK(doc.rules[0].ok);
    CHECK(doc.rules[0].tpr == Rational(4, 5));  // run aggregates {3/5, 4/5}; the better run is reported
    CHECK(doc.rules[1].name == "rule_b");
    CHECK_FALSE(doc.rules[1].ok);
    CHECK(!doc.rules[1].error.empty());
    // metrics only cover rules that produced a final report
    CHECK(doc.metrics.tpr_avg == Rational(4, 5));
    CHECK(doc.metrics.rule_pat == 0);
    CHECK(doc.metrics.rule_pot == 1);

    std::string table = eval_to_table(doc);
    CHECK(table.find("rule_a") != std::string::npos);
    CHECK(table.find("error") != std::string::npos);
    std::string json_doc = eval_to_json(doc);
    CHECK(json_doc.find("\"tpr_avg\"") != std::string::npos);

    fs::remove_all(ruleset);
}

TEST_CASE("run over the shipped ruleset end to end") {
    const testsupport::ScenarioEnv& env = testsupport::scenario_env();
    RetrievalService retriever;
    retriever.catalog = &env.catalog;
    retriever.full_db = &env.full_db;
    retriever.meta_db = &env.meta_db;
    retriever.metaops = &env.metaops;
    retriever.embedder = &env.embedder;

    EvalEnv eval_env;
    eval_env.retriever = &retriever;
    eval_env.backend = &env.backend;
    eval_env.catalog = &env.catalog;
    eval_env.template_source = env.template_source;
    eval_env.make_llm = [](const fs::path& rule_dir) -> std::unique_ptr<LlmClient> {
        return std::make_unique<ScriptedLlmClient>(
            load_transcript_file((rule_dir / "transcript.jsonl").string()));
    };

    EvalDocument doc = run_eval(data_dir() / "rules", eval_env, 1, 2);
    REQUIRE(doc.rules.size() == 2);
    for (const auto& rule : doc.rules) {
        CHECK(rule.ok);
        CHECK(rule.tpr == Rational(1, 1));
        CHECK(rule.compile_ok);
    }
    CHECK(doc.metrics.rule_pat == 2);
    CHECK(doc.metrics.tc_pass == 10);
    CHECK(doc.metrics.tpr_avg == Rational(1, 1));
}
