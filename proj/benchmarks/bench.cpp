#include <benchmark/benchmark.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "autochecker/api_db.hpp"
#include "autochecker/harness.hpp"
#include "autochecker/minilint.hpp"
#include "autochecker/minisrc.hpp"
#include "autochecker/retrieval.hpp"

using namespace autochecker;

namespace {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

const std::filesystem::path kData = AUTOCHECKER_DATA_DIR;

struct Fixture {
    LexicalEmbedder embedder;
    Catalog catalog = minilint::builtin_catalog();
    FullApiDb full_db = build_full_db(catalog, embedder);
    MetaApiDb meta_db;
    std::string checker =
        read_file(kData / "rules" / "assignment_nonfinal_static" /
                  "checker_groundtruth.check");
    std::string test_source =
        read_file(kData / "rules" / "assignment_nonfinal_static" / "tests" /
                  "01_simple_assignment.minisrc");
    CheckerRule rule;
    TestSuite suite;

    Fixture() {
        auto metaops = parse_metaops(read_file(kData / "metaops.jsonl"));
        auto snippets = parse_snippets(read_file(kData / "snippets.jsonl"));
        meta_db = build_meta_db(metaops, full_db, snippets, embedder).first;
        auto loaded = load_suite(kData / "rules" / "assignment_nonfinal_static");
        rule = loaded.first;
        suite = loaded.second;
    }
};

const Fixture& fixture() {
    static Fixture f;
    return f;
}

}  // namespace

static void BM_LexicalEmbed(benchmark::State& state) {
    const auto& f = fixture();
    for (auto _ : state) {
        auto e = f.embedder.embed(
            "Check whether the assigned field of the class is static");
        benchmark::DoNotOptimize(e);
    }
}
BENCHMARK(BM_LexicalEmbed);

static void BM_Similarity(benchmark::State& state) {
    const auto& f = fixture();
    Embedding a = f.embedder.embed("check whether the field is static");
    Embedding b = f.embedder.embed("check whether field decl is static");
    for (auto _ : state) benchmark::DoNotOptimize(similarity(a, b));
}
BENCHMARK(BM_Similarity);

static void BM_BuildFullDb(benchmark::State& state) {
    const auto& f = fixture();
    for (auto _ : state) {
        auto db = build_full_db(f.catalog, f.embedder);
        benchmark::DoNotOptimize(db);
    }
    state.SetItemsProcessed(state.iterations() *
                            static_cast<int64_t>(f.catalog.size()));
}
BENCHMARK(BM_BuildFullDb);

static void BM_RetrieveForSubop(benchmark::State& state) {
    const auto& f = fixture();
    FilteredDb view;
    view.db = &f.full_db;
    for (std::size_t i = 0; i < f.full_db.entries.size(); ++i) view.indices.push_back(i);
    SubOperation subop{"Check whether the field is static", 1};
    RetrievalConfig config;
    for (auto _ : state) {
        auto hit = retrieve_for_subop(subop, f.meta_db, view, f.embedder, config);
        benchmark::DoNotOptimize(hit);
    }
}
BENCHMARK(BM_RetrieveForSubop);

static void BM_ParseSource(benchmark::State& state) {
    const auto& f = fixture();
    for (auto _ : state) {
        auto result = minisrc::parse_source(f.test_source);
        benchmark::DoNotOptimize(result);
    }
}
BENCHMARK(BM_ParseSource);

static void BM_CompileChecker(benchmark::State& state) {
    const auto& f = fixture();
    for (auto _ : state) {
        auto result = minilint::compile_checker(f.checker, f.catalog);
        benchmark::DoNotOptimize(result);
    }
}
BENCHMARK(BM_CompileChecker);

static void BM_ValidateChecker(benchmark::State& state) {
    const auto& f = fixture();
    MinilintBackend backend;
    for (auto _ : state) {
        auto report = validate_checker(f.checker, f.suite, backend, f.catalog);
        benchmark::DoNotOptimize(report);
    }
    state.SetItemsProcessed(state.iterations() *
                            static_cast<int64_t>(f.suite.size()));
}
BENCHMARK(BM_ValidateChecker);

BENCHMARK_MAIN();
