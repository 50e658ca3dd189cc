#include <doctest.h>

#include "autochecker/api_db.hpp"
#include "autochecker/errors.hpp"
#include "autochecker/minilint.hpp"

#include "support/test_support.hpp"

using namespace autochecker;
using testsupport::data_dir;
using testsupport::fixture_dir;
using testsupport::read_file;

namespace {

Catalog reference_catalog() {
    return ingest_manifest(read_file(fixture_dir() / "reference_catalog" / "manifest.jsonl"));
}

}  // namespace

TEST_CASE("build_full_db produces one context per entry") {
    LexicalEmbedder embedder;
    Catalog catalog = reference_catalog();
    FullApiDb db = build_full_db(catalog, embedder);
    REQUIRE(db.entries.size() == catalog.size());
    CHECK(db.embedder_id == embedder.id());

    const ApiContext& entry = db.entries[0];
    CHECK(entry.description ==
          "Check whether string literal is empty //True if the constant value is empty.");
    CHECK(entry.payload_kind == PayloadKind::signature);
    CHECK(entry.payload.find("isEmpty() //True if the constant value is empty.") !=
          std::string::npos);
    CHECK(entry.source_ids == std::vector<std::string>{"ASTStringLiteral.isEmpty"});
    CHECK(std::abs(entry.vector.norm() - 1.0) < 1e-9);
}

TEST_CASE("full db size matches the shipped catalog") {
    LexicalEmbedder embedder;
    const Catalog& catalog = minilint::builtin_catalog();
    FullApiDb db = build_full_db(catalog, embedder);
    CHECK(db.entries.size() == catalog.size());
}

TEST_CASE("rebuilding from the same manifest is byte-identical") {
    LexicalEmbedder embedder;
    std::string manifest = read_file(data_dir() / "manifest.jsonl");
    std::string first = save_db(build_full_db(ingest_manifest(manifest), embedder));
    std::string second = save_db(build_full_db(ingest_manifest(manifest), embedder));
    CHECK(first == second);
}

TEST_CASE("db round trip through the line format") {
    LexicalEmbedder embedder;
    FullApiDb db = build_full_db(reference_catalog(), embedder);
    ApiDb loaded = load_db(save_db(db));
    REQUIRE(loaded.entries.size() == db.entries.size());
    CHECK(loaded.embedder_id == db.embedder_id);
    for (std::size_t i = 0; i < db.entries.size(); ++i) {
        CHECK(loaded.entries[i].description == db.entries[i].description);
        CHECK(loaded.entries[i].payload == db.entries[i].payload);
        CHECK(loaded.entries[i].source_ids == db.entries[i].source_ids);
        CHECK(similarity(loaded.entries[i].vector, db.entries[i].vector) ==
              doctest::Approx(1.0).epsilon(1e-12));
    }
    // and saving the loaded copy reproduces the bytes
    CHECK(save_db(loaded) == save_db(db));
}

TEST_CASE("load_db rejects broken documents") {
    CHECK_THROWS(load_db(""));  // header missing
    CHECK_THROWS(load_db("{\"format_version\":\"2\"}\n"));
}

TEST_CASE("build_meta_db pairings") {
    LexicalEmbedder embedder;
    FullApiDb full = build_full_db(reference_catalog(), embedder);
    auto metaops = parse_metaops(read_file(fixture_dir() / "reference_catalog" / "metaops.jsonl"));
    auto snippets = parse_snippets(read_file(fixture_dir() / "reference_catalog" / "snippets.jsonl"));

    auto [meta, unresolved] = build_meta_db(metaops, full, snippets, embedder, 0.85);
    REQUIRE(meta.entries.size() == 2);
    CHECK(unresolved.empty());

    SUBCASE("operation-signature pair at similarity 1.0") {
        const ApiContext& sig = meta.entries[0];
        CHECK(sig.description == "Get the name of class");
        CHECK(sig.payload_kind == PayloadKind::signature);
        CHECK(sig.payload == "ASTClass: String getTheName()");
        CHECK(sig.source_ids == std::vector<std::string>{"ASTClass.getTheName"});
        CHECK(similarity(sig.vector, full.entries[1].vector) ==
              doctest::Approx(1.0).epsilon(1e-9));
    }
    SUBCASE("operation-snippet pair when no description matches") {
        const ApiContext& snippet_pair = meta.entries[1];
        CHECK(snippet_pair.description == "Check whether the return type of method is int");
        CHECK(snippet_pair.payload_kind == PayloadKind::snippet);
        CHECK(snippet_pair.payload ==
              "let isInt = method.getTypeName() == \"int\"; // method is a MethodDecl");
        CHECK(snippet_pair.source_ids.empty());
    }
}

TEST_CASE("meta-op without match or snippet goes to unresolved") {
    LexicalEmbedder embedder;
    FullApiDb full = build_full_db(reference_catalog(), embedder);
    std::vector<MetaOp> metaops = {{"Completely unrelated operation text", "Class"}};
    auto [meta, unresolved] = build_meta_db(metaops, full, {}, embedder, 0.85);
    CHECK(meta.entries.empty());
    REQUIRE(unresolved.size() == 1);
    CHECK(unresolved[0].text == "Completely unrelated operation text");
}

TEST_CASE("empty snippet is malformed") {
    LexicalEmbedder embedder;
    FullApiDb full = build_full_db(reference_catalog(), embedder);
    std::vector<MetaOp> metaops = {{"Unmatchable operation xyz", "Class"}};
    std::vector<Snippet> snippets = {{"Unmatchable operation xyz", ""}};
    CHECK_THROWS_AS(build_meta_db(metaops, full, snippets, embedder, 0.85),
                    MalformedSnippet);
}

TEST_CASE("meta db covers the whole seed set") {
    LexicalEmbedder embedder;
    FullApiDb full = build_full_db(minilint::builtin_catalog(), embedder);
    auto metaops = parse_metaops(read_file(data_dir() / "metaops.jsonl"));
    auto snippets = parse_snippets(read_file(data_dir() / "snippets.jsonl"));
    auto [meta, unresolved] = build_meta_db(metaops, full, snippets, embedder, 0.85);
    CHECK(meta.entries.size() + unresolved.size() == metaops.size());
    CHECK(unresolved.empty());
}
