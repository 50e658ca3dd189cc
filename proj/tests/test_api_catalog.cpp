#include <doctest.h>

#include "autochecker/api_catalog.hpp"
#include "autochecker/errors.hpp"
#include "autochecker/minilint.hpp"

#include "support/test_support.hpp"

using namespace autochecker;

namespace {

ApiEntry make_entry(std::string owner, std::string method, std::string ret,
                    bool returns_node = false, bool is_util = false,
                    bool abstract_owner = false, std::string comment = "") {
    ApiEntry e;
    e.id = owner + "." + method;
    e.owner_type = std::move(owner);
    e.method_name = std::move(method);
    e.return_type = std::move(ret);
    e.returns_node = returns_node;
    e.is_static_util = is_util;
    e.declared_on_abstract_node = abstract_owner;
    e.comment = std::move(comment);
    return e;
}

}  // namespace

TEST_CASE("classify_api") {
    CHECK(classify_api(make_entry("Node", "getParent", "StmtNode", true, false, true)) ==
          ApiKind::edge);
    CHECK(classify_api(make_entry("UtilNs", "isNullLiteral", "bool", false, true)) ==
          ApiKind::util);
    CHECK(classify_api(make_entry("FieldDecl", "isStatic", "bool")) == ApiKind::node);
    // abstract owner but non-node return falls back to node, not edge
    CHECK(classify_api(make_entry("Node", "toString", "string", false, false, true)) ==
          ApiKind::node);
    CHECK_THROWS_AS(
        classify_api(make_entry("Node", "weird", "bool", true, true, true)),
        AmbiguousKind);
}

TEST_CASE("split_camel") {
    CHECK(split_camel_phrase("ASTStringLiteral") == "string literal");
    CHECK(split_camel_phrase("isEmpty") == "is empty");
    CHECK(split_camel_phrase("getSimpleName") == "get simple name");
    CHECK(split_camel_phrase("getChild2") == "get child2");
    CHECK(split_camel_phrase("HTTPResponse") == "http response");
    CHECK(split_camel_phrase("AST") == "");  // nothing left once the prefix goes
    CHECK(split_camel_phrase("Astronomy") == "astronomy");  // prefix is a token, not letters
    CHECK(split_camel("ClassDecl") == std::vector<std::string>{"class", "decl"});
}

TEST_CASE("irrelevant comment filter") {
    CHECK(is_irrelevant_comment("throws IllegalStateException on bad input"));
    CHECK(is_irrelevant_comment("Author: somebody"));
    CHECK(is_irrelevant_comment("since 1.0"));
    CHECK(is_irrelevant_comment("DEPRECATED, use getChild instead"));
    CHECK_FALSE(is_irrelevant_comment("True if the constant value is empty."));
    CHECK_FALSE(is_irrelevant_comment(""));
}

TEST_CASE("gen_description templates") {
    // boolean node API with a kept comment
    ApiEntry entry = make_entry("ASTStringLiteral", "isEmpty", "java.lang.Boolean",
                              false, false, false,
                              "True if the constant value is empty.");
    entry.kind = classify_api(entry);
    CHECK(gen_description(entry) ==
          "Check whether string literal is empty //True if the constant value is empty.");

    // non-boolean node API, no comment
    ApiEntry named = make_entry("ClassDecl", "getSimpleName", "String");
    named.kind = classify_api(named);
    CHECK(gen_description(named) == "get simple name of class decl");

    // boolean util API omits the owner
    ApiEntry util = make_entry("AstUtil", "isNullLiteral", "bool", false, true);
    util.kind = classify_api(util);
    CHECK(gen_description(util) == "Check whether is null literal");

    // filtered comment disappears from the description
    ApiEntry filtered = make_entry("TryStmt", "getCatchCount", "int", false, false,
                                   false, "since 1.0");
    filtered.kind = classify_api(filtered);
    CHECK(gen_description(filtered) == "get catch count of try stmt");
}

TEST_CASE("render_signature") {
    ApiEntry entry = make_entry("ASTStringLiteral", "isEmpty", "java.lang.Boolean",
                              false, false, false,
                              "True if the constant value is empty.");
    CHECK(render_signature(entry) ==
          "ASTStringLiteral: java.lang.Boolean isEmpty() //True if the constant value is empty.");
    ApiEntry with_params = make_entry("Node", "getChild", "Node", true, false, true);
    with_params.param_types = {"int"};
    CHECK(render_signature(with_params) == "Node: Node getChild(int)");
}

TEST_CASE("ingest_manifest basics") {
    std::string doc =
        R"({"id":"A.f","owner_type":"A","method_name":"f","return_type":"bool"})" "\n"
        R"({"id":"B.g","owner_type":"B","method_name":"g","return_type":"Node","returns_node":true})" "\n";
    Catalog catalog = ingest_manifest(doc);
    REQUIRE(catalog.size() == 2);
    CHECK(catalog[0].id == "A.f");
    CHECK(catalog[0].kind == ApiKind::node);
    CHECK(catalog[1].id == "B.g");

    SUBCASE("duplicate id") {
        std::string dup = doc +
            R"({"id":"A.f","owner_type":"A","method_name":"f","return_type":"bool"})" "\n";
        CHECK_THROWS_AS(ingest_manifest(dup), DuplicateApi);
    }
    SUBCASE("missing field carries the record index") {
        std::string bad = doc + R"({"id":"C.h","owner_type":"C"})" "\n";
        try {
            ingest_manifest(bad);
            FAIL("expected MalformedManifest");
        } catch (const MalformedManifest& e) {
            CHECK(e.record_index == 3);
        }
    }
    SUBCASE("unparseable record") {
        CHECK_THROWS_AS(ingest_manifest("not json\n"), MalformedManifest);
    }
}

TEST_CASE("metaop and snippet parsing") {
    auto ops = parse_metaops(
        R"({"text":"Get the name of class","category":"Class"})" "\n");
    REQUIRE(ops.size() == 1);
    CHECK(ops[0].text == "Get the name of class");
    CHECK(ops[0].category == "Class");
    CHECK_THROWS(parse_metaops(R"({"category":"Class"})" "\n"));

    auto snippets = parse_snippets(
        R"({"meta_op_text":"op","snippet":"let x = 1;"})" "\n");
    REQUIRE(snippets.size() == 1);
    CHECK(snippets[0].snippet == "let x = 1;");
}

TEST_CASE("shipped seed metaops use the canonical categories") {
    auto ops = parse_metaops(
        testsupport::read_file(testsupport::data_dir() / "metaops.jsonl"));
    CHECK(ops.size() >= 30);
    const auto& categories = metaop_categories();
    std::set<std::string> used;
    for (const auto& op : ops) {
        CHECK(!op.text.empty());
        bool known = false;
        for (const auto& cat : categories) known = known || cat == op.category;
        CHECK_MESSAGE(known, "unknown category: ", op.category);
        used.insert(op.category);
    }
    CHECK(used.size() == categories.size());  // every category represented
}

TEST_CASE("builtin manifest invariants") {
    const Catalog& catalog = minilint::builtin_catalog();
    int edges = 0;
    for (const auto& entry : catalog) {
        CHECK(classify_api(entry) == entry.kind);
        if (entry.kind == ApiKind::edge) ++edges;
        std::string desc = gen_description(entry);
        if (returns_bool(entry))
            CHECK(desc.rfind("Check whether ", 0) == 0);
        CHECK(desc.find("AST") == std::string::npos);
    }
    CHECK(edges == 8);
    // the shipped manifest file matches the backend's export
    CHECK(testsupport::read_file(testsupport::data_dir() / "manifest.jsonl") ==
          minilint::export_manifest());
}
