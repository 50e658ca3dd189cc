#pragma once

#include <string>
#include <vector>

namespace autochecker {

enum class ApiKind { node, edge, util };

const char* api_kind_name(ApiKind kind);
ApiKind api_kind_from_name(const std::string& name);

/// One framework API as declared by the manifest.
struct ApiEntry {
    std::string id;
    ApiKind kind{ApiKind::node};
    std::string owner_type;
    std::string method_name;
    std::vector<std::string> param_types;
    std::string return_type;
    bool returns_node{false};
    bool is_static_util{false};
    bool declared_on_abstract_node{false};
    std::string comment;
};

using Catalog = std::vector<ApiEntry>;

/// An atomic checking operation used to standardize retrieval granularity.
struct MetaOp {
    std::string text;
    std::string category;
};

/// A hand-written implementation snippet keyed by meta-op text.
struct Snippet {
    std::string meta_op_text;
    std::string snippet;
};

/// kind = edge iff declared on the abstract node and node-returning,
/// util iff static utility, node otherwise. Both abstract-node and
/// static-util at once is contradictory and raises AmbiguousKind.
ApiKind classify_api(const ApiEntry& entry);

/// CamelCase split into lowercase words; a leading "AST" acronym token is
/// dropped and digits stay attached to the preceding word.
std::vector<std::string> split_camel(const std::string& name);

/// split_camel joined with single spaces.
std::string split_camel_phrase(const std::string& name);

bool returns_bool(const ApiEntry& entry);

/// Comments whose first word is throws/author/since/deprecated
/// (case-insensitive) carry no checking semantics and are dropped.
bool is_irrelevant_comment(const std::string& comment);

/// Descriptive text: prefix ("Check whether " for boolean returns) +
/// basic phrase (owner included for node/edge, omitted for util) +
/// the surviving comment appended as " //<comment>".
std::string gen_description(const ApiEntry& entry);

/// "owner: return method(params) //comment" with the same comment filter
/// applied as gen_description.
std::string render_signature(const ApiEntry& entry);

/// Parse a line-delimited manifest document. Order of records is preserved
/// and each entry's kind is assigned via classify_api.
Catalog ingest_manifest(const std::string& manifest_doc);

std::string render_manifest(const Catalog& catalog);

std::vector<MetaOp> parse_metaops(const std::string& doc);
std::vector<Snippet> parse_snippets(const std::string& doc);
std::string render_metaops(const std::vector<MetaOp>& ops);

/// The meta-op category labels the seed set is organized under.
const std::vector<std::string>& metaop_categories();

}  // namespace autochecker
