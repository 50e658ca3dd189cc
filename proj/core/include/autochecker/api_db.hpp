#pragma once

#include <string>
#include <utility>
#include <vector>

#include "autochecker/api_catalog.hpp"
#include "autochecker/embedding.hpp"

namespace autochecker {

enum class PayloadKind { signature, snippet };

const char* payload_kind_name(PayloadKind kind);
PayloadKind payload_kind_from_name(const std::string& name);

/// One retrievable knowledge unit: descriptive text paired with an API
/// signature or an implementation snippet.
struct ApiContext {
    std::string description;
    PayloadKind payload_kind{PayloadKind::signature};
    std::string payload;
    std::vector<std::string> source_ids;  // empty for hand-written snippets
    Embedding vector;
};

struct ApiDb {
    std::vector<ApiContext> entries;
    std::string embedder_id;
};

using FullApiDb = ApiDb;
using MetaApiDb = ApiDb;

/// One description-signature pair per catalog entry, in catalog order.
FullApiDb build_full_db(const Catalog& catalog, const Embedder& embedder);

/// For each meta-op: the best-matching full-DB description at or above
/// match_threshold yields an operation-signature pair; otherwise a snippet
/// keyed by the meta-op text yields an operation-snippet pair; otherwise
/// the meta-op is reported back as unresolved so the operator can author
/// a snippet for it.
std::pair<MetaApiDb, std::vector<MetaOp>> build_meta_db(
    const std::vector<MetaOp>& metaops, const FullApiDb& full_db,
    const std::vector<Snippet>& snippets, const Embedder& embedder,
    double match_threshold = 0.85);

/// Line-delimited persistence: a header line with format version "1" and the
/// embedder id, then one record per ApiContext. Serialization is
/// deterministic, so rebuilding from the same manifest with a deterministic
/// embedder is byte-identical.
std::string save_db(const ApiDb& db);
ApiDb load_db(const std::string& text);

std::string save_db_file(const ApiDb& db, const std::string& path);
ApiDb load_db_file(const std::string& path);

}  // namespace autochecker
