#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "autochecker/api_catalog.hpp"
#include "autochecker/api_db.hpp"
#include "autochecker/llm.hpp"
#include "autochecker/minisrc.hpp"
#include "autochecker/suite.hpp"

namespace autochecker {

struct SubOperation {
    std::string text;
    int index = 0;  // position in the decomposition
};

struct RetrievalConfig {
    double meta_threshold = 0.85;
    double full_threshold = 0.80;
};

enum class HitKind { meta, full, none };
const char* hit_kind_name(HitKind kind);

struct SubopHit {
    SubOperation subop;
    HitKind kind{HitKind::none};
    std::optional<double> score;
    std::optional<ApiContext> context;
};

struct RetrievalResult {
    std::vector<ApiContext> contexts;  // deduplicated, edge contexts first
    std::vector<SubopHit> per_subop;
};

/// Ask the LLM to split the rule's checking logic into sub-operations, with
/// the meta-op texts shown as granularity references. The response is parsed
/// as a bulleted or numbered list.
std::vector<SubOperation> decompose_rule(const CheckerRule& rule,
                                         const std::string& test_source,
                                         const std::vector<MetaOp>& metaops,
                                         LlmClient& llm);

/// View of a DB restricted to the contexts still relevant for a test:
/// node-kind contexts whose owner types all miss the test's AST are dropped,
/// edge- and util-kind contexts (and snippet contexts, which have no source
/// APIs) always survive.
struct FilteredDb {
    const ApiDb* db = nullptr;
    std::vector<std::size_t> indices;
};

ApiKind context_kind(const ApiContext& ctx, const Catalog& catalog);

FilteredDb filter_node_apis(const FullApiDb& full_db, const Catalog& catalog,
                            const std::set<std::string>& ast_owner_types);

/// Meta-first lookup: the best meta hit at or above meta_threshold wins;
/// otherwise the best filtered-full hit at or above full_threshold; otherwise
/// none. Ties break toward the lowest DB index.
SubopHit retrieve_for_subop(const SubOperation& subop, const MetaApiDb& meta_db,
                            const FilteredDb& filtered_full, const Embedder& embedder,
                            const RetrievalConfig& config);

/// Everything retrieval needs besides the query: built DBs, the catalog they
/// were built from, the meta-op texts for decomposition prompts, the
/// embedder, and the LLM client.
struct RetrievalService {
    const Catalog* catalog = nullptr;
    const FullApiDb* full_db = nullptr;
    const MetaApiDb* meta_db = nullptr;
    const std::vector<MetaOp>* metaops = nullptr;
    const Embedder* embedder = nullptr;
    LlmClient* llm = nullptr;
    RetrievalConfig config;

    /// One decomposition (retried once on DecompositionError), then per
    /// sub-op retrieval. All edge contexts are included unconditionally, in
    /// catalog order, before per-sub-op hits; duplicates (by payload) keep
    /// their first occurrence.
    RetrievalResult retrieve_contexts(const CheckerRule& rule,
                                      const std::string& test_source,
                                      const minisrc::AstNode& ast) const;
};

}  // namespace autochecker
