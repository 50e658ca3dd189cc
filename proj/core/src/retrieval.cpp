#include "autochecker/retrieval.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>

#include "autochecker/errors.hpp"

namespace autochecker {

const char* hit_kind_name(HitKind kind) {
    switch (kind) {
        case HitKind::meta: return "meta";
        case HitKind::full: return "full";
        case HitKind::none: return "none";
    }
    return "none";
}

namespace {

std::string strip_bullet(const std::string& line) {
    std::size_t i = 0;
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t start = i;
    if (i < line.size() && (line[i] == '-' || line[i] == '*')) {
        ++i;
    } else {
        std::size_t digits = i;
        while (digits < line.size() && std::isdigit(static_cast<unsigned char>(line[digits])))
            ++digits;
        if (digits > i && digits < line.size() && (line[digits] == '.' || line[digits] == ')')) {
            i = digits + 1;
        } else {
            i = start;
        }
    }
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t end = line.size();
    while (end > i && (line[end - 1] == ' ' || line[end - 1] == '\t' || line[end - 1] == '\r'))
        --end;
    return line.substr(i, end - i);
}

std::string decompose_prompt(const CheckerRule& rule, const std::string& test_source,
                             const std::vector<MetaOp>& metaops) {
    std::ostringstream out;
    out << "Break the checking logic of the rule below into atomic sub-operations, "
           "one per line, as a numbered list. Match the granularity of the reference "
           "operations.\n";
    out << "== Rule description ==\n" << rule.name << ": " << rule.description << "\n";
    out << "== Test case code ==\n" << test_source << "\n";
    out << "== Reference operations ==\n";
    for (const auto& op : metaops) out << "- " << op.text << "\n";
    return out.str();
}

}  // namespace

std::vector<SubOperation> decompose_rule(const CheckerRule& rule,
                                         const std::string& test_source,
                                         const std::vector<MetaOp>& metaops,
                                         LlmClient& llm) {
    std::string response =
        llm.generate(decompose_prompt(rule, test_source, metaops), LlmRole::decompose);
    std::vector<SubOperation> subops;
    std::istringstream in(response);
    std::string line;
    while (std::getline(in, line)) {
        std::string text = strip_bullet(line);
        if (text.empty()) continue;
        subops.push_back({text, static_cast<int>(subops.size()) + 1});
    }
    if (subops.empty())
        throw DecompositionError("decomposition response contained no sub-operations");
    return subops;
}

ApiKind context_kind(const ApiContext& ctx, const Catalog& catalog) {
    if (ctx.source_ids.empty()) return ApiKind::util;  // hand-written snippet
    for (const auto& entry : catalog)
        if (entry.id == ctx.source_ids.front()) return entry.kind;
    return ApiKind::util;
}

FilteredDb filter_node_apis(const FullApiDb& full_db, const Catalog& catalog,
                            const std::set<std::string>& ast_owner_types) {
    std::map<std::string, const ApiEntry*> by_id;
    for (const auto& entry : catalog) by_id.emplace(entry.id, &entry);

    FilteredDb view;
    view.db = &full_db;
    for (std::size_t i = 0; i < full_db.entries.size(); ++i) {
        const ApiContext& ctx = full_db.entries[i];
        bool keep = true;
        if (!ctx.source_ids.empty()) {
            bool all_node = true;
            bool any_owner_present = false;
            for (const auto& id : ctx.source_ids) {
                auto it = by_id.find(id);
                if (it == by_id.end()) continue;
                if (it->second->kind != ApiKind::node) all_node = false;
                if (ast_owner_types.count(it->second->owner_type)) any_owner_present = true;
            }
            if (all_node && !any_owner_present) keep = false;
        }
        if (keep) view.indices.push_back(i);
    }
    return view;
}

namespace {

struct Best {
    double score = -1.0;
    std::size_t index = 0;
    bool found = false;
};

Best best_match(const Embedding& query, const std::vector<ApiContext>& entries) {
    Best best;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        double score = similarity(query, entries[i].vector);
        if (!best.found || score > best.score) {  // ties keep the lowest index
            best = {score, i, true};
        }
    }
    return best;
}

}  // namespace

SubopHit retrieve_for_subop(const SubOperation& subop, const MetaApiDb& meta_db,
                            const FilteredDb& filtered_full, const Embedder& embedder,
                            const RetrievalConfig& config) {
    SubopHit hit;
    hit.subop = subop;
    Embedding query = embedder.embed(subop.text);

    Best meta = best_match(query, meta_db.entries);
    if (meta.found && meta.score >= config.meta_threshold) {
        hit.kind = HitKind::meta;
        hit.score = meta.score;
        hit.context = meta_db.entries[meta.index];
        return hit;
    }

    Best full;
    for (std::size_t idx : filtered_full.indices) {
        double score = similarity(query, filtered_full.db->entries[idx].vector);
        if (!full.found || score > full.score) full = {score, idx, true};
    }
    if (full.found && full.score >= config.full_threshold) {
        hit.kind = HitKind::full;
        hit.score = full.score;
        hit.context = filtered_full.db->entries[full.index];
        return hit;
    }

    hit.kind = HitKind::none;
    return hit;
}

RetrievalResult RetrievalService::retrieve_contexts(const CheckerRule& rule,
                                                    const std::string& test_source,
                                                    const minisrc::AstNode& ast) const {
    if (full_db->embedder_id != embedder->id() || meta_db->embedder_id != embedder->id())
        throw Error("databases were built with embedder '" + full_db->embedder_id +
                    "' but the active embedder is '" + embedder->id() + "'");

    std::vector<SubOperation> subops;
    try {
        subops = decompose_rule(rule, test_source, *metaops, *llm);
    } catch (const DecompositionError&) {
        // One re-ask, then the round is abandoned by the caller.
        subops = decompose_rule(rule, test_source, *metaops, *llm);
    }

    std::set<std::string> owner_types;
    for (minisrc::NodeType t : minisrc::node_types_present(ast))
        owner_types.insert(minisrc::node_type_name(t));
    FilteredDb filtered = filter_node_apis(*full_db, *catalog, owner_types);

    // The same owner filter applies to the meta tier: operation-signature
    // pairs for node APIs of absent types are irrelevant to this test, while
    // operation-snippet pairs carry no source APIs and always survive.
    FilteredDb meta_view = filter_node_apis(*meta_db, *catalog, owner_types);
    MetaApiDb filtered_meta;
    filtered_meta.embedder_id = meta_db->embedder_id;
    for (std::size_t idx : meta_view.indices)
        filtered_meta.entries.push_back(meta_db->entries[idx]);

    RetrievalResult result;
    std::set<std::string> seen_payloads;
    auto push_unique = [&](const ApiContext& ctx) {
        if (seen_payloads.insert(ctx.payload).second) result.contexts.push_back(ctx);
    };

    for (const auto& ctx : full_db->entries)
        if (context_kind(ctx, *catalog) == ApiKind::edge) push_unique(ctx);

    for (const auto& subop : subops) {
        SubopHit hit = retrieve_for_subop(subop, filtered_meta, filtered, *embedder, config);
        if (hit.context) push_unique(*hit.context);
        result.per_subop.push_back(std::move(hit));
    }
    return result;
}

}  // namespace autochecker
