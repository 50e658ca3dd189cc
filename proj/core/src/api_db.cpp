#include "autochecker/api_db.hpp"

#include <fstream>
#include <sstream>

#include "autochecker/errors.hpp"
#include "json_lines.hpp"

namespace autochecker {

using detail::json;

const char* payload_kind_name(PayloadKind kind) {
    return kind == PayloadKind::signature ? "signature" : "snippet";
}

PayloadKind payload_kind_from_name(const std::string& name) {
    if (name == "signature") return PayloadKind::signature;
    if (name == "snippet") return PayloadKind::snippet;
    throw Error("unknown payload kind: " + name);
}

FullApiDb build_full_db(const Catalog& catalog, const Embedder& embedder) {
    FullApiDb db;
    db.embedder_id = embedder.id();
    db.entries.reserve(catalog.size());
    for (const auto& entry : catalog) {
        ApiContext ctx;
        ctx.description = gen_description(entry);
        ctx.payload_kind = PayloadKind::signature;
        ctx.payload = render_signature(entry);
        ctx.source_ids = {entry.id};
        try {
            ctx.vector = embedder.embed(ctx.description);
        } catch (const EmbeddingError& e) {
            throw EmbeddingError("embedding failed for " + entry.id + ": " + e.what());
        } catch (const EmptyText&) {
            throw EmbeddingError("empty description for " + entry.id);
        }
        db.entries.push_back(std::move(ctx));
    }
    return db;
}

std::pair<MetaApiDb, std::vector<MetaOp>> build_meta_db(
    const std::vector<MetaOp>& metaops, const FullApiDb& full_db,
    const std::vector<Snippet>& snippets, const Embedder& embedder,
    double match_threshold) {
    MetaApiDb db;
    db.embedder_id = embedder.id();
    std::vector<MetaOp> unresolved;
    for (const auto& op : metaops) {
        Embedding query = embedder.embed(op.text);
        double best = -1.0;
        std::size_t best_index = 0;
        for (std::size_t i = 0; i < full_db.entries.size(); ++i) {
            double score = similarity(query, full_db.entries[i].vector);
            if (score > best) {  // ties keep the lowest index
                best = score;
                best_index = i;
            }
        }
        if (best >= match_threshold && !full_db.entries.empty()) {
            const ApiContext& matched = full_db.entries[best_index];
            ApiContext ctx;
            ctx.description = op.text;
            ctx.payload_kind = PayloadKind::signature;
            ctx.payload = matched.payload;
            ctx.source_ids = matched.source_ids;
            ctx.vector = std::move(query);
            db.entries.push_back(std::move(ctx));
            continue;
        }
        const Snippet* found = nullptr;
        for (const auto& s : snippets) {
            if (s.meta_op_text == op.text) {
                found = &s;
                break;
            }
        }
        if (found) {
            if (found->snippet.empty()) throw MalformedSnippet(op.text);
            ApiContext ctx;
            ctx.description = op.text;
            ctx.payload_kind = PayloadKind::snippet;
            ctx.payload = found->snippet;
            ctx.vector = std::move(query);
            db.entries.push_back(std::move(ctx));
            continue;
        }
        unresolved.push_back(op);
    }
    return {std::move(db), std::move(unresolved)};
}

std::string save_db(const ApiDb& db) {
    std::ostringstream out;
    json header;
    header["format_version"] = "1";
    header["embedder_id"] = db.embedder_id;
    out << header.dump() << "\n";
    for (const auto& ctx : db.entries) {
        json rec;
        rec["description"] = ctx.description;
        rec["payload_kind"] = payload_kind_name(ctx.payload_kind);
        rec["payload"] = ctx.payload;
        rec["source_ids"] = ctx.source_ids;
        rec["vector"] = ctx.vector.weights;
        if (ctx.vector.sparse()) rec["vector_tokens"] = ctx.vector.tokens;
        out << rec.dump() << "\n";
    }
    return out.str();
}

ApiDb load_db(const std::string& text) {
    ApiDb db;
    bool header_seen = false;
    detail::for_each_record(
        text,
        [&](std::size_t index, const json& rec) {
            if (!header_seen) {
                if (!rec.contains("format_version") || rec["format_version"] != "1")
                    throw Error("db header: unsupported format version");
                db.embedder_id = rec.value("embedder_id", "");
                header_seen = true;
                return;
            }
            ApiContext ctx;
            bool ok = false;
            ctx.description = detail::get_string(rec, "description", ok);
            if (!ok) throw Error("db record " + std::to_string(index) + ": missing description");
            ctx.payload_kind = payload_kind_from_name(rec.value("payload_kind", "signature"));
            ctx.payload = rec.value("payload", "");
            if (auto it = rec.find("source_ids"); it != rec.end())
                for (const auto& id : *it) ctx.source_ids.push_back(id.get<std::string>());
            if (auto it = rec.find("vector"); it != rec.end())
                for (const auto& w : *it) ctx.vector.weights.push_back(w.get<double>());
            if (auto it = rec.find("vector_tokens"); it != rec.end())
                for (const auto& t : *it) ctx.vector.tokens.push_back(t.get<std::string>());
            if (ctx.vector.sparse() && ctx.vector.tokens.size() != ctx.vector.weights.size())
                throw Error("db record " + std::to_string(index) + ": token/weight mismatch");
            db.entries.push_back(std::move(ctx));
        },
        [](std::size_t index, const std::string&) {
            throw Error("db record " + std::to_string(index) + ": unparseable");
        });
    if (!header_seen) throw Error("db document is missing its header line");
    return db;
}

std::string save_db_file(const ApiDb& db, const std::string& path) {
    std::string text = save_db(db);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << text;
    return text;
}

ApiDb load_db_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_db(buf.str());
}

}  // namespace autochecker
