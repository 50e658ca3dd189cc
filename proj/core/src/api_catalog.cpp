#include "autochecker/api_catalog.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

#include "autochecker/errors.hpp"
#include "json_lines.hpp"

namespace autochecker {

using detail::json;

const char* api_kind_name(ApiKind kind) {
    switch (kind) {
        case ApiKind::node: return "node";
        case ApiKind::edge: return "edge";
        case ApiKind::util: return "util";
    }
    return "node";
}

ApiKind api_kind_from_name(const std::string& name) {
    if (name == "node") return ApiKind::node;
    if (name == "edge") return ApiKind::edge;
    if (name == "util") return ApiKind::util;
    throw Error("unknown api kind: " + name);
}

ApiKind classify_api(const ApiEntry& entry) {
    if (entry.declared_on_abstract_node && entry.is_static_util)
        throw AmbiguousKind(entry.id.empty() ? entry.method_name : entry.id);
    if (entry.declared_on_abstract_node && entry.returns_node) return ApiKind::edge;
    if (entry.is_static_util) return ApiKind::util;
    return ApiKind::node;
}

namespace {

bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }
bool is_lower(char c) { return c >= 'a' && c <= 'z'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

std::string to_lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

}  // namespace

std::vector<std::string> split_camel(const std::string& name) {
    std::vector<std::string> words;
    std::string current;
    auto flush = [&] {
        if (!current.empty()) {
            words.push_back(to_lower(current));
            current.clear();
        }
    };
    for (std::size_t i = 0; i < name.size(); ++i) {
        char c = name[i];
        if (!is_upper(c) && !is_lower(c) && !is_digit(c)) {
            flush();
            continue;
        }
        if (is_upper(c)) {
            bool prev_upper = !current.empty() && is_upper(current.back());
            if (!current.empty() && !prev_upper) {
                flush();  // lower/digit -> Upper starts a word
            } else if (prev_upper && i + 1 < name.size() && is_lower(name[i + 1])) {
                flush();  // last capital of an acronym run starts the next word
            }
        }
        current.push_back(c);
    }
    flush();
    if (!words.empty() && words.front() == "ast") words.erase(words.begin());
    return words;
}

std::string split_camel_phrase(const std::string& name) {
    std::string out;
    for (const auto& w : split_camel(name)) {
        if (!out.empty()) out.push_back(' ');
        out += w;
    }
    return out;
}

bool returns_bool(const ApiEntry& entry) {
    std::string t = entry.return_type;
    auto dot = t.rfind('.');
    if (dot != std::string::npos) t = t.substr(dot + 1);
    t = to_lower(t);
    return t == "bool" || t == "boolean";
}

bool is_irrelevant_comment(const std::string& comment) {
    // First word = the first alphabetic run, so "@since" and "Author:" count.
    std::size_t start = 0;
    while (start < comment.size() &&
           !std::isalpha(static_cast<unsigned char>(comment[start])))
        ++start;
    std::size_t end = start;
    while (end < comment.size() && std::isalpha(static_cast<unsigned char>(comment[end])))
        ++end;
    if (start == end) return false;
    std::string first = to_lower(comment.substr(start, end - start));
    static const std::set<std::string> kDropped = {"throws", "author", "since",
                                                   "deprecated"};
    return kDropped.count(first) > 0;
}

namespace {

std::string surviving_comment(const ApiEntry& entry) {
    if (entry.comment.empty() || is_irrelevant_comment(entry.comment)) return {};
    return entry.comment;
}

}  // namespace

std::string gen_description(const ApiEntry& entry) {
    std::string method = split_camel_phrase(entry.method_name);
    std::string owner = split_camel_phrase(entry.owner_type);
    std::string desc;
    bool with_owner = entry.kind != ApiKind::util;
    if (returns_bool(entry)) {
        desc = "Check whether ";
        if (with_owner) desc += owner + " ";
        desc += method;
    } else {
        desc = method;
        if (with_owner) desc += " of " + owner;
    }
    std::string cmt = surviving_comment(entry);
    if (!cmt.empty()) desc += " //" + cmt;
    return desc;
}

std::string render_signature(const ApiEntry& entry) {
    std::string sig = entry.owner_type + ": " + entry.return_type + " " +
                      entry.method_name + "(";
    for (std::size_t i = 0; i < entry.param_types.size(); ++i) {
        if (i) sig += ", ";
        sig += entry.param_types[i];
    }
    sig += ")";
    std::string cmt = surviving_comment(entry);
    if (!cmt.empty()) sig += " //" + cmt;
    return sig;
}

Catalog ingest_manifest(const std::string& manifest_doc) {
    Catalog catalog;
    std::set<std::string> seen;
    detail::for_each_record(
        manifest_doc,
        [&](std::size_t index, const json& rec) {
            ApiEntry entry;
            bool ok = false;
            entry.id = detail::get_string(rec, "id", ok);
            if (!ok) throw MalformedManifest(index, "missing field id");
            entry.owner_type = detail::get_string(rec, "owner_type", ok);
            if (!ok) throw MalformedManifest(index, "missing field owner_type");
            entry.method_name = detail::get_string(rec, "method_name", ok);
            if (!ok) throw MalformedManifest(index, "missing field method_name");
            entry.return_type = detail::get_string(rec, "return_type", ok);
            if (!ok) throw MalformedManifest(index, "missing field return_type");
            if (auto it = rec.find("param_types"); it != rec.end()) {
                if (!it->is_array()) throw MalformedManifest(index, "param_types must be an array");
                for (const auto& p : *it) entry.param_types.push_back(p.get<std::string>());
            }
            entry.returns_node = rec.value("returns_node", false);
            entry.is_static_util = rec.value("is_static_util", false);
            entry.declared_on_abstract_node = rec.value("declared_on_abstract_node", false);
            entry.comment = rec.value("comment", "");
            entry.kind = classify_api(entry);
            if (!seen.insert(entry.id).second) throw DuplicateApi(entry.id);
            catalog.push_back(std::move(entry));
        },
        [](std::size_t index, const std::string&) {
            throw MalformedManifest(index, "unparseable record");
        });
    return catalog;
}

std::string render_manifest(const Catalog& catalog) {
    std::ostringstream out;
    for (const auto& e : catalog) {
        json rec;
        rec["id"] = e.id;
        rec["owner_type"] = e.owner_type;
        rec["method_name"] = e.method_name;
        rec["param_types"] = e.param_types;
        rec["return_type"] = e.return_type;
        rec["returns_node"] = e.returns_node;
        rec["is_static_util"] = e.is_static_util;
        rec["declared_on_abstract_node"] = e.declared_on_abstract_node;
        rec["comment"] = e.comment;
        out << rec.dump() << "\n";
    }
    return out.str();
}

std::vector<MetaOp> parse_metaops(const std::string& doc) {
    std::vector<MetaOp> ops;
    detail::for_each_record(
        doc,
        [&](std::size_t index, const json& rec) {
            MetaOp op;
            bool ok = false;
            op.text = detail::get_string(rec, "text", ok);
            if (!ok || op.text.empty())
                throw Error("meta-op record " + std::to_string(index) + ": missing text");
            op.category = rec.value("category", "");
            ops.push_back(std::move(op));
        },
        [](std::size_t index, const std::string&) {
            throw Error("meta-op record " + std::to_string(index) + ": unparseable");
        });
    return ops;
}

std::vector<Snippet> parse_snippets(const std::string& doc) {
    std::vector<Snippet> snippets;
    detail::for_each_record(
        doc,
        [&](std::size_t index, const json& rec) {
            Snippet s;
            bool ok = false;
            s.meta_op_text = detail::get_string(rec, "meta_op_text", ok);
            if (!ok)
                throw Error("snippet record " + std::to_string(index) +
                            ": missing meta_op_text");
            s.snippet = rec.value("snippet", "");
            snippets.push_back(std::move(s));
        },
        [](std::size_t index, const std::string&) {
            throw Error("snippet record " + std::to_string(index) + ": unparseable");
        });
    return snippets;
}

std::string render_metaops(const std::vector<MetaOp>& ops) {
    std::ostringstream out;
    for (const auto& op : ops) {
        json rec;
        rec["text"] = op.text;
        rec["category"] = op.category;
        out << rec.dump() << "\n";
    }
    return out.str();
}

const std::vector<std::string>& metaop_categories() {
    static const std::vector<std::string> kCategories = {
        "Java Feature", "Class",     "Method",    "Method Call", "Control Stmt",
        "Field",        "Local Var", "Var Usage", "Exception",   "Array",
        "Object",       "Expression", "Literal",  "Multi-thread"};
    return kCategories;
}

}  // namespace autochecker
