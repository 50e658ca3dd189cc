#include "autochecker/config.hpp"

#include <fstream>
#include <sstream>

#include "autochecker/errors.hpp"
#include "json_lines.hpp"

namespace autochecker {

using detail::json;

void Config::validate_llm() const {
    if (llm.mode == "scripted") {
        if (llm.transcript_path.empty())
            throw ConfigError("scripted llm mode requires a transcript path");
    } else if (llm.mode == "http") {
        if (llm.endpoint.empty())
            throw ConfigError("http llm mode requires an endpoint");
    } else {
        throw ConfigError("unknown llm mode: " + llm.mode);
    }
}

Config parse_config(const std::string& text) {
    json doc = json::parse(text, nullptr, false);
    if (doc.is_discarded()) throw ConfigError("config is not valid JSON");
    if (doc.value("version", "") != "1")
        throw ConfigError("config version must be \"1\"");
    Config cfg;
    if (doc.contains("llm")) {
        const auto& llm = doc["llm"];
        cfg.llm.mode = llm.value("mode", cfg.llm.mode);
        cfg.llm.endpoint = llm.value("endpoint", "");
        cfg.llm.model = llm.value("model", "");
        cfg.llm.transcript_path = llm.value("transcript_path", "");
    }
    if (doc.contains("embedder")) {
        const auto& emb = doc["embedder"];
        cfg.embedder.mode = emb.value("mode", cfg.embedder.mode);
        cfg.embedder.endpoint = emb.value("endpoint", "");
        if (cfg.embedder.mode != "lexical" && cfg.embedder.mode != "http")
            throw ConfigError("unknown embedder mode: " + cfg.embedder.mode);
    }
    if (doc.contains("thresholds")) {
        const auto& th = doc["thresholds"];
        cfg.thresholds.meta_threshold = th.value("meta", cfg.thresholds.meta_threshold);
        cfg.thresholds.full_threshold = th.value("full", cfg.thresholds.full_threshold);
        if (cfg.thresholds.meta_threshold <= 0.0 || cfg.thresholds.meta_threshold > 1.0 ||
            cfg.thresholds.full_threshold <= 0.0 || cfg.thresholds.full_threshold > 1.0)
            throw ConfigError("thresholds must be in (0, 1]");
    }
    if (doc.contains("tdcd")) {
        const auto& td = doc["tdcd"];
        cfg.tdcd.max_retry_times = td.value("max_retry_times", cfg.tdcd.max_retry_times);
        cfg.tdcd.round_cap_factor = td.value("round_cap_factor", cfg.tdcd.round_cap_factor);
        cfg.tdcd.feedback_in_retry = td.value("feedback_in_retry", cfg.tdcd.feedback_in_retry);
        if (cfg.tdcd.max_retry_times < 1)
            throw ConfigError("max_retry_times must be at least 1");
        if (cfg.tdcd.round_cap_factor < 1)
            throw ConfigError("round_cap_factor must be at least 1");
    }
    if (doc.contains("paths")) {
        const auto& paths = doc["paths"];
        cfg.paths.db_dir = paths.value("db_dir", "");
        cfg.paths.template_path = paths.value("template", "");
        cfg.paths.manifest = paths.value("manifest", "");
        cfg.paths.metaops = paths.value("metaops", "");
        cfg.paths.snippets = paths.value("snippets", "");
    }
    return cfg;
}

Config load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

}  // namespace autochecker
