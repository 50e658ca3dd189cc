#pragma once

#include <string>

#include "autochecker/retrieval.hpp"
#include "autochecker/tdcd.hpp"

namespace autochecker {

/// Flat configuration document, format version "1". Flags override file
/// values; credentials come only from the AUTOCHECKER_API_KEY environment
/// variable.
struct Config {
    struct Llm {
        std::string mode = "scripted";  // scripted | http
        std::string endpoint;
        std::string model;
        std::string transcript_path;
    } llm;

    struct EmbedderCfg {
        std::string mode = "lexical";  // lexical | http
        std::string endpoint;
    } embedder;

    RetrievalConfig thresholds;  // meta 0.85, full 0.80
    TdcdConfig tdcd;

    struct Paths {
        std::string db_dir;
        std::string template_path;
        std::string manifest;
        std::string metaops;
        std::string snippets;
    } paths;

    /// scripted mode needs a transcript path, http mode an endpoint.
    void validate_llm() const;
};

Config load_config(const std::string& path);
Config parse_config(const std::string& text);

}  // namespace autochecker
