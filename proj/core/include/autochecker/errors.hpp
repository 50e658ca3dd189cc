#pragma once

#include <stdexcept>
#include <string>

namespace autochecker {

/// Base class for all autochecker exceptions.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// catalog
struct DuplicateApi : Error {
    explicit DuplicateApi(const std::string& id)
        : Error("duplicate api id: " + id), id(id) {}
    std::string id;
};

struct MalformedManifest : Error {
    MalformedManifest(std::size_t record_index, const std::string& what)
        : Error("manifest record " + std::to_string(record_index) + ": " + what),
          record_index(record_index) {}
    std::size_t record_index;
};

struct AmbiguousKind : Error {
    explicit AmbiguousKind(const std::string& id)
        : Error("api cannot be both edge-like and util-like: " + id), id(id) {}
    std::string id;
};

struct MalformedSnippet : Error {
    explicit MalformedSnippet(const std::string& meta_op_text)
        : Error("empty snippet for meta-op: " + meta_op_text) {}
};

// embedding
struct EmptyText : Error {
    EmptyText() : Error("text is empty after normalization") {}
};

struct EmbeddingError : Error {
    using Error::Error;
};

struct DimensionError : Error {
    using Error::Error;
};

// retrieval
struct DecompositionError : Error {
    using Error::Error;
};

// minilint
struct NormalizationError : Error {
    using Error::Error;
};

struct CheckerRuntimeError : Error {
    CheckerRuntimeError(const std::string& call_site, int line, const std::string& what)
        : Error("runtime error at " + call_site + " (checker line " + std::to_string(line) +
                "): " + what),
          call_site(call_site), line(line) {}
    std::string call_site;
    int line;
};

// llm
struct LlmError : Error {
    using Error::Error;
};

struct TranscriptError : Error {
    using Error::Error;
};

// harness / tdcd
struct EmptySuite : Error {
    EmptySuite() : Error("test suite is empty") {}
};

struct SuiteFormatError : Error {
    using Error::Error;
};

// cli / config
struct ConfigError : Error {
    using Error::Error;
};

}  // namespace autochecker
