#pragma once

#include <map>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "autochecker/api_catalog.hpp"
#include "autochecker/minisrc.hpp"

namespace autochecker::minilint {

/// A generated checker script plus the TDCD round/attempt it came from.
struct CheckerArtifact {
    std::string source;
    int round = 0;
    int attempt = 0;
};

struct CompileError {
    std::vector<std::pair<std::string, int>> unknown_names;  // identifier, line
    std::vector<std::pair<std::string, int>> type_errors;    // message, line

    bool empty() const { return unknown_names.empty() && type_errors.empty(); }
    std::string summary() const;
};

struct ScriptAst;  // opaque checker-DSL tree

struct CompiledChecker {
    std::shared_ptr<const ScriptAst> script;
    /// call site key "line:col:method" -> resolved ApiEntry id
    std::map<std::string, std::string> resolved_calls;
};

using CompileResult = std::variant<CompiledChecker, CompileError>;

struct Violation {
    int line = 1;
    std::string message;
};

/// Parse the checker DSL and statically resolve every method call against
/// the catalog for the receiver's node type; edge and util APIs resolve on
/// any node value. Unknown type or method names are collected rather than
/// reported one at a time.
CompileResult compile_checker(const std::string& source, const Catalog& catalog);

/// Depth-first pre-order interpretation. Each `on <NodeType>` block fires on
/// matching nodes; report statements append violations at the reported
/// node's line. Result sorted by (line, message). Throws CheckerRuntimeError
/// on evaluation failures (null receiver, child index out of bounds, ...).
std::vector<Violation> run_checker(const CompiledChecker& compiled,
                                   const minisrc::AstNode& ast);

/// Replace everything before the first visitor block with the template's
/// header (its `use` block). Throws NormalizationError when the source has
/// no visitor block.
std::string normalize_header(const std::string& source, const std::string& tmpl);

/// The backend's full API surface as a manifest document, suitable for
/// ingest_manifest. The same table backs compile-time resolution and the
/// interpreter dispatch.
std::string export_manifest();

/// ingest_manifest(export_manifest()), cached.
const Catalog& builtin_catalog();

}  // namespace autochecker::minilint
