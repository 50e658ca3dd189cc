#pragma once

// The backend's API surface: one table drives export_manifest, compile-time
// resolution defaults and the interpreter dispatch. Not installed.

#include <string>
#include <variant>
#include <vector>

#include "autochecker/api_catalog.hpp"
#include "autochecker/minisrc.hpp"

namespace autochecker::minilint {

struct NodeListVal {
    std::vector<const minisrc::AstNode*> nodes;
};

/// monostate = null
using Value = std::variant<std::monostate, const minisrc::AstNode*, NodeListVal,
                           std::string, long long, bool>;

struct CallSite {
    std::string method;
    int line = 1;
    int col = 1;
};

struct BuiltinApi {
    std::string owner;  // node type name, "Node" for edge, "AstUtil" for util
    std::string method;
    std::vector<std::string> params;  // "int", "NodeType"; util receiver is "Node"
    std::string ret;                  // "bool", "int", "string", "Node", "List<Node>"
    ApiKind kind{ApiKind::node};
    std::string comment;
    Value (*handler)(const minisrc::AstNode* self, const std::vector<Value>& args,
                     const CallSite& site) = nullptr;
};

const std::vector<BuiltinApi>& builtin_api_table();

/// Runtime dispatch: exact owner match first, then edge ("Node"), then util
/// ("AstUtil"). Returns nullptr when the node's type has no such method.
const BuiltinApi* dispatch_api(minisrc::NodeType receiver, const std::string& method);

}  // namespace autochecker::minilint
