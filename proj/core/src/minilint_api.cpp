#include "minilint_api.hpp"

#include <map>

#include "autochecker/errors.hpp"

namespace autochecker::minilint {

using minisrc::AstNode;
using minisrc::NodeType;

namespace {

[[noreturn]] void rt_fail(const CallSite& site, const std::string& what) {
    throw CheckerRuntimeError(site.method, site.line, what);
}

long long as_int(const Value& v, const CallSite& site, const char* what) {
    if (auto* n = std::get_if<long long>(&v)) return *n;
    rt_fail(site, std::string(what) + " is not an int");
}

NodeType as_node_type(const Value& v, const CallSite& site) {
    if (auto* s = std::get_if<std::string>(&v)) {
        NodeType t;
        if (minisrc::node_type_from_name(*s, t)) return t;
    }
    rt_fail(site, "argument is not a node type");
}

const AstNode* child_or_fail(const AstNode* self, std::size_t index,
                             const CallSite& site, const char* what) {
    if (index >= self->children.size()) rt_fail(site, std::string("no ") + what);
    return self->children[index].get();
}

std::size_t count_children(const AstNode* self, NodeType type) {
    std::size_t n = 0;
    for (const auto& c : self->children)
        if (c->type == type) ++n;
    return n;
}

const AstNode* body_block(const AstNode* self, const CallSite& site) {
    for (auto it = self->children.rbegin(); it != self->children.rend(); ++it)
        if ((*it)->type == NodeType::Block) return it->get();
    rt_fail(site, "node has no body block");
}

void collect_descendants(const AstNode* node, NodeType type,
                         std::vector<const AstNode*>& out) {
    for (const auto& child : node->children) {
        if (child->type == type) out.push_back(child.get());
        collect_descendants(child.get(), type, out);
    }
}

bool has_modifier(const AstNode* self, const char* m) {
    return self->modifiers.count(m) > 0;
}

long long int_lit_value(const AstNode* self) {
    // unsigned accumulation so absurdly long literals wrap instead of
    // hitting signed overflow
    const std::string& text = self->name;
    bool octal = text.size() > 1 && text[0] == '0';
    if (octal) {
        unsigned long long v = 0;
        for (char c : text) {
            if (c < '0' || c > '7') {
                octal = false;
                break;
            }
            v = v * 8 + static_cast<unsigned long long>(c - '0');
        }
        if (octal) return static_cast<long long>(v);
    }
    unsigned long long v = 0;
    for (char c : text) v = v * 10 + static_cast<unsigned long long>(c - '0');
    return static_cast<long long>(v);
}

// --- shared handlers -------------------------------------------------------

Value h_get_name(const AstNode* self, const std::vector<Value>&, const CallSite&) {
    return self->name;
}
Value h_get_type_name(const AstNode* self, const std::vector<Value>&, const CallSite&) {
    return self->type_name;
}
Value h_is_public(const AstNode* self, const std::vector<Value>&, const CallSite&) {
    return has_modifier(self, "public");
}
Value h_is_private(const AstNode* self, const std::vector<Value>&, const CallSite&) {
    return has_modifier(self, "private");
}
Value h_is_static(const AstNode* self, const std::vector<Value>&, const CallSite&) {
    return has_modifier(self, "static");
}
Value h_is_final(const AstNode* self, const std::vector<Value>&, const CallSite&) {
    return has_modifier(self, "final");
}
Value h_get_body(const AstNode* self, const std::vector<Value>&, const CallSite& s) {
    return body_block(self, s);
}
Value h_param_count(const AstNode* self, const std::vector<Value>&, const CallSite&) {
    return static_cast<long long>(count_children(self, NodeType::Param));
}
Value h_has_initializer(const AstNode* self, const std::vector<Value>&, const CallSite&) {
    return !self->children.empty();
}
Value h_get_initializer(const AstNode* self, const std::vector<Value>&, const CallSite& s) {
    return child_or_fail(self, 0, s, "initializer");
}
Value h_child0(const AstNode* self, const std::vector<Value>&, const CallSite& s) {
    return child_or_fail(self, 0, s, "operand");
}
Value h_child1(const AstNode* self, const std::vector<Value>&, const CallSite& s) {
    return child_or_fail(self, 1, s, "operand");
}
Value h_get_operator(const AstNode* self, const std::vector<Value>&, const CallSite&) {
    return self->name;
}

// --- edge handlers ---------------------------------------------------------

Value e_get_parent(const AstNode* self, const std::vector<Value>&, const CallSite&) {
    if (!self->parent) return std::monostate{};
    return self->parent;
}
Value e_get_children(const AstNode* self, const std::vector<Value>&, const CallSite&) {
    NodeListVal list;
    for (const auto& c : self->children) list.nodes.push_back(c.get());
    return list;
}
Value e_get_child(const AstNode* self, const std::vector<Value>& args, const CallSite& s) {
    long long i = as_int(args.at(0), s, "child index");
    if (i < 0 || i >= static_cast<long long>(self->children.size()))
        rt_fail(s, "child index out of bounds");
    return self->children[static_cast<std::size_t>(i)].get();
}
Value e_num_children(const AstNode* self, const std::vector<Value>&, const CallSite&) {
    return static_cast<long long>(self->children.size());
}
Value e_descendants(const AstNode* self, const std::vector<Value>& args, const CallSite& s) {
    NodeListVal list;
    collect_descendants(self, as_node_type(args.at(0), s), list.nodes);
    return list;
}
Value e_ancestors(const AstNode* self, const std::vector<Value>& args, const CallSite& s) {
    NodeType t = as_node_type(args.at(0), s);
    NodeListVal list;
    for (const AstNode* p = self->parent; p; p = p->parent)
        if (p->type == t) list.nodes.push_back(p);
    return list;
}
Value e_first_parent_of_type(const AstNode* self, const std::vector<Value>& args,
                             const CallSite& s) {
    NodeType t = as_node_type(args.at(0), s);
    for (const AstNode* p = self->parent; p; p = p->parent)
        if (p->type == t) return p;
    return std::monostate{};
}
Value e_get_root(const AstNode* self, const std::vector<Value>&, const CallSite&) {
    const AstNode* p = self;
    while (p->parent) p = p->parent;
    return p;
}

// --- util handlers ---------------------------------------------------------

Value u_is_null_literal(const AstNode* self, const std::vector<Value>&, const CallSite&) {
    return self->type == NodeType::NullLit;
}
Value u_is_string_literal(const AstNode* self, const std::vector<Value>&, const CallSite&) {
    return self->type == NodeType::StringLit;
}
Value u_is_int_literal(const AstNode* self, const std::vector<Value>&, const CallSite&) {
    return self->type == NodeType::IntLit;
}
Value u_is_literal(const AstNode* self, const std::vector<Value>&, const CallSite&) {
    return self->type == NodeType::IntLit || self->type == NodeType::StringLit ||
           self->type == NodeType::NullLit;
}
Value u_is_empty_block(const AstNode* self, const std::vector<Value>&, const CallSite&) {
    return self->type == NodeType::Block && self->children.empty();
}
Value u_node_type_name(const AstNode* self, const std::vector<Value>&, const CallSite&) {
    return std::string(minisrc::node_type_name(self->type));
}

std::vector<BuiltinApi> make_table() {
    std::vector<BuiltinApi> t;
    auto edge = [&](const std::string& method, std::vector<std::string> params,
                    const std::string& ret, const std::string& comment, auto handler) {
        t.push_back({"Node", method, std::move(params), ret, ApiKind::edge, comment, handler});
    };
    auto node = [&](const std::string& owner, const std::string& method,
                    const std::string& ret, const std::string& comment, auto handler,
                    std::vector<std::string> params = {}) {
        t.push_back({owner, method, std::move(params), ret, ApiKind::node, comment, handler});
    };
    auto util = [&](const std::string& method, const std::string& ret,
                    const std::string& comment, auto handler) {
        t.push_back({"AstUtil", method, {"Node"}, ret, ApiKind::util, comment, handler});
    };

    // Edge set: general traversal, always provided to retrieval consumers.
    edge("getParent", {}, "Node", "The immediate parent node, or null at the root.",
         e_get_parent);
    edge("getChildren", {}, "List<Node>", "", e_get_children);
    edge("getChild", {"int"}, "Node", "", e_get_child);
    edge("getNumChildren", {}, "int", "", e_num_children);
    edge("descendants", {"NodeType"}, "List<Node>",
         "All descendants of the given type, in document order.", e_descendants);
    edge("ancestors", {"NodeType"}, "List<Node>",
         "Enclosing nodes of the given type, nearest first.", e_ancestors);
    edge("firstParentOfType", {"NodeType"}, "Node",
         "Nearest enclosing node of the given type, or null.", e_first_parent_of_type);
    edge("getRoot", {}, "Node", "The compilation unit at the top of the tree.",
         e_get_root);

    node("CompilationUnit", "getImportCount", "int", "",
         [](const AstNode* self, const std::vector<Value>&, const CallSite&) -> Value {
             return static_cast<long long>(count_children(self, NodeType::ImportDecl));
         });
    node("CompilationUnit", "getClassCount", "int", "",
         [](const AstNode* self, const std::vector<Value>&, const CallSite&) -> Value {
             return static_cast<long long>(count_children(self, NodeType::ClassDecl));
         });

    node("ImportDecl", "getName", "string", "The dotted import path.", h_get_name);

    node("ClassDecl", "getName", "string", "", h_get_name);
    node("ClassDecl", "isPublic", "bool", "", h_is_public);
    node("ClassDecl", "isPrivate", "bool", "", h_is_private);
    node("ClassDecl", "isStatic", "bool", "", h_is_static);
    node("ClassDecl", "isFinal", "bool", "", h_is_final);

    node("FieldDecl", "getName", "string", "", h_get_name);
    node("FieldDecl", "getTypeName", "string", "", h_get_type_name);
    node("FieldDecl", "isPublic", "bool", "", h_is_public);
    node("FieldDecl", "isPrivate", "bool", "", h_is_private);
    node("FieldDecl", "isStatic", "bool", "", h_is_static);
    node("FieldDecl", "isFinal", "bool", "", h_is_final);
    node("FieldDecl", "hasInitializer", "bool", "", h_has_initializer);
    node("FieldDecl", "getInitializer", "Node", "", h_get_initializer);

    node("MethodDecl", "getName", "string", "", h_get_name);
    node("MethodDecl", "getTypeName", "string", "The declared return type name.",
         h_get_type_name);
    node("MethodDecl", "isPublic", "bool", "", h_is_public);
    node("MethodDecl", "isPrivate", "bool", "", h_is_private);
    node("MethodDecl", "isStatic", "bool", "", h_is_static);
    node("MethodDecl", "isFinal", "bool", "", h_is_final);
    node("MethodDecl", "getBody", "Node", "", h_get_body);
    node("MethodDecl", "getParamCount", "int", "", h_param_count);

    node("CtorDecl", "getName", "string", "", h_get_name);
    node("CtorDecl", "isPublic", "bool", "", h_is_public);
    node("CtorDecl", "isPrivate", "bool", "", h_is_private);
    node("CtorDecl", "getBody", "Node", "", h_get_body);
    node("CtorDecl", "getParamCount", "int", "", h_param_count);

    node("Param", "getName", "string", "", h_get_name);
    node("Param", "getTypeName", "string", "", h_get_type_name);

    node("Block", "getStatementCount", "int", "",
         [](const AstNode* self, const std::vector<Value>&, const CallSite&) -> Value {
             return static_cast<long long>(self->children.size());
         });
    node("Block", "isEmpty", "bool", "True if the block contains no statements.",
         [](const AstNode* self, const std::vector<Value>&, const CallSite&) -> Value {
             return self->children.empty();
         });

    node("IfStmt", "getCondition", "Node", "", h_child0);
    node("IfStmt", "getThen", "Node", "", h_child1);
    node("IfStmt", "hasElse", "bool", "",
         [](const AstNode* self, const std::vector<Value>&, const CallSite&) -> Value {
             return self->children.size() > 2;
         });
    node("IfStmt", "getElse", "Node", "",
         [](const AstNode* self, const std::vector<Value>&, const CallSite& s) -> Value {
             return child_or_fail(self, 2, s, "else branch");
         });

    node("WhileStmt", "getCondition", "Node", "", h_child0);
    node("WhileStmt", "getBody", "Node", "", h_child1);

    node("ForStmt", "getCondition", "Node", "",
         [](const AstNode* self, const std::vector<Value>&, const CallSite& s) -> Value {
             return child_or_fail(self, 1, s, "condition");
         });
    node("ForStmt", "getBody", "Node", "",
         [](const AstNode* self, const std::vector<Value>&, const CallSite& s) -> Value {
             return child_or_fail(self, 3, s, "body");
         });

    node("ReturnStmt", "hasExpression", "bool", "", h_has_initializer);
    node("ReturnStmt", "getExpression", "Node", "",
         [](const AstNode* self, const std::vector<Value>&, const CallSite& s) -> Value {
             return child_or_fail(self, 0, s, "expression");
         });

    node("ThrowStmt", "getExpression", "Node", "", h_child0);

    node("TryStmt", "getBody", "Node", "", h_child0);
    node("TryStmt", "getCatchCount", "int", "since 1.0",
         [](const AstNode* self, const std::vector<Value>&, const CallSite&) -> Value {
             return static_cast<long long>(self->children.size() - 1);
         });

    node("CatchClause", "getParam", "Node", "", h_child0);
    node("CatchClause", "getBody", "Node", "", h_child1);

    node("ExprStmt", "getExpression", "Node", "", h_child0);

    node("VarDeclStmt", "getName", "string", "", h_get_name);
    node("VarDeclStmt", "getTypeName", "string", "", h_get_type_name);
    node("VarDeclStmt", "hasInitializer", "bool", "", h_has_initializer);
    node("VarDeclStmt", "getInitializer", "Node", "", h_get_initializer);

    node("AssignExpr", "getTarget", "Node", "", h_child0);
    node("AssignExpr", "getValue", "Node", "", h_child1);

    node("BinaryExpr", "getOperator", "string", "", h_get_operator);
    node("BinaryExpr", "getLhs", "Node", "", h_child0);
    node("BinaryExpr", "getRhs", "Node", "", h_child1);

    node("UnaryExpr", "getOperator", "string", "", h_get_operator);
    node("UnaryExpr", "getOperand", "Node", "", h_child0);

    node("CallExpr", "getName", "string", "The called method name.", h_get_name);
    node("CallExpr", "getReceiver", "Node", "", h_child0);
    node("CallExpr", "getArgCount", "int", "",
         [](const AstNode* self, const std::vector<Value>&, const CallSite&) -> Value {
             return static_cast<long long>(self->children.size() - 1);
         });
    node("CallExpr", "getArg", "Node", "",
         [](const AstNode* self, const std::vector<Value>& args, const CallSite& s) -> Value {
             long long i = as_int(args.at(0), s, "argument index");
             if (i < 0 || i + 1 >= static_cast<long long>(self->children.size()))
                 rt_fail(s, "argument index out of bounds");
             return self->children[static_cast<std::size_t>(i + 1)].get();
         },
         {"int"});

    node("FieldAccess", "getName", "string", "", h_get_name);
    node("FieldAccess", "getReceiver", "Node", "", h_child0);

    node("NameRef", "getName", "string", "", h_get_name);

    node("NewExpr", "getTypeName", "string", "The instantiated type name.", h_get_name);
    node("NewExpr", "getArgCount", "int", "",
         [](const AstNode* self, const std::vector<Value>&, const CallSite&) -> Value {
             return static_cast<long long>(self->children.size());
         });
    node("NewExpr", "getArg", "Node", "",
         [](const AstNode* self, const std::vector<Value>& args, const CallSite& s) -> Value {
             long long i = as_int(args.at(0), s, "argument index");
             if (i < 0 || i >= static_cast<long long>(self->children.size()))
                 rt_fail(s, "argument index out of bounds");
             return self->children[static_cast<std::size_t>(i)].get();
         },
         {"int"});

    node("IntLit", "getValue", "int", "",
         [](const AstNode* self, const std::vector<Value>&, const CallSite&) -> Value {
             return int_lit_value(self);
         });
    node("IntLit", "isOctal", "bool", "True if the literal is written with a leading zero.",
         [](const AstNode* self, const std::vector<Value>&, const CallSite&) -> Value {
             return self->name.size() > 1 && self->name[0] == '0';
         });

    node("StringLit", "getValue", "string", "", h_get_name);
    node("StringLit", "isEmpty", "bool", "True if the constant value is empty.",
         [](const AstNode* self, const std::vector<Value>&, const CallSite&) -> Value {
             return self->name.empty();
         });
    node("StringLit", "getLength", "int", "",
         [](const AstNode* self, const std::vector<Value>&, const CallSite&) -> Value {
             return static_cast<long long>(self->name.size());
         });

    util("isNullLiteral", "bool", "", u_is_null_literal);
    util("isStringLiteral", "bool", "", u_is_string_literal);
    util("isIntLiteral", "bool", "", u_is_int_literal);
    util("isLiteral", "bool", "True for int, string and null literals.", u_is_literal);
    util("isEmptyBlock", "bool", "True if the node is a block with no statements.",
         u_is_empty_block);
    util("nodeTypeName", "string", "The node type name as used in tree dumps.",
         u_node_type_name);

    return t;
}

}  // namespace

const std::vector<BuiltinApi>& builtin_api_table() {
    static const std::vector<BuiltinApi> kTable = make_table();
    return kTable;
}

const BuiltinApi* dispatch_api(NodeType receiver, const std::string& method) {
    static const auto* kIndex = [] {
        auto* index = new std::map<std::pair<std::string, std::string>, const BuiltinApi*>();
        for (const auto& api : builtin_api_table())
            index->emplace(std::make_pair(api.owner, api.method), &api);
        return index;
    }();
    auto find = [&](const std::string& owner) -> const BuiltinApi* {
        auto it = kIndex->find({owner, method});
        return it == kIndex->end() ? nullptr : it->second;
    };
    if (const auto* api = find(minisrc::node_type_name(receiver))) return api;
    if (const auto* api = find("Node")) return api;
    if (const auto* api = find("AstUtil")) return api;
    return nullptr;
}

}  // namespace autochecker::minilint
