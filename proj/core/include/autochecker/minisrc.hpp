#pragma once

#include <cstdint>
#include <memory>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace autochecker::minisrc {

enum class NodeType {
    CompilationUnit,
    ImportDecl,
    ClassDecl,
    FieldDecl,
    MethodDecl,
    CtorDecl,
    Param,
    Block,
    IfStmt,
    WhileStmt,
    ForStmt,
    ReturnStmt,
    ThrowStmt,
    TryStmt,
    CatchClause,
    ExprStmt,
    VarDeclStmt,
    AssignExpr,
    BinaryExpr,
    UnaryExpr,
    CallExpr,
    FieldAccess,
    NameRef,
    NewExpr,
    IntLit,
    StringLit,
    NullLit,
};

const char* node_type_name(NodeType type);
bool node_type_from_name(const std::string& name, NodeType& out);
const std::vector<NodeType>& all_node_types();

/// 1-based, inclusive source range.
struct Span {
    int line = 1;
    int col = 1;
    int end_line = 1;
    int end_col = 1;
};

struct AstNode {
    NodeType type{NodeType::CompilationUnit};
    Span span;
    std::string name;       // identifier for decls/refs, literal text for literals
    std::string type_name;  // declared type (fields, params, vars, method returns)
    std::set<std::string> modifiers;
    std::vector<std::unique_ptr<AstNode>> children;
    const AstNode* parent{nullptr};

    bool has_name() const { return !name.empty(); }
    const AstNode* child(std::size_t i) const { return children.at(i).get(); }
};

using AstPtr = std::unique_ptr<AstNode>;

struct ParseError {
    int line = 1;
    int col = 1;
    std::string message;
};

using ParseResult = std::variant<AstPtr, ParseError>;

/// Recursive-descent parser over the fixed grammar documented in the README.
/// UTF-8 input, LF or CRLF line endings, "//" line comments.
ParseResult parse_source(const std::string& text);

/// Indented one-node-per-line dump (2 spaces per depth). With augment on,
/// nodes carrying a name render as "MethodDecl(length)".
std::string render_ast(const AstNode& root, bool augment);

std::set<NodeType> node_types_present(const AstNode& root);

/// Order-sensitive hash over types, names, modifiers and spans; used to
/// observe that checker execution leaves the tree untouched.
std::uint64_t structural_hash(const AstNode& root);

}  // namespace autochecker::minisrc
