#pragma once

// Internal checker-DSL representation shared by the compiler and the
// interpreter. Not installed.

#include <memory>
#include <string>
#include <vector>

#include "autochecker/minisrc.hpp"

namespace autochecker::minilint {

namespace dsl {

enum class ExprKind { StrLit, IntLit, NullLit, VarRef, TypeLit, Call, Binary, Not };

struct Expr;
using ExprPtr = std::unique_ptr<Expr>;

struct Expr {
    ExprKind kind{ExprKind::NullLit};
    int line = 1;
    int col = 1;
    std::string text;  // variable/method name, operator, or literal text
    long long int_value = 0;
    ExprPtr receiver;            // Call
    std::vector<ExprPtr> args;   // Call
    ExprPtr lhs, rhs;            // Binary / Not (lhs only)
    minisrc::NodeType type_literal{minisrc::NodeType::CompilationUnit};  // TypeLit
};

enum class StmtKind { Let, If, ForEach, Report };

struct Stmt;
using StmtPtr = std::unique_ptr<Stmt>;

struct Stmt {
    StmtKind kind{StmtKind::Let};
    int line = 1;
    std::string var;      // Let / ForEach
    ExprPtr expr;         // Let value, If condition, ForEach list, Report node
    std::string message;  // Report
    std::vector<StmtPtr> body;       // If-then / ForEach
    std::vector<StmtPtr> else_body;  // If
};

struct Visitor {
    minisrc::NodeType on_type{minisrc::NodeType::CompilationUnit};
    std::string on_type_name;
    std::string var;
    int line = 1;
    std::vector<StmtPtr> body;
};

struct UseLine {
    std::string name;
    int line = 1;
};

}  // namespace dsl

struct ScriptAst {
    std::vector<dsl::UseLine> uses;
    std::vector<dsl::Visitor> visitors;
};

}  // namespace autochecker::minilint
