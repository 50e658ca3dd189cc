#include "autochecker/minilint.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

#include "autochecker/errors.hpp"
#include "minilint_api.hpp"
#include "minilint_dsl.hpp"

namespace autochecker::minilint {

using minisrc::AstNode;
using minisrc::NodeType;

std::string CompileError::summary() const {
    std::ostringstream out;
    if (!unknown_names.empty()) {
        out << "unknown names:";
        for (const auto& [name, line] : unknown_names)
            out << " " << name << " (line " << line << ")";
        out << ".";
    }
    if (!type_errors.empty()) {
        if (!unknown_names.empty()) out << " ";
        out << "errors:";
        for (const auto& [msg, line] : type_errors)
            out << " " << msg << " (line " << line << ");";
    }
    return out.str();
}

// --- DSL lexer/parser -------------------------------------------------------

namespace {

struct DslToken {
    enum Kind { Ident, Int, String, Punct, Eof } kind = Eof;
    std::string text;
    int line = 1;
    int col = 1;
};

struct DslPanic {
    std::string message;
    int line;
};

[[noreturn]] void dsl_fail(int line, const std::string& msg) {
    throw DslPanic{msg, line};
}

std::vector<DslToken> dsl_lex(const std::string& text) {
    std::vector<DslToken> tokens;
    int line = 1, col = 1;
    std::size_t pos = 0;
    auto advance = [&] {
        if (text[pos] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
        ++pos;
    };
    while (pos < text.size()) {
        char c = text[pos];
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
            advance();
            continue;
        }
        if (c == '/' && pos + 1 < text.size() && text[pos + 1] == '/') {
            while (pos < text.size() && text[pos] != '\n') advance();
            continue;
        }
        DslToken tok;
        tok.line = line;
        tok.col = col;
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            while (pos < text.size() &&
                   (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_')) {
                tok.text.push_back(text[pos]);
                advance();
            }
            tok.kind = DslToken::Ident;
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
                tok.text.push_back(text[pos]);
                advance();
            }
            tok.kind = DslToken::Int;
        } else if (c == '"') {
            advance();
            while (true) {
                if (pos >= text.size() || text[pos] == '\n')
                    dsl_fail(tok.line, "unterminated string literal");
                char n = text[pos];
                advance();
                if (n == '"') break;
                if (n == '\\') {
                    if (pos >= text.size()) dsl_fail(tok.line, "unterminated string literal");
                    tok.text.push_back(text[pos]);
                    advance();
                } else {
                    tok.text.push_back(n);
                }
            }
            tok.kind = DslToken::String;
        } else {
            static const std::vector<std::string> kTwoChar = {"==", "!=", "&&", "||"};
            bool matched = false;
            if (pos + 1 < text.size()) {
                std::string two{c, text[pos + 1]};
                for (const auto& op : kTwoChar) {
                    if (two == op) {
                        tok.text = op;
                        advance();
                        advance();
                        matched = true;
                        break;
                    }
                }
            }
            if (!matched) {
                static const std::string kSingles = "{}();,.=!<>";
                if (kSingles.find(c) == std::string::npos)
                    dsl_fail(line, std::string("unexpected character '") + c + "'");
                tok.text = std::string(1, c);
                advance();
            }
            tok.kind = DslToken::Punct;
        }
        tokens.push_back(std::move(tok));
    }
    DslToken eof;
    eof.kind = DslToken::Eof;
    eof.line = line;
    eof.col = col;
    tokens.push_back(eof);
    return tokens;
}

class DslParser {
public:
    explicit DslParser(std::vector<DslToken> tokens) : tokens_(std::move(tokens)) {}

    ScriptAst run() {
        ScriptAst script;
        while (is_ident("use")) {
            advance();
            dsl::UseLine use;
            use.line = cur().line;
            use.name = expect_ident_text();
            expect_punct(";");
            script.uses.push_back(std::move(use));
        }
        while (cur().kind != DslToken::Eof) {
            if (!is_ident("on")) dsl_fail(cur().line, "expected 'on' visitor block");
            script.visitors.push_back(parse_visitor());
        }
        return script;
    }

private:
    const DslToken& cur() const { return tokens_[pos_]; }
    const DslToken& peek(std::size_t off = 1) const {
        std::size_t i = pos_ + off;
        return tokens_[std::min(i, tokens_.size() - 1)];
    }
    const DslToken& advance() { return tokens_[pos_++]; }

    bool is_ident(const char* word) const {
        return cur().kind == DslToken::Ident && cur().text == word;
    }
    bool is_punct(const char* p) const {
        return cur().kind == DslToken::Punct && cur().text == p;
    }
    void expect_punct(const char* p) {
        if (!is_punct(p)) dsl_fail(cur().line, std::string("expected '") + p + "'");
        advance();
    }
    std::string expect_ident_text() {
        if (cur().kind != DslToken::Ident) dsl_fail(cur().line, "expected identifier");
        return advance().text;
    }

    dsl::Visitor parse_visitor() {
        dsl::Visitor visitor;
        visitor.line = cur().line;
        advance();  // on
        visitor.on_type_name = expect_ident_text();
        if (!is_ident("as")) dsl_fail(cur().line, "expected 'as'");
        advance();
        visitor.var = expect_ident_text();
        visitor.body = parse_block();
        return visitor;
    }

    std::vector<dsl::StmtPtr> parse_block() {
        expect_punct("{");
        std::vector<dsl::StmtPtr> stmts;
        while (!is_punct("}")) {
            if (cur().kind == DslToken::Eof) dsl_fail(cur().line, "unterminated block");
            stmts.push_back(parse_statement());
        }
        advance();
        return stmts;
    }

    dsl::StmtPtr parse_statement() {
        auto stmt = std::make_unique<dsl::Stmt>();
        stmt->line = cur().line;
        if (is_ident("let")) {
            advance();
            stmt->kind = dsl::StmtKind::Let;
            stmt->var = expect_ident_text();
            expect_punct("=");
            stmt->expr = parse_expr();
            expect_punct(";");
            return stmt;
        }
        if (is_ident("if")) return parse_if();
        if (is_ident("for")) {
            advance();
            stmt->kind = dsl::StmtKind::ForEach;
            stmt->var = expect_ident_text();
            if (!is_ident("in")) dsl_fail(cur().line, "expected 'in'");
            advance();
            stmt->expr = parse_expr();
            stmt->body = parse_block();
            return stmt;
        }
        if (is_ident("report")) {
            advance();
            stmt->kind = dsl::StmtKind::Report;
            expect_punct("(");
            stmt->expr = parse_expr();
            expect_punct(",");
            if (cur().kind != DslToken::String)
                dsl_fail(cur().line, "report message must be a string literal");
            stmt->message = advance().text;
            expect_punct(")");
            expect_punct(";");
            return stmt;
        }
        dsl_fail(cur().line, "expected statement (let, if, for, report)");
    }

    dsl::StmtPtr parse_if() {
        auto stmt = std::make_unique<dsl::Stmt>();
        stmt->line = cur().line;
        stmt->kind = dsl::StmtKind::If;
        advance();  // if
        expect_punct("(");
        stmt->expr = parse_expr();
        expect_punct(")");
        stmt->body = parse_block();
        if (is_ident("else")) {
            advance();
            if (is_ident("if")) {
                stmt->else_body.push_back(parse_if());
            } else {
                stmt->else_body = parse_block();
            }
        }
        return stmt;
    }

    dsl::ExprPtr parse_expr() { return parse_or(); }

    dsl::ExprPtr parse_or() {
        auto lhs = parse_and();
        while (is_punct("||")) {
            auto node = std::make_unique<dsl::Expr>();
            node->kind = dsl::ExprKind::Binary;
            node->line = cur().line;
            node->col = cur().col;
            node->text = advance().text;
            node->lhs = std::move(lhs);
            node->rhs = parse_and();
            lhs = std::move(node);
        }
        return lhs;
    }

    dsl::ExprPtr parse_and() {
        auto lhs = parse_cmp();
        while (is_punct("&&")) {
            auto node = std::make_unique<dsl::Expr>();
            node->kind = dsl::ExprKind::Binary;
            node->line = cur().line;
            node->col = cur().col;
            node->text = advance().text;
            node->lhs = std::move(lhs);
            node->rhs = parse_cmp();
            lhs = std::move(node);
        }
        return lhs;
    }

    dsl::ExprPtr parse_cmp() {
        auto lhs = parse_unary();
        if (is_punct("==") || is_punct("!=") || is_punct("<") || is_punct(">")) {
            auto node = std::make_unique<dsl::Expr>();
            node->kind = dsl::ExprKind::Binary;
            node->line = cur().line;
            node->col = cur().col;
            node->text = advance().text;
            node->lhs = std::move(lhs);
            node->rhs = parse_unary();
            return node;
        }
        return lhs;
    }

    dsl::ExprPtr parse_unary() {
        if (is_punct("!")) {
            auto node = std::make_unique<dsl::Expr>();
            node->kind = dsl::ExprKind::Not;
            node->line = cur().line;
            node->col = cur().col;
            advance();
            node->lhs = parse_unary();
            return node;
        }
        return parse_postfix();
    }

    dsl::ExprPtr parse_postfix() {
        auto expr = parse_primary();
        while (is_punct(".")) {
            advance();
            auto call = std::make_unique<dsl::Expr>();
            call->kind = dsl::ExprKind::Call;
            call->line = cur().line;
            call->col = cur().col;
            call->text = expect_ident_text();
            expect_punct("(");
            if (!is_punct(")")) {
                while (true) {
                    call->args.push_back(parse_expr());
                    if (!is_punct(",")) break;
                    advance();
                }
            }
            expect_punct(")");
            call->receiver = std::move(expr);
            expr = std::move(call);
        }
        return expr;
    }

    dsl::ExprPtr parse_primary() {
        auto node = std::make_unique<dsl::Expr>();
        node->line = cur().line;
        node->col = cur().col;
        if (cur().kind == DslToken::String) {
            node->kind = dsl::ExprKind::StrLit;
            node->text = advance().text;
            return node;
        }
        if (cur().kind == DslToken::Int) {
            node->kind = dsl::ExprKind::IntLit;
            node->text = cur().text;
            try {
                node->int_value = std::stoll(cur().text);
            } catch (const std::out_of_range&) {
                dsl_fail(cur().line, "integer literal out of range");
            }
            advance();
            return node;
        }
        if (is_ident("null")) {
            node->kind = dsl::ExprKind::NullLit;
            advance();
            return node;
        }
        if (cur().kind == DslToken::Ident) {
            node->kind = dsl::ExprKind::VarRef;
            node->text = advance().text;
            return node;
        }
        if (is_punct("(")) {
            advance();
            auto inner = parse_expr();
            expect_punct(")");
            return inner;
        }
        dsl_fail(cur().line, "expected expression");
    }

    std::vector<DslToken> tokens_;
    std::size_t pos_ = 0;
};

// --- static resolution ------------------------------------------------------

struct SType {
    enum Tag { NodeKnown, NodeAny, NodeList, Str, Int, Bool, Null, Any } tag = Any;
    NodeType node_type{NodeType::CompilationUnit};  // NodeKnown
    bool elem_known = false;
    NodeType elem_type{NodeType::CompilationUnit};  // NodeList

    static SType known(NodeType t) { return {NodeKnown, t, false, {}}; }
    static SType list(bool known_elem, NodeType t) { return {NodeList, {}, known_elem, t}; }
    static SType of(Tag tag) { return {tag, {}, false, {}}; }

    bool node_like() const { return tag == NodeKnown || tag == NodeAny || tag == Any; }
};

SType stype_from_return(const std::string& ret) {
    std::string t = ret;
    std::transform(t.begin(), t.end(), t.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (t == "bool" || t == "boolean") return SType::of(SType::Bool);
    if (t == "int") return SType::of(SType::Int);
    if (t == "string") return SType::of(SType::Str);
    if (t == "node") return SType::of(SType::NodeAny);
    if (t == "list<node>") return SType::list(false, {});
    return SType::of(SType::Any);
}

struct CatalogIndex {
    // owner -> method -> entry (node kind)
    std::map<std::string, std::map<std::string, const ApiEntry*>> by_owner;
    // method -> entries in catalog order (all kinds)
    std::map<std::string, std::vector<const ApiEntry*>> by_method;

    explicit CatalogIndex(const Catalog& catalog) {
        for (const auto& entry : catalog) {
            by_owner[entry.owner_type].emplace(entry.method_name, &entry);
            by_method[entry.method_name].push_back(&entry);
        }
    }

    const ApiEntry* find_on(const std::string& owner, const std::string& method) const {
        auto o = by_owner.find(owner);
        if (o == by_owner.end()) return nullptr;
        auto m = o->second.find(method);
        return m == o->second.end() ? nullptr : m->second;
    }

    const ApiEntry* find_kind(const std::string& method, ApiKind kind) const {
        auto it = by_method.find(method);
        if (it == by_method.end()) return nullptr;
        for (const auto* entry : it->second)
            if (entry->kind == kind) return entry;
        return nullptr;
    }

    const ApiEntry* find_any(const std::string& method) const {
        auto it = by_method.find(method);
        return it == by_method.end() || it->second.empty() ? nullptr : it->second.front();
    }

    bool method_exists(const std::string& method) const {
        return by_method.count(method) > 0;
    }
};

class Resolver {
public:
    Resolver(ScriptAst& script, const Catalog& catalog)
        : script_(script), index_(catalog) {}

    CompileError errors;
    std::map<std::string, std::string> resolved;

    void run() {
        for (const auto& use : script_.uses) {
            NodeType t;
            if (!minisrc::node_type_from_name(use.name, t))
                errors.unknown_names.emplace_back(use.name, use.line);
        }
        for (auto& visitor : script_.visitors) resolve_visitor(visitor);
    }

private:
    using Scope = std::map<std::string, SType>;

    void resolve_visitor(dsl::Visitor& visitor) {
        NodeType t;
        if (!minisrc::node_type_from_name(visitor.on_type_name, t)) {
            errors.unknown_names.emplace_back(visitor.on_type_name, visitor.line);
            t = NodeType::CompilationUnit;
        }
        visitor.on_type = t;
        scopes_.clear();
        scopes_.push_back({{visitor.var, SType::known(t)}});
        resolve_stmts(visitor.body);
        scopes_.pop_back();
    }

    void resolve_stmts(const std::vector<dsl::StmtPtr>& stmts) {
        scopes_.push_back({});
        for (const auto& stmt : stmts) resolve_stmt(*stmt);
        scopes_.pop_back();
    }

    void resolve_stmt(const dsl::Stmt& stmt) {
        switch (stmt.kind) {
            case dsl::StmtKind::Let: {
                SType t = resolve_expr(*stmt.expr);
                scopes_.back()[stmt.var] = t;
                break;
            }
            case dsl::StmtKind::If: {
                SType cond = resolve_expr(*stmt.expr);
                if (cond.tag != SType::Bool && cond.tag != SType::Any)
                    errors.type_errors.emplace_back("if condition is not boolean",
                                                    stmt.line);
                resolve_stmts(stmt.body);
                resolve_stmts(stmt.else_body);
                break;
            }
            case dsl::StmtKind::ForEach: {
                SType list = resolve_expr(*stmt.expr);
                SType elem = SType::of(SType::NodeAny);
                if (list.tag == SType::NodeList) {
                    if (list.elem_known) elem = SType::known(list.elem_type);
                } else if (list.tag != SType::Any) {
                    errors.type_errors.emplace_back("for-each source is not a node list",
                                                    stmt.line);
                }
                scopes_.push_back({{stmt.var, elem}});
                resolve_stmts(stmt.body);
                scopes_.pop_back();
                break;
            }
            case dsl::StmtKind::Report: {
                SType target = resolve_expr(*stmt.expr);
                if (!target.node_like())
                    errors.type_errors.emplace_back("report target is not a node",
                                                    stmt.line);
                break;
            }
        }
    }

    const SType* lookup(const std::string& name) const {
        for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
            auto found = it->find(name);
            if (found != it->end()) return &found->second;
        }
        return nullptr;
    }

    SType resolve_expr(dsl::Expr& expr) {
        switch (expr.kind) {
            case dsl::ExprKind::StrLit: return SType::of(SType::Str);
            case dsl::ExprKind::IntLit: return SType::of(SType::Int);
            case dsl::ExprKind::NullLit: return SType::of(SType::Null);
            case dsl::ExprKind::TypeLit: return SType::of(SType::Any);
            case dsl::ExprKind::VarRef: {
                if (const SType* t = lookup(expr.text)) return *t;
                errors.unknown_names.emplace_back(expr.text, expr.line);
                return SType::of(SType::Any);
            }
            case dsl::ExprKind::Not: {
                SType t = resolve_expr(*expr.lhs);
                if (t.tag != SType::Bool && t.tag != SType::Any)
                    errors.type_errors.emplace_back("operand of '!' is not boolean",
                                                    expr.line);
                return SType::of(SType::Bool);
            }
            case dsl::ExprKind::Binary: return resolve_binary(expr);
            case dsl::ExprKind::Call: return resolve_call(expr);
        }
        return SType::of(SType::Any);
    }

    SType resolve_binary(dsl::Expr& expr) {
        SType l = resolve_expr(*expr.lhs);
        SType r = resolve_expr(*expr.rhs);
        const std::string& op = expr.text;
        if (op == "&&" || op == "||") {
            if ((l.tag != SType::Bool && l.tag != SType::Any) ||
                (r.tag != SType::Bool && r.tag != SType::Any))
                errors.type_errors.emplace_back("operand of '" + op + "' is not boolean",
                                                expr.line);
            return SType::of(SType::Bool);
        }
        if (op == "<" || op == ">") {
            if ((l.tag != SType::Int && l.tag != SType::Any) ||
                (r.tag != SType::Int && r.tag != SType::Any))
                errors.type_errors.emplace_back("operand of '" + op + "' is not an int",
                                                expr.line);
            return SType::of(SType::Bool);
        }
        // == / != : comparable kinds only
        auto comparable = [](const SType& a, const SType& b) {
            if (a.tag == SType::Any || b.tag == SType::Any) return true;
            if (a.tag == SType::Null || b.tag == SType::Null)
                return a.node_like() || b.node_like() || a.tag == b.tag;
            if (a.node_like() && b.node_like()) return true;
            return a.tag == b.tag;
        };
        if (!comparable(l, r))
            errors.type_errors.emplace_back("incomparable operands of '" + op + "'",
                                            expr.line);
        return SType::of(SType::Bool);
    }

    SType resolve_call(dsl::Expr& expr) {
        SType recv = resolve_expr(*expr.receiver);
        const std::string& method = expr.text;
        const ApiEntry* entry = nullptr;
        if (recv.tag == SType::NodeKnown) {
            entry = index_.find_on(minisrc::node_type_name(recv.node_type), method);
            if (!entry) entry = index_.find_kind(method, ApiKind::edge);
            if (!entry) entry = index_.find_kind(method, ApiKind::util);
            if (!entry) {
                if (index_.method_exists(method)) {
                    errors.type_errors.emplace_back(
                        "method " + method + " is not available on " +
                            minisrc::node_type_name(recv.node_type),
                        expr.line);
                    resolve_args(expr, nullptr);
                    return SType::of(SType::Any);
                }
                errors.unknown_names.emplace_back(method, expr.line);
                resolve_args(expr, nullptr);
                return SType::of(SType::Any);
            }
        } else if (recv.tag == SType::NodeAny || recv.tag == SType::Any) {
            entry = index_.find_any(method);
            if (!entry) {
                errors.unknown_names.emplace_back(method, expr.line);
                resolve_args(expr, nullptr);
                return SType::of(SType::Any);
            }
        } else {
            if (!index_.method_exists(method)) {
                errors.unknown_names.emplace_back(method, expr.line);
            } else {
                errors.type_errors.emplace_back(
                    "method call on a non-node value: " + method, expr.line);
            }
            resolve_args(expr, nullptr);
            return SType::of(SType::Any);
        }

        resolve_args(expr, entry);
        resolved[call_key(expr)] = entry->id;

        // Traversal APIs get precise result types from their type argument.
        if (entry->kind == ApiKind::edge) {
            if ((method == "descendants" || method == "ancestors") &&
                expr.args.size() == 1 && expr.args[0]->kind == dsl::ExprKind::TypeLit)
                return SType::list(true, expr.args[0]->type_literal);
            if (method == "firstParentOfType" && expr.args.size() == 1 &&
                expr.args[0]->kind == dsl::ExprKind::TypeLit)
                return SType::known(expr.args[0]->type_literal);
            if (method == "getRoot") return SType::known(NodeType::CompilationUnit);
        }
        // Result types may disagree across owners for shared method names.
        if (recv.tag == SType::NodeAny || recv.tag == SType::Any) {
            auto it = index_.by_method.find(method);
            if (it != index_.by_method.end() && it->second.size() > 1) {
                for (const auto* e : it->second)
                    if (e->return_type != entry->return_type) return SType::of(SType::Any);
            }
        }
        return stype_from_return(entry->return_type);
    }

    static std::string call_key(const dsl::Expr& call) {
        return std::to_string(call.line) + ":" + std::to_string(call.col) + ":" + call.text;
    }

    void resolve_args(dsl::Expr& expr, const ApiEntry* entry) {
        std::vector<std::string> params;
        if (entry) {
            params = entry->param_types;
            if (entry->kind == ApiKind::util && !params.empty() && params.front() == "Node")
                params.erase(params.begin());
        }
        if (entry && params.size() != expr.args.size())
            errors.type_errors.emplace_back(
                entry->method_name + " expects " + std::to_string(params.size()) +
                    " argument(s), got " + std::to_string(expr.args.size()),
                expr.line);
        for (std::size_t i = 0; i < expr.args.size(); ++i) {
            dsl::Expr& arg = *expr.args[i];
            std::string want = i < params.size() ? params[i] : "";
            if (want == "NodeType") {
                if (arg.kind == dsl::ExprKind::VarRef) {
                    NodeType t;
                    if (minisrc::node_type_from_name(arg.text, t)) {
                        arg.kind = dsl::ExprKind::TypeLit;
                        arg.type_literal = t;
                        continue;
                    }
                    errors.unknown_names.emplace_back(arg.text, arg.line);
                    continue;
                }
                errors.type_errors.emplace_back("expected a node type argument", arg.line);
                continue;
            }
            SType got = resolve_expr(arg);
            if (want == "int" && got.tag != SType::Int && got.tag != SType::Any)
                errors.type_errors.emplace_back("expected an int argument", arg.line);
            if (want == "string" && got.tag != SType::Str && got.tag != SType::Any)
                errors.type_errors.emplace_back("expected a string argument", arg.line);
            if (want == "Node" && !got.node_like())
                errors.type_errors.emplace_back("expected a node argument", arg.line);
        }
    }

    ScriptAst& script_;
    CatalogIndex index_;
    std::vector<Scope> scopes_;
};

}  // namespace

CompileResult compile_checker(const std::string& source, const Catalog& catalog) {
    auto script = std::make_shared<ScriptAst>();
    try {
        *script = DslParser(dsl_lex(source)).run();
    } catch (const DslPanic& p) {
        CompileError err;
        err.type_errors.emplace_back(p.message, p.line);
        return err;
    }
    if (script->visitors.empty()) {
        CompileError err;
        err.type_errors.emplace_back("no visitor block", 1);
        return err;
    }
    Resolver resolver(*script, catalog);
    resolver.run();
    if (!resolver.errors.empty()) return resolver.errors;
    CompiledChecker compiled;
    compiled.script = std::move(script);
    compiled.resolved_calls = std::move(resolver.resolved);
    return compiled;
}

// --- interpreter ------------------------------------------------------------

namespace {

class Interpreter {
public:
    Interpreter(const ScriptAst& script, std::vector<Violation>& out)
        : script_(script), out_(out) {}

    void visit(const AstNode& node) {
        for (const auto& visitor : script_.visitors) {
            if (visitor.on_type != node.type) continue;
            scopes_.clear();
            scopes_.push_back({{visitor.var, Value{&node}}});
            exec_stmts(visitor.body);
        }
        for (const auto& child : node.children) visit(*child);
    }

private:
    using Scope = std::map<std::string, Value>;

    void exec_stmts(const std::vector<dsl::StmtPtr>& stmts) {
        scopes_.push_back({});
        for (const auto& stmt : stmts) exec_stmt(*stmt);
        scopes_.pop_back();
    }

    void exec_stmt(const dsl::Stmt& stmt) {
        switch (stmt.kind) {
            case dsl::StmtKind::Let:
                scopes_.back()[stmt.var] = eval(*stmt.expr);
                break;
            case dsl::StmtKind::If: {
                if (truthy(eval(*stmt.expr), stmt.line)) {
                    exec_stmts(stmt.body);
                } else {
                    exec_stmts(stmt.else_body);
                }
                break;
            }
            case dsl::StmtKind::ForEach: {
                Value source = eval(*stmt.expr);
                auto* list = std::get_if<NodeListVal>(&source);
                if (!list)
                    throw CheckerRuntimeError("for-each", stmt.line,
                                              "loop source is not a node list");
                for (const AstNode* node : list->nodes) {
                    scopes_.push_back({{stmt.var, Value{node}}});
                    exec_stmts(stmt.body);
                    scopes_.pop_back();
                }
                break;
            }
            case dsl::StmtKind::Report: {
                Value target = eval(*stmt.expr);
                auto* node = std::get_if<const AstNode*>(&target);
                if (!node)
                    throw CheckerRuntimeError("report", stmt.line,
                                              "report target is not a node");
                out_.push_back({(*node)->span.line, stmt.message});
                break;
            }
        }
    }

    bool truthy(const Value& v, int line) {
        if (auto* b = std::get_if<bool>(&v)) return *b;
        throw CheckerRuntimeError("if", line, "condition is not boolean");
    }

    Value eval(const dsl::Expr& expr) {
        switch (expr.kind) {
            case dsl::ExprKind::StrLit: return expr.text;
            case dsl::ExprKind::IntLit: return expr.int_value;
            case dsl::ExprKind::NullLit: return std::monostate{};
            case dsl::ExprKind::TypeLit:
                return std::string(minisrc::node_type_name(expr.type_literal));
            case dsl::ExprKind::VarRef: {
                for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
                    auto found = it->find(expr.text);
                    if (found != it->end()) return found->second;
                }
                throw CheckerRuntimeError(expr.text, expr.line, "unbound variable");
            }
            case dsl::ExprKind::Not: {
                Value v = eval(*expr.lhs);
                if (auto* b = std::get_if<bool>(&v)) return !*b;
                throw CheckerRuntimeError("!", expr.line, "operand is not boolean");
            }
            case dsl::ExprKind::Binary: return eval_binary(expr);
            case dsl::ExprKind::Call: return eval_call(expr);
        }
        return std::monostate{};
    }

    Value eval_binary(const dsl::Expr& expr) {
        const std::string& op = expr.text;
        if (op == "&&" || op == "||") {
            Value l = eval(*expr.lhs);
            auto* lb = std::get_if<bool>(&l);
            if (!lb)
                throw CheckerRuntimeError(op, expr.line, "operand is not boolean");
            if (op == "&&" && !*lb) return false;
            if (op == "||" && *lb) return true;
            Value r = eval(*expr.rhs);
            auto* rb = std::get_if<bool>(&r);
            if (!rb)
                throw CheckerRuntimeError(op, expr.line, "operand is not boolean");
            return *rb;
        }
        Value l = eval(*expr.lhs);
        Value r = eval(*expr.rhs);
        if (op == "<" || op == ">") {
            auto* li = std::get_if<long long>(&l);
            auto* ri = std::get_if<long long>(&r);
            if (!li || !ri)
                throw CheckerRuntimeError(op, expr.line, "operand is not an int");
            return op == "<" ? *li < *ri : *li > *ri;
        }
        bool eq = values_equal(l, r);
        return op == "==" ? eq : !eq;
    }

    static bool values_equal(const Value& l, const Value& r) {
        if (l.index() != r.index()) return false;  // includes node-vs-null
        if (std::holds_alternative<std::monostate>(l)) return true;
        if (auto* ln = std::get_if<const AstNode*>(&l))
            return *ln == std::get<const AstNode*>(r);
        if (auto* ls = std::get_if<std::string>(&l))
            return *ls == std::get<std::string>(r);
        if (auto* li = std::get_if<long long>(&l)) return *li == std::get<long long>(r);
        if (auto* lb = std::get_if<bool>(&l)) return *lb == std::get<bool>(r);
        return false;  // node lists never compare equal
    }

    Value eval_call(const dsl::Expr& expr) {
        Value recv = eval(*expr.receiver);
        CallSite site{expr.text, expr.line, expr.col};
        auto* node = std::get_if<const AstNode*>(&recv);
        if (!node) {
            if (std::holds_alternative<std::monostate>(recv))
                throw CheckerRuntimeError(expr.text, expr.line,
                                          "method call on null");
            throw CheckerRuntimeError(expr.text, expr.line,
                                      "method call on a non-node value");
        }
        const BuiltinApi* api = dispatch_api((*node)->type, expr.text);
        if (!api)
            throw CheckerRuntimeError(expr.text, expr.line,
                                      std::string("no method ") + expr.text + " on " +
                                          minisrc::node_type_name((*node)->type));
        std::vector<Value> args;
        args.reserve(expr.args.size());
        for (const auto& arg : expr.args) args.push_back(eval(*arg));
        return api->handler(*node, args, site);
    }

    const ScriptAst& script_;
    std::vector<Violation>& out_;
    std::vector<Scope> scopes_;
};

}  // namespace

std::vector<Violation> run_checker(const CompiledChecker& compiled,
                                   const minisrc::AstNode& ast) {
    std::vector<Violation> violations;
    Interpreter interp(*compiled.script, violations);
    interp.visit(ast);
    std::sort(violations.begin(), violations.end(),
              [](const Violation& a, const Violation& b) {
                  return a.line != b.line ? a.line < b.line : a.message < b.message;
              });
    return violations;
}

// --- header normalization ----------------------------------------------------

namespace {

/// Byte offset of the first line whose first token is `on`.
std::size_t first_visitor_offset(const std::string& text, bool& found) {
    std::size_t line_start = 0;
    while (line_start <= text.size()) {
        std::size_t i = line_start;
        while (i < text.size() && (text[i] == ' ' || text[i] == '\t')) ++i;
        if (text.compare(i, 2, "on") == 0 &&
            (i + 2 >= text.size() || !std::isalnum(static_cast<unsigned char>(text[i + 2])))) {
            found = true;
            return line_start;
        }
        std::size_t next = text.find('\n', line_start);
        if (next == std::string::npos) break;
        line_start = next + 1;
    }
    found = false;
    return 0;
}

}  // namespace

std::string normalize_header(const std::string& source, const std::string& tmpl) {
    bool tmpl_found = false;
    std::size_t tmpl_offset = first_visitor_offset(tmpl, tmpl_found);
    if (!tmpl_found) throw NormalizationError("template has no visitor block");
    bool src_found = false;
    std::size_t src_offset = first_visitor_offset(source, src_found);
    if (!src_found) throw NormalizationError("checker has no visitor block");
    return tmpl.substr(0, tmpl_offset) + source.substr(src_offset);
}

// --- manifest export ----------------------------------------------------------

std::string export_manifest() {
    Catalog catalog;
    for (const auto& api : builtin_api_table()) {
        ApiEntry entry;
        entry.id = api.owner + "." + api.method;
        entry.owner_type = api.owner;
        entry.method_name = api.method;
        entry.param_types = api.params;
        entry.return_type = api.ret;
        entry.comment = api.comment;
        switch (api.kind) {
            case ApiKind::edge:
                entry.declared_on_abstract_node = true;
                entry.returns_node = true;
                break;
            case ApiKind::util:
                entry.is_static_util = true;
                break;
            case ApiKind::node:
                entry.returns_node = api.ret == "Node" || api.ret == "List<Node>";
                break;
        }
        entry.kind = api.kind;
        catalog.push_back(std::move(entry));
    }
    return render_manifest(catalog);
}

const Catalog& builtin_catalog() {
    static const Catalog kCatalog = ingest_manifest(export_manifest());
    return kCatalog;
}

}  // namespace autochecker::minilint
