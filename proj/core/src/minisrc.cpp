#include "autochecker/minisrc.hpp"

#include <array>
#include <cctype>
#include <sstream>

namespace autochecker::minisrc {

namespace {

constexpr std::array<const char*, 27> kNodeTypeNames = {
    "CompilationUnit", "ImportDecl", "ClassDecl",  "FieldDecl",  "MethodDecl",
    "CtorDecl",        "Param",      "Block",      "IfStmt",     "WhileStmt",
    "ForStmt",         "ReturnStmt", "ThrowStmt",  "TryStmt",    "CatchClause",
    "ExprStmt",        "VarDeclStmt", "AssignExpr", "BinaryExpr", "UnaryExpr",
    "CallExpr",        "FieldAccess", "NameRef",    "NewExpr",    "IntLit",
    "StringLit",       "NullLit",
};

}  // namespace

const char* node_type_name(NodeType type) {
    return kNodeTypeNames[static_cast<std::size_t>(type)];
}

bool node_type_from_name(const std::string& name, NodeType& out) {
    for (std::size_t i = 0; i < kNodeTypeNames.size(); ++i) {
        if (name == kNodeTypeNames[i]) {
            out = static_cast<NodeType>(i);
            return true;
        }
    }
    return false;
}

const std::vector<NodeType>& all_node_types() {
    static const std::vector<NodeType> kAll = [] {
        std::vector<NodeType> v;
        for (std::size_t i = 0; i < kNodeTypeNames.size(); ++i)
            v.push_back(static_cast<NodeType>(i));
        return v;
    }();
    return kAll;
}

namespace {

enum class TokKind {
    Ident,
    Int,
    String,
    Keyword,
    Punct,
    Eof,
};

struct Token {
    TokKind kind{TokKind::Eof};
    std::string text;
    int line = 1;
    int col = 1;
    int end_line = 1;
    int end_col = 1;
};

bool is_keyword(const std::string& s) {
    static const std::set<std::string> kKeywords = {
        "import", "class", "public", "private", "static", "final", "if",  "else",
        "while",  "for",   "return", "throw",   "try",    "catch", "new", "null"};
    return kKeywords.count(s) > 0;
}

struct ParsePanic {
    ParseError error;
};

[[noreturn]] void fail(int line, int col, const std::string& msg) {
    throw ParsePanic{ParseError{line, col, msg}};
}

class Lexer {
public:
    explicit Lexer(const std::string& text) : text_(text) {}

    std::vector<Token> run() {
        std::vector<Token> tokens;
        while (true) {
            skip_trivia();
            if (at_end()) break;
            tokens.push_back(next_token());
        }
        Token eof;
        eof.kind = TokKind::Eof;
        eof.line = line_;
        eof.col = col_;
        eof.end_line = line_;
        eof.end_col = col_;
        tokens.push_back(eof);
        return tokens;
    }

private:
    bool at_end() const { return pos_ >= text_.size(); }
    char peek(std::size_t off = 0) const {
        return pos_ + off < text_.size() ? text_[pos_ + off] : '\0';
    }

    void advance() {
        char c = text_[pos_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
    }

    void skip_trivia() {
        while (!at_end()) {
            char c = peek();
            if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
                advance();
            } else if (c == '/' && peek(1) == '/') {
                while (!at_end() && peek() != '\n') advance();
            } else {
                break;
            }
        }
    }

    Token next_token() {
        Token tok;
        tok.line = line_;
        tok.col = col_;
        char c = peek();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            while (!at_end()) {
                char n = peek();
                if (!std::isalnum(static_cast<unsigned char>(n)) && n != '_') break;
                tok.text.push_back(n);
                advance();
            }
            tok.kind = is_keyword(tok.text) ? TokKind::Keyword : TokKind::Ident;
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) {
                tok.text.push_back(peek());
                advance();
            }
            tok.kind = TokKind::Int;
        } else if (c == '"') {
            advance();
            while (true) {
                if (at_end() || peek() == '\n')
                    fail(tok.line, tok.col, "unterminated string literal");
                char n = peek();
                advance();
                if (n == '"') break;
                if (n == '\\') {
                    if (at_end()) fail(tok.line, tok.col, "unterminated string literal");
                    tok.text.push_back(peek());
                    advance();
                } else {
                    tok.text.push_back(n);
                }
            }
            tok.kind = TokKind::String;
        } else {
            static const std::vector<std::string> kTwoChar = {"==", "!=", "&&", "||"};
            std::string two{c, peek(1)};
            bool matched = false;
            for (const auto& op : kTwoChar) {
                if (two == op) {
                    tok.text = op;
                    advance();
                    advance();
                    matched = true;
                    break;
                }
            }
            if (!matched) {
                static const std::string kSingles = "{}();,.=!+-*/<";
                if (kSingles.find(c) == std::string::npos)
                    fail(line_, col_, std::string("unexpected character '") + c + "'");
                tok.text = std::string(1, c);
                advance();
            }
            tok.kind = TokKind::Punct;
        }
        tok.end_line = line_;
        tok.end_col = col_ > 1 ? col_ - 1 : 1;
        return tok;
    }

    const std::string& text_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

class Parser {
public:
    explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

    AstPtr run() {
        auto root = make(NodeType::CompilationUnit, cur());
        if (check_eof()) fail(1, 1, "empty compilation unit");
        while (is_keyword_tok("import")) root->children.push_back(parse_import());
        while (!check_eof()) root->children.push_back(parse_class());
        close(*root, prev());
        return root;
    }

private:
    const Token& cur() const { return tokens_[pos_]; }
    const Token& prev() const { return tokens_[pos_ > 0 ? pos_ - 1 : 0]; }
    bool check_eof() const { return cur().kind == TokKind::Eof; }

    bool is_keyword_tok(const char* kw) const {
        return cur().kind == TokKind::Keyword && cur().text == kw;
    }
    bool is_punct(const char* p) const {
        return cur().kind == TokKind::Punct && cur().text == p;
    }

    const Token& advance() { return tokens_[pos_++]; }

    const Token& expect_punct(const char* p) {
        if (!is_punct(p)) fail(cur().line, cur().col, std::string("expected '") + p + "'");
        return advance();
    }

    const Token& expect_keyword(const char* kw) {
        if (!is_keyword_tok(kw))
            fail(cur().line, cur().col, std::string("expected '") + kw + "'");
        return advance();
    }

    std::string expect_ident() {
        if (cur().kind != TokKind::Ident)
            fail(cur().line, cur().col, "expected identifier");
        return advance().text;
    }

    static AstPtr make(NodeType type, const Token& start) {
        auto node = std::make_unique<AstNode>();
        node->type = type;
        node->span.line = start.line;
        node->span.col = start.col;
        node->span.end_line = start.end_line;
        node->span.end_col = start.end_col;
        return node;
    }

    static void close(AstNode& node, const Token& end) {
        node.span.end_line = end.end_line;
        node.span.end_col = end.end_col;
    }

    std::set<std::string> parse_modifiers() {
        std::set<std::string> mods;
        while (cur().kind == TokKind::Keyword &&
               (cur().text == "public" || cur().text == "private" ||
                cur().text == "static" || cur().text == "final")) {
            mods.insert(advance().text);
        }
        return mods;
    }

    AstPtr parse_import() {
        auto node = make(NodeType::ImportDecl, cur());
        expect_keyword("import");
        std::string path = expect_ident();
        while (is_punct(".")) {
            advance();
            path += "." + expect_ident();
        }
        node->name = std::move(path);
        close(*node, expect_punct(";"));
        return node;
    }

    AstPtr parse_class() {
        const Token& start = cur();
        auto mods = parse_modifiers();
        if (!is_keyword_tok("class"))
            fail(cur().line, cur().col, "expected class declaration");
        auto node = make(NodeType::ClassDecl, start);
        node->modifiers = std::move(mods);
        advance();
        node->name = expect_ident();
        expect_punct("{");
        while (!is_punct("}")) {
            if (check_eof()) fail(cur().line, cur().col, "unterminated class body");
            node->children.push_back(parse_member());
        }
        close(*node, expect_punct("}"));
        return node;
    }

    AstPtr parse_member() {
        const Token& start = cur();
        auto mods = parse_modifiers();
        std::string first = expect_ident();
        if (is_punct("(")) {  // constructor: Name(
            auto node = make(NodeType::CtorDecl, start);
            node->modifiers = std::move(mods);
            node->name = std::move(first);
            parse_params(*node);
            node->children.push_back(parse_block());
            close(*node, prev());
            return node;
        }
        std::string second = expect_ident();
        if (is_punct("(")) {  // method: Type name(
            auto node = make(NodeType::MethodDecl, start);
            node->modifiers = std::move(mods);
            node->type_name = std::move(first);
            node->name = std::move(second);
            parse_params(*node);
            node->children.push_back(parse_block());
            close(*node, prev());
            return node;
        }
        auto node = make(NodeType::FieldDecl, start);  // field: Type name [= expr] ;
        node->modifiers = std::move(mods);
        node->type_name = std::move(first);
        node->name = std::move(second);
        if (is_punct("=")) {
            advance();
            node->children.push_back(parse_expr());
        }
        close(*node, expect_punct(";"));
        return node;
    }

    void parse_params(AstNode& owner) {
        expect_punct("(");
        if (!is_punct(")")) {
            while (true) {
                auto param = make(NodeType::Param, cur());
                param->type_name = expect_ident();
                param->name = expect_ident();
                close(*param, prev());
                owner.children.push_back(std::move(param));
                if (!is_punct(",")) break;
                advance();
            }
        }
        expect_punct(")");
    }

    AstPtr parse_block() {
        auto node = make(NodeType::Block, cur());
        expect_punct("{");
        while (!is_punct("}")) {
            if (check_eof()) fail(cur().line, cur().col, "unterminated block");
            node->children.push_back(parse_statement());
        }
        close(*node, expect_punct("}"));
        return node;
    }

    AstPtr parse_statement() {
        if (is_punct("{")) return parse_block();
        if (is_keyword_tok("if")) return parse_if();
        if (is_keyword_tok("while")) return parse_while();
        if (is_keyword_tok("for")) return parse_for();
        if (is_keyword_tok("return")) return parse_return();
        if (is_keyword_tok("throw")) return parse_throw();
        if (is_keyword_tok("try")) return parse_try();
        // Two identifiers in a row start a local variable declaration.
        if (cur().kind == TokKind::Ident && tokens_[pos_ + 1].kind == TokKind::Ident)
            return parse_var_decl();
        auto node = make(NodeType::ExprStmt, cur());
        node->children.push_back(parse_expr());
        close(*node, expect_punct(";"));
        return node;
    }

    AstPtr parse_var_decl() {
        auto node = make(NodeType::VarDeclStmt, cur());
        node->type_name = expect_ident();
        node->name = expect_ident();
        if (is_punct("=")) {
            advance();
            node->children.push_back(parse_expr());
        }
        close(*node, expect_punct(";"));
        return node;
    }

    AstPtr parse_if() {
        auto node = make(NodeType::IfStmt, cur());
        expect_keyword("if");
        expect_punct("(");
        node->children.push_back(parse_expr());
        expect_punct(")");
        node->children.push_back(parse_statement());
        if (is_keyword_tok("else")) {
            advance();
            node->children.push_back(parse_statement());
        }
        close(*node, prev());
        return node;
    }

    AstPtr parse_while() {
        auto node = make(NodeType::WhileStmt, cur());
        expect_keyword("while");
        expect_punct("(");
        node->children.push_back(parse_expr());
        expect_punct(")");
        node->children.push_back(parse_statement());
        close(*node, prev());
        return node;
    }

    AstPtr parse_for() {
        auto node = make(NodeType::ForStmt, cur());
        expect_keyword("for");
        expect_punct("(");
        if (cur().kind == TokKind::Ident && tokens_[pos_ + 1].kind == TokKind::Ident) {
            auto init = make(NodeType::VarDeclStmt, cur());
            init->type_name = expect_ident();
            init->name = expect_ident();
            if (is_punct("=")) {
                advance();
                init->children.push_back(parse_expr());
            }
            close(*init, prev());
            node->children.push_back(std::move(init));
            expect_punct(";");
        } else {
            node->children.push_back(parse_expr());
            expect_punct(";");
        }
        node->children.push_back(parse_expr());
        expect_punct(";");
        node->children.push_back(parse_expr());
        expect_punct(")");
        node->children.push_back(parse_statement());
        close(*node, prev());
        return node;
    }

    AstPtr parse_return() {
        auto node = make(NodeType::ReturnStmt, cur());
        expect_keyword("return");
        if (!is_punct(";")) node->children.push_back(parse_expr());
        close(*node, expect_punct(";"));
        return node;
    }

    AstPtr parse_throw() {
        auto node = make(NodeType::ThrowStmt, cur());
        expect_keyword("throw");
        node->children.push_back(parse_expr());
        close(*node, expect_punct(";"));
        return node;
    }

    AstPtr parse_try() {
        auto node = make(NodeType::TryStmt, cur());
        expect_keyword("try");
        node->children.push_back(parse_block());
        if (!is_keyword_tok("catch"))
            fail(cur().line, cur().col, "expected catch clause");
        while (is_keyword_tok("catch")) {
            auto clause = make(NodeType::CatchClause, cur());
            advance();
            expect_punct("(");
            auto param = make(NodeType::Param, cur());
            param->type_name = expect_ident();
            param->name = expect_ident();
            close(*param, prev());
            clause->children.push_back(std::move(param));
            expect_punct(")");
            clause->children.push_back(parse_block());
            close(*clause, prev());
            node->children.push_back(std::move(clause));
        }
        close(*node, prev());
        return node;
    }

    AstPtr parse_expr() { return parse_assign(); }

    AstPtr parse_assign() {
        const Token& start = cur();
        auto lhs = parse_or();
        if (is_punct("=")) {
            advance();
            auto node = make(NodeType::AssignExpr, start);
            auto rhs = parse_assign();  // right-associative
            close(*node, prev());
            node->children.push_back(std::move(lhs));
            node->children.push_back(std::move(rhs));
            return node;
        }
        return lhs;
    }

    AstPtr parse_binary_level(int level) {
        static const std::vector<std::vector<std::string>> kLevels = {
            {"||"}, {"&&"}, {"==", "!="}, {"<"}, {"+", "-"}, {"*", "/"}};
        if (level >= static_cast<int>(kLevels.size())) return parse_unary();
        const Token& start = cur();
        auto lhs = parse_binary_level(level + 1);
        while (cur().kind == TokKind::Punct) {
            bool hit = false;
            for (const auto& op : kLevels[level]) {
                if (cur().text == op) {
                    hit = true;
                    break;
                }
            }
            if (!hit) break;
            auto node = make(NodeType::BinaryExpr, start);
            node->name = advance().text;
            auto rhs = parse_binary_level(level + 1);
            close(*node, prev());
            node->children.push_back(std::move(lhs));
            node->children.push_back(std::move(rhs));
            lhs = std::move(node);
        }
        return lhs;
    }

    AstPtr parse_or() { return parse_binary_level(0); }

    AstPtr parse_unary() {
        if (is_punct("!")) {
            auto node = make(NodeType::UnaryExpr, cur());
            node->name = advance().text;
            node->children.push_back(parse_unary());
            close(*node, prev());
            return node;
        }
        return parse_postfix();
    }

    AstPtr parse_postfix() {
        const Token& start = cur();
        auto expr = parse_primary();
        while (is_punct(".")) {
            advance();
            std::string member = expect_ident();
            if (is_punct("(")) {
                auto call = make(NodeType::CallExpr, start);
                call->name = std::move(member);
                call->children.push_back(std::move(expr));
                parse_args(*call);
                close(*call, prev());
                expr = std::move(call);
            } else {
                auto access = make(NodeType::FieldAccess, start);
                access->name = std::move(member);
                access->children.push_back(std::move(expr));
                close(*access, prev());
                expr = std::move(access);
            }
        }
        return expr;
    }

    void parse_args(AstNode& call) {
        expect_punct("(");
        if (!is_punct(")")) {
            while (true) {
                call.children.push_back(parse_expr());
                if (!is_punct(",")) break;
                advance();
            }
        }
        expect_punct(")");
    }

    AstPtr parse_primary() {
        if (cur().kind == TokKind::Int) {
            auto node = make(NodeType::IntLit, cur());
            node->name = advance().text;
            return node;
        }
        if (cur().kind == TokKind::String) {
            auto node = make(NodeType::StringLit, cur());
            node->name = advance().text;
            return node;
        }
        if (is_keyword_tok("null")) {
            auto node = make(NodeType::NullLit, cur());
            advance();
            return node;
        }
        if (is_keyword_tok("new")) {
            auto node = make(NodeType::NewExpr, cur());
            advance();
            node->name = expect_ident();
            parse_args(*node);
            close(*node, prev());
            return node;
        }
        if (cur().kind == TokKind::Ident) {
            auto node = make(NodeType::NameRef, cur());
            node->name = advance().text;
            return node;
        }
        if (is_punct("(")) {
            advance();
            auto inner = parse_expr();
            expect_punct(")");
            return inner;
        }
        fail(cur().line, cur().col, "expected expression");
    }

    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
};

void link_parents(AstNode& node) {
    for (auto& child : node.children) {
        child->parent = &node;
        link_parents(*child);
    }
}

}  // namespace

ParseResult parse_source(const std::string& text) {
    try {
        auto tokens = Lexer(text).run();
        if (tokens.size() == 1) return ParseError{1, 1, "empty compilation unit"};
        auto root = Parser(std::move(tokens)).run();
        link_parents(*root);
        return root;
    } catch (const ParsePanic& p) {
        return p.error;
    }
}

namespace {

void render_node(const AstNode& node, bool augment, int depth, std::string& out) {
    out.append(static_cast<std::size_t>(depth) * 2, ' ');
    out += node_type_name(node.type);
    if (augment && node.has_name()) {
        out += "(";
        out += node.name;
        out += ")";
    }
    out += "\n";
    for (const auto& child : node.children) render_node(*child, augment, depth + 1, out);
}

}  // namespace

std::string render_ast(const AstNode& root, bool augment) {
    std::string out;
    render_node(root, augment, 0, out);
    return out;
}

std::set<NodeType> node_types_present(const AstNode& root) {
    std::set<NodeType> types;
    std::vector<const AstNode*> stack{&root};
    while (!stack.empty()) {
        const AstNode* node = stack.back();
        stack.pop_back();
        types.insert(node->type);
        for (const auto& child : node->children) stack.push_back(child.get());
    }
    return types;
}

namespace {

void hash_node(const AstNode& node, std::uint64_t& h) {
    auto mix = [&h](std::uint64_t v) {
        h ^= v;
        h *= 0x100000001b3ULL;  // FNV-1a prime
    };
    auto mix_str = [&](const std::string& s) {
        for (unsigned char c : s) mix(c);
        mix(0xff);
    };
    mix(static_cast<std::uint64_t>(node.type));
    mix_str(node.name);
    mix_str(node.type_name);
    for (const auto& m : node.modifiers) mix_str(m);
    mix(static_cast<std::uint64_t>(node.span.line));
    mix(static_cast<std::uint64_t>(node.span.col));
    mix(static_cast<std::uint64_t>(node.span.end_line));
    mix(static_cast<std::uint64_t>(node.span.end_col));
    mix(node.children.size());
    for (const auto& child : node.children) hash_node(*child, h);
}

}  // namespace

std::uint64_t structural_hash(const AstNode& root) {
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV offset basis
    hash_node(root, h);
    return h;
}

}  // namespace autochecker::minisrc
