#include "conpredict/minicc/parser.hpp"

#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

#include "conpredict/common/error.hpp"

namespace conpredict::minicc {

namespace {

enum class Tok {
    End, Ident, Int,
    KwFn, KwInt, KwBool, KwMutex, KwCond, KwThread, KwIf, KwElse, KwWhile, KwDo, KwReturn,
    KwTrue, KwFalse, KwSpawn,
    LParen, RParen, LBrace, RBrace, Comma, Semi,
    Assign, OrAssign, AndAssign,
    Plus, Minus, Star, Slash, Percent, Shl, Shr,
    Lt, Le, Gt, Ge, EqEq, NotEq, AndAnd, OrOr, Bang,
};

struct Token {
    Tok kind = Tok::End;
    std::string text;
    std::int64_t value = 0;
    SourceLoc loc;
};

const std::map<std::string, Tok, std::less<>>& keywords() {
    static const std::map<std::string, Tok, std::less<>> kw{
        {"fn", Tok::KwFn},         {"int", Tok::KwInt},       {"bool", Tok::KwBool},
        {"mutex", Tok::KwMutex},   {"cond", Tok::KwCond},     {"thread", Tok::KwThread},
        {"if", Tok::KwIf},         {"else", Tok::KwElse},     {"while", Tok::KwWhile},
        {"do", Tok::KwDo},         {"return", Tok::KwReturn}, {"true", Tok::KwTrue},
        {"false", Tok::KwFalse},   {"spawn", Tok::KwSpawn},
    };
    return kw;
}

/// Splits the text into tokens and records, per line, whether it holds code
/// and whether it holds a comment.
class Lexer {
public:
    explicit Lexer(std::string_view text) : text_(text) {
        std::size_t lines = 1;
        for (char c : text) lines += (c == '\n');
        code_lines_.assign(lines + 1, false);
        comment_lines_.assign(lines + 1, false);
    }

    std::vector<Token> run() {
        std::vector<Token> out;
        for (;;) {
            skip_space_and_comments();
            Token t;
            t.loc = {line_, col_};
            if (pos_ >= text_.size()) {
                t.kind = Tok::End;
                t.text = "end of input";
                out.push_back(t);
                return out;
            }
            code_lines_[line_] = true;
            char c = text_[pos_];
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                std::size_t start = pos_;
                while (pos_ < text_.size() &&
                       (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                    advance();
                t.text = std::string(text_.substr(start, pos_ - start));
                auto it = keywords().find(t.text);
                t.kind = (it == keywords().end()) ? Tok::Ident : it->second;
            } else if (std::isdigit(static_cast<unsigned char>(c))) {
                std::size_t start = pos_;
                while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
                    advance();
                t.text = std::string(text_.substr(start, pos_ - start));
                t.kind = Tok::Int;
                try {
                    t.value = std::stoll(t.text);
                } catch (const std::out_of_range&) {
                    throw ParseError({{t.loc.line, t.loc.col, "integer literal out of range"}});
                }
            } else {
                t.kind = punct(t.text);
            }
            out.push_back(std::move(t));
        }
    }

    const std::vector<bool>& code_lines() const { return code_lines_; }
    const std::vector<bool>& comment_lines() const { return comment_lines_; }

private:
    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    bool starts_with(std::string_view s) const { return text_.substr(pos_, s.size()) == s; }

    void skip_space_and_comments() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                advance();
            } else if (starts_with("//")) {
                comment_lines_[line_] = true;
                while (pos_ < text_.size() && text_[pos_] != '\n') advance();
            } else if (starts_with("/*")) {
                SourceLoc open{line_, col_};
                comment_lines_[line_] = true;
                advance();
                advance();
                while (pos_ < text_.size() && !starts_with("*/")) {
                    advance();
                    comment_lines_[line_] = true;
                }
                if (pos_ >= text_.size())
                    throw ParseError({{open.line, open.col, "unterminated block comment"}});
                advance();
                advance();
            } else {
                return;
            }
        }
    }

    Tok punct(std::string& text) {
        static const std::pair<std::string_view, Tok> two[] = {
            {"|=", Tok::OrAssign}, {"&=", Tok::AndAssign}, {"<<", Tok::Shl}, {">>", Tok::Shr},
            {"<=", Tok::Le},       {">=", Tok::Ge},        {"==", Tok::EqEq}, {"!=", Tok::NotEq},
            {"&&", Tok::AndAnd},   {"||", Tok::OrOr},
        };
        for (auto [s, k] : two) {
            if (starts_with(s)) {
                text = std::string(s);
                advance();
                advance();
                return k;
            }
        }
        char c = text_[pos_];
        text = std::string(1, c);
        SourceLoc here{line_, col_};
        advance();
        switch (c) {
            case '(': return Tok::LParen;
            case ')': return Tok::RParen;
            case '{': return Tok::LBrace;
            case '}': return Tok::RBrace;
            case ',': return Tok::Comma;
            case ';': return Tok::Semi;
            case '=': return Tok::Assign;
            case '+': return Tok::Plus;
            case '-': return Tok::Minus;
            case '*': return Tok::Star;
            case '/': return Tok::Slash;
            case '%': return Tok::Percent;
            case '<': return Tok::Lt;
            case '>': return Tok::Gt;
            case '!': return Tok::Bang;
            default: break;
        }
        throw ParseError({{here.line, here.col, "unexpected character '" + text + "'"}});
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
    std::vector<bool> code_lines_;
    std::vector<bool> comment_lines_;
};

std::string describe(const Token& t) {
    if (t.kind == Tok::End) return "end of input";
    return "'" + t.text + "'";
}

bool is_type_token(Tok k) {
    return k == Tok::KwInt || k == Tok::KwBool || k == Tok::KwMutex || k == Tok::KwCond ||
           k == Tok::KwThread;
}

Type type_of_token(Tok k) {
    switch (k) {
        case Tok::KwInt: return Type::Int;
        case Tok::KwBool: return Type::Bool;
        case Tok::KwMutex: return Type::Mutex;
        case Tok::KwCond: return Type::Cond;
        default: return Type::Thread;
    }
}

/// Recursive-descent syntax pass. Produces an unresolved tree.
class SyntaxParser {
public:
    explicit SyntaxParser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

    SourceUnit unit() {
        SourceUnit u;
        while (peek().kind != Tok::End) {
            if (peek().kind == Tok::KwFn) {
                u.functions.push_back(function());
            } else if (is_type_token(peek().kind)) {
                u.globals.push_back(global());
            } else {
                fail("expected 'fn' or a global declaration");
            }
        }
        return u;
    }

private:
    const Token& peek(std::size_t ahead = 0) const {
        std::size_t i = std::min(pos_ + ahead, toks_.size() - 1);
        return toks_[i];
    }
    Token take() {
        Token t = peek();
        if (pos_ < toks_.size() - 1) ++pos_;
        return t;
    }
    bool accept(Tok k) {
        if (peek().kind == k) {
            take();
            return true;
        }
        return false;
    }
    [[noreturn]] void fail(const std::string& expected) const {
        const Token& t = peek();
        throw ParseError({{t.loc.line, t.loc.col, expected + ", found " + describe(t)}});
    }
    Token expect(Tok k, const char* what) {
        if (peek().kind != k) fail(std::string("expected ") + what);
        return take();
    }

    GlobalDecl global() {
        GlobalDecl g;
        g.loc = peek().loc;
        g.type = type_of_token(take().kind);
        g.name = expect(Tok::Ident, "identifier").text;
        if (accept(Tok::Assign)) g.init = expr();
        expect(Tok::Semi, "';'");
        return g;
    }

    FunctionDecl function() {
        FunctionDecl f;
        f.loc = peek().loc;
        f.first_line = peek().loc.line;
        take();
        f.name = expect(Tok::Ident, "function name").text;
        expect(Tok::LParen, "'('");
        if (peek().kind != Tok::RParen) {
            for (;;) {
                if (!is_type_token(peek().kind)) fail("expected parameter type or ')'");
                Param p;
                p.type = type_of_token(take().kind);
                p.name = expect(Tok::Ident, "parameter name").text;
                f.params.push_back(p);
                if (!accept(Tok::Comma)) break;
            }
        }
        expect(Tok::RParen, "')'");
        f.last_line = block_into(f.body);
        return f;
    }

    /// Parses `{ stmt* }` and returns the line of the closing brace.
    int block_into(std::vector<Stmt>& out) {
        expect(Tok::LBrace, "'{'");
        while (peek().kind != Tok::RBrace) {
            if (peek().kind == Tok::End) fail("expected '}'");
            out.push_back(statement());
        }
        return take().loc.line;
    }

    Stmt statement() {
        Stmt s;
        s.loc = peek().loc;
        const Tok k = peek().kind;
        if (is_type_token(k)) {
            s.kind = StmtKind::Decl;
            s.decl_type = type_of_token(take().kind);
            s.target = expect(Tok::Ident, "identifier").text;
            if (accept(Tok::Assign)) s.expr = expr();
            expect(Tok::Semi, "';'");
        } else if (k == Tok::KwIf) {
            take();
            s.kind = StmtKind::If;
            expect(Tok::LParen, "'('");
            s.expr = expr();
            expect(Tok::RParen, "')'");
            block_into(s.body);
            if (accept(Tok::KwElse)) {
                s.has_else = true;
                if (peek().kind == Tok::KwIf)
                    s.else_body.push_back(statement());
                else
                    block_into(s.else_body);
            }
        } else if (k == Tok::KwWhile) {
            take();
            s.kind = StmtKind::While;
            expect(Tok::LParen, "'('");
            s.expr = expr();
            expect(Tok::RParen, "')'");
            block_into(s.body);
        } else if (k == Tok::KwDo) {
            take();
            s.kind = StmtKind::DoWhile;
            block_into(s.body);
            expect(Tok::KwWhile, "'while'");
            expect(Tok::LParen, "'('");
            s.expr = expr();
            expect(Tok::RParen, "')'");
            expect(Tok::Semi, "';'");
        } else if (k == Tok::KwReturn) {
            take();
            s.kind = StmtKind::Return;
            if (peek().kind != Tok::Semi) s.expr = expr();
            expect(Tok::Semi, "';'");
        } else if (k == Tok::LBrace) {
            s.kind = StmtKind::Block;
            block_into(s.body);
        } else if (k == Tok::Ident && (peek(1).kind == Tok::Assign || peek(1).kind == Tok::OrAssign ||
                                       peek(1).kind == Tok::AndAssign)) {
            s.kind = StmtKind::Assign;
            s.target = take().text;
            Tok op = take().kind;
            s.assign_op = op == Tok::Assign     ? AssignOp::Set
                          : op == Tok::OrAssign ? AssignOp::OrSet
                                                : AssignOp::AndSet;
            s.expr = expr();
            expect(Tok::Semi, "';'");
        } else if ((k == Tok::Ident && peek(1).kind == Tok::LParen) || k == Tok::KwSpawn) {
            s.kind = StmtKind::Call;
            s.expr = expr();
            expect(Tok::Semi, "';'");
        } else {
            fail("expected a statement");
        }
        return s;
    }

    Expr expr() { return binary(0); }

    struct Level {
        Tok tok;
        Op op;
        int prec;
    };

    static const Level* level_of(Tok k) {
        static const Level levels[] = {
            {Tok::OrOr, Op::Or, 0},   {Tok::AndAnd, Op::And, 1}, {Tok::EqEq, Op::Eq, 2},
            {Tok::NotEq, Op::Ne, 2},  {Tok::Lt, Op::Lt, 3},      {Tok::Le, Op::Le, 3},
            {Tok::Gt, Op::Gt, 3},     {Tok::Ge, Op::Ge, 3},      {Tok::Shl, Op::Shl, 4},
            {Tok::Shr, Op::Shr, 4},   {Tok::Plus, Op::Add, 5},   {Tok::Minus, Op::Sub, 5},
            {Tok::Star, Op::Mul, 6},  {Tok::Slash, Op::Div, 6},  {Tok::Percent, Op::Mod, 6},
        };
        for (const auto& l : levels)
            if (l.tok == k) return &l;
        return nullptr;
    }

    Expr binary(int min_prec) {
        Expr lhs = unary();
        for (;;) {
            const Level* l = level_of(peek().kind);
            if (!l || l->prec < min_prec) return lhs;
            Token optok = take();
            Expr rhs = binary(l->prec + 1);
            Expr e;
            e.kind = ExprKind::Binary;
            e.op = l->op;
            e.loc = optok.loc;
            e.args.push_back(std::move(lhs));
            e.args.push_back(std::move(rhs));
            lhs = std::move(e);
        }
    }

    Expr unary() {
        if (peek().kind == Tok::Bang || peek().kind == Tok::Minus) {
            Token t = take();
            Expr e;
            e.kind = ExprKind::Unary;
            e.op = t.kind == Tok::Bang ? Op::Not : Op::Neg;
            e.loc = t.loc;
            e.args.push_back(unary());
            return e;
        }
        return primary();
    }

    std::vector<Expr> call_args() {
        std::vector<Expr> args;
        expect(Tok::LParen, "'('");
        if (peek().kind != Tok::RParen) {
            for (;;) {
                args.push_back(expr());
                if (!accept(Tok::Comma)) break;
            }
        }
        expect(Tok::RParen, "')'");
        return args;
    }

    Expr primary() {
        Expr e;
        e.loc = peek().loc;
        switch (peek().kind) {
            case Tok::Int:
                e.kind = ExprKind::IntLit;
                e.value = take().value;
                return e;
            case Tok::KwTrue:
            case Tok::KwFalse:
                e.kind = ExprKind::BoolLit;
                e.value = take().kind == Tok::KwTrue ? 1 : 0;
                e.type = Type::Bool;
                return e;
            case Tok::KwSpawn:
                take();
                e.kind = ExprKind::Spawn;
                e.name = expect(Tok::Ident, "function name after 'spawn'").text;
                e.args = call_args();
                return e;
            case Tok::Ident:
                e.name = take().text;
                if (peek().kind == Tok::LParen) {
                    e.kind = ExprKind::Call;
                    e.builtin = builtin_from_name(e.name);
                    e.args = call_args();
                } else {
                    e.kind = ExprKind::Var;
                }
                return e;
            case Tok::LParen: {
                take();
                Expr inner = expr();
                expect(Tok::RParen, "')'");
                return inner;
            }
            default:
                fail("expected an expression");
        }
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

/// Name resolution, type checking, statement numbering and reachability.
class Resolver {
public:
    explicit Resolver(SourceUnit& u) : u_(u) {}

    void run() {
        std::map<std::string, int, std::less<>> seen_globals;
        for (auto& g : u_.globals) {
            if (builtin_from_name(g.name) != Builtin::None || seen_globals.count(g.name)) {
                error(g.loc, "duplicate declaration of '" + g.name + "'");
                continue;
            }
            seen_globals[g.name] = 1;
            if (g.init) {
                const Expr& e = *g.init;
                bool literal = e.kind == ExprKind::IntLit || e.kind == ExprKind::BoolLit ||
                               (e.kind == ExprKind::Unary && e.op == Op::Neg &&
                                e.args[0].kind == ExprKind::IntLit);
                if (!literal) {
                    error(e.loc, "global initializer must be a literal");
                } else {
                    Type t = e.kind == ExprKind::BoolLit ? Type::Bool : Type::Int;
                    if (t != g.type)
                        error(e.loc, "initializer of type " + std::string(type_name(t)) +
                                         " for global '" + g.name + "' of type " +
                                         std::string(type_name(g.type)));
                    if (e.kind == ExprKind::Unary) g.init->args[0].type = Type::Int;
                    g.init->type = t;
                }
            }
        }
        std::map<std::string, int, std::less<>> seen_fns;
        for (auto& f : u_.functions) {
            if (builtin_from_name(f.name) != Builtin::None || seen_fns.count(f.name)) {
                error(f.loc, "duplicate declaration of function '" + f.name + "'");
                continue;
            }
            seen_fns[f.name] = 1;
        }
        for (auto& f : u_.functions) function(f);
        if (!diags_.empty()) throw ParseError(std::move(diags_));
    }

private:
    void error(SourceLoc loc, std::string msg) { diags_.push_back({loc.line, loc.col, std::move(msg)}); }

    struct Local {
        int slot;
        Type type;
    };

    const Local* lookup_local(std::string_view name) const {
        for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
            auto f = it->find(name);
            if (f != it->end()) return &f->second;
        }
        return nullptr;
    }

    bool declare(SourceLoc loc, const std::string& name, Type t) {
        if (lookup_local(name) || u_.global_index(name) >= 0) {
            error(loc, "duplicate declaration of '" + name + "'");
            return false;
        }
        int slot = static_cast<int>(fn_->local_names.size());
        fn_->local_names.push_back(name);
        fn_->local_types.push_back(t);
        scopes_.back()[name] = {slot, t};
        return true;
    }

    void function(FunctionDecl& f) {
        fn_ = &f;
        next_id_ = 1;
        scopes_.clear();
        scopes_.emplace_back();
        for (const auto& p : f.params) declare(f.loc, p.name, p.type);
        block(f.body);
        f.statement_count = next_id_ - 1;
        check_reachability(f.body);
        fn_ = nullptr;
    }

    void block(std::vector<Stmt>& stmts) {
        for (auto& s : stmts) statement(s);
    }

    void scoped_block(std::vector<Stmt>& stmts) {
        scopes_.emplace_back();
        block(stmts);
        scopes_.pop_back();
    }

    void expect_type(const Expr& e, Type want, const char* what) {
        if (e.type != want)
            error(e.loc, std::string(what) + " must be " + std::string(type_name(want)) +
                             ", found " + std::string(type_name(e.type)));
    }

    /// Resolves an expression used as a value. Calls and spawns are only
    /// accepted at the top of an initializer/right-hand side (allow_call).
    void value(Expr& e, bool allow_call) {
        switch (e.kind) {
            case ExprKind::IntLit: e.type = Type::Int; return;
            case ExprKind::BoolLit: e.type = Type::Bool; return;
            case ExprKind::Var: {
                if (const Local* l = lookup_local(e.name)) {
                    e.scope = VarScope::Local;
                    e.slot = l->slot;
                    e.type = l->type;
                } else if (int g = u_.global_index(e.name); g >= 0) {
                    e.scope = VarScope::Global;
                    e.slot = g;
                    e.type = u_.globals[g].type;
                } else {
                    error(e.loc, "unresolved identifier '" + e.name + "'");
                    e.type = Type::Int;
                }
                return;
            }
            case ExprKind::Unary: {
                value(e.args[0], false);
                if (e.op == Op::Not) {
                    expect_type(e.args[0], Type::Bool, "operand of '!'");
                    e.type = Type::Bool;
                } else {
                    expect_type(e.args[0], Type::Int, "operand of unary '-'");
                    e.type = Type::Int;
                }
                return;
            }
            case ExprKind::Binary: {
                value(e.args[0], false);
                value(e.args[1], false);
                const Type a = e.args[0].type;
                const Type b = e.args[1].type;
                const std::string opn = "operand of '" + std::string(op_text(e.op)) + "'";
                if (e.op == Op::And || e.op == Op::Or) {
                    expect_type(e.args[0], Type::Bool, opn.c_str());
                    expect_type(e.args[1], Type::Bool, opn.c_str());
                    e.type = Type::Bool;
                } else if (e.op == Op::Eq || e.op == Op::Ne) {
                    if (!(a == b && (a == Type::Int || a == Type::Bool)))
                        error(e.loc, "operands of '" + std::string(op_text(e.op)) +
                                         "' must both be int or both be bool");
                    e.type = Type::Bool;
                } else {
                    expect_type(e.args[0], Type::Int, opn.c_str());
                    expect_type(e.args[1], Type::Int, opn.c_str());
                    e.type = is_relational(e.op) ? Type::Bool : Type::Int;
                }
                return;
            }
            case ExprKind::Call:
            case ExprKind::Spawn:
                if (!allow_call) {
                    error(e.loc, "call to '" + e.name +
                                     "' must be a statement or a whole right-hand side");
                }
                call(e, true);
                return;
        }
    }

    void user_call_args(Expr& e, const FunctionDecl& callee) {
        if (e.args.size() != callee.params.size()) {
            error(e.loc, "'" + e.name + "' expects " + std::to_string(callee.params.size()) +
                             " argument(s), found " + std::to_string(e.args.size()));
            for (auto& a : e.args) value(a, false);
            return;
        }
        for (std::size_t i = 0; i < e.args.size(); ++i) {
            value(e.args[i], false);
            if (e.args[i].type != callee.params[i].type)
                error(e.args[i].loc, "argument " + std::to_string(i + 1) + " of '" + e.name +
                                         "' must be " + std::string(type_name(callee.params[i].type)));
        }
    }

    void call(Expr& e, bool as_value) {
        if (e.kind == ExprKind::Spawn) {
            e.type = Type::Thread;
            const FunctionDecl* callee = u_.find_function(e.name);
            if (!callee) {
                error(e.loc, "spawn of unknown function '" + e.name + "'");
                for (auto& a : e.args) value(a, false);
                return;
            }
            user_call_args(e, *callee);
            return;
        }
        if (e.builtin != Builtin::None) {
            e.type = Type::Void;
            if (as_value) error(e.loc, "builtin '" + e.name + "' cannot be used as a value");
            builtin_args(e);
            return;
        }
        e.type = Type::Int;
        const FunctionDecl* callee = u_.find_function(e.name);
        if (!callee) {
            error(e.loc, "call to unknown function '" + e.name + "'");
            for (auto& a : e.args) value(a, false);
            return;
        }
        user_call_args(e, *callee);
    }

    void builtin_args(Expr& e) {
        std::vector<Type> want;
        bool variadic_print = false;
        switch (e.builtin) {
            case Builtin::Lock:
            case Builtin::Unlock: want = {Type::Mutex}; break;
            case Builtin::Wait: want = {Type::Cond, Type::Mutex}; break;
            case Builtin::TimedWait: want = {Type::Cond, Type::Mutex, Type::Int}; break;
            case Builtin::Signal:
            case Builtin::Broadcast: want = {Type::Cond}; break;
            case Builtin::Join: want = {Type::Thread}; break;
            case Builtin::Yield: break;
            case Builtin::Assert: want = {Type::Bool}; break;
            case Builtin::Print: variadic_print = true; break;
            case Builtin::None: break;
        }
        for (auto& a : e.args) value(a, false);
        if (variadic_print) {
            if (e.args.empty()) error(e.loc, "'print' expects at least one argument");
            for (auto& a : e.args)
                if (a.type != Type::Int && a.type != Type::Bool)
                    error(a.loc, "'print' arguments must be int or bool");
            return;
        }
        if (e.args.size() != want.size()) {
            error(e.loc, "'" + e.name + "' expects " + std::to_string(want.size()) +
                             " argument(s), found " + std::to_string(e.args.size()));
            return;
        }
        for (std::size_t i = 0; i < want.size(); ++i)
            if (e.args[i].type != want[i])
                error(e.args[i].loc, "argument " + std::to_string(i + 1) + " of '" + e.name +
                                         "' must be " + std::string(type_name(want[i])));
    }

    void rhs(Expr& e, Type target, SourceLoc loc, const std::string& what) {
        value(e, true);
        if (e.type != target)
            error(loc, what + " of type " + std::string(type_name(target)) + " cannot take a " +
                           std::string(type_name(e.type)) + " value");
    }

    void statement(Stmt& s) {
        if (s.kind != StmtKind::Block) s.id = next_id_++;
        switch (s.kind) {
            case StmtKind::Decl:
                if (s.expr) {
                    if (s.decl_type == Type::Mutex || s.decl_type == Type::Cond)
                        error(s.loc, "mutex/cond declarations take no initializer");
                    rhs(*s.expr, s.decl_type, s.loc, "'" + s.target + "'");
                }
                if (declare(s.loc, s.target, s.decl_type)) {
                    const Local* l = lookup_local(s.target);
                    s.target_scope = VarScope::Local;
                    s.target_slot = l->slot;
                    s.target_type = l->type;
                }
                return;
            case StmtKind::Assign: {
                if (const Local* l = lookup_local(s.target)) {
                    s.target_scope = VarScope::Local;
                    s.target_slot = l->slot;
                    s.target_type = l->type;
                } else if (int g = u_.global_index(s.target); g >= 0) {
                    s.target_scope = VarScope::Global;
                    s.target_slot = g;
                    s.target_type = u_.globals[g].type;
                } else {
                    error(s.loc, "unresolved identifier '" + s.target + "'");
                    value(*s.expr, true);
                    return;
                }
                if (s.target_type == Type::Mutex || s.target_type == Type::Cond)
                    error(s.loc, "cannot assign to " + std::string(type_name(s.target_type)) +
                                     " '" + s.target + "'");
                if (s.assign_op != AssignOp::Set && s.target_type != Type::Int)
                    error(s.loc, "'" + std::string(assign_op_text(s.assign_op)) +
                                     "' requires an int target");
                if (s.assign_op != AssignOp::Set && s.expr->kind != ExprKind::Call &&
                    s.expr->kind != ExprKind::Spawn) {
                    value(*s.expr, false);
                    expect_type(*s.expr, Type::Int, "compound assignment operand");
                    return;
                }
                if (s.assign_op != AssignOp::Set) {
                    error(s.expr->loc, "compound assignment cannot take a call");
                    return;
                }
                rhs(*s.expr, s.target_type, s.loc, "'" + s.target + "'");
                return;
            }
            case StmtKind::If:
                value(*s.expr, false);
                expect_type(*s.expr, Type::Bool, "condition");
                scoped_block(s.body);
                scoped_block(s.else_body);
                return;
            case StmtKind::While:
                value(*s.expr, false);
                expect_type(*s.expr, Type::Bool, "condition");
                scoped_block(s.body);
                return;
            case StmtKind::DoWhile:
                scoped_block(s.body);
                value(*s.expr, false);
                expect_type(*s.expr, Type::Bool, "condition");
                return;
            case StmtKind::Return:
                if (s.expr) {
                    value(*s.expr, false);
                    expect_type(*s.expr, Type::Int, "return value");
                }
                return;
            case StmtKind::Call:
                call(*s.expr, false);
                return;
            case StmtKind::Block:
                scoped_block(s.body);
                return;
        }
    }

    /// True when control never falls off the end of the list. Flags any
    /// statement that follows such a point as unreachable.
    bool check_reachability(const std::vector<Stmt>& stmts) {
        bool returned = false;
        for (const auto& s : stmts) {
            if (returned) {
                error(s.loc, "unreachable statement");
                return true;
            }
            switch (s.kind) {
                case StmtKind::Return: returned = true; break;
                case StmtKind::If: {
                    bool a = check_reachability(s.body);
                    bool b = check_reachability(s.else_body);
                    returned = s.has_else && a && b;
                    break;
                }
                case StmtKind::While: check_reachability(s.body); break;
                case StmtKind::DoWhile:
                    if (check_reachability(s.body)) {
                        error(s.loc, "unreachable loop condition");
                        returned = true;
                    }
                    break;
                case StmtKind::Block: returned = check_reachability(s.body); break;
                default: break;
            }
        }
        return returned;
    }

    SourceUnit& u_;
    FunctionDecl* fn_ = nullptr;
    int next_id_ = 1;
    std::vector<std::map<std::string, Local, std::less<>>> scopes_;
    std::vector<Diagnostic> diags_;
};

void count_lines(SourceUnit& u, const std::vector<bool>& code, const std::vector<bool>& comment) {
    for (auto& f : u.functions) {
        int nloc = 0;
        int comments = 0;
        for (int l = f.first_line; l <= f.last_line && l < static_cast<int>(code.size()); ++l) {
            nloc += code[l];
            comments += comment[l];
        }
        // Comment-only lines directly above the header belong to the function.
        for (int l = f.first_line - 1; l >= 1; --l) {
            if (code[l] || !comment[l]) break;
            ++comments;
        }
        f.nloc = nloc;
        f.comment_lines = comments;
    }
}

}  // namespace

SourceUnit parse(std::string_view source_text) {
    Lexer lexer(source_text);
    std::vector<Token> tokens = lexer.run();
    SourceUnit u = SyntaxParser(std::move(tokens)).unit();
    u.source_text = std::string(source_text);
    count_lines(u, lexer.code_lines(), lexer.comment_lines());
    Resolver(u).run();
    for (const auto& f : u.functions)
        if (f.nloc < 1) throw ParseError({{f.loc.line, f.loc.col, "function '" + f.name + "' has no code lines"}});
    return u;
}

SourceUnit parse_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return parse(ss.str());
    } catch (const ParseError& e) {
        std::vector<Diagnostic> diags = e.diagnostics();
        for (auto& d : diags) d.message = path + ": " + d.message;
        throw ParseError(std::move(diags));
    }
}

}  // namespace conpredict::minicc
