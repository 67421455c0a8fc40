#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace conpredict::minicc {

enum class Type { Int, Bool, Mutex, Cond, Thread, Void };

std::string_view type_name(Type t);

struct SourceLoc {
    int line = 0;
    int col = 0;
};

enum class Op {
    Add, Sub, Mul, Div, Mod, Shl, Shr,
    Lt, Le, Gt, Ge, Eq, Ne,
    And, Or,
    Not, Neg,
};

std::string_view op_text(Op op);
bool is_arithmetic(Op op);  // + - * / %
bool is_relational(Op op);  // < <= > >= == !=

enum class Builtin {
    None, Lock, Unlock, Wait, TimedWait, Signal, Broadcast, Join, Yield, Print, Assert,
};

std::string_view builtin_name(Builtin b);
Builtin builtin_from_name(std::string_view name);

enum class ExprKind { IntLit, BoolLit, Var, Unary, Binary, Call, Spawn };
enum class VarScope { Global, Local };

struct Expr {
    ExprKind kind = ExprKind::IntLit;
    Op op = Op::Add;
    std::int64_t value = 0;
    /// Variable name, or callee for Call / Spawn.
    std::string name;
    Builtin builtin = Builtin::None;
    /// Filled in by name resolution.
    VarScope scope = VarScope::Local;
    int slot = -1;
    Type type = Type::Int;
    std::vector<Expr> args;
    SourceLoc loc;
};

enum class StmtKind { Decl, Assign, If, While, DoWhile, Return, Call, Block };
enum class AssignOp { Set, OrSet, AndSet };

std::string_view assign_op_text(AssignOp op);

struct Stmt {
    StmtKind kind = StmtKind::Block;
    /// Pre-order index among executable statements, starting at 1. Blocks get 0.
    int id = 0;
    SourceLoc loc;

    // Decl / Assign
    Type decl_type = Type::Int;
    std::string target;
    VarScope target_scope = VarScope::Local;
    int target_slot = -1;
    Type target_type = Type::Int;
    AssignOp assign_op = AssignOp::Set;

    /// Initializer, right-hand side, condition, return value, or call expression.
    std::optional<Expr> expr;

    std::vector<Stmt> body;
    std::vector<Stmt> else_body;
    bool has_else = false;
};

struct GlobalDecl {
    std::string name;
    Type type = Type::Int;
    std::optional<Expr> init;
    SourceLoc loc;
};

struct Param {
    std::string name;
    Type type = Type::Int;
};

struct FunctionDecl {
    std::string name;
    std::vector<Param> params;
    std::vector<Stmt> body;
    SourceLoc loc;

    /// Local slots: parameters first, then declarations in pre-order.
    std::vector<std::string> local_names;
    std::vector<Type> local_types;

    int first_line = 0;
    int last_line = 0;
    int nloc = 0;
    int comment_lines = 0;
    /// Number of executable statements (ids run 1..statement_count).
    int statement_count = 0;
};

struct SourceUnit {
    std::vector<GlobalDecl> globals;
    std::vector<FunctionDecl> functions;
    std::string source_text;

    const FunctionDecl* find_function(std::string_view name) const;
    int function_index(std::string_view name) const;
    int global_index(std::string_view name) const;
};

/// Locates a statement by its pre-order id. Returns nullptr when absent.
const Stmt* find_stmt(const FunctionDecl& f, int id);
Stmt* find_stmt(FunctionDecl& f, int id);

/// Calls fn(stmt, depth) for every statement in pre-order, blocks included.
/// depth counts enclosing if/while/do-while constructs.
template <typename Fn>
void for_each_stmt(const std::vector<Stmt>& stmts, Fn&& fn, int depth = 0) {
    for (const Stmt& s : stmts) {
        fn(s, depth);
        const int inner = (s.kind == StmtKind::Block) ? depth : depth + 1;
        for_each_stmt(s.body, fn, inner);
        for_each_stmt(s.else_body, fn, inner);
    }
}

/// Calls fn(expr) for every expression node reachable from e, pre-order.
template <typename Fn>
void for_each_expr(const Expr& e, Fn&& fn) {
    fn(e);
    for (const Expr& a : e.args) for_each_expr(a, fn);
}

/// Structural equality: ignores source locations, keeps everything else.
bool same_structure(const Expr& a, const Expr& b);
bool same_structure(const Stmt& a, const Stmt& b);
bool same_structure(const SourceUnit& a, const SourceUnit& b);

}  // namespace conpredict::minicc
