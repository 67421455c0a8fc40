#include "conpredict/minicc/ast.hpp"

#include <array>

namespace conpredict::minicc {

std::string_view type_name(Type t) {
    switch (t) {
        case Type::Int: return "int";
        case Type::Bool: return "bool";
        case Type::Mutex: return "mutex";
        case Type::Cond: return "cond";
        case Type::Thread: return "thread";
        case Type::Void: return "void";
    }
    return "?";
}

std::string_view op_text(Op op) {
    switch (op) {
        case Op::Add: return "+";
        case Op::Sub: return "-";
        case Op::Mul: return "*";
        case Op::Div: return "/";
        case Op::Mod: return "%";
        case Op::Shl: return "<<";
        case Op::Shr: return ">>";
        case Op::Lt: return "<";
        case Op::Le: return "<=";
        case Op::Gt: return ">";
        case Op::Ge: return ">=";
        case Op::Eq: return "==";
        case Op::Ne: return "!=";
        case Op::And: return "&&";
        case Op::Or: return "||";
        case Op::Not: return "!";
        case Op::Neg: return "-";
    }
    return "?";
}

bool is_arithmetic(Op op) {
    return op == Op::Add || op == Op::Sub || op == Op::Mul || op == Op::Div || op == Op::Mod;
}

bool is_relational(Op op) {
    return op == Op::Lt || op == Op::Le || op == Op::Gt || op == Op::Ge || op == Op::Eq ||
           op == Op::Ne;
}

namespace {
constexpr std::array<std::pair<Builtin, std::string_view>, 10> kBuiltins{{
    {Builtin::Lock, "lock"},
    {Builtin::Unlock, "unlock"},
    {Builtin::Wait, "wait"},
    {Builtin::TimedWait, "timedwait"},
    {Builtin::Signal, "signal"},
    {Builtin::Broadcast, "broadcast"},
    {Builtin::Join, "join"},
    {Builtin::Yield, "yield"},
    {Builtin::Print, "print"},
    {Builtin::Assert, "assert"},
}};
}  // namespace

std::string_view builtin_name(Builtin b) {
    for (auto [k, n] : kBuiltins)
        if (k == b) return n;
    return "";
}

Builtin builtin_from_name(std::string_view name) {
    for (auto [k, n] : kBuiltins)
        if (n == name) return k;
    return Builtin::None;
}

std::string_view assign_op_text(AssignOp op) {
    switch (op) {
        case AssignOp::Set: return "=";
        case AssignOp::OrSet: return "|=";
        case AssignOp::AndSet: return "&=";
    }
    return "=";
}

const FunctionDecl* SourceUnit::find_function(std::string_view name) const {
    for (const auto& f : functions)
        if (f.name == name) return &f;
    return nullptr;
}

int SourceUnit::function_index(std::string_view name) const {
    for (std::size_t i = 0; i < functions.size(); ++i)
        if (functions[i].name == name) return static_cast<int>(i);
    return -1;
}

int SourceUnit::global_index(std::string_view name) const {
    for (std::size_t i = 0; i < globals.size(); ++i)
        if (globals[i].name == name) return static_cast<int>(i);
    return -1;
}

namespace {

template <typename S>
S* find_in(std::vector<S>& stmts, int id) {
    for (auto& s : stmts) {
        if (s.id == id && s.kind != StmtKind::Block) return &s;
        if (auto* r = find_in(s.body, id)) return r;
        if (auto* r = find_in(s.else_body, id)) return r;
    }
    return nullptr;
}

template <typename S>
const S* find_in(const std::vector<S>& stmts, int id) {
    for (const auto& s : stmts) {
        if (s.id == id && s.kind != StmtKind::Block) return &s;
        if (const auto* r = find_in(s.body, id)) return r;
        if (const auto* r = find_in(s.else_body, id)) return r;
    }
    return nullptr;
}

bool same_list(const std::vector<Stmt>& a, const std::vector<Stmt>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!same_structure(a[i], b[i])) return false;
    return true;
}

}  // namespace

const Stmt* find_stmt(const FunctionDecl& f, int id) { return find_in(f.body, id); }
Stmt* find_stmt(FunctionDecl& f, int id) { return find_in(f.body, id); }

bool same_structure(const Expr& a, const Expr& b) {
    if (a.kind != b.kind || a.op != b.op || a.value != b.value || a.name != b.name ||
        a.builtin != b.builtin || a.scope != b.scope || a.slot != b.slot || a.type != b.type ||
        a.args.size() != b.args.size())
        return false;
    for (std::size_t i = 0; i < a.args.size(); ++i)
        if (!same_structure(a.args[i], b.args[i])) return false;
    return true;
}

bool same_structure(const Stmt& a, const Stmt& b) {
    if (a.kind != b.kind || a.id != b.id || a.decl_type != b.decl_type || a.target != b.target ||
        a.target_scope != b.target_scope || a.target_slot != b.target_slot ||
        a.target_type != b.target_type || a.assign_op != b.assign_op ||
        a.has_else != b.has_else || a.expr.has_value() != b.expr.has_value())
        return false;
    if (a.expr && !same_structure(*a.expr, *b.expr)) return false;
    return same_list(a.body, b.body) && same_list(a.else_body, b.else_body);
}

bool same_structure(const SourceUnit& a, const SourceUnit& b) {
    if (a.globals.size() != b.globals.size() || a.functions.size() != b.functions.size())
        return false;
    for (std::size_t i = 0; i < a.globals.size(); ++i) {
        const auto& x = a.globals[i];
        const auto& y = b.globals[i];
        if (x.name != y.name || x.type != y.type || x.init.has_value() != y.init.has_value())
            return false;
        if (x.init && !same_structure(*x.init, *y.init)) return false;
    }
    for (std::size_t i = 0; i < a.functions.size(); ++i) {
        const auto& f = a.functions[i];
        const auto& g = b.functions[i];
        if (f.name != g.name || f.params.size() != g.params.size() ||
            f.local_names != g.local_names || f.local_types != g.local_types ||
            f.statement_count != g.statement_count)
            return false;
        for (std::size_t p = 0; p < f.params.size(); ++p)
            if (f.params[p].name != g.params[p].name || f.params[p].type != g.params[p].type)
                return false;
        if (!same_list(f.body, g.body)) return false;
    }
    return true;
}

}  // namespace conpredict::minicc
