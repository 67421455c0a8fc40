#include <sstream>

#include "conpredict/minicc/parser.hpp"

namespace conpredict::minicc {

namespace {

std::string operand(const Expr& e) {
    if (e.kind == ExprKind::Binary || e.kind == ExprKind::Unary) return "(" + print(e) + ")";
    return print(e);
}

std::string args_text(const Expr& e) {
    std::string out = "(";
    for (std::size_t i = 0; i < e.args.size(); ++i) {
        if (i) out += ", ";
        out += print(e.args[i]);
    }
    return out + ")";
}

void print_list(std::ostringstream& out, const std::vector<Stmt>& stmts, int indent) {
    for (const auto& s : stmts) out << print(s, indent);
}

}  // namespace

std::string print(const Expr& e) {
    switch (e.kind) {
        case ExprKind::IntLit: return std::to_string(e.value);
        case ExprKind::BoolLit: return e.value ? "true" : "false";
        case ExprKind::Var: return e.name;
        case ExprKind::Unary: return std::string(op_text(e.op)) + operand(e.args[0]);
        case ExprKind::Binary:
            return operand(e.args[0]) + " " + std::string(op_text(e.op)) + " " + operand(e.args[1]);
        case ExprKind::Call: return e.name + args_text(e);
        case ExprKind::Spawn: return "spawn " + e.name + args_text(e);
    }
    return "";
}

std::string print(const Stmt& s, int indent) {
    const std::string pad(static_cast<std::size_t>(indent) * 4, ' ');
    std::ostringstream out;
    switch (s.kind) {
        case StmtKind::Decl:
            out << pad << type_name(s.decl_type) << ' ' << s.target;
            if (s.expr) out << " = " << print(*s.expr);
            out << ";\n";
            break;
        case StmtKind::Assign:
            out << pad << s.target << ' ' << assign_op_text(s.assign_op) << ' ' << print(*s.expr)
                << ";\n";
            break;
        case StmtKind::If:
            out << pad << "if (" << print(*s.expr) << ") {\n";
            print_list(out, s.body, indent + 1);
            out << pad << '}';
            if (s.has_else) {
                out << " else {\n";
                print_list(out, s.else_body, indent + 1);
                out << pad << '}';
            }
            out << '\n';
            break;
        case StmtKind::While:
            out << pad << "while (" << print(*s.expr) << ") {\n";
            print_list(out, s.body, indent + 1);
            out << pad << "}\n";
            break;
        case StmtKind::DoWhile:
            out << pad << "do {\n";
            print_list(out, s.body, indent + 1);
            out << pad << "} while (" << print(*s.expr) << ");\n";
            break;
        case StmtKind::Return:
            out << pad << "return";
            if (s.expr) out << ' ' << print(*s.expr);
            out << ";\n";
            break;
        case StmtKind::Call:
            out << pad << print(*s.expr) << ";\n";
            break;
        case StmtKind::Block:
            out << pad << "{\n";
            print_list(out, s.body, indent + 1);
            out << pad << "}\n";
            break;
    }
    return out.str();
}

std::string print(const SourceUnit& u) {
    std::ostringstream out;
    for (const auto& g : u.globals) {
        out << type_name(g.type) << ' ' << g.name;
        if (g.init) out << " = " << print(*g.init);
        out << ";\n";
    }
    for (std::size_t i = 0; i < u.functions.size(); ++i) {
        const auto& f = u.functions[i];
        if (i || !u.globals.empty()) out << '\n';
        out << "fn " << f.name << '(';
        for (std::size_t p = 0; p < f.params.size(); ++p) {
            if (p) out << ", ";
            out << type_name(f.params[p].type) << ' ' << f.params[p].name;
        }
        out << ") {\n";
        print_list(out, f.body, 1);
        out << "}\n";
    }
    return out.str();
}

}  // namespace conpredict::minicc
