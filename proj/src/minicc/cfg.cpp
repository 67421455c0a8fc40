#include "conpredict/minicc/cfg.hpp"

#include <algorithm>

namespace conpredict::minicc {

std::vector<int> Cfg::successors(int id) const {
    std::vector<int> out;
    for (auto [a, b] : edges)
        if (a == id) out.push_back(b);
    return out;
}

std::vector<int> Cfg::predecessors(int id) const {
    std::vector<int> out;
    for (auto [a, b] : edges)
        if (b == id) out.push_back(a);
    return out;
}

std::string node_kind(const Stmt& s) {
    switch (s.kind) {
        case StmtKind::Decl:
        case StmtKind::Assign:
            if (s.expr && s.expr->kind == ExprKind::Spawn) return "spawn";
            if (s.expr && s.expr->kind == ExprKind::Call) return "call";
            return s.kind == StmtKind::Decl ? "decl" : "assign";
        case StmtKind::If: return "if";
        case StmtKind::While: return "while";
        case StmtKind::DoWhile: return "do-while";
        case StmtKind::Return: return "return";
        case StmtKind::Call:
            if (s.expr->kind == ExprKind::Spawn) return "spawn";
            if (s.expr->builtin != Builtin::None) return std::string(builtin_name(s.expr->builtin));
            return "call";
        case StmtKind::Block: break;
    }
    return "block";
}

namespace {

class Lowering {
public:
    explicit Lowering(Cfg& cfg) : cfg_(cfg) {}

    /// Wires the list so that it falls through to `next`; returns its first node.
    int list(const std::vector<Stmt>& stmts, int next) {
        int cur = next;
        for (auto it = stmts.rbegin(); it != stmts.rend(); ++it) cur = stmt(*it, cur);
        return cur;
    }

private:
    int stmt(const Stmt& s, int next) {
        if (s.kind == StmtKind::Block) return list(s.body, next);
        CfgNode& n = cfg_.nodes[s.id];
        n.kind = node_kind(s);
        n.line = s.loc.line;
        switch (s.kind) {
            case StmtKind::If:
                n.next = list(s.body, next);
                n.alt = list(s.else_body, next);
                return s.id;
            case StmtKind::While:
                n.next = list(s.body, s.id);
                n.alt = next;
                return s.id;
            case StmtKind::DoWhile:
                cfg_.nodes[s.id].next = list(s.body, s.id);
                cfg_.nodes[s.id].alt = next;
                return s.body.empty() ? s.id : cfg_.nodes[s.id].next;
            case StmtKind::Return:
                n.next = cfg_.exit;
                return s.id;
            default:
                n.next = next;
                return s.id;
        }
    }

    Cfg& cfg_;
};

}  // namespace

Cfg lower_to_cfg(const FunctionDecl& f) {
    Cfg cfg;
    cfg.function = f.name;
    const int n = f.statement_count;
    cfg.nodes.resize(static_cast<std::size_t>(n) + 2);
    for (int i = 0; i < n + 2; ++i) cfg.nodes[i].id = i;
    cfg.entry = 0;
    cfg.exit = n + 1;
    cfg.nodes[0].kind = "entry";
    cfg.nodes[0].line = f.loc.line;
    cfg.nodes[n + 1].kind = "exit";
    cfg.nodes[n + 1].line = f.last_line;
    Lowering lower(cfg);
    cfg.nodes[0].next = lower.list(f.body, cfg.exit);
    for (const auto& node : cfg.nodes) {
        if (node.next >= 0) cfg.edges.emplace_back(node.id, node.next);
        if (node.alt >= 0) cfg.edges.emplace_back(node.id, node.alt);
    }
    std::sort(cfg.edges.begin(), cfg.edges.end());
    cfg.edges.erase(std::unique(cfg.edges.begin(), cfg.edges.end()), cfg.edges.end());
    return cfg;
}

}  // namespace conpredict::minicc
