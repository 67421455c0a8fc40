#include "conpredict/ccfg/ccfg.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>

#include "conpredict/common/error.hpp"
#include "conpredict/minicc/cfg.hpp"

namespace conpredict::ccfg {

using minicc::Expr;
using minicc::ExprKind;
using minicc::FunctionDecl;
using minicc::SourceUnit;
using minicc::Stmt;
using minicc::StmtKind;
using minicc::Type;
using minicc::VarScope;

std::string_view edge_kind_name(EdgeKind k) {
    switch (k) {
        case EdgeKind::Fork: return "fork";
        case EdgeKind::Join: return "join";
        case EdgeKind::Comm: return "comm";
    }
    return "?";
}

bool SharedVarSet::contains(std::string_view name) const {
    return std::any_of(entries.begin(), entries.end(), [&](const SharedVar& v) { return v.name == name; });
}

const FunctionInfo& Ccfg::function(std::string_view name) const {
    for (const auto& f : functions)
        if (f.name == name) return f;
    throw InputError("unknown function '" + std::string(name) + "'");
}

const Node* Ccfg::find_node(int id) const {
    auto it = std::lower_bound(nodes.begin(), nodes.end(), id,
                               [](const Node& n, int v) { return n.id < v; });
    return (it != nodes.end() && it->id == id) ? &*it : nullptr;
}

std::vector<int> Ccfg::function_nodes(std::string_view name) const {
    function(name);
    std::vector<int> out;
    for (const auto& n : nodes)
        if (n.function == name) out.push_back(n.id);
    return out;
}

std::vector<std::pair<int, int>> Ccfg::function_edges(std::string_view name) const {
    std::vector<std::pair<int, int>> out;
    for (auto e : local_edges) {
        const Node* a = find_node(e.first);
        if (a && a->function == name) out.push_back(e);
    }
    return out;
}

int Ccfg::count(EdgeKind k) const {
    return static_cast<int>(std::count_if(cross_edges.begin(), cross_edges.end(),
                                          [k](const CrossEdge& e) { return e.kind == k; }));
}

bool Ccfg::same_graph(const Ccfg& o) const {
    return functions == o.functions && nodes == o.nodes && local_edges == o.local_edges &&
           cross_edges == o.cross_edges && shared_vars == o.shared_vars && threads == o.threads;
}

std::vector<int> function_offsets(const SourceUnit& u) {
    std::vector<int> out;
    int next = 0;
    for (const auto& f : u.functions) {
        out.push_back(next);
        next += f.statement_count + 2;
    }
    return out;
}

namespace {

bool is_data_type(Type t) { return t == Type::Int || t == Type::Bool; }

/// Global int/bool accesses made by the statement's own node (not its body).
std::vector<SvAccess> node_accesses(const SourceUnit& u, const Stmt& s) {
    std::set<SvAccess> out;
    if (s.expr) {
        minicc::for_each_expr(*s.expr, [&](const Expr& e) {
            if (e.kind == ExprKind::Var && e.scope == VarScope::Global && is_data_type(e.type))
                out.insert({e.name, Access::Read});
        });
    }
    if (s.kind == StmtKind::Assign && s.target_scope == VarScope::Global &&
        is_data_type(u.globals[s.target_slot].type)) {
        out.insert({s.target, Access::Write});
        if (s.assign_op != minicc::AssignOp::Set) out.insert({s.target, Access::Read});
    }
    return {out.begin(), out.end()};
}

const Expr* spawn_expr(const Stmt& s) {
    if (s.kind == StmtKind::Block || !s.expr) return nullptr;
    return s.expr->kind == ExprKind::Spawn ? &*s.expr : nullptr;
}

std::set<std::string> direct_callees(const FunctionDecl& f, bool include_spawn) {
    std::set<std::string> out;
    minicc::for_each_stmt(f.body, [&](const Stmt& s, int) {
        if (!s.expr) return;
        minicc::for_each_expr(*s.expr, [&](const Expr& e) {
            if ((e.kind == ExprKind::Call && e.builtin == minicc::Builtin::None) ||
                (include_spawn && e.kind == ExprKind::Spawn))
                out.insert(e.name);
        });
    });
    return out;
}

std::set<std::string> reachable_functions(const SourceUnit& u) {
    std::set<std::string> seen;
    std::vector<std::string> work;
    if (u.find_function("main")) {
        work.push_back("main");
    } else {
        for (const auto& f : u.functions) work.push_back(f.name);
    }
    while (!work.empty()) {
        std::string name = work.back();
        work.pop_back();
        if (!seen.insert(name).second) continue;
        if (const FunctionDecl* f = u.find_function(name))
            for (const auto& c : direct_callees(*f, true)) work.push_back(c);
    }
    return seen;
}

}  // namespace

SharedVarSet identify_shared(const SourceUnit& u) {
    SharedVarSet set;
    const std::set<std::string> reachable = reachable_functions(u);
    std::set<std::string> referenced;
    for (const auto& f : u.functions) {
        if (!reachable.count(f.name)) continue;
        minicc::for_each_stmt(f.body, [&](const Stmt& s, int) {
            for (const auto& a : node_accesses(u, s)) referenced.insert(a.var);
        });
    }
    for (const auto& g : u.globals)
        if (is_data_type(g.type) && referenced.count(g.name)) set.entries.push_back({g.name, g.type});

    const std::vector<int> offsets = function_offsets(u);
    for (std::size_t i = 0; i < u.functions.size(); ++i) {
        const FunctionDecl& f = u.functions[i];
        for (int id = 1; id <= f.statement_count; ++id) {
            for (const auto& a : node_accesses(u, *minicc::find_stmt(f, id)))
                if (set.contains(a.var)) set.accesses.push_back({f.name, offsets[i] + id, a.var, a.access});
        }
    }
    return set;
}

Ccfg build_ccfg(const SourceUnit& u) {
    Ccfg c;
    const SharedVarSet shared = identify_shared(u);
    c.shared_vars = shared.entries;
    const std::vector<int> offsets = function_offsets(u);

    for (std::size_t i = 0; i < u.functions.size(); ++i) {
        const FunctionDecl& f = u.functions[i];
        const minicc::Cfg cfg = minicc::lower_to_cfg(f);
        const int off = offsets[i];
        c.functions.push_back({f.name, off + cfg.entry, off + cfg.exit});
        for (const auto& n : cfg.nodes) {
            Node node{off + n.id, f.name, n.kind, n.weight, {}};
            if (n.id != cfg.entry && n.id != cfg.exit) {
                for (const auto& a : node_accesses(u, *minicc::find_stmt(f, n.id)))
                    if (shared.contains(a.var)) node.sv_accesses.push_back(a);
            }
            c.nodes.push_back(std::move(node));
        }
        for (auto [a, b] : cfg.edges) c.local_edges.emplace_back(off + a, off + b);
    }

    // Spawn sites, their handle variables, and fork edges.
    struct Handle {
        int function;
        VarScope scope;
        int slot;
    };
    std::vector<std::pair<ThreadSite, std::optional<Handle>>> sites;
    for (std::size_t i = 0; i < u.functions.size(); ++i) {
        const FunctionDecl& f = u.functions[i];
        for (int id = 1; id <= f.statement_count; ++id) {
            const Stmt& s = *minicc::find_stmt(f, id);
            const Expr* sp = spawn_expr(s);
            if (!sp) continue;
            const int target = u.function_index(sp->name);
            if (target < 0) throw InputError("spawn of unknown function '" + sp->name + "'");
            ThreadSite site{offsets[i] + id, sp->name};
            std::optional<Handle> handle;
            if (s.kind != StmtKind::Call)
                handle = Handle{static_cast<int>(i), s.target_scope, s.target_slot};
            sites.emplace_back(site, handle);
            c.threads.push_back(site);
            c.cross_edges.push_back({site.spawn_node, c.functions[target].entry, EdgeKind::Fork, ""});
        }
    }

    // Join edges from the spawned function's exit to each join on the handle.
    for (std::size_t i = 0; i < u.functions.size(); ++i) {
        const FunctionDecl& f = u.functions[i];
        for (int id = 1; id <= f.statement_count; ++id) {
            const Stmt& s = *minicc::find_stmt(f, id);
            if (s.kind != StmtKind::Call || s.expr->builtin != minicc::Builtin::Join) continue;
            const Expr& h = s.expr->args[0];
            bool matched = false;
            for (const auto& [site, handle] : sites) {
                if (!handle || handle->scope != h.scope || handle->slot != h.slot) continue;
                if (h.scope == VarScope::Local && handle->function != static_cast<int>(i)) continue;
                const int target = u.function_index(site.target);
                c.cross_edges.push_back({c.functions[target].exit, offsets[i] + id, EdgeKind::Join, ""});
                matched = true;
            }
            if (!matched)
                c.diagnostics.push_back(f.name + ":" + std::to_string(s.loc.line) +
                                        ": join of never-spawned thread handle '" + h.name + "'");
        }
    }

    // Thread contexts: main is one context, each spawn site another; calls
    // inherit the caller's contexts.
    constexpr int kMainContext = -1;
    std::vector<std::set<int>> ctx(u.functions.size());
    if (int m = u.function_index("main"); m >= 0) ctx[m].insert(kMainContext);
    for (const auto& [site, handle] : sites) ctx[u.function_index(site.target)].insert(site.spawn_node);
    std::vector<std::set<std::string>> calls;
    for (const auto& f : u.functions) calls.push_back(direct_callees(f, false));
    for (bool changed = true; changed;) {
        changed = false;
        for (std::size_t i = 0; i < u.functions.size(); ++i) {
            for (const auto& callee : calls[i]) {
                auto& dst = ctx[u.function_index(callee)];
                const std::size_t before = dst.size();
                dst.insert(ctx[i].begin(), ctx[i].end());
                changed |= dst.size() != before;
            }
        }
    }
    auto cross_context = [&](const std::string& fa, const std::string& fb) {
        const auto& a = ctx[u.function_index(fa)];
        const auto& b = ctx[u.function_index(fb)];
        if (a.empty() || b.empty()) return false;
        return a.size() > 1 || b.size() > 1 || *a.begin() != *b.begin();
    };
    for (const auto& w : shared.accesses) {
        if (w.access != Access::Write) continue;
        for (const auto& r : shared.accesses) {
            if (r.access != Access::Read || r.var != w.var) continue;
            if (cross_context(w.function, r.function))
                c.cross_edges.push_back({w.node, r.node, EdgeKind::Comm, w.var});
        }
    }

    std::sort(c.local_edges.begin(), c.local_edges.end());
    c.local_edges.erase(std::unique(c.local_edges.begin(), c.local_edges.end()), c.local_edges.end());
    std::sort(c.cross_edges.begin(), c.cross_edges.end());
    c.cross_edges.erase(std::unique(c.cross_edges.begin(), c.cross_edges.end()), c.cross_edges.end());
    std::sort(c.threads.begin(), c.threads.end());
    return c;
}

}  // namespace conpredict::ccfg
