#include "conpredict/metrics/seq_metrics.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

#include "conpredict/common/error.hpp"

namespace conpredict::metrics {

using minicc::Cfg;
using minicc::ExprKind;
using minicc::FunctionDecl;
using minicc::SourceUnit;
using minicc::Stmt;
using minicc::StmtKind;

namespace {

std::set<std::string> callees(const FunctionDecl& f) {
    std::set<std::string> out;
    minicc::for_each_stmt(f.body, [&](const Stmt& s, int) {
        if (!s.expr) return;
        minicc::for_each_expr(*s.expr, [&](const minicc::Expr& e) {
            if (e.kind == ExprKind::Spawn ||
                (e.kind == ExprKind::Call && e.builtin == minicc::Builtin::None))
                out.insert(e.name);
        });
    });
    return out;
}

std::int64_t sat_add(std::int64_t a, std::int64_t b) { return std::min(kPathCap, a + b); }

}  // namespace

std::int64_t count_paths(const Cfg& cfg, bool* saturated) {
    const int n = static_cast<int>(cfg.nodes.size());
    std::vector<std::vector<int>> succ(n);
    for (auto [a, b] : cfg.edges) succ[a].push_back(b);

    // Classify back edges with an iterative DFS from entry.
    std::map<std::pair<int, int>, int> back_index;
    std::vector<int> state(n, 0);  // 0 new, 1 on stack, 2 done
    std::vector<std::pair<int, std::size_t>> stack{{cfg.entry, 0}};
    state[cfg.entry] = 1;
    while (!stack.empty()) {
        auto& [v, i] = stack.back();
        if (i < succ[v].size()) {
            int w = succ[v][i++];
            if (state[w] == 1) {
                back_index.emplace(std::pair{v, w}, static_cast<int>(back_index.size()));
            } else if (state[w] == 0) {
                state[w] = 1;
                stack.emplace_back(w, 0);
            }
        } else {
            state[v] = 2;
            stack.pop_back();
        }
    }

    const std::size_t words = (back_index.size() + 63) / 64;
    using Mask = std::vector<std::uint64_t>;

    // A back edge only matters while its source is still reachable; masking
    // the others out keeps sequential loops from multiplying the state space.
    std::vector<Mask> live(n, Mask(words, 0));
    for (int v = 0; v < n; ++v) {
        std::vector<bool> seen(n, false);
        std::vector<int> work{v};
        seen[v] = true;
        while (!work.empty()) {
            int x = work.back();
            work.pop_back();
            for (int y : succ[x]) {
                if (auto b = back_index.find({x, y}); b != back_index.end())
                    live[v][b->second / 64] |= std::uint64_t{1} << (b->second % 64);
                if (!seen[y]) {
                    seen[y] = true;
                    work.push_back(y);
                }
            }
        }
    }
    std::map<std::pair<int, Mask>, std::int64_t> memo;
    std::function<std::int64_t(int, const Mask&)> paths = [&](int v, const Mask& used) -> std::int64_t {
        if (v == cfg.exit) return 1;
        Mask relevant = used;
        for (std::size_t k = 0; k < words; ++k) relevant[k] &= live[v][k];
        auto key = std::pair{v, relevant};
        if (auto it = memo.find(key); it != memo.end()) return it->second;
        std::int64_t total = 0;
        for (int w : succ[v]) {
            auto b = back_index.find({v, w});
            if (b == back_index.end()) {
                total = sat_add(total, paths(w, used));
                continue;
            }
            const std::size_t word = static_cast<std::size_t>(b->second) / 64;
            const std::uint64_t bit = std::uint64_t{1} << (b->second % 64);
            if (used[word] & bit) continue;
            Mask next = used;
            next[word] |= bit;
            total = sat_add(total, paths(w, next));
        }
        memo.emplace(std::move(key), total);
        return total;
    };
    const std::int64_t result = paths(cfg.entry, Mask(words, 0));
    if (saturated) *saturated = result >= kPathCap;
    return result;
}

SeqMetricRecord sequential_metrics(const SourceUnit& u, std::string_view function) {
    const FunctionDecl* f = u.find_function(function);
    if (!f) throw InputError("unknown function '" + std::string(function) + "'");
    SeqMetricRecord r;
    for (const auto& g : u.functions)
        if (callees(g).count(f->name)) ++r.CN;
    r.CM = static_cast<int>(callees(*f).size());
    minicc::for_each_stmt(f->body, [&](const Stmt& s, int depth) {
        if (s.kind == StmtKind::Decl) ++r.CL;
        if (s.kind == StmtKind::If || s.kind == StmtKind::While || s.kind == StmtKind::DoWhile)
            r.MN = std::max(r.MN, depth + 1);
    });
    r.CPA = static_cast<int>(f->params.size());
    r.CTC = static_cast<double>(f->comment_lines) / static_cast<double>(f->nloc);
    const Cfg cfg = minicc::lower_to_cfg(*f);
    r.CP = count_paths(cfg, &r.cp_saturated);
    r.CC = static_cast<int>(cfg.edges.size()) - static_cast<int>(cfg.nodes.size()) + 2;
    r.ES = f->statement_count;
    return r;
}

}  // namespace conpredict::metrics
