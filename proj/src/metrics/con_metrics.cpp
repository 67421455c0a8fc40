#include "conpredict/metrics/con_metrics.hpp"

#include <algorithm>
#include <map>

#include "conpredict/common/error.hpp"

namespace conpredict::metrics {

using ccfg::Ccfg;
using ccfg::Node;

bool is_sync_kind(std::string_view kind) {
    return kind == "lock" || kind == "unlock" || kind == "wait" || kind == "timedwait" ||
           kind == "signal" || kind == "broadcast";
}

bool is_relevant(const Node& n) {
    return !n.sv_accesses.empty() || is_sync_kind(n.kind) || n.kind == "join" || n.kind == "yield";
}

namespace {

/// Local view of one function: dense indices, adjacency, entry/exit.
struct LocalGraph {
    std::vector<int> ids;
    std::map<int, int> index;
    std::vector<std::vector<int>> succ;
    std::vector<std::vector<int>> pred;
    int entry = 0;
    int exit = 0;

    LocalGraph(const Ccfg& c, std::string_view f) {
        const auto& info = c.function(f);
        ids = c.function_nodes(f);
        for (std::size_t i = 0; i < ids.size(); ++i) index[ids[i]] = static_cast<int>(i);
        succ.resize(ids.size());
        pred.resize(ids.size());
        for (auto [a, b] : c.function_edges(f)) {
            int x = index.at(a);
            int y = index.at(b);
            if (std::find(succ[x].begin(), succ[x].end(), y) == succ[x].end()) {
                succ[x].push_back(y);
                pred[y].push_back(x);
            }
        }
        entry = index.at(info.entry);
        exit = index.at(info.exit);
    }

    std::size_t size() const { return ids.size(); }
};

/// Immediate postdominators with a virtual sink (index n) fed by the exit and
/// every node without successors. Nodes that cannot reach the sink get the sink.
std::vector<int> immediate_postdominators(const LocalGraph& g) {
    const std::size_t n = g.size();
    const std::size_t sink = n;
    std::vector<std::vector<int>> succ = g.succ;
    succ.resize(n + 1);
    for (std::size_t v = 0; v < n; ++v)
        if (static_cast<int>(v) == g.exit || succ[v].empty()) succ[v].push_back(static_cast<int>(sink));

    // Nodes that reach the sink.
    std::vector<std::vector<int>> pred(n + 1);
    for (std::size_t v = 0; v <= n; ++v)
        for (int w : succ[v]) pred[w].push_back(static_cast<int>(v));
    std::vector<bool> reaches(n + 1, false);
    std::vector<int> work{static_cast<int>(sink)};
    reaches[sink] = true;
    while (!work.empty()) {
        int v = work.back();
        work.pop_back();
        for (int p : pred[v])
            if (!reaches[p]) {
                reaches[p] = true;
                work.push_back(p);
            }
    }

    std::vector<std::vector<bool>> pdom(n + 1, std::vector<bool>(n + 1, true));
    pdom[sink].assign(n + 1, false);
    pdom[sink][sink] = true;
    for (bool changed = true; changed;) {
        changed = false;
        for (std::size_t v = 0; v < n; ++v) {
            if (!reaches[v]) continue;
            std::vector<bool> next(n + 1, true);
            for (int w : succ[v]) {
                if (!reaches[w]) continue;
                for (std::size_t k = 0; k <= n; ++k) next[k] = next[k] && pdom[w][k];
            }
            next[v] = true;
            if (next != pdom[v]) {
                pdom[v] = std::move(next);
                changed = true;
            }
        }
    }
    std::vector<int> ipdom(n, -1);
    for (std::size_t v = 0; v < n; ++v) {
        if (!reaches[v]) continue;
        std::size_t strict = 0;
        for (std::size_t k = 0; k <= n; ++k) strict += (pdom[v][k] && k != v);
        for (std::size_t d = 0; d <= n; ++d) {
            if (d == v || !pdom[v][d]) continue;
            std::size_t size = static_cast<std::size_t>(std::count(pdom[d].begin(), pdom[d].end(), true));
            if (size == strict) {
                ipdom[v] = d == sink ? -1 : static_cast<int>(d);
                break;
            }
        }
    }
    return ipdom;
}

std::set<int> reach_avoiding(const LocalGraph& g, int from, int b, int stop) {
    std::set<int> seen;
    if (from == stop || from == b) return seen;
    std::vector<int> work{from};
    seen.insert(from);
    while (!work.empty()) {
        int v = work.back();
        work.pop_back();
        for (int w : g.succ[v])
            if (w != stop && w != b && seen.insert(w).second) work.push_back(w);
    }
    return seen;
}

/// Regions in local indices.
std::vector<BranchRegion> local_regions(const LocalGraph& g) {
    const std::vector<int> ipdom = immediate_postdominators(g);
    std::vector<BranchRegion> out;
    for (std::size_t b = 0; b < g.size(); ++b) {
        if (g.succ[b].size() < 2) continue;
        BranchRegion r;
        r.branch = static_cast<int>(b);
        r.ipdom = ipdom[b];
        r.region.insert(r.branch);
        for (int s : g.succ[b]) {
            std::set<int> arm = reach_avoiding(g, s, r.branch, r.ipdom);
            r.region.insert(arm.begin(), arm.end());
            r.arms.push_back(std::move(arm));
        }
        out.push_back(std::move(r));
    }
    for (auto& r : out) {
        r.own = r.region;
        for (const auto& other : out)
            if (other.branch != r.branch && r.region.count(other.branch))
                for (int v : other.region) r.own.erase(v);
    }
    return out;
}

std::set<int> to_global(const LocalGraph& g, const std::set<int>& s) {
    std::set<int> out;
    for (int v : s) out.insert(g.ids[v]);
    return out;
}

std::vector<const Node*> nodes_of(const Ccfg& c, std::string_view f) {
    std::vector<const Node*> out;
    for (int id : c.function_nodes(f)) out.push_back(c.find_node(id));
    return out;
}

}  // namespace

std::vector<BranchRegion> branch_regions(const Ccfg& c, std::string_view f) {
    LocalGraph g(c, f);
    std::vector<BranchRegion> out = local_regions(g);
    for (auto& r : out) {
        r.branch = g.ids[r.branch];
        r.ipdom = r.ipdom < 0 ? -1 : g.ids[r.ipdom];
        r.region = to_global(g, r.region);
        for (auto& a : r.arms) a = to_global(g, a);
        r.own = to_global(g, r.own);
    }
    return out;
}

int spc(const Ccfg& c, std::string_view f) {
    int n = 0;
    for (const Node* node : nodes_of(c, f)) n += is_sync_kind(node->kind);
    return n;
}

int svc(const Ccfg& c, std::string_view f) {
    int n = 0;
    for (const Node* node : nodes_of(c, f)) n += !node->sv_accesses.empty();
    return n;
}

int csc(const Ccfg& c, std::string_view f) {
    int n = 0;
    for (const auto& r : branch_regions(c, f)) {
        bool relevant = std::any_of(r.own.begin(), r.own.end(),
                                    [&](int id) { return is_relevant(*c.find_node(id)); });
        n += relevant;
    }
    return n;
}

int cec(const Ccfg& c, std::string_view f) {
    c.function(f);
    int n = 0;
    for (const auto& e : c.cross_edges) {
        const Node* a = c.find_node(e.from);
        const Node* b = c.find_node(e.to);
        n += (a->function == f || b->function == f);
    }
    return n;
}

PrunedGraph prune(const Ccfg& c, std::string_view f) {
    LocalGraph g(c, f);
    PrunedGraph out;
    std::vector<bool> relevant(g.size());
    bool any = false;
    for (std::size_t v = 0; v < g.size(); ++v) {
        relevant[v] = is_relevant(*c.find_node(g.ids[v]));
        any = any || relevant[v];
    }
    if (!any) {
        out.degenerate = true;
        return out;
    }
    auto has_relevant = [&](const std::set<int>& s) {
        return std::any_of(s.begin(), s.end(), [&](int v) { return relevant[v]; });
    };
    std::vector<bool> removed(g.size(), false);
    for (const auto& r : local_regions(g)) {
        if (!has_relevant(r.region)) {
            for (int v : r.region) removed[v] = true;
            continue;
        }
        for (const auto& arm : r.arms)
            if (!has_relevant(arm))
                for (int v : arm) removed[v] = true;
    }
    for (std::size_t v = 0; v < g.size(); ++v)
        if (relevant[v] || static_cast<int>(v) == g.entry || static_cast<int>(v) == g.exit) removed[v] = false;

    std::vector<std::set<int>> succ(g.size());
    std::vector<std::set<int>> pred(g.size());
    for (std::size_t v = 0; v < g.size(); ++v)
        for (int w : g.succ[v]) {
            succ[v].insert(w);
            pred[w].insert(static_cast<int>(v));
        }
    // g.ids is ascending, so local index order is id order.
    for (std::size_t x = 0; x < g.size(); ++x) {
        if (!removed[x]) continue;
        const int xi = static_cast<int>(x);
        for (int p : pred[x]) {
            if (p == xi) continue;
            for (int s : succ[x]) {
                if (s == xi) continue;
                succ[p].insert(s);
                pred[s].insert(p);
            }
        }
        for (int p : pred[x]) succ[p].erase(xi);
        for (int s : succ[x]) pred[s].erase(xi);
        succ[x].clear();
        pred[x].clear();
    }
    for (std::size_t v = 0; v < g.size(); ++v) {
        if (removed[v]) continue;
        out.nodes.push_back(g.ids[v]);
        for (int w : succ[v]) out.edges.emplace_back(g.ids[v], g.ids[w]);
    }
    std::sort(out.edges.begin(), out.edges.end());
    return out;
}

int ccc(const Ccfg& c, std::string_view f, bool* degenerate) {
    const PrunedGraph p = prune(c, f);
    if (degenerate) *degenerate = p.degenerate;
    const int e = static_cast<int>(p.edges.size()) + cec(c, f);
    const int n = static_cast<int>(p.nodes.size());
    return e - n + 2;
}

std::vector<double> svd_segments(const Ccfg& c, std::string_view f, std::optional<int> node_weight,
                                 bool* estimate) {
    LocalGraph g(c, f);
    if (node_weight && *node_weight < 1) throw InputError("node weight must be positive");
    std::vector<double> weight(g.size());
    std::map<std::string, std::vector<bool>> touches;
    for (std::size_t v = 0; v < g.size(); ++v) {
        const Node& n = *c.find_node(g.ids[v]);
        weight[v] = node_weight ? *node_weight : n.weight;
        for (const auto& a : n.sv_accesses) {
            auto& t = touches[a.var];
            t.resize(g.size(), false);
            t[v] = true;
        }
    }
    bool capped = false;
    std::vector<double> segments;
    for (const auto& [var, touch] : touches) {
        for (std::size_t a = 0; a < g.size(); ++a) {
            if (!touch[a]) continue;
            // Node-simple DFS from a; interior nodes do not touch var.
            std::map<int, std::size_t> per_target;
            std::vector<bool> on_path(g.size(), false);
            std::vector<std::pair<int, std::size_t>> stack{{static_cast<int>(a), 0}};
            on_path[a] = true;
            double dist = weight[a];
            std::size_t steps = 0;
            while (!stack.empty()) {
                if (++steps > kSegmentCap * 100) {
                    capped = true;
                    break;
                }
                auto& [v, i] = stack.back();
                if (i >= g.succ[v].size()) {
                    on_path[v] = false;
                    dist -= weight[v];
                    stack.pop_back();
                    continue;
                }
                const int w = g.succ[v][i++];
                if (on_path[w]) continue;
                if (touch[w]) {
                    std::size_t& k = per_target[w];
                    if (k < kSegmentCap) {
                        ++k;
                        segments.push_back(dist + weight[w]);
                    } else {
                        capped = true;
                    }
                    continue;
                }
                on_path[w] = true;
                dist += weight[w];
                stack.emplace_back(w, 0);
            }
        }
    }
    if (estimate) *estimate = capped;
    return segments;
}

double trimmed_mean(std::vector<double> values, double fraction) {
    if (values.empty()) return 0.0;
    std::sort(values.begin(), values.end());
    const std::size_t t = static_cast<std::size_t>(fraction * static_cast<double>(values.size()) + 1e-9);
    double sum = 0.0;
    for (std::size_t i = t; i < values.size() - t; ++i) sum += values[i];
    return sum / static_cast<double>(values.size() - 2 * t);
}

double svd(const Ccfg& c, std::string_view f, std::optional<int> node_weight, bool* estimate) {
    return trimmed_mean(svd_segments(c, f, node_weight, estimate));
}

ConMetricRecord concurrency_metrics(const Ccfg& c, std::string_view f, std::optional<int> node_weight) {
    ConMetricRecord r;
    r.SPC = spc(c, f);
    r.SVC = svc(c, f);
    r.CSC = csc(c, f);
    r.CEC = cec(c, f);
    r.CCC = ccc(c, f, &r.ccc_degenerate);
    r.SVD = svd(c, f, node_weight, &r.svd_estimate);
    return r;
}

}  // namespace conpredict::metrics
