#pragma once

#include <optional>
#include <set>
#include <string_view>
#include <vector>

#include "conpredict/ccfg/ccfg.hpp"

namespace conpredict::metrics {

struct ConMetricRecord {
    int SPC = 0;
    int SVC = 0;
    int CSC = 0;
    int CEC = 0;
    int CCC = 0;
    double SVD = 0.0;
    /// No concurrency-relevant node: CCC falls back to the empty pruned graph.
    bool ccc_degenerate = false;
    /// SVD segment enumeration hit its cap.
    bool svd_estimate = false;
};

inline constexpr std::size_t kSegmentCap = 10000;

/// lock, unlock, wait, timedwait, signal, broadcast.
bool is_sync_kind(std::string_view kind);
/// A node with a shared-variable access or any synchronizing call (the sync
/// kinds plus join and yield).
bool is_relevant(const ccfg::Node& n);

int spc(const ccfg::Ccfg& c, std::string_view f);
int svc(const ccfg::Ccfg& c, std::string_view f);
int csc(const ccfg::Ccfg& c, std::string_view f);
int cec(const ccfg::Ccfg& c, std::string_view f);

struct PrunedGraph {
    std::vector<int> nodes;
    std::vector<std::pair<int, int>> edges;
    bool degenerate = false;
};

/// Removes concurrency-irrelevant nodes of f and bridges around them.
PrunedGraph prune(const ccfg::Ccfg& c, std::string_view f);
int ccc(const ccfg::Ccfg& c, std::string_view f, bool* degenerate = nullptr);

/// All access-to-access segment distances of f. node_weight, when given,
/// replaces every node's own weight.
std::vector<double> svd_segments(const ccfg::Ccfg& c, std::string_view f,
                                 std::optional<int> node_weight = std::nullopt,
                                 bool* estimate = nullptr);
double trimmed_mean(std::vector<double> values, double fraction = 0.1);
double svd(const ccfg::Ccfg& c, std::string_view f, std::optional<int> node_weight = std::nullopt,
           bool* estimate = nullptr);

ConMetricRecord concurrency_metrics(const ccfg::Ccfg& c, std::string_view f,
                                    std::optional<int> node_weight = std::nullopt);

/// Branch regions of f, exposed for testing. region(b) is b plus every node
/// reachable from b's successors without passing b or its immediate
/// postdominator.
struct BranchRegion {
    int branch = 0;
    int ipdom = -1;  // -1: the virtual sink
    std::set<int> region;
    std::vector<std::set<int>> arms;
    std::set<int> own;
};
std::vector<BranchRegion> branch_regions(const ccfg::Ccfg& c, std::string_view f);

}  // namespace conpredict::metrics
