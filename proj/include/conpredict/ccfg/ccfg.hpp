#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "conpredict/minicc/ast.hpp"

namespace conpredict::ccfg {

enum class Access { Read, Write };

struct SvAccess {
    std::string var;
    Access access = Access::Read;

    friend bool operator==(const SvAccess&, const SvAccess&) = default;
    friend auto operator<=>(const SvAccess&, const SvAccess&) = default;
};

struct SharedVar {
    std::string name;
    minicc::Type type = minicc::Type::Int;

    friend bool operator==(const SharedVar&, const SharedVar&) = default;
};

/// One shared-variable access at a node, in CFG traversal order.
struct AccessRecord {
    std::string function;
    int node = 0;  // global CCFG node id
    std::string var;
    Access access = Access::Read;

    friend bool operator==(const AccessRecord&, const AccessRecord&) = default;
};

struct SharedVarSet {
    std::vector<SharedVar> entries;
    std::vector<AccessRecord> accesses;

    bool contains(std::string_view name) const;
};

struct Node {
    int id = 0;
    std::string function;
    std::string kind;
    int weight = 1;
    std::vector<SvAccess> sv_accesses;  // sorted, unique

    friend bool operator==(const Node&, const Node&) = default;
};

enum class EdgeKind { Fork, Join, Comm };

std::string_view edge_kind_name(EdgeKind k);

struct CrossEdge {
    int from = 0;
    int to = 0;
    EdgeKind kind = EdgeKind::Fork;
    std::string var;  // comm edges only

    friend bool operator==(const CrossEdge&, const CrossEdge&) = default;
    friend auto operator<=>(const CrossEdge&, const CrossEdge&) = default;
};

struct FunctionInfo {
    std::string name;
    int entry = 0;
    int exit = 0;

    friend bool operator==(const FunctionInfo&, const FunctionInfo&) = default;
};

struct ThreadSite {
    int spawn_node = 0;
    std::string target;

    friend bool operator==(const ThreadSite&, const ThreadSite&) = default;
    friend auto operator<=>(const ThreadSite&, const ThreadSite&) = default;
};

/// Program-wide graph: every function's statement nodes, their local edges,
/// and the fork/join/comm edges between threads.
struct Ccfg {
    std::vector<FunctionInfo> functions;
    std::vector<Node> nodes;  // sorted by id
    std::vector<std::pair<int, int>> local_edges;  // sorted, unique
    std::vector<CrossEdge> cross_edges;  // sorted, unique
    std::vector<SharedVar> shared_vars;
    std::vector<ThreadSite> threads;
    /// Non-fatal findings (e.g. a join on a handle no spawn assigns).
    std::vector<std::string> diagnostics;

    /// Throws InputError for an unknown function.
    const FunctionInfo& function(std::string_view name) const;
    const Node* find_node(int id) const;
    std::vector<int> function_nodes(std::string_view name) const;
    std::vector<std::pair<int, int>> function_edges(std::string_view name) const;
    int count(EdgeKind k) const;

    /// Structural equality ignoring diagnostics.
    bool same_graph(const Ccfg& other) const;
};

/// Global node id of function i's local node 0 (entry).
std::vector<int> function_offsets(const minicc::SourceUnit& u);

SharedVarSet identify_shared(const minicc::SourceUnit& u);

/// Throws InputError when a spawn targets an unknown function.
Ccfg build_ccfg(const minicc::SourceUnit& u);

std::string dump_ccfg(const Ccfg& c);
/// Validates the document; a dangling node reference names the missing id.
Ccfg load_ccfg(std::string_view text);
Ccfg load_ccfg_file(const std::string& path);

}  // namespace conpredict::ccfg
