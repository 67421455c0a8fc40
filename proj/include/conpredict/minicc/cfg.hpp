#pragma once

#include <string>
#include <utility>
#include <vector>

#include "conpredict/minicc/ast.hpp"

namespace conpredict::minicc {

struct CfgNode {
    int id = 0;
    /// entry, exit, decl, assign, if, while, do-while, return, call, spawn,
    /// or the name of a builtin (lock, unlock, wait, ...).
    std::string kind;
    int weight = 1;
    int line = 0;
    /// Fall-through or true successor, and false successor of a branch.
    /// -1 when absent. The exit node has neither.
    int next = -1;
    int alt = -1;
};

/// Statement-level control flow graph. Node ids coincide with statement ids;
/// entry is 0 and exit is statement_count + 1, so nodes[i].id == i.
struct Cfg {
    std::string function;
    std::vector<CfgNode> nodes;
    /// Deduplicated, sorted.
    std::vector<std::pair<int, int>> edges;
    int entry = 0;
    int exit = 0;

    std::vector<int> successors(int id) const;
    std::vector<int> predecessors(int id) const;
};

std::string node_kind(const Stmt& s);

Cfg lower_to_cfg(const FunctionDecl& f);

}  // namespace conpredict::minicc
