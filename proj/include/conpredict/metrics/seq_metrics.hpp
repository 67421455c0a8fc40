#pragma once

#include <cstdint>
#include <string_view>

#include "conpredict/minicc/ast.hpp"
#include "conpredict/minicc/cfg.hpp"

namespace conpredict::metrics {

/// The nine baseline sequential code metrics of one function.
struct SeqMetricRecord {
    int CN = 0;   // distinct functions calling f
    int CM = 0;   // distinct functions f calls
    int CL = 0;   // local declarations
    int CPA = 0;  // parameters
    double CTC = 0.0;  // comment lines / nloc
    std::int64_t CP = 0;  // entry-to-exit paths, each back edge used at most once
    bool cp_saturated = false;
    int CC = 0;   // E - N + 2
    int ES = 0;   // executable statements
    int MN = 0;   // maximum control-structure nesting
};

inline constexpr std::int64_t kPathCap = 2147483647;

/// Counts entry-to-exit paths where every DFS back edge is taken at most once.
/// Saturates at kPathCap and sets *saturated.
std::int64_t count_paths(const minicc::Cfg& cfg, bool* saturated = nullptr);

/// Throws InputError for an unknown function.
SeqMetricRecord sequential_metrics(const minicc::SourceUnit& u, std::string_view function);

}  // namespace conpredict::metrics
