#pragma once

#include <cstdint>
#include <vector>

#include "conpredict/learn/dataset.hpp"
#include "conpredict/learn/model.hpp"

namespace conpredict::learn {

struct SelectionOptions {
    int folds = 5;
    /// Consecutive non-improving expansions before the search stops.
    int stale_limit = 5;
    /// Forest size used while scoring subsets; 0 keeps the classifier's own.
    int forest_trees = 10;
};

struct SelectionResult {
    std::vector<std::size_t> columns;  // ascending
    double score = 0.0;                // internal cross-validated F1
    std::size_t evaluated = 0;         // distinct subsets scored
};

/// Stratified fold index per row (round-robin dealing of each shuffled class).
std::vector<int> stratified_folds(const std::vector<int>& y, int folds, std::uint64_t seed);

/// Pooled out-of-fold F1 of `spec` on the given columns. The empty subset
/// predicts the training prior.
double subset_score(const Dataset& d, const ClassifierSpec& spec, const std::vector<std::size_t>& columns,
                    const std::vector<int>& folds, int fold_count, std::uint64_t seed);

/// Best-first search from the empty subset over single add/remove moves.
/// Ties prefer the smaller subset, then the lexicographically smaller one.
SelectionResult wrapper_select(const Dataset& d, const ClassifierSpec& spec, std::uint64_t seed,
                               const SelectionOptions& options = {});

}  // namespace conpredict::learn
