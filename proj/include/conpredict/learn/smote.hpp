#pragma once

#include <cstdint>
#include <vector>

#include "conpredict/learn/dataset.hpp"

namespace conpredict::learn {

/// Where a synthetic row came from: row = x[base] + u * (x[neighbor] - x[base]).
/// Indices refer to rows of the input dataset.
struct SyntheticOrigin {
    std::size_t base = 0;
    std::size_t neighbor = 0;
    double u = 0.0;
};

struct SmoteResult {
    Dataset data;  // input rows unchanged and in order, then synthetic rows
    std::vector<SyntheticOrigin> synthetic;
    int minority_label = 1;
};

/// Minority is the smaller class (label 1 on a tie). Adds
/// floor(percent/100 * minority) rows. Bases cycle through a shuffled
/// minority order; each neighbor is drawn uniformly among the base's k
/// nearest minority rows (Euclidean, ties by row index); k is clamped to
/// minority - 1.
SmoteResult smote(const Dataset& d, int percent, int k, std::uint64_t seed);

}  // namespace conpredict::learn
