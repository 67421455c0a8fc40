#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "conpredict/learn/dataset.hpp"
#include "conpredict/learn/model.hpp"
#include "conpredict/stats/effect.hpp"

namespace conpredict::stats {

/// Breiman importance per feature of x: for each tree, the drop in accuracy
/// on its out-of-bag rows when the feature's values are shuffled among those
/// rows, averaged over trees. x and y must be the forest's training data.
std::vector<double> permutation_importance(const learn::RandomForest& forest, const learn::Matrix& x,
                                           const std::vector<int>& y, std::uint64_t seed);

struct ImportanceRuns {
    std::vector<std::string> features;
    std::vector<std::vector<double>> runs;  // runs[r][feature]
};

/// One random forest per run over every feature of d (after SMOTE with the
/// given percent), each scored by permutation importance.
ImportanceRuns importance_runs(const learn::Dataset& d, const learn::ClassifierSpec& spec, int runs,
                               int smote_percent, int smote_k, std::uint64_t seed);

struct RankedFeature {
    std::string feature;
    int group = 0;  // 1 is the most important group
    double mean = 0.0;
    double rank_mean = 0.0;  // per-run ranks, 1 = most important
    int rank_highest = 0;
    int rank_lowest = 0;
};

/// Features ordered by mean importance, descending, with their groups.
struct ScottKnott {
    std::vector<RankedFeature> features;
    int groups = 0;
};

/// Recursive best two-way split of the mean-ordered features (maximum
/// between-group sum of squares), kept when a one-way F-test over all
/// observations gives p < alpha.
ScottKnott scott_knott(const ImportanceRuns& runs, double alpha = 0.05);

struct FeatureEffect {
    std::string feature;
    double p = 1.0;  // two-sided Mann-Whitney
    EffectSize effect;  // faulty vs non-faulty
    std::string direction;  // "+", "-" or ""
};

/// "+" when faulty rows have the larger median, p < alpha and |d| >= min_effect.
FeatureEffect feature_effect(const learn::Dataset& d, std::string_view feature, double alpha = 0.01,
                             double min_effect = 0.147);

}  // namespace conpredict::stats
