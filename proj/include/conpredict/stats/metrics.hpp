#pragma once

#include <cstddef>
#include <vector>

namespace conpredict::stats {

struct Confusion {
    std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
    std::size_t total() const { return tp + fp + fn + tn; }
};

struct Prf {
    double precision = 0.0, recall = 0.0, f1 = 0.0;
};

/// prob >= threshold predicts faulty (label 1).
Confusion confusion(const std::vector<double>& prob, const std::vector<int>& labels, double threshold = 0.5);
/// Zero denominators give 0.
Prf prf(const Confusion& c);
double f1_score(const std::vector<double>& prob, const std::vector<int>& labels, double threshold = 0.5);

/// Mann-Whitney formulation with mid-ranks; needs both classes.
double auc(const std::vector<double>& prob, const std::vector<int>& labels);
/// O(P*N) pair counting, ties 1/2. Reference for auc().
double auc_pairs(const std::vector<double>& prob, const std::vector<int>& labels);

/// Inspection order: probability descending, then smaller nloc, then row index.
std::vector<std::size_t> inspection_order(const std::vector<double>& prob, const std::vector<double>& nloc);

/// Fraction of bugs in the functions inspected until 20% of the lines are
/// covered; the function crossing the boundary counts in full.
double pofb20(const std::vector<double>& prob, const std::vector<double>& nloc, const std::vector<double>& bugs);

/// Cumulative (effort fraction, bug fraction) points of an ordering, starting at (0,0).
std::vector<std::pair<double, double>> effort_curve(const std::vector<std::size_t>& order,
                                                    const std::vector<double>& nloc,
                                                    const std::vector<double>& bugs);
/// Bug density descending, then row index.
std::vector<std::size_t> optimal_order(const std::vector<double>& nloc, const std::vector<double>& bugs);
/// 1 - area between the optimal (bug density) curve and the predicted one.
double popt(const std::vector<double>& prob, const std::vector<double>& nloc, const std::vector<double>& bugs);

struct EvalReport {
    Confusion matrix;
    double threshold = 0.5;
    double precision = 0.0, recall = 0.0, f1 = 0.0, auc = 0.0, pofb20 = 0.0, popt = 0.0;
};

EvalReport evaluate(const std::vector<double>& prob, const std::vector<int>& labels, const std::vector<double>& nloc,
                    const std::vector<double>& bugs, double threshold = 0.5);

}  // namespace conpredict::stats
