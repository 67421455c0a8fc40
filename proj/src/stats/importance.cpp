#include "conpredict/stats/importance.hpp"

#include <algorithm>
#include <boost/math/distributions/fisher_f.hpp>
#include <numeric>

#include "conpredict/common/error.hpp"
#include "conpredict/common/rng.hpp"
#include "conpredict/learn/smote.hpp"

namespace conpredict::stats {

std::vector<double> permutation_importance(const learn::RandomForest& forest, const learn::Matrix& x,
                                           const std::vector<int>& y, std::uint64_t seed) {
    const auto& trees = forest.trees();
    const auto& oob = forest.out_of_bag();
    if (x.size() != y.size() || (!oob.empty() && oob[0].size() != x.size()))
        throw InputError("importance data does not match the forest's training rows");
    const std::size_t p = x.empty() ? 0 : x[0].size();
    std::vector<double> total(p, 0.0);
    std::size_t used = 0;
    std::vector<double> row;
    for (std::size_t t = 0; t < trees.size(); ++t) {
        std::vector<std::size_t> rows;
        for (std::size_t r = 0; r < x.size(); ++r)
            if (oob[t][r]) rows.push_back(r);
        if (rows.empty()) continue;
        ++used;
        auto vote = [&](const std::vector<double>& v) { return trees[t].predict_proba(v) > 0.5 ? 1 : 0; };
        double base = 0.0;
        for (std::size_t r : rows) base += vote(x[r]) == y[r];
        for (std::size_t j = 0; j < p; ++j) {
            std::vector<double> values;
            for (std::size_t r : rows) values.push_back(x[r][j]);
            Rng rng(derive_seed(seed, t, j));
            rng.shuffle(values);
            double correct = 0.0;
            for (std::size_t i = 0; i < rows.size(); ++i) {
                row = x[rows[i]];
                row[j] = values[i];
                correct += vote(row) == y[rows[i]];
            }
            total[j] += (base - correct) / static_cast<double>(rows.size());
        }
    }
    if (used > 0)
        for (auto& v : total) v /= static_cast<double>(used);
    return total;
}

ImportanceRuns importance_runs(const learn::Dataset& d, const learn::ClassifierSpec& spec, int runs,
                               int smote_percent, int smote_k, std::uint64_t seed) {
    if (runs < 1) throw InputError("importance needs at least one run");
    d.require_two_classes("importance");
    ImportanceRuns out;
    out.features = d.features;
    learn::ClassifierSpec forest_spec = spec;
    forest_spec.kind = learn::ClassifierKind::RandomForest;
    for (int r = 0; r < runs; ++r) {
        const auto run_seed = derive_seed(seed, static_cast<std::uint64_t>(r));
        const auto data = learn::smote(d, smote_percent, smote_k, derive_seed(run_seed, 1)).data;
        const learn::RandomForest forest(data.x, data.y, forest_spec, derive_seed(run_seed, 2));
        out.runs.push_back(permutation_importance(forest, data.x, data.y, derive_seed(run_seed, 3)));
    }
    return out;
}

namespace {

struct Splitter {
    const std::vector<std::vector<double>>& samples;  // per feature, in mean order
    double alpha;
    std::vector<int> group_of;
    int groups = 0;

    void split(std::size_t lo, std::size_t hi) {
        if (hi - lo >= 2) {
            double sum = 0.0, count = 0.0;
            for (std::size_t f = lo; f < hi; ++f)
                for (double v : samples[f]) {
                    sum += v;
                    ++count;
                }
            const double grand = sum / count;
            double best_b = 0.0;
            std::size_t best = 0;
            double left_sum = 0.0, left_count = 0.0;
            for (std::size_t cut = lo + 1; cut < hi; ++cut) {
                for (double v : samples[cut - 1]) left_sum += v;
                left_count += static_cast<double>(samples[cut - 1].size());
                const double right_count = count - left_count;
                const double ml = left_sum / left_count, mr = (sum - left_sum) / right_count;
                const double b = left_count * (ml - grand) * (ml - grand) + right_count * (mr - grand) * (mr - grand);
                if (b > best_b + 1e-15 * std::max(1.0, b)) {
                    best_b = b;
                    best = cut;
                }
            }
            if (best && significant(lo, best, hi, best_b, count)) {
                split(lo, best);
                split(best, hi);
                return;
            }
        }
        ++groups;
        for (std::size_t f = lo; f < hi; ++f) group_of[f] = groups;
    }

    bool significant(std::size_t lo, std::size_t cut, std::size_t hi, double between, double count) const {
        double within = 0.0;
        for (auto [a, b] : {std::pair{lo, cut}, std::pair{cut, hi}}) {
            double s = 0.0, c = 0.0;
            for (std::size_t f = a; f < b; ++f)
                for (double v : samples[f]) {
                    s += v;
                    ++c;
                }
            const double mean = s / c;
            for (std::size_t f = a; f < b; ++f)
                for (double v : samples[f]) within += (v - mean) * (v - mean);
        }
        const double df2 = count - 2.0;
        if (df2 < 1) return false;
        if (within <= 0) return between > 0;
        const double f = between / (within / df2);
        const boost::math::fisher_f dist(1.0, df2);
        return boost::math::cdf(boost::math::complement(dist, f)) < alpha;
    }
};

}  // namespace

ScottKnott scott_knott(const ImportanceRuns& runs, double alpha) {
    const std::size_t p = runs.features.size();
    if (p == 0) throw InputError("Scott-Knott needs at least one feature");
    if (runs.runs.empty()) throw InputError("Scott-Knott needs at least one run");
    for (const auto& r : runs.runs)
        if (r.size() != p) throw InputError("importance runs differ in width");

    std::vector<std::vector<double>> per_feature(p);
    std::vector<std::vector<int>> ranks(p);
    for (const auto& r : runs.runs)
        for (std::size_t f = 0; f < p; ++f) {
            per_feature[f].push_back(r[f]);
            int rank = 1;
            for (std::size_t g = 0; g < p; ++g) rank += r[g] > r[f];
            ranks[f].push_back(rank);
        }
    std::vector<double> mean(p);
    for (std::size_t f = 0; f < p; ++f)
        mean[f] = std::accumulate(per_feature[f].begin(), per_feature[f].end(), 0.0) /
                  static_cast<double>(per_feature[f].size());
    std::vector<std::size_t> order(p);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return mean[a] > mean[b]; });

    std::vector<std::vector<double>> ordered;
    for (std::size_t f : order) ordered.push_back(per_feature[f]);
    Splitter s{ordered, alpha, std::vector<int>(p, 0)};
    s.split(0, p);

    ScottKnott out;
    out.groups = s.groups;
    for (std::size_t i = 0; i < p; ++i) {
        const std::size_t f = order[i];
        RankedFeature r;
        r.feature = runs.features[f];
        r.group = s.group_of[i];
        r.mean = mean[f];
        r.rank_mean = std::accumulate(ranks[f].begin(), ranks[f].end(), 0.0) / static_cast<double>(ranks[f].size());
        r.rank_highest = *std::min_element(ranks[f].begin(), ranks[f].end());
        r.rank_lowest = *std::max_element(ranks[f].begin(), ranks[f].end());
        out.features.push_back(r);
    }
    return out;
}

FeatureEffect feature_effect(const learn::Dataset& d, std::string_view feature, double alpha, double min_effect) {
    const std::size_t c = d.require_feature(feature);
    std::vector<double> faulty, clean;
    for (std::size_t r = 0; r < d.rows(); ++r) (d.y[r] ? faulty : clean).push_back(d.x[r][c]);
    if (faulty.empty() || clean.empty()) throw InputError("feature effect needs both classes");
    FeatureEffect e;
    e.feature = std::string(feature);
    e.effect = cliffs_delta(faulty, clean);
    e.p = wilcoxon_two_sided(faulty, clean);
    if (e.p < alpha && std::abs(e.effect.d) >= min_effect) {
        const double mf = median(faulty), mc = median(clean);
        if (mf > mc) e.direction = "+";
        else if (mf < mc) e.direction = "-";
    }
    return e;
}

}  // namespace conpredict::stats
