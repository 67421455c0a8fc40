#include "conpredict/learn/select.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "conpredict/common/error.hpp"
#include "conpredict/common/rng.hpp"
#include "conpredict/stats/metrics.hpp"

namespace conpredict::learn {

std::vector<int> stratified_folds(const std::vector<int>& y, int folds, std::uint64_t seed) {
    if (folds < 2) throw InputError("need at least 2 folds");
    if (y.size() < static_cast<std::size_t>(folds))
        throw InputError("fewer rows (" + std::to_string(y.size()) + ") than folds (" + std::to_string(folds) + ")");
    Rng rng(seed);
    std::vector<int> assign(y.size(), 0);
    std::size_t next = 0;  // continue dealing where the previous class stopped
    for (int label : {1, 0}) {
        std::vector<std::size_t> rows;
        for (std::size_t r = 0; r < y.size(); ++r)
            if ((y[r] != 0) == (label != 0)) rows.push_back(r);
        rng.shuffle(rows);
        for (std::size_t r : rows) assign[r] = static_cast<int>(next++ % static_cast<std::size_t>(folds));
    }
    return assign;
}

namespace {

/// Training and held-out rows of one internal fold, with the training
/// matrix presorted once for every subset scored on it.
struct InnerFold {
    std::vector<std::size_t> train, test;
    std::vector<int> y;
    double prior = 0.0;
    bool two_classes = false;
    DecisionTree::Presorted presorted;
};

std::vector<InnerFold> make_folds(const Dataset& d, const std::vector<int>& folds, int fold_count, bool presort) {
    std::vector<InnerFold> out(static_cast<std::size_t>(fold_count));
    for (std::size_t r = 0; r < d.rows(); ++r) {
        auto& f = out.at(static_cast<std::size_t>(folds[r]));
        f.test.push_back(r);
    }
    for (int i = 0; i < fold_count; ++i) {
        auto& f = out[static_cast<std::size_t>(i)];
        for (std::size_t r = 0; r < d.rows(); ++r)
            if (folds[r] != i) {
                f.train.push_back(r);
                f.y.push_back(d.y[r]);
            }
        const auto pos = std::count(f.y.begin(), f.y.end(), 1);
        f.prior = f.y.empty() ? 0.0 : static_cast<double>(pos) / static_cast<double>(f.y.size());
        f.two_classes = pos > 0 && static_cast<std::size_t>(pos) < f.y.size();
        if (presort && !f.train.empty()) {
            Matrix x;
            for (std::size_t r : f.train) x.push_back(d.x[r]);
            f.presorted = DecisionTree::presort(x);
        }
    }
    return out;
}

bool uses_trees(const ClassifierSpec& spec) {
    return spec.kind == ClassifierKind::DecisionTree || spec.kind == ClassifierKind::RandomForest;
}

double score_on_folds(const Dataset& d, const ClassifierSpec& spec, const std::vector<std::size_t>& columns,
                      const std::vector<InnerFold>& folds, std::uint64_t seed) {
    std::vector<double> prob(d.rows(), 0.0);
    std::vector<double> row;
    for (std::size_t f = 0; f < folds.size(); ++f) {
        const auto& fold = folds[f];
        std::unique_ptr<Model> model;
        if (!columns.empty() && fold.two_classes) {
            Matrix x;
            x.reserve(fold.train.size());
            for (std::size_t r : fold.train) {
                row.clear();
                for (std::size_t c : columns) row.push_back(d.x[r][c]);
                x.push_back(row);
            }
            if (uses_trees(spec) && !fold.presorted.order.empty()) {
                const auto sub = fold.presorted.select(columns);
                model = fit(x, fold.y, spec, derive_seed(seed, f), &sub);
            } else {
                model = fit(x, fold.y, spec, derive_seed(seed, f));
            }
        }
        for (std::size_t r : fold.test) {
            if (!model) {
                prob[r] = fold.prior;
                continue;
            }
            row.clear();
            for (std::size_t c : columns) row.push_back(d.x[r][c]);
            prob[r] = model->predict_proba(row);
        }
    }
    return stats::f1_score(prob, d.y);
}

}  // namespace

double subset_score(const Dataset& d, const ClassifierSpec& spec, const std::vector<std::size_t>& columns,
                    const std::vector<int>& folds, int fold_count, std::uint64_t seed) {
    return score_on_folds(d, spec, columns, make_folds(d, folds, fold_count, uses_trees(spec)), seed);
}

namespace {

struct Candidate {
    double score;
    std::vector<std::size_t> columns;
};

/// True when a is preferred over b.
bool better(const Candidate& a, const Candidate& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.columns.size() != b.columns.size()) return a.columns.size() < b.columns.size();
    return a.columns < b.columns;
}

}  // namespace

SelectionResult wrapper_select(const Dataset& d, const ClassifierSpec& spec, std::uint64_t seed,
                               const SelectionOptions& options) {
    d.require_two_classes("feature selection");
    if (options.stale_limit < 1) throw InputError("selection stale limit must be positive");
    ClassifierSpec inner = spec;
    if (options.forest_trees > 0) inner.trees = options.forest_trees;
    const auto folds = make_folds(d, stratified_folds(d.y, options.folds, derive_seed(seed, 0x5e1ec7)),
                                  options.folds, uses_trees(inner));
    const std::uint64_t fit_seed = derive_seed(seed, 0xf17);

    std::map<std::vector<std::size_t>, double> memo;
    auto score = [&](const std::vector<std::size_t>& cols) {
        auto it = memo.find(cols);
        if (it != memo.end()) return it->second;
        const double s = score_on_folds(d, inner, cols, folds, fit_seed);
        memo.emplace(cols, s);
        return s;
    };

    auto cmp = [](const Candidate& a, const Candidate& b) { return better(a, b); };
    std::set<Candidate, decltype(cmp)> open(cmp);
    std::set<std::vector<std::size_t>> closed;
    Candidate best{score({}), {}};
    open.insert(best);
    int stale = 0;
    while (!open.empty() && stale < options.stale_limit) {
        const Candidate node = *open.begin();
        open.erase(open.begin());
        closed.insert(node.columns);
        bool improved = false;
        for (std::size_t c = 0; c < d.features.size(); ++c) {
            std::vector<std::size_t> child = node.columns;
            auto pos = std::lower_bound(child.begin(), child.end(), c);
            if (pos != child.end() && *pos == c) child.erase(pos);
            else child.insert(pos, c);
            if (closed.count(child) || memo.count(child)) continue;
            Candidate cand{score(child), child};
            open.insert(cand);
            if (better(cand, best)) {
                if (cand.score > best.score) improved = true;
                best = cand;
            }
        }
        stale = improved ? 0 : stale + 1;
    }
    return {best.columns, best.score, memo.size()};
}

}  // namespace conpredict::learn
