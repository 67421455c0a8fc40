#include "conpredict/learn/cv.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <numeric>
#include <thread>

#include "conpredict/common/error.hpp"
#include "conpredict/common/rng.hpp"

namespace conpredict::learn {

std::vector<double> CvResult::repeat_probabilities(int repeat, std::size_t rows) const {
    std::vector<double> out(rows, 0.0);
    std::vector<char> seen(rows, 0);
    for (const auto& p : predictions)
        if (p.repeat == repeat) {
            out.at(p.row) = p.prob;
            seen[p.row] = 1;
        }
    for (char s : seen)
        if (!s) throw InternalError("cross-validation left a row unscored");
    return out;
}

namespace {

struct FoldOutcome {
    FoldTrace trace;
    std::vector<Prediction> predictions;
};

FoldOutcome run_fold(const Dataset& d, const ClassifierSpec& spec, const CvOptions& options, std::uint64_t seed,
                     int rep, int f, const std::vector<int>& folds) {
    const std::uint64_t fold_seed =
        derive_seed(seed, static_cast<std::uint64_t>(rep) + 1, static_cast<std::uint64_t>(f) + 1);
    FoldOutcome out;
    FoldTrace& trace = out.trace;
    trace.repeat = rep;
    trace.fold = f;
    for (std::size_t r = 0; r < d.rows(); ++r) (folds[r] == f ? trace.test_rows : trace.train_rows).push_back(r);
    const Dataset training = d.subset_rows(trace.train_rows);
    training.require_two_classes("training fold");

    trace.smote_input = training.keys;
    auto sm = smote(training, options.smote_percent, options.smote_k, derive_seed(fold_seed, 1));
    for (auto o : sm.synthetic) {
        o.base = trace.train_rows[o.base];
        o.neighbor = trace.train_rows[o.neighbor];
        trace.smote.push_back(o);
    }

    std::vector<std::size_t> columns(sm.data.features.size());
    std::iota(columns.begin(), columns.end(), 0);
    if (options.select) {
        trace.selection_input = sm.data.keys;
        columns = wrapper_select(sm.data, spec, derive_seed(fold_seed, 2), options.selection).columns;
        if (columns.empty()) {
            // Nothing beats the prior: fall back to every feature.
            columns.resize(sm.data.features.size());
            std::iota(columns.begin(), columns.end(), 0);
        }
    }
    for (std::size_t c : columns) trace.selected.push_back(d.features[c]);

    trace.fit_input = sm.data.keys;
    TrainedModel model = train(sm.data, spec, columns, derive_seed(fold_seed, 3));
    for (std::size_t r : trace.test_rows) out.predictions.push_back({r, rep, f, model.predict_proba(d.x[r])});
    return out;
}

}  // namespace

CvResult cross_validate(const Dataset& d, const ClassifierSpec& spec, const CvOptions& options, std::uint64_t seed,
                        const FoldObserver& observer) {
    if (options.repeats < 1) throw InputError("repeats must be positive");
    if (options.threads < 0) throw InputError("threads must be >= 0");
    d.require_two_classes("cross-validation");
    std::vector<std::vector<int>> folds;
    for (int rep = 0; rep < options.repeats; ++rep)
        folds.push_back(stratified_folds(d.y, options.folds, derive_seed(seed, static_cast<std::uint64_t>(rep))));

    const std::size_t tasks = static_cast<std::size_t>(options.repeats) * static_cast<std::size_t>(options.folds);
    std::vector<FoldOutcome> outcomes(tasks);
    std::vector<std::exception_ptr> errors(tasks);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t t = next++; t < tasks; t = next++) {
            const int rep = static_cast<int>(t) / options.folds, f = static_cast<int>(t) % options.folds;
            try {
                outcomes[t] = run_fold(d, spec, options, seed, rep, f, folds[static_cast<std::size_t>(rep)]);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        }
    };
    std::size_t workers = options.threads > 0 ? static_cast<std::size_t>(options.threads)
                                              : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, tasks);
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t i = 0; i < workers; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    CvResult result;
    result.folds = options.folds;
    result.repeats = options.repeats;
    for (auto& o : outcomes) {
        result.predictions.insert(result.predictions.end(), o.predictions.begin(), o.predictions.end());
        result.selected.push_back(o.trace.selected);
        if (observer) observer(o.trace);
    }
    return result;
}

}  // namespace conpredict::learn
