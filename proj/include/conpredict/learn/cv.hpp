#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "conpredict/learn/dataset.hpp"
#include "conpredict/learn/model.hpp"
#include "conpredict/learn/select.hpp"
#include "conpredict/learn/smote.hpp"

namespace conpredict::learn {

struct CvOptions {
    int folds = 10;
    int repeats = 10;
    int smote_percent = 100;
    int smote_k = 5;
    /// Run wrapper selection inside each fold; otherwise use every column.
    bool select = true;
    SelectionOptions selection;
    /// Worker threads over (repeat, fold) tasks; 0 uses the hardware count.
    /// Results do not depend on it.
    int threads = 0;
};

struct Prediction {
    std::size_t row = 0;
    int repeat = 0;
    int fold = 0;
    double prob = 0.0;
};

/// What one fold touched, in row indices of the input dataset. Synthetic
/// rows are reported through their SMOTE parents.
struct FoldTrace {
    int repeat = 0;
    int fold = 0;
    std::vector<std::size_t> train_rows;
    std::vector<std::size_t> test_rows;
    std::vector<SyntheticOrigin> smote;
    /// Row keys of the datasets handed to SMOTE, selection and fitting.
    std::vector<RowKey> smote_input;
    std::vector<RowKey> selection_input;
    std::vector<RowKey> fit_input;
    std::vector<std::string> selected;
};

using FoldObserver = std::function<void(const FoldTrace&)>;

struct CvResult {
    /// Ordered by repeat, then fold, then row.
    std::vector<Prediction> predictions;
    /// Selected feature names per (repeat, fold), repeat-major.
    std::vector<std::vector<std::string>> selected;
    int folds = 0;
    int repeats = 0;

    /// Out-of-fold probability of every row for one repeat.
    std::vector<double> repeat_probabilities(int repeat, std::size_t rows) const;
};

/// Per repeat: stratified folds; per fold: SMOTE on the training rows, wrapper
/// selection, training, scoring of the held-out rows. Each (repeat, fold) draws
/// from its own seed stream.
CvResult cross_validate(const Dataset& d, const ClassifierSpec& spec, const CvOptions& options, std::uint64_t seed,
                        const FoldObserver& observer = {});

}  // namespace conpredict::learn
