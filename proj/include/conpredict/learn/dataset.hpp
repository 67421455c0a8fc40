#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "conpredict/common/csv.hpp"

namespace conpredict::learn {

struct RowKey {
    std::string program;
    std::string function;

    std::string str() const { return program + ":" + function; }
    auto operator<=>(const RowKey&) const = default;
};

/// Labeled feature rows. Label 1 is the faulty (positive) class.
struct Dataset {
    std::vector<std::string> features;
    std::vector<RowKey> keys;
    std::vector<std::vector<double>> x;
    std::vector<int> y;
    /// Effort and bug counts used by PofB20/Popt; not features.
    std::vector<double> nloc;
    std::vector<double> bugs;

    std::size_t rows() const { return y.size(); }
    std::size_t positives() const;
    std::size_t negatives() const { return rows() - positives(); }
    int feature_index(std::string_view name) const;
    /// Throws InputError naming the feature when absent.
    std::size_t require_feature(std::string_view name) const;

    Dataset subset_rows(const std::vector<std::size_t>& rows) const;
    Dataset subset_features(const std::vector<std::size_t>& columns) const;
    void append_row(RowKey key, std::vector<double> values, int label, double nloc_value = 0.0,
                    double bug_count = 0.0);
    /// Throws InputError unless both classes are present.
    void require_two_classes(std::string_view what) const;
};

enum class FeatureSet { ConPredictor, Spm, All };

FeatureSet feature_set_from_name(std::string_view name);
/// SPC..SVD, MuS/MuDuE/MuDuK of the six concurrency operators (24 names).
const std::vector<std::string>& conpredictor_features();
/// CN..MN, MuS/MuDuE/MuDuK of the six sequential operators (27 names).
const std::vector<std::string>& spm_features();
/// Feature columns for a set; All keeps every column of `available`.
std::vector<std::string> feature_columns(FeatureSet set, const std::vector<std::string>& available);

/// Restricts d to the columns of a feature set, in the set's order.
Dataset select_feature_set(const Dataset& d, FeatureSet set);

/// Joins metric tables (each keyed by program,function) and a labels table
/// (program,function,label[,bugs]). Rows follow the first table's order.
/// Functions without a label are non-faulty. A `nloc` column, when present in
/// any table, becomes effort metadata.
Dataset assemble(const std::vector<csv::Table>& metric_tables, const csv::Table& labels, FeatureSet set);

/// Dataset files: program,function,nloc,bugs,<features...>,label
csv::Table to_table(const Dataset& d);
Dataset from_table(const csv::Table& t);
void write_dataset(const std::string& path, const Dataset& d);
Dataset read_dataset(const std::string& path);

}  // namespace conpredict::learn
