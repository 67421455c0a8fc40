#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "conpredict/learn/dataset.hpp"
#include "json.hpp"

namespace conpredict::learn {

enum class ClassifierKind { NaiveBayes, Logistic, DecisionTree, RandomForest };

std::string_view classifier_name(ClassifierKind k);
/// Accepts the long names and nb, lr, dt (or j48), rf.
ClassifierKind classifier_from_name(std::string_view name);

struct ClassifierSpec {
    ClassifierKind kind = ClassifierKind::RandomForest;
    int trees = 100;
    int min_leaf = 2;
    double l2 = 1e-4;
    int max_iterations = 1000;
    double tolerance = 1e-8;
    double variance_floor = 1e-9;
};

/// Rows are feature vectors restricted to the model's columns.
using Matrix = std::vector<std::vector<double>>;

class Model {
public:
    virtual ~Model() = default;
    /// Probability of the faulty class.
    virtual double predict_proba(const std::vector<double>& row) const = 0;
    virtual nlohmann::json to_json() const = 0;
};

class GaussianNaiveBayes final : public Model {
public:
    GaussianNaiveBayes(const Matrix& x, const std::vector<int>& y, double variance_floor);
    explicit GaussianNaiveBayes(const nlohmann::json& j);
    double predict_proba(const std::vector<double>& row) const override;
    nlohmann::json to_json() const override;

private:
    double prior_[2]{};
    std::vector<double> mean_[2];
    std::vector<double> var_[2];
};

class LogisticRegression final : public Model {
public:
    LogisticRegression(const Matrix& x, const std::vector<int>& y, const ClassifierSpec& spec);
    explicit LogisticRegression(const nlohmann::json& j);
    double predict_proba(const std::vector<double>& row) const override;
    nlohmann::json to_json() const override;

    int iterations() const { return iterations_; }

private:
    // Weights apply to standardized columns; weight 0 for constant columns.
    std::vector<double> mean_, scale_, w_;
    double bias_ = 0.0;
    int iterations_ = 0;
};

/// Binary tree with C4.5-style gain-ratio splits on numeric thresholds.
class DecisionTree final : public Model {
public:
    struct Node {
        int feature = -1;  // -1 for a leaf
        double threshold = 0.0;
        int left = -1;  // value <= threshold
        int right = -1;
        double prob = 0.0;  // fraction of faulty training rows at the node
        int count = 0;
    };

    /// Column-major copy of x and, per feature, row ids sorted by value
    /// (ties by row id) and each row's dense value rank.
    struct Presorted {
        std::size_t rows = 0;
        std::vector<double> columns;
        std::vector<std::vector<std::uint32_t>> order;
        std::vector<std::vector<std::uint32_t>> rank;

        /// The same rows restricted to some features.
        Presorted select(const std::vector<std::size_t>& features) const;
    };
    static Presorted presort(const Matrix& x);

    /// rows: indices into x (repeats allowed, as in a bootstrap sample).
    /// features_per_split: 0 considers every feature; otherwise that many
    /// are drawn at random for each split. `presorted` may be shared by
    /// trees grown on the same x.
    DecisionTree(const Matrix& x, const std::vector<int>& y, std::vector<std::size_t> rows, int min_leaf,
                 int features_per_split, std::uint64_t seed, const Presorted* presorted = nullptr);
    explicit DecisionTree(const nlohmann::json& j);
    double predict_proba(const std::vector<double>& row) const override;
    nlohmann::json to_json() const override;

    const std::vector<Node>& nodes() const { return nodes_; }
    const Node& leaf(const std::vector<double>& row) const;

private:
    std::vector<Node> nodes_;
};

class RandomForest final : public Model {
public:
    RandomForest(const Matrix& x, const std::vector<int>& y, const ClassifierSpec& spec, std::uint64_t seed,
                 const DecisionTree::Presorted* presorted = nullptr);
    explicit RandomForest(const nlohmann::json& j);
    /// Fraction of trees voting faulty (leaf majority; ties vote non-faulty).
    double predict_proba(const std::vector<double>& row) const override;
    nlohmann::json to_json() const override;

    const std::vector<DecisionTree>& trees() const { return trees_; }
    /// out_of_bag[t][r]: training row r was not drawn for tree t.
    const std::vector<std::vector<char>>& out_of_bag() const { return oob_; }

private:
    std::vector<DecisionTree> trees_;
    std::vector<std::vector<char>> oob_;
};

/// `presorted`, when given, must be DecisionTree::presort(x); trees use it.
std::unique_ptr<Model> fit(const Matrix& x, const std::vector<int>& y, const ClassifierSpec& spec,
                           std::uint64_t seed, const DecisionTree::Presorted* presorted = nullptr);

/// A fitted model plus the dataset columns it reads.
struct TrainedModel {
    ClassifierKind kind = ClassifierKind::RandomForest;
    std::vector<std::string> features;  // selected feature names
    std::vector<std::size_t> columns;   // their indices in the training dataset
    std::shared_ptr<const Model> model;
    std::uint64_t seed = 0;
    int repeat = -1;
    int fold = -1;

    /// `row` is a full dataset row.
    double predict_proba(const std::vector<double>& row) const;
    std::vector<double> predict_proba(const Dataset& d) const;
};

/// Trains on the given columns (all columns when empty is not intended:
/// pass every index explicitly). Throws InputError for a one-class dataset
/// or non-finite values.
TrainedModel train(const Dataset& d, const ClassifierSpec& spec, const std::vector<std::size_t>& columns,
                   std::uint64_t seed);

Matrix project(const Dataset& d, const std::vector<std::size_t>& columns);

std::string save_model(const TrainedModel& m);
/// Resolves feature names against `d` when given, else keeps stored indices.
TrainedModel load_model(const std::string& text);
TrainedModel bind_model(TrainedModel m, const Dataset& d);

}  // namespace conpredict::learn
