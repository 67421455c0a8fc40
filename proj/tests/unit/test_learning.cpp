#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <numbers>
#include <numeric>
#include <set>
#include <sstream>

#include "conpredict/common/csv.hpp"
#include "conpredict/common/error.hpp"
#include "conpredict/common/rng.hpp"
#include "conpredict/learn/cv.hpp"
#include "conpredict/learn/dataset.hpp"
#include "conpredict/learn/model.hpp"
#include "conpredict/learn/select.hpp"
#include "conpredict/learn/smote.hpp"
#include "conpredict/learn/synth.hpp"
#include "conpredict/stats/metrics.hpp"

using namespace conpredict;
using namespace conpredict::learn;

namespace {

csv::Table table(std::vector<std::string> header, std::vector<std::vector<std::string>> rows) {
    csv::Table t;
    t.header = std::move(header);
    t.rows = std::move(rows);
    return t;
}

Dataset make(const std::vector<std::vector<double>>& x, const std::vector<int>& y) {
    Dataset d;
    for (std::size_t c = 0; c < x[0].size(); ++c) d.features.push_back("x" + std::to_string(c));
    for (std::size_t r = 0; r < x.size(); ++r) d.append_row({"p", "f" + std::to_string(r)}, x[r], y[r], 10, y[r]);
    return d;
}

/// Column 0 separates the classes; the rest is noise.
Dataset one_feature_signal(std::size_t n, std::size_t noise, std::uint64_t seed, double shift = 4.0) {
    Rng rng(seed);
    std::vector<std::vector<double>> x;
    std::vector<int> y;
    for (std::size_t i = 0; i < n; ++i) {
        const int label = i % 3 == 0;
        std::vector<double> row{label * shift + 0.3 * rng.normal()};
        for (std::size_t j = 0; j < noise; ++j) row.push_back(rng.normal());
        x.push_back(row);
        y.push_back(label);
    }
    return make(x, y);
}

ClassifierSpec small_forest(int trees = 10) {
    ClassifierSpec s;
    s.trees = trees;
    return s;
}

}  // namespace

// ---------------------------------------------------------------------------

TEST(Assemble, ClassCounts) {
    std::vector<std::vector<std::string>> rows;
    for (int i = 0; i < 10; ++i) rows.push_back({"p", "f" + std::to_string(i), std::to_string(i), "12"});
    const auto metrics = table({"program", "function", "CC", "nloc"}, rows);
    const auto labels = table({"program", "function", "label"}, {{"p", "f2", "1"}, {"p", "f7", "1"}, {"p", "f3", "0"}});
    const auto d = assemble({metrics}, labels, FeatureSet::All);
    EXPECT_EQ(d.rows(), 10u);
    EXPECT_EQ(d.positives(), 2u);
    EXPECT_EQ(d.negatives(), 8u);
    EXPECT_EQ(d.features, std::vector<std::string>{"CC"});
    EXPECT_EQ(d.keys[3].function, "f3");
    EXPECT_EQ(d.nloc[0], 12.0);
    EXPECT_EQ(d.bugs[2], 1.0);
}

TEST(Assemble, UnknownFunctionNamedInError) {
    const auto metrics = table({"program", "function", "CC"}, {{"p", "a", "1"}});
    const auto labels = table({"program", "function", "label"}, {{"p", "ghost", "1"}});
    try {
        assemble({metrics}, labels, FeatureSet::All);
        FAIL() << "expected an error";
    } catch (const InputError& e) {
        EXPECT_NE(std::string(e.what()).find("p:ghost"), std::string::npos);
    }
}

TEST(Assemble, RejectsDuplicates) {
    const auto dup_rows = table({"program", "function", "CC"}, {{"p", "a", "1"}, {"p", "a", "2"}});
    const auto labels = table({"program", "function", "label"}, {});
    EXPECT_THROW(assemble({dup_rows}, labels, FeatureSet::All), InputError);
    const auto one = table({"program", "function", "CC"}, {{"p", "a", "1"}});
    const auto dup_labels = table({"program", "function", "label"}, {{"p", "a", "1"}, {"p", "a", "1"}});
    EXPECT_THROW(assemble({one}, dup_labels, FeatureSet::All), InputError);
    EXPECT_THROW(assemble({one, one}, labels, FeatureSet::All), InputError);  // CC twice
    const auto bad = table({"program", "function", "label"}, {{"p", "a", "2"}});
    EXPECT_THROW(assemble({one}, bad, FeatureSet::All), InputError);
}

TEST(Assemble, ConPredictorTablesGiveTwentyFourColumns) {
    std::vector<std::string> con{"program", "function", "SPC", "SVC", "CSC", "CEC", "CCC", "SVD"};
    std::vector<std::string> mut{"program", "function"};
    std::vector<std::string> seq{"program", "function", "nloc", "CN", "CM", "CL", "CPA", "CTC", "CP", "CC", "ES", "MN"};
    for (const char* prefix : {"MuS_", "MuDuE_", "MuDuK_"})
        for (const char* op : {"ssdl", "swdd", "oasn", "oeba", "olng", "orrn", "rmlock", "rmwait", "rmsig",
                               "rmjoinyld", "shfecs", "spltecs"})
            mut.push_back(std::string(prefix) + op);
    auto fill = [](const std::vector<std::string>& header, const std::string& fn) {
        std::vector<std::string> row{"p", fn};
        for (std::size_t i = 2; i < header.size(); ++i) row.push_back(std::to_string(i));
        return row;
    };
    const auto t1 = table(con, {fill(con, "a"), fill(con, "b")});
    const auto t2 = table(mut, {fill(mut, "b"), fill(mut, "a")});
    const auto t3 = table(seq, {fill(seq, "a"), fill(seq, "b")});
    const auto labels = table({"program", "function", "label"}, {{"p", "b", "1"}});
    const auto d = assemble({t1, t2, t3}, labels, FeatureSet::ConPredictor);
    EXPECT_EQ(d.features.size(), 24u);
    EXPECT_EQ(d.features, conpredictor_features());
    EXPECT_EQ(assemble({t1, t2, t3}, labels, FeatureSet::Spm).features.size(), 27u);
    EXPECT_EQ(d.nloc[0], 2.0);
    EXPECT_EQ(d.y, (std::vector<int>{0, 1}));
    // A missing metric row is an error.
    const auto short_mut = table(mut, {fill(mut, "a")});
    EXPECT_THROW(assemble({t1, short_mut}, labels, FeatureSet::ConPredictor), InputError);
}

TEST(DatasetFile, RoundTrip) {
    auto d = one_feature_signal(12, 2, 1);
    d.nloc[3] = 42;
    d.bugs[0] = 3;
    const auto back = from_table(csv::parse([&] {
        std::ostringstream out;
        csv::write(out, to_table(d));
        return out.str();
    }()));
    EXPECT_EQ(back.features, d.features);
    EXPECT_EQ(back.x, d.x);
    EXPECT_EQ(back.y, d.y);
    EXPECT_EQ(back.nloc, d.nloc);
    EXPECT_EQ(back.bugs, d.bugs);
    EXPECT_EQ(back.keys, d.keys);
}

// ---------------------------------------------------------------------------

TEST(Smote, ZeroPercentUnchanged) {
    const auto d = one_feature_signal(20, 1, 2);
    const auto r = smote(d, 0, 5, 1);
    EXPECT_EQ(r.data.x, d.x);
    EXPECT_TRUE(r.synthetic.empty());
}

TEST(Smote, IdenticalMinorityPoints) {
    const auto d = make({{1, 2}, {1, 2}, {0, 0}, {5, 5}, {6, 6}}, {1, 1, 0, 0, 0});
    const auto r = smote(d, 100, 1, 9);
    ASSERT_EQ(r.data.rows(), 7u);
    EXPECT_EQ(r.data.x[5], (std::vector<double>{1, 2}));
    EXPECT_EQ(r.data.x[6], (std::vector<double>{1, 2}));
    EXPECT_EQ(r.data.y[5], 1);
}

TEST(Smote, TwoPointSegment) {
    const auto d = make({{0, 0}, {1, 1}, {3, 0}, {4, 0}, {5, 0}}, {1, 1, 0, 0, 0});
    const auto r = smote(d, 100, 1, 4);
    ASSERT_EQ(r.synthetic.size(), 2u);
    for (std::size_t i = 5; i < 7; ++i) {
        EXPECT_EQ(r.data.x[i][0], r.data.x[i][1]);
        EXPECT_GE(r.data.x[i][0], 0.0);
        EXPECT_LE(r.data.x[i][0], 1.0);
    }
    // Bases cycle through both minority rows.
    EXPECT_NE(r.synthetic[0].base, r.synthetic[1].base);
}

TEST(Smote, Errors) {
    const auto d = make({{0}, {1}, {2}}, {1, 0, 0});
    EXPECT_THROW(smote(d, 100, 5, 1), InputError);
    EXPECT_NO_THROW(smote(d, 0, 5, 1));
    EXPECT_THROW(smote(d, -1, 5, 1), InputError);
    // k above minority - 1 is clamped.
    const auto e = make({{0}, {1}, {2}, {3}, {4}}, {1, 1, 0, 0, 0});
    EXPECT_EQ(smote(e, 300, 10, 1).synthetic.size(), 6u);
}

TEST(Smote, MinorityIsTheSmallerClass) {
    const auto d = make({{0}, {1}, {2}, {3}, {4}}, {1, 1, 1, 0, 0});
    const auto r = smote(d, 50, 1, 1);
    EXPECT_EQ(r.minority_label, 0);
    ASSERT_EQ(r.synthetic.size(), 1u);
    EXPECT_EQ(r.data.y.back(), 0);
}

TEST(SmoteProperties, ContractOverSeededRuns) {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        Rng rng(seed + 1000);
        const std::size_t n = 20 + rng.below(40);
        std::vector<std::vector<double>> x;
        std::vector<int> y;
        for (std::size_t i = 0; i < n; ++i) {
            x.push_back({rng.normal(), rng.normal() * 3, static_cast<double>(rng.below(3))});
            y.push_back(rng.uniform() < 0.25);
        }
        y[0] = 1, y[1] = 1, y[2] = 0;
        const auto d = make(x, y);
        const int percent = static_cast<int>(rng.below(400));
        const int k = 1 + static_cast<int>(rng.below(6));
        const auto r = smote(d, percent, k, seed);

        const std::size_t m = std::min(d.positives(), d.negatives());
        EXPECT_EQ(r.synthetic.size(), static_cast<std::size_t>(percent) * m / 100);
        ASSERT_EQ(r.data.rows(), d.rows() + r.synthetic.size());
        for (std::size_t i = 0; i < d.rows(); ++i) {
            EXPECT_EQ(r.data.x[i], d.x[i]);
            EXPECT_EQ(r.data.y[i], d.y[i]);
        }
        std::vector<std::size_t> minority;
        for (std::size_t i = 0; i < d.rows(); ++i)
            if (d.y[i] == r.minority_label) minority.push_back(i);
        auto dist = [](const std::vector<double>& a, const std::vector<double>& b) {
            double s = 0;
            for (std::size_t c = 0; c < a.size(); ++c) s += (a[c] - b[c]) * (a[c] - b[c]);
            return std::sqrt(s);
        };
        const std::size_t kk = std::min<std::size_t>(static_cast<std::size_t>(k), minority.size() - 1);
        for (std::size_t s = 0; s < r.synthetic.size(); ++s) {
            const auto& row = r.data.x[d.rows() + s];
            const auto& o = r.synthetic[s];
            EXPECT_EQ(r.data.y[d.rows() + s], r.minority_label);
            // neighbor is among the base's kk nearest minority rows
            std::size_t closer = 0;
            for (std::size_t j : minority)
                if (j != o.base && dist(d.x[j], d.x[o.base]) < dist(d.x[o.neighbor], d.x[o.base])) ++closer;
            EXPECT_LT(closer, kk);
            EXPECT_NE(o.neighbor, o.base);
            // on the segment: |s - a| + |b - s| == |b - a|
            EXPECT_NEAR(dist(row, d.x[o.base]) + dist(d.x[o.neighbor], row), dist(d.x[o.neighbor], d.x[o.base]),
                        1e-9);
            for (std::size_t c = 0; c < row.size(); ++c) {
                double lo = 1e300, hi = -1e300;
                for (std::size_t j : minority) lo = std::min(lo, d.x[j][c]), hi = std::max(hi, d.x[j][c]);
                EXPECT_GE(row[c], lo);
                EXPECT_LE(row[c], hi);
            }
        }
        const auto again = smote(d, percent, k, seed);
        EXPECT_EQ(again.data.x, r.data.x);
    }
}

// ---------------------------------------------------------------------------

TEST(Classifiers, NaiveBayesClosedForm) {
    const Matrix x{{-1}, {1}, {9}, {11}};
    const std::vector<int> y{0, 0, 1, 1};
    const GaussianNaiveBayes nb(x, y, 1e-9);
    auto pdf = [](double v, double mu) { return std::exp(-(v - mu) * (v - mu) / 2) / std::sqrt(2 * std::numbers::pi); };
    const double expected = pdf(10, 10) / (pdf(10, 10) + pdf(10, 0));
    EXPECT_NEAR(nb.predict_proba({10}), expected, 1e-12);
    EXPECT_GT(nb.predict_proba({10}), 0.99);
    EXPECT_NEAR(nb.predict_proba({5}), 0.5, 1e-12);
}

TEST(Classifiers, LogisticSeparable) {
    Rng rng(3);
    Matrix x;
    std::vector<int> y;
    for (int i = 0; i < 80; ++i) {
        const double a = rng.normal() * 2, b = rng.normal() * 2;
        if (std::abs(a + 2 * b - 1) < 0.3) continue;
        x.push_back({a, b});
        y.push_back(a + 2 * b > 1);
    }
    ClassifierSpec spec;
    const LogisticRegression lr(x, y, spec);
    std::vector<double> p;
    for (const auto& row : x) p.push_back(lr.predict_proba(row));
    EXPECT_EQ(stats::f1_score(p, y), 1.0);
    EXPECT_EQ(stats::prf(stats::confusion(p, y)).precision, 1.0);
    EXPECT_GT(lr.iterations(), 0);
}

TEST(Classifiers, ConstantFeaturesPredictMajority) {
    Matrix x(20, std::vector<double>{1.0, 7.0});
    std::vector<int> y(20, 0);
    for (int i = 0; i < 4; ++i) y[static_cast<std::size_t>(i) * 5] = 1;
    for (auto kind : {ClassifierKind::NaiveBayes, ClassifierKind::Logistic, ClassifierKind::DecisionTree,
                      ClassifierKind::RandomForest}) {
        ClassifierSpec spec;
        spec.kind = kind;
        const auto m = fit(x, y, spec, 1);
        for (const auto& row : x) EXPECT_LT(m->predict_proba(row), 0.5) << classifier_name(kind);
    }
}

TEST(Classifiers, TreeRecoversThresholdStump) {
    Matrix x;
    std::vector<int> y;
    for (int i = 0; i < 20; ++i) {
        x.push_back({static_cast<double>(i), static_cast<double>((i * 7) % 5)});
        y.push_back(i >= 12);
    }
    std::vector<std::size_t> rows(20);
    std::iota(rows.begin(), rows.end(), 0);
    const DecisionTree t(x, y, rows, 2, 0, 1);
    ASSERT_EQ(t.nodes().size(), 3u);
    EXPECT_EQ(t.nodes()[0].feature, 0);
    EXPECT_DOUBLE_EQ(t.nodes()[0].threshold, 11.5);
    EXPECT_EQ(t.leaf({3, 0}).prob, 0.0);
    EXPECT_EQ(t.leaf({15, 0}).prob, 1.0);
}

TEST(Classifiers, TreeHonorsMinLeaf) {
    Matrix x;
    std::vector<int> y;
    for (int i = 0; i < 9; ++i) {
        x.push_back({static_cast<double>(i)});
        y.push_back(i == 0);  // a lone faulty row cannot be isolated
    }
    std::vector<std::size_t> rows(9);
    std::iota(rows.begin(), rows.end(), 0);
    const DecisionTree t(x, y, rows, 2, 0, 1);
    for (const auto& n : t.nodes()) EXPECT_GE(n.count, 2);
}

TEST(Classifiers, ForestProbabilityIsVoteFraction) {
    const auto d = one_feature_signal(60, 3, 5, 1.0);
    const RandomForest rf(d.x, d.y, small_forest(25), 3);
    for (std::size_t r = 0; r < d.rows(); r += 7) {
        int votes = 0;
        for (const auto& t : rf.trees()) votes += t.predict_proba(d.x[r]) > 0.5;
        EXPECT_EQ(rf.predict_proba(d.x[r]), votes / 25.0);
    }
    // Each tree has out-of-bag rows and in-bag rows.
    for (const auto& flags : rf.out_of_bag()) {
        const auto oob = std::count(flags.begin(), flags.end(), 1);
        EXPECT_GT(oob, 0);
        EXPECT_LT(oob, 60);
    }
}

TEST(Classifiers, RejectNonFiniteValues) {
    ClassifierSpec spec;
    EXPECT_THROW(fit({{1.0}, {NAN}}, {0, 1}, spec, 1), InputError);
    EXPECT_THROW(fit({{1.0}, {INFINITY}}, {0, 1}, spec, 1), InputError);
}

TEST(Classifiers, NamesRoundTrip) {
    for (auto kind : {ClassifierKind::NaiveBayes, ClassifierKind::Logistic, ClassifierKind::DecisionTree,
                      ClassifierKind::RandomForest})
        EXPECT_EQ(classifier_from_name(classifier_name(kind)), kind);
    EXPECT_EQ(classifier_from_name("j48"), ClassifierKind::DecisionTree);
    EXPECT_EQ(classifier_from_name("rf"), ClassifierKind::RandomForest);
    EXPECT_THROW(classifier_from_name("svm"), InputError);
}

TEST(Classifiers, SaveLoadPreservesPredictions) {
    const auto d = one_feature_signal(60, 3, 8, 1.5);
    const std::vector<std::size_t> cols{0, 2, 3};
    for (auto kind : {ClassifierKind::NaiveBayes, ClassifierKind::Logistic, ClassifierKind::DecisionTree,
                      ClassifierKind::RandomForest}) {
        ClassifierSpec spec = small_forest(15);
        spec.kind = kind;
        const auto m = train(d, spec, cols, 77);
        const auto text = save_model(m);
        const auto back = bind_model(load_model(text), d);
        EXPECT_EQ(back.features, (std::vector<std::string>{"x0", "x2", "x3"}));
        EXPECT_EQ(back.columns, cols);
        EXPECT_EQ(save_model(back), text);
        for (std::size_t r = 0; r < d.rows(); ++r) {
            const double p = m.predict_proba(d.x[r]);
            EXPECT_EQ(back.predict_proba(d.x[r]), p);
            EXPECT_GE(p, 0.0);
            EXPECT_LE(p, 1.0);
        }
        // Same seed, same model.
        EXPECT_EQ(save_model(train(d, spec, cols, 77)), text);
    }
    EXPECT_THROW(load_model("{not json"), InputError);
}

TEST(Classifiers, TrainNeedsBothClasses) {
    const auto d = make({{0}, {1}, {2}}, {0, 0, 0});
    EXPECT_THROW(train(d, ClassifierSpec{}, {0}, 1), InputError);
}

// ---------------------------------------------------------------------------

TEST(Folds, StratifiedWithinOneRow) {
    Rng rng(2);
    for (int inst = 0; inst < 30; ++inst) {
        const std::size_t n = 20 + rng.below(200);
        std::vector<int> y(n);
        for (auto& v : y) v = rng.uniform() < 0.2;
        const int folds = 2 + static_cast<int>(rng.below(9));
        const auto assign = stratified_folds(y, folds, static_cast<std::uint64_t>(inst));
        const double pos = static_cast<double>(std::count(y.begin(), y.end(), 1));
        for (int f = 0; f < folds; ++f) {
            double fp = 0, fn = 0;
            for (std::size_t r = 0; r < n; ++r)
                if (assign[r] == f) (y[r] ? fp : fn)++;
            EXPECT_LE(std::abs(fp - pos / folds), 1.0);
            EXPECT_LE(std::abs(fn - (static_cast<double>(n) - pos) / folds), 1.0);
        }
    }
    EXPECT_THROW(stratified_folds({0, 1, 0}, 5, 1), InputError);
}

TEST(Wrapper, SelectsTheDeterminingFeature) {
    const auto d = one_feature_signal(90, 4, 11);
    const auto r = wrapper_select(d, small_forest(), 3);
    EXPECT_EQ(r.columns, std::vector<std::size_t>{0});
    EXPECT_EQ(r.score, 1.0);
    EXPECT_GT(r.evaluated, 5u);
}

TEST(Wrapper, DuplicatedColumnSelectedOnce) {
    auto d = one_feature_signal(90, 3, 12);
    d.features.push_back("copy");
    for (auto& row : d.x) row.push_back(row[0]);
    const auto r = wrapper_select(d, small_forest(), 4);
    const bool original = std::count(r.columns.begin(), r.columns.end(), 0u) > 0;
    const bool copy = std::count(r.columns.begin(), r.columns.end(), 4u) > 0;
    EXPECT_TRUE(original || copy);
    EXPECT_FALSE(original && copy);
}

TEST(Wrapper, PureNoiseStaysSmall) {
    std::size_t total_size = 0;
    double total_score = 0.0;
    for (std::uint64_t s = 0; s < 20; ++s) {
        Rng rng(500 + s);
        std::vector<std::vector<double>> x;
        std::vector<int> y;
        for (int i = 0; i < 60; ++i) {
            x.push_back({rng.normal(), rng.normal(), rng.normal(), rng.normal(), rng.normal()});
            y.push_back(i % 4 == 0);
        }
        const auto r = wrapper_select(make(x, y), small_forest(), s);
        total_size += r.columns.size();
        total_score += r.score;
    }
    EXPECT_LE(total_size / 20.0, 2.0);
    // Far from the planted-signal score of 1.
    EXPECT_LT(total_score / 20.0, 0.5);
}

TEST(Wrapper, DeterministicAndRejectsOneClass) {
    const auto d = one_feature_signal(60, 3, 13, 1.0);
    const auto a = wrapper_select(d, small_forest(), 9);
    const auto b = wrapper_select(d, small_forest(), 9);
    EXPECT_EQ(a.columns, b.columns);
    EXPECT_EQ(a.score, b.score);
    EXPECT_THROW(wrapper_select(make({{0}, {1}}, {1, 1}), small_forest(), 1), InputError);
}

// ---------------------------------------------------------------------------

TEST(CrossValidation, LeaveOneOutScoresEachRowOnce) {
    const auto d = one_feature_signal(10, 1, 14);
    CvOptions o;
    o.folds = 10;
    o.repeats = 2;
    o.smote_k = 1;
    ClassifierSpec spec;
    spec.kind = ClassifierKind::DecisionTree;
    const auto r = cross_validate(d, spec, o, 5);
    ASSERT_EQ(r.predictions.size(), 20u);
    for (int rep = 0; rep < 2; ++rep) {
        std::vector<int> seen(10, 0);
        for (const auto& p : r.predictions)
            if (p.repeat == rep) seen[p.row]++;
        EXPECT_EQ(seen, std::vector<int>(10, 1));
    }
    EXPECT_THROW(cross_validate(one_feature_signal(9, 1, 1), spec, o, 1), InputError);
}

TEST(CrossValidation, RerunsAreBitwiseIdentical) {
    const auto d = one_feature_signal(60, 3, 15, 1.0);
    CvOptions o;
    o.folds = 5;
    o.repeats = 2;
    o.selection.forest_trees = 5;
    const auto spec = small_forest(10);
    const auto a = cross_validate(d, spec, o, 99);
    const auto b = cross_validate(d, spec, o, 99);
    ASSERT_EQ(a.predictions.size(), b.predictions.size());
    for (std::size_t i = 0; i < a.predictions.size(); ++i) {
        EXPECT_EQ(a.predictions[i].row, b.predictions[i].row);
        EXPECT_EQ(std::memcmp(&a.predictions[i].prob, &b.predictions[i].prob, sizeof(double)), 0);
    }
    EXPECT_EQ(a.selected, b.selected);
    const auto c = cross_validate(d, spec, o, 100);
    bool differs = false;
    for (std::size_t i = 0; i < a.predictions.size(); ++i) differs |= a.predictions[i].row != c.predictions[i].row;
    EXPECT_TRUE(differs);
}

TEST(CrossValidation, ThreadCountDoesNotChangeResults) {
    const auto d = one_feature_signal(60, 3, 17, 1.0);
    CvOptions o;
    o.folds = 4;
    o.repeats = 3;
    o.selection.forest_trees = 5;
    const auto spec = small_forest(10);
    o.threads = 1;
    std::vector<std::pair<int, int>> order;
    const auto a = cross_validate(d, spec, o, 5, [&](const FoldTrace& t) { order.emplace_back(t.repeat, t.fold); });
    o.threads = 3;
    const auto b = cross_validate(d, spec, o, 5);
    ASSERT_EQ(a.predictions.size(), b.predictions.size());
    for (std::size_t i = 0; i < a.predictions.size(); ++i) {
        EXPECT_EQ(a.predictions[i].row, b.predictions[i].row);
        EXPECT_EQ(std::memcmp(&a.predictions[i].prob, &b.predictions[i].prob, sizeof(double)), 0);
    }
    EXPECT_EQ(a.selected, b.selected);
    ASSERT_EQ(order.size(), 12u);
    for (std::size_t i = 0; i < order.size(); ++i)
        EXPECT_EQ(order[i], std::make_pair(static_cast<int>(i) / 4, static_cast<int>(i) % 4));
}

TEST(CrossValidation, HeldOutRowsNeverReachTraining) {
    const auto d = one_feature_signal(50, 3, 16, 1.0);
    CvOptions o;
    o.folds = 5;
    o.repeats = 3;
    o.selection.forest_trees = 5;
    int folds_seen = 0;
    cross_validate(d, small_forest(10), o, 7, [&](const FoldTrace& t) {
        ++folds_seen;
        std::set<RowKey> test;
        for (std::size_t r : t.test_rows) test.insert(d.keys[r]);
        std::set<std::size_t> all(t.train_rows.begin(), t.train_rows.end());
        for (std::size_t r : t.test_rows) EXPECT_TRUE(all.insert(r).second) << "row in both splits";
        EXPECT_EQ(all.size(), d.rows());
        for (const auto* keys : {&t.smote_input, &t.selection_input, &t.fit_input})
            for (const auto& k : *keys) {
                EXPECT_EQ(test.count(k), 0u) << k.str();
                // Synthetic rows are named after their base row.
                const auto plus = k.function.find("+smote");
                if (plus != std::string::npos)
                    EXPECT_EQ(test.count(RowKey{k.program, k.function.substr(0, plus)}), 0u);
            }
        for (const auto& s : t.smote) {
            EXPECT_EQ(std::count(t.test_rows.begin(), t.test_rows.end(), s.base), 0);
            EXPECT_EQ(std::count(t.test_rows.begin(), t.test_rows.end(), s.neighbor), 0);
        }
        EXPECT_EQ(t.fit_input.size(), t.train_rows.size() + t.smote.size());
        EXPECT_FALSE(t.selected.empty());
    });
    EXPECT_EQ(folds_seen, 15);
}

TEST(CrossValidation, HeldOutFeaturesDoNotChangeOtherFolds) {
    // Changing one row's features can only move that row's own prediction.
    auto d = one_feature_signal(40, 2, 17, 1.5);
    CvOptions o;
    o.folds = 4;
    o.repeats = 1;
    o.select = false;
    const auto spec = small_forest(10);
    const auto base = cross_validate(d, spec, o, 3);
    std::map<std::size_t, int> fold_of;
    for (const auto& p : base.predictions) fold_of[p.row] = p.fold;
    d.x[5] = {100, -100, 100};
    const auto moved = cross_validate(d, spec, o, 3);
    std::size_t changed_in_own_fold = 0;
    for (std::size_t i = 0; i < base.predictions.size(); ++i) {
        const auto& a = base.predictions[i];
        const auto& b = moved.predictions[i];
        ASSERT_EQ(a.row, b.row);
        if (a.fold == fold_of[5] && a.row != 5) EXPECT_EQ(a.prob, b.prob) << "row " << a.row;
        if (a.fold == fold_of[5] && a.prob != b.prob) ++changed_in_own_fold;
    }
    EXPECT_LE(changed_in_own_fold, 1u);
}

// ---------------------------------------------------------------------------

TEST(Synth, DeterministicWithExactCounts) {
    SynthSpec s;
    s.seed = 7;
    const auto a = synth(s), b = synth(s);
    EXPECT_EQ(a.data.x, b.data.x);
    EXPECT_EQ(a.data.y, b.data.y);
    EXPECT_EQ(a.data.rows(), 500u);
    EXPECT_EQ(a.data.positives(), 50u);
    EXPECT_EQ(a.data.features.size(), 51u);
    EXPECT_EQ(a.shifts.at("CCC"), 2.5);
    EXPECT_EQ(a.shifts.at("MuS_ssdl"), 0.5);
    EXPECT_EQ(a.metadata()["faulty"], 50);
    SynthSpec bad;
    bad.faulty = 1.0;
    EXPECT_THROW(synth(bad), InputError);
}

TEST(Synth, NoSignalGivesChanceAuc) {
    double total = 0.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        SynthSpec s;
        s.n = 300;
        s.faulty = 0.3;
        s.concurrency_signal = 0;
        s.sequential_signal = 0;
        s.seed = 2 * seed + 1;
        const auto train_set = select_feature_set(synth(s).data, FeatureSet::ConPredictor);
        s.seed = 2 * seed + 2;
        const auto test_set = select_feature_set(synth(s).data, FeatureSet::ConPredictor);
        std::vector<std::size_t> cols(train_set.features.size());
        std::iota(cols.begin(), cols.end(), 0);
        const auto m = train(train_set, small_forest(50), cols, seed);
        total += stats::auc(m.predict_proba(test_set), test_set.y);
    }
    EXPECT_NEAR(total / 20.0, 0.5, 0.05);
}

TEST(Synth, NoiselessUnitShiftIsSeparable) {
    SynthSpec s;
    s.n = 100;
    s.faulty = 0.5;
    s.noise = 0.0;
    s.concurrency_signal = 1.0;
    s.sequential_signal = 1.0;
    const auto d = synth(s).data;
    std::vector<std::size_t> cols(d.features.size());
    std::iota(cols.begin(), cols.end(), 0);
    ClassifierSpec spec;
    spec.kind = ClassifierKind::Logistic;
    const auto m = train(d, spec, cols, 1);
    EXPECT_EQ(stats::f1_score(m.predict_proba(d), d.y), 1.0);
}

TEST(Synth, WrapperRecoversLargeSingleShift) {
    SynthSpec s;
    s.n = 150;
    s.faulty = 0.2;
    s.concurrency_signal = 0;
    s.sequential_signal = 0;
    s.seed = 3;
    auto d = select_feature_set(synth(s).data, FeatureSet::ConPredictor);
    const auto ccc = d.require_feature("CCC");
    for (std::size_t r = 0; r < d.rows(); ++r)
        if (d.y[r]) d.x[r][ccc] += 6.0;
    const auto sel = wrapper_select(d, small_forest(), 1);
    EXPECT_NE(std::find(sel.columns.begin(), sel.columns.end(), ccc), sel.columns.end());
}
