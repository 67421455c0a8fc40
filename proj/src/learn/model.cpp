#include "conpredict/learn/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "conpredict/common/error.hpp"
#include "conpredict/common/rng.hpp"

namespace conpredict::learn {

using json = nlohmann::json;

std::string_view classifier_name(ClassifierKind k) {
    switch (k) {
        case ClassifierKind::NaiveBayes: return "naive-bayes";
        case ClassifierKind::Logistic: return "logistic-regression";
        case ClassifierKind::DecisionTree: return "decision-tree";
        case ClassifierKind::RandomForest: return "random-forest";
    }
    return "?";
}

ClassifierKind classifier_from_name(std::string_view name) {
    if (name == "nb" || name == "naive-bayes") return ClassifierKind::NaiveBayes;
    if (name == "lr" || name == "logistic-regression") return ClassifierKind::Logistic;
    if (name == "dt" || name == "j48" || name == "decision-tree") return ClassifierKind::DecisionTree;
    if (name == "rf" || name == "random-forest") return ClassifierKind::RandomForest;
    throw InputError("unknown classifier '" + std::string(name) + "' (nb, lr, dt, rf)");
}

namespace {

void check_training_data(const Matrix& x, const std::vector<int>& y) {
    if (x.size() != y.size()) throw InternalError("row and label counts differ");
    if (x.empty()) throw InputError("cannot train on an empty dataset");
    for (const auto& row : x)
        for (double v : row)
            if (!std::isfinite(v)) throw InputError("non-finite feature value in training data");
}

double sigmoid(double z) {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

/// log(sigmoid(z)) without overflow.
double log_sigmoid(double z) { return z >= 0 ? -std::log1p(std::exp(-z)) : z - std::log1p(std::exp(z)); }

/// Solves A x = b for symmetric positive definite A (Cholesky, in place).
std::vector<double> solve_spd(std::vector<double> a, std::vector<double> b, std::size_t n) {
    for (std::size_t j = 0; j < n; ++j) {
        double d = a[j * n + j];
        for (std::size_t k = 0; k < j; ++k) d -= a[j * n + k] * a[j * n + k];
        if (d <= 0.0) d = 1e-300;
        const double l = std::sqrt(d);
        a[j * n + j] = l;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = a[i * n + j];
            for (std::size_t k = 0; k < j; ++k) s -= a[i * n + k] * a[j * n + k];
            a[i * n + j] = s / l;
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        double s = b[i];
        for (std::size_t k = 0; k < i; ++k) s -= a[i * n + k] * b[k];
        b[i] = s / a[i * n + i];
    }
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t k = i + 1; k < n; ++k) s -= a[k * n + i] * b[k];
        b[i] = s / a[i * n + i];
    }
    return b;
}

}  // namespace

// ---------------------------------------------------------------------------
// Gaussian naive Bayes

GaussianNaiveBayes::GaussianNaiveBayes(const Matrix& x, const std::vector<int>& y, double variance_floor) {
    check_training_data(x, y);
    const std::size_t p = x[0].size();
    double count[2] = {0, 0};
    for (int c = 0; c < 2; ++c) {
        mean_[c].assign(p, 0.0);
        var_[c].assign(p, 0.0);
    }
    for (std::size_t r = 0; r < x.size(); ++r) {
        const int c = y[r] ? 1 : 0;
        ++count[c];
        for (std::size_t j = 0; j < p; ++j) mean_[c][j] += x[r][j];
    }
    for (int c = 0; c < 2; ++c)
        for (std::size_t j = 0; j < p; ++j)
            if (count[c] > 0) mean_[c][j] /= count[c];
    for (std::size_t r = 0; r < x.size(); ++r) {
        const int c = y[r] ? 1 : 0;
        for (std::size_t j = 0; j < p; ++j) {
            const double d = x[r][j] - mean_[c][j];
            var_[c][j] += d * d;
        }
    }
    for (int c = 0; c < 2; ++c) {
        prior_[c] = count[c] / static_cast<double>(x.size());
        for (std::size_t j = 0; j < p; ++j)
            var_[c][j] = std::max(count[c] > 0 ? var_[c][j] / count[c] : 0.0, variance_floor);
    }
}

GaussianNaiveBayes::GaussianNaiveBayes(const json& j) {
    for (int c = 0; c < 2; ++c) {
        prior_[c] = j.at("prior").at(static_cast<std::size_t>(c)).get<double>();
        mean_[c] = j.at("mean").at(static_cast<std::size_t>(c)).get<std::vector<double>>();
        var_[c] = j.at("var").at(static_cast<std::size_t>(c)).get<std::vector<double>>();
    }
}

double GaussianNaiveBayes::predict_proba(const std::vector<double>& row) const {
    if (prior_[1] <= 0.0) return 0.0;
    if (prior_[0] <= 0.0) return 1.0;
    double logp[2];
    for (int c = 0; c < 2; ++c) {
        double s = std::log(prior_[c]);
        for (std::size_t j = 0; j < mean_[c].size(); ++j) {
            const double d = row[j] - mean_[c][j];
            s += -0.5 * std::log(2.0 * std::numbers::pi * var_[c][j]) - d * d / (2.0 * var_[c][j]);
        }
        logp[c] = s;
    }
    return sigmoid(logp[1] - logp[0]);
}

json GaussianNaiveBayes::to_json() const {
    return {{"prior", {prior_[0], prior_[1]}}, {"mean", {mean_[0], mean_[1]}}, {"var", {var_[0], var_[1]}}};
}

// ---------------------------------------------------------------------------
// Logistic regression

LogisticRegression::LogisticRegression(const Matrix& x, const std::vector<int>& y, const ClassifierSpec& spec) {
    check_training_data(x, y);
    const std::size_t n = x.size();
    const std::size_t p = x[0].size();
    mean_.assign(p, 0.0);
    scale_.assign(p, 0.0);
    for (const auto& row : x)
        for (std::size_t j = 0; j < p; ++j) mean_[j] += row[j];
    for (auto& m : mean_) m /= static_cast<double>(n);
    for (std::size_t j = 0; j < p; ++j) {
        double ss = 0.0;
        for (const auto& row : x) ss += (row[j] - mean_[j]) * (row[j] - mean_[j]);
        const double sd = std::sqrt(ss / static_cast<double>(n));
        scale_[j] = sd > 1e-12 ? 1.0 / sd : 0.0;
    }
    const std::size_t d = p + 1;  // bias first
    std::vector<std::vector<double>> z(n, std::vector<double>(d, 1.0));
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t j = 0; j < p; ++j) z[r][j + 1] = (x[r][j] - mean_[j]) * scale_[j];

    std::vector<double> beta(d, 0.0);
    auto objective = [&](const std::vector<double>& b) {
        double s = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            double eta = 0.0;
            for (std::size_t j = 0; j < d; ++j) eta += b[j] * z[r][j];
            s += y[r] ? log_sigmoid(eta) : log_sigmoid(-eta);
        }
        for (std::size_t j = 1; j < d; ++j) s -= 0.5 * spec.l2 * b[j] * b[j];
        return s;
    };
    double obj = objective(beta);
    std::vector<double> grad(d), hess(d * d);
    for (iterations_ = 0; iterations_ < spec.max_iterations; ++iterations_) {
        std::fill(grad.begin(), grad.end(), 0.0);
        std::fill(hess.begin(), hess.end(), 0.0);
        for (std::size_t r = 0; r < n; ++r) {
            double eta = 0.0;
            for (std::size_t j = 0; j < d; ++j) eta += beta[j] * z[r][j];
            const double pr = sigmoid(eta);
            const double resid = (y[r] ? 1.0 : 0.0) - pr;
            const double w = pr * (1.0 - pr);
            for (std::size_t j = 0; j < d; ++j) {
                grad[j] += resid * z[r][j];
                for (std::size_t k = 0; k <= j; ++k) hess[j * d + k] += w * z[r][j] * z[r][k];
            }
        }
        for (std::size_t j = 0; j < d; ++j)
            for (std::size_t k = 0; k < j; ++k) hess[k * d + j] = hess[j * d + k];
        hess[0] += 1e-10;
        for (std::size_t j = 1; j < d; ++j) {
            grad[j] -= spec.l2 * beta[j];
            hess[j * d + j] += spec.l2;
        }
        if (*std::max_element(grad.begin(), grad.end(), [](double a, double b) { return std::abs(a) < std::abs(b); }) ==
            0.0)
            break;
        const auto step = solve_spd(hess, grad, d);
        double t = 1.0;
        std::vector<double> next(d);
        double next_obj = obj;
        while (true) {
            for (std::size_t j = 0; j < d; ++j) next[j] = beta[j] + t * step[j];
            next_obj = objective(next);
            if (next_obj >= obj || t < 1e-10) break;
            t *= 0.5;
        }
        double moved = 0.0;
        for (std::size_t j = 0; j < d; ++j) moved = std::max(moved, std::abs(next[j] - beta[j]));
        if (next_obj < obj) break;
        beta = next;
        obj = next_obj;
        if (moved < spec.tolerance) break;
    }
    bias_ = beta[0];
    w_.assign(beta.begin() + 1, beta.end());
}

LogisticRegression::LogisticRegression(const json& j)
    : mean_(j.at("mean").get<std::vector<double>>()),
      scale_(j.at("scale").get<std::vector<double>>()),
      w_(j.at("weights").get<std::vector<double>>()),
      bias_(j.at("bias").get<double>()),
      iterations_(j.value("iterations", 0)) {}

double LogisticRegression::predict_proba(const std::vector<double>& row) const {
    double eta = bias_;
    for (std::size_t j = 0; j < w_.size(); ++j) eta += w_[j] * (row[j] - mean_[j]) * scale_[j];
    return sigmoid(eta);
}

json LogisticRegression::to_json() const {
    return {{"mean", mean_}, {"scale", scale_}, {"weights", w_}, {"bias", bias_}, {"iterations", iterations_}};
}

// ---------------------------------------------------------------------------
// Decision tree

namespace {

/// k * log2(k) for k = 0..n, grown on demand.
const std::vector<double>& xlog_table(std::size_t n) {
    thread_local std::vector<double> table{0.0, 0.0};
    for (std::size_t k = table.size(); k <= n; ++k)
        table.push_back(static_cast<double>(k) * std::log2(static_cast<double>(k)));
    return table;
}

/// Grows a tree over distinct rows weighted by their multiplicity. Each
/// feature keeps its rows presorted; a node owns the same index range in
/// every feature's list, and splitting stably partitions all lists.
struct TreeBuilder {
    struct Entry {
        std::uint32_t rank;
        std::uint32_t row;
        std::uint32_t wy;  // weight << 1 | label
    };

    int min_leaf;
    int features_per_split;
    Rng rng;
    std::vector<DecisionTree::Node>& nodes;

    TreeBuilder(int min_leaf_, int per_split, std::uint64_t seed, std::vector<DecisionTree::Node>& out)
        : min_leaf(min_leaf_), features_per_split(per_split), rng(seed), nodes(out) {}

    std::size_t p = 0;
    std::size_t m = 0;  // distinct rows
    const double* columns = nullptr;  // column-major x
    std::size_t n_rows = 0;
    std::vector<Entry> sorted;    // p lists of m entries
    std::vector<char> goes_left;  // per row of x, for the current split
    std::vector<Entry> scratch;
    std::vector<std::size_t> feature_pool;
    std::vector<std::size_t> cand;
    const std::vector<double>* xlog_table = nullptr;

    struct Best {
        std::size_t feature;
        double gain, ratio;
        std::size_t at;  // last list index going left
    };
    std::vector<Best> found;

    double xlog(std::size_t k) const { return (*xlog_table)[k]; }
    Entry* list(std::size_t f) { return sorted.data() + f * m; }
    const double* column(std::size_t f) const { return columns + f * n_rows; }

    int build(std::size_t lo, std::size_t hi, std::size_t n, std::size_t ip) {
        const int id = static_cast<int>(nodes.size());
        nodes.push_back({});
        nodes.back().prob = static_cast<double>(ip) / static_cast<double>(n);
        nodes.back().count = static_cast<int>(n);
        const auto leaf_min = static_cast<std::size_t>(min_leaf);
        if (ip == 0 || ip == n || n < 2 * leaf_min) return id;  // keep in step with is_leaf below

        // Candidate features, in ascending order for deterministic ties.
        if (features_per_split <= 0 || static_cast<std::size_t>(features_per_split) >= p) {
            cand.resize(p);
            std::iota(cand.begin(), cand.end(), 0);
        } else {
            for (std::size_t i = 0; i < static_cast<std::size_t>(features_per_split); ++i) {
                const std::size_t j = i + rng.below(p - i);
                std::swap(feature_pool[i], feature_pool[j]);
            }
            cand.assign(feature_pool.begin(), feature_pool.begin() + features_per_split);
            std::sort(cand.begin(), cand.end());
        }

        found.clear();
        const double parent = (xlog(n) - xlog(ip) - xlog(n - ip)) / static_cast<double>(n);
        for (std::size_t f : cand) {
            const Entry* l = list(f);
            std::size_t nl = 0, left_pos = 0;
            // Minimize the children's summed count-weighted entropy.
            double best_w = std::numeric_limits<double>::infinity();
            std::size_t best_nl = 0, best_at = 0;
            for (std::size_t i = lo; i + 1 < hi; ++i) {
                const std::size_t w = l[i].wy >> 1;
                nl += w;
                left_pos += w * (l[i].wy & 1u);
                if (l[i].rank == l[i + 1].rank) continue;
                const std::size_t nr = n - nl;
                if (nl < leaf_min || nr < leaf_min) continue;
                const double cost = xlog(nl) - xlog(left_pos) - xlog(nl - left_pos) + xlog(nr) -
                                    xlog(ip - left_pos) - xlog(nr - (ip - left_pos));
                if (cost < best_w - 1e-9) {
                    best_w = cost;
                    best_nl = nl;
                    best_at = i;
                }
            }
            if (!best_nl) continue;
            const double gain = parent - best_w / static_cast<double>(n);
            const double split = (xlog(n) - xlog(best_nl) - xlog(n - best_nl)) / static_cast<double>(n);
            if (gain > 1e-12) found.push_back({f, gain, gain / split, best_at});
        }
        if (found.empty()) return id;
        double avg = 0.0;
        for (const auto& b : found) avg += b.gain;
        avg /= static_cast<double>(found.size());
        const Best* chosen = nullptr;
        for (const auto& b : found)
            if (b.gain >= avg - 1e-12 && (!chosen || b.ratio > chosen->ratio + 1e-12)) chosen = &b;

        const std::size_t f = chosen->feature;
        const double* col = column(f);
        const Entry* fl = list(f);
        const double v = col[fl[chosen->at].row], next = col[fl[chosen->at + 1].row];
        double thr = v + (next - v) / 2.0;
        if (!(thr < next)) thr = v;
        std::size_t left_count = chosen->at + 1 - lo, left_n = 0, left_ip = 0;
        for (std::size_t i = lo; i < hi; ++i) {
            const bool left = i <= chosen->at;
            goes_left[fl[i].row] = left;
            if (left) {
                left_n += fl[i].wy >> 1;
                left_ip += (fl[i].wy >> 1) * (fl[i].wy & 1u);
            }
        }
        auto is_leaf = [&](std::size_t cn, std::size_t cp) { return cp == 0 || cp == cn || cn < 2 * leaf_min; };
        const bool split_lists = !(is_leaf(left_n, left_ip) && is_leaf(n - left_n, ip - left_ip));
        for (std::size_t g = 0; split_lists && g < p; ++g) {
            if (g == f) continue;
            Entry* l = list(g);
            std::size_t a = lo, b = 0;
            // Branch-free: the side is unpredictable.
            for (std::size_t i = lo; i < hi; ++i) {
                const Entry e = l[i];
                const std::size_t g = static_cast<std::size_t>(goes_left[e.row]);
                l[a] = e;
                scratch[b] = e;
                a += g;
                b += 1 - g;
            }
            std::copy(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(b), l + a);
        }
        nodes[static_cast<std::size_t>(id)].feature = static_cast<int>(f);
        nodes[static_cast<std::size_t>(id)].threshold = thr;
        const int left = build(lo, lo + left_count, left_n, left_ip);
        const int right = build(lo + left_count, hi, n - left_n, ip - left_ip);
        nodes[static_cast<std::size_t>(id)].left = left;
        nodes[static_cast<std::size_t>(id)].right = right;
        return id;
    }
};

}  // namespace

DecisionTree::Presorted DecisionTree::presort(const Matrix& x) {
    const std::size_t p = x.empty() ? 0 : x[0].size();
    Presorted out;
    out.rows = x.size();
    out.columns.resize(p * x.size());
    for (std::size_t r = 0; r < x.size(); ++r)
        for (std::size_t f = 0; f < p; ++f) out.columns[f * x.size() + r] = x[r][f];
    out.order.assign(p, std::vector<std::uint32_t>(x.size()));
    out.rank.assign(p, std::vector<std::uint32_t>(x.size()));
    for (std::size_t f = 0; f < p; ++f) {
        auto& l = out.order[f];
        const double* col = out.columns.data() + f * x.size();
        std::iota(l.begin(), l.end(), 0u);
        std::stable_sort(l.begin(), l.end(), [&](std::uint32_t a, std::uint32_t b) { return col[a] < col[b]; });
        std::uint32_t k = 0;
        for (std::size_t i = 0; i < l.size(); ++i) {
            if (i > 0 && col[l[i - 1]] != col[l[i]]) ++k;
            out.rank[f][l[i]] = k;
        }
    }
    return out;
}

DecisionTree::Presorted DecisionTree::Presorted::select(const std::vector<std::size_t>& features) const {
    Presorted out;
    out.rows = rows;
    out.columns.reserve(features.size() * rows);
    for (std::size_t f : features) {
        out.columns.insert(out.columns.end(), columns.begin() + static_cast<std::ptrdiff_t>(f * rows),
                           columns.begin() + static_cast<std::ptrdiff_t>((f + 1) * rows));
        out.order.push_back(order.at(f));
        out.rank.push_back(rank.at(f));
    }
    return out;
}

DecisionTree::DecisionTree(const Matrix& x, const std::vector<int>& y, std::vector<std::size_t> rows, int min_leaf,
                           int features_per_split, std::uint64_t seed, const Presorted* presorted) {
    if (rows.empty()) throw InputError("cannot grow a tree on zero rows");
    TreeBuilder b(std::max(min_leaf, 1), features_per_split, seed, nodes_);
    b.p = x[0].size();
    std::vector<std::uint32_t> weight(x.size(), 0);
    for (std::size_t r : rows) ++weight.at(r);
    std::size_t pos = 0;
    for (std::size_t r : rows) pos += y[r] != 0;
    if (b.p == 0) {
        // No features: a single leaf.
        nodes_.push_back({});
        nodes_.back().prob = static_cast<double>(pos) / static_cast<double>(rows.size());
        nodes_.back().count = static_cast<int>(rows.size());
        return;
    }
    for (std::size_t r = 0; r < x.size(); ++r) b.m += weight[r] != 0;
    Presorted local;
    if (!presorted) {
        local = presort(x);
        presorted = &local;
    }
    // One slack entry: the fill below writes before deciding to keep.
    b.sorted.resize(b.p * b.m + 1);
    std::vector<std::uint32_t> wy(x.size());
    for (std::size_t r = 0; r < x.size(); ++r) wy[r] = weight[r] << 1 | (y[r] != 0 ? 1u : 0u);
    for (std::size_t f = 0; f < b.p; ++f) {
        auto* l = b.list(f);
        const auto& rank = presorted->rank[f];
        for (std::uint32_t r : presorted->order[f]) {
            *l = {rank[r], r, wy[r]};
            l += weight[r] != 0;
        }
    }
    b.columns = presorted->columns.data();
    b.n_rows = x.size();
    b.goes_left.assign(x.size(), 0);
    b.scratch.resize(b.m);
    b.feature_pool.resize(b.p);
    std::iota(b.feature_pool.begin(), b.feature_pool.end(), 0);
    nodes_.reserve(2 * b.m);
    b.xlog_table = &xlog_table(rows.size());
    b.build(0, b.m, rows.size(), pos);
}

DecisionTree::DecisionTree(const json& j) {
    const auto f = j.at("feature").get<std::vector<int>>();
    const auto t = j.at("threshold").get<std::vector<double>>();
    const auto l = j.at("left").get<std::vector<int>>();
    const auto r = j.at("right").get<std::vector<int>>();
    const auto p = j.at("prob").get<std::vector<double>>();
    const auto c = j.at("count").get<std::vector<int>>();
    for (std::size_t i = 0; i < f.size(); ++i) nodes_.push_back({f[i], t[i], l[i], r[i], p[i], c[i]});
    if (nodes_.empty()) throw InputError("tree without nodes");
}

const DecisionTree::Node& DecisionTree::leaf(const std::vector<double>& row) const {
    std::size_t i = 0;
    while (nodes_[i].feature >= 0)
        i = static_cast<std::size_t>(row[static_cast<std::size_t>(nodes_[i].feature)] <= nodes_[i].threshold
                                         ? nodes_[i].left
                                         : nodes_[i].right);
    return nodes_[i];
}

double DecisionTree::predict_proba(const std::vector<double>& row) const { return leaf(row).prob; }

json DecisionTree::to_json() const {
    json f = json::array(), t = json::array(), l = json::array(), r = json::array(), p = json::array(),
         c = json::array();
    for (const auto& n : nodes_) {
        f.push_back(n.feature);
        t.push_back(n.threshold);
        l.push_back(n.left);
        r.push_back(n.right);
        p.push_back(n.prob);
        c.push_back(n.count);
    }
    return {{"feature", f}, {"threshold", t}, {"left", l}, {"right", r}, {"prob", p}, {"count", c}};
}

// ---------------------------------------------------------------------------
// Random forest

RandomForest::RandomForest(const Matrix& x, const std::vector<int>& y, const ClassifierSpec& spec,
                           std::uint64_t seed, const DecisionTree::Presorted* presorted) {
    check_training_data(x, y);
    if (spec.trees < 1) throw InputError("forest size must be positive");
    const std::size_t n = x.size();
    const std::size_t p = x[0].size();
    const int per_split = p == 0 ? 0 : static_cast<int>(std::ceil(std::sqrt(static_cast<double>(p))));
    DecisionTree::Presorted local;
    if (!presorted) {
        local = DecisionTree::presort(x);
        presorted = &local;
    }
    trees_.reserve(static_cast<std::size_t>(spec.trees));
    for (int t = 0; t < spec.trees; ++t) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
        std::vector<std::size_t> rows(n);
        std::vector<char> oob(n, 1);
        for (auto& r : rows) {
            r = rng.below(n);
            oob[r] = 0;
        }
        trees_.emplace_back(x, y, std::move(rows), spec.min_leaf, per_split,
                            derive_seed(seed, static_cast<std::uint64_t>(t), 1), presorted);
        oob_.push_back(std::move(oob));
    }
}

RandomForest::RandomForest(const json& j) {
    for (const auto& t : j.at("trees")) trees_.emplace_back(t);
}

double RandomForest::predict_proba(const std::vector<double>& row) const {
    int votes = 0;
    for (const auto& t : trees_) votes += t.predict_proba(row) > 0.5;
    return static_cast<double>(votes) / static_cast<double>(trees_.size());
}

json RandomForest::to_json() const {
    json trees = json::array();
    for (const auto& t : trees_) trees.push_back(t.to_json());
    return {{"trees", trees}};
}

std::unique_ptr<Model> fit(const Matrix& x, const std::vector<int>& y, const ClassifierSpec& spec,
                           std::uint64_t seed, const DecisionTree::Presorted* presorted) {
    switch (spec.kind) {
        case ClassifierKind::NaiveBayes: return std::make_unique<GaussianNaiveBayes>(x, y, spec.variance_floor);
        case ClassifierKind::Logistic: return std::make_unique<LogisticRegression>(x, y, spec);
        case ClassifierKind::DecisionTree: {
            check_training_data(x, y);
            std::vector<std::size_t> rows(x.size());
            std::iota(rows.begin(), rows.end(), 0);
            return std::make_unique<DecisionTree>(x, y, std::move(rows), spec.min_leaf, 0, seed, presorted);
        }
        case ClassifierKind::RandomForest: return std::make_unique<RandomForest>(x, y, spec, seed, presorted);
    }
    throw InternalError("unknown classifier kind");
}

// ---------------------------------------------------------------------------
// Trained models

Matrix project(const Dataset& d, const std::vector<std::size_t>& columns) {
    Matrix m;
    m.reserve(d.rows());
    for (const auto& row : d.x) {
        std::vector<double> r;
        r.reserve(columns.size());
        for (std::size_t c : columns) r.push_back(row[c]);
        m.push_back(std::move(r));
    }
    return m;
}

double TrainedModel::predict_proba(const std::vector<double>& row) const {
    std::vector<double> r;
    r.reserve(columns.size());
    for (std::size_t c : columns) r.push_back(row.at(c));
    return model->predict_proba(r);
}

std::vector<double> TrainedModel::predict_proba(const Dataset& d) const {
    std::vector<double> out;
    out.reserve(d.rows());
    for (const auto& row : d.x) out.push_back(predict_proba(row));
    return out;
}

TrainedModel train(const Dataset& d, const ClassifierSpec& spec, const std::vector<std::size_t>& columns,
                   std::uint64_t seed) {
    d.require_two_classes("training");
    TrainedModel m;
    m.kind = spec.kind;
    m.columns = columns;
    for (std::size_t c : columns) m.features.push_back(d.features.at(c));
    m.seed = seed;
    m.model = fit(project(d, columns), d.y, spec, seed);
    return m;
}

std::string save_model(const TrainedModel& m) {
    json j = {{"version", 1},
              {"kind", classifier_name(m.kind)},
              {"features", m.features},
              {"columns", m.columns},
              {"seed", m.seed},
              {"repeat", m.repeat},
              {"fold", m.fold},
              {"params", m.model->to_json()}};
    return j.dump(1) + "\n";
}

TrainedModel load_model(const std::string& text) {
    TrainedModel m;
    try {
        const json j = json::parse(text);
        if (j.at("version").get<int>() != 1) throw InputError("unsupported model version");
        m.kind = classifier_from_name(j.at("kind").get<std::string>());
        m.features = j.at("features").get<std::vector<std::string>>();
        m.columns = j.at("columns").get<std::vector<std::size_t>>();
        m.seed = j.at("seed").get<std::uint64_t>();
        m.repeat = j.value("repeat", -1);
        m.fold = j.value("fold", -1);
        const json& p = j.at("params");
        switch (m.kind) {
            case ClassifierKind::NaiveBayes: m.model = std::make_shared<GaussianNaiveBayes>(p); break;
            case ClassifierKind::Logistic: m.model = std::make_shared<LogisticRegression>(p); break;
            case ClassifierKind::DecisionTree: m.model = std::make_shared<DecisionTree>(p); break;
            case ClassifierKind::RandomForest: m.model = std::make_shared<RandomForest>(p); break;
        }
    } catch (const json::exception& e) {
        throw InputError(std::string("malformed model file: ") + e.what());
    }
    return m;
}

TrainedModel bind_model(TrainedModel m, const Dataset& d) {
    m.columns.clear();
    for (const auto& f : m.features) m.columns.push_back(d.require_feature(f));
    return m;
}

}  // namespace conpredict::learn
