#include "conpredict/stats/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "conpredict/common/error.hpp"

namespace conpredict::stats {

namespace {

void check_sizes(std::size_t a, std::size_t b) {
    if (a != b) throw InputError("score and label counts differ");
}

void check_effort(const std::vector<double>& prob, const std::vector<double>& nloc, const std::vector<double>& bugs) {
    check_sizes(prob.size(), nloc.size());
    check_sizes(prob.size(), bugs.size());
    for (double v : nloc)
        if (!(v > 0)) throw InputError("effort measures need positive nloc for every function");
    for (double v : bugs)
        if (!(v >= 0)) throw InputError("bug counts must be non-negative");
}

}  // namespace

Confusion confusion(const std::vector<double>& prob, const std::vector<int>& labels, double threshold) {
    check_sizes(prob.size(), labels.size());
    Confusion c;
    for (std::size_t i = 0; i < prob.size(); ++i) {
        const bool predicted = prob[i] >= threshold;
        if (labels[i]) (predicted ? c.tp : c.fn)++;
        else (predicted ? c.fp : c.tn)++;
    }
    return c;
}

Prf prf(const Confusion& c) {
    Prf r;
    if (c.tp + c.fp > 0) r.precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
    if (c.tp + c.fn > 0) r.recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
    if (r.precision + r.recall > 0) r.f1 = 2 * r.precision * r.recall / (r.precision + r.recall);
    return r;
}

double f1_score(const std::vector<double>& prob, const std::vector<int>& labels, double threshold) {
    return prf(confusion(prob, labels, threshold)).f1;
}

double auc(const std::vector<double>& prob, const std::vector<int>& labels) {
    check_sizes(prob.size(), labels.size());
    const std::size_t n = prob.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return prob[a] < prob[b]; });
    double rank_sum = 0.0;
    double pos = 0.0;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && prob[idx[j]] == prob[idx[i]]) ++j;
        const double mid = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t t = i; t < j; ++t)
            if (labels[idx[t]]) {
                rank_sum += mid;
                ++pos;
            }
        i = j;
    }
    const double neg = static_cast<double>(n) - pos;
    if (pos == 0 || neg == 0) throw InputError("AUC needs both classes");
    return (rank_sum - pos * (pos + 1) / 2.0) / (pos * neg);
}

double auc_pairs(const std::vector<double>& prob, const std::vector<int>& labels) {
    check_sizes(prob.size(), labels.size());
    double wins = 0.0, pairs = 0.0;
    for (std::size_t i = 0; i < prob.size(); ++i) {
        if (!labels[i]) continue;
        for (std::size_t j = 0; j < prob.size(); ++j) {
            if (labels[j]) continue;
            pairs += 1;
            if (prob[i] > prob[j]) wins += 1;
            else if (prob[i] == prob[j]) wins += 0.5;
        }
    }
    if (pairs == 0) throw InputError("AUC needs both classes");
    return wins / pairs;
}

std::vector<std::size_t> inspection_order(const std::vector<double>& prob, const std::vector<double>& nloc) {
    std::vector<std::size_t> idx(prob.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (prob[a] != prob[b]) return prob[a] > prob[b];
        return nloc[a] < nloc[b];
    });
    return idx;
}

double pofb20(const std::vector<double>& prob, const std::vector<double>& nloc, const std::vector<double>& bugs) {
    check_effort(prob, nloc, bugs);
    const double total_loc = std::accumulate(nloc.begin(), nloc.end(), 0.0);
    const double total_bugs = std::accumulate(bugs.begin(), bugs.end(), 0.0);
    if (total_bugs == 0) return 0.0;
    const double budget = 0.2 * total_loc;
    double loc = 0.0, found = 0.0;
    for (std::size_t i : inspection_order(prob, nloc)) {
        if (loc >= budget) break;
        loc += nloc[i];
        found += bugs[i];
    }
    return found / total_bugs;
}

std::vector<std::pair<double, double>> effort_curve(const std::vector<std::size_t>& order,
                                                    const std::vector<double>& nloc,
                                                    const std::vector<double>& bugs) {
    const double total_loc = std::accumulate(nloc.begin(), nloc.end(), 0.0);
    const double total_bugs = std::accumulate(bugs.begin(), bugs.end(), 0.0);
    std::vector<std::pair<double, double>> pts{{0.0, 0.0}};
    double loc = 0.0, found = 0.0;
    for (std::size_t i : order) {
        loc += nloc[i];
        found += bugs[i];
        pts.emplace_back(loc / total_loc, total_bugs > 0 ? found / total_bugs : 0.0);
    }
    pts.back().first = 1.0;
    return pts;
}

namespace {

/// Value of a piecewise-linear curve with strictly increasing x at x.
double curve_at(const std::vector<std::pair<double, double>>& c, double x) {
    auto it = std::lower_bound(c.begin(), c.end(), x, [](const auto& p, double v) { return p.first < v; });
    if (it == c.begin()) return c.front().second;
    if (it == c.end()) return c.back().second;
    const auto& [x1, y1] = *it;
    const auto& [x0, y0] = *(it - 1);
    return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
}

/// Integral of |f - g| for piecewise-linear curves sharing [0,1].
double area_between(const std::vector<std::pair<double, double>>& f, const std::vector<std::pair<double, double>>& g) {
    std::vector<double> xs;
    for (const auto& p : f) xs.push_back(p.first);
    for (const auto& p : g) xs.push_back(p.first);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    double area = 0.0;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        const double a = xs[i], b = xs[i + 1];
        const double da = curve_at(f, a) - curve_at(g, a);
        const double db = curve_at(f, b) - curve_at(g, b);
        if ((da >= 0) == (db >= 0) || da == 0 || db == 0) {
            area += (b - a) * (std::abs(da) + std::abs(db)) / 2.0;
        } else {
            const double t = da / (da - db);  // zero crossing
            area += (b - a) * (t * std::abs(da) + (1 - t) * std::abs(db)) / 2.0;
        }
    }
    return area;
}

}  // namespace

std::vector<std::size_t> optimal_order(const std::vector<double>& nloc, const std::vector<double>& bugs) {
    check_sizes(nloc.size(), bugs.size());
    std::vector<std::size_t> order(nloc.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return bugs[a] / nloc[a] > bugs[b] / nloc[b]; });
    return order;
}

double popt(const std::vector<double>& prob, const std::vector<double>& nloc, const std::vector<double>& bugs) {
    check_effort(prob, nloc, bugs);
    if (prob.empty()) throw InputError("Popt of an empty ordering");
    return 1.0 - area_between(effort_curve(optimal_order(nloc, bugs), nloc, bugs),
                              effort_curve(inspection_order(prob, nloc), nloc, bugs));
}

EvalReport evaluate(const std::vector<double>& prob, const std::vector<int>& labels, const std::vector<double>& nloc,
                    const std::vector<double>& bugs, double threshold) {
    EvalReport r;
    r.threshold = threshold;
    r.matrix = confusion(prob, labels, threshold);
    const auto p = prf(r.matrix);
    r.precision = p.precision;
    r.recall = p.recall;
    r.f1 = p.f1;
    r.auc = auc(prob, labels);
    r.pofb20 = pofb20(prob, nloc, bugs);
    r.popt = popt(prob, nloc, bugs);
    return r;
}

}  // namespace conpredict::stats
