#include "conpredict/stats/effect.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "conpredict/common/error.hpp"

namespace conpredict::stats {

namespace {

void require_samples(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.empty() || b.empty()) throw InputError("rank tests need two non-empty samples");
    for (double v : a)
        if (!std::isfinite(v)) throw InputError("non-finite sample value");
    for (double v : b)
        if (!std::isfinite(v)) throw InputError("non-finite sample value");
}

double upper_normal(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

/// P(sum of m of the ranks >= observed) over all equally likely subsets.
double exact_upper(const std::vector<double>& ranks, std::size_t m, double observed) {
    const std::size_t n = ranks.size();
    std::size_t hits = 0, total = 0;
    std::vector<char> pick(n, 0);
    std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(m), 1);
    std::sort(pick.begin(), pick.end());
    do {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (pick[i]) s += ranks[i];
        ++total;
        if (s >= observed - 1e-9) ++hits;
    } while (std::next_permutation(pick.begin(), pick.end()));
    return static_cast<double>(hits) / static_cast<double>(total);
}

}  // namespace

std::string_view magnitude_name(Magnitude m) {
    switch (m) {
        case Magnitude::Negligible: return "negligible";
        case Magnitude::Small: return "small";
        case Magnitude::Medium: return "medium";
        case Magnitude::Large: return "large";
    }
    return "?";
}

Magnitude magnitude(double d) {
    const double a = std::abs(d);
    if (a < 0.147) return Magnitude::Negligible;
    if (a < 0.33) return Magnitude::Small;
    if (a < 0.474) return Magnitude::Medium;
    return Magnitude::Large;
}

std::vector<double> pooled_ranks(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> all(a);
    all.insert(all.end(), b.begin(), b.end());
    std::vector<std::size_t> idx(all.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) { return all[i] < all[j]; });
    std::vector<double> ranks(all.size());
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i;
        while (j < idx.size() && all[idx[j]] == all[idx[i]]) ++j;
        const double mid = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t t = i; t < j; ++t) ranks[idx[t]] = mid;
        i = j;
    }
    return ranks;
}

double rank_sum_w(const std::vector<double>& a, const std::vector<double>& b) {
    require_samples(a, b);
    const auto ranks = pooled_ranks(a, b);
    const double m = static_cast<double>(a.size());
    const double ra = std::accumulate(ranks.begin(), ranks.begin() + static_cast<std::ptrdiff_t>(a.size()), 0.0);
    return ra - m * (m + 1) / 2.0;
}

double wilcoxon_greater(const std::vector<double>& a, const std::vector<double>& b) {
    require_samples(a, b);
    const auto ranks = pooled_ranks(a, b);
    const std::size_t m = a.size(), n = b.size(), total = m + n;
    const double ra = std::accumulate(ranks.begin(), ranks.begin() + static_cast<std::ptrdiff_t>(m), 0.0);
    if (total <= 12) return exact_upper(ranks, m, ra);

    const double md = static_cast<double>(m), nd = static_cast<double>(n), N = static_cast<double>(total);
    const double w = ra - md * (md + 1) / 2.0;
    // Tie correction from the sizes of tied groups.
    std::vector<double> sorted(ranks);
    std::sort(sorted.begin(), sorted.end());
    double ties = 0.0;
    for (std::size_t i = 0; i < sorted.size();) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
        const double t = static_cast<double>(j - i);
        ties += t * t * t - t;
        i = j;
    }
    const double var = md * nd / 12.0 * ((N + 1) - ties / (N * (N - 1)));
    if (var <= 0) return 1.0;
    const double z = (w - md * nd / 2.0 - 0.5) / std::sqrt(var);
    return upper_normal(z);
}

double wilcoxon_two_sided(const std::vector<double>& a, const std::vector<double>& b) {
    return std::min(1.0, 2.0 * std::min(wilcoxon_greater(a, b), wilcoxon_greater(b, a)));
}

double cliffs_delta_rank(const std::vector<double>& a, const std::vector<double>& b) {
    const double w = rank_sum_w(a, b);
    return 2.0 * w / (static_cast<double>(a.size()) * static_cast<double>(b.size())) - 1.0;
}

double cliffs_delta_pairs(const std::vector<double>& a, const std::vector<double>& b) {
    require_samples(a, b);
    long long more = 0, less = 0;
    for (double x : a)
        for (double y : b) {
            if (x > y) ++more;
            else if (x < y) ++less;
        }
    return static_cast<double>(more - less) / (static_cast<double>(a.size()) * static_cast<double>(b.size()));
}

EffectSize cliffs_delta(const std::vector<double>& a, const std::vector<double>& b) {
    EffectSize e;
    e.w = rank_sum_w(a, b);
    e.m = a.size();
    e.n = b.size();
    e.d = 2.0 * e.w / (static_cast<double>(e.m) * static_cast<double>(e.n)) - 1.0;
    e.magnitude = magnitude(e.d);
    e.p = wilcoxon_greater(a, b);
    return e;
}

double median(std::vector<double> v) {
    if (v.empty()) throw InputError("median of an empty sample");
    std::sort(v.begin(), v.end());
    const std::size_t h = v.size() / 2;
    return v.size() % 2 ? v[h] : (v[h - 1] + v[h]) / 2.0;
}

}  // namespace conpredict::stats
