#pragma once

#include <string_view>
#include <vector>

namespace conpredict::stats {

enum class Magnitude { Negligible, Small, Medium, Large };

std::string_view magnitude_name(Magnitude m);
/// [0, 0.147) negligible, [0.147, 0.33) small, [0.33, 0.474) medium, else large.
Magnitude magnitude(double d);

struct EffectSize {
    double d = 0.0;
    Magnitude magnitude = Magnitude::Negligible;
    double w = 0.0;  // R_a - m(m+1)/2, mid-ranks over the pooled sample
    std::size_t m = 0, n = 0;
    double p = 1.0;  // one-sided, a greater than b
};

/// Mid-ranks (1-based) of the pooled sample a ++ b.
std::vector<double> pooled_ranks(const std::vector<double>& a, const std::vector<double>& b);

/// W = R_a - m(m+1)/2, the number of (a, b) pairs with a > b, ties 1/2.
double rank_sum_w(const std::vector<double>& a, const std::vector<double>& b);

/// One-sided p-value for "a tends to exceed b". Exact over all splits of
/// the pooled mid-ranks when m+n <= 12; otherwise the tie-corrected normal
/// approximation with continuity correction.
double wilcoxon_greater(const std::vector<double>& a, const std::vector<double>& b);
/// Two-sided: min(1, 2 * min of the one-sided p-values).
double wilcoxon_two_sided(const std::vector<double>& a, const std::vector<double>& b);

/// d = 2W/mn - 1.
double cliffs_delta_rank(const std::vector<double>& a, const std::vector<double>& b);
/// d = (#(a>b) - #(a<b)) / mn.
double cliffs_delta_pairs(const std::vector<double>& a, const std::vector<double>& b);

/// Effect of a over b with the one-sided p-value.
EffectSize cliffs_delta(const std::vector<double>& a, const std::vector<double>& b);

double median(std::vector<double> v);

}  // namespace conpredict::stats
