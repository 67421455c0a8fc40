#include "conpredict/learn/smote.hpp"

#include <algorithm>

#include "conpredict/common/error.hpp"
#include "conpredict/common/rng.hpp"

namespace conpredict::learn {

SmoteResult smote(const Dataset& d, int percent, int k, std::uint64_t seed) {
    if (percent < 0) throw InputError("SMOTE percent must be non-negative");
    if (k < 1) throw InputError("SMOTE k must be positive");
    SmoteResult out;
    out.data = d;
    const std::size_t pos = d.positives();
    out.minority_label = pos <= d.rows() - pos ? 1 : 0;
    if (percent == 0) return out;

    std::vector<std::size_t> minority;
    for (std::size_t r = 0; r < d.rows(); ++r)
        if (d.y[r] == out.minority_label) minority.push_back(r);
    const std::size_t m = minority.size();
    if (m < 2) throw InputError("SMOTE needs at least 2 minority rows (found " + std::to_string(m) + ")");
    const std::size_t kk = std::min<std::size_t>(static_cast<std::size_t>(k), m - 1);
    const auto count = static_cast<std::size_t>(percent) * m / 100;

    // k nearest minority neighbors of each minority row, by position in `minority`.
    std::vector<std::vector<std::size_t>> nearest(m);
    std::vector<std::pair<double, std::size_t>> dist;
    for (std::size_t i = 0; i < m; ++i) {
        dist.clear();
        const auto& a = d.x[minority[i]];
        for (std::size_t j = 0; j < m; ++j) {
            if (j == i) continue;
            const auto& b = d.x[minority[j]];
            double s = 0.0;
            for (std::size_t c = 0; c < a.size(); ++c) s += (a[c] - b[c]) * (a[c] - b[c]);
            dist.emplace_back(s, j);
        }
        std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(kk), dist.end());
        for (std::size_t t = 0; t < kk; ++t) nearest[i].push_back(dist[t].second);
    }

    Rng rng(seed);
    std::vector<std::size_t> order(m);
    for (std::size_t i = 0; i < m; ++i) order[i] = i;
    rng.shuffle(order);
    for (std::size_t s = 0; s < count; ++s) {
        const std::size_t i = order[s % m];
        const std::size_t j = nearest[i][rng.below(kk)];
        const double u = rng.uniform();
        const auto& a = d.x[minority[i]];
        const auto& b = d.x[minority[j]];
        std::vector<double> row(a.size());
        for (std::size_t c = 0; c < a.size(); ++c) row[c] = a[c] + u * (b[c] - a[c]);
        const auto base = minority[i];
        RowKey key{d.keys[base].program, d.keys[base].function + "+smote" + std::to_string(s)};
        out.data.append_row(std::move(key), std::move(row), out.minority_label, d.nloc[base],
                            out.minority_label ? d.bugs[base] : 0.0);
        out.synthetic.push_back({base, minority[j], u});
    }
    return out;
}

}  // namespace conpredict::learn
