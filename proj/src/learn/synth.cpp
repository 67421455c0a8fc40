#include "conpredict/learn/synth.hpp"

#include <algorithm>
#include <cmath>

#include "conpredict/common/error.hpp"
#include "conpredict/common/rng.hpp"

namespace conpredict::learn {

const std::vector<std::string>& planted_concurrency_features() {
    static const std::vector<std::string> names{"CCC", "SVC", "MuS_rmlock", "MuDuE_rmlock", "MuDuK_rmlock"};
    return names;
}

const std::vector<std::string>& planted_sequential_features() {
    static const std::vector<std::string> names{"CC", "CP", "ES", "MuS_ssdl", "MuDuE_ssdl"};
    return names;
}

nlohmann::json SynthOutput::metadata() const {
    nlohmann::json j;
    j["rows"] = data.rows();
    j["faulty"] = data.positives();
    j["shifts"] = shifts;
    j["spec"] = {{"n", spec.n},
                 {"faulty", spec.faulty},
                 {"concurrency_signal", spec.concurrency_signal},
                 {"sequential_signal", spec.sequential_signal},
                 {"noise", spec.noise},
                 {"seed", spec.seed}};
    return j;
}

SynthOutput synth(const SynthSpec& spec) {
    if (spec.n < 2) throw InputError("synth needs at least 2 rows");
    if (!(spec.faulty > 0.0 && spec.faulty < 1.0)) throw InputError("faulty fraction must lie in (0,1)");
    if (spec.concurrency_signal < 0 || spec.sequential_signal < 0) throw InputError("signal strengths must be >= 0");
    if (spec.noise < 0) throw InputError("noise must be >= 0");
    const auto n = static_cast<std::size_t>(spec.n);
    auto faulty = static_cast<std::size_t>(std::llround(spec.faulty * spec.n));
    faulty = std::clamp<std::size_t>(faulty, 1, n - 1);

    SynthOutput out;
    out.spec = spec;
    out.data.features = conpredictor_features();
    for (const auto& f : spm_features()) out.data.features.push_back(f);
    std::vector<double> shift(out.data.features.size(), 0.0);
    for (const auto& f : planted_concurrency_features()) {
        shift[out.data.require_feature(f)] = spec.concurrency_signal;
        out.shifts[f] = spec.concurrency_signal;
    }
    for (const auto& f : planted_sequential_features()) {
        shift[out.data.require_feature(f)] = spec.sequential_signal;
        out.shifts[f] = spec.sequential_signal;
    }

    Rng rng(spec.seed);
    std::vector<int> labels(n, 0);
    for (std::size_t i = 0; i < faulty; ++i) labels[i] = 1;
    rng.shuffle(labels);
    for (std::size_t r = 0; r < n; ++r) {
        std::vector<double> row(out.data.features.size());
        for (std::size_t c = 0; c < row.size(); ++c)
            row[c] = spec.noise * rng.normal() + (labels[r] ? shift[c] : 0.0);
        const double nloc = 5.0 + std::floor(std::exp(3.0 + 0.5 * rng.normal()));
        const double bugs = labels[r] ? 1.0 + static_cast<double>(rng.below(3)) : 0.0;
        out.data.append_row({"synth", "f" + std::to_string(r)}, std::move(row), labels[r], nloc, bugs);
    }
    return out;
}

}  // namespace conpredict::learn
