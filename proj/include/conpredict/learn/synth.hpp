#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "conpredict/learn/dataset.hpp"
#include "json.hpp"

namespace conpredict::learn {

struct SynthSpec {
    int n = 500;
    double faulty = 0.1;
    /// Shift added to faulty rows on each planted concurrency column.
    double concurrency_signal = 2.5;
    /// Shift added to faulty rows on each planted sequential column.
    double sequential_signal = 0.5;
    /// Standard deviation of the Gaussian noise on every column.
    double noise = 1.0;
    std::uint64_t seed = 1;
};

/// Planted columns of each family.
const std::vector<std::string>& planted_concurrency_features();
const std::vector<std::string>& planted_sequential_features();

struct SynthOutput {
    SynthSpec spec;
    Dataset data;
    std::map<std::string, double> shifts;  // per planted column
    nlohmann::json metadata() const;
};

/// Rows carry every ConPredictor and sequential-baseline column. The faulty
/// count is round(n * faulty), placed at shuffled positions.
SynthOutput synth(const SynthSpec& spec);

}  // namespace conpredict::learn
