#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace kawasaki {

inline constexpr const char* kToolVersion = "0.1.0";

// Serializes with every double written as %.17g; key order is sorted, so the
// output is a deterministic function of the value.
std::string dump17(const nlohmann::json& j, int indent = 1);

// Common metadata block. `seed` < 0 omits the seed.
nlohmann::json metadata(const nlohmann::json& parameters, long long seed = -1);

nlohmann::json rates_report(int n, int L);
nlohmann::json meso_report(int n, int L);
nlohmann::json elementary_report(int n, int L);
nlohmann::json taxonomy_report(int n, int L);

struct ValidateOptions {
    int n = 4, L = 12;
    std::vector<double> betas{5, 6, 7};
    int excursions = 500;
    std::uint64_t seed = 1;
    int workers = 0;
    std::uint64_t budget = 100'000'000;
};
nlohmann::json validate_report(const ValidateOptions& o);

// Event stream of one trajectory from the ground square at the origin until
// `excursions` changes of ground state, as CSV with '#' metadata lines.
std::string simulate_csv(int n, int L, double beta, int excursions, std::uint64_t seed,
                         std::uint64_t budget);

// Multinomial sampling floor of the TV distance: quantiles of TV(empirical, p)
// over `reps` samples of size N drawn from p itself.
struct TvFloor {
    double median = 0, q95 = 0;
};
TvFloor tv_sampling_floor(const std::vector<double>& p, int N, int reps, std::uint64_t seed);

}  // namespace kawasaki
