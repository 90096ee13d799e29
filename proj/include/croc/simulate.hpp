#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "croc/cohort.hpp"

#include <json.hpp>

namespace croc {

struct VariantSpec {
    double maf = 0.0;
    double beta = 0.0; // per-copy log-odds effect
};

// Generative model for synthetic case-control cohorts: independent
// Binomial(2, maf) genotypes and a logistic disease liability
//   P(case) = logistic(beta0 + sum_j beta_j * g_j).
// Case/control quotas are filled by rejection sampling.
struct SimSpec {
    long long n_cases = 0;
    long long n_controls = 0;
    std::vector<VariantSpec> common_variants; // ids cv1, cv2, ...
    std::vector<VariantSpec> rare_variants;   // ids rv1, rv2, ...
    double beta0 = 0.0;
    std::uint64_t seed = 0;
    long long max_attempts = 10'000'000; // draw cap before simulation_error
    double rare_threshold = 0.01;

    void validate() const;

    nlohmann::ordered_json to_json() const;
    static SimSpec from_json(const nlohmann::ordered_json& j);
};

struct SimStats {
    long long draws = 0;      // individuals drawn, accepted or not
    long long case_draws = 0; // draws whose liability came up diseased
};

Cohort simulate_cohort(const SimSpec& spec, SimStats* stats = nullptr);

// Independent replicates from per-replicate derived seeds; replicate i uses
// seed derive_seed(spec.seed, i).
std::vector<Cohort> simulate_replicates(const SimSpec& spec, int n_replicates);

SimSpec load_sim_spec(const std::filesystem::path& path);
void save_sim_spec(const SimSpec& spec, const std::filesystem::path& path);

} // namespace croc
