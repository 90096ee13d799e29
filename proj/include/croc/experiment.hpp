#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "croc/froc.hpp"
#include "croc/simulate.hpp"

#include <json.hpp>

namespace croc {

enum class Method { froc, croc };

std::string method_name(Method m);
Method method_from_name(const std::string& name);

struct ReplicateRow {
    int replicate = 0;
    double train_auc = 0.5;
    double test_auc = 0.5;
    int chosen_k = 0;
    std::vector<std::string> loci;
};

struct MethodBlock {
    Method method = Method::froc;
    int n_replicates = 0;
    double mean_auc = 0.5;  // over test AUCs
    double sd_auc = 0.0;    // n-1 denominator
    double wall_time_seconds = 0.0; // fit time only; reported on console, not in files
    std::vector<ReplicateRow> rows;
};

struct ExperimentReport {
    std::uint64_t seed = 0;
    FitConfig config;
    int n_replicates = 0;
    std::vector<MethodBlock> methods;
};

// Train-on-one-replicate / evaluate-on-another protocol: pair i trains every
// method on an independent replicate and evaluates on a second one.
ExperimentReport run_experiment(const SimSpec& spec, const std::vector<Method>& methods,
                                int n_replicates, const FitConfig& config, int jobs = 1);

struct SweepRow {
    double keep_fraction = 1.0;
    Method method = Method::froc;
    int n_replicates = 0;
    double mean_auc = 0.5;
    double sd_auc = 0.0;
    double ci_low = 0.0;  // normal-approximation 95% interval
    double ci_high = 0.0;
};

// Common-variant dropout sweep: for each keep fraction, train/test cohorts
// are reduced with drop_common_variants (the test replicate is projected onto
// the training replicate's surviving columns) and the experiment re-run.
std::vector<SweepRow> run_sweep(const SimSpec& spec, const std::vector<double>& keep_fractions,
                                const std::vector<Method>& methods, int n_replicates,
                                const FitConfig& config, int jobs = 1);

// Report writers. All AUC fields are written with 6 decimal places; the JSON
// mirrors carry exactly the numbers printed in the TSV.
void write_experiment_tsv(const ExperimentReport& report, const std::filesystem::path& path);
void write_experiment_json(const ExperimentReport& report, const std::filesystem::path& path);
void write_sweep_tsv(const ExperimentReport& header, const std::vector<SweepRow>& rows,
                     const std::filesystem::path& path);
void write_sweep_json(const ExperimentReport& header, const std::vector<SweepRow>& rows,
                      const std::filesystem::path& path);

// Parses a TSV written by write_experiment_tsv (used by report round-trip
// checks and downstream tooling).
ExperimentReport parse_experiment_tsv(const std::filesystem::path& path);

} // namespace croc
