#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "croc/cohort.hpp"
#include "croc/collapse.hpp"
#include "croc/roc.hpp"

#include <json.hpp>

namespace croc {

struct FitConfig {
    double alpha = 0.5;          // LR smoothing used for fitting
    double rare_threshold = 0.01;
    int folds = 10;
    double min_gain = 1e-9;      // minimal training-AUC improvement per step
    int max_k = 0;               // 0 -> min(#candidates, 20)
    std::uint64_t seed = 0;

    int effective_max_k(std::size_t n_candidates) const;
};

struct ModelStep {
    LocusRef locus;
    double train_auc = 0.5; // training AUC after adding this locus
};

struct ModelPath {
    double base_auc = 0.5;
    std::vector<ModelStep> steps;
};

struct CvPoint {
    int k = 0;
    double mean_auc = 0.5; // mean held-out AUC at model size k
};

// The fitted, scorable artifact: selected loci plus the LR table trained on
// the full training cohort.
struct PredictionModel {
    std::vector<LocusRef> loci;
    LrTable lr_table;
    double train_auc = 0.5;
    int chosen_k = 0;
    std::vector<CvPoint> cv_auc_by_size;
    std::vector<PseudoVariant> pseudo_variants; // collapsing manifest (empty for FROC)
    FitConfig config;

    nlohmann::ordered_json to_json() const;
    static PredictionModel from_json(const nlohmann::ordered_json& j);
};

// Greedy forward selection maximizing training AUC. Each step refits the LR
// table on current loci + candidate; the largest AUC wins (ties -> lowest
// candidate index); stops when the best improvement is below min_gain or
// max_k is reached.
ModelPath forward_select(const Cohort& cohort, const std::vector<LocusRef>& candidates,
                         int max_k, double min_gain, double alpha);

// Phenotype-stratified k-fold cross validation; forward selection is re-run
// inside each fold's training part. A fold shorter than k contributes its
// last available model; empty folds (more folds than individuals) are
// skipped. Returns the mean held-out AUC per model size.
std::vector<CvPoint> cross_validate_path(const Cohort& cohort,
                                         const std::vector<LocusRef>& candidates,
                                         const FitConfig& config);

// FROC: cross-validate to choose the model size, then refit on the full
// cohort truncated to chosen_k steps.
PredictionModel fit_froc(const Cohort& cohort, const std::vector<LocusRef>& candidates,
                         const FitConfig& config);

// FROC over every variant column of the cohort.
PredictionModel fit_froc(const Cohort& cohort, const FitConfig& config);

// CROC: multistage-collapse the rare variants into pseudo-common indicator
// columns, then run the FROC machinery over common + pseudo-common
// candidates. With no rare variants this is exactly fit_froc.
PredictionModel fit_croc(const Cohort& cohort, const FitConfig& config);

// Scores a cohort with a trained model (unseen genotypes score 1.0;
// pseudo-variant columns are re-derived from member lists).
std::pair<double, RocCurve> evaluate_model(const PredictionModel& model, const Cohort& cohort);

void save_model(const PredictionModel& model, const std::filesystem::path& path);
PredictionModel load_model(const std::filesystem::path& path);

} // namespace croc
