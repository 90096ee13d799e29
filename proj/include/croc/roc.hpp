#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "croc/cohort.hpp"

#include <json.hpp>

namespace croc {

// A scorable column: either a plain variant (members empty) or a
// pseudo-common variant whose 0/1 indicator is derived from member variants.
struct LocusRef {
    std::string id;
    std::vector<std::string> members;

    bool is_pseudo() const { return !members.empty(); }
    bool operator==(const LocusRef&) const = default;
};

// Materializes the genotype codes of a locus in the given cohort: the variant
// column itself, or the carrier indicator over the member columns for a
// pseudo-variant. Missing ids raise locus_mismatch_error naming the id.
std::vector<std::uint8_t> locus_column(const Cohort& cohort, const LocusRef& locus);

struct LrEntry {
    std::vector<std::uint8_t> genotype; // one code per locus
    long long case_count = 0;
    long long control_count = 0;
    double lr = 0.0;
};

// Empirical likelihood-ratio table over the multilocus genotypes observed in
// a training cohort. With smoothing alpha:
//   lr = [(c_case + a) / (N_case + a*M)] / [(c_control + a) / (N_control + a*M)]
// where M is the number of distinct observed genotypes. With a = 0 an entry
// with zero control count gets lr = +inf and zero case count gets lr = 0.
class LrTable {
public:
    LrTable() = default;
    LrTable(std::vector<LocusRef> loci, double alpha, std::vector<LrEntry> entries,
            long long n_case_train, long long n_control_train);

    const std::vector<LocusRef>& loci() const { return loci_; }
    double alpha() const { return alpha_; }
    const std::vector<LrEntry>& entries() const { return entries_; } // genotype-sorted
    std::size_t m_k() const { return entries_.size(); }
    long long n_case_train() const { return n_case_train_; }
    long long n_control_train() const { return n_control_train_; }
    bool empty() const { return loci_.empty(); }

    // Likelihood ratio of a multilocus genotype, or nullopt if unobserved.
    std::optional<double> lookup(std::span<const std::uint8_t> genotype) const;

    nlohmann::ordered_json to_json() const;
    static LrTable from_json(const nlohmann::ordered_json& j);

private:
    std::vector<LocusRef> loci_;
    double alpha_ = 0.0;
    std::vector<LrEntry> entries_;
    long long n_case_train_ = 0;
    long long n_control_train_ = 0;
};

// Shared smoothing arithmetic; every code path that produces an LR value goes
// through this so that fitted tables and selection scans agree bit-for-bit.
double lr_value(long long case_count, long long control_count, long long n_case,
                long long n_control, double alpha, std::size_t m_k);

LrTable estimate_lr_table(const Cohort& cohort, const std::vector<LocusRef>& loci, double alpha);

// Per-individual LR score; genotypes absent from the table score 1.0.
std::vector<double> score_individuals(const LrTable& table, const Cohort& cohort);

// A group of identically scored individuals.
struct ScoreGroup {
    double score = 0.0;
    long long n_case = 0;
    long long n_control = 0;
};

// Mann-Whitney AUC with the 0.5 tie kernel over pre-grouped scores. The
// groups are sorted and merged internally; counts-only arithmetic keeps the
// result exactly equal to the nested double sum.
double auc_from_groups(std::vector<ScoreGroup> groups);

// AUC of case scores vs control scores (Eq. 2 with the Eq. 3 kernel),
// computed by rank grouping. +inf scores are permitted.
double auc(std::span<const double> case_scores, std::span<const double> control_scores);

// Literal nested-sum estimator; the independent oracle for auc().
double auc_oracle(std::span<const double> case_scores, std::span<const double> control_scores);

struct RocPoint {
    double fpr = 0.0;
    double tpr = 0.0;
};

struct RocCurve {
    std::vector<RocPoint> points; // (0,0) ... (1,1), monotone
    double auc = 0.5;
};

// ROC curve with one point per distinct score threshold (descending), ties
// grouped. The trapezoid area of the points equals auc().
RocCurve roc_points(std::span<const double> case_scores, std::span<const double> control_scores);

// TSV export: header "fpr<TAB>tpr", one point per line, 6 decimal places.
void write_roc_tsv(const RocCurve& curve, const std::filesystem::path& path);

// Splits a cohort-aligned score vector into (case scores, control scores).
std::pair<std::vector<double>, std::vector<double>> split_scores_by_phenotype(
    const Cohort& cohort, std::span<const double> scores);

} // namespace croc
