#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "croc/cohort.hpp"
#include "croc/roc.hpp"

namespace croc {

// One collapsed pseudo-common variant: an ordered set of rare variants whose
// joint carrier indicator forms a 0/1 column.
struct PseudoVariant {
    std::string id; // "PV1", "PV2", ...
    std::vector<std::string> members;
    std::vector<double> stage_auc_path; // indicator AUC after each added member

    LocusRef as_locus() const { return LocusRef{id, members}; }
};

// Carrier indicator (Eq.-4 style): 1 iff any member column of the genotype
// row holds a nonzero code. member_cols index into the row.
std::uint8_t indicator(std::span<const std::uint8_t> genotype_row,
                       std::span<const std::size_t> member_cols);

// Greedily grows one pseudo-variant from the rare pool: seeds with the best
// singleton-indicator AUC (ties -> lowest pool index), then keeps adding the
// pool variant that raises the indicator AUC the most, stopping when the best
// gain falls below min_gain or the pool is exhausted. The AUC path may sit
// below 0.5 for protective carrier sets; no flipping is applied.
PseudoVariant collapse_stage(const Cohort& cohort, std::span<const std::size_t> rare_pool,
                             double min_gain, const std::string& id = "PV1");

// Repeats collapse_stage on the shrinking pool until no rare variants remain.
// The returned stages are disjoint and exhaust rare_variants.
std::vector<PseudoVariant> multistage_collapse(const Cohort& cohort,
                                               std::span<const std::size_t> rare_variants,
                                               double min_gain);

} // namespace croc
