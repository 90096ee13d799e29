#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace croc {

enum class VariantClass { Rare, Common };

struct IndividualRecord {
    std::string id;
    int phenotype = 0; // 1 = case, 0 = control
};

struct VariantMeta {
    std::string id;
    double maf = 0.0; // minor-allele oriented, <= 0.5
    VariantClass vclass = VariantClass::Common;
};

// Partition of variant column indices into rare and common, in column order.
struct VariantPartition {
    std::vector<std::size_t> rare;
    std::vector<std::size_t> common;
};

// Immutable case-control genotype matrix. Genotype codes count minor alleles
// (0, 1 or 2); columns whose raw allele frequency exceeds 0.5 are recoded as
// 2 - g at construction so that maf <= 0.5 always holds.
class Cohort {
public:
    Cohort(std::vector<IndividualRecord> individuals,
           std::vector<std::string> variant_ids,
           std::vector<std::uint8_t> genotypes, // row-major, individuals x variants
           double rare_threshold = 0.01,
           std::size_t missing_imputed = 0);

    std::size_t n_individuals() const { return individuals_.size(); }
    std::size_t n_variants() const { return variants_.size(); }
    std::size_t n_cases() const { return n_cases_; }
    std::size_t n_controls() const { return n_controls_; }
    double rare_threshold() const { return rare_threshold_; }

    // Number of '.' genotype fields imputed to 0 when the cohort was parsed.
    std::size_t missing_imputed() const { return missing_imputed_; }

    const std::vector<IndividualRecord>& individuals() const { return individuals_; }
    const std::vector<VariantMeta>& variants() const { return variants_; }

    std::uint8_t code(std::size_t individual, std::size_t variant) const {
        return genotypes_[individual * variants_.size() + variant];
    }
    std::span<const std::uint8_t> row(std::size_t individual) const {
        return {genotypes_.data() + individual * variants_.size(), variants_.size()};
    }
    std::span<const std::uint8_t> genotypes() const { return genotypes_; }

    std::optional<std::size_t> find_variant(const std::string& id) const;

    bool is_case(std::size_t individual) const { return individuals_[individual].phenotype == 1; }

    // Copy of one genotype column.
    std::vector<std::uint8_t> column(std::size_t variant) const;

private:
    std::vector<IndividualRecord> individuals_;
    std::vector<VariantMeta> variants_;
    std::vector<std::uint8_t> genotypes_;
    std::unordered_map<std::string, std::size_t> variant_index_;
    std::size_t n_cases_ = 0;
    std::size_t n_controls_ = 0;
    double rare_threshold_ = 0.01;
    std::size_t missing_imputed_ = 0;
};

// Reads a genotype-TSV cohort file:
//   #id<TAB>phenotype<TAB>v1<TAB>v2...
// one row per individual, phenotype in {0,1}, genotype fields in {0,1,2,.}.
// '.' is imputed to 0 and counted in Cohort::missing_imputed().
Cohort load_cohort(const std::filesystem::path& path, double rare_threshold = 0.01);

// Writes the cohort back out in the same format (oriented codes, LF endings).
void save_cohort(const Cohort& cohort, const std::filesystem::path& path);

// Strict-inequality partition: rare iff maf < rare_threshold.
// Accepts thresholds in (0, 0.5].
VariantPartition classify_variants(const Cohort& cohort, double rare_threshold);

// Keeps every rare variant plus a seeded uniform sample of
// ceil(keep_fraction * n_common) common variants, preserving column order.
Cohort drop_common_variants(const Cohort& cohort, double keep_fraction, std::uint64_t seed);

// Restriction of the cohort to the given variant ids (in the cohort's own
// column order). Unknown ids raise data_error.
Cohort select_variants(const Cohort& cohort, const std::vector<std::string>& ids);

} // namespace croc
