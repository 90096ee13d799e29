#include "croc/cohort.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "croc/errors.hpp"
#include "croc/rng.hpp"

namespace croc {

Cohort::Cohort(std::vector<IndividualRecord> individuals,
               std::vector<std::string> variant_ids,
               std::vector<std::uint8_t> genotypes,
               double rare_threshold,
               std::size_t missing_imputed)
    : individuals_(std::move(individuals)),
      genotypes_(std::move(genotypes)),
      rare_threshold_(rare_threshold),
      missing_imputed_(missing_imputed) {
    const std::size_t n = individuals_.size();
    const std::size_t v = variant_ids.size();
    if (n == 0) throw data_error("cohort has no individuals");
    if (genotypes_.size() != n * v)
        throw data_error("genotype matrix size does not match individuals x variants");
    if (!(rare_threshold > 0.0 && rare_threshold <= 0.5))
        throw usage_error("rare_threshold must lie in (0, 0.5]");

    for (std::size_t i = 0; i < n; ++i) {
        const int ph = individuals_[i].phenotype;
        if (ph == 1)
            ++n_cases_;
        else if (ph == 0)
            ++n_controls_;
        else
            throw data_error("individual '" + individuals_[i].id + "' has phenotype " +
                             std::to_string(ph) + "; expected 0 or 1");
    }
    if (n_cases_ == 0) throw data_error("cohort has no cases");
    if (n_controls_ == 0) throw data_error("cohort has no controls");

    variants_.resize(v);
    for (std::size_t j = 0; j < v; ++j) {
        auto [it, inserted] = variant_index_.emplace(variant_ids[j], j);
        if (!inserted) throw data_error("duplicate variant id '" + variant_ids[j] + "'");
        variants_[j].id = std::move(variant_ids[j]);
    }

    // Per-column allele counts; orient to the minor allele and classify.
    for (std::size_t j = 0; j < v; ++j) {
        std::size_t sum = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const std::uint8_t g = genotypes_[i * v + j];
            if (g > 2)
                throw data_error("genotype code " + std::to_string(int(g)) + " for variant '" +
                                 variants_[j].id + "' is outside {0,1,2}");
            sum += g;
        }
        double maf = static_cast<double>(sum) / static_cast<double>(2 * n);
        if (maf > 0.5) {
            for (std::size_t i = 0; i < n; ++i) {
                std::uint8_t& g = genotypes_[i * v + j];
                g = static_cast<std::uint8_t>(2 - g);
            }
            maf = 1.0 - maf;
        }
        variants_[j].maf = maf;
        variants_[j].vclass = maf < rare_threshold ? VariantClass::Rare : VariantClass::Common;
    }
}

std::optional<std::size_t> Cohort::find_variant(const std::string& id) const {
    auto it = variant_index_.find(id);
    if (it == variant_index_.end()) return std::nullopt;
    return it->second;
}

std::vector<std::uint8_t> Cohort::column(std::size_t variant) const {
    std::vector<std::uint8_t> out(n_individuals());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = code(i, variant);
    return out;
}

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = line.find('\t', start);
        if (pos == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return fields;
}

} // namespace

Cohort load_cohort(const std::filesystem::path& path, double rare_threshold) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open cohort file '" + path.string() + "'");

    std::string line;
    if (!std::getline(in, line)) throw parse_error("cohort file '" + path.string() + "' is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();

    auto header = split_tabs(line);
    if (header.size() < 3 || header[0] != "#id" || header[1] != "phenotype")
        throw parse_error("line 1: header must start with '#id<TAB>phenotype<TAB>...'");

    std::vector<std::string> variant_ids(header.begin() + 2, header.end());
    const std::size_t v = variant_ids.size();

    std::vector<IndividualRecord> individuals;
    std::vector<std::uint8_t> genotypes;
    std::size_t missing = 0;

    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = split_tabs(line);
        if (fields.size() != v + 2)
            throw parse_error("line " + std::to_string(line_no) + ": expected " +
                              std::to_string(v + 2) + " fields, got " +
                              std::to_string(fields.size()));
        IndividualRecord rec;
        rec.id = fields[0];
        if (fields[1] == "0")
            rec.phenotype = 0;
        else if (fields[1] == "1")
            rec.phenotype = 1;
        else
            throw data_error("line " + std::to_string(line_no) + ": individual '" + rec.id +
                             "' has phenotype '" + fields[1] + "'; expected 0 or 1");
        for (std::size_t j = 0; j < v; ++j) {
            const std::string& f = fields[j + 2];
            if (f == "0")
                genotypes.push_back(0);
            else if (f == "1")
                genotypes.push_back(1);
            else if (f == "2")
                genotypes.push_back(2);
            else if (f == ".") {
                genotypes.push_back(0);
                ++missing;
            } else
                throw data_error("line " + std::to_string(line_no) + ": genotype '" + f +
                                 "' is not one of {0,1,2,.}");
        }
        individuals.push_back(std::move(rec));
    }

    return Cohort(std::move(individuals), std::move(variant_ids), std::move(genotypes),
                  rare_threshold, missing);
}

void save_cohort(const Cohort& cohort, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw error("cannot write cohort file '" + path.string() + "'");
    out << "#id\tphenotype";
    for (const auto& vm : cohort.variants()) out << '\t' << vm.id;
    out << '\n';
    for (std::size_t i = 0; i < cohort.n_individuals(); ++i) {
        const auto& rec = cohort.individuals()[i];
        out << rec.id << '\t' << rec.phenotype;
        for (std::size_t j = 0; j < cohort.n_variants(); ++j)
            out << '\t' << int(cohort.code(i, j));
        out << '\n';
    }
    if (!out) throw error("failed while writing '" + path.string() + "'");
}

VariantPartition classify_variants(const Cohort& cohort, double rare_threshold) {
    if (!(rare_threshold > 0.0 && rare_threshold <= 0.5))
        throw usage_error("rare_threshold must lie in (0, 0.5]");
    VariantPartition part;
    for (std::size_t j = 0; j < cohort.n_variants(); ++j) {
        if (cohort.variants()[j].maf < rare_threshold)
            part.rare.push_back(j);
        else
            part.common.push_back(j);
    }
    return part;
}

Cohort drop_common_variants(const Cohort& cohort, double keep_fraction, std::uint64_t seed) {
    if (!(keep_fraction >= 0.0 && keep_fraction <= 1.0))
        throw usage_error("keep_fraction must lie in [0, 1]");
    auto part = classify_variants(cohort, cohort.rare_threshold());
    const std::size_t n_keep = static_cast<std::size_t>(
        std::ceil(keep_fraction * static_cast<double>(part.common.size())));

    Rng rng(seed);
    rng.shuffle(std::span<std::size_t>(part.common));
    part.common.resize(n_keep);

    std::vector<std::size_t> keep = part.rare;
    keep.insert(keep.end(), part.common.begin(), part.common.end());
    std::sort(keep.begin(), keep.end());

    std::vector<std::string> ids;
    ids.reserve(keep.size());
    for (std::size_t j : keep) ids.push_back(cohort.variants()[j].id);
    return select_variants(cohort, ids);
}

Cohort select_variants(const Cohort& cohort, const std::vector<std::string>& ids) {
    std::vector<std::size_t> cols;
    cols.reserve(ids.size());
    for (const auto& id : ids) {
        auto idx = cohort.find_variant(id);
        if (!idx) throw data_error("variant '" + id + "' not present in cohort");
        cols.push_back(*idx);
    }
    const std::size_t n = cohort.n_individuals();
    std::vector<std::uint8_t> genotypes;
    genotypes.reserve(n * cols.size());
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j : cols) genotypes.push_back(cohort.code(i, j));
    return Cohort(cohort.individuals(), ids, std::move(genotypes), cohort.rare_threshold(),
                  cohort.missing_imputed());
}

} // namespace croc
