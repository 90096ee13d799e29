#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "croc/cohort.hpp"
#include "croc/rng.hpp"

namespace croctest {

// Builds a cohort from per-variant columns (column j = codes of variant j).
inline croc::Cohort make_cohort(const std::vector<int>& phenotypes,
                                const std::vector<std::vector<std::uint8_t>>& columns,
                                double rare_threshold = 0.01) {
    const std::size_t n = phenotypes.size();
    std::vector<croc::IndividualRecord> individuals(n);
    for (std::size_t i = 0; i < n; ++i) {
        individuals[i].id = "i" + std::to_string(i + 1);
        individuals[i].phenotype = phenotypes[i];
    }
    std::vector<std::string> ids;
    for (std::size_t j = 0; j < columns.size(); ++j) ids.push_back("v" + std::to_string(j + 1));
    std::vector<std::uint8_t> genotypes(n * columns.size());
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < columns.size(); ++j) genotypes[i * columns.size() + j] = columns[j][i];
    return croc::Cohort(std::move(individuals), std::move(ids), std::move(genotypes),
                        rare_threshold);
}

// Random cohort with independent columns; codes drawn per entry from {0,1,2}
// with Pr(nonzero) <= carrier_prob.
inline croc::Cohort random_cohort(croc::Rng& rng, std::size_t n_cases, std::size_t n_controls,
                                  std::size_t n_variants, double carrier_prob,
                                  double rare_threshold = 0.01) {
    std::vector<int> phenotypes;
    for (std::size_t i = 0; i < n_cases; ++i) phenotypes.push_back(1);
    for (std::size_t i = 0; i < n_controls; ++i) phenotypes.push_back(0);
    std::vector<std::vector<std::uint8_t>> columns(n_variants);
    for (auto& col : columns) {
        col.resize(phenotypes.size());
        for (auto& g : col) {
            if (rng.u01() < carrier_prob)
                g = rng.u01() < 0.2 ? 2 : 1;
            else
                g = 0;
        }
    }
    return make_cohort(phenotypes, columns, rare_threshold);
}

inline std::filesystem::path fresh_temp_dir(const std::string& tag) {
    static std::uint64_t counter = 0;
    auto dir = std::filesystem::temp_directory_path() /
               ("croc_test_" + tag + "_" + std::to_string(++counter) + "_" +
                std::to_string(::getpid()));
    std::filesystem::create_directories(dir);
    return dir;
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace croctest
