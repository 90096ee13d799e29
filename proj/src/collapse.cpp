#include "croc/collapse.hpp"

#include <algorithm>

#include "croc/errors.hpp"

namespace croc {

std::uint8_t indicator(std::span<const std::uint8_t> genotype_row,
                       std::span<const std::size_t> member_cols) {
    if (member_cols.empty()) throw usage_error("indicator: member set is empty");
    for (std::size_t j : member_cols) {
        if (j >= genotype_row.size())
            throw usage_error("indicator: member column " + std::to_string(j) +
                              " is outside the genotype row");
        if (genotype_row[j] > 0) return 1;
    }
    return 0;
}

namespace {

// AUC of a 0/1 indicator column given carrier counts. Two score groups:
// carriers (n1_case, n1_control) above non-carriers.
double indicator_auc(long long n1_case, long long n1_control, long long n_case,
                     long long n_control) {
    const long long n0_case = n_case - n1_case;
    const long long n0_control = n_control - n1_control;
    const double u = static_cast<double>(n1_case) * static_cast<double>(n0_control) +
                     0.5 * (static_cast<double>(n1_case) * static_cast<double>(n1_control) +
                            static_cast<double>(n0_case) * static_cast<double>(n0_control));
    return u / (static_cast<double>(n_case) * static_cast<double>(n_control));
}

struct CarrierSet {
    std::vector<std::size_t> case_rows;
    std::vector<std::size_t> control_rows;
};

} // namespace

PseudoVariant collapse_stage(const Cohort& cohort, std::span<const std::size_t> rare_pool,
                             double min_gain, const std::string& id) {
    if (rare_pool.empty()) throw usage_error("collapse_stage: rare pool is empty");

    const long long n_case = static_cast<long long>(cohort.n_cases());
    const long long n_control = static_cast<long long>(cohort.n_controls());
    const std::size_t n = cohort.n_individuals();

    // Sparse carrier lists; rare columns touch few individuals.
    std::vector<CarrierSet> carriers(rare_pool.size());
    for (std::size_t p = 0; p < rare_pool.size(); ++p) {
        const std::size_t j = rare_pool[p];
        for (std::size_t i = 0; i < n; ++i) {
            if (cohort.code(i, j) > 0) {
                if (cohort.is_case(i))
                    carriers[p].case_rows.push_back(i);
                else
                    carriers[p].control_rows.push_back(i);
            }
        }
    }

    // Seed with the best singleton AUC, ties to the lowest pool index.
    std::size_t best = 0;
    double best_auc = -1.0;
    for (std::size_t p = 0; p < rare_pool.size(); ++p) {
        const double a = indicator_auc(static_cast<long long>(carriers[p].case_rows.size()),
                                       static_cast<long long>(carriers[p].control_rows.size()),
                                       n_case, n_control);
        if (a > best_auc) {
            best_auc = a;
            best = p;
        }
    }

    PseudoVariant pv;
    pv.id = id;
    std::vector<bool> used(rare_pool.size(), false);
    std::vector<bool> covered(n, false);
    long long cov_case = 0, cov_control = 0;

    auto merge = [&](std::size_t p) {
        used[p] = true;
        pv.members.push_back(cohort.variants()[rare_pool[p]].id);
        for (std::size_t i : carriers[p].case_rows) {
            if (!covered[i]) {
                covered[i] = true;
                ++cov_case;
            }
        }
        for (std::size_t i : carriers[p].control_rows) {
            if (!covered[i]) {
                covered[i] = true;
                ++cov_control;
            }
        }
    };

    merge(best);
    double current = indicator_auc(cov_case, cov_control, n_case, n_control);
    pv.stage_auc_path.push_back(current);

    while (pv.members.size() < rare_pool.size()) {
        std::size_t next = 0;
        double next_auc = -1.0;
        for (std::size_t p = 0; p < rare_pool.size(); ++p) {
            if (used[p]) continue;
            long long add_case = 0, add_control = 0;
            for (std::size_t i : carriers[p].case_rows)
                if (!covered[i]) ++add_case;
            for (std::size_t i : carriers[p].control_rows)
                if (!covered[i]) ++add_control;
            const double a =
                indicator_auc(cov_case + add_case, cov_control + add_control, n_case, n_control);
            if (a > next_auc) {
                next_auc = a;
                next = p;
            }
        }
        if (next_auc - current < min_gain) break;
        merge(next);
        current = indicator_auc(cov_case, cov_control, n_case, n_control);
        pv.stage_auc_path.push_back(current);
    }
    return pv;
}

std::vector<PseudoVariant> multistage_collapse(const Cohort& cohort,
                                               std::span<const std::size_t> rare_variants,
                                               double min_gain) {
    std::vector<std::size_t> pool(rare_variants.begin(), rare_variants.end());
    std::vector<PseudoVariant> stages;
    while (!pool.empty()) {
        PseudoVariant pv =
            collapse_stage(cohort, pool, min_gain, "PV" + std::to_string(stages.size() + 1));
        std::vector<std::size_t> remaining;
        remaining.reserve(pool.size() - pv.members.size());
        for (std::size_t j : pool) {
            const std::string& vid = cohort.variants()[j].id;
            if (std::find(pv.members.begin(), pv.members.end(), vid) == pv.members.end())
                remaining.push_back(j);
        }
        pool = std::move(remaining);
        stages.push_back(std::move(pv));
    }
    return stages;
}

} // namespace croc
