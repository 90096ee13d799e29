#include "croc/simulate.hpp"

#include <cmath>
#include <fstream>

#include "croc/errors.hpp"
#include "croc/rng.hpp"

namespace croc {

void SimSpec::validate() const {
    if (n_cases < 1 || n_controls < 1)
        throw usage_error("simulation spec: n_cases and n_controls must be >= 1");
    if (common_variants.empty() && rare_variants.empty())
        throw usage_error("simulation spec: no variants given");
    if (max_attempts < 1) throw usage_error("simulation spec: max_attempts must be >= 1");
    for (const auto& v : common_variants) {
        if (!(v.maf > 0.0 && v.maf <= 0.5))
            throw usage_error("simulation spec: common maf must lie in (0, 0.5]");
        if (v.maf < rare_threshold)
            throw usage_error("simulation spec: common variant maf below the rare threshold");
    }
    for (const auto& v : rare_variants) {
        if (!(v.maf > 0.0 && v.maf <= 0.5))
            throw usage_error("simulation spec: rare maf must lie in (0, 0.5]");
        if (v.maf >= rare_threshold)
            throw usage_error("simulation spec: rare variant maf at or above the rare threshold");
    }
}

namespace {

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

} // namespace

Cohort simulate_cohort(const SimSpec& spec, SimStats* stats) {
    spec.validate();

    std::vector<VariantSpec> variants = spec.common_variants;
    variants.insert(variants.end(), spec.rare_variants.begin(), spec.rare_variants.end());
    const std::size_t v = variants.size();

    std::vector<std::string> ids;
    ids.reserve(v);
    for (std::size_t j = 0; j < spec.common_variants.size(); ++j)
        ids.push_back("cv" + std::to_string(j + 1));
    for (std::size_t j = 0; j < spec.rare_variants.size(); ++j)
        ids.push_back("rv" + std::to_string(j + 1));

    Rng rng(spec.seed);
    const std::size_t n_total =
        static_cast<std::size_t>(spec.n_cases) + static_cast<std::size_t>(spec.n_controls);

    std::vector<IndividualRecord> individuals;
    std::vector<std::uint8_t> genotypes;
    individuals.reserve(n_total);
    genotypes.reserve(n_total * v);

    long long cases_left = spec.n_cases;
    long long controls_left = spec.n_controls;
    SimStats local;
    std::vector<std::uint8_t> draw(v);

    while (cases_left > 0 || controls_left > 0) {
        if (local.draws >= spec.max_attempts)
            throw simulation_error("simulation quota not reached after " +
                                   std::to_string(local.draws) + " draws (" +
                                   std::to_string(cases_left) + " cases, " +
                                   std::to_string(controls_left) + " controls missing)");
        ++local.draws;
        double liability = spec.beta0;
        for (std::size_t j = 0; j < v; ++j) {
            const std::uint8_t g = static_cast<std::uint8_t>(rng.bernoulli(variants[j].maf)) +
                                   static_cast<std::uint8_t>(rng.bernoulli(variants[j].maf));
            draw[j] = g;
            liability += variants[j].beta * g;
        }
        const bool diseased = rng.u01() < logistic(liability);
        if (diseased) ++local.case_draws;

        long long& left = diseased ? cases_left : controls_left;
        if (left == 0) continue;
        --left;
        IndividualRecord rec;
        rec.id = "ind" + std::to_string(individuals.size() + 1);
        rec.phenotype = diseased ? 1 : 0;
        individuals.push_back(std::move(rec));
        genotypes.insert(genotypes.end(), draw.begin(), draw.end());
    }

    if (stats) *stats = local;
    return Cohort(std::move(individuals), std::move(ids), std::move(genotypes),
                  spec.rare_threshold);
}

std::vector<Cohort> simulate_replicates(const SimSpec& spec, int n_replicates) {
    if (n_replicates < 1) throw usage_error("simulate_replicates: n_replicates must be >= 1");
    std::vector<Cohort> cohorts;
    cohorts.reserve(static_cast<std::size_t>(n_replicates));
    for (int i = 0; i < n_replicates; ++i) {
        SimSpec derived = spec;
        derived.seed = derive_seed(spec.seed, static_cast<std::uint64_t>(i));
        cohorts.push_back(simulate_cohort(derived));
    }
    return cohorts;
}

namespace {

nlohmann::ordered_json variants_to_json(const std::vector<VariantSpec>& variants) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& v : variants) {
        nlohmann::ordered_json j;
        j["maf"] = v.maf;
        j["beta"] = v.beta;
        arr.push_back(std::move(j));
    }
    return arr;
}

std::vector<VariantSpec> variants_from_json(const nlohmann::ordered_json& arr) {
    std::vector<VariantSpec> variants;
    for (const auto& j : arr)
        variants.push_back({j.at("maf").get<double>(), j.at("beta").get<double>()});
    return variants;
}

} // namespace

nlohmann::ordered_json SimSpec::to_json() const {
    nlohmann::ordered_json j;
    j["n_cases"] = n_cases;
    j["n_controls"] = n_controls;
    j["beta0"] = beta0;
    j["seed"] = seed;
    j["rare_threshold"] = rare_threshold;
    j["max_attempts"] = max_attempts;
    j["common_variants"] = variants_to_json(common_variants);
    j["rare_variants"] = variants_to_json(rare_variants);
    return j;
}

SimSpec SimSpec::from_json(const nlohmann::ordered_json& j) {
    SimSpec spec;
    spec.n_cases = j.at("n_cases").get<long long>();
    spec.n_controls = j.at("n_controls").get<long long>();
    spec.beta0 = j.at("beta0").get<double>();
    spec.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("rare_threshold")) spec.rare_threshold = j.at("rare_threshold").get<double>();
    if (j.contains("max_attempts")) spec.max_attempts = j.at("max_attempts").get<long long>();
    spec.common_variants = variants_from_json(j.at("common_variants"));
    spec.rare_variants = variants_from_json(j.at("rare_variants"));
    return spec;
}

SimSpec load_sim_spec(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open simulation spec '" + path.string() + "'");
    nlohmann::ordered_json j;
    try {
        in >> j;
        return SimSpec::from_json(j);
    } catch (const nlohmann::json::exception& e) {
        throw parse_error("simulation spec '" + path.string() + "': " + e.what());
    }
}

void save_sim_spec(const SimSpec& spec, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw error("cannot write simulation spec '" + path.string() + "'");
    out << spec.to_json().dump(2) << '\n';
    if (!out) throw error("failed while writing '" + path.string() + "'");
}

} // namespace croc
