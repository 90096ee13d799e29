#include "croc/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <functional>
#include <mutex>
#include <sstream>
#include <thread>

#include "croc/errors.hpp"
#include "croc/rng.hpp"

namespace croc {

std::string method_name(Method m) { return m == Method::froc ? "froc" : "croc"; }

Method method_from_name(const std::string& name) {
    if (name == "froc") return Method::froc;
    if (name == "croc") return Method::croc;
    throw usage_error("unknown method '" + name + "' (expected froc or croc)");
}

namespace {

constexpr std::uint64_t kDropStreamTag = 0x64726F70; // decouples dropout seeds

void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn) {
    if (jobs <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    const std::size_t n_workers = std::min<std::size_t>(static_cast<std::size_t>(jobs), count);
    pool.reserve(n_workers);
    for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

struct PairOutcome {
    ReplicateRow row;
    double fit_seconds = 0.0;
};

double mean_of(const std::vector<double>& xs) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

double sd_of(const std::vector<double>& xs, double mean) {
    if (xs.size() < 2) return 0.0;
    double s = 0.0;
    for (double x : xs) s += (x - mean) * (x - mean);
    return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

PairOutcome fit_and_evaluate(Method method, const Cohort& train, const Cohort& test,
                             const FitConfig& cfg, int replicate) {
    PairOutcome out;
    const auto t0 = std::chrono::steady_clock::now();
    PredictionModel model = method == Method::froc ? fit_froc(train, cfg) : fit_croc(train, cfg);
    const auto t1 = std::chrono::steady_clock::now();
    out.fit_seconds = std::chrono::duration<double>(t1 - t0).count();

    auto [test_auc, curve] = evaluate_model(model, test);
    (void)curve;
    out.row.replicate = replicate;
    out.row.train_auc = model.train_auc;
    out.row.test_auc = test_auc;
    out.row.chosen_k = model.chosen_k;
    for (const auto& locus : model.loci) out.row.loci.push_back(locus.id);
    return out;
}

MethodBlock summarize(Method method, std::vector<ReplicateRow> rows, double wall_seconds) {
    MethodBlock block;
    block.method = method;
    block.n_replicates = static_cast<int>(rows.size());
    std::vector<double> test_aucs;
    test_aucs.reserve(rows.size());
    for (const auto& r : rows) test_aucs.push_back(r.test_auc);
    block.mean_auc = mean_of(test_aucs);
    block.sd_auc = sd_of(test_aucs, block.mean_auc);
    block.wall_time_seconds = wall_seconds;
    block.rows = std::move(rows);
    return block;
}

} // namespace

ExperimentReport run_experiment(const SimSpec& spec, const std::vector<Method>& methods,
                                int n_replicates, const FitConfig& config, int jobs) {
    if (methods.empty()) throw usage_error("run_experiment: no methods given");
    if (n_replicates < 1) throw usage_error("run_experiment: n_replicates must be >= 1");

    const std::size_t n_pairs = static_cast<std::size_t>(n_replicates);
    std::vector<std::vector<PairOutcome>> grid(methods.size(),
                                               std::vector<PairOutcome>(n_pairs));

    parallel_for(n_pairs, jobs, [&](std::size_t i) {
        SimSpec train_spec = spec;
        train_spec.seed = derive_seed(spec.seed, 2 * i);
        SimSpec test_spec = spec;
        test_spec.seed = derive_seed(spec.seed, 2 * i + 1);
        const Cohort train = simulate_cohort(train_spec);
        const Cohort test = simulate_cohort(test_spec);

        FitConfig cfg = config;
        cfg.seed = derive_seed(config.seed, i);
        for (std::size_t m = 0; m < methods.size(); ++m)
            grid[m][i] = fit_and_evaluate(methods[m], train, test, cfg, static_cast<int>(i));
    });

    ExperimentReport report;
    report.seed = spec.seed;
    report.config = config;
    report.n_replicates = n_replicates;
    for (std::size_t m = 0; m < methods.size(); ++m) {
        std::vector<ReplicateRow> rows;
        double wall = 0.0;
        rows.reserve(n_pairs);
        for (const auto& outcome : grid[m]) {
            rows.push_back(outcome.row);
            wall += outcome.fit_seconds;
        }
        report.methods.push_back(summarize(methods[m], std::move(rows), wall));
    }
    return report;
}

std::vector<SweepRow> run_sweep(const SimSpec& spec, const std::vector<double>& keep_fractions,
                                const std::vector<Method>& methods, int n_replicates,
                                const FitConfig& config, int jobs) {
    if (keep_fractions.empty()) throw usage_error("run_sweep: no keep fractions given");
    if (methods.empty()) throw usage_error("run_sweep: no methods given");
    if (n_replicates < 1) throw usage_error("run_sweep: n_replicates must be >= 1");
    for (double f : keep_fractions)
        if (!(f >= 0.0 && f <= 1.0))
            throw usage_error("run_sweep: keep fractions must lie in [0, 1]");

    const std::size_t n_pairs = static_cast<std::size_t>(n_replicates);
    const std::size_t n_tasks = keep_fractions.size() * n_pairs;
    std::vector<std::vector<std::vector<double>>> aucs(
        keep_fractions.size(),
        std::vector<std::vector<double>>(methods.size(), std::vector<double>(n_pairs, 0.0)));

    parallel_for(n_tasks, jobs, [&](std::size_t task) {
        const std::size_t fi = task / n_pairs;
        const std::size_t i = task % n_pairs;

        SimSpec train_spec = spec;
        train_spec.seed = derive_seed(spec.seed, 2 * i);
        SimSpec test_spec = spec;
        test_spec.seed = derive_seed(spec.seed, 2 * i + 1);
        const Cohort train_full = simulate_cohort(train_spec);
        const Cohort test_full = simulate_cohort(test_spec);

        // Same dropout seed for both cohorts of the pair, so the surviving
        // common set matches; the test replicate is then projected onto the
        // training columns to keep every model locus evaluable.
        const std::uint64_t drop_seed =
            derive_seed(derive_seed(spec.seed, kDropStreamTag + fi), i);
        const Cohort train = drop_common_variants(train_full, keep_fractions[fi], drop_seed);
        std::vector<std::string> kept_ids;
        kept_ids.reserve(train.n_variants());
        for (const auto& vm : train.variants()) kept_ids.push_back(vm.id);
        const Cohort test = select_variants(test_full, kept_ids);

        FitConfig cfg = config;
        cfg.seed = derive_seed(derive_seed(config.seed, fi), i);
        for (std::size_t m = 0; m < methods.size(); ++m) {
            const auto outcome =
                fit_and_evaluate(methods[m], train, test, cfg, static_cast<int>(i));
            aucs[fi][m][i] = outcome.row.test_auc;
        }
    });

    std::vector<SweepRow> rows;
    for (std::size_t fi = 0; fi < keep_fractions.size(); ++fi) {
        for (std::size_t m = 0; m < methods.size(); ++m) {
            SweepRow row;
            row.keep_fraction = keep_fractions[fi];
            row.method = methods[m];
            row.n_replicates = n_replicates;
            row.mean_auc = mean_of(aucs[fi][m]);
            row.sd_auc = sd_of(aucs[fi][m], row.mean_auc);
            const double half =
                1.96 * row.sd_auc / std::sqrt(static_cast<double>(n_replicates));
            row.ci_low = row.mean_auc - half;
            row.ci_high = row.mean_auc + half;
            rows.push_back(row);
        }
    }
    return rows;
}

namespace {

std::string fixed6(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", x);
    return buf;
}

// The JSON mirrors must carry exactly the numbers a TSV reader would parse.
double as_written(double x) { return std::strtod(fixed6(x).c_str(), nullptr); }

std::string join(const std::vector<std::string>& parts, char sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out.push_back(sep);
        out += parts[i];
    }
    return out;
}

std::string config_header(const ExperimentReport& report, const char* kind) {
    std::ostringstream os;
    os << "#croc-" << kind << "\tseed=" << report.seed << "\talpha=" << report.config.alpha
       << "\trare_threshold=" << report.config.rare_threshold
       << "\tfolds=" << report.config.folds << "\tmin_gain=" << report.config.min_gain
       << "\tmax_k=" << report.config.max_k << "\treplicates=" << report.n_replicates;
    return os.str();
}

} // namespace

void write_experiment_tsv(const ExperimentReport& report, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw error("cannot write report '" + path.string() + "'");
    out << config_header(report, "experiment") << '\n';
    out << "method\treplicate\ttrain_auc\ttest_auc\tchosen_k\tloci\n";
    for (const auto& block : report.methods) {
        for (const auto& row : block.rows) {
            out << method_name(block.method) << '\t' << row.replicate << '\t'
                << fixed6(row.train_auc) << '\t' << fixed6(row.test_auc) << '\t' << row.chosen_k
                << '\t' << join(row.loci, ';') << '\n';
        }
    }
    out << "#summary\n";
    out << "method\tn_replicates\tmean_auc\tsd_auc\n";
    for (const auto& block : report.methods) {
        out << method_name(block.method) << '\t' << block.n_replicates << '\t'
            << fixed6(block.mean_auc) << '\t' << fixed6(block.sd_auc) << '\n';
    }
    if (!out) throw error("failed while writing '" + path.string() + "'");
}

namespace {

nlohmann::ordered_json report_config_json(const ExperimentReport& report) {
    nlohmann::ordered_json j;
    j["seed"] = report.seed;
    j["alpha"] = report.config.alpha;
    j["rare_threshold"] = report.config.rare_threshold;
    j["folds"] = report.config.folds;
    j["min_gain"] = report.config.min_gain;
    j["max_k"] = report.config.max_k;
    j["replicates"] = report.n_replicates;
    return j;
}

} // namespace

void write_experiment_json(const ExperimentReport& report, const std::filesystem::path& path) {
    nlohmann::ordered_json j;
    j["config"] = report_config_json(report);
    j["methods"] = nlohmann::ordered_json::array();
    for (const auto& block : report.methods) {
        nlohmann::ordered_json jb;
        jb["method"] = method_name(block.method);
        jb["n_replicates"] = block.n_replicates;
        jb["mean_auc"] = as_written(block.mean_auc);
        jb["sd_auc"] = as_written(block.sd_auc);
        jb["rows"] = nlohmann::ordered_json::array();
        for (const auto& row : block.rows) {
            nlohmann::ordered_json jr;
            jr["replicate"] = row.replicate;
            jr["train_auc"] = as_written(row.train_auc);
            jr["test_auc"] = as_written(row.test_auc);
            jr["chosen_k"] = row.chosen_k;
            jr["loci"] = row.loci;
            jb["rows"].push_back(std::move(jr));
        }
        j["methods"].push_back(std::move(jb));
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw error("cannot write report '" + path.string() + "'");
    out << j.dump(2) << '\n';
    if (!out) throw error("failed while writing '" + path.string() + "'");
}

void write_sweep_tsv(const ExperimentReport& header, const std::vector<SweepRow>& rows,
                     const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw error("cannot write report '" + path.string() + "'");
    out << config_header(header, "sweep") << '\n';
    out << "keep_fraction\tmethod\tn_replicates\tmean_auc\tsd_auc\tci_low\tci_high\n";
    for (const auto& row : rows) {
        out << fixed6(row.keep_fraction) << '\t' << method_name(row.method) << '\t'
            << row.n_replicates << '\t' << fixed6(row.mean_auc) << '\t' << fixed6(row.sd_auc)
            << '\t' << fixed6(row.ci_low) << '\t' << fixed6(row.ci_high) << '\n';
    }
    if (!out) throw error("failed while writing '" + path.string() + "'");
}

void write_sweep_json(const ExperimentReport& header, const std::vector<SweepRow>& rows,
                      const std::filesystem::path& path) {
    nlohmann::ordered_json j;
    j["config"] = report_config_json(header);
    j["rows"] = nlohmann::ordered_json::array();
    for (const auto& row : rows) {
        nlohmann::ordered_json jr;
        jr["keep_fraction"] = as_written(row.keep_fraction);
        jr["method"] = method_name(row.method);
        jr["n_replicates"] = row.n_replicates;
        jr["mean_auc"] = as_written(row.mean_auc);
        jr["sd_auc"] = as_written(row.sd_auc);
        jr["ci_low"] = as_written(row.ci_low);
        jr["ci_high"] = as_written(row.ci_high);
        j["rows"].push_back(std::move(jr));
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw error("cannot write report '" + path.string() + "'");
    out << j.dump(2) << '\n';
    if (!out) throw error("failed while writing '" + path.string() + "'");
}

ExperimentReport parse_experiment_tsv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open report '" + path.string() + "'");

    ExperimentReport report;
    std::string line;
    if (!std::getline(in, line) || line.rfind("#croc-experiment", 0) != 0)
        throw parse_error("report '" + path.string() + "': missing experiment header");
    {
        std::istringstream hs(line);
        std::string field;
        std::getline(hs, field, '\t'); // tag
        while (std::getline(hs, field, '\t')) {
            const auto eq = field.find('=');
            if (eq == std::string::npos) continue;
            const std::string key = field.substr(0, eq);
            const std::string value = field.substr(eq + 1);
            if (key == "seed")
                report.seed = std::strtoull(value.c_str(), nullptr, 10);
            else if (key == "alpha")
                report.config.alpha = std::strtod(value.c_str(), nullptr);
            else if (key == "rare_threshold")
                report.config.rare_threshold = std::strtod(value.c_str(), nullptr);
            else if (key == "folds")
                report.config.folds = std::atoi(value.c_str());
            else if (key == "min_gain")
                report.config.min_gain = std::strtod(value.c_str(), nullptr);
            else if (key == "max_k")
                report.config.max_k = std::atoi(value.c_str());
            else if (key == "replicates")
                report.n_replicates = std::atoi(value.c_str());
        }
    }
    if (!std::getline(in, line)) throw parse_error("report truncated");

    auto block_for = [&](const std::string& name) -> MethodBlock& {
        const Method m = method_from_name(name);
        for (auto& block : report.methods)
            if (block.method == m) return block;
        report.methods.push_back(MethodBlock{});
        report.methods.back().method = m;
        return report.methods.back();
    };

    bool in_summary = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line == "#summary") {
            in_summary = true;
            std::getline(in, line); // summary column header
            continue;
        }
        std::istringstream ls(line);
        std::vector<std::string> fields;
        std::string field;
        while (std::getline(ls, field, '\t')) fields.push_back(field);
        if (!in_summary) {
            if (fields.size() != 6) throw parse_error("report row with wrong field count");
            ReplicateRow row;
            row.replicate = std::atoi(fields[1].c_str());
            row.train_auc = std::strtod(fields[2].c_str(), nullptr);
            row.test_auc = std::strtod(fields[3].c_str(), nullptr);
            row.chosen_k = std::atoi(fields[4].c_str());
            std::istringstream locis(fields[5]);
            std::string id;
            while (std::getline(locis, id, ';'))
                if (!id.empty()) row.loci.push_back(id);
            block_for(fields[0]).rows.push_back(std::move(row));
        } else {
            if (fields.size() != 4) throw parse_error("summary row with wrong field count");
            MethodBlock& block = block_for(fields[0]);
            block.n_replicates = std::atoi(fields[1].c_str());
            block.mean_auc = std::strtod(fields[2].c_str(), nullptr);
            block.sd_auc = std::strtod(fields[3].c_str(), nullptr);
        }
    }
    return report;
}

} // namespace croc
