#include "croc/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "croc/cohort.hpp"
#include "croc/errors.hpp"
#include "croc/experiment.hpp"
#include "croc/froc.hpp"
#include "croc/rng.hpp"
#include "croc/roc.hpp"
#include "croc/simulate.hpp"

namespace croc::cli {

namespace {

namespace fs = std::filesystem;

struct GlobalOptions {
    std::uint64_t seed = 0;
    bool seed_given = false;
    double alpha = 0.5;
    double rare_threshold = 0.01;
    int folds = 10;
    double min_gain = 1e-9;
    int max_k = 0;
    int jobs = 1;

    FitConfig fit_config(std::uint64_t default_seed) const {
        FitConfig cfg;
        cfg.alpha = alpha;
        cfg.rare_threshold = rare_threshold;
        cfg.folds = folds;
        cfg.min_gain = min_gain;
        cfg.max_k = max_k;
        cfg.seed = seed_given ? seed : default_seed;
        return cfg;
    }
};

std::string fixed6(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", x);
    return buf;
}

std::vector<Method> parse_methods(const std::string& methods_csv) {
    std::vector<Method> methods;
    std::istringstream ss(methods_csv);
    std::string name;
    while (std::getline(ss, name, ','))
        if (!name.empty()) methods.push_back(method_from_name(name));
    if (methods.empty()) throw usage_error("no methods given");
    return methods;
}

void warn_missing(const Cohort& cohort) {
    if (cohort.missing_imputed() > 0)
        std::cerr << "warning: " << cohort.missing_imputed()
                  << " missing genotype(s) imputed to 0\n";
}

int cmd_simulate(const GlobalOptions& opts, const std::string& spec_path,
                 const std::string& out_dir, int replicates, const std::string& prefix) {
    SimSpec spec = load_sim_spec(spec_path);
    if (opts.seed_given) spec.seed = opts.seed;
    spec.validate();

    fs::create_directories(out_dir);
    nlohmann::ordered_json manifest;
    manifest["spec"] = spec.to_json();
    manifest["replicates"] = nlohmann::ordered_json::array();

    for (int i = 0; i < replicates; ++i) {
        SimSpec derived = spec;
        derived.seed = derive_seed(spec.seed, static_cast<std::uint64_t>(i));
        const Cohort cohort = simulate_cohort(derived);
        char name[64];
        std::snprintf(name, sizeof(name), "%s_%04d.tsv", prefix.c_str(), i + 1);
        const fs::path file = fs::path(out_dir) / name;
        save_cohort(cohort, file);
        nlohmann::ordered_json entry;
        entry["index"] = i;
        entry["seed"] = derived.seed;
        entry["file"] = std::string(name);
        manifest["replicates"].push_back(std::move(entry));
    }
    std::ofstream mf(fs::path(out_dir) / "manifest.json", std::ios::binary);
    if (!mf) throw error("cannot write manifest in '" + out_dir + "'");
    mf << manifest.dump(2) << '\n';
    std::cout << "wrote " << replicates << " replicate(s) to " << out_dir << '\n';
    return 0;
}

int cmd_fit(const GlobalOptions& opts, const std::string& method_name_str,
            const std::string& in_path, const std::string& out_path) {
    const Method method = method_from_name(method_name_str);
    const Cohort cohort = load_cohort(in_path, opts.rare_threshold);
    warn_missing(cohort);
    const FitConfig cfg = opts.fit_config(0);
    const PredictionModel model =
        method == Method::froc ? fit_froc(cohort, cfg) : fit_croc(cohort, cfg);
    save_model(model, out_path);
    std::cout << "train_auc=" << fixed6(model.train_auc) << " chosen_k=" << model.chosen_k
              << '\n';
    return 0;
}

int cmd_evaluate(const std::string& model_path, const std::string& in_path,
                 const std::string& roc_path, double rare_threshold, bool print_auc) {
    const PredictionModel model = load_model(model_path);
    const Cohort cohort = load_cohort(in_path, rare_threshold);
    warn_missing(cohort);
    auto [test_auc, curve] = evaluate_model(model, cohort);
    if (!roc_path.empty()) write_roc_tsv(curve, roc_path);
    if (print_auc) std::cout << fixed6(test_auc) << '\n';
    return 0;
}

void print_experiment_summary(const ExperimentReport& report) {
    std::cout << "method\tn_replicates\tmean_auc\tsd_auc\twall_time_seconds\n";
    for (const auto& block : report.methods) {
        std::cout << method_name(block.method) << '\t' << block.n_replicates << '\t'
                  << fixed6(block.mean_auc) << '\t' << fixed6(block.sd_auc) << '\t'
                  << fixed6(block.wall_time_seconds) << '\n';
    }
}

int cmd_experiment(const GlobalOptions& opts, const std::string& spec_path,
                   const std::string& methods_csv, int replicates, const std::string& out_prefix) {
    SimSpec spec = load_sim_spec(spec_path);
    if (opts.seed_given) spec.seed = opts.seed;
    const FitConfig cfg = opts.fit_config(spec.seed);
    const auto methods = parse_methods(methods_csv);
    const ExperimentReport report = run_experiment(spec, methods, replicates, cfg, opts.jobs);
    write_experiment_tsv(report, out_prefix + ".tsv");
    write_experiment_json(report, out_prefix + ".json");
    print_experiment_summary(report);
    return 0;
}

int cmd_sweep(const GlobalOptions& opts, const std::string& spec_path,
              const std::vector<double>& fractions, const std::string& methods_csv,
              int replicates, const std::string& out_prefix) {
    SimSpec spec = load_sim_spec(spec_path);
    if (opts.seed_given) spec.seed = opts.seed;
    const FitConfig cfg = opts.fit_config(spec.seed);
    const auto methods = parse_methods(methods_csv);
    const auto rows = run_sweep(spec, fractions, methods, replicates, cfg, opts.jobs);

    ExperimentReport header;
    header.seed = spec.seed;
    header.config = cfg;
    header.n_replicates = replicates;
    write_sweep_tsv(header, rows, out_prefix + ".tsv");
    write_sweep_json(header, rows, out_prefix + ".json");

    std::cout << "keep_fraction\tmethod\tmean_auc\tci_low\tci_high\n";
    for (const auto& row : rows) {
        std::cout << fixed6(row.keep_fraction) << '\t' << method_name(row.method) << '\t'
                  << fixed6(row.mean_auc) << '\t' << fixed6(row.ci_low) << '\t'
                  << fixed6(row.ci_high) << '\n';
    }
    return 0;
}

} // namespace

int run(int argc, const char* const* argv) {
    CLI::App app{"Risk-prediction toolkit: likelihood-ratio ROC models over common and "
                 "rare variants (FROC forward selection, CROC multistage collapsing)"};
    app.require_subcommand(1);
    app.fallthrough(); // global flags may follow the subcommand

    GlobalOptions opts;
    auto* seed_opt = app.add_option("--seed", opts.seed, "Base seed for all randomized steps");
    app.add_option("--alpha", opts.alpha, "LR smoothing constant")->capture_default_str();
    app.add_option("--rare-threshold", opts.rare_threshold, "MAF below which a variant is rare")
        ->capture_default_str();
    app.add_option("--folds", opts.folds, "Cross-validation folds")->capture_default_str();
    app.add_option("--min-gain", opts.min_gain, "Minimal AUC improvement per selection step")
        ->capture_default_str();
    app.add_option("--max-k", opts.max_k, "Model size cap (0 = min(#candidates, 20))")
        ->capture_default_str();
    app.add_option("--jobs", opts.jobs, "Parallel replicate workers")->capture_default_str();

    // simulate
    auto* sim = app.add_subcommand("simulate", "Generate genotype-TSV cohorts from a spec");
    std::string sim_spec, sim_out_dir, sim_prefix = "replicate";
    int sim_replicates = 1;
    sim->add_option("--spec", sim_spec, "Simulation spec JSON")->required();
    sim->add_option("--out-dir", sim_out_dir, "Output directory")->required();
    sim->add_option("--replicates", sim_replicates, "Number of replicates")
        ->capture_default_str();
    sim->add_option("--prefix", sim_prefix, "Replicate file prefix")->capture_default_str();

    // fit
    auto* fit = app.add_subcommand("fit", "Fit a FROC or CROC model on a cohort");
    std::string fit_method, fit_in, fit_out;
    fit->add_option("--method", fit_method, "froc or croc")->required();
    fit->add_option("--in", fit_in, "Training cohort TSV")->required();
    fit->add_option("--out", fit_out, "Output model JSON")->required();

    // evaluate
    auto* eval = app.add_subcommand("evaluate", "Score a cohort with a trained model");
    std::string eval_model, eval_in, eval_roc;
    eval->add_option("--model", eval_model, "Model JSON")->required();
    eval->add_option("--in", eval_in, "Cohort TSV")->required();
    eval->add_option("--roc", eval_roc, "Write the ROC curve to this TSV");

    // roc
    auto* roc = app.add_subcommand("roc", "Write the ROC curve of a model on a cohort");
    std::string roc_model, roc_in, roc_out;
    roc->add_option("--model", roc_model, "Model JSON")->required();
    roc->add_option("--in", roc_in, "Cohort TSV")->required();
    roc->add_option("--out", roc_out, "Output ROC TSV")->required();

    // experiment
    auto* exp = app.add_subcommand(
        "experiment", "Train/test replicate experiment with per-method summary");
    std::string exp_spec, exp_methods = "froc,croc", exp_out;
    int exp_replicates = 10;
    exp->add_option("--spec", exp_spec, "Simulation spec JSON")->required();
    exp->add_option("--methods", exp_methods, "Comma-separated methods")->capture_default_str();
    exp->add_option("--replicates", exp_replicates, "Train/test replicate pairs")
        ->capture_default_str();
    exp->add_option("--out", exp_out, "Report path prefix (.tsv/.json appended)")->required();

    // sweep
    auto* sweep = app.add_subcommand("sweep", "Common-variant dropout sweep");
    std::string sweep_spec, sweep_methods = "froc,croc", sweep_out;
    std::vector<double> sweep_fractions{1.0, 0.5, 0.25, 0.0};
    int sweep_replicates = 10;
    sweep->add_option("--spec", sweep_spec, "Simulation spec JSON")->required();
    sweep->add_option("--keep-fractions", sweep_fractions, "Common-variant keep fractions")
        ->delimiter(',')
        ->capture_default_str();
    sweep->add_option("--methods", sweep_methods, "Comma-separated methods")
        ->capture_default_str();
    sweep->add_option("--replicates", sweep_replicates, "Replicate pairs per fraction")
        ->capture_default_str();
    sweep->add_option("--out", sweep_out, "Report path prefix (.tsv/.json appended)")->required();

    try {
        app.parse(argc, argv);
        opts.seed_given = seed_opt->count() > 0;

        if (*sim) return cmd_simulate(opts, sim_spec, sim_out_dir, sim_replicates, sim_prefix);
        if (*fit) return cmd_fit(opts, fit_method, fit_in, fit_out);
        if (*eval)
            return cmd_evaluate(eval_model, eval_in, eval_roc, opts.rare_threshold, true);
        if (*roc) return cmd_evaluate(roc_model, roc_in, roc_out, opts.rare_threshold, false);
        if (*exp) return cmd_experiment(opts, exp_spec, exp_methods, exp_replicates, exp_out);
        if (*sweep)
            return cmd_sweep(opts, sweep_spec, sweep_fractions, sweep_methods,
                             sweep_replicates, sweep_out);
        return 2;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const locus_mismatch_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const simulation_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    } catch (const error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

int run(const std::vector<std::string>& args) {
    std::vector<std::string> full;
    full.reserve(args.size() + 1);
    full.push_back("croc");
    full.insert(full.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    argv.reserve(full.size());
    for (const auto& a : full) argv.push_back(a.c_str());
    return run(static_cast<int>(argv.size()), argv.data());
}

} // namespace croc::cli
