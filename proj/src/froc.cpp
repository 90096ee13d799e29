#include "croc/froc.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <limits>

#include "croc/errors.hpp"
#include "croc/rng.hpp"

namespace croc {

int FitConfig::effective_max_k(std::size_t n_candidates) const {
    if (max_k > 0) return max_k;
    return static_cast<int>(std::min<std::size_t>(n_candidates, 20));
}

namespace {

// Incremental multilocus-genotype partition over a row subset. Group ids are
// assigned in first-appearance order along the training rows, so a group at
// step k corresponds one-to-one with an observed k-locus genotype vector.
struct SelectionState {
    std::vector<std::size_t> train_rows;
    std::vector<std::size_t> heldout_rows;
    std::vector<std::int32_t> train_group;   // per train row
    std::vector<std::int32_t> heldout_group; // per heldout row, -1 = unseen
    std::int32_t n_groups = 1;
};

struct ScanBuffers {
    std::vector<std::int32_t> new_ids;
    std::vector<long long> case_counts;
    std::vector<long long> control_counts;
    std::vector<ScoreGroup> groups;
};

// Refines the partition by a candidate column and returns the training AUC of
// the refitted LR scores. Counts-only arithmetic; identical to fitting an LR
// table on the refined loci and running auc() over the scored rows.
double refined_auc(const SelectionState& st, const std::vector<std::uint8_t>& col,
                   const std::vector<char>& is_case, long long n_case, long long n_control,
                   double alpha, ScanBuffers& buf) {
    buf.new_ids.assign(static_cast<std::size_t>(st.n_groups) * 3, -1);
    buf.case_counts.clear();
    buf.control_counts.clear();
    std::int32_t next = 0;
    for (std::size_t r = 0; r < st.train_rows.size(); ++r) {
        const std::size_t row = st.train_rows[r];
        const std::size_t slot =
            static_cast<std::size_t>(st.train_group[r]) * 3 + col[row];
        std::int32_t g = buf.new_ids[slot];
        if (g < 0) {
            g = next++;
            buf.new_ids[slot] = g;
            buf.case_counts.push_back(0);
            buf.control_counts.push_back(0);
        }
        if (is_case[row])
            ++buf.case_counts[g];
        else
            ++buf.control_counts[g];
    }
    const std::size_t m = static_cast<std::size_t>(next);
    buf.groups.clear();
    for (std::size_t g = 0; g < m; ++g) {
        buf.groups.push_back({lr_value(buf.case_counts[g], buf.control_counts[g], n_case,
                                       n_control, alpha, m),
                              buf.case_counts[g], buf.control_counts[g]});
    }
    return auc_from_groups(buf.groups);
}

// Commits a refinement: updates train and heldout group ids. Heldout rows may
// only reuse combinations observed in training; anything else becomes -1.
void commit_refine(SelectionState& st, const std::vector<std::uint8_t>& col,
                   ScanBuffers& buf) {
    buf.new_ids.assign(static_cast<std::size_t>(st.n_groups) * 3, -1);
    std::int32_t next = 0;
    for (std::size_t r = 0; r < st.train_rows.size(); ++r) {
        const std::size_t row = st.train_rows[r];
        const std::size_t slot =
            static_cast<std::size_t>(st.train_group[r]) * 3 + col[row];
        std::int32_t g = buf.new_ids[slot];
        if (g < 0) {
            g = next++;
            buf.new_ids[slot] = g;
        }
        st.train_group[r] = g;
    }
    for (std::size_t r = 0; r < st.heldout_rows.size(); ++r) {
        if (st.heldout_group[r] < 0) continue;
        const std::size_t row = st.heldout_rows[r];
        const std::size_t slot =
            static_cast<std::size_t>(st.heldout_group[r]) * 3 + col[row];
        st.heldout_group[r] = buf.new_ids[slot]; // -1 when unseen in training
    }
    st.n_groups = next;
}

// Held-out AUC of the current partition: LR per training group, neutral 1.0
// for unseen genotypes; mirrors score_individuals + auc on the held-out rows.
double heldout_auc(const SelectionState& st, const std::vector<char>& is_case,
                   long long n_case_train, long long n_control_train, double alpha,
                   ScanBuffers& buf) {
    buf.case_counts.assign(static_cast<std::size_t>(st.n_groups), 0);
    buf.control_counts.assign(static_cast<std::size_t>(st.n_groups), 0);
    for (std::size_t r = 0; r < st.train_rows.size(); ++r) {
        if (is_case[st.train_rows[r]])
            ++buf.case_counts[static_cast<std::size_t>(st.train_group[r])];
        else
            ++buf.control_counts[static_cast<std::size_t>(st.train_group[r])];
    }
    const std::size_t m = static_cast<std::size_t>(st.n_groups);

    std::vector<long long> h_case(m, 0), h_control(m, 0);
    long long unseen_case = 0, unseen_control = 0;
    for (std::size_t r = 0; r < st.heldout_rows.size(); ++r) {
        const bool cs = is_case[st.heldout_rows[r]];
        const std::int32_t g = st.heldout_group[r];
        if (g < 0) {
            (cs ? unseen_case : unseen_control)++;
        } else {
            (cs ? h_case[static_cast<std::size_t>(g)] : h_control[static_cast<std::size_t>(g)])++;
        }
    }
    buf.groups.clear();
    for (std::size_t g = 0; g < m; ++g) {
        if (h_case[g] == 0 && h_control[g] == 0) continue;
        buf.groups.push_back({lr_value(buf.case_counts[g], buf.control_counts[g], n_case_train,
                                       n_control_train, alpha, m),
                              h_case[g], h_control[g]});
    }
    if (unseen_case > 0 || unseen_control > 0)
        buf.groups.push_back({1.0, unseen_case, unseen_control});
    return auc_from_groups(buf.groups);
}

struct EngineResult {
    std::vector<std::size_t> chosen;        // candidate indices in selection order
    std::vector<double> train_auc_by_step;  // training AUC after each step
    std::vector<double> heldout_auc_by_step; // only when heldout rows given
};

EngineResult run_forward_selection(const std::vector<std::vector<std::uint8_t>>& cols,
                                   const std::vector<char>& is_case,
                                   std::vector<std::size_t> train_rows,
                                   std::vector<std::size_t> heldout_rows, int max_k,
                                   double min_gain, double alpha) {
    EngineResult res;
    SelectionState st;
    st.train_rows = std::move(train_rows);
    st.heldout_rows = std::move(heldout_rows);
    st.train_group.assign(st.train_rows.size(), 0);
    st.heldout_group.assign(st.heldout_rows.size(), 0);
    st.n_groups = 1;

    long long n_case = 0, n_control = 0;
    for (std::size_t row : st.train_rows) (is_case[row] ? n_case : n_control)++;

    std::vector<char> used(cols.size(), 0);
    ScanBuffers buf;
    double current = 0.5;

    for (int step = 0; step < max_k; ++step) {
        double best_auc = -1.0;
        std::size_t best = cols.size();
        for (std::size_t c = 0; c < cols.size(); ++c) {
            if (used[c]) continue;
            const double a = refined_auc(st, cols[c], is_case, n_case, n_control, alpha, buf);
            if (a > best_auc) {
                best_auc = a;
                best = c;
            }
        }
        if (best == cols.size() || best_auc - current < min_gain) break;
        used[best] = 1;
        commit_refine(st, cols[best], buf);
        current = best_auc;
        res.chosen.push_back(best);
        res.train_auc_by_step.push_back(best_auc);
        if (!st.heldout_rows.empty())
            res.heldout_auc_by_step.push_back(
                heldout_auc(st, is_case, n_case, n_control, alpha, buf));
    }
    return res;
}

std::vector<std::vector<std::uint8_t>> materialize_candidates(
    const Cohort& cohort, const std::vector<LocusRef>& candidates) {
    std::vector<std::vector<std::uint8_t>> cols;
    cols.reserve(candidates.size());
    for (const auto& locus : candidates) cols.push_back(locus_column(cohort, locus));
    return cols;
}

std::vector<char> case_flags(const Cohort& cohort) {
    std::vector<char> flags(cohort.n_individuals());
    for (std::size_t i = 0; i < flags.size(); ++i) flags[i] = cohort.is_case(i) ? 1 : 0;
    return flags;
}

std::vector<std::size_t> all_rows(const Cohort& cohort) {
    std::vector<std::size_t> rows(cohort.n_individuals());
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
    return rows;
}

std::vector<LocusRef> all_variant_candidates(const Cohort& cohort) {
    std::vector<LocusRef> candidates;
    candidates.reserve(cohort.n_variants());
    for (const auto& vm : cohort.variants()) candidates.push_back(LocusRef{vm.id, {}});
    return candidates;
}

} // namespace

ModelPath forward_select(const Cohort& cohort, const std::vector<LocusRef>& candidates,
                         int max_k, double min_gain, double alpha) {
    if (candidates.empty()) throw usage_error("forward_select: candidate list is empty");
    if (max_k < 1) throw usage_error("forward_select: max_k must be >= 1");
    if (min_gain < 0) throw usage_error("forward_select: min_gain must be nonnegative");

    auto cols = materialize_candidates(cohort, candidates);
    auto res = run_forward_selection(cols, case_flags(cohort), all_rows(cohort), {}, max_k,
                                     min_gain, alpha);
    ModelPath path;
    for (std::size_t s = 0; s < res.chosen.size(); ++s)
        path.steps.push_back({candidates[res.chosen[s]], res.train_auc_by_step[s]});
    return path;
}

std::vector<CvPoint> cross_validate_path(const Cohort& cohort,
                                         const std::vector<LocusRef>& candidates,
                                         const FitConfig& config) {
    if (candidates.empty()) throw usage_error("cross_validate_path: candidate list is empty");
    if (config.folds < 2) throw usage_error("cross_validate_path: folds must be >= 2");

    const std::size_t n = cohort.n_individuals();
    std::vector<std::size_t> cases, controls;
    for (std::size_t i = 0; i < n; ++i) (cohort.is_case(i) ? cases : controls).push_back(i);

    // Seeded stratified assignment: shuffle within each class, then deal
    // round-robin across folds.
    Rng rng(config.seed);
    rng.shuffle(std::span<std::size_t>(cases));
    rng.shuffle(std::span<std::size_t>(controls));
    std::vector<int> fold_of(n, 0);
    for (std::size_t p = 0; p < cases.size(); ++p)
        fold_of[cases[p]] = static_cast<int>(p % static_cast<std::size_t>(config.folds));
    for (std::size_t p = 0; p < controls.size(); ++p)
        fold_of[controls[p]] = static_cast<int>(p % static_cast<std::size_t>(config.folds));

    auto cols = materialize_candidates(cohort, candidates);
    auto flags = case_flags(cohort);
    const int max_k = config.effective_max_k(candidates.size());

    std::vector<std::vector<double>> fold_curves; // held-out AUC per step, per usable fold
    for (int f = 0; f < config.folds; ++f) {
        std::vector<std::size_t> train_rows, heldout_rows;
        for (std::size_t i = 0; i < n; ++i)
            (fold_of[i] == f ? heldout_rows : train_rows).push_back(i);
        if (heldout_rows.empty()) continue; // more folds than individuals

        const auto has_both = [&](const std::vector<std::size_t>& rows) {
            bool c = false, k = false;
            for (std::size_t i : rows) (flags[i] ? c : k) = true;
            return c && k;
        };
        if (!has_both(heldout_rows))
            throw data_error("stratification error: fold " + std::to_string(f) +
                             " lacks a case or a control");
        if (!has_both(train_rows))
            throw data_error("stratification error: training part of fold " + std::to_string(f) +
                             " lacks a case or a control");

        auto res = run_forward_selection(cols, flags, std::move(train_rows),
                                         std::move(heldout_rows), max_k, config.min_gain,
                                         config.alpha);
        fold_curves.push_back(std::move(res.heldout_auc_by_step));
    }

    std::size_t longest = 0;
    for (const auto& curve : fold_curves) longest = std::max(longest, curve.size());

    // A fold whose path stopped early contributes its last model at larger k;
    // an empty path contributes the null model (all scores 1.0, AUC 0.5).
    std::vector<CvPoint> table;
    for (std::size_t k = 1; k <= longest; ++k) {
        double sum = 0.0;
        for (const auto& curve : fold_curves) {
            if (curve.empty())
                sum += 0.5;
            else
                sum += curve[std::min(k, curve.size()) - 1];
        }
        table.push_back({static_cast<int>(k), sum / static_cast<double>(fold_curves.size())});
    }
    return table;
}

PredictionModel fit_froc(const Cohort& cohort, const std::vector<LocusRef>& candidates,
                         const FitConfig& config) {
    PredictionModel model;
    model.config = config;
    model.cv_auc_by_size = cross_validate_path(cohort, candidates, config);

    int chosen = 0;
    double best = -1.0;
    for (const auto& pt : model.cv_auc_by_size) {
        if (pt.mean_auc > best) {
            best = pt.mean_auc;
            chosen = pt.k;
        }
    }

    if (chosen > 0) {
        ModelPath path =
            forward_select(cohort, candidates, chosen, config.min_gain, config.alpha);
        for (const auto& step : path.steps) model.loci.push_back(step.locus);
    }
    // The full-data path can stop short of the cross-validated size when the
    // gains die out earlier; the model size is what was actually selected.
    model.chosen_k = static_cast<int>(model.loci.size());
    if (!model.loci.empty())
        model.lr_table = estimate_lr_table(cohort, model.loci, config.alpha);

    auto scores = score_individuals(model.lr_table, cohort);
    auto [case_scores, control_scores] = split_scores_by_phenotype(cohort, scores);
    model.train_auc = auc(case_scores, control_scores);
    return model;
}

PredictionModel fit_froc(const Cohort& cohort, const FitConfig& config) {
    return fit_froc(cohort, all_variant_candidates(cohort), config);
}

PredictionModel fit_croc(const Cohort& cohort, const FitConfig& config) {
    auto part = classify_variants(cohort, config.rare_threshold);
    auto stages = multistage_collapse(cohort, part.rare, config.min_gain);

    std::vector<LocusRef> candidates;
    candidates.reserve(part.common.size() + stages.size());
    for (std::size_t j : part.common)
        candidates.push_back(LocusRef{cohort.variants()[j].id, {}});
    for (const auto& pv : stages) candidates.push_back(pv.as_locus());

    PredictionModel model = fit_froc(cohort, candidates, config);
    model.pseudo_variants = std::move(stages);
    return model;
}

std::pair<double, RocCurve> evaluate_model(const PredictionModel& model, const Cohort& cohort) {
    auto scores = score_individuals(model.lr_table, cohort);
    auto [case_scores, control_scores] = split_scores_by_phenotype(cohort, scores);
    RocCurve curve = roc_points(case_scores, control_scores);
    return {curve.auc, curve};
}

namespace {

nlohmann::ordered_json config_to_json(const FitConfig& c) {
    nlohmann::ordered_json j;
    j["alpha"] = c.alpha;
    j["rare_threshold"] = c.rare_threshold;
    j["folds"] = c.folds;
    j["min_gain"] = c.min_gain;
    j["max_k"] = c.max_k;
    j["seed"] = c.seed;
    return j;
}

FitConfig config_from_json(const nlohmann::ordered_json& j) {
    FitConfig c;
    c.alpha = j.at("alpha").get<double>();
    c.rare_threshold = j.at("rare_threshold").get<double>();
    c.folds = j.at("folds").get<int>();
    c.min_gain = j.at("min_gain").get<double>();
    c.max_k = j.at("max_k").get<int>();
    c.seed = j.at("seed").get<std::uint64_t>();
    return c;
}

} // namespace

nlohmann::ordered_json PredictionModel::to_json() const {
    nlohmann::ordered_json j;
    j["loci"] = nlohmann::ordered_json::array();
    for (const auto& locus : loci) {
        nlohmann::ordered_json jl;
        jl["id"] = locus.id;
        jl["members"] = locus.members;
        j["loci"].push_back(std::move(jl));
    }
    j["alpha"] = config.alpha;
    j["chosen_k"] = chosen_k;
    j["train_auc"] = train_auc;
    j["lr_table"] = lr_table.to_json();
    j["cv_auc_by_size"] = nlohmann::ordered_json::array();
    for (const auto& pt : cv_auc_by_size) {
        nlohmann::ordered_json jp;
        jp["k"] = pt.k;
        jp["mean_auc"] = pt.mean_auc;
        j["cv_auc_by_size"].push_back(std::move(jp));
    }
    j["pseudo_variants"] = nlohmann::ordered_json::array();
    for (const auto& pv : pseudo_variants) {
        nlohmann::ordered_json jp;
        jp["id"] = pv.id;
        jp["members"] = pv.members;
        jp["stage_auc_path"] = pv.stage_auc_path;
        j["pseudo_variants"].push_back(std::move(jp));
    }
    j["seed"] = config.seed;
    j["config"] = config_to_json(config);
    return j;
}

PredictionModel PredictionModel::from_json(const nlohmann::ordered_json& j) {
    PredictionModel model;
    for (const auto& jl : j.at("loci")) {
        LocusRef locus;
        locus.id = jl.at("id").get<std::string>();
        locus.members = jl.at("members").get<std::vector<std::string>>();
        model.loci.push_back(std::move(locus));
    }
    model.chosen_k = j.at("chosen_k").get<int>();
    model.train_auc = j.at("train_auc").get<double>();
    model.lr_table = LrTable::from_json(j.at("lr_table"));
    for (const auto& jp : j.at("cv_auc_by_size")) {
        model.cv_auc_by_size.push_back(
            {jp.at("k").get<int>(), jp.at("mean_auc").get<double>()});
    }
    for (const auto& jp : j.at("pseudo_variants")) {
        PseudoVariant pv;
        pv.id = jp.at("id").get<std::string>();
        pv.members = jp.at("members").get<std::vector<std::string>>();
        pv.stage_auc_path = jp.at("stage_auc_path").get<std::vector<double>>();
        model.pseudo_variants.push_back(std::move(pv));
    }
    model.config = config_from_json(j.at("config"));
    return model;
}

void save_model(const PredictionModel& model, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw error("cannot write model file '" + path.string() + "'");
    out << model.to_json().dump(2) << '\n';
    if (!out) throw error("failed while writing '" + path.string() + "'");
}

PredictionModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open model file '" + path.string() + "'");
    nlohmann::ordered_json j;
    try {
        in >> j;
        return PredictionModel::from_json(j);
    } catch (const nlohmann::json::exception& e) {
        throw parse_error("model file '" + path.string() + "': " + e.what());
    }
}

} // namespace croc
