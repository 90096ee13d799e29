#include "croc/roc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>

#include "croc/errors.hpp"

namespace croc {

std::vector<std::uint8_t> locus_column(const Cohort& cohort, const LocusRef& locus) {
    const std::size_t n = cohort.n_individuals();
    std::vector<std::uint8_t> col(n, 0);
    if (!locus.is_pseudo()) {
        auto idx = cohort.find_variant(locus.id);
        if (!idx) throw locus_mismatch_error("locus '" + locus.id + "' not present in cohort");
        for (std::size_t i = 0; i < n; ++i) col[i] = cohort.code(i, *idx);
        return col;
    }
    std::vector<std::size_t> member_cols;
    member_cols.reserve(locus.members.size());
    for (const auto& id : locus.members) {
        auto idx = cohort.find_variant(id);
        if (!idx)
            throw locus_mismatch_error("member variant '" + id + "' of pseudo-variant '" +
                                       locus.id + "' not present in cohort");
        member_cols.push_back(*idx);
    }
    for (std::size_t i = 0; i < n; ++i) {
        std::uint8_t carrier = 0;
        for (std::size_t j : member_cols) {
            if (cohort.code(i, j) > 0) {
                carrier = 1;
                break;
            }
        }
        col[i] = carrier;
    }
    return col;
}

LrTable::LrTable(std::vector<LocusRef> loci, double alpha, std::vector<LrEntry> entries,
                 long long n_case_train, long long n_control_train)
    : loci_(std::move(loci)),
      alpha_(alpha),
      entries_(std::move(entries)),
      n_case_train_(n_case_train),
      n_control_train_(n_control_train) {
    std::sort(entries_.begin(), entries_.end(),
              [](const LrEntry& a, const LrEntry& b) { return a.genotype < b.genotype; });
}

std::optional<double> LrTable::lookup(std::span<const std::uint8_t> genotype) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), genotype,
                               [](const LrEntry& e, std::span<const std::uint8_t> key) {
                                   return std::lexicographical_compare(
                                       e.genotype.begin(), e.genotype.end(), key.begin(),
                                       key.end());
                               });
    if (it == entries_.end() || it->genotype.size() != genotype.size() ||
        !std::equal(it->genotype.begin(), it->genotype.end(), genotype.begin()))
        return std::nullopt;
    return it->lr;
}

double lr_value(long long case_count, long long control_count, long long n_case,
                long long n_control, double alpha, std::size_t m_k) {
    const double m = static_cast<double>(m_k);
    const double num =
        (static_cast<double>(case_count) + alpha) / (static_cast<double>(n_case) + alpha * m);
    const double den = (static_cast<double>(control_count) + alpha) /
                       (static_cast<double>(n_control) + alpha * m);
    if (den == 0.0) return std::numeric_limits<double>::infinity();
    return num / den;
}

namespace {

// Count map over the multilocus genotypes of the given rows.
std::map<std::vector<std::uint8_t>, std::pair<long long, long long>> genotype_counts(
    const Cohort& cohort, const std::vector<std::vector<std::uint8_t>>& cols,
    std::span<const std::size_t> rows) {
    std::map<std::vector<std::uint8_t>, std::pair<long long, long long>> counts;
    std::vector<std::uint8_t> key(cols.size());
    for (std::size_t i : rows) {
        for (std::size_t c = 0; c < cols.size(); ++c) key[c] = cols[c][i];
        auto& cell = counts[key];
        if (cohort.is_case(i))
            ++cell.first;
        else
            ++cell.second;
    }
    return counts;
}

} // namespace

LrTable estimate_lr_table(const Cohort& cohort, const std::vector<LocusRef>& loci, double alpha) {
    if (loci.empty()) throw usage_error("estimate_lr_table: loci list is empty");
    if (alpha < 0) throw usage_error("estimate_lr_table: alpha must be nonnegative");

    std::vector<std::vector<std::uint8_t>> cols;
    cols.reserve(loci.size());
    for (const auto& locus : loci) cols.push_back(locus_column(cohort, locus));

    std::vector<std::size_t> rows(cohort.n_individuals());
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
    auto counts = genotype_counts(cohort, cols, rows);

    const long long n_case = static_cast<long long>(cohort.n_cases());
    const long long n_control = static_cast<long long>(cohort.n_controls());
    const std::size_t m = counts.size();

    std::vector<LrEntry> entries;
    entries.reserve(m);
    for (auto& [genotype, cell] : counts) {
        LrEntry e;
        e.genotype = genotype;
        e.case_count = cell.first;
        e.control_count = cell.second;
        e.lr = lr_value(e.case_count, e.control_count, n_case, n_control, alpha, m);
        entries.push_back(std::move(e));
    }
    return LrTable(loci, alpha, std::move(entries), n_case, n_control);
}

std::vector<double> score_individuals(const LrTable& table, const Cohort& cohort) {
    const std::size_t n = cohort.n_individuals();
    std::vector<double> scores(n, 1.0);
    if (table.empty()) return scores; // null model: neutral score everywhere

    std::vector<std::vector<std::uint8_t>> cols;
    cols.reserve(table.loci().size());
    for (const auto& locus : table.loci()) cols.push_back(locus_column(cohort, locus));

    std::vector<std::uint8_t> key(cols.size());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t c = 0; c < cols.size(); ++c) key[c] = cols[c][i];
        scores[i] = table.lookup(key).value_or(1.0);
    }
    return scores;
}

double auc_from_groups(std::vector<ScoreGroup> groups) {
    std::sort(groups.begin(), groups.end(),
              [](const ScoreGroup& a, const ScoreGroup& b) { return a.score < b.score; });

    long long n_case = 0, n_control = 0;
    double u = 0.0;
    long long controls_below = 0;
    std::size_t i = 0;
    while (i < groups.size()) {
        long long c_case = 0, c_control = 0;
        const double s = groups[i].score;
        for (; i < groups.size() && groups[i].score == s; ++i) {
            c_case += groups[i].n_case;
            c_control += groups[i].n_control;
        }
        u += static_cast<double>(c_case) * static_cast<double>(controls_below) +
             0.5 * static_cast<double>(c_case) * static_cast<double>(c_control);
        controls_below += c_control;
        n_case += c_case;
        n_control += c_control;
    }
    if (n_case == 0 || n_control == 0)
        throw usage_error("auc: need at least one case and one control score");
    return u / (static_cast<double>(n_case) * static_cast<double>(n_control));
}

double auc(std::span<const double> case_scores, std::span<const double> control_scores) {
    if (case_scores.empty() || control_scores.empty())
        throw usage_error("auc: score lists must be nonempty");
    std::vector<ScoreGroup> groups;
    groups.reserve(case_scores.size() + control_scores.size());
    for (double s : case_scores) groups.push_back({s, 1, 0});
    for (double s : control_scores) groups.push_back({s, 0, 1});
    return auc_from_groups(std::move(groups));
}

double auc_oracle(std::span<const double> case_scores, std::span<const double> control_scores) {
    if (case_scores.empty() || control_scores.empty())
        throw usage_error("auc_oracle: score lists must be nonempty");
    double sum = 0.0;
    for (double si : case_scores) {
        for (double sj : control_scores) {
            if (si > sj)
                sum += 1.0;
            else if (si == sj)
                sum += 0.5;
        }
    }
    return sum / (static_cast<double>(case_scores.size()) *
                  static_cast<double>(control_scores.size()));
}

RocCurve roc_points(std::span<const double> case_scores, std::span<const double> control_scores) {
    if (case_scores.empty() || control_scores.empty())
        throw usage_error("roc_points: score lists must be nonempty");

    std::vector<ScoreGroup> groups;
    groups.reserve(case_scores.size() + control_scores.size());
    for (double s : case_scores) groups.push_back({s, 1, 0});
    for (double s : control_scores) groups.push_back({s, 0, 1});
    std::sort(groups.begin(), groups.end(),
              [](const ScoreGroup& a, const ScoreGroup& b) { return a.score < b.score; });

    const double n_case = static_cast<double>(case_scores.size());
    const double n_control = static_cast<double>(control_scores.size());

    RocCurve curve;
    curve.points.push_back({0.0, 0.0});
    // Walk thresholds from the highest score down; each distinct score adds
    // the individuals at that score to the predicted-positive set.
    long long case_ge = 0, control_ge = 0;
    std::size_t i = groups.size();
    while (i > 0) {
        const double s = groups[i - 1].score;
        while (i > 0 && groups[i - 1].score == s) {
            case_ge += groups[i - 1].n_case;
            control_ge += groups[i - 1].n_control;
            --i;
        }
        curve.points.push_back({static_cast<double>(control_ge) / n_control,
                                static_cast<double>(case_ge) / n_case});
    }
    curve.auc = auc(case_scores, control_scores);
    return curve;
}

void write_roc_tsv(const RocCurve& curve, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw error("cannot write ROC file '" + path.string() + "'");
    out << "fpr\ttpr\n";
    char buf[64];
    for (const auto& p : curve.points) {
        std::snprintf(buf, sizeof(buf), "%.6f\t%.6f\n", p.fpr, p.tpr);
        out << buf;
    }
    if (!out) throw error("failed while writing '" + path.string() + "'");
}

std::pair<std::vector<double>, std::vector<double>> split_scores_by_phenotype(
    const Cohort& cohort, std::span<const double> scores) {
    std::pair<std::vector<double>, std::vector<double>> out;
    for (std::size_t i = 0; i < cohort.n_individuals(); ++i) {
        if (cohort.is_case(i))
            out.first.push_back(scores[i]);
        else
            out.second.push_back(scores[i]);
    }
    return out;
}

namespace {

nlohmann::ordered_json locus_to_json(const LocusRef& locus) {
    nlohmann::ordered_json j;
    j["id"] = locus.id;
    j["members"] = locus.members;
    return j;
}

LocusRef locus_from_json(const nlohmann::ordered_json& j) {
    LocusRef locus;
    locus.id = j.at("id").get<std::string>();
    locus.members = j.at("members").get<std::vector<std::string>>();
    return locus;
}

nlohmann::ordered_json lr_to_json(double lr) {
    if (std::isinf(lr)) return "inf";
    return lr;
}

double lr_from_json(const nlohmann::ordered_json& j) {
    if (j.is_string()) {
        if (j.get<std::string>() == "inf") return std::numeric_limits<double>::infinity();
        throw parse_error("unrecognized lr value in LR table");
    }
    return j.get<double>();
}

} // namespace

nlohmann::ordered_json LrTable::to_json() const {
    nlohmann::ordered_json j;
    j["loci"] = nlohmann::ordered_json::array();
    for (const auto& locus : loci_) j["loci"].push_back(locus_to_json(locus));
    j["alpha"] = alpha_;
    j["entries"] = nlohmann::ordered_json::array();
    for (const auto& e : entries_) {
        nlohmann::ordered_json je;
        je["genotype"] = e.genotype;
        je["case_count"] = e.case_count;
        je["control_count"] = e.control_count;
        je["lr"] = lr_to_json(e.lr);
        j["entries"].push_back(std::move(je));
    }
    return j;
}

LrTable LrTable::from_json(const nlohmann::ordered_json& j) {
    std::vector<LocusRef> loci;
    for (const auto& jl : j.at("loci")) loci.push_back(locus_from_json(jl));
    const double alpha = j.at("alpha").get<double>();
    std::vector<LrEntry> entries;
    long long n_case = 0, n_control = 0;
    for (const auto& je : j.at("entries")) {
        LrEntry e;
        e.genotype = je.at("genotype").get<std::vector<std::uint8_t>>();
        e.case_count = je.at("case_count").get<long long>();
        e.control_count = je.at("control_count").get<long long>();
        e.lr = lr_from_json(je.at("lr"));
        n_case += e.case_count;
        n_control += e.control_count;
        entries.push_back(std::move(e));
    }
    // The train totals are the column sums of the entry counts.
    return LrTable(std::move(loci), alpha, std::move(entries), n_case, n_control);
}

} // namespace croc
