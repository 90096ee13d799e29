#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "croc/cohort.hpp"
#include "croc/errors.hpp"
#include "croc/rng.hpp"
#include "croc/roc.hpp"

#include "test_util.hpp"

using namespace croc;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> random_scores(Rng& rng, std::size_t n, bool allow_inf) {
    // Mixture of continuous values and a small tie-prone alphabet.
    static const double alphabet[] = {0.0, 0.5, 1.0, 2.0, 10.0};
    std::vector<double> scores(n);
    for (auto& s : scores) {
        const double u = rng.u01();
        if (allow_inf && u < 0.03)
            s = kInf;
        else if (u < 0.55)
            s = alphabet[rng.below(5)];
        else
            s = rng.u01() * 4.0;
    }
    return scores;
}

} // namespace

TEST_CASE("lr_value reproduces the likelihood-ratio arithmetic") {
    // seen in 2/10 cases and 1/10 controls, no smoothing
    CHECK(lr_value(2, 1, 10, 10, 0.0, 3) == doctest::Approx(2.0).epsilon(1e-15));
    // same counts, alpha = 0.5 and two observed genotypes: (2.5/11)/(1.5/11)
    CHECK(lr_value(2, 1, 10, 10, 0.5, 2) == doctest::Approx(5.0 / 3.0).epsilon(1e-15));
    // zero control count with alpha = 0 -> +inf sentinel
    CHECK(std::isinf(lr_value(3, 0, 10, 10, 0.0, 2)));
    // zero case count -> 0
    CHECK(lr_value(0, 4, 10, 10, 0.0, 2) == 0.0);
}

TEST_CASE("estimate_lr_table counts multilocus genotypes") {
    // 4 cases, 4 controls; v1 x v2 genotypes chosen to give distinct cells
    std::vector<int> phen = {1, 1, 1, 1, 0, 0, 0, 0};
    std::vector<std::uint8_t> v1 = {0, 0, 1, 1, 0, 1, 1, 1};
    std::vector<std::uint8_t> v2 = {0, 0, 0, 1, 0, 0, 0, 1};
    Cohort cohort = croctest::make_cohort(phen, {v1, v2});

    LrTable table = estimate_lr_table(cohort, {{"v1", {}}, {"v2", {}}}, 0.0);
    CHECK(table.m_k() == 3); // (0,0), (1,0), (1,1)
    long long case_sum = 0, control_sum = 0;
    for (const auto& e : table.entries()) {
        case_sum += e.case_count;
        control_sum += e.control_count;
    }
    CHECK(case_sum == 4);
    CHECK(control_sum == 4);

    const std::vector<std::uint8_t> g00 = {0, 0};
    CHECK(table.lookup(g00).value() == doctest::Approx(2.0)); // 2/4 vs 1/4

    SUBCASE("alpha > 0 keeps every lr finite and positive") {
        LrTable smoothed = estimate_lr_table(cohort, {{"v1", {}}, {"v2", {}}}, 0.5);
        for (const auto& e : smoothed.entries()) {
            CHECK(std::isfinite(e.lr));
            CHECK(e.lr > 0.0);
        }
    }
    SUBCASE("empty loci list is a usage error") {
        CHECK_THROWS_AS(estimate_lr_table(cohort, {}, 0.0), usage_error);
    }
}

TEST_CASE("score_individuals looks up the table with a neutral fallback") {
    std::vector<int> phen = {1, 1, 0, 0};
    std::vector<std::uint8_t> v1 = {1, 1, 0, 1};
    Cohort train = croctest::make_cohort(phen, {v1});
    LrTable table = estimate_lr_table(train, {{"v1", {}}}, 0.0);

    auto scores = score_individuals(table, train);
    CHECK(scores[0] == doctest::Approx(2.0)); // carriers: 2/2 cases vs 1/2 controls
    CHECK(scores[2] == doctest::Approx(0.0)); // non-carrier: 0 cases vs 1 control

    // a cohort containing a genotype the table never saw scores 1.0
    std::vector<std::uint8_t> v1_test = {2, 0, 1, 0};
    Cohort test = croctest::make_cohort(phen, {v1_test});
    auto test_scores = score_individuals(table, test);
    CHECK(test_scores[0] == 1.0);

    SUBCASE("missing locus raises a usage error naming the id") {
        std::vector<std::uint8_t> w = {0, 1, 0, 1};
        Cohort other = croctest::make_cohort(phen, {w, w});
        // build a table over a variant id the test cohort lacks
        Cohort train2 = croctest::make_cohort(phen, {v1, v1, v1});
        LrTable table3 = estimate_lr_table(train2, {{"v3", {}}}, 0.0);
        CHECK_THROWS_WITH_AS(score_individuals(table3, other), doctest::Contains("v3"),
                             locus_mismatch_error);
    }
}

TEST_CASE("auc matches its stated examples") {
    CHECK(auc(std::vector<double>{2.0}, std::vector<double>{1.0}) == 1.0);
    CHECK(auc(std::vector<double>{1.0, 1.0}, std::vector<double>{1.0}) == 0.5);
    // pairs (1, 1, 0, 0) over all four case-control pairs
    CHECK(auc(std::vector<double>{3.0, 1.0}, std::vector<double>{2.0, 2.0}) == 0.5);
    CHECK(auc_oracle(std::vector<double>{5, 4, 3}, std::vector<double>{1, 2}) == 1.0);
    CHECK_THROWS_AS(auc({}, std::vector<double>{1.0}), usage_error);
    CHECK_THROWS_AS(auc_oracle(std::vector<double>{1.0}, {}), usage_error);
}

TEST_CASE("auc equals the nested-sum oracle exactly") {
    Rng rng(2024);
    for (int rep = 0; rep < 200; ++rep) {
        const std::size_t nc = 1 + rng.below(60);
        const std::size_t nk = 1 + rng.below(60);
        auto cases = random_scores(rng, nc, true);
        auto controls = random_scores(rng, nk, true);
        const double fast = auc(cases, controls);
        const double slow = auc_oracle(cases, controls);
        REQUIRE(std::abs(fast - slow) <= 1e-12);
        REQUIRE(fast >= 0.0);
        REQUIRE(fast <= 1.0);
    }
}

TEST_CASE("label swap and monotone transforms behave as stated") {
    Rng rng(7);
    for (int rep = 0; rep < 50; ++rep) {
        auto cases = random_scores(rng, 1 + rng.below(40), false);
        auto controls = random_scores(rng, 1 + rng.below(40), false);
        const double a = auc(cases, controls);

        // swap labels: 1 - a (the 0.5 tie kernel is symmetric)
        CHECK(auc(controls, cases) == doctest::Approx(1.0 - a).epsilon(1e-12));

        // strictly increasing transform preserves order and tie structure
        auto transform = [](std::vector<double> xs) {
            for (auto& x : xs) x = std::exp(x) + 3.0 * x;
            return xs;
        };
        CHECK(auc(transform(cases), transform(controls)) == a);
    }
}

TEST_CASE("two infinite scores compare equal") {
    CHECK(auc(std::vector<double>{kInf}, std::vector<double>{kInf}) == 0.5);
    CHECK(auc(std::vector<double>{kInf, 2.0}, std::vector<double>{1.0, kInf}) ==
          auc_oracle(std::vector<double>{kInf, 2.0}, std::vector<double>{1.0, kInf}));
}

TEST_CASE("roc_points produces the stated curves") {
    SUBCASE("single threshold") {
        RocCurve curve = roc_points(std::vector<double>{2.0}, std::vector<double>{1.0});
        REQUIRE(curve.points.size() == 3);
        CHECK(curve.points[0].fpr == 0.0);
        CHECK(curve.points[0].tpr == 0.0);
        CHECK(curve.points[1].fpr == 0.0);
        CHECK(curve.points[1].tpr == 1.0);
        CHECK(curve.points[2].fpr == 1.0);
        CHECK(curve.points[2].tpr == 1.0);
        CHECK(curve.auc == 1.0);
    }
    SUBCASE("constant scores give the diagonal") {
        RocCurve curve =
            roc_points(std::vector<double>{1.0, 1.0}, std::vector<double>{1.0, 1.0, 1.0});
        REQUIRE(curve.points.size() == 2);
        CHECK(curve.points[1].fpr == 1.0);
        CHECK(curve.points[1].tpr == 1.0);
        CHECK(curve.auc == 0.5);
    }
}

TEST_CASE("roc curve trapezoid area equals the kernel auc") {
    Rng rng(99);
    for (int rep = 0; rep < 100; ++rep) {
        auto cases = random_scores(rng, 1 + rng.below(80), true);
        auto controls = random_scores(rng, 1 + rng.below(80), true);
        RocCurve curve = roc_points(cases, controls);

        // curve invariants
        CHECK(curve.points.front().fpr == 0.0);
        CHECK(curve.points.front().tpr == 0.0);
        CHECK(curve.points.back().fpr == 1.0);
        CHECK(curve.points.back().tpr == 1.0);
        for (std::size_t i = 1; i < curve.points.size(); ++i) {
            CHECK(curve.points[i].fpr >= curve.points[i - 1].fpr);
            CHECK(curve.points[i].tpr >= curve.points[i - 1].tpr);
        }

        double area = 0.0;
        for (std::size_t i = 1; i < curve.points.size(); ++i) {
            area += (curve.points[i].fpr - curve.points[i - 1].fpr) *
                    (curve.points[i].tpr + curve.points[i - 1].tpr) * 0.5;
        }
        CHECK(std::abs(area - curve.auc) <= 1e-12);
        CHECK(curve.auc == auc(cases, controls));
    }
}

TEST_CASE("ranking by empirical likelihood ratio maximizes training auc") {
    Rng rng(31);
    for (int rep = 0; rep < 50; ++rep) {
        const std::size_t n_groups = 2 + rng.below(5); // up to 6
        std::vector<long long> case_counts(n_groups), control_counts(n_groups);
        long long n_case = 0, n_control = 0;
        for (std::size_t g = 0; g < n_groups; ++g) {
            case_counts[g] = static_cast<long long>(rng.below(10));
            control_counts[g] = 1 + static_cast<long long>(rng.below(9));
            n_case += case_counts[g];
            n_control += control_counts[g];
        }
        if (n_case == 0) {
            case_counts[0] = 1;
            n_case = 1;
        }

        std::vector<double> lr(n_groups);
        for (std::size_t g = 0; g < n_groups; ++g)
            lr[g] = lr_value(case_counts[g], control_counts[g], n_case, n_control, 0.0,
                             n_groups);

        auto assignment_auc = [&](const std::vector<std::size_t>& perm) {
            std::vector<ScoreGroup> groups(n_groups);
            for (std::size_t g = 0; g < n_groups; ++g)
                groups[g] = {lr[perm[g]], case_counts[g], control_counts[g]};
            return auc_from_groups(std::move(groups));
        };

        std::vector<std::size_t> perm(n_groups);
        std::iota(perm.begin(), perm.end(), 0);
        const double best = assignment_auc(perm);
        do {
            CHECK(best >= assignment_auc(perm));
        } while (std::next_permutation(perm.begin(), perm.end()));
    }
}

TEST_CASE("lr table serializes and round-trips including the inf sentinel") {
    std::vector<int> phen = {1, 1, 1, 0, 0};
    std::vector<std::uint8_t> v1 = {2, 2, 0, 0, 1};
    Cohort cohort = croctest::make_cohort(phen, {v1});
    LrTable table = estimate_lr_table(cohort, {{"v1", {}}}, 0.0);

    bool saw_inf = false;
    for (const auto& e : table.entries()) saw_inf = saw_inf || std::isinf(e.lr);
    CHECK(saw_inf); // code 2 is carried by cases only

    auto j = table.to_json();
    REQUIRE(j.contains("loci"));
    REQUIRE(j.contains("alpha"));
    REQUIRE(j.contains("entries"));

    LrTable back = LrTable::from_json(j);
    CHECK(back.m_k() == table.m_k());
    CHECK(back.n_case_train() == table.n_case_train());
    CHECK(back.n_control_train() == table.n_control_train());
    for (std::size_t i = 0; i < table.entries().size(); ++i) {
        CHECK(back.entries()[i].genotype == table.entries()[i].genotype);
        CHECK(back.entries()[i].case_count == table.entries()[i].case_count);
        CHECK(back.entries()[i].control_count == table.entries()[i].control_count);
        if (std::isinf(table.entries()[i].lr))
            CHECK(std::isinf(back.entries()[i].lr));
        else
            CHECK(back.entries()[i].lr == table.entries()[i].lr);
    }
    CHECK(back.to_json().dump() == j.dump());
}

TEST_CASE("roc tsv export uses the stated header") {
    auto dir = croctest::fresh_temp_dir("roc");
    RocCurve curve = roc_points(std::vector<double>{2.0, 1.0}, std::vector<double>{1.0, 0.0});
    write_roc_tsv(curve, dir / "roc.tsv");
    const std::string content = croctest::read_file(dir / "roc.tsv");
    CHECK(content.rfind("fpr\ttpr\n", 0) == 0);
}
