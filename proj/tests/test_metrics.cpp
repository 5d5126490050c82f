#include <doctest.h>

#include <vector>

#include "fairweight/metrics.hpp"
#include "fairweight/rng.hpp"

using namespace fairweight;

namespace {

// Six-row toy: groups (A,A,B,B,B,B), before/after prediction columns.
const std::vector<int> kToyY = {1, 0, 0, 0, 1, 1};
const std::vector<int> kToyBefore = {0, 0, 0, 1, 1, 1};
const std::vector<int> kToyAfter = {0, 0, 0, 0, 0, 1};
const std::vector<int> kToyGroups = {0, 0, 1, 1, 1, 1};

// counts pairs directly; the implementation must agree exactly
double auroc_pairwise_oracle(const std::vector<int>& y, const std::vector<double>& scores) {
    std::uint64_t concordant = 0, tied = 0, pairs = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] != 1) continue;
        for (std::size_t j = 0; j < y.size(); ++j) {
            if (y[j] != 0) continue;
            ++pairs;
            if (scores[i] > scores[j])
                ++concordant;
            else if (scores[i] == scores[j])
                ++tied;
        }
    }
    return (static_cast<double>(concordant) + 0.5 * static_cast<double>(tied)) /
           static_cast<double>(pairs);
}

} // namespace

TEST_SUITE("metrics") {

TEST_CASE("accuracy on the toy columns") {
    CHECK(accuracy(kToyY, kToyBefore) == doctest::Approx(4.0 / 6.0).epsilon(1e-12));
    CHECK(accuracy(kToyY, kToyAfter) == doctest::Approx(4.0 / 6.0).epsilon(1e-12));
    CHECK(accuracy(kToyY, kToyY) == 1.0);
}

TEST_CASE("accuracy preconditions") {
    const std::vector<int> a = {1, 0}, b = {1};
    CHECK_THROWS_AS(accuracy(a, b), Error);
    CHECK_THROWS_AS(accuracy(std::vector<int>{}, std::vector<int>{}), Error);
}

TEST_CASE("auroc endpoints") {
    const std::vector<int> y = {0, 0, 1, 1};
    CHECK(auroc(y, std::vector<double>{0.1, 0.2, 0.8, 0.9}) == 1.0);
    CHECK(auroc(y, std::vector<double>{0.5, 0.5, 0.5, 0.5}) == 0.5);
    CHECK(auroc(y, std::vector<double>{0.9, 0.8, 0.2, 0.1}) == 0.0);
}

TEST_CASE("auroc worked example") {
    const std::vector<int> y = {1, 0, 1, 0, 0};
    const std::vector<double> scores = {0.9, 0.8, 0.4, 0.3, 0.2};
    CHECK(auroc(y, scores) == 5.0 / 6.0);
    CHECK(auroc(y, scores) == auroc_pairwise_oracle(y, scores));
}

TEST_CASE("auroc equals the pairwise oracle exactly") {
    Rng rng(2024);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 10 + rng.below(200);
        std::vector<int> y(n);
        std::vector<double> scores(n);
        bool has_pos = false, has_neg = false;
        for (std::size_t i = 0; i < n; ++i) {
            y[i] = rng.coin() ? 1 : 0;
            (y[i] == 1 ? has_pos : has_neg) = true;
            // a coarse score grid forces plenty of ties
            scores[i] = static_cast<double>(rng.below(8)) / 7.0;
        }
        if (!has_pos || !has_neg) continue;
        CHECK(auroc(y, scores) == auroc_pairwise_oracle(y, scores));
    }
}

TEST_CASE("auroc preconditions") {
    CHECK_THROWS_AS(auroc(std::vector<int>{1, 1}, std::vector<double>{0.5, 0.5}), Error);
    try {
        auroc(std::vector<int>{0, 0, 0}, std::vector<double>{0.1, 0.2, 0.3});
        FAIL("expected SingleClass");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::SingleClass);
    }
}

TEST_CASE("dpd on the toy columns") {
    CHECK(dpd(kToyBefore, kToyGroups, 2) == 0.75);
    CHECK(dpd(kToyAfter, kToyGroups, 2) == 0.25);
    CHECK(dpd(kToyBefore, std::vector<int>(6, 0), 1) == 0.0);
}

TEST_CASE("dpd rewards uniformly worse outcomes") {
    // regression guard for the degenerate improvement: no group's acceptance
    // rate rose (B fell from 3/4 to 1/4, A stayed at 0) yet the gap shrank,
    // because dpd sees predictions and groups only
    auto rate = [](const std::vector<int>& y_hat, int group) {
        double hits = 0, size = 0;
        for (std::size_t i = 0; i < y_hat.size(); ++i)
            if (kToyGroups[i] == group) {
                size += 1;
                hits += y_hat[i];
            }
        return hits / size;
    };
    CHECK(rate(kToyAfter, 0) <= rate(kToyBefore, 0));
    CHECK(rate(kToyAfter, 1) < rate(kToyBefore, 1));
    CHECK(dpd(kToyAfter, kToyGroups, 2) < dpd(kToyBefore, kToyGroups, 2));
}

TEST_CASE("dpd is invariant under group relabeling") {
    const std::vector<int> y_hat = {1, 0, 1, 1, 0, 0, 1, 0};
    const std::vector<int> groups = {0, 0, 1, 1, 2, 2, 2, 0};
    const std::vector<int> relabeled = {2, 2, 0, 0, 1, 1, 1, 2};
    CHECK(dpd(y_hat, groups, 3) == dpd(y_hat, relabeled, 3));
}

TEST_CASE("sfn on the toy after column") {
    CHECK(sfn(kToyY, kToyAfter, kToyGroups, 2) == doctest::Approx(1.0 / 18.0).epsilon(1e-12));
}

TEST_CASE("sfn is zero for a perfect predictor and for a single group") {
    CHECK(sfn(kToyY, kToyY, kToyGroups, 2) == 0.0);
    CHECK(sfn(kToyY, kToyAfter, std::vector<int>(6, 0), 1) == 0.0);

    Rng rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<int> y(40), groups(40);
        bool has_pos = false;
        for (std::size_t i = 0; i < y.size(); ++i) {
            y[i] = rng.coin() ? 1 : 0;
            has_pos = has_pos || y[i] == 1;
            groups[i] = static_cast<int>(rng.below(4));
        }
        if (!has_pos) continue;
        CHECK(sfn(y, y, groups, 4) == 0.0);
    }
}

TEST_CASE("sfn stays in [0,1]") {
    Rng rng(99);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<int> y(30), y_hat(30), groups(30);
        bool has_pos = false;
        for (std::size_t i = 0; i < y.size(); ++i) {
            y[i] = rng.coin() ? 1 : 0;
            y_hat[i] = rng.coin() ? 1 : 0;
            groups[i] = static_cast<int>(rng.below(3));
            has_pos = has_pos || y[i] == 1;
        }
        if (!has_pos) continue;
        const double v = sfn(y, y_hat, groups, 3);
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
}

TEST_CASE("sfn requires positives") {
    try {
        sfn(std::vector<int>{0, 0}, std::vector<int>{0, 1}, std::vector<int>{0, 1}, 2);
        FAIL("expected NoPositives");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::NoPositives);
    }
}

TEST_CASE("score_pair dispatches the four combinations") {
    const std::vector<double> toy_scores = {0.0, 0.0, 0.0, 0.0, 0.0, 1.0};  // after column as scores

    const auto acc_dpd = score_pair({Predictive::Acc, Fairness::Dpd}, kToyY, kToyBefore, {},
                                    kToyGroups, 2);
    CHECK(acc_dpd.predictive_score == doctest::Approx(2.0 / 3.0));
    CHECK(acc_dpd.fairness_score == 0.75);

    const std::vector<int> ones = {1, 1, 1};
    const auto perfect =
        score_pair({Predictive::Acc, Fairness::Dpd}, std::vector<int>{1, 1, 0},
                   std::vector<int>{1, 1, 0}, {}, std::vector<int>{0, 0, 0}, 1);
    CHECK(perfect.predictive_score == 1.0);
    CHECK(perfect.fairness_score == 0.0);

    const auto roc_sfn = score_pair({Predictive::Roc, Fairness::Sfn}, kToyY, kToyAfter, toy_scores,
                                    kToyGroups, 2);
    std::vector<double> after_as_scores(kToyAfter.begin(), kToyAfter.end());
    CHECK(roc_sfn.predictive_score == auroc_pairwise_oracle(kToyY, after_as_scores));
    CHECK(roc_sfn.fairness_score == doctest::Approx(1.0 / 18.0));
}

TEST_CASE("threshold_labels splits at one half") {
    const auto labels = threshold_labels(std::vector<double>{0.2, 0.5, 0.8});
    CHECK(labels == std::vector<int>{0, 1, 1});
}

} // TEST_SUITE
