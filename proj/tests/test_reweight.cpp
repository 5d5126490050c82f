#include <doctest.h>

#include <json.hpp>

#include "fairweight/reweight.hpp"
#include "fairweight/rng.hpp"
#include "helpers.hpp"

using namespace fairweight;

namespace {

Dataset promotion_fixture() {
    DatasetSchema s;
    s.target_column = "Promotion";
    s.favorable_label = "1";
    s.sensitive_columns = {"Race"};
    return load_csv(fwtest::data_dir() + "/promotion.csv", s);
}

} // namespace

TEST_SUITE("reweight") {

TEST_CASE("deterministic weights reproduce the promotion example") {
    const auto ds = promotion_fixture();
    const auto gi = build_group_index(ds);
    const auto sw = deterministic_weights(ds, gi);

    REQUIRE(sw.values.size() == 4);
    // W coded 0, H coded 1; slot order (g, c): (0,0), (0,1), (1,0), (1,1)
    CHECK(sw.values[gi.slot_of(0, 1)] == doctest::Approx(0.84).epsilon(1e-9));
    CHECK(sw.values[gi.slot_of(0, 0)] == doctest::Approx(1.4).epsilon(1e-9));
    CHECK(sw.values[gi.slot_of(1, 1)] == doctest::Approx(1.8).epsilon(1e-9));
    CHECK(sw.values[gi.slot_of(1, 0)] == doctest::Approx(0.6).epsilon(1e-9));

    const auto w = expand_and_assign(sw, ds, gi);
    const std::vector<double> expected = {0.84, 0.84, 0.84, 1.4, 0.6, 0.6, 0.84, 1.8, 1.4, 0.84};
    REQUIRE(w.size() == expected.size());
    for (std::size_t r = 0; r < w.size(); ++r) CHECK(w[r] == expected[r]);
}

TEST_CASE("independent group and class give unit weights") {
    // 2 groups x (2 positives + 2 negatives) each: P(g)P(c) = P(g,c) exactly
    const auto ds = fwtest::make_dataset(
        {{0}, {1}, {2}, {3}, {4}, {5}, {6}, {7}},
        {1, 1, 0, 0, 1, 1, 0, 0},
        {{0, 0, 0, 0, 1, 1, 1, 1}});
    const auto gi = build_group_index(ds);
    const auto sw = deterministic_weights(ds, gi);
    for (double v : sw.values) CHECK(v == 1.0);
}

TEST_CASE("zero joint count slots stay at one") {
    // group 1 has no positives, so slot (1, 1) is never selectable
    const auto ds = fwtest::make_dataset({{0}, {1}, {2}, {3}}, {1, 0, 0, 0}, {{0, 0, 1, 1}});
    const auto gi = build_group_index(ds);
    const auto sw = deterministic_weights(ds, gi);
    CHECK(sw.values[gi.slot_of(1, 1)] == 1.0);
    CHECK(sw.values[gi.slot_of(1, 0)] == doctest::Approx((0.5 * 0.75) / 0.5));
}

TEST_CASE("equal weights are all ones and expand to ones") {
    const auto ds = promotion_fixture();
    const auto gi = build_group_index(ds);
    const auto sw = equal_weights(gi);
    CHECK(sw.values == std::vector<double>(4, 1.0));
    const auto w = expand_and_assign(sw, ds, gi);
    CHECK(w == std::vector<double>(ds.n_rows, 1.0));

    GroupIndex small;
    small.n_groups = 1;
    small.n_slots = 2;
    CHECK(equal_weights(small).values == std::vector<double>{1.0, 1.0});
}

TEST_CASE("expansion is a pure per-row lookup") {
    const auto ds = promotion_fixture();
    const auto gi = build_group_index(ds);
    const auto sw = deterministic_weights(ds, gi);
    const auto w = expand_and_assign(sw, ds, gi);

    const std::vector<std::size_t> perm = {3, 1, 4, 0, 2, 9, 8, 7, 6, 5};
    const auto permuted = ds.subset(perm);
    const auto w_perm = expand_and_assign(sw, permuted, build_group_index(permuted));
    for (std::size_t i = 0; i < perm.size(); ++i) CHECK(w_perm[i] == w[perm[i]]);
}

TEST_CASE("slot count mismatch is rejected") {
    const auto ds = promotion_fixture();
    const auto gi = build_group_index(ds);
    SlotWeights bad{std::vector<double>(3, 1.0)};
    try {
        expand_and_assign(bad, ds, gi);
        FAIL("expected SlotMismatch");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::SlotMismatch);
    }
}

TEST_CASE("deterministic weights rebalance group-class mass") {
    Rng rng(31);
    for (int trial = 0; trial < 10; ++trial) {
        const auto ds = fwtest::make_biased_synthetic(120 + trial * 17, 1000 + trial);
        const auto gi = build_group_index(ds);
        const auto sw = deterministic_weights(ds, gi);
        const auto w = expand_and_assign(sw, ds, gi);

        const auto n = static_cast<double>(ds.n_rows);
        const auto counts = ds.class_counts();
        for (std::size_t g = 0; g < gi.n_groups; ++g) {
            double group_size = 0.0, weighted_pos = 0.0;
            bool has_pos = false;
            for (std::size_t r = 0; r < ds.n_rows; ++r) {
                if (static_cast<std::size_t>(gi.group_of_row[r]) != g) continue;
                group_size += 1.0;
                if (ds.target[r] == 1) {
                    weighted_pos += w[r];
                    has_pos = true;
                }
            }
            if (!has_pos) continue;  // the rebalance identity needs a nonzero joint count
            const double expected = (group_size / n) * (static_cast<double>(counts[1]) / n);
            CHECK(weighted_pos / n == doctest::Approx(expected).epsilon(1e-12));
        }
    }
}

TEST_CASE("slot weights serialize with group codes") {
    const auto ds = promotion_fixture();
    const auto gi = build_group_index(ds);
    const auto text = slot_weights_to_json(deterministic_weights(ds, gi), gi);
    const auto j = nlohmann::json::parse(text);
    REQUIRE(j.contains("slots"));
    REQUIRE(j["slots"].size() == 4);
    CHECK(j["slots"][0]["group"] == nlohmann::json::array({0}));
    CHECK(j["slots"][0]["class"] == 0);
    CHECK(j["slots"][1]["class"] == 1);
    CHECK(j["slots"][1]["weight"].get<double>() == doctest::Approx(0.84));
}

} // TEST_SUITE
