#include <doctest.h>

#include <set>
#include <sstream>

#include "fairweight/dataset.hpp"
#include "helpers.hpp"

using namespace fairweight;

namespace {

DatasetSchema promotion_schema() {
    DatasetSchema s;
    s.target_column = "Promotion";
    s.favorable_label = "1";
    s.sensitive_columns = {"Race"};
    return s;
}

Dataset promotion_fixture() {
    return load_csv(fwtest::data_dir() + "/promotion.csv", promotion_schema());
}

// n rows, n_pos positives, one binary sensitive column, row id as a feature
Dataset sized_dataset(std::size_t n, std::size_t n_pos) {
    std::vector<std::vector<double>> features;
    std::vector<int> target;
    std::vector<int> group;
    for (std::size_t i = 0; i < n; ++i) {
        features.push_back({static_cast<double>(i)});
        target.push_back(i < n_pos ? 1 : 0);
        group.push_back(static_cast<int>(i % 2));
    }
    return fwtest::make_dataset(features, target, {group});
}

} // namespace

TEST_SUITE("dataset") {

TEST_CASE("schema validation rejects bad column sets") {
    DatasetSchema s = promotion_schema();
    s.sensitive_columns.clear();
    CHECK_THROWS_AS(s.validate(), Error);

    s = promotion_schema();
    s.sensitive_columns = {"Race", "Race"};
    CHECK_THROWS_AS(s.validate(), Error);

    s = promotion_schema();
    s.sensitive_columns = {"Promotion"};
    CHECK_THROWS_AS(s.validate(), Error);
}

TEST_CASE("schema JSON parsing") {
    const auto s = DatasetSchema::from_json_text(
        R"({"target_column":"Promotion","favorable_label":"1","sensitive_columns":["Race"]})");
    CHECK(s.target_column == "Promotion");
    CHECK(s.favorable_label == "1");
    CHECK(s.sensitive_columns == std::vector<std::string>{"Race"});
    CHECK(s.feature_columns.empty());

    CHECK_THROWS_AS(DatasetSchema::from_json_text("{not json"), Error);
    CHECK_THROWS_AS(DatasetSchema::from_json_text(R"({"target_column":"t"})"), Error);
}

TEST_CASE("load_csv on the promotion rows") {
    const auto ds = promotion_fixture();
    CHECK(ds.n_rows == 10);
    CHECK(ds.n_sensitive == 1);
    CHECK(ds.n_features == 5);  // all non-target columns by default

    // first-seen coding: W -> 0, H -> 1
    REQUIRE(ds.code_books[0].size() == 2);
    CHECK(ds.code_books[0].values[0] == "W");
    CHECK(ds.code_books[0].values[1] == "H");
    std::size_t w_count = 0, h_count = 0;
    for (std::size_t r = 0; r < ds.n_rows; ++r)
        (ds.sensitive_at(r, 0) == 0 ? w_count : h_count)++;
    CHECK(w_count == 7);
    CHECK(h_count == 3);

    const auto counts = ds.class_counts();
    CHECK(counts[1] == 6);
    CHECK(counts[0] == 4);

    // Position is categorical: coded 0 (Captain) / 1 (Lieutenant)
    CHECK(ds.feature_at(0, 0) == 0.0);
    CHECK(ds.feature_at(4, 0) == 1.0);
    // Oral parses as numeric
    CHECK(ds.feature_at(0, 1) == doctest::Approx(89.52));
}

TEST_CASE("load_csv error paths") {
    DatasetSchema s = promotion_schema();
    s.target_column = "NoSuchColumn";
    std::istringstream in1("Race,Promotion\nW,1\n");
    CHECK_THROWS_AS(load_csv_stream(in1, s), Error);

    std::istringstream in2("Race,Promotion\nW,1\nH,0\nW,2\n");
    try {
        load_csv_stream(in2, promotion_schema());
        FAIL("expected NonBinaryTarget");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::NonBinaryTarget);
    }

    std::istringstream in3("Race,Promotion\nW,1\n,0\n");
    try {
        load_csv_stream(in3, promotion_schema());
        FAIL("expected MissingValue");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::MissingValue);
    }

    std::istringstream in4("Race,Promotion\nW,1\nH\n");
    CHECK_THROWS_AS(load_csv_stream(in4, promotion_schema()), Error);
}

TEST_CASE("load_csv handles quoted fields") {
    std::istringstream in("Race,Note,Promotion\nW,\"a, quoted \"\"note\"\"\",1\nH,plain,0\n");
    const auto ds = load_csv_stream(in, promotion_schema());
    CHECK(ds.n_rows == 2);
    CHECK(ds.feature_at(0, 0) == 0.0);  // "a, quoted "note"" coded first
}

TEST_CASE("group index enumerates the code Cartesian product") {
    const auto ds = promotion_fixture();
    const auto gi = build_group_index(ds);
    CHECK(gi.n_groups == 2);
    CHECK(gi.n_slots == 4);
    for (std::size_t r = 0; r < ds.n_rows; ++r)
        CHECK(gi.group_of_row[r] == ds.sensitive_at(r, 0));

    // single observed value -> one group, two slots
    const auto single = fwtest::make_dataset({{0.0}, {1.0}}, {1, 0}, {{0, 0}});
    const auto gi1 = build_group_index(single);
    CHECK(gi1.n_groups == 1);
    CHECK(gi1.n_slots == 2);

    // two binary sensitive columns -> 2^(2+1) slots
    const auto two = fwtest::make_dataset({{0.0}, {1.0}, {2.0}, {3.0}}, {1, 0, 1, 0},
                                          {{0, 0, 1, 1}, {0, 1, 0, 1}});
    const auto gi2 = build_group_index(two);
    CHECK(gi2.n_groups == 4);
    CHECK(gi2.n_slots == 8);
    CHECK(gi2.group_codes(0) == std::vector<int>{0, 0});
    CHECK(gi2.group_codes(1) == std::vector<int>{0, 1});
    CHECK(gi2.group_codes(3) == std::vector<int>{1, 1});
}

TEST_CASE("group index covers all rows") {
    const auto ds = fwtest::make_biased_synthetic(257, 11);
    const auto gi = build_group_index(ds);
    std::vector<std::size_t> sizes(gi.n_groups, 0);
    for (std::size_t r = 0; r < ds.n_rows; ++r) {
        REQUIRE(gi.group_of_row[r] >= 0);
        REQUIRE(static_cast<std::size_t>(gi.group_of_row[r]) < gi.n_groups);
        sizes[static_cast<std::size_t>(gi.group_of_row[r])]++;
    }
    std::size_t total = 0;
    for (auto s : sizes) total += s;
    CHECK(total == ds.n_rows);
}

TEST_CASE("train_test_split stratifies exactly") {
    const auto ds = sized_dataset(100, 40);
    const auto [train, test] = train_test_split(ds, 0.25, 7);
    CHECK(test.n_rows == 25);
    CHECK(train.n_rows == 75);
    CHECK(test.class_counts()[1] == 10);
    CHECK(test.class_counts()[0] == 15);
    CHECK(train.class_counts()[1] == 30);
    CHECK(train.class_counts()[0] == 45);

    // both parts together hold every original row exactly once
    std::set<double> seen;
    for (std::size_t r = 0; r < train.n_rows; ++r) seen.insert(train.feature_at(r, 0));
    for (std::size_t r = 0; r < test.n_rows; ++r) seen.insert(test.feature_at(r, 0));
    CHECK(seen.size() == 100);
}

TEST_CASE("train_test_split is deterministic and seed-sensitive") {
    const auto ds = sized_dataset(100, 40);
    const auto [a_train, a_test] = train_test_split(ds, 0.25, 42);
    const auto [b_train, b_test] = train_test_split(ds, 0.25, 42);
    CHECK(a_train.features == b_train.features);
    CHECK(a_test.features == b_test.features);
    CHECK(a_train.target == b_train.target);

    std::set<std::vector<double>> partitions;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto [train, test] = train_test_split(ds, 0.25, seed);
        std::vector<double> ids;
        for (std::size_t r = 0; r < test.n_rows; ++r) ids.push_back(test.feature_at(r, 0));
        std::sort(ids.begin(), ids.end());
        partitions.insert(ids);
    }
    CHECK(partitions.size() == 20);
}

TEST_CASE("train_test_split degenerate class handling") {
    const auto ds = sized_dataset(10, 1);
    try {
        train_test_split(ds, 0.25, 3);
        FAIL("expected DegenerateSplit");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::DegenerateSplit);
    }
    CHECK_THROWS_AS(train_test_split(sized_dataset(9, 4), 0.25, 3), Error);
}

TEST_CASE("split parts stay within one row of the overall class ratio") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto ds = sized_dataset(83, 29);
        const double frac = 0.3;
        const auto [train, test] = train_test_split(ds, frac, seed);
        const auto whole = ds.class_counts();
        const auto part = test.class_counts();
        for (std::size_t c = 0; c < 2; ++c) {
            const double expected = static_cast<double>(whole[c]) * frac;
            CHECK(std::abs(static_cast<double>(part[c]) - expected) <= 1.0);
        }
    }
}

TEST_CASE("kfold partitions the dataset") {
    const auto ds = sized_dataset(100, 40);
    const auto folds = kfold(ds, 10, 5);
    REQUIRE(folds.size() == 10);

    std::multiset<double> all_val_ids;
    for (const auto& [train, val] : folds) {
        CHECK(val.n_rows == 10);
        CHECK(train.n_rows == 90);
        CHECK(val.class_counts()[1] == 4);
        for (std::size_t r = 0; r < val.n_rows; ++r) all_val_ids.insert(val.feature_at(r, 0));
    }
    CHECK(all_val_ids.size() == 100);
    CHECK(*all_val_ids.begin() == 0.0);
    CHECK(*all_val_ids.rbegin() == 99.0);

    const auto again = kfold(ds, 10, 5);
    for (std::size_t f = 0; f < folds.size(); ++f)
        CHECK(folds[f].second.features == again[f].second.features);
}

TEST_CASE("kfold rejects too-small classes") {
    const auto ds = sized_dataset(12, 6);
    try {
        kfold(ds, 10, 1);
        FAIL("expected TooFewRows");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::TooFewRows);
    }
    CHECK_THROWS_AS(kfold(sized_dataset(6, 3), 10, 1), Error);
}

TEST_CASE("undersample balances the classes") {
    const auto ds = sized_dataset(100, 20);
    const auto balanced = undersample(ds, 9);
    CHECK(balanced.class_counts()[0] == 20);
    CHECK(balanced.class_counts()[1] == 20);

    const auto again = undersample(ds, 9);
    CHECK(balanced.features == again.features);

    const auto other = undersample(ds, 10);
    CHECK(other.class_counts()[0] == 20);

    const auto even = sized_dataset(40, 20);
    const auto untouched = undersample(even, 1);
    CHECK(untouched.class_counts()[0] == 20);
    CHECK(untouched.class_counts()[1] == 20);
}

TEST_CASE("subset inherits code books") {
    const auto ds = promotion_fixture();
    const auto sub = ds.subset({4, 5, 7});  // only H rows
    CHECK(sub.n_rows == 3);
    CHECK(sub.code_books[0].size() == 2);  // W still coded even though absent
    const auto gi = build_group_index(sub);
    CHECK(gi.n_groups == 2);
}

} // TEST_SUITE
