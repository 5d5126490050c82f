#pragma once

// Shared builders for the test suites: programmatic datasets and the biased
// synthetic benchmark used by the GA and harness tests.

#include <string>
#include <vector>

#include "fairweight/dataset.hpp"
#include "fairweight/rng.hpp"

namespace fwtest {

// Dataset from explicit columns. Sensitive codes must be dense in [0, max];
// code books get synthetic value names.
inline fairweight::Dataset make_dataset(const std::vector<std::vector<double>>& features,
                                        const std::vector<int>& target,
                                        const std::vector<std::vector<int>>& sensitive_cols) {
    fairweight::Dataset ds;
    ds.n_rows = target.size();
    ds.n_features = features.empty() ? 0 : features.front().size();
    ds.n_sensitive = sensitive_cols.size();
    ds.target = target;
    for (const auto& row : features)
        ds.features.insert(ds.features.end(), row.begin(), row.end());
    ds.code_books.resize(ds.n_sensitive);
    for (std::size_t k = 0; k < ds.n_sensitive; ++k) {
        int max_code = 0;
        for (int c : sensitive_cols[k]) max_code = std::max(max_code, c);
        for (int c = 0; c <= max_code; ++c)
            ds.code_books[k].values.push_back("v" + std::to_string(c));
        ds.sensitive_names.push_back("s" + std::to_string(k));
    }
    for (std::size_t r = 0; r < ds.n_rows; ++r)
        for (std::size_t k = 0; k < ds.n_sensitive; ++k)
            ds.sensitive.push_back(sensitive_cols[k][r]);
    for (std::size_t j = 0; j < ds.n_features; ++j) ds.feature_names.push_back("x" + std::to_string(j));
    return ds;
}

// Binary-sensitive synthetic classification data with group-conditional label
// bias: rows of the second group have their labels flipped 1 -> 0 with the
// given rate, mimicking historically suppressed favorable outcomes. The
// sensitive code is also exposed as a feature so models can discriminate.
inline fairweight::Dataset make_biased_synthetic(std::size_t n, std::uint64_t seed,
                                                 double flip_rate = 0.2) {
    fairweight::Rng rng(seed);
    std::vector<std::vector<double>> features;
    std::vector<int> target;
    std::vector<int> group;
    features.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const int g = rng.coin() ? 1 : 0;
        const double x0 = rng.normal();
        const double x1 = rng.normal();
        const double x2 = rng.normal();
        const double logit = 1.3 * x0 + 0.9 * x1 - 0.4 * x2 + 0.5 * rng.normal();
        int y = logit > 0.0 ? 1 : 0;
        if (g == 1 && y == 1 && rng.real() < flip_rate) y = 0;
        features.push_back({x0, x1, x2, static_cast<double>(g)});
        target.push_back(y);
        group.push_back(g);
    }
    return make_dataset(features, target, {group});
}

inline std::string data_dir() { return TEST_DATA_DIR; }

} // namespace fwtest
