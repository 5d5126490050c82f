#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "fairweight/error.hpp"

namespace fairweight {

// Declares which columns of a CSV are the target, the sensitive attributes,
// and the features. feature_columns empty means "all non-target columns".
struct DatasetSchema {
    std::string target_column;
    std::string favorable_label;
    std::vector<std::string> sensitive_columns;
    std::vector<std::string> feature_columns;

    void validate() const;
    static DatasetSchema from_json_text(const std::string& text);
    static DatasetSchema from_json_file(const std::string& path);
    std::string to_json_text() const;
};

// Raw value -> small integer code, in first-seen order.
struct CodeBook {
    std::vector<std::string> values;

    int find(const std::string& raw) const {
        for (std::size_t i = 0; i < values.size(); ++i)
            if (values[i] == raw) return static_cast<int>(i);
        return -1;
    }
    int intern(const std::string& raw) {
        int c = find(raw);
        if (c >= 0) return c;
        values.push_back(raw);
        return static_cast<int>(values.size() - 1);
    }
    std::size_t size() const { return values.size(); }
};

// Tabular binary-classification data with coded sensitive attributes.
// Read-only after construction; safe to share across threads.
struct Dataset {
    std::vector<double> features;  // row-major, n_rows x n_features
    std::vector<int> target;       // 0/1, 1 = favorable
    std::vector<int> sensitive;    // row-major, n_rows x n_sensitive
    std::size_t n_rows = 0;
    std::size_t n_features = 0;
    std::size_t n_sensitive = 0;
    std::vector<CodeBook> code_books;  // one per sensitive column
    std::vector<std::string> feature_names;
    std::vector<std::string> sensitive_names;

    double feature_at(std::size_t row, std::size_t col) const {
        return features[row * n_features + col];
    }
    int sensitive_at(std::size_t row, std::size_t col) const {
        return sensitive[row * n_sensitive + col];
    }
    const double* row_ptr(std::size_t row) const { return features.data() + row * n_features; }

    // counts[0] = negatives, counts[1] = positives
    std::array<std::size_t, 2> class_counts() const;

    // New dataset holding the given rows (in the given order). Code books and
    // column names are inherited, so group enumeration stays stable across
    // splits and folds.
    Dataset subset(const std::vector<std::size_t>& rows) const;
};

// Enumeration of sensitive-value combinations (groups) and (group, class)
// weight slots. Groups enumerate the Cartesian product of each sensitive
// column's coded value set in lexicographic code order, so unobserved
// combinations still hold (inert) slots. Slot order: (g0,c0), (g0,c1), (g1,c0), ...
struct GroupIndex {
    std::vector<int> group_of_row;
    std::vector<std::size_t> dims;  // code-book size per sensitive column
    std::size_t n_groups = 0;
    std::size_t n_slots = 0;

    std::size_t slot_of(std::size_t group, int cls) const {
        return group * 2 + static_cast<std::size_t>(cls);
    }
    // Decode a group id back to one code per sensitive column.
    std::vector<int> group_codes(std::size_t group) const;
};

GroupIndex build_group_index(const Dataset& ds);

Dataset load_csv(const std::string& path, const DatasetSchema& schema);
Dataset load_csv_stream(std::istream& in, const DatasetSchema& schema, const std::string& origin = "<stream>");

// Stratified by target; deterministic given seed. Returns (train, test).
std::pair<Dataset, Dataset> train_test_split(const Dataset& ds, double test_fraction, std::uint64_t seed);

// k stratified folds, disjoint, covering all rows. Pairs are (train, validation).
struct FoldIndices {
    std::vector<std::size_t> train_rows;
    std::vector<std::size_t> val_rows;
};
std::vector<FoldIndices> kfold_indices(const Dataset& ds, std::size_t k, std::uint64_t seed);
std::vector<std::pair<Dataset, Dataset>> kfold(const Dataset& ds, std::size_t k, std::uint64_t seed);

// Random undersampling of the majority class down to the minority count.
Dataset undersample(const Dataset& ds, std::uint64_t seed);

} // namespace fairweight
