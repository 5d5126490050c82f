#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fairweight/dataset.hpp"

namespace fairweight {

enum class ModelKind { WeightedLogistic, WeightedForest };

struct LogisticParams {
    double learning_rate = 0.1;
    int iterations = 500;
    double l2_penalty = 1e-4;
};

struct ForestParams {
    int n_trees = 100;
    int max_depth = 8;
    double min_leaf_weight = 1.0;
    // Fraction of features tried per split; unset means round(sqrt(n_features)).
    std::optional<double> features_per_split_fraction;
};

// The logistic model is deterministic and ignores the seed; the forest uses
// it for bootstrap samples and per-node feature subsets.
struct ModelSpec {
    ModelKind kind = ModelKind::WeightedLogistic;
    LogisticParams logistic;
    ForestParams forest;
    std::uint64_t seed = 0;

    ModelSpec with_seed(std::uint64_t s) const {
        ModelSpec copy = *this;
        copy.seed = s;
        return copy;
    }
    void validate() const;
};

std::string to_string(ModelKind kind);

struct MatrixView {
    const double* data = nullptr;
    std::size_t rows = 0;
    std::size_t cols = 0;

    double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
    const double* row_ptr(std::size_t r) const { return data + r * cols; }
    static MatrixView of(const Dataset& ds) { return {ds.features.data(), ds.n_rows, ds.n_features}; }
};

class FittedModel {
public:
    std::vector<double> predict_scores(MatrixView X) const;
    std::vector<double> predict_scores(const Dataset& ds) const { return predict_scores(MatrixView::of(ds)); }
    std::vector<int> predict_labels(MatrixView X) const;
    std::vector<int> predict_labels(const Dataset& ds) const { return predict_labels(MatrixView::of(ds)); }

    const ModelSpec& spec() const { return spec_; }

    // logistic only: fitted coefficients, bias last
    const std::vector<double>& coefficients() const;

private:
    friend FittedModel fit(const ModelSpec&, MatrixView, std::span<const int>, std::span<const double>);

    struct TreeNode {
        int feature = -1;  // -1 marks a leaf
        double threshold = 0.0;
        int left = -1;
        int right = -1;
        double value = 0.0;
    };
    struct Tree {
        std::vector<TreeNode> nodes;
    };

    ModelSpec spec_;
    std::size_t n_cols_ = 0;
    std::vector<double> theta_;  // logistic: coefficients + bias
    std::vector<Tree> trees_;    // forest
};

FittedModel fit(const ModelSpec& spec, MatrixView X, std::span<const int> y,
                std::span<const double> weights);

inline FittedModel fit(const ModelSpec& spec, const Dataset& ds, std::span<const double> weights) {
    return fit(spec, MatrixView::of(ds), ds.target, weights);
}

// Weighted cross-entropy plus L2 on the coefficients (bias excluded), with
// weights normalized to unit mass. theta layout matches FittedModel: bias last.
double weighted_logloss(MatrixView X, std::span<const int> y, std::span<const double> weights,
                        std::span<const double> theta, double l2_penalty);
std::vector<double> weighted_logloss_gradient(MatrixView X, std::span<const int> y,
                                              std::span<const double> weights,
                                              std::span<const double> theta, double l2_penalty);

} // namespace fairweight
