#include "fairweight/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fairweight/rng.hpp"

namespace fairweight {

std::string to_string(ModelKind kind) {
    return kind == ModelKind::WeightedLogistic ? "logistic" : "forest";
}

void ModelSpec::validate() const {
    if (kind == ModelKind::WeightedLogistic) {
        if (logistic.learning_rate <= 0.0 || logistic.iterations <= 0 || logistic.l2_penalty < 0.0)
            raise(Errc::InvalidConfig, "logistic: learning_rate and iterations must be positive");
    } else {
        if (forest.n_trees <= 0 || forest.max_depth < 0 || forest.min_leaf_weight <= 0.0)
            raise(Errc::InvalidConfig, "forest: n_trees and min_leaf_weight must be positive");
        if (forest.features_per_split_fraction &&
            !(*forest.features_per_split_fraction > 0.0 && *forest.features_per_split_fraction <= 1.0))
            raise(Errc::InvalidConfig, "forest: features_per_split_fraction must be in (0,1]");
    }
}

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

void check_fit_inputs(MatrixView X, std::span<const int> y, std::span<const double> w) {
    if (X.rows != y.size() || X.rows != w.size())
        raise(Errc::ShapeMismatch, "fit: rows, labels and weights must agree in length");
    if (X.rows == 0) raise(Errc::EmptyInput, "fit: no rows");

    bool has_pos = false, has_neg = false;
    for (int v : y) (v == 1 ? has_pos : has_neg) = true;
    if (!has_pos || !has_neg) raise(Errc::DegenerateLabels, "fit: both classes must be present");

    double class_mass[2] = {0.0, 0.0};
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (w[i] < 0.0) raise(Errc::NegativeWeight, "fit: negative sample weight at row " + std::to_string(i));
        class_mass[static_cast<std::size_t>(y[i])] += w[i];
    }
    if (class_mass[0] <= 0.0 || class_mass[1] <= 0.0)
        raise(Errc::AllZeroWeights, "fit: one class carries zero total weight");
}

} // namespace

double weighted_logloss(MatrixView X, std::span<const int> y, std::span<const double> weights,
                        std::span<const double> theta, double l2_penalty) {
    const std::size_t d = X.cols;
    const double wsum = std::accumulate(weights.begin(), weights.end(), 0.0);
    double loss = 0.0;
    for (std::size_t i = 0; i < X.rows; ++i) {
        double z = theta[d];
        const double* row = X.row_ptr(i);
        for (std::size_t j = 0; j < d; ++j) z += theta[j] * row[j];
        // numerically stable log(1 + exp(.)) split by sign
        const double softplus = z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
        loss += (weights[i] / wsum) * (softplus - (y[i] == 1 ? z : 0.0));
    }
    double reg = 0.0;
    for (std::size_t j = 0; j < d; ++j) reg += theta[j] * theta[j];
    return loss + 0.5 * l2_penalty * reg;
}

std::vector<double> weighted_logloss_gradient(MatrixView X, std::span<const int> y,
                                              std::span<const double> weights,
                                              std::span<const double> theta, double l2_penalty) {
    const std::size_t d = X.cols;
    const double wsum = std::accumulate(weights.begin(), weights.end(), 0.0);
    std::vector<double> grad(d + 1, 0.0);
    for (std::size_t i = 0; i < X.rows; ++i) {
        double z = theta[d];
        const double* row = X.row_ptr(i);
        for (std::size_t j = 0; j < d; ++j) z += theta[j] * row[j];
        const double resid = (weights[i] / wsum) * (sigmoid(z) - static_cast<double>(y[i]));
        for (std::size_t j = 0; j < d; ++j) grad[j] += resid * row[j];
        grad[d] += resid;
    }
    for (std::size_t j = 0; j < d; ++j) grad[j] += l2_penalty * theta[j];
    return grad;
}

namespace {

FittedModel::Tree grow_tree(MatrixView X, std::span<const int> y, std::span<const double> w,
                            const ForestParams& params, Rng& rng) {
    const std::size_t n = X.rows;
    const std::size_t d = X.cols;

    std::size_t features_per_split;
    if (params.features_per_split_fraction)
        features_per_split = static_cast<std::size_t>(
            std::lround(*params.features_per_split_fraction * static_cast<double>(d)));
    else
        features_per_split = static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(d))));
    features_per_split = std::clamp<std::size_t>(features_per_split, 1, d);

    std::vector<std::size_t> sample(n);
    for (std::size_t i = 0; i < n; ++i) sample[i] = static_cast<std::size_t>(rng.below(n));

    FittedModel::Tree tree;
    auto gini = [](double mass, double pos_mass) {
        if (mass <= 0.0) return 0.0;
        const double p1 = pos_mass / mass;
        return 1.0 - p1 * p1 - (1.0 - p1) * (1.0 - p1);
    };

    struct SortedCell {
        double value;
        double weight;
        double pos_weight;
    };
    std::vector<std::size_t> feature_pool(d);
    std::iota(feature_pool.begin(), feature_pool.end(), 0);

    // recursive CART on the bootstrap occurrences
    auto build = [&](auto&& self, std::vector<std::size_t> rows, int depth) -> int {
        double mass = 0.0, pos_mass = 0.0;
        for (std::size_t r : rows) {
            mass += w[r];
            pos_mass += w[r] * static_cast<double>(y[r]);
        }

        FittedModel::TreeNode node;
        node.value = mass > 0.0 ? pos_mass / mass : 0.5;

        const bool pure = pos_mass <= 0.0 || pos_mass >= mass;
        if (depth >= params.max_depth || pure || rows.size() < 2) {
            tree.nodes.push_back(node);
            return static_cast<int>(tree.nodes.size() - 1);
        }

        // partial Fisher-Yates draw of the feature subset
        for (std::size_t i = 0; i < features_per_split; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(rng.below(d - i));
            std::swap(feature_pool[i], feature_pool[j]);
        }

        const double parent_gini = gini(mass, pos_mass);
        double best_gain = 1e-12;
        int best_feature = -1;
        double best_threshold = 0.0;

        std::vector<SortedCell> cells;
        for (std::size_t fi = 0; fi < features_per_split; ++fi) {
            const std::size_t f = feature_pool[fi];
            cells.clear();
            cells.reserve(rows.size());
            for (std::size_t r : rows) cells.push_back({X.at(r, f), w[r], w[r] * static_cast<double>(y[r])});
            std::sort(cells.begin(), cells.end(),
                      [](const SortedCell& a, const SortedCell& b) { return a.value < b.value; });

            double left_mass = 0.0, left_pos = 0.0;
            for (std::size_t i = 0; i + 1 < cells.size(); ++i) {
                left_mass += cells[i].weight;
                left_pos += cells[i].pos_weight;
                if (cells[i].value == cells[i + 1].value) continue;
                const double right_mass = mass - left_mass;
                const double right_pos = pos_mass - left_pos;
                if (left_mass < params.min_leaf_weight || right_mass < params.min_leaf_weight) continue;
                const double gain = parent_gini - (left_mass * gini(left_mass, left_pos) +
                                                   right_mass * gini(right_mass, right_pos)) /
                                                      mass;
                if (gain > best_gain) {
                    best_gain = gain;
                    best_feature = static_cast<int>(f);
                    best_threshold = 0.5 * (cells[i].value + cells[i + 1].value);
                }
            }
        }

        if (best_feature < 0) {
            tree.nodes.push_back(node);
            return static_cast<int>(tree.nodes.size() - 1);
        }

        std::vector<std::size_t> left_rows, right_rows;
        for (std::size_t r : rows)
            (X.at(r, static_cast<std::size_t>(best_feature)) < best_threshold ? left_rows : right_rows)
                .push_back(r);
        rows.clear();
        rows.shrink_to_fit();

        node.feature = best_feature;
        node.threshold = best_threshold;
        tree.nodes.push_back(node);
        const int idx = static_cast<int>(tree.nodes.size() - 1);
        tree.nodes[static_cast<std::size_t>(idx)].left = self(self, std::move(left_rows), depth + 1);
        tree.nodes[static_cast<std::size_t>(idx)].right = self(self, std::move(right_rows), depth + 1);
        return idx;
    };

    build(build, std::move(sample), 0);
    return tree;
}

double tree_score(const FittedModel::Tree& tree, const double* row) {
    const FittedModel::TreeNode* node = &tree.nodes[0];
    while (node->feature >= 0)
        node = &tree.nodes[static_cast<std::size_t>(
            row[node->feature] < node->threshold ? node->left : node->right)];
    return node->value;
}

} // namespace

FittedModel fit(const ModelSpec& spec, MatrixView X, std::span<const int> y,
                std::span<const double> weights) {
    spec.validate();
    check_fit_inputs(X, y, weights);

    FittedModel m;
    m.spec_ = spec;
    m.n_cols_ = X.cols;

    if (spec.kind == ModelKind::WeightedLogistic) {
        const std::size_t d = X.cols;
        const double wsum = std::accumulate(weights.begin(), weights.end(), 0.0);
        std::vector<double> theta(d + 1, 0.0);
        std::vector<double> grad(d + 1);
        for (int it = 0; it < spec.logistic.iterations; ++it) {
            std::fill(grad.begin(), grad.end(), 0.0);
            for (std::size_t i = 0; i < X.rows; ++i) {
                double z = theta[d];
                const double* row = X.row_ptr(i);
                for (std::size_t j = 0; j < d; ++j) z += theta[j] * row[j];
                const double resid = (weights[i] / wsum) * (sigmoid(z) - static_cast<double>(y[i]));
                for (std::size_t j = 0; j < d; ++j) grad[j] += resid * row[j];
                grad[d] += resid;
            }
            for (std::size_t j = 0; j < d; ++j)
                theta[j] -= spec.logistic.learning_rate * (grad[j] + spec.logistic.l2_penalty * theta[j]);
            theta[d] -= spec.logistic.learning_rate * grad[d];
        }
        m.theta_ = std::move(theta);
    } else {
        m.trees_.reserve(static_cast<std::size_t>(spec.forest.n_trees));
        for (int t = 0; t < spec.forest.n_trees; ++t) {
            Rng rng(derive_seed(spec.seed, seed_purpose::kTree, static_cast<std::uint64_t>(t)));
            m.trees_.push_back(grow_tree(X, y, weights, spec.forest, rng));
        }
    }
    return m;
}

std::vector<double> FittedModel::predict_scores(MatrixView X) const {
    if (X.cols != n_cols_)
        raise(Errc::ShapeMismatch, "predict: expected " + std::to_string(n_cols_) + " columns, got " +
                                       std::to_string(X.cols));
    std::vector<double> scores(X.rows);
    if (spec_.kind == ModelKind::WeightedLogistic) {
        const std::size_t d = n_cols_;
        for (std::size_t i = 0; i < X.rows; ++i) {
            double z = theta_[d];
            const double* row = X.row_ptr(i);
            for (std::size_t j = 0; j < d; ++j) z += theta_[j] * row[j];
            scores[i] = sigmoid(z);
        }
    } else {
        for (std::size_t i = 0; i < X.rows; ++i) {
            double acc = 0.0;
            for (const auto& tree : trees_) acc += tree_score(tree, X.row_ptr(i));
            scores[i] = acc / static_cast<double>(trees_.size());
        }
    }
    return scores;
}

std::vector<int> FittedModel::predict_labels(MatrixView X) const {
    const auto scores = predict_scores(X);
    std::vector<int> labels(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) labels[i] = scores[i] >= 0.5 ? 1 : 0;
    return labels;
}

const std::vector<double>& FittedModel::coefficients() const {
    if (spec_.kind != ModelKind::WeightedLogistic)
        raise(Errc::InvalidConfig, "coefficients: only the logistic model exposes them");
    return theta_;
}

} // namespace fairweight
