#pragma once

#include <cstddef>
#include <span>
#include <string>

#include "fairweight/error.hpp"

namespace fairweight {

enum class Predictive { Acc, Roc };
enum class Fairness { Dpd, Sfn };

// One of the four legal predictive/fairness objective combinations.
struct MetricPair {
    Predictive predictive = Predictive::Acc;
    Fairness fairness = Fairness::Dpd;
};

std::string to_string(Predictive p);
std::string to_string(Fairness f);
std::string to_string(const MetricPair& pair);

// predictive_score: higher is better; fairness_score: lower is better. Both in [0,1].
struct EvaluatedPoint {
    double predictive_score = 0.0;
    double fairness_score = 0.0;
};

// Scores with an exact 0.5 tie go to class 1.
constexpr double kLabelThreshold = 0.5;

// SFN's per-group mass alpha(G) is the joint probability Pr(row in G and y=1).
// Flip to true for the conditional reading Pr(y=1 | G).
constexpr bool kSfnAlphaConditional = false;

double accuracy(std::span<const int> y, std::span<const int> y_hat);

// Rank-statistic AUROC: concordant pairs plus half the ties, over P*N pairs.
// Agrees exactly with the brute-force pairwise count.
double auroc(std::span<const int> y, std::span<const double> scores);

// Max minus min acceptance rate over nonempty groups; 0 when fewer than two
// groups are nonempty. Depends only on predictions, never on true labels.
double dpd(std::span<const int> y_hat, std::span<const int> groups, std::size_t n_groups);

// Subgroup false negative fairness: max over groups of alpha(G) * beta(G),
// beta(G) = |overall FNR - group FNR|. Groups with no positives contribute 0.
double sfn(std::span<const int> y, std::span<const int> y_hat, std::span<const int> groups,
           std::size_t n_groups);

// Dispatch over the four metric combinations. ACC, DPD and SFN consume
// thresholded labels; ROC consumes raw scores.
EvaluatedPoint score_pair(const MetricPair& pair, std::span<const int> y, std::span<const int> y_hat,
                          std::span<const double> scores, std::span<const int> groups,
                          std::size_t n_groups);

std::vector<int> threshold_labels(std::span<const double> scores);

} // namespace fairweight
