#include "fairweight/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace fairweight {

std::string to_string(Predictive p) { return p == Predictive::Acc ? "acc" : "roc"; }
std::string to_string(Fairness f) { return f == Fairness::Dpd ? "dpd" : "sfn"; }
std::string to_string(const MetricPair& pair) {
    return to_string(pair.predictive) + "_" + to_string(pair.fairness);
}

double accuracy(std::span<const int> y, std::span<const int> y_hat) {
    if (y.size() != y_hat.size())
        raise(Errc::LengthMismatch, "accuracy: label vectors differ in length");
    if (y.empty()) raise(Errc::EmptyInput, "accuracy: empty input");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < y.size(); ++i)
        if (y[i] == y_hat[i]) ++hits;
    return static_cast<double>(hits) / static_cast<double>(y.size());
}

double auroc(std::span<const int> y, std::span<const double> scores) {
    if (y.size() != scores.size())
        raise(Errc::LengthMismatch, "auroc: labels and scores differ in length");
    if (y.empty()) raise(Errc::EmptyInput, "auroc: empty input");

    std::vector<std::size_t> order(y.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // walk tie groups in ascending score order; count concordant pairs twice
    // and tied pairs once so the result is an exact integer ratio
    std::uint64_t pos_total = 0, neg_total = 0;
    for (int v : y) (v == 1 ? pos_total : neg_total)++;
    if (pos_total == 0 || neg_total == 0)
        raise(Errc::SingleClass, "auroc: both classes must be present");

    std::uint64_t twice_numerator = 0;
    std::uint64_t neg_below = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        std::uint64_t pos_here = 0, neg_here = 0;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) {
            (y[order[j]] == 1 ? pos_here : neg_here)++;
            ++j;
        }
        twice_numerator += 2 * pos_here * neg_below + pos_here * neg_here;
        neg_below += neg_here;
        i = j;
    }
    return static_cast<double>(twice_numerator) / static_cast<double>(2 * pos_total * neg_total);
}

double dpd(std::span<const int> y_hat, std::span<const int> groups, std::size_t n_groups) {
    if (y_hat.size() != groups.size())
        raise(Errc::LengthMismatch, "dpd: predictions and groups differ in length");
    if (y_hat.empty()) raise(Errc::EmptyInput, "dpd: empty input");

    std::vector<std::size_t> size(n_groups, 0), accepted(n_groups, 0);
    for (std::size_t i = 0; i < y_hat.size(); ++i) {
        const auto g = static_cast<std::size_t>(groups[i]);
        size[g]++;
        if (y_hat[i] == 1) accepted[g]++;
    }
    double lo = 2.0, hi = -1.0;
    std::size_t nonempty = 0;
    for (std::size_t g = 0; g < n_groups; ++g) {
        if (size[g] == 0) continue;
        ++nonempty;
        const double rate = static_cast<double>(accepted[g]) / static_cast<double>(size[g]);
        lo = std::min(lo, rate);
        hi = std::max(hi, rate);
    }
    return nonempty < 2 ? 0.0 : hi - lo;
}

double sfn(std::span<const int> y, std::span<const int> y_hat, std::span<const int> groups,
           std::size_t n_groups) {
    if (y.size() != y_hat.size() || y.size() != groups.size())
        raise(Errc::LengthMismatch, "sfn: input vectors differ in length");
    if (y.empty()) raise(Errc::EmptyInput, "sfn: empty input");

    std::vector<std::size_t> size(n_groups, 0), pos(n_groups, 0), fn(n_groups, 0);
    std::size_t pos_total = 0, fn_total = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const auto g = static_cast<std::size_t>(groups[i]);
        ++size[g];
        if (y[i] != 1) continue;
        ++pos_total;
        ++pos[g];
        if (y_hat[i] == 0) {
            ++fn_total;
            ++fn[g];
        }
    }
    if (pos_total == 0) raise(Errc::NoPositives, "sfn: no positive labels");

    const double fnr_overall = static_cast<double>(fn_total) / static_cast<double>(pos_total);
    const auto n = static_cast<double>(y.size());
    double worst = 0.0;
    for (std::size_t g = 0; g < n_groups; ++g) {
        if (pos[g] == 0) continue;  // group FNR undefined, contributes 0
        const double fnr_g = static_cast<double>(fn[g]) / static_cast<double>(pos[g]);
        const double alpha = kSfnAlphaConditional
                                 ? static_cast<double>(pos[g]) / static_cast<double>(size[g])
                                 : static_cast<double>(pos[g]) / n;
        worst = std::max(worst, alpha * std::fabs(fnr_overall - fnr_g));
    }
    return worst;
}

std::vector<int> threshold_labels(std::span<const double> scores) {
    std::vector<int> labels(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i)
        labels[i] = scores[i] >= kLabelThreshold ? 1 : 0;
    return labels;
}

EvaluatedPoint score_pair(const MetricPair& pair, std::span<const int> y, std::span<const int> y_hat,
                          std::span<const double> scores, std::span<const int> groups,
                          std::size_t n_groups) {
    EvaluatedPoint pt;
    pt.predictive_score = pair.predictive == Predictive::Acc ? accuracy(y, y_hat) : auroc(y, scores);
    pt.fairness_score = pair.fairness == Fairness::Dpd ? dpd(y_hat, groups, n_groups)
                                                       : sfn(y, y_hat, groups, n_groups);
    return pt;
}

} // namespace fairweight
