#pragma once

#include <span>
#include <string>
#include <vector>

#include "fairweight/error.hpp"

namespace fairweight {

// Per-replicate hypervolumes, one column per weighting method.
struct HypervolumeTable {
    std::vector<std::string> methods;          // column labels, e.g. {"EQ", "DW", "EW"}
    std::vector<std::vector<double>> rows;     // one row per replicate

    void validate() const;
};

struct FriedmanResult {
    double statistic = 0.0;
    double p = 1.0;
};

// Friedman chi-square over within-row ranks (mean ranks for ties), with the
// standard tie correction; p from the chi-square upper tail, df = k - 1.
FriedmanResult friedman_test(const std::vector<std::vector<double>>& rows);

struct WilcoxonResult {
    double p = 1.0;
    int direction = 0;       // sign of median(a - b)
    double w_plus = 0.0;
    double w_minus = 0.0;
    bool all_zero = false;   // every difference was zero
    bool low_power = false;  // fewer than 5 nonzero differences
};

// Paired two-sided signed-rank test, normal approximation with tie-corrected
// variance and continuity correction. Zero differences are dropped.
WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b);

struct PairwiseComparison {
    std::string first;
    std::string second;
    double wilcoxon_p = 1.0;
    double adjusted_p = 1.0;  // Bonferroni: min(1, raw * n_comparisons)
    int direction = 0;        // +1 when first tends larger
};

struct StatReport {
    double friedman_statistic = 0.0;
    double friedman_p = 1.0;
    double alpha = 0.05;
    std::vector<PairwiseComparison> pairwise;   // populated only when the gate opens
    std::vector<std::string> conclusions;       // e.g. "EW>DT", "EW>EQ"

    std::string to_json_text() const;
};

// Friedman gate, then all pairwise Wilcoxon tests with Bonferroni factor
// equal to the number of pairs. A conclusion "X>Y" is recorded when the
// adjusted p clears alpha and the direction favors X.
StatReport compare_methods(const HypervolumeTable& tbl, double alpha = 0.05);

// One-row significance table in the style of a dataset x metric-pair grid.
std::string report_table_text(const std::string& dataset, const std::string& pair_label,
                              const StatReport& report);

// Numeric helpers (exposed for the test oracles).
double chi_square_upper_tail(double x, double df);  // regularized Q(df/2, x/2)
double normal_cdf(double z);

} // namespace fairweight
