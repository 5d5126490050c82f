#include "fairweight/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <json.hpp>

namespace fairweight {

namespace {

// mean ranks (1-based) with ties sharing the average of their positions
std::vector<double> mean_ranks(std::span<const double> values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && values[order[j]] == values[order[i]]) ++j;
        const double shared = 0.5 * static_cast<double>(i + 1 + j);  // mean of ranks i+1..j
        for (std::size_t k = i; k < j; ++k) ranks[order[k]] = shared;
        i = j;
    }
    return ranks;
}

// sum of t^3 - t over tie groups
double tie_term(std::span<const double> values) {
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    double total = 0.0;
    std::size_t i = 0;
    while (i < sorted.size()) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
        const auto t = static_cast<double>(j - i);
        total += t * t * t - t;
        i = j;
    }
    return total;
}

// regularized lower incomplete gamma by series expansion (x < a + 1)
double gamma_p_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    double ap = a;
    for (int k = 0; k < 1000; ++k) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// regularized upper incomplete gamma by Lentz continued fraction (x >= a + 1)
double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int k = 1; k <= 1000; ++k) {
        const double an = -static_cast<double>(k) * (static_cast<double>(k) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < 1e-16) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

} // namespace

double chi_square_upper_tail(double x, double df) {
    if (x <= 0.0) return 1.0;
    const double a = 0.5 * df;
    const double half_x = 0.5 * x;
    if (half_x < a + 1.0) return 1.0 - gamma_p_series(a, half_x);
    return gamma_q_cf(a, half_x);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

void HypervolumeTable::validate() const {
    if (methods.size() < 2) raise(Errc::InvalidConfig, "hypervolume table: need at least 2 methods");
    if (rows.size() < 5)
        raise(Errc::TooFewBlocks, "hypervolume table: need at least 5 replicates, have " +
                                      std::to_string(rows.size()));
    for (const auto& row : rows)
        if (row.size() != methods.size())
            raise(Errc::LengthMismatch, "hypervolume table: ragged row");
}

FriedmanResult friedman_test(const std::vector<std::vector<double>>& rows) {
    if (rows.size() < 5)
        raise(Errc::TooFewBlocks, "friedman: need at least 5 blocks, have " + std::to_string(rows.size()));
    const std::size_t k = rows.front().size();
    if (k < 2) raise(Errc::InvalidConfig, "friedman: need at least 2 treatments");
    for (const auto& row : rows)
        if (row.size() != k) raise(Errc::LengthMismatch, "friedman: ragged row");

    const auto n = static_cast<double>(rows.size());
    const auto kd = static_cast<double>(k);

    std::vector<double> rank_sums(k, 0.0);
    double ties = 0.0;
    for (const auto& row : rows) {
        const auto ranks = mean_ranks(row);
        for (std::size_t j = 0; j < k; ++j) rank_sums[j] += ranks[j];
        ties += tie_term(row);
    }

    double ssbn = 0.0;
    for (double rs : rank_sums) ssbn += rs * rs;
    const double uncorrected = 12.0 / (kd * n * (kd + 1.0)) * ssbn - 3.0 * n * (kd + 1.0);
    const double correction = 1.0 - ties / (n * kd * (kd * kd - 1.0));

    FriedmanResult result;
    if (correction <= 0.0) {
        // all treatments tied in every block: no evidence of any difference
        result.statistic = 0.0;
        result.p = 1.0;
        return result;
    }
    result.statistic = uncorrected / correction;
    result.p = chi_square_upper_tail(result.statistic, kd - 1.0);
    return result;
}

WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) raise(Errc::LengthMismatch, "wilcoxon: paired vectors differ in length");
    if (a.size() < 5) raise(Errc::TooFewBlocks, "wilcoxon: need at least 5 pairs");

    std::vector<double> diffs(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) diffs[i] = a[i] - b[i];

    WilcoxonResult result;
    {
        std::vector<double> sorted(diffs);
        std::sort(sorted.begin(), sorted.end());
        const std::size_t n = sorted.size();
        const double median = n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
        result.direction = median > 0.0 ? 1 : (median < 0.0 ? -1 : 0);
    }

    std::vector<double> nonzero;
    for (double d : diffs)
        if (d != 0.0) nonzero.push_back(d);
    if (nonzero.empty()) {
        result.all_zero = true;
        result.p = 1.0;
        return result;
    }
    if (nonzero.size() < 5) {
        result.low_power = true;
        result.p = 1.0;
        return result;
    }

    std::vector<double> abs_diffs(nonzero.size());
    for (std::size_t i = 0; i < nonzero.size(); ++i) abs_diffs[i] = std::fabs(nonzero[i]);
    const auto ranks = mean_ranks(abs_diffs);

    double w_plus = 0.0, w_minus = 0.0;
    for (std::size_t i = 0; i < nonzero.size(); ++i)
        (nonzero[i] > 0.0 ? w_plus : w_minus) += ranks[i];
    result.w_plus = w_plus;
    result.w_minus = w_minus;

    const auto n = static_cast<double>(nonzero.size());
    const double mean = n * (n + 1.0) / 4.0;
    const double variance = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term(abs_diffs) / 48.0;
    if (variance <= 0.0) {
        result.p = 1.0;
        return result;
    }
    const double centered = w_plus - mean;
    const double continuity = centered > 0.0 ? 0.5 : (centered < 0.0 ? -0.5 : 0.0);
    const double z = (centered - continuity) / std::sqrt(variance);
    result.p = std::min(1.0, std::erfc(std::fabs(z) / std::sqrt(2.0)));
    return result;
}

StatReport compare_methods(const HypervolumeTable& tbl, double alpha) {
    tbl.validate();

    StatReport report;
    report.alpha = alpha;
    const auto friedman = friedman_test(tbl.rows);
    report.friedman_statistic = friedman.statistic;
    report.friedman_p = friedman.p;
    if (friedman.p >= alpha) return report;

    const std::size_t k = tbl.methods.size();
    const double n_comparisons = static_cast<double>(k * (k - 1) / 2);

    // Table labels: deterministic weights print as DT
    auto label = [](const std::string& m) { return m == "DW" ? std::string("DT") : m; };

    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i + 1; j < k; ++j) {
            std::vector<double> a(tbl.rows.size()), b(tbl.rows.size());
            for (std::size_t r = 0; r < tbl.rows.size(); ++r) {
                a[r] = tbl.rows[r][i];
                b[r] = tbl.rows[r][j];
            }
            const auto w = wilcoxon_signed_rank(a, b);
            PairwiseComparison cmp;
            cmp.first = tbl.methods[i];
            cmp.second = tbl.methods[j];
            cmp.wilcoxon_p = w.p;
            cmp.adjusted_p = std::min(1.0, w.p * n_comparisons);
            cmp.direction = w.direction;
            report.pairwise.push_back(cmp);

            if (cmp.adjusted_p < alpha && cmp.direction != 0) {
                const auto& winner = cmp.direction > 0 ? cmp.first : cmp.second;
                const auto& loser = cmp.direction > 0 ? cmp.second : cmp.first;
                report.conclusions.push_back(label(winner) + ">" + label(loser));
            }
        }
    }
    std::sort(report.conclusions.begin(), report.conclusions.end());
    return report;
}

std::string StatReport::to_json_text() const {
    nlohmann::json j;
    j["friedman_statistic"] = friedman_statistic;
    j["friedman_p"] = friedman_p;
    j["alpha"] = alpha;
    j["pairwise"] = nlohmann::json::object();
    for (const auto& cmp : pairwise) {
        nlohmann::json entry;
        entry["wilcoxon_p"] = cmp.wilcoxon_p;
        entry["adjusted_p"] = cmp.adjusted_p;
        entry["direction"] = cmp.direction;
        j["pairwise"][cmp.first + "_vs_" + cmp.second] = entry;
    }
    j["conclusions"] = conclusions;
    return j.dump(2);
}

std::string report_table_text(const std::string& dataset, const std::string& pair_label,
                              const StatReport& report) {
    std::string cell;
    if (report.friedman_p >= report.alpha) {
        cell = "-";
    } else if (report.conclusions.empty()) {
        cell = "n.s.";
    } else {
        for (std::size_t i = 0; i < report.conclusions.size(); ++i)
            cell += (i ? ", " : "") + report.conclusions[i];
    }

    std::ostringstream out;
    const std::size_t width = std::max<std::size_t>(dataset.size(), 12);
    out << std::string(width, ' ') << "  " << pair_label << '\n';
    out << dataset << std::string(width - dataset.size(), ' ') << "  " << cell << '\n';
    return out.str();
}

} // namespace fairweight
