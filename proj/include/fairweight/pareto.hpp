#pragma once

#include <span>
#include <vector>

#include "fairweight/metrics.hpp"

namespace fairweight {

// Both coordinates minimized: e = 1 - predictive score, f = fairness score.
struct MinPoint {
    double e = 0.0;
    double f = 0.0;
};

inline MinPoint to_min_point(const EvaluatedPoint& pt) {
    return {1.0 - pt.predictive_score, pt.fairness_score};
}

// Nondominated subset, deduplicated, sorted by e ascending (f strictly
// descending follows).
struct ParetoFront {
    std::vector<MinPoint> points;
};

ParetoFront pareto_front(std::span<const MinPoint> pts);

// Area dominated by the front relative to ref, by a sorted sweep of
// rectangles. Points not strictly inside the reference box are excluded and
// contribute nothing.
double hypervolume_2d(const ParetoFront& front, MinPoint ref = {1.0, 1.0});
double hypervolume_2d(std::span<const MinPoint> pts, MinPoint ref = {1.0, 1.0});

} // namespace fairweight
