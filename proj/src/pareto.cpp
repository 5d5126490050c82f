#include "fairweight/pareto.hpp"

#include <algorithm>
#include <limits>

namespace fairweight {

ParetoFront pareto_front(std::span<const MinPoint> pts) {
    if (pts.empty()) raise(Errc::EmptyInput, "pareto_front: no points");

    std::vector<MinPoint> sorted(pts.begin(), pts.end());
    std::sort(sorted.begin(), sorted.end(), [](const MinPoint& a, const MinPoint& b) {
        return a.e != b.e ? a.e < b.e : a.f < b.f;
    });

    // sweep in e order: a point survives only if it improves on the best f so
    // far; this drops dominated points, ties in e, and duplicates in one pass
    ParetoFront front;
    double best_f = std::numeric_limits<double>::infinity();
    for (const auto& p : sorted) {
        if (p.f < best_f) {
            front.points.push_back(p);
            best_f = p.f;
        }
    }
    return front;
}

double hypervolume_2d(const ParetoFront& front, MinPoint ref) {
    std::vector<MinPoint> inside;
    for (const auto& p : front.points)
        if (p.e < ref.e && p.f < ref.f) inside.push_back(p);
    if (inside.empty()) return 0.0;

    double area = 0.0;
    for (std::size_t i = 0; i < inside.size(); ++i) {
        const double next_e = i + 1 < inside.size() ? inside[i + 1].e : ref.e;
        area += (next_e - inside[i].e) * (ref.f - inside[i].f);
    }
    return area;
}

double hypervolume_2d(std::span<const MinPoint> pts, MinPoint ref) {
    return hypervolume_2d(pareto_front(pts), ref);
}

} // namespace fairweight
