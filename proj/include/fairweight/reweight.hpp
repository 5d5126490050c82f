#pragma once

#include <string>
#include <vector>

#include "fairweight/dataset.hpp"

namespace fairweight {

// One weight per (group, class) slot, in the slot order of a GroupIndex.
// Evolved weights live in [0, 2]; deterministic weights may exceed 2 on
// skewed data and are deliberately not clamped.
struct SlotWeights {
    std::vector<double> values;
};

// Kamiran-Calders style weights from training counts:
//   slot(g, c) = P(group = g) * P(class = c) / P(group = g and class = c).
// Slots with zero joint count get 1.0; no row can select them.
SlotWeights deterministic_weights(const Dataset& ds, const GroupIndex& gi);

SlotWeights equal_weights(const GroupIndex& gi);

// Per-row weights: row r gets the weight of slot (group_of_row[r], target[r]).
std::vector<double> expand_and_assign(const SlotWeights& sw, const Dataset& ds, const GroupIndex& gi);

// {"slots": [{"group": [codes...], "class": 0|1, "weight": w}, ...]}
std::string slot_weights_to_json(const SlotWeights& sw, const GroupIndex& gi);

} // namespace fairweight
