#include "fairweight/reweight.hpp"

#include <json.hpp>

namespace fairweight {

SlotWeights deterministic_weights(const Dataset& ds, const GroupIndex& gi) {
    std::vector<std::size_t> group_count(gi.n_groups, 0);
    std::array<std::size_t, 2> class_count{0, 0};
    std::vector<std::size_t> joint_count(gi.n_slots, 0);

    for (std::size_t r = 0; r < ds.n_rows; ++r) {
        const auto g = static_cast<std::size_t>(gi.group_of_row[r]);
        const int c = ds.target[r];
        group_count[g]++;
        class_count[static_cast<std::size_t>(c)]++;
        joint_count[gi.slot_of(g, c)]++;
    }

    SlotWeights sw;
    sw.values.resize(gi.n_slots, 1.0);
    const auto n = static_cast<double>(ds.n_rows);
    for (std::size_t g = 0; g < gi.n_groups; ++g) {
        for (int c = 0; c < 2; ++c) {
            const std::size_t slot = gi.slot_of(g, c);
            if (joint_count[slot] == 0) continue;  // inert slot, keep 1.0
            sw.values[slot] = static_cast<double>(group_count[g]) *
                              static_cast<double>(class_count[static_cast<std::size_t>(c)]) /
                              (static_cast<double>(joint_count[slot]) * n);
        }
    }
    return sw;
}

SlotWeights equal_weights(const GroupIndex& gi) {
    return SlotWeights{std::vector<double>(gi.n_slots, 1.0)};
}

std::vector<double> expand_and_assign(const SlotWeights& sw, const Dataset& ds, const GroupIndex& gi) {
    if (sw.values.size() != gi.n_slots)
        raise(Errc::SlotMismatch, "expand_and_assign: " + std::to_string(sw.values.size()) +
                                      " slot weights for " + std::to_string(gi.n_slots) + " slots");
    std::vector<double> w(ds.n_rows);
    for (std::size_t r = 0; r < ds.n_rows; ++r)
        w[r] = sw.values[gi.slot_of(static_cast<std::size_t>(gi.group_of_row[r]), ds.target[r])];
    return w;
}

std::string slot_weights_to_json(const SlotWeights& sw, const GroupIndex& gi) {
    nlohmann::json slots = nlohmann::json::array();
    for (std::size_t g = 0; g < gi.n_groups; ++g) {
        for (int c = 0; c < 2; ++c) {
            nlohmann::json slot;
            slot["group"] = gi.group_codes(g);
            slot["class"] = c;
            slot["weight"] = sw.values[gi.slot_of(g, c)];
            slots.push_back(slot);
        }
    }
    return nlohmann::json{{"slots", slots}}.dump(2);
}

} // namespace fairweight
