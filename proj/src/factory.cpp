#include "railsched/factory.hpp"

#include <algorithm>
#include <cstdlib>

#include "railsched/rng.hpp"

namespace railsched {

namespace {

const StationId kNorth = "PS";   // northern terminus
const StationId kMid = "MR";     // junction where the single track begins
const StationId kSouth = "CS";   // southern terminus

NetworkParams corridor_params() {
    NetworkParams p;
    p.headway_min = 2;
    p.preparation_min = 3;
    p.station_stay_min = 1;
    p.pass_min[{kNorth, kMid}] = 2;
    p.pass_min[{kMid, kNorth}] = 2;
    p.pass_min[{kMid, kSouth}] = 14;
    p.pass_min[{kSouth, kMid}] = 14;
    return p;
}

// Base time of schedule slot k (0-based); slots repeat every 6 minutes.
Minutes slot_base(int k) { return 14 + 6 * k; }

bool full_route(int train_id) {
    return train_id == 1 || train_id == 2 || train_id == 7 || train_id == 8;
}

Train make_southbound(int id, int slot) {
    Train t;
    t.id = id;
    Minutes a = slot_base(slot);
    if (full_route(id)) {
        t.route = {kNorth, kMid, kSouth};
        t.nominal_arrivals = {{kNorth, a}, {kMid, a + 3}, {kSouth, a + 18}};
    } else {
        t.route = {kMid, kSouth};
        t.nominal_arrivals = {{kMid, a + 3}, {kSouth, a + 18}};
    }
    return t;
}

Train make_northbound(int id, int slot) {
    Train t;
    t.id = id;
    Minutes a = slot_base(slot);
    if (full_route(id)) {
        t.route = {kSouth, kMid, kNorth};
        t.nominal_arrivals = {{kSouth, a + 26}, {kMid, a + 41}, {kNorth, a + 44}};
    } else {
        t.route = {kSouth, kMid};
        t.nominal_arrivals = {{kSouth, a + 26}, {kMid, a + 41}};
    }
    return t;
}

bool southbound(const Train& t) {
    return t.route.front() == kNorth || (t.route.front() == kMid && t.route.back() == kSouth);
}

// Same-direction trains ordered by nominal arrival; consecutive ones form the
// headway dependencies at that station.
void derive_headway_pairs(Instance& inst) {
    std::set<StationId> stations;
    for (const Train& t : inst.trains)
        stations.insert(t.route.begin(), t.route.end());
    for (const StationId& s : stations) {
        for (bool dir : {true, false}) {
            std::vector<std::pair<Minutes, TrainId>> order;
            for (const Train& t : inst.trains)
                if (southbound(t) == dir && t.nominal_arrivals.count(s))
                    order.push_back({t.nominal_arrivals.at(s), t.id});
            std::sort(order.begin(), order.end());
            for (std::size_t i = 0; i + 1 < order.size(); ++i)
                inst.headway_pairs[s].push_back({order[i].second, order[i + 1].second});
        }
    }
}

// Distinct train pairs whose earliest feasible times already clash.
int count_conflict_pairs(const Instance& inst) {
    TimeWindows w = compute_time_windows(inst);
    std::set<std::pair<TrainId, TrainId>> pairs;
    for (const auto& [s, list] : inst.rollingstock_pairs)
        for (const auto& [j, j2] : list)
            if (w.lo(s, j2) < w.lo(s, j) + inst.params.preparation_min +
                                  inst.params.station_stay_min)
                pairs.insert({std::min(j, j2), std::max(j, j2)});
    for (const auto& [s, list] : inst.headway_pairs)
        for (const auto& [j, j2] : list)
            if (std::abs(w.lo(s, j) - w.lo(s, j2)) < inst.params.headway_min)
                pairs.insert({std::min(j, j2), std::max(j, j2)});
    return static_cast<int>(pairs.size());
}

} // namespace

Instance make_worked_example() {
    Instance inst;
    inst.params = corridor_params();
    inst.d_max = 2;
    inst.disturbed = true;
    inst.objective_stations = {kMid, kSouth};

    Train south;
    south.id = 1;
    south.route = {kNorth, kMid, kSouth};
    south.nominal_arrivals = {{kNorth, 14}, {kMid, 17}, {kSouth, 32}};
    south.initial_delay = 5;

    Train north;
    north.id = 2;
    north.route = {kSouth, kMid, kNorth};
    north.nominal_arrivals = {{kSouth, 40}, {kMid, 55}, {kNorth, 58}};

    inst.trains = {south, north};
    inst.rollingstock_pairs[kSouth] = {{1, 2}};
    derive_headway_pairs(inst);
    return inst;
}

Instance make_family_instance(const FamilySpec& spec) {
    static const int kSupported[] = {1, 2, 4, 6, 8, 10, 11, 12};
    if (std::find(std::begin(kSupported), std::end(kSupported), spec.train_count) ==
        std::end(kSupported))
        throw ParameterError(
            "unsupported train_count " + std::to_string(spec.train_count) +
            " (supported: 1, 2, 4, 6, 8, 10, 11, 12)");
    if (spec.d_max < 0)
        throw ParameterError("d_max must be non-negative");
    if (spec.train_count == 1 && spec.disturbed)
        throw ParameterError("a single-train instance has no pair to conflict with");

    Instance inst;
    inst.params = corridor_params();
    inst.d_max = spec.d_max;
    inst.disturbed = spec.disturbed;
    inst.objective_stations = {kMid, kSouth};

    if (spec.train_count == 1) {
        // A lone service covers only the short MR->CS leg; the full route needs
        // a northbound partner to hand the vehicle to.
        Train t;
        t.id = 1;
        Minutes a = slot_base(0);
        t.route = {kMid, kSouth};
        t.nominal_arrivals = {{kMid, a + 3}, {kSouth, a + 18}};
        inst.trains = {t};
    } else {
        for (int id = 1; id <= spec.train_count; ++id) {
            int slot = (id - 1) / 2;
            inst.trains.push_back(id % 2 == 1 ? make_southbound(id, slot)
                                              : make_northbound(id, slot));
        }
        for (int id = 1; id + 1 <= spec.train_count; id += 2)
            inst.rollingstock_pairs[kSouth].push_back({id, id + 1});
    }
    derive_headway_pairs(inst);

    if (spec.disturbed) {
        // Delay the first service; for large instances add further delayed
        // trains (seed-chosen order) until enough pairs are in conflict.
        inst.trains[0].initial_delay = 5;
        int target = spec.train_count >= 11 ? 3 : 1;
        std::vector<int> candidates;
        for (int id = 3; id + 1 <= spec.train_count; id += 2)
            candidates.push_back(id);
        auto rng = make_rng(spec.seed, 0x66616d);
        while (count_conflict_pairs(inst) < target && !candidates.empty()) {
            std::size_t pick = next_index(rng, candidates.size());
            int id = candidates[pick];
            candidates.erase(candidates.begin() + pick);
            inst.trains[id - 1].initial_delay = 5;
        }
    }
    return inst;
}

} // namespace railsched
