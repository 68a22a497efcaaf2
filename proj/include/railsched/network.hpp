#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "railsched/errors.hpp"

namespace railsched {

using Minutes = int;
using StationId = std::string;
using TrainId = int;
using Edge = std::pair<StationId, StationId>;            // directed (from, to)
using StationTrain = std::pair<StationId, TrainId>;

// Infrastructure-level timing parameters, all in whole minutes.
struct NetworkParams {
    Minutes headway_min = 2;       // minimal spacing of same-direction arrivals
    Minutes preparation_min = 3;   // turnaround time before a unit leaves again
    Minutes station_stay_min = 1;  // dwell: departure = arrival + stay
    std::map<Edge, Minutes> pass_min;  // minimal travel time per directed edge

    Minutes pass(const StationId& from, const StationId& to) const;
};

struct Train {
    TrainId id = 0;
    std::vector<StationId> route;                 // stations in visiting order
    std::map<StationId, Minutes> nominal_arrivals;
    Minutes initial_delay = 0;                    // known delay at route start
};

// Discrete distribution of an extra travel-time disturbance w on an edge.
struct DisturbanceModel {
    std::vector<Minutes> support;   // candidate w values, ascending
    std::vector<double> weights;    // same length; need not be normalised
};

struct Instance {
    NetworkParams params;
    std::vector<Train> trains;                    // sorted by id
    Minutes d_max = 0;                            // allowed extra delay per train
    std::set<StationId> objective_stations;       // stations whose delays count
    std::map<StationId, std::vector<std::pair<TrainId, TrainId>>> headway_pairs;
    std::map<StationId, std::vector<std::pair<TrainId, TrainId>>> rollingstock_pairs;
    bool disturbed = false;

    const Train* find_train(TrainId id) const;
};

// Feasible arrival range per (station, train): lower = earliest given the
// propagated delay, upper = lower + d_max.
struct TimeWindows {
    std::map<StationTrain, Minutes> lower;
    std::map<StationTrain, Minutes> upper;

    Minutes lo(const StationId& s, TrainId j) const { return lower.at({s, j}); }
    Minutes hi(const StationId& s, TrainId j) const { return upper.at({s, j}); }
};

// Machine-readable validation finding; `code` is stable, `detail` is prose.
struct Violation {
    std::string code;
    std::string detail;
};

// Earliest times propagate forward along each route:
//   l(first) = nominal + initial_delay,
//   l(next)  = max(nominal(next), l(prev) + station_stay + pass_min(prev, next)).
// Throws ConfigError if a route edge has no pass_min entry.
TimeWindows compute_time_windows(const Instance& instance);

// Structural checks; returns an empty list for a sound instance.
std::vector<Violation> validate_instance(const Instance& instance);

// Canonical JSON document (stable key order, 2-space indent, trailing newline).
std::string instance_to_json(const Instance& instance);
Instance instance_from_json(const std::string& text);

} // namespace railsched
