#pragma once

#include <map>
#include <set>
#include <vector>

#include "railsched/network.hpp"

namespace railsched {

enum class ConstraintFamily { Passing, Headway, RollingStock };

struct IlpTimeVar {
    StationId station;
    TrainId train;
    Minutes lo = 0;          // inclusive arrival-time domain
    Minutes hi = 0;
    Minutes nominal = 0;     // undisturbed timetable arrival
    bool in_objective = false;
};

// Passing / RollingStock: t[b] >= t[a] + gap.
// Headway: |t[a] - t[b]| >= gap; the precedence decision is implied by the
// chosen times rather than stored as an independent variable.
struct IlpConstraint {
    ConstraintFamily family = ConstraintFamily::Passing;
    int a = 0;
    int b = 0;
    Minutes gap = 0;
};

struct IlpModel {
    std::vector<IlpTimeVar> vars;        // train-major, route order within train
    std::map<StationTrain, int> index;
    std::vector<IlpConstraint> constraints;
    double objective_scale = 1.0;        // delays are divided by d_max

    double objective_of(const std::vector<Minutes>& times) const;
};

enum class SolveStatus { Optimal, Infeasible };

struct IlpSolution {
    SolveStatus status = SolveStatus::Infeasible;
    std::map<StationTrain, Minutes> times;   // empty when infeasible
    double objective = 0.0;
    long nodes = 0;                          // search tree size, for reporting
};

// Compile arrival-time variables and separation constraints.  w_realization
// adds extra travel time to the passing constraints of the given directed
// edges (negative values are rejected).
IlpModel build_ilp(const Instance& instance, const TimeWindows& windows,
                   const std::map<Edge, Minutes>& w_realization = {});

// Depth-first branch and bound over the (small, integral) time domains.
// Branches in variable order trying smaller times first and accepts strict
// improvements only, so among equal-objective optima the lexicographically
// smallest time vector wins.  Deterministic.
IlpSolution solve_exact(const IlpModel& model);

// Solve one ILP per realization of the disturbance on the given edges
// (cartesian product of the support, lexicographic in sorted edge order).
std::vector<std::pair<std::map<Edge, Minutes>, IlpSolution>>
sweep_stochastic(const Instance& instance, const TimeWindows& windows,
                 const DisturbanceModel& model, const std::set<Edge>& edges);

} // namespace railsched
