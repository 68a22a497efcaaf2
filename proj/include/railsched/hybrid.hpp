#pragma once

#include "railsched/analysis.hpp"
#include "railsched/ilp.hpp"

namespace railsched {

// Split of an instance into the part that is sampled (constraints fully
// inside the station zone) and the part solved exactly (everything else).
// Boundary keys are the (station, train) arrivals shared by both parts.
struct Decomposition {
    Instance stochastic;
    Instance deterministic;
    std::set<StationTrain> boundary;
};

// Requires every route to cross the zone in one contiguous segment that
// touches a route end; a zone in the middle of a route would leave the
// deterministic remainder disconnected.
Decomposition decompose(const Instance& instance, const std::set<StationId>& zone);

enum class SamplerBackend { Enumerate, Anneal, Qaoa };

struct HybridConfig {
    std::set<StationId> zone;
    SamplerBackend backend = SamplerBackend::Enumerate;
    int iterations = 4;              // outer-loop budget
    int k_representatives = 4;       // sub-solutions carried into the exact stage
    std::uint64_t seed = 0;
    PenaltyConfig penalties = PenaltyConfig::overlapping();
    AnnealConfig anneal;             // consulted for the anneal backend
    QaoaConfig qaoa;                 // consulted for the qaoa backend
    long enumerate_top = 4096;       // consulted for the enumerate backend

    // Optional distribution check of sampled passing times on one edge.
    std::optional<DisturbanceModel> expected_stats;
    Edge stats_edge;
    double tv_threshold = -1.0;      // negative: check disabled
};

struct PortfolioEntry {
    std::map<StationTrain, Minutes> stochastic_times;
    std::map<StationTrain, Minutes> joint_times;      // full timetable
    double stochastic_objective = 0.0;
    double joint_objective = 0.0;
    int iteration = 0;
};

struct HybridResult {
    std::vector<PortfolioEntry> portfolio;   // sorted by joint objective
    int iterations_run = 0;
    bool converged = false;                  // stopped because nothing improved
    std::string diagnostic;

    const PortfolioEntry* best() const {
        return portfolio.empty() ? nullptr : &portfolio.front();
    }
};

// Sample the stochastic component, keep the k best feasible sub-solutions
// with distinct boundary times, complete each with an exact solve of the
// deterministic component (boundary arrivals fixed), and iterate with fresh
// sampler streams until the best joint objective stops improving.
HybridResult run_hybrid(const Instance& instance, const HybridConfig& config);

} // namespace railsched
