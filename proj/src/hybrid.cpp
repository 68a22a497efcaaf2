#include "railsched/hybrid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace railsched {

namespace {

// Restrict a train to the given contiguous route slice, re-anchoring the
// initial delay so the slice reproduces the full instance's time windows.
Train slice_train(const Train& train, std::size_t begin, std::size_t end,
                  const TimeWindows& full_windows) {
    Train out;
    out.id = train.id;
    for (std::size_t k = begin; k < end; ++k) {
        const StationId& s = train.route[k];
        out.route.push_back(s);
        out.nominal_arrivals[s] = train.nominal_arrivals.at(s);
    }
    const StationId& first = out.route.front();
    out.initial_delay =
        full_windows.lo(first, train.id) - train.nominal_arrivals.at(first);
    return out;
}

void copy_pairs(const Instance& source, Instance& target,
                const std::set<StationId>& zone, bool inside) {
    auto keep = [&](const StationId& s) { return (zone.count(s) > 0) == inside; };
    for (const auto& [station, pairs] : source.headway_pairs)
        if (keep(station)) target.headway_pairs[station] = pairs;
    for (const auto& [station, pairs] : source.rollingstock_pairs)
        if (keep(station)) target.rollingstock_pairs[station] = pairs;
}

} // namespace

Decomposition decompose(const Instance& instance, const std::set<StationId>& zone) {
    if (zone.empty()) throw DecompositionError("stochastic zone is empty");

    TimeWindows full_windows = compute_time_windows(instance);
    Decomposition d;
    d.stochastic.params = instance.params;
    d.stochastic.d_max = instance.d_max;
    d.stochastic.disturbed = instance.disturbed;
    d.deterministic = d.stochastic;

    for (const StationId& s : instance.objective_stations)
        (zone.count(s) ? d.stochastic : d.deterministic).objective_stations.insert(s);

    bool any_inside = false;
    for (const Train& train : instance.trains) {
        const auto& route = train.route;
        std::size_t first_in = route.size(), last_in = route.size();
        for (std::size_t k = 0; k < route.size(); ++k) {
            if (!zone.count(route[k])) continue;
            if (first_in == route.size()) first_in = k;
            last_in = k;
        }
        if (first_in == route.size()) {
            // Entirely outside: the exact component owns the whole train.
            d.deterministic.trains.push_back(train);
            continue;
        }
        any_inside = true;
        for (std::size_t k = first_in; k <= last_in; ++k)
            if (!zone.count(route[k]))
                throw DecompositionError("zone slices the route of train " +
                                         std::to_string(train.id) +
                                         " into a non-contiguous segment");
        if (first_in > 0 && last_in + 1 < route.size())
            throw DecompositionError(
                "zone sits in the middle of the route of train " +
                std::to_string(train.id) +
                "; the deterministic remainder would be disconnected");

        d.stochastic.trains.push_back(
            slice_train(train, first_in, last_in + 1, full_windows));

        if (first_in > 0) {
            // outside prefix plus the entry station
            d.deterministic.trains.push_back(
                slice_train(train, 0, first_in + 1, full_windows));
            d.boundary.insert({route[first_in], train.id});
        } else if (last_in + 1 < route.size()) {
            // exit station plus the outside suffix
            d.deterministic.trains.push_back(
                slice_train(train, last_in, route.size(), full_windows));
            d.boundary.insert({route[last_in], train.id});
        }
    }
    if (!any_inside)
        throw DecompositionError("stochastic zone touches no route");

    copy_pairs(instance, d.stochastic, zone, true);
    copy_pairs(instance, d.deterministic, zone, false);
    return d;
}

namespace {

struct Candidate {
    std::map<StationTrain, Minutes> times;
    double objective = 0.0;
    std::vector<Minutes> boundary_times;   // in boundary key order
};

// Feasible sub-solutions sorted by objective, then boundary tuple, then the
// full time vector, so selection is deterministic.
std::vector<Candidate> feasible_candidates(const Qubo& qubo, const SampleSet& samples,
                                           const std::set<StationTrain>& boundary) {
    std::vector<Candidate> out;
    std::set<std::map<StationTrain, Minutes>> seen;
    for (const SampleRecord& rec : samples.records) {
        SolutionReport report = decode(qubo, rec.bits);
        if (!report.feasible_strict) continue;
        if (!seen.insert(report.times).second) continue;
        Candidate c;
        c.times = report.times;
        c.objective = report.objective.value_or(0.0);
        for (const StationTrain& key : boundary) c.boundary_times.push_back(c.times.at(key));
        out.push_back(std::move(c));
    }
    std::sort(out.begin(), out.end(), [](const Candidate& a, const Candidate& b) {
        if (a.objective != b.objective) return a.objective < b.objective;
        if (a.boundary_times != b.boundary_times)
            return a.boundary_times < b.boundary_times;
        return a.times < b.times;
    });
    return out;
}

SampleSet draw_samples(const Qubo& qubo, const IsingModel& ising,
                       const HybridConfig& config, int iteration, long shot_scale) {
    switch (config.backend) {
    case SamplerBackend::Enumerate:
        return enumerate_samples(qubo, config.enumerate_top * shot_scale);
    case SamplerBackend::Anneal: {
        AnnealConfig anneal = config.anneal;
        anneal.seed = config.seed + static_cast<std::uint64_t>(iteration);
        anneal.shots *= shot_scale;
        return simulated_anneal(ising, anneal);
    }
    case SamplerBackend::Qaoa: {
        QaoaConfig qaoa = config.qaoa;
        qaoa.seed = config.seed + static_cast<std::uint64_t>(iteration);
        qaoa.shots *= shot_scale;
        return qaoa_optimize_and_sample(ising, qaoa);
    }
    }
    throw ParameterError("unknown sampler backend");
}

} // namespace

HybridResult run_hybrid(const Instance& instance, const HybridConfig& config) {
    if (config.iterations < 1) throw ParameterError("iterations must be at least 1");
    if (config.k_representatives < 1)
        throw ParameterError("k_representatives must be at least 1");
    if (config.expected_stats && config.stats_edge.first.empty())
        throw ParameterError("distribution check enabled without a stats edge");

    Decomposition parts = decompose(instance, config.zone);
    TimeWindows stoch_windows = compute_time_windows(parts.stochastic);
    Qubo qubo = assemble(parts.stochastic, stoch_windows, config.penalties);
    IsingModel ising = to_ising(qubo);

    const bool det_empty = parts.deterministic.trains.empty();
    TimeWindows det_windows;
    IlpModel det_model;
    if (!det_empty) {
        det_windows = compute_time_windows(parts.deterministic);
        det_model = build_ilp(parts.deterministic, det_windows);
    }

    HybridResult result;
    std::set<std::vector<Minutes>> tried_boundaries;
    double best = std::numeric_limits<double>::infinity();
    std::string diagnostics;

    for (int iteration = 1; iteration <= config.iterations; ++iteration) {
        result.iterations_run = iteration;

        std::vector<Candidate> candidates;
        for (long scale : {1L, 2L}) {   // retry once with doubled shots
            SampleSet samples = draw_samples(qubo, ising, config, iteration, scale);

            if (config.expected_stats && config.tv_threshold >= 0.0) {
                std::vector<SolutionReport> reports;
                std::vector<long> weights;
                for (const SampleRecord& rec : samples.records) {
                    reports.push_back(decode(qubo, rec.bits));
                    weights.push_back(rec.count);
                }
                Histogram sampled =
                    passing_histogram(reports, config.stats_edge, false, &weights);
                Histogram expected;
                const Minutes base =
                    instance.params.pass(config.stats_edge.first, config.stats_edge.second);
                const DisturbanceModel& dm = *config.expected_stats;
                for (std::size_t i = 0; i < dm.support.size(); ++i)
                    expected.add(base + dm.support[i],
                                 dm.weights.empty()
                                     ? 1
                                     : std::lround(1000.0 * dm.weights[i]));
                if (!sampled.counts.empty()) {
                    double tv = total_variation(sampled, expected);
                    diagnostics += "iteration " + std::to_string(iteration) +
                                   ": passing-time TV distance " + format_coeff(tv) + "\n";
                    if (tv > config.tv_threshold && scale == 1) continue;
                }
            }

            candidates = feasible_candidates(qubo, samples, parts.boundary);
            if (!candidates.empty()) break;
        }

        if (candidates.empty()) {
            diagnostics += "iteration " + std::to_string(iteration) +
                           ": no feasible sub-solutions, stopping\n";
            if (result.portfolio.empty())
                throw ConfigError(
                    "sampler produced no feasible sub-timetable, even with doubled "
                    "shots; raise shots/sweeps or loosen the zone");
            break;
        }

        // k representatives with boundary assignments not tried before.
        int taken = 0;
        bool improved = false;
        for (const Candidate& c : candidates) {
            if (taken >= config.k_representatives) break;
            if (!tried_boundaries.insert(c.boundary_times).second) continue;
            ++taken;

            std::map<StationTrain, Minutes> joint = c.times;
            if (!det_empty) {
                IlpModel fixed = det_model;
                bool in_domain = true;
                for (const StationTrain& key : parts.boundary) {
                    auto it = fixed.index.find(key);
                    if (it == fixed.index.end()) continue;
                    IlpTimeVar& var = fixed.vars[it->second];
                    Minutes t = c.times.at(key);
                    if (t < var.lo || t > var.hi) {
                        in_domain = false;
                        break;
                    }
                    var.lo = var.hi = t;
                }
                if (!in_domain) continue;
                IlpSolution det = solve_exact(fixed);
                if (det.status != SolveStatus::Optimal) {
                    diagnostics += "iteration " + std::to_string(iteration) +
                                   ": a boundary assignment admits no completion\n";
                    continue;
                }
                for (const auto& [key, t] : det.times) joint[key] = t;
            }

            SolutionReport joint_report = report_from_times(instance, joint);
            if (!joint_report.feasible_strict) continue;

            PortfolioEntry entry;
            entry.stochastic_times = c.times;
            entry.joint_times = joint;
            entry.stochastic_objective = c.objective;
            entry.joint_objective = joint_report.objective.value_or(0.0);
            entry.iteration = iteration;
            result.portfolio.push_back(std::move(entry));
            if (result.portfolio.back().joint_objective < best) {
                best = result.portfolio.back().joint_objective;
                improved = true;
            }
        }

        if (!improved) {
            result.converged = true;
            break;
        }
    }

    std::sort(result.portfolio.begin(), result.portfolio.end(),
              [](const PortfolioEntry& a, const PortfolioEntry& b) {
                  if (a.joint_objective != b.joint_objective)
                      return a.joint_objective < b.joint_objective;
                  return a.joint_times < b.joint_times;
              });
    result.diagnostic = diagnostics;
    return result;
}

} // namespace railsched
