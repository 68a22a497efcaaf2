#include "railsched/ilp.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>

namespace railsched {

double IlpModel::objective_of(const std::vector<Minutes>& times) const {
    double total = 0.0;
    for (std::size_t i = 0; i < vars.size(); ++i)
        if (vars[i].in_objective)
            total += objective_scale * (times[i] - vars[i].nominal);
    return total;
}

IlpModel build_ilp(const Instance& instance, const TimeWindows& windows,
                   const std::map<Edge, Minutes>& w_realization) {
    for (const auto& [edge, w] : w_realization)
        if (w < 0)
            throw ParameterError("negative disturbance on edge " + edge.first + "->" +
                                 edge.second);

    IlpModel model;
    model.objective_scale = 1.0 / std::max(1, instance.d_max);

    for (const Train& train : instance.trains) {
        for (const StationId& s : train.route) {
            auto lo = windows.lower.find({s, train.id});
            auto hi = windows.upper.find({s, train.id});
            if (lo == windows.lower.end() || hi == windows.upper.end())
                throw ConfigError("windows lack entry for train " +
                                  std::to_string(train.id) + " at " + s);
            IlpTimeVar v;
            v.station = s;
            v.train = train.id;
            v.lo = lo->second;
            v.hi = hi->second;
            v.nominal = train.nominal_arrivals.at(s);
            v.in_objective = instance.objective_stations.count(s) > 0;
            model.index[{s, train.id}] = static_cast<int>(model.vars.size());
            model.vars.push_back(v);
        }
    }

    const Minutes stay = instance.params.station_stay_min;

    for (const Train& train : instance.trains) {
        for (std::size_t k = 0; k + 1 < train.route.size(); ++k) {
            const StationId& a = train.route[k];
            const StationId& b = train.route[k + 1];
            Minutes gap = stay + instance.params.pass(a, b);
            auto w = w_realization.find({a, b});
            if (w != w_realization.end()) gap += w->second;
            model.constraints.push_back({ConstraintFamily::Passing,
                                         model.index.at({a, train.id}),
                                         model.index.at({b, train.id}), gap});
        }
    }

    std::set<std::pair<int, int>> seen;  // unordered dedup of headway pairs
    for (const auto& [station, pairs] : instance.headway_pairs) {
        for (const auto& [j, j2] : pairs) {
            int a = model.index.at({station, j});
            int b = model.index.at({station, j2});
            if (!seen.insert({std::min(a, b), std::max(a, b)}).second) continue;
            model.constraints.push_back(
                {ConstraintFamily::Headway, a, b, instance.params.headway_min});
        }
    }

    for (const auto& [station, pairs] : instance.rollingstock_pairs)
        for (const auto& [j, j2] : pairs)
            model.constraints.push_back({ConstraintFamily::RollingStock,
                                         model.index.at({station, j}),
                                         model.index.at({station, j2}),
                                         instance.params.preparation_min + stay});

    return model;
}

namespace {

struct Search {
    const IlpModel& model;
    int n;
    std::vector<Minutes> times;          // current partial assignment
    std::vector<char> assigned;
    std::vector<Minutes> earliest;       // propagated lower bounds
    double best_objective = std::numeric_limits<double>::infinity();
    std::vector<Minutes> best_times;
    bool found = false;
    long nodes = 0;

    explicit Search(const IlpModel& m)
        : model(m), n(static_cast<int>(m.vars.size())), times(n, 0), assigned(n, 0),
          earliest(n, 0) {}

    // Tighten earliest[] under the precedence constraints; returns false when
    // some variable is pushed past its domain.
    bool propagate() {
        for (int i = 0; i < n; ++i)
            earliest[i] = assigned[i] ? times[i] : model.vars[i].lo;
        bool changed = true;
        while (changed) {
            changed = false;
            for (const IlpConstraint& c : model.constraints) {
                if (c.family == ConstraintFamily::Headway) continue;
                Minutes need = earliest[c.a] + c.gap;
                if (earliest[c.b] < need) {
                    if (assigned[c.b] || need > model.vars[c.b].hi) return false;
                    earliest[c.b] = need;
                    changed = true;
                }
            }
        }
        return true;
    }

    double lower_bound(double partial) const {
        double lb = partial;
        for (int i = 0; i < n; ++i)
            if (!assigned[i] && model.vars[i].in_objective)
                lb += model.objective_scale *
                      std::max(0, earliest[i] - model.vars[i].nominal);
        return lb;
    }

    bool feasible_choice(int v, Minutes t) const {
        for (const IlpConstraint& c : model.constraints) {
            if (c.family == ConstraintFamily::Headway) {
                int other = -1;
                if (c.a == v) other = c.b;
                else if (c.b == v) other = c.a;
                if (other >= 0 && assigned[other] && std::abs(t - times[other]) < c.gap)
                    return false;
            } else {
                if (c.b == v && assigned[c.a] && t < times[c.a] + c.gap) return false;
                if (c.a == v && assigned[c.b] && times[c.b] < t + c.gap) return false;
            }
        }
        return true;
    }

    void dfs(int v, double partial) {
        ++nodes;
        if (v == n) {
            if (partial < best_objective) {
                best_objective = partial;
                best_times = times;
                found = true;
            }
            return;
        }
        if (!propagate()) return;
        if (found && lower_bound(partial) >= best_objective) return;

        const IlpTimeVar& var = model.vars[v];
        for (Minutes t = earliest[v]; t <= var.hi; ++t) {
            if (!feasible_choice(v, t)) continue;
            times[v] = t;
            assigned[v] = 1;
            double contrib =
                var.in_objective ? model.objective_scale * (t - var.nominal) : 0.0;
            dfs(v + 1, partial + contrib);
            assigned[v] = 0;
        }
    }
};

} // namespace

IlpSolution solve_exact(const IlpModel& model) {
    Search search(model);
    search.dfs(0, 0.0);

    IlpSolution sol;
    sol.nodes = search.nodes;
    if (!search.found) return sol;
    sol.status = SolveStatus::Optimal;
    sol.objective = search.best_objective;
    for (int i = 0; i < search.n; ++i)
        sol.times[{model.vars[i].station, model.vars[i].train}] = search.best_times[i];
    return sol;
}

std::vector<std::pair<std::map<Edge, Minutes>, IlpSolution>>
sweep_stochastic(const Instance& instance, const TimeWindows& windows,
                 const DisturbanceModel& model, const std::set<Edge>& edges) {
    if (model.support.empty())
        throw ParameterError("disturbance support is empty");
    if (!model.weights.empty() && model.weights.size() != model.support.size())
        throw ParameterError("disturbance weights do not match support");

    std::vector<Edge> sorted(edges.begin(), edges.end());
    std::vector<Minutes> support = model.support;
    std::sort(support.begin(), support.end());

    std::vector<std::pair<std::map<Edge, Minutes>, IlpSolution>> out;
    std::vector<std::size_t> odo(sorted.size(), 0);
    while (true) {
        std::map<Edge, Minutes> realization;
        for (std::size_t i = 0; i < sorted.size(); ++i)
            realization[sorted[i]] = support[odo[i]];
        out.push_back({realization, solve_exact(build_ilp(instance, windows, realization))});
        // advance odometer, last edge fastest (lexicographic order)
        std::size_t i = sorted.size();
        while (i > 0) {
            --i;
            if (++odo[i] < support.size()) break;
            odo[i] = 0;
            if (i == 0) return out;
        }
        if (sorted.empty()) return out;
    }
}

} // namespace railsched
