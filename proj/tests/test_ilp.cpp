#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>

#include "railsched/factory.hpp"
#include "railsched/ilp.hpp"

using namespace railsched;

namespace {

// Independent reference: walk the full cartesian product of the arrival-time
// windows and check every separation rule directly against the instance.
struct BruteForce {
    const Instance& inst;
    std::vector<StationTrain> keys;
    std::vector<Minutes> lo, hi;
    std::map<Edge, Minutes> extra;

    BruteForce(const Instance& instance, const TimeWindows& w,
               std::map<Edge, Minutes> w_realization = {})
        : inst(instance), extra(std::move(w_realization)) {
        for (const Train& t : inst.trains)
            for (const StationId& s : t.route) {
                keys.push_back({s, t.id});
                lo.push_back(w.lo(s, t.id));
                hi.push_back(w.hi(s, t.id));
            }
    }

    Minutes at(const std::vector<Minutes>& x, const StationId& s, TrainId j) const {
        for (std::size_t i = 0; i < keys.size(); ++i)
            if (keys[i] == StationTrain{s, j}) return x[i];
        REQUIRE(false);
        return 0;
    }

    bool feasible(const std::vector<Minutes>& x) const {
        Minutes stay = inst.params.station_stay_min;
        for (const Train& t : inst.trains)
            for (std::size_t k = 0; k + 1 < t.route.size(); ++k) {
                const StationId& a = t.route[k];
                const StationId& b = t.route[k + 1];
                Minutes w = 0;
                if (auto it = extra.find({a, b}); it != extra.end()) w = it->second;
                if (at(x, b, t.id) < at(x, a, t.id) + stay + inst.params.pass(a, b) + w)
                    return false;
            }
        for (const auto& [s, pairs] : inst.headway_pairs)
            for (const auto& [j, j2] : pairs)
                if (std::abs(at(x, s, j) - at(x, s, j2)) < inst.params.headway_min)
                    return false;
        for (const auto& [s, pairs] : inst.rollingstock_pairs)
            for (const auto& [j, j2] : pairs)
                if (at(x, s, j2) <
                    at(x, s, j) + inst.params.preparation_min + stay)
                    return false;
        return true;
    }

    double objective(const std::vector<Minutes>& x) const {
        double total = 0.0;
        double scale = 1.0 / std::max(1, inst.d_max);
        for (const Train& t : inst.trains)
            for (const StationId& s : t.route)
                if (inst.objective_stations.count(s))
                    total += (at(x, s, t.id) - t.nominal_arrivals.at(s)) * scale;
        return total;
    }

    std::pair<bool, double> minimum() const {
        std::vector<Minutes> x(lo);
        bool found = false;
        double best = std::numeric_limits<double>::infinity();
        while (true) {
            if (feasible(x)) {
                found = true;
                best = std::min(best, objective(x));
            }
            std::size_t i = 0;
            while (i < x.size() && x[i] == hi[i]) {
                x[i] = lo[i];
                ++i;
            }
            if (i == x.size()) break;
            ++x[i];
        }
        return {found, best};
    }
};

} // namespace

TEST_CASE("the compiled model carries six tight variables and five constraints") {
    Instance inst = make_worked_example();
    TimeWindows w = compute_time_windows(inst);
    IlpModel model = build_ilp(inst, w);

    REQUIRE(model.vars.size() == 6);
    for (const IlpTimeVar& v : model.vars) CHECK(v.hi - v.lo == 2);

    auto family_count = [&](const IlpModel& m, ConstraintFamily f) {
        return std::count_if(m.constraints.begin(), m.constraints.end(),
                             [&](const IlpConstraint& c) { return c.family == f; });
    };
    CHECK(family_count(model, ConstraintFamily::Passing) == 4);
    CHECK(family_count(model, ConstraintFamily::RollingStock) == 1);
    CHECK(family_count(model, ConstraintFamily::Headway) == 0);

    // Extra travel time widens exactly the constraint of the slowed leg.
    IlpModel slowed = build_ilp(inst, w, {{{"MR", "CS"}, 1}});
    REQUIRE(slowed.constraints.size() == model.constraints.size());
    for (std::size_t i = 0; i < model.constraints.size(); ++i) {
        const IlpConstraint& base = model.constraints[i];
        const IlpConstraint& wide = slowed.constraints[i];
        bool slowed_leg = base.family == ConstraintFamily::Passing &&
                          model.vars[base.a].station == "MR" &&
                          model.vars[base.b].station == "CS";
        CHECK(wide.gap == base.gap + (slowed_leg ? 1 : 0));
    }

    // A lone shuttle has one leg and no train pair to separate.
    FamilySpec one;
    one.train_count = 1;
    Instance shuttle = make_family_instance(one);
    IlpModel small = build_ilp(shuttle, compute_time_windows(shuttle));
    CHECK(small.vars.size() == 2);
    CHECK(family_count(small, ConstraintFamily::Passing) == 1);
    CHECK(family_count(small, ConstraintFamily::Headway) == 0);
    CHECK(family_count(small, ConstraintFamily::RollingStock) == 0);
}

TEST_CASE("the exact solver resolves the worked example as waiting at CS") {
    Instance inst = make_worked_example();
    TimeWindows w = compute_time_windows(inst);
    IlpSolution sol = solve_exact(build_ilp(inst, w));

    REQUIRE(sol.status == SolveStatus::Optimal);
    CHECK(sol.objective == doctest::Approx(6.0).epsilon(1e-12));

    // The delayed train runs at its earliest times; the return service waits
    // one extra minute at CS for the unit to turn around.
    CHECK(sol.times.at({"PS", 1}) == 19);
    CHECK(sol.times.at({"MR", 1}) == 22);
    CHECK(sol.times.at({"CS", 1}) == 37);
    CHECK(sol.times.at({"CS", 2}) == 41);
    CHECK(sol.times.at({"MR", 2}) == 56);
    CHECK(sol.times.at({"PS", 2}) == 59);
    CHECK(sol.nodes > 0);
}

TEST_CASE("the exact solver agrees with exhaustive search on the example") {
    Instance inst = make_worked_example();
    TimeWindows w = compute_time_windows(inst);
    auto [found, best] = BruteForce(inst, w).minimum();
    REQUIRE(found);
    IlpSolution sol = solve_exact(build_ilp(inst, w));
    REQUIRE(sol.status == SolveStatus::Optimal);
    CHECK(sol.objective == doctest::Approx(best).epsilon(1e-12));
}

TEST_CASE("undisturbed timetables solve at zero cost on nominal times") {
    for (int trains : {1, 2, 4}) {
        FamilySpec spec;
        spec.train_count = trains;
        Instance inst = make_family_instance(spec);
        IlpSolution sol = solve_exact(build_ilp(inst, compute_time_windows(inst)));
        REQUIRE(sol.status == SolveStatus::Optimal);
        CHECK(sol.objective == doctest::Approx(0.0));
        for (const Train& t : inst.trains)
            for (const StationId& s : t.route)
                CHECK(sol.times.at({s, t.id}) == t.nominal_arrivals.at(s));
    }
}

TEST_CASE("shrinking the delay budget to zero makes the example infeasible") {
    Instance inst = make_worked_example();
    inst.d_max = 0;
    IlpSolution sol = solve_exact(build_ilp(inst, compute_time_windows(inst)));
    CHECK(sol.status == SolveStatus::Infeasible);
    CHECK(sol.times.empty());
}

TEST_CASE("extra travel time shifts the optimum and matches exhaustive search") {
    Instance inst = make_worked_example();
    TimeWindows w = compute_time_windows(inst);
    std::map<Edge, Minutes> extra{{{"MR", "CS"}, 1}};

    IlpSolution plain = solve_exact(build_ilp(inst, w));
    IlpSolution slowed = solve_exact(build_ilp(inst, w, extra));
    REQUIRE(slowed.status == SolveStatus::Optimal);
    CHECK(slowed.objective >= plain.objective);
    CHECK(slowed.objective == doctest::Approx(7.5).epsilon(1e-12));

    auto [found, best] = BruteForce(inst, w, extra).minimum();
    REQUIRE(found);
    CHECK(slowed.objective == doctest::Approx(best).epsilon(1e-12));
    // The southbound leg now takes 15 minutes, pushing the CS arrival;
    // the turnaround then forces the partner all the way to the window edge.
    CHECK(slowed.times.at({"CS", 1}) == 38);
    CHECK(slowed.times.at({"CS", 2}) == 42);
}

TEST_CASE("negative extra travel time is rejected") {
    Instance inst = make_worked_example();
    TimeWindows w = compute_time_windows(inst);
    CHECK_THROWS_AS(build_ilp(inst, w, {{{"MR", "CS"}, -1}}), ParameterError);
}

TEST_CASE("a disturbance sweep solves one model per realization") {
    Instance inst = make_worked_example();
    TimeWindows w = compute_time_windows(inst);
    DisturbanceModel model;
    model.support = {0, 1, 2};
    model.weights = {0.5, 0.3, 0.2};

    auto sweep = sweep_stochastic(inst, w, model, {{"MR", "CS"}});
    REQUIRE(sweep.size() == 3);
    CHECK(sweep[0].first.at({"MR", "CS"}) == 0);
    CHECK(sweep[2].first.at({"MR", "CS"}) == 2);
    // No extra time reproduces the plain optimum.
    CHECK(sweep[0].second.status == SolveStatus::Optimal);
    CHECK(sweep[0].second.objective == doctest::Approx(6.0));
    // One extra minute still fits, at a cost.
    CHECK(sweep[1].second.status == SolveStatus::Optimal);
    CHECK(sweep[0].second.objective <= sweep[1].second.objective);
    // Two extra minutes leave no rolling-stock-compatible slot pair.
    CHECK(sweep[2].second.status == SolveStatus::Infeasible);

    // Two disturbed edges enumerate the full cartesian product.
    auto grid = sweep_stochastic(inst, w, model, {{"MR", "CS"}, {"CS", "MR"}});
    CHECK(grid.size() == 9);
}
