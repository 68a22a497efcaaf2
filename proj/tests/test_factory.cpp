#include "doctest.h"

#include <cstdlib>

#include "railsched/factory.hpp"
#include "railsched/qubo.hpp"

using namespace railsched;

namespace {

int variable_count(int trains, Minutes d_max, bool disturbed = false) {
    FamilySpec spec;
    spec.train_count = trains;
    spec.d_max = d_max;
    spec.disturbed = disturbed;
    Instance inst = make_family_instance(spec);
    return build_catalog(inst, compute_time_windows(inst)).size();
}

} // namespace

TEST_CASE("the worked example wires one delayed service to its return trip") {
    Instance inst = make_worked_example();
    REQUIRE(inst.trains.size() == 2);
    CHECK(inst.trains[0].route == std::vector<StationId>{"PS", "MR", "CS"});
    CHECK(inst.trains[1].route == std::vector<StationId>{"CS", "MR", "PS"});
    CHECK(inst.trains[0].initial_delay == 5);
    CHECK(inst.trains[1].initial_delay == 0);
    CHECK(inst.d_max == 2);
    CHECK(inst.objective_stations == std::set<StationId>{"MR", "CS"});

    REQUIRE(inst.rollingstock_pairs.count("CS"));
    CHECK(inst.rollingstock_pairs.at("CS") ==
          std::vector<std::pair<TrainId, TrainId>>{{1, 2}});

    // Two opposite-direction trains never share a headway dependency.
    CHECK(inst.headway_pairs.empty());
    CHECK(validate_instance(inst).empty());

    CHECK(inst.params.pass("PS", "MR") == 2);
    CHECK(inst.params.pass("MR", "CS") == 14);
    CHECK(inst.params.headway_min == 2);
    CHECK(inst.params.preparation_min == 3);
    CHECK(inst.params.station_stay_min == 1);
}

TEST_CASE("family sizes compile to the published variable counts") {
    CHECK(variable_count(1, 2) == 6);
    CHECK(variable_count(1, 6) == 14);
    CHECK(variable_count(2, 2) == 18);
    CHECK(variable_count(2, 6) == 42);
    CHECK(variable_count(11, 6) == 182);
    CHECK(variable_count(12, 6) == 196);
    // Delays never change the catalog size, only the window positions.
    CHECK(variable_count(11, 6, true) == 182);
    CHECK(variable_count(12, 6, true) == 196);
}

TEST_CASE("every member of the benchmark family validates cleanly") {
    int built = 0;
    for (int trains : {1, 2, 4, 6, 8, 10, 11, 12})
        for (Minutes d_max : {2, 6})
            for (bool disturbed : {false, true}) {
                if (trains == 1 && disturbed) continue;
                FamilySpec spec;
                spec.train_count = trains;
                spec.d_max = d_max;
                spec.disturbed = disturbed;
                Instance inst = make_family_instance(spec);
                CAPTURE(trains);
                CAPTURE(d_max);
                CAPTURE(disturbed);
                CHECK(validate_instance(inst).empty());
                CHECK(inst.disturbed == disturbed);
                ++built;
            }
    CHECK(built == 30);
}

TEST_CASE("undisturbed members have conflict-free nominal timetables") {
    for (int trains : {2, 4, 12}) {
        FamilySpec spec;
        spec.train_count = trains;
        Instance inst = make_family_instance(spec);
        TimeWindows w = compute_time_windows(inst);
        for (const auto& [station, pairs] : inst.headway_pairs)
            for (const auto& [a, b] : pairs)
                CHECK(std::abs(w.lo(station, a) - w.lo(station, b)) >=
                      inst.params.headway_min);
        for (const auto& [station, pairs] : inst.rollingstock_pairs)
            for (const auto& [a, b] : pairs)
                CHECK(w.lo(station, b) >= w.lo(station, a) +
                                              inst.params.preparation_min +
                                              inst.params.station_stay_min);
    }
}

TEST_CASE("disturbed members delay the first service and stay reproducible") {
    FamilySpec spec;
    spec.train_count = 12;
    spec.d_max = 6;
    spec.disturbed = true;
    spec.seed = 5;
    Instance a = make_family_instance(spec);
    Instance b = make_family_instance(spec);
    CHECK(instance_to_json(a) == instance_to_json(b));
    CHECK(a.trains[0].initial_delay == 5);

    int delayed = 0;
    for (const Train& t : a.trains)
        if (t.initial_delay > 0) ++delayed;
    // Large members need several clashing services to make rescheduling hard.
    CHECK(delayed >= 2);

    spec.seed = 6;
    Instance c = make_family_instance(spec);
    CHECK(c.trains[0].initial_delay == 5);   // the anchor delay is fixed
}

TEST_CASE("rolling stock pairs link each southbound train to its return") {
    FamilySpec spec;
    spec.train_count = 8;
    Instance inst = make_family_instance(spec);
    REQUIRE(inst.rollingstock_pairs.count("CS"));
    CHECK(inst.rollingstock_pairs.at("CS") ==
          std::vector<std::pair<TrainId, TrainId>>{{1, 2}, {3, 4}, {5, 6}, {7, 8}});
}

TEST_CASE("unsupported family parameters are rejected") {
    FamilySpec spec;
    spec.train_count = 3;
    CHECK_THROWS_AS(make_family_instance(spec), ParameterError);

    spec.train_count = 1;
    spec.disturbed = true;
    CHECK_THROWS_AS(make_family_instance(spec), ParameterError);

    spec.disturbed = false;
    spec.d_max = -2;
    CHECK_THROWS_AS(make_family_instance(spec), ParameterError);
}
