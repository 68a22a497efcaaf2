#include "doctest.h"

#include <vector>

#include "railsched/factory.hpp"
#include "railsched/qubo.hpp"
#include "railsched/rng.hpp"

using namespace railsched;

namespace {

Qubo example_qubo(PenaltyConfig penalties = PenaltyConfig::overlapping()) {
    Instance inst = make_worked_example();
    return assemble(inst, compute_time_windows(inst), penalties);
}

// Set exactly the bits for the given (station, train, minute) picks.
Bits bits_for(const Qubo& q, const std::vector<std::tuple<StationId, TrainId, Minutes>>&
                                 picks) {
    Bits bits(q.n, 0);
    for (const auto& [s, j, t] : picks) {
        int idx = q.catalog.find(s, j, t);
        REQUIRE(idx >= 0);
        bits[idx] = 1;
    }
    return bits;
}

// Reference evaluation through an explicit dense symmetric matrix.
double dense_energy(const Qubo& q, const Bits& x) {
    std::vector<std::vector<double>> m(q.n, std::vector<double>(q.n, 0.0));
    for (const auto& [key, c] : q.terms) {
        m[key.first][key.second] = c;
        m[key.second][key.first] = c;
    }
    double e = q.offset;
    for (int i = 0; i < q.n; ++i)
        for (int j = 0; j < q.n; ++j) e += m[i][j] * x[i] * x[j];
    return e;
}

} // namespace

TEST_CASE("the worked example compiles to the published element counts") {
    Qubo q = example_qubo();
    CHECK(q.n == 18);
    CHECK(q.element_count(kTermOneHot) == 54);
    CHECK(q.element_count(kTermPassing) == 24);
    CHECK(q.element_count(kTermRollingStock) == 12);
    CHECK(q.element_count(kTermHeadway) == 0);
    CHECK(q.constraint_element_count() == 90);
}

TEST_CASE("the catalog lays out six contiguous three-minute choice groups") {
    Qubo q = example_qubo();
    REQUIRE(q.catalog.groups.size() == 6);
    int expected_first = 0;
    for (const VarGroup& g : q.catalog.groups) {
        CHECK(g.first == expected_first);
        CHECK(g.count == 3);
        expected_first += g.count;
    }

    CHECK(q.catalog.find("PS", 1, 19) == 0);
    CHECK(q.catalog.find("PS", 1, 21) == 2);
    CHECK(q.catalog.find("PS", 1, 22) == -1);    // outside the window
    CHECK(q.catalog.find("XX", 1, 19) == -1);    // unknown station
    const VarGroup* g = q.catalog.group_of("CS", 2);
    REQUIRE(g != nullptr);
    CHECK(g->lo == 40);
    CHECK(g->nominal == 40);

    // Entries are train-major in route order, minutes ascending.
    CHECK(q.catalog.entries[0].station == "PS");
    CHECK(q.catalog.entries[0].train == 1);
    CHECK(q.catalog.entries[0].time == 19);
    CHECK(q.catalog.entries[17].station == "PS");
    CHECK(q.catalog.entries[17].train == 2);
    CHECK(q.catalog.entries[17].time == 60);
}

TEST_CASE("choose-one groups cost zero exactly when one time is picked") {
    Qubo q = example_qubo();
    double p = q.penalties.p_sum;

    // Nothing selected: each of the six groups pays the constant once.
    CHECK(evaluate(q, Bits(q.n, 0)) == doctest::Approx(6 * p));

    // A full, conflict-free selection pays only the delay cost.
    Bits best = bits_for(q, {{"PS", 1, 19}, {"MR", 1, 22}, {"CS", 1, 37},
                             {"CS", 2, 41}, {"MR", 2, 56}, {"PS", 2, 59}});
    CHECK(evaluate(q, best) == doctest::Approx(6.0));

    // Doubling one group's selection restores its penalty.  PS carries no
    // delay cost and minute 60 clashes with nothing, so only the choose-one
    // constant returns.
    Bits doubled = best;
    doubled[q.catalog.find("PS", 2, 60)] = 1;
    CHECK(evaluate(q, doubled) == doctest::Approx(6.0 + p));

    // A forbidden combination costs its coefficient twice: once per matrix
    // triangle.
    Bits clash = bits_for(q, {{"PS", 1, 21}, {"MR", 1, 22}, {"CS", 1, 37},
                              {"CS", 2, 41}, {"MR", 2, 56}, {"PS", 2, 59}});
    CHECK(evaluate(q, clash) ==
          doctest::Approx(6.0 + 2 * q.penalties.p_pair));
}

TEST_CASE("forbidden passing combinations carry the pair penalty") {
    Qubo q = example_qubo();
    double p = q.penalties.p_pair;

    // Too fast from PS to MR: 22 - 20 < stay + pass = 3.
    auto coeff = [&](const StationId& s1, TrainId j1, Minutes t1,
                     const StationId& s2, TrainId j2, Minutes t2) {
        int a = q.catalog.find(s1, j1, t1);
        int b = q.catalog.find(s2, j2, t2);
        REQUIRE(a >= 0);
        REQUIRE(b >= 0);
        TermKey key{std::min(a, b), std::max(a, b)};
        auto it = q.terms.find(key);
        return it == q.terms.end() ? 0.0 : it->second;
    };

    for (auto [t_ps, t_mr] : {std::pair{20, 22}, {21, 22}, {21, 23}})
        CHECK(coeff("PS", 1, t_ps, "MR", 1, t_mr) == doctest::Approx(p));
    CHECK(coeff("PS", 1, 19, "MR", 1, 22) == doctest::Approx(0.0));

    // The turnaround at CS forbids returns earlier than 4 minutes after.
    for (auto [t1, t2] : {std::pair{37, 40}, {38, 40}, {38, 41},
                          {39, 40}, {39, 41}, {39, 42}})
        CHECK(coeff("CS", 1, t1, "CS", 2, t2) == doctest::Approx(p));
    CHECK(coeff("CS", 1, 37, "CS", 2, 41) == doctest::Approx(0.0));
}

TEST_CASE("evaluation matches a dense symmetric-matrix reference") {
    Qubo q = example_qubo();
    auto rng = make_rng(17, 0);
    for (int trial = 0; trial < 200; ++trial) {
        Bits x(q.n);
        for (auto& b : x) b = next_double(rng) < 0.5 ? 1 : 0;
        CHECK(evaluate(q, x) == doctest::Approx(dense_energy(q, x)).epsilon(1e-12));
    }
}

TEST_CASE("split penalties scale the constraint terms only") {
    Qubo low = example_qubo(PenaltyConfig::overlapping());
    Qubo high = example_qubo(PenaltyConfig::split());
    CHECK(high.penalties.p_sum == 40.0);
    CHECK(high.penalties.p_pair == 20.0);
    CHECK(high.offset == doctest::Approx(10.0 * low.offset));
    // The delay cost is identical in both compilations.
    for (int i = 0; i < low.n; ++i)
        CHECK(low.objective_diag[i] == doctest::Approx(high.objective_diag[i]));
}

TEST_CASE("a zero delay budget cannot be compiled") {
    Instance inst = make_worked_example();
    inst.d_max = 0;
    CHECK_THROWS_AS(assemble(inst, compute_time_windows(inst),
                             PenaltyConfig::overlapping()),
                    ParameterError);
}

TEST_CASE("the text format round-trips coefficients and provenance") {
    Qubo q = example_qubo();
    Qubo back = read_qubo(write_qubo(q));
    CHECK(back.n == q.n);
    CHECK(back.offset == doctest::Approx(q.offset).epsilon(1e-12));
    REQUIRE(back.terms.size() == q.terms.size());
    CHECK(back.provenance == q.provenance);

    auto rng = make_rng(3, 1);
    for (int trial = 0; trial < 50; ++trial) {
        Bits x(q.n);
        for (auto& b : x) b = next_double(rng) < 0.5 ? 1 : 0;
        CHECK(evaluate(back, x) == doctest::Approx(evaluate(q, x)).epsilon(1e-12));
    }

    // Without its sidecar the reloaded model cannot decode timetables.
    CHECK_FALSE(back.has_decode_context());
    CHECK(q.has_decode_context());
}

TEST_CASE("the catalog sidecar restores the decode context") {
    Qubo q = example_qubo();
    VarCatalog back = read_catalog(write_catalog(q.catalog));
    REQUIRE(back.size() == q.catalog.size());
    REQUIRE(back.groups.size() == q.catalog.groups.size());
    CHECK(back.find("CS", 2, 41) == q.catalog.find("CS", 2, 41));
    CHECK(back.group_of("MR", 1)->first == q.catalog.group_of("MR", 1)->first);
}

TEST_CASE("bit strings round-trip") {
    Bits bits = {1, 0, 0, 1, 1, 0};
    CHECK(bits_to_string(bits) == "100110");
    CHECK(bits_from_string("100110") == bits);
    CHECK_THROWS_AS(bits_from_string("10x"), ParseError);
}
