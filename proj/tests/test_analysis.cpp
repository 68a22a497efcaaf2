#include "doctest.h"

#include <cmath>

#include "railsched/analysis.hpp"
#include "railsched/factory.hpp"
#include "railsched/ilp.hpp"

using namespace railsched;

namespace {

struct Fixture {
    Instance inst = make_worked_example();
    TimeWindows windows = compute_time_windows(inst);
    Qubo qubo = assemble(inst, windows, PenaltyConfig::overlapping());

    std::map<StationTrain, Minutes> optimum() const {
        return {{{"PS", 1}, 19}, {{"MR", 1}, 22}, {{"CS", 1}, 37},
                {{"CS", 2}, 41}, {{"MR", 2}, 56}, {{"PS", 2}, 59}};
    }
};

} // namespace

TEST_CASE("decoding the optimal assignment yields a strict report") {
    Fixture f;
    Bits bits = encode_times(f.qubo, f.optimum());
    SolutionReport report = decode(f.qubo, bits);

    CHECK(report.feasible_strict);
    CHECK(report.feasible_relaxed);
    CHECK(report.violations.empty());
    REQUIRE(report.objective.has_value());
    CHECK(*report.objective == doctest::Approx(6.0));
    CHECK(report.times == f.optimum());

    // Travel minus the one-minute dwell on each leg.
    CHECK(report.passing_times.at({1, {"PS", "MR"}}) == 2);
    CHECK(report.passing_times.at({1, {"MR", "CS"}}) == 14);
    CHECK(report.passing_times.at({2, {"CS", "MR"}}) == 14);
    CHECK(report.passing_times.at({2, {"MR", "PS"}}) == 2);
}

TEST_CASE("the one-minute-later turnaround decodes to the runner-up cost") {
    // Train 1 crawls into CS one minute late; the return service then rides
    // its latest slots throughout and the total rises from 6 to 7.5.
    Fixture f;
    std::map<StationTrain, Minutes> times{{{"PS", 1}, 19}, {{"MR", 1}, 22},
                                          {{"CS", 1}, 38}, {{"CS", 2}, 42},
                                          {{"MR", 2}, 57}, {{"PS", 2}, 60}};
    SolutionReport report = decode(f.qubo, encode_times(f.qubo, times));
    CHECK(report.feasible_strict);
    REQUIRE(report.objective.has_value());
    CHECK(*report.objective == doctest::Approx(7.5));
    CHECK(report.passing_times.at({1, {"MR", "CS"}}) == 15);
    CHECK(report.passing_times.at({2, {"CS", "MR"}}) == 14);
}

TEST_CASE("encode_times rejects incomplete or out-of-window timetables") {
    Fixture f;
    auto times = f.optimum();
    times.erase({"PS", 1});
    CHECK_THROWS_AS(encode_times(f.qubo, times), ParameterError);
    times[{"PS", 1}] = 25;   // window ends at 21
    CHECK_THROWS_AS(encode_times(f.qubo, times), ParameterError);
}

TEST_CASE("an unresolved choice group blocks the objective") {
    Fixture f;
    Bits bits = encode_times(f.qubo, f.optimum());
    bits[f.qubo.catalog.find("PS", 1, 19)] = 0;   // nothing chosen for PS/1
    SolutionReport report = decode(f.qubo, bits);
    CHECK_FALSE(report.feasible_strict);
    CHECK_FALSE(report.feasible_relaxed);
    CHECK_FALSE(report.objective.has_value());
    CHECK(report.times.count({"PS", 1}) == 0);
    REQUIRE(!report.violations.empty());
    CHECK(report.violations[0].family == "onehot");
}

TEST_CASE("a too-fast leg is a passing violation and only relaxed-feasible") {
    Fixture f;
    auto times = f.optimum();
    times[{"MR", 1}] = 23;
    times[{"CS", 1}] = 37;   // 37 < 23 + stay + pass = 38
    SolutionReport report = decode(f.qubo, encode_times(f.qubo, times));
    CHECK_FALSE(report.feasible_strict);
    CHECK(report.feasible_relaxed);
    REQUIRE(report.objective.has_value());
    CHECK(*report.objective == doctest::Approx(6.5));
    REQUIRE(report.violations.size() == 1);
    CHECK(report.violations[0].family == "passing");
    CHECK(report.violations[0].trains == std::vector<TrainId>{1});
    CHECK(report.passing_times.at({1, {"MR", "CS"}}) == 13);
}

TEST_CASE("a rushed turnaround is a rolling stock violation") {
    Fixture f;
    auto times = f.optimum();
    times[{"CS", 2}] = 40;   // needs 37 + preparation + stay = 41
    SolutionReport report = decode(f.qubo, encode_times(f.qubo, times));
    CHECK_FALSE(report.feasible_strict);
    CHECK_FALSE(report.feasible_relaxed);
    REQUIRE(report.violations.size() == 1);
    CHECK(report.violations[0].family == "rollingstock");
    CHECK(report.violations[0].trains == std::vector<TrainId>{1, 2});
}

TEST_CASE("report_from_times agrees with decoding the same timetable") {
    Fixture f;
    SolutionReport from_bits = decode(f.qubo, encode_times(f.qubo, f.optimum()));
    SolutionReport from_times = report_from_times(f.inst, f.optimum());
    CHECK(from_times.feasible_strict == from_bits.feasible_strict);
    CHECK(*from_times.objective == doctest::Approx(*from_bits.objective));
    CHECK(from_times.passing_times == from_bits.passing_times);
}

TEST_CASE("order swaps between same-direction trains are overtake violations") {
    FamilySpec spec;
    spec.train_count = 4;
    Instance inst = make_family_instance(spec);

    // Trains 1 and 3 both run towards CS; push train 1 behind train 3 at CS
    // while it still leads at MR.
    std::map<StationTrain, Minutes> times;
    for (const Train& t : inst.trains)
        for (const StationId& s : t.route) times[{s, t.id}] = t.nominal_arrivals.at(s);
    times[{"CS", 1}] = times[{"CS", 3}] + 2;

    SolutionReport report = report_from_times(inst, times);
    CHECK_FALSE(report.feasible_strict);
    bool overtake_seen = false;
    for (const ReportViolation& v : report.violations)
        if (v.family == "overtake") overtake_seen = true;
    CHECK(overtake_seen);
}

TEST_CASE("passing histograms are weighted and filtered") {
    Fixture f;
    SolutionReport good = decode(f.qubo, encode_times(f.qubo, f.optimum()));
    // Stretch train 1's run to 15 minutes; the turnaround then needs the
    // partner on the latest slots to stay feasible.
    auto slow_times = f.optimum();
    slow_times[{"CS", 1}] = 38;
    slow_times[{"CS", 2}] = 42;
    slow_times[{"MR", 2}] = 57;
    slow_times[{"PS", 2}] = 60;
    SolutionReport slow = decode(f.qubo, encode_times(f.qubo, slow_times));
    auto broken_times = f.optimum();
    broken_times[{"MR", 1}] = 24;   // passing 12, violates the leg
    SolutionReport broken = decode(f.qubo, encode_times(f.qubo, broken_times));

    std::vector<SolutionReport> reports{good, slow, broken};
    std::vector<long> weights{5, 2, 9};

    Histogram strict = passing_histogram(reports, {"MR", "CS"}, false, &weights);
    CHECK(strict.total() == 7);
    CHECK(strict.counts.at(14) == 5);
    CHECK(strict.counts.at(15) == 2);
    CHECK_FALSE(strict.empty_warning);

    Histogram relaxed = passing_histogram(reports, {"MR", "CS"}, true, &weights);
    CHECK(relaxed.total() == 16);
    CHECK(relaxed.counts.at(12) == 9);

    Histogram other_edge = passing_histogram(reports, {"PS", "MR"}, false, &weights);
    CHECK(other_edge.total() == 7);   // train 1 only; train 2 runs MR->PS

    Histogram none = passing_histogram({}, {"MR", "CS"});
    CHECK(none.total() == 0);
    CHECK(none.empty_warning);
}

TEST_CASE("the full spectrum splits into the published feasible set") {
    Fixture f;
    auto spectrum = enumerate_spectrum(f.qubo);
    SpectrumSummary summary = spectrum_summary(spectrum, f.qubo);

    CHECK(summary.feasible_count == 7);
    CHECK(summary.infeasible_count == (1L << 18) - 7);
    REQUIRE(summary.min_feasible.has_value());
    CHECK(*summary.min_feasible == doctest::Approx(6.0));
    CHECK(*summary.max_feasible == doctest::Approx(8.0));
    CHECK(summary.regime == "overlapping");
    CHECK(*summary.gap == doctest::Approx(-1.5));

    REQUIRE(summary.feasible_objectives.size() == 5);
    CHECK(summary.feasible_objectives.at(6.0) == 2);
    CHECK(summary.feasible_objectives.at(6.5) == 1);
    CHECK(summary.feasible_objectives.at(7.0) == 1);
    CHECK(summary.feasible_objectives.at(7.5) == 1);
    CHECK(summary.feasible_objectives.at(8.0) == 2);
    CHECK(summary.energy_histogram.total() == (1L << 18));
}

TEST_CASE("high penalties push every infeasible state above the feasible band") {
    Instance inst = make_worked_example();
    Qubo q = assemble(inst, compute_time_windows(inst), PenaltyConfig::split());
    SpectrumSummary summary = spectrum_summary(enumerate_spectrum(q), q);
    CHECK(summary.regime == "split");
    CHECK(*summary.gap > 0.0);
    // The feasible band itself is penalty-independent.
    CHECK(*summary.min_feasible == doctest::Approx(6.0));
    CHECK(*summary.max_feasible == doctest::Approx(8.0));
}

TEST_CASE("a model with no choice groups classifies every state feasible") {
    // Nothing to violate: no groups, no forbidden pairs.  The infeasible
    // extremes stay undefined and so does the gap.
    Qubo q;
    q.n = 2;
    q.terms[{0, 0}] = -1.0;
    q.terms[{1, 1}] = 0.5;
    q.objective_diag = {-1.0, 0.5};
    q.catalog.entries = {{"A", 1, 10}, {"A", 1, 11}};

    SpectrumSummary summary = spectrum_summary(enumerate_spectrum(q), q);
    CHECK(summary.feasible_count == 4);
    CHECK(summary.infeasible_count == 0);
    REQUIRE(summary.min_feasible.has_value());
    CHECK(*summary.min_feasible == doctest::Approx(-1.0));
    CHECK_FALSE(summary.min_infeasible.has_value());
    CHECK_FALSE(summary.gap.has_value());
    CHECK(summary.regime == "undefined");
}

TEST_CASE("feasible_fraction weighs samples by their counts") {
    Fixture f;
    SampleSet set;
    set.shots = 4;
    SampleRecord good{encode_times(f.qubo, f.optimum()), 6.0, 3};
    SampleRecord bad{Bits(f.qubo.n, 0), 24.0, 1};
    set.records = {good, bad};
    CHECK(feasible_fraction(set, f.qubo) == doctest::Approx(0.75));
    CHECK(feasible_fraction(set, f.qubo, true) == doctest::Approx(0.75));

    SampleSet empty;
    CHECK(feasible_fraction(empty, f.qubo) == doctest::Approx(0.0));
}

TEST_CASE("linear fits reproduce the two-point closed form") {
    std::vector<std::pair<double, double>> anchors{{42.0, 85.0}, {182.0, 503.0}};
    ScalingFit fit = fit_scaling(anchors, ScalingModel::Linear);
    double slope = (503.0 - 85.0) / (182.0 - 42.0);
    CHECK(fit.slope == doctest::Approx(slope).epsilon(1e-12));
    CHECK(fit.intercept == doctest::Approx(85.0 - slope * 42.0).epsilon(1e-12));
    CHECK(fit.r2 == doctest::Approx(1.0));
    CHECK(fit.predict(196.0) == doctest::Approx(544.8).epsilon(1e-12));
}

TEST_CASE("exponential fits recover a decay rate from clean data") {
    std::vector<std::pair<double, double>> points;
    for (double x : {10.0, 20.0, 40.0, 80.0})
        points.push_back({x, 3.0 * std::exp(-0.05 * x)});
    ScalingFit fit = fit_scaling(points, ScalingModel::Exponential);
    CHECK(fit.slope == doctest::Approx(-0.05).epsilon(1e-9));
    CHECK(fit.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-9));
    CHECK(fit.r2 == doctest::Approx(1.0));
    CHECK(fit.predict(100.0) == doctest::Approx(3.0 * std::exp(-5.0)).epsilon(1e-9));
}

TEST_CASE("degenerate fit inputs are rejected") {
    CHECK_THROWS_AS(fit_scaling({{1.0, 2.0}}, ScalingModel::Linear), ParameterError);
    CHECK_THROWS_AS(fit_scaling({{1.0, 2.0}, {1.0, 3.0}}, ScalingModel::Linear),
                    ParameterError);
    CHECK_THROWS_AS(
        fit_scaling({{1.0, 0.0}, {2.0, 1.0}}, ScalingModel::Exponential),
        ParameterError);
}

TEST_CASE("train diagrams list every stop and their feasibility") {
    Fixture f;
    SolutionReport report = decode(f.qubo, encode_times(f.qubo, f.optimum()));
    std::string diagram = export_train_diagram(report, f.inst);
    CHECK(diagram.find("train,station,arrive,depart") != std::string::npos);
    CHECK(diagram.find("1,PS,19,20") != std::string::npos);
    CHECK(diagram.find("2,PS,59,60") != std::string::npos);
    CHECK(diagram.find("# feasibility strict") != std::string::npos);

    // A passing violation still draws, but flagged as relaxed.
    auto late = f.optimum();
    late[{"MR", 1}] = 24;
    SolutionReport relaxed = decode(f.qubo, encode_times(f.qubo, late));
    CHECK(export_train_diagram(relaxed, f.inst).find("# feasibility relaxed") !=
          std::string::npos);

    SolutionReport partial = report;
    partial.times.erase({"CS", 2});
    CHECK_THROWS_AS(export_train_diagram(partial, f.inst), ConfigError);
}

TEST_CASE("histogram CSV round-trips and compares distributions") {
    Histogram h;
    h.bin_width = 0.5;
    h.add(14.0, 5);
    h.add(14.6, 1);
    h.add(16.2, 2);
    Histogram back = read_histogram_csv(write_histogram_csv(h));
    CHECK(back.bin_width == doctest::Approx(0.5));
    CHECK(back.counts == h.counts);

    CHECK(total_variation(h, back) == doctest::Approx(0.0));

    Histogram other;
    other.bin_width = 0.5;
    other.add(30.0, 4);
    CHECK(total_variation(h, other) == doctest::Approx(1.0));

    Histogram wrong_width;
    wrong_width.bin_width = 1.0;
    wrong_width.add(14.0);
    CHECK_THROWS_AS(total_variation(h, wrong_width), ParameterError);
    CHECK_THROWS_AS(total_variation(h, Histogram{}), ParameterError);
}
