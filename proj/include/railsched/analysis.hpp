#pragma once

#include <optional>

#include "railsched/samplers.hpp"

namespace railsched {

struct ReportViolation {
    std::string family;            // onehot | passing | headway | rollingstock | overtake
    std::vector<TrainId> trains;
    std::string detail;
};

// Semantic view of one assignment.  Times are defined per (station, train)
// group exactly when one of its bits is on; the objective is defined only
// when every group is satisfied.  Strict feasibility means no violation at
// all, relaxed tolerates passing-time violations (and nothing else).
struct SolutionReport {
    std::map<StationTrain, Minutes> times;
    std::vector<ReportViolation> violations;
    bool feasible_strict = false;
    bool feasible_relaxed = false;
    std::optional<double> objective;
    std::map<std::pair<TrainId, Edge>, Minutes> passing_times;   // travel minus stay
};

SolutionReport decode(const Qubo& qubo, const Bits& bits);

// Inverse of decode for complete timetables; times outside the compiled
// windows are rejected.
Bits encode_times(const Qubo& qubo, const std::map<StationTrain, Minutes>& times);

// Same report built by checking a timetable directly against the instance
// (used for exact-solver output, where no bit encoding exists).
SolutionReport report_from_times(const Instance& instance,
                                 const std::map<StationTrain, Minutes>& times);

struct Histogram {
    double bin_width = 1.0;
    std::map<long, long> counts;   // bin index -> count, bin start = index * width
    bool empty_warning = false;    // set when no value contributed

    void add(double value, long weight = 1);
    long total() const;
};

// Weighted passing-time counts over the reports that pass the feasibility
// filter (strict by default, relaxed on request), for one directed edge.
Histogram passing_histogram(const std::vector<SolutionReport>& reports,
                            const Edge& edge, bool relaxed = false,
                            const std::vector<long>* weights = nullptr);

struct SpectrumSummary {
    long feasible_count = 0;
    long infeasible_count = 0;
    std::optional<double> min_feasible, max_feasible;
    std::optional<double> min_infeasible, max_infeasible;
    std::optional<double> gap;            // min_infeasible - max_feasible
    std::string regime;                   // "split" when gap > 0, else "overlapping"
    std::map<double, long> feasible_objectives;   // exact value -> degeneracy
    Histogram energy_histogram;
};

SpectrumSummary spectrum_summary(const std::vector<SpectrumEntry>& spectrum,
                                 const Qubo& qubo, double bin_width = 0.5);

// Count-weighted share of strictly (or relaxed) feasible samples.
double feasible_fraction(const SampleSet& set, const Qubo& qubo, bool relaxed = false);

enum class ScalingModel { Linear, Exponential };

struct ScalingFit {
    ScalingModel model = ScalingModel::Linear;
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;

    double predict(double x) const;
};

// Least squares on (x, y); the exponential model fits log(y) against x and
// therefore requires positive values.  Needs at least two distinct x.
ScalingFit fit_scaling(const std::vector<std::pair<double, double>>& points,
                       ScalingModel model);

// Arrival/departure table ordered by train and route position; refuses
// assignments whose choice groups are unsatisfied.
std::string export_train_diagram(const SolutionReport& report, const Instance& instance);

// Histogram CSV: "# bin_width W" then "bin_start,count" rows.
std::string write_histogram_csv(const Histogram& hist);
Histogram read_histogram_csv(const std::string& text);

// Total variation distance between two normalized histograms on the same
// bin width.
double total_variation(const Histogram& a, const Histogram& b);

} // namespace railsched
