#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "railsched/network.hpp"

namespace railsched {

// Assignment of the binary variables, one byte per bit, catalog order.
using Bits = std::vector<std::uint8_t>;

std::string bits_to_string(const Bits& bits);
Bits bits_from_string(const std::string& text);

// Where a coefficient came from; a merged entry carries several flags.
enum TermFamily : std::uint8_t {
    kTermOneHot = 1,
    kTermPassing = 2,
    kTermHeadway = 4,
    kTermRollingStock = 8,
    kTermObjective = 16,
};

struct PenaltyConfig {
    double p_sum = 4.0;    // weight of the choose-exactly-one groups
    double p_pair = 2.0;   // weight of each forbidden time combination
    std::string regime = "overlapping";

    // Penalties low enough that feasible and infeasible spectra overlap.
    static PenaltyConfig overlapping() { return {4.0, 2.0, "overlapping"}; }
    // Penalties high enough to push every infeasible state above the
    // feasible band.
    static PenaltyConfig split() { return {40.0, 20.0, "split"}; }
};

// One binary variable: "train arrives at station at minute time".
struct VarKey {
    StationId station;
    TrainId train = 0;
    Minutes time = 0;
};

// Variables of one (station, train) choice group occupy the contiguous
// catalog range [first, first + count); their times are lo .. lo+count-1.
struct VarGroup {
    StationId station;
    TrainId train = 0;
    Minutes lo = 0;
    int first = 0;
    int count = 0;
    Minutes nominal = 0;
};

struct VarCatalog {
    std::vector<VarKey> entries;   // train-major, route order, time ascending
    std::vector<VarGroup> groups;  // same major order
    std::map<StationTrain, int> group_index;

    int size() const { return static_cast<int>(entries.size()); }
    // Index of x_{station,train,time}, or -1 when outside the window.
    int find(const StationId& s, TrainId j, Minutes t) const;
    const VarGroup* group_of(const StationId& s, TrainId j) const;
};

VarCatalog build_catalog(const Instance& instance, const TimeWindows& windows);

// Coefficients are stored once per unordered pair (i <= j); evaluation counts
// off-diagonal entries twice, matching a full symmetric coefficient matrix.
using TermKey = std::pair<int, int>;
using TermMap = std::map<TermKey, double>;

struct OneHotTerms {
    TermMap terms;
    double offset = 0.0;   // +p_sum per group, so satisfied groups cost 0
};

OneHotTerms encode_one_hot(const VarCatalog& catalog, double p_sum);
TermMap encode_passing(const VarCatalog& catalog, const Instance& instance, double p_pair);
TermMap encode_headway(const VarCatalog& catalog, const Instance& instance, double p_pair);
TermMap encode_rollingstock(const VarCatalog& catalog, const Instance& instance,
                            double p_pair);
// Diagonal delay costs (t - nominal) / d_max; rejects d_max = 0 instances,
// which only the exact solver can handle.
TermMap encode_objective(const VarCatalog& catalog, const Instance& instance);

struct Qubo {
    int n = 0;
    TermMap terms;
    std::map<TermKey, std::uint8_t> provenance;
    double offset = 0.0;
    VarCatalog catalog;
    std::vector<double> objective_diag;   // pure delay cost per variable
    Minutes station_stay = 1;
    PenaltyConfig penalties;

    // Full-symmetric-matrix element count of one family: diagonal entries
    // count once, off-diagonal entries twice.
    long element_count(TermFamily family) const;
    // Sum of the four constraint families' element counts.
    long constraint_element_count() const;
    long distinct_nonzero_count() const;
    bool has_decode_context() const { return !catalog.entries.empty(); }
};

Qubo assemble(const Instance& instance, const TimeWindows& windows,
              const PenaltyConfig& penalties);

double evaluate(const Qubo& qubo, const Bits& bits);

// Text formats.  QUBO: header "nvars N offset F", then "i j coeff tag" lines
// (12 significant digits, tags joined with '+').  Catalog sidecar: one
// "index station train time" line per variable.
std::string write_qubo(const Qubo& qubo);
Qubo read_qubo(const std::string& text);
std::string write_catalog(const VarCatalog& catalog);
VarCatalog read_catalog(const std::string& text);

// Deterministic 12-significant-digit rendering used by all text formats.
std::string format_coeff(double value);

} // namespace railsched
