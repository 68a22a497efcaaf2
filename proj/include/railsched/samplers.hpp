#pragma once

#include <cstdint>
#include <optional>

#include "railsched/ising.hpp"
#include "railsched/qubo.hpp"

namespace railsched {

struct SampleRecord {
    Bits bits;
    double energy = 0.0;
    long count = 0;
};

// Aggregated sampler output; identical bitstrings are merged and records are
// sorted by (energy, bits), so equal-seed runs serialize identically.
struct SampleSet {
    std::vector<SampleRecord> records;
    long shots = 0;
    std::string backend;
    std::uint64_t seed = 0;
    std::map<std::string, std::string> meta;

    const SampleRecord* best() const;   // lowest energy, null when empty
};

struct SpectrumEntry {
    Bits bits;
    double energy = 0.0;
};

// All 2^n assignments sorted by energy (ties by state index).  Rejects
// n > max_vars; larger models belong to the sampling backends.
std::vector<SpectrumEntry> enumerate_spectrum(const Qubo& qubo, int max_vars = 24);

// The enumerator packaged as a sampler: the `top` lowest-energy states,
// one count each.
SampleSet enumerate_samples(const Qubo& qubo, long top = 1000, int max_vars = 24);

struct AnnealConfig {
    long shots = 1000;
    int sweeps = 1000;        // full Metropolis passes; the anneal length
    double beta_min = 0.1;    // geometric inverse-temperature ramp
    double beta_max = 5.0;
    std::uint64_t seed = 0;
    int threads = 1;          // shots use independent streams, so the
                              // aggregate is identical for any thread count
};

// Metropolis annealer; every shot is an independent geometric-cooling run
// reporting the lowest-energy state it visited.
SampleSet simulated_anneal(const IsingModel& model, const AnnealConfig& config);

struct OptimizerConfig {
    std::string method = "pattern-search";   // derivative-free coordinate search
    int max_evals = 50;
    int restarts = 3;
    double initial_step = 0.5;
    double min_step = 0.01;
};

struct QaoaConfig {
    int layers = 1;
    long shots = 1024;
    double noise_lambda = 0.0;   // depolarizing weight on the uniform mixture
    OptimizerConfig optimizer;
    std::uint64_t seed = 0;
    int max_vars = 20;
};

// Energy expectation of the depth-|gammas| alternating-operator circuit
// (cost phases from the Ising diagonal, transverse-field mixer), computed on
// a full statevector.  Basis convention: bit i of the state index is x_i.
double qaoa_expectation(const IsingModel& model, const std::vector<double>& gammas,
                        const std::vector<double>& betas, int max_vars = 20);

// Optimize the angles under the evaluation budget, then draw shots from
// (1 - lambda) |psi|^2 + lambda * uniform.  Meta records evaluations used,
// the best expectation and a warning flag when the budget ran out mid-search.
SampleSet qaoa_optimize_and_sample(const IsingModel& model, const QaoaConfig& config);

struct GateCounts {
    long single_qubit = 0;   // n basis preps + per layer one RZ and one RX per qubit
    long two_qubit = 0;      // one entangler per nonzero coupling per layer
};

GateCounts qaoa_gate_counts(const IsingModel& model, int layers);

// Depolarizing mixture weight 1 - (1 - error)^(two-qubit gate count).
double calibrated_noise_lambda(const IsingModel& model, int layers,
                               double two_qubit_error = 0.0425);

// CSV: "# key value" metadata lines, then "bits,energy,count" rows.
std::string write_samples(const SampleSet& set);
SampleSet read_samples(const std::string& text);

} // namespace railsched
