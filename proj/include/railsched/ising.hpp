#pragma once

#include "railsched/qubo.hpp"

namespace railsched {

using Spins = std::vector<std::int8_t>;   // entries are +1 / -1

// H(s) = sum_{i<j} J_ij s_i s_j + sum_i h_i s_i + offset, each coupling
// applied once.  Exactly equal to the source QUBO energy under s = 2x - 1.
struct IsingModel {
    int n = 0;
    std::vector<double> fields;           // h
    std::map<TermKey, double> couplings;  // J, keys i < j
    double offset = 0.0;

    long coupling_count() const;          // nonzero J entries
};

IsingModel to_ising(const Qubo& qubo);
double ising_energy(const IsingModel& model, const Spins& spins);

Spins spins_from_bits(const Bits& bits);
Bits bits_from_spins(const Spins& spins);

// Text format: header "nvars N offset F", then "h i value" and "J i j value"
// lines (zero entries omitted, 12 significant digits).
std::string write_ising(const IsingModel& model);
IsingModel read_ising(const std::string& text);

} // namespace railsched
