#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>

#include "railsched/rng.hpp"
#include "railsched/samplers.hpp"

namespace railsched {

namespace detail {
SampleSet aggregate_bits(std::vector<Bits> shots_bits, const IsingModel& model,
                         std::string backend, std::uint64_t seed);
}

namespace {

using Amplitude = std::complex<double>;

// Full-statevector simulation of the alternating-operator circuit: the cost
// layer is a diagonal phase exp(-i gamma E_z), the mixer a product of
// single-qubit X rotations exp(-i beta X).  Bit i of the basis index is x_i.
class CircuitSimulator {
  public:
    CircuitSimulator(const IsingModel& model, int max_vars) : n_(model.n) {
        if (n_ < 1) throw ParameterError("circuit needs at least one variable");
        if (n_ > max_vars)
            throw CapacityError("statevector over " + std::to_string(n_) +
                                " variables exceeds the cap of " +
                                std::to_string(max_vars));
        dim_ = std::size_t{1} << n_;
        energies_.resize(dim_);
        for (std::size_t z = 0; z < dim_; ++z) {
            double e = model.offset;
            for (int i = 0; i < n_; ++i)
                e += model.fields[i] * (z >> i & 1u ? 1.0 : -1.0);
            for (const auto& [key, value] : model.couplings)
                e += value * (z >> key.first & 1u ? 1.0 : -1.0) *
                     (z >> key.second & 1u ? 1.0 : -1.0);
            energies_[z] = e;
        }
        psi_.resize(dim_);
    }

    void run(const std::vector<double>& gammas, const std::vector<double>& betas) {
        if (gammas.empty() || gammas.size() != betas.size())
            throw ParameterError("need one gamma and one beta per layer");
        const double amp = 1.0 / std::sqrt(static_cast<double>(dim_));
        std::fill(psi_.begin(), psi_.end(), Amplitude(amp, 0.0));
        for (std::size_t layer = 0; layer < gammas.size(); ++layer) {
            apply_cost(gammas[layer]);
            apply_mixer(betas[layer]);
        }
    }

    double expectation() const {
        double e = 0.0;
        for (std::size_t z = 0; z < dim_; ++z) e += std::norm(psi_[z]) * energies_[z];
        return e;
    }

    // |psi|^2 mixed with the uniform distribution.
    std::vector<double> probabilities(double noise_lambda) const {
        std::vector<double> p(dim_);
        const double uniform = 1.0 / static_cast<double>(dim_);
        for (std::size_t z = 0; z < dim_; ++z)
            p[z] = (1.0 - noise_lambda) * std::norm(psi_[z]) + noise_lambda * uniform;
        return p;
    }

    int qubits() const { return n_; }
    std::size_t dimension() const { return dim_; }

  private:
    void apply_cost(double gamma) {
        for (std::size_t z = 0; z < dim_; ++z)
            psi_[z] *= std::polar(1.0, -gamma * energies_[z]);
    }

    void apply_mixer(double beta) {
        const double c = std::cos(beta);
        const Amplitude is(0.0, std::sin(beta));
        for (int q = 0; q < n_; ++q) {
            const std::size_t bit = std::size_t{1} << q;
            for (std::size_t base = 0; base < dim_; ++base) {
                if (base & bit) continue;
                const Amplitude a = psi_[base];
                const Amplitude b = psi_[base | bit];
                psi_[base] = c * a - is * b;
                psi_[base | bit] = c * b - is * a;
            }
        }
    }

    int n_;
    std::size_t dim_;
    std::vector<double> energies_;
    std::vector<Amplitude> psi_;
};

} // namespace

double qaoa_expectation(const IsingModel& model, const std::vector<double>& gammas,
                        const std::vector<double>& betas, int max_vars) {
    CircuitSimulator sim(model, max_vars);
    sim.run(gammas, betas);
    return sim.expectation();
}

GateCounts qaoa_gate_counts(const IsingModel& model, int layers) {
    if (layers < 1) throw ParameterError("layers must be at least 1");
    GateCounts g;
    g.single_qubit = static_cast<long>(model.n) * (1 + 2 * layers);
    g.two_qubit = model.coupling_count() * layers;
    return g;
}

double calibrated_noise_lambda(const IsingModel& model, int layers,
                               double two_qubit_error) {
    if (!(two_qubit_error >= 0.0 && two_qubit_error <= 1.0))
        throw ParameterError("two_qubit_error must lie in [0, 1]");
    GateCounts g = qaoa_gate_counts(model, layers);
    return 1.0 - std::pow(1.0 - two_qubit_error, static_cast<double>(g.two_qubit));
}

SampleSet qaoa_optimize_and_sample(const IsingModel& model, const QaoaConfig& config) {
    if (config.layers < 1) throw ParameterError("layers must be at least 1");
    if (config.shots < 1) throw ParameterError("shots must be at least 1");
    if (!(config.noise_lambda >= 0.0 && config.noise_lambda <= 1.0))
        throw ParameterError("noise_lambda must lie in [0, 1]");
    if (config.optimizer.max_evals < 1)
        throw ParameterError("optimizer budget must be at least 1");

    CircuitSimulator sim(model, config.max_vars);
    auto rng = make_rng(config.seed, 0x616e676c65);

    const int p = config.layers;
    const int dims = 2 * p;                     // gammas then betas
    std::vector<double> best_angles(dims, 0.0);
    double best_value = std::numeric_limits<double>::infinity();
    int evals = 0;
    bool budget_hit = false;

    auto evaluate_angles = [&](const std::vector<double>& angles) {
        std::vector<double> gammas(angles.begin(), angles.begin() + p);
        std::vector<double> betas(angles.begin() + p, angles.end());
        sim.run(gammas, betas);
        ++evals;
        return sim.expectation();
    };

    // Coordinate pattern search with random restarts.  The all-zero point is
    // a plateau of this landscape (both axis directions leave the expectation
    // unchanged), so every restart starts from a random interior point.
    for (int restart = 0; restart < config.optimizer.restarts; ++restart) {
        if (evals >= config.optimizer.max_evals) {
            budget_hit = true;
            break;
        }
        std::vector<double> angles(dims);
        for (int d = 0; d < dims; ++d)
            angles[d] = next_double(rng) * (d < p ? 2.0 * M_PI : M_PI);
        double value = evaluate_angles(angles);
        if (value < best_value) {
            best_value = value;
            best_angles = angles;
        }

        double step = config.optimizer.initial_step;
        while (step >= config.optimizer.min_step) {
            if (evals >= config.optimizer.max_evals) {
                budget_hit = true;
                break;
            }
            bool improved = false;
            for (int d = 0; d < dims && evals < config.optimizer.max_evals; ++d) {
                for (double sign : {+1.0, -1.0}) {
                    if (evals >= config.optimizer.max_evals) break;
                    std::vector<double> trial = angles;
                    trial[d] += sign * step;
                    double trial_value = evaluate_angles(trial);
                    if (trial_value < value) {
                        value = trial_value;
                        angles = trial;
                        improved = true;
                        break;
                    }
                }
            }
            if (value < best_value) {
                best_value = value;
                best_angles = angles;
            }
            if (!improved) step *= 0.5;
        }
    }

    // Re-prepare the best state and draw shots from the noisy distribution.
    std::vector<double> gammas(best_angles.begin(), best_angles.begin() + p);
    std::vector<double> betas(best_angles.begin() + p, best_angles.end());
    sim.run(gammas, betas);
    std::vector<double> probs = sim.probabilities(config.noise_lambda);
    std::vector<double> cdf(probs.size());
    std::partial_sum(probs.begin(), probs.end(), cdf.begin());
    const double total = cdf.back();

    std::vector<Bits> drawn;
    drawn.reserve(config.shots);
    for (long shot = 0; shot < config.shots; ++shot) {
        const double u = next_double(rng) * total;
        std::size_t z = std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin();
        if (z >= probs.size()) z = probs.size() - 1;
        Bits bits(sim.qubits(), 0);
        for (int i = 0; i < sim.qubits(); ++i) bits[i] = z >> i & 1u;
        drawn.push_back(std::move(bits));
    }

    SampleSet set = detail::aggregate_bits(std::move(drawn), model, "qaoa", config.seed);
    set.meta["layers"] = std::to_string(config.layers);
    set.meta["noise_lambda"] = format_coeff(config.noise_lambda);
    set.meta["optimizer"] = config.optimizer.method;
    set.meta["evaluations"] = std::to_string(evals);
    set.meta["expectation"] = format_coeff(best_value);
    set.meta["budget_exhausted"] = budget_hit ? "1" : "0";
    return set;
}

} // namespace railsched
