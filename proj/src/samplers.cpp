#include "railsched/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>
#include <sstream>

#include "railsched/rng.hpp"

namespace railsched {

const SampleRecord* SampleSet::best() const {
    return records.empty() ? nullptr : &records.front();
}

namespace {

// Flat term arrays; much faster than walking the std::map per state.
struct FlatQubo {
    int n;
    std::vector<double> diag;
    std::vector<std::tuple<int, int, double>> off;   // i < j, applied twice
    double offset;

    explicit FlatQubo(const Qubo& q) : n(q.n), diag(q.n, 0.0), offset(q.offset) {
        for (const auto& [key, value] : q.terms) {
            if (key.first == key.second) diag[key.first] = value;
            else off.push_back({key.first, key.second, value});
        }
    }

    double energy(std::uint32_t z) const {
        double e = offset;
        for (int i = 0; i < n; ++i)
            if (z >> i & 1u) e += diag[i];
        for (const auto& [i, j, v] : off)
            if ((z >> i & 1u) && (z >> j & 1u)) e += 2.0 * v;
        return e;
    }
};

Bits unpack(std::uint32_t z, int n) {
    Bits bits(n, 0);
    for (int i = 0; i < n; ++i) bits[i] = z >> i & 1u;
    return bits;
}

SampleSet aggregate(std::vector<Bits> shots_bits, const IsingModel& model,
                    std::string backend, std::uint64_t seed) {
    std::map<Bits, long> counted;
    for (Bits& b : shots_bits) counted[std::move(b)] += 1;

    SampleSet set;
    set.backend = std::move(backend);
    set.seed = seed;
    set.shots = static_cast<long>(shots_bits.size());
    for (auto& [bits, count] : counted) {
        SampleRecord rec;
        rec.energy = ising_energy(model, spins_from_bits(bits));
        rec.bits = bits;
        rec.count = count;
        set.records.push_back(std::move(rec));
    }
    std::sort(set.records.begin(), set.records.end(),
              [](const SampleRecord& a, const SampleRecord& b) {
                  if (a.energy != b.energy) return a.energy < b.energy;
                  return a.bits < b.bits;
              });
    return set;
}

} // namespace

std::vector<SpectrumEntry> enumerate_spectrum(const Qubo& qubo, int max_vars) {
    if (qubo.n > max_vars)
        throw CapacityError("exhaustive enumeration over " + std::to_string(qubo.n) +
                            " variables exceeds the cap of " + std::to_string(max_vars) +
                            "; use the annealing or circuit sampler instead");
    if (qubo.n < 0 || qubo.n > 31) throw CapacityError("variable count out of range");

    const FlatQubo flat(qubo);
    const std::uint64_t dim = 1ull << qubo.n;
    std::vector<double> energies(dim);
    for (std::uint64_t z = 0; z < dim; ++z)
        energies[z] = flat.energy(static_cast<std::uint32_t>(z));

    std::vector<std::uint32_t> order(dim);
    std::iota(order.begin(), order.end(), 0u);
    std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        return energies[a] < energies[b];
    });

    std::vector<SpectrumEntry> out;
    out.reserve(dim);
    for (std::uint32_t z : order) out.push_back({unpack(z, qubo.n), energies[z]});
    return out;
}

SampleSet enumerate_samples(const Qubo& qubo, long top, int max_vars) {
    if (top < 1) throw ParameterError("top must be at least 1");
    std::vector<SpectrumEntry> spectrum = enumerate_spectrum(qubo, max_vars);
    SampleSet set;
    set.backend = "enumerate";
    long limit = std::min<long>(top, static_cast<long>(spectrum.size()));
    for (long k = 0; k < limit; ++k)
        set.records.push_back({spectrum[k].bits, spectrum[k].energy, 1});
    set.shots = limit;
    set.meta["top"] = std::to_string(top);
    return set;
}

SampleSet simulated_anneal(const IsingModel& model, const AnnealConfig& config) {
    if (config.shots < 1) throw ParameterError("shots must be at least 1");
    if (config.sweeps < 1) throw ParameterError("sweeps must be at least 1");
    if (!(config.beta_min > 0.0) || !(config.beta_min < config.beta_max))
        throw ParameterError("need 0 < beta_min < beta_max");
    if (config.threads < 1) throw ParameterError("threads must be at least 1");

    const int n = model.n;
    std::vector<std::vector<std::pair<int, double>>> adj(n);
    for (const auto& [key, value] : model.couplings) {
        if (value == 0.0) continue;
        adj[key.first].push_back({key.second, value});
        adj[key.second].push_back({key.first, value});
    }

    // Geometric ramp; sweep 0 runs at beta_min, the last sweep at beta_max.
    std::vector<double> betas(config.sweeps);
    const double ratio = config.beta_max / config.beta_min;
    for (int k = 0; k < config.sweeps; ++k)
        betas[k] = config.sweeps == 1
                       ? config.beta_max
                       : config.beta_min * std::pow(ratio, double(k) / (config.sweeps - 1));

    // Each shot reports the lowest-energy state seen anywhere along its
    // trajectory, not the final quench state: one-hot penalty walls block
    // basin hops long before the temperature can resolve sub-unit objective
    // differences, so the final state is near-arbitrary among the basins the
    // ramp happened to freeze into.
    auto run_shot = [&](long shot) {
        auto rng = make_rng(config.seed, static_cast<std::uint64_t>(shot));
        Spins s(n);
        for (int i = 0; i < n; ++i) s[i] = rng() & 1u ? 1 : -1;
        double energy = ising_energy(model, s);
        Spins best = s;
        double best_energy = energy;
        for (double beta : betas) {
            for (int i = 0; i < n; ++i) {
                double local = model.fields[i];
                for (const auto& [j, J] : adj[i]) local += J * s[j];
                const double delta = -2.0 * s[i] * local;
                if (delta <= 0.0 || next_double(rng) < std::exp(-beta * delta)) {
                    s[i] = -s[i];
                    energy += delta;
                    if (energy < best_energy - 1e-12) {
                        best_energy = energy;
                        best = s;
                    }
                }
            }
        }
        return bits_from_spins(best);
    };

    std::vector<Bits> results(config.shots);
    if (config.threads == 1) {
        for (long shot = 0; shot < config.shots; ++shot) results[shot] = run_shot(shot);
    } else {
        // Shots are independent seeded streams: identical output for any
        // thread count, threads only change wall time.
        std::vector<std::future<void>> tasks;
        const long chunk = (config.shots + config.threads - 1) / config.threads;
        for (int t = 0; t < config.threads; ++t) {
            const long begin = t * chunk;
            const long end = std::min(config.shots, begin + chunk);
            if (begin >= end) break;
            tasks.push_back(std::async(std::launch::async, [&, begin, end] {
                for (long shot = begin; shot < end; ++shot) results[shot] = run_shot(shot);
            }));
        }
        for (auto& task : tasks) task.get();
    }

    SampleSet set = aggregate(std::move(results), model, "anneal", config.seed);
    set.meta["sweeps"] = std::to_string(config.sweeps);
    set.meta["beta_min"] = format_coeff(config.beta_min);
    set.meta["beta_max"] = format_coeff(config.beta_max);
    return set;
}

// (the QAOA simulator lives in qaoa.cpp)

namespace detail {
SampleSet aggregate_bits(std::vector<Bits> shots_bits, const IsingModel& model,
                         std::string backend, std::uint64_t seed) {
    return aggregate(std::move(shots_bits), model, std::move(backend), seed);
}
} // namespace detail

std::string write_samples(const SampleSet& set) {
    std::ostringstream out;
    out << "# backend " << set.backend << "\n";
    out << "# seed " << set.seed << "\n";
    out << "# shots " << set.shots << "\n";
    for (const auto& [key, value] : set.meta) out << "# " << key << ' ' << value << "\n";
    out << "bits,energy,count\n";
    for (const SampleRecord& rec : set.records)
        out << bits_to_string(rec.bits) << ',' << format_coeff(rec.energy) << ','
            << rec.count << "\n";
    return out.str();
}

SampleSet read_samples(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    SampleSet set;
    bool header_seen = false;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream meta(line.substr(1));
            std::string key;
            if (!(meta >> key)) continue;
            std::string value;
            std::getline(meta, value);
            if (!value.empty() && value[0] == ' ') value.erase(0, 1);
            if (key == "backend") set.backend = value;
            else if (key == "seed") set.seed = std::stoull(value);
            else if (key == "shots") set.shots = std::stol(value);
            else set.meta[key] = value;
            continue;
        }
        if (!header_seen) {
            if (line != "bits,energy,count")
                throw ParseError("samples line " + std::to_string(lineno) +
                                 ": expected header 'bits,energy,count'");
            header_seen = true;
            continue;
        }
        std::istringstream row(line);
        std::string bits, energy, count;
        if (!std::getline(row, bits, ',') || !std::getline(row, energy, ',') ||
            !std::getline(row, count))
            throw ParseError("samples line " + std::to_string(lineno) +
                             ": expected 'bits,energy,count'");
        try {
            set.records.push_back(
                {bits_from_string(bits), std::stod(energy), std::stol(count)});
        } catch (const std::exception&) {
            throw ParseError("samples line " + std::to_string(lineno) +
                             ": malformed number");
        }
    }
    if (!header_seen) throw ParseError("samples document has no column header");
    return set;
}

} // namespace railsched
