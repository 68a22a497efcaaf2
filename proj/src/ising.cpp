#include "railsched/ising.hpp"

#include <sstream>

namespace railsched {

long IsingModel::coupling_count() const {
    long count = 0;
    for (const auto& [key, value] : couplings) {
        (void)key;
        if (value != 0.0) ++count;
    }
    return count;
}

IsingModel to_ising(const Qubo& qubo) {
    IsingModel m;
    m.n = qubo.n;
    m.fields.assign(qubo.n, 0.0);
    m.offset = qubo.offset;
    for (const auto& [key, value] : qubo.terms) {
        const auto [i, j] = key;
        if (i == j) {
            // c x_i = c (1 + s_i) / 2
            m.fields[i] += value / 2.0;
            m.offset += value / 2.0;
        } else {
            // 2 c x_i x_j = c (1 + s_i + s_j + s_i s_j) / 2
            m.couplings[key] += value / 2.0;
            m.fields[i] += value / 2.0;
            m.fields[j] += value / 2.0;
            m.offset += value / 2.0;
        }
    }
    return m;
}

double ising_energy(const IsingModel& model, const Spins& spins) {
    if (static_cast<int>(spins.size()) != model.n)
        throw ParameterError("spin vector length does not match the model");
    double e = model.offset;
    for (int i = 0; i < model.n; ++i) e += model.fields[i] * spins[i];
    for (const auto& [key, value] : model.couplings)
        e += value * spins[key.first] * spins[key.second];
    return e;
}

Spins spins_from_bits(const Bits& bits) {
    Spins s(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) s[i] = bits[i] ? 1 : -1;
    return s;
}

Bits bits_from_spins(const Spins& spins) {
    Bits b(spins.size());
    for (std::size_t i = 0; i < spins.size(); ++i) b[i] = spins[i] > 0 ? 1 : 0;
    return b;
}

std::string write_ising(const IsingModel& model) {
    std::ostringstream out;
    out << "nvars " << model.n << " offset " << format_coeff(model.offset) << "\n";
    for (int i = 0; i < model.n; ++i)
        if (model.fields[i] != 0.0)
            out << "h " << i << ' ' << format_coeff(model.fields[i]) << "\n";
    for (const auto& [key, value] : model.couplings)
        if (value != 0.0)
            out << "J " << key.first << ' ' << key.second << ' ' << format_coeff(value)
                << "\n";
    return out.str();
}

IsingModel read_ising(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    IsingModel m;
    bool header = false;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream row(line);
        if (!header) {
            std::string k1, k2;
            if (!(row >> k1 >> m.n >> k2 >> m.offset) || k1 != "nvars" || k2 != "offset")
                throw ParseError("ising line " + std::to_string(lineno) +
                                 ": expected 'nvars N offset F'");
            m.fields.assign(m.n, 0.0);
            header = true;
            continue;
        }
        std::string kind;
        row >> kind;
        if (kind == "h") {
            int i;
            double value;
            if (!(row >> i >> value) || i < 0 || i >= m.n)
                throw ParseError("ising line " + std::to_string(lineno) + ": bad h entry");
            m.fields[i] += value;
        } else if (kind == "J") {
            int i, j;
            double value;
            if (!(row >> i >> j >> value) || i < 0 || j < 0 || i >= m.n || j >= m.n ||
                i == j)
                throw ParseError("ising line " + std::to_string(lineno) + ": bad J entry");
            m.couplings[{std::min(i, j), std::max(i, j)}] += value;
        } else {
            throw ParseError("ising line " + std::to_string(lineno) +
                             ": expected 'h' or 'J'");
        }
    }
    if (!header) throw ParseError("ising document has no header line");
    return m;
}

} // namespace railsched
