#include "railsched/qubo.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace railsched {

std::string bits_to_string(const Bits& bits) {
    std::string s(bits.size(), '0');
    for (std::size_t i = 0; i < bits.size(); ++i)
        if (bits[i]) s[i] = '1';
    return s;
}

Bits bits_from_string(const std::string& text) {
    Bits bits(text.size(), 0);
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] == '1') bits[i] = 1;
        else if (text[i] != '0') throw ParseError("bit string contains '" +
                                                  std::string(1, text[i]) + "'");
    }
    return bits;
}

std::string format_coeff(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", value);
    return buf;
}

int VarCatalog::find(const StationId& s, TrainId j, Minutes t) const {
    auto it = group_index.find({s, j});
    if (it == group_index.end()) return -1;
    const VarGroup& g = groups[it->second];
    if (t < g.lo || t >= g.lo + g.count) return -1;
    return g.first + (t - g.lo);
}

const VarGroup* VarCatalog::group_of(const StationId& s, TrainId j) const {
    auto it = group_index.find({s, j});
    return it == group_index.end() ? nullptr : &groups[it->second];
}

VarCatalog build_catalog(const Instance& instance, const TimeWindows& windows) {
    VarCatalog cat;
    for (const Train& train : instance.trains) {
        for (const StationId& s : train.route) {
            VarGroup g;
            g.station = s;
            g.train = train.id;
            g.lo = windows.lo(s, train.id);
            g.count = windows.hi(s, train.id) - g.lo + 1;
            g.first = cat.size();
            g.nominal = train.nominal_arrivals.at(s);
            cat.group_index[{s, train.id}] = static_cast<int>(cat.groups.size());
            for (Minutes t = g.lo; t < g.lo + g.count; ++t)
                cat.entries.push_back({s, train.id, t});
            cat.groups.push_back(g);
        }
    }
    return cat;
}

namespace {

void add_term(TermMap& terms, int i, int j, double value) {
    if (i > j) std::swap(i, j);
    terms[{i, j}] += value;
}

} // namespace

OneHotTerms encode_one_hot(const VarCatalog& catalog, double p_sum) {
    if (p_sum <= 0) throw ParameterError("p_sum must be positive");
    OneHotTerms out;
    for (const VarGroup& g : catalog.groups) {
        out.offset += p_sum;
        for (int a = g.first; a < g.first + g.count; ++a) {
            add_term(out.terms, a, a, -p_sum);
            for (int b = a + 1; b < g.first + g.count; ++b)
                add_term(out.terms, a, b, p_sum);
        }
    }
    return out;
}

TermMap encode_passing(const VarCatalog& catalog, const Instance& instance,
                       double p_pair) {
    if (p_pair <= 0) throw ParameterError("p_pair must be positive");
    TermMap out;
    const Minutes stay = instance.params.station_stay_min;
    for (const Train& train : instance.trains) {
        for (std::size_t k = 0; k + 1 < train.route.size(); ++k) {
            const VarGroup* a = catalog.group_of(train.route[k], train.id);
            const VarGroup* b = catalog.group_of(train.route[k + 1], train.id);
            if (!a || !b) continue;
            Minutes gap = stay + instance.params.pass(train.route[k], train.route[k + 1]);
            for (Minutes t = a->lo; t < a->lo + a->count; ++t)
                for (Minutes u = b->lo; u < b->lo + b->count; ++u)
                    if (u < t + gap)
                        add_term(out, a->first + (t - a->lo), b->first + (u - b->lo),
                                 p_pair);
        }
    }
    return out;
}

TermMap encode_headway(const VarCatalog& catalog, const Instance& instance,
                       double p_pair) {
    if (p_pair <= 0) throw ParameterError("p_pair must be positive");
    TermMap out;
    const Minutes h = instance.params.headway_min;
    std::set<std::pair<int, int>> seen;
    for (const auto& [station, pairs] : instance.headway_pairs) {
        for (const auto& [j, j2] : pairs) {
            const VarGroup* a = catalog.group_of(station, j);
            const VarGroup* b = catalog.group_of(station, j2);
            if (!a || !b) continue;
            if (!seen.insert({std::min(a->first, b->first), std::max(a->first, b->first)})
                     .second)
                continue;
            for (Minutes t = a->lo; t < a->lo + a->count; ++t)
                for (Minutes u = b->lo; u < b->lo + b->count; ++u)
                    if (std::abs(t - u) < h)
                        add_term(out, a->first + (t - a->lo), b->first + (u - b->lo),
                                 p_pair);
        }
    }
    return out;
}

TermMap encode_rollingstock(const VarCatalog& catalog, const Instance& instance,
                            double p_pair) {
    if (p_pair <= 0) throw ParameterError("p_pair must be positive");
    TermMap out;
    const Minutes gap = instance.params.preparation_min + instance.params.station_stay_min;
    for (const auto& [station, pairs] : instance.rollingstock_pairs) {
        for (const auto& [j, j2] : pairs) {
            const VarGroup* a = catalog.group_of(station, j);
            const VarGroup* b = catalog.group_of(station, j2);
            if (!a || !b) continue;
            for (Minutes t = a->lo; t < a->lo + a->count; ++t)
                for (Minutes u = b->lo; u < b->lo + b->count; ++u)
                    if (u < t + gap)
                        add_term(out, a->first + (t - a->lo), b->first + (u - b->lo),
                                 p_pair);
        }
    }
    return out;
}

TermMap encode_objective(const VarCatalog& catalog, const Instance& instance) {
    if (instance.d_max == 0)
        throw ParameterError(
            "d_max = 0 leaves no timing freedom to encode; use the exact solver");
    TermMap out;
    for (const VarGroup& g : catalog.groups) {
        if (!instance.objective_stations.count(g.station)) continue;
        for (int k = 0; k < g.count; ++k)
            add_term(out, g.first + k, g.first + k,
                     static_cast<double>(g.lo + k - g.nominal) / instance.d_max);
    }
    return out;
}

Qubo assemble(const Instance& instance, const TimeWindows& windows,
              const PenaltyConfig& penalties) {
    Qubo q;
    q.catalog = build_catalog(instance, windows);
    q.n = q.catalog.size();
    q.station_stay = instance.params.station_stay_min;
    q.penalties = penalties;

    auto merge = [&q](const TermMap& terms, TermFamily family) {
        for (const auto& [key, value] : terms) {
            q.terms[key] += value;
            q.provenance[key] |= family;
        }
    };

    OneHotTerms one_hot = encode_one_hot(q.catalog, penalties.p_sum);
    merge(one_hot.terms, kTermOneHot);
    q.offset = one_hot.offset;
    merge(encode_passing(q.catalog, instance, penalties.p_pair), kTermPassing);
    merge(encode_headway(q.catalog, instance, penalties.p_pair), kTermHeadway);
    merge(encode_rollingstock(q.catalog, instance, penalties.p_pair), kTermRollingStock);

    TermMap objective = encode_objective(q.catalog, instance);
    merge(objective, kTermObjective);
    q.objective_diag.assign(q.n, 0.0);
    for (const auto& [key, value] : objective) q.objective_diag[key.first] = value;
    return q;
}

double evaluate(const Qubo& qubo, const Bits& bits) {
    if (static_cast<int>(bits.size()) != qubo.n)
        throw ParameterError("bit vector length does not match the model");
    double e = qubo.offset;
    for (const auto& [key, value] : qubo.terms) {
        if (!bits[key.first] || !bits[key.second]) continue;
        e += key.first == key.second ? value : 2.0 * value;
    }
    return e;
}

long Qubo::element_count(TermFamily family) const {
    long count = 0;
    for (const auto& [key, mask] : provenance)
        if (mask & family) count += key.first == key.second ? 1 : 2;
    return count;
}

long Qubo::constraint_element_count() const {
    return element_count(kTermOneHot) + element_count(kTermPassing) +
           element_count(kTermHeadway) + element_count(kTermRollingStock);
}

long Qubo::distinct_nonzero_count() const {
    long count = 0;
    for (const auto& [key, value] : terms) {
        (void)key;
        if (value != 0.0) ++count;
    }
    return count;
}

// ---------------------------------------------------------------------------
// Text formats

namespace {

const std::pair<TermFamily, const char*> kFamilyNames[] = {
    {kTermOneHot, "onehot"},         {kTermPassing, "passing"},
    {kTermHeadway, "headway"},       {kTermRollingStock, "rollingstock"},
    {kTermObjective, "objective"},
};

std::string tag_of(std::uint8_t mask) {
    std::string tag;
    for (const auto& [family, name] : kFamilyNames) {
        if (!(mask & family)) continue;
        if (!tag.empty()) tag += '+';
        tag += name;
    }
    return tag.empty() ? "untagged" : tag;
}

std::uint8_t mask_of(const std::string& tag) {
    std::uint8_t mask = 0;
    std::size_t start = 0;
    while (start <= tag.size()) {
        std::size_t end = tag.find('+', start);
        if (end == std::string::npos) end = tag.size();
        std::string part = tag.substr(start, end - start);
        bool known = false;
        for (const auto& [family, name] : kFamilyNames)
            if (part == name) {
                mask |= family;
                known = true;
            }
        if (!known && part != "untagged")
            throw ParseError("unknown term tag '" + part + "'");
        start = end + 1;
        if (end == tag.size()) break;
    }
    return mask;
}

} // namespace

std::string write_qubo(const Qubo& qubo) {
    std::ostringstream out;
    out << "nvars " << qubo.n << " offset " << format_coeff(qubo.offset) << "\n";
    for (const auto& [key, value] : qubo.terms) {
        auto prov = qubo.provenance.find(key);
        out << key.first << ' ' << key.second << ' ' << format_coeff(value) << ' '
            << tag_of(prov == qubo.provenance.end() ? 0 : prov->second) << "\n";
    }
    return out.str();
}

Qubo read_qubo(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    Qubo q;
    bool header = false;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream row(line);
        if (!header) {
            std::string k1, k2;
            if (!(row >> k1 >> q.n >> k2 >> q.offset) || k1 != "nvars" || k2 != "offset")
                throw ParseError("qubo line " + std::to_string(lineno) +
                                 ": expected 'nvars N offset F'");
            header = true;
            continue;
        }
        int i, j;
        double value;
        std::string tag;
        if (!(row >> i >> j >> value >> tag))
            throw ParseError("qubo line " + std::to_string(lineno) +
                             ": expected 'i j coeff tag'");
        if (i < 0 || j < 0 || i >= q.n || j >= q.n)
            throw ParseError("qubo line " + std::to_string(lineno) +
                             ": index outside nvars");
        TermKey key{std::min(i, j), std::max(i, j)};
        q.terms[key] += value;
        q.provenance[key] |= mask_of(tag);
    }
    if (!header) throw ParseError("qubo document has no header line");
    return q;
}

std::string write_catalog(const VarCatalog& catalog) {
    std::ostringstream out;
    for (std::size_t i = 0; i < catalog.entries.size(); ++i) {
        const VarKey& k = catalog.entries[i];
        out << i << ' ' << k.station << ' ' << k.train << ' ' << k.time << "\n";
    }
    return out.str();
}

VarCatalog read_catalog(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    VarCatalog cat;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream row(line);
        std::size_t index;
        VarKey key;
        if (!(row >> index >> key.station >> key.train >> key.time))
            throw ParseError("catalog line " + std::to_string(lineno) +
                             ": expected 'index station train time'");
        if (index != cat.entries.size())
            throw ParseError("catalog line " + std::to_string(lineno) +
                             ": indices must be dense and ascending");
        cat.entries.push_back(key);
    }
    // rebuild the group structure from consecutive (station, train) runs
    for (int i = 0; i < cat.size(); ++i) {
        const VarKey& k = cat.entries[i];
        if (!cat.groups.empty()) {
            VarGroup& g = cat.groups.back();
            if (g.station == k.station && g.train == k.train) {
                if (k.time != g.lo + g.count)
                    throw ParseError("catalog group " + k.station + "/" +
                                     std::to_string(k.train) +
                                     " has non-contiguous times");
                ++g.count;
                continue;
            }
        }
        if (cat.group_index.count({k.station, k.train}))
            throw ParseError("catalog group " + k.station + "/" +
                             std::to_string(k.train) + " is split");
        cat.group_index[{k.station, k.train}] = static_cast<int>(cat.groups.size());
        cat.groups.push_back({k.station, k.train, k.time, i, 1, 0});
    }
    return cat;
}

} // namespace railsched
