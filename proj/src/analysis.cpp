#include "railsched/analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <sstream>

namespace railsched {

namespace {

// Precomputed structure shared by decode, spectrum classification and the
// feasibility fractions; building it once matters when classifying 2^n states.
class DecodeContext {
  public:
    explicit DecodeContext(const Qubo& qubo) : q_(qubo) {
        if (!qubo.has_decode_context())
            throw ConfigError("qubo carries no variable catalog; decode needs one");
        for (const auto& [key, mask] : qubo.provenance) {
            if (mask & kTermPassing) passing_.push_back(key);
            if (mask & kTermHeadway) headway_.push_back(key);
            if (mask & kTermRollingStock) rollingstock_.push_back(key);
        }

        // Trains in catalog order with their station sequences.
        std::vector<std::pair<TrainId, std::vector<int>>> trains;
        for (std::size_t g = 0; g < qubo.catalog.groups.size(); ++g) {
            const VarGroup& group = qubo.catalog.groups[g];
            if (trains.empty() || trains.back().first != group.train)
                trains.push_back({group.train, {}});
            trains.back().second.push_back(static_cast<int>(g));
        }
        for (std::size_t a = 0; a < trains.size(); ++a) {
            for (std::size_t b = a + 1; b < trains.size(); ++b) {
                const auto& ga = trains[a].second;
                const auto& gb = trains[b].second;
                for (std::size_t i = 0; i + 1 < ga.size(); ++i)
                    for (std::size_t k = 0; k + 1 < gb.size(); ++k) {
                        const auto& groups = qubo.catalog.groups;
                        if (groups[ga[i]].station == groups[gb[k]].station &&
                            groups[ga[i + 1]].station == groups[gb[k + 1]].station)
                            overtake_.push_back({ga[i], ga[i + 1], gb[k], gb[k + 1]});
                    }
            }
        }
    }

    // Arrival minute per group, or -1 when the group has != 1 bit set.
    std::vector<Minutes> group_times(const Bits& bits) const {
        const auto& groups = q_.catalog.groups;
        std::vector<Minutes> times(groups.size(), -1);
        for (std::size_t g = 0; g < groups.size(); ++g) {
            int on = 0, pos = -1;
            for (int k = 0; k < groups[g].count; ++k)
                if (bits[groups[g].first + k]) {
                    ++on;
                    pos = k;
                }
            if (on == 1) times[g] = groups[g].lo + pos;
        }
        return times;
    }

    struct Classification {
        bool one_hot_ok = false;
        bool strict = false;
        bool relaxed = false;
        double objective = 0.0;   // meaningful only when one_hot_ok
    };

    Classification classify(const Bits& bits) const {
        Classification c;
        std::vector<Minutes> times = group_times(bits);
        c.one_hot_ok =
            std::none_of(times.begin(), times.end(), [](Minutes t) { return t < 0; });
        bool passing_ok = !pair_active(bits, passing_);
        bool others_ok =
            !pair_active(bits, headway_) && !pair_active(bits, rollingstock_) &&
            !overtake_active(times);
        c.strict = c.one_hot_ok && passing_ok && others_ok;
        c.relaxed = c.one_hot_ok && others_ok;
        if (c.one_hot_ok)
            for (int i = 0; i < q_.n; ++i)
                if (bits[i]) c.objective += q_.objective_diag[i];
        return c;
    }

    const Qubo& qubo() const { return q_; }

    bool pair_active(const Bits& bits, const std::vector<TermKey>& pairs) const {
        for (const auto& [i, j] : pairs)
            if (bits[i] && bits[j]) return true;
        return false;
    }

    bool overtake_active(const std::vector<Minutes>& times) const {
        for (const auto& quad : overtake_) {
            Minutes a1 = times[quad[0]], a2 = times[quad[1]];
            Minutes b1 = times[quad[2]], b2 = times[quad[3]];
            if (a1 < 0 || a2 < 0 || b1 < 0 || b2 < 0) continue;
            if (a1 == b1 || a2 == b2) continue;
            if ((a1 < b1) != (a2 < b2)) return true;
        }
        return false;
    }

    const std::vector<TermKey>& passing_pairs() const { return passing_; }
    const std::vector<TermKey>& headway_pairs() const { return headway_; }
    const std::vector<TermKey>& rollingstock_pairs() const { return rollingstock_; }
    const std::vector<std::array<int, 4>>& overtake_quads() const { return overtake_; }

  private:
    const Qubo& q_;
    std::vector<TermKey> passing_, headway_, rollingstock_;
    std::vector<std::array<int, 4>> overtake_;
};

std::string var_name(const Qubo& q, int i) {
    const VarKey& k = q.catalog.entries[i];
    return "train " + std::to_string(k.train) + " at " + k.station + " t=" +
           std::to_string(k.time);
}

void collect_pair_violations(const Qubo& q, const Bits& bits,
                             const std::vector<TermKey>& pairs,
                             const std::string& family,
                             std::vector<ReportViolation>& out) {
    for (const auto& [i, j] : pairs) {
        if (!bits[i] || !bits[j]) continue;
        ReportViolation v;
        v.family = family;
        v.trains = {q.catalog.entries[i].train, q.catalog.entries[j].train};
        std::sort(v.trains.begin(), v.trains.end());
        v.trains.erase(std::unique(v.trains.begin(), v.trains.end()), v.trains.end());
        v.detail = var_name(q, i) + " conflicts with " + var_name(q, j);
        out.push_back(std::move(v));
    }
}

} // namespace

SolutionReport decode(const Qubo& qubo, const Bits& bits) {
    if (static_cast<int>(bits.size()) != qubo.n)
        throw ParameterError("bit vector length does not match the model");
    DecodeContext ctx(qubo);
    SolutionReport report;

    const auto& groups = qubo.catalog.groups;
    std::vector<Minutes> times = ctx.group_times(bits);
    for (std::size_t g = 0; g < groups.size(); ++g) {
        if (times[g] >= 0) {
            report.times[{groups[g].station, groups[g].train}] = times[g];
        } else {
            ReportViolation v;
            v.family = "onehot";
            v.trains = {groups[g].train};
            v.detail = "group " + groups[g].station + "/" +
                       std::to_string(groups[g].train) + " does not pick exactly one time";
            report.violations.push_back(std::move(v));
        }
    }

    collect_pair_violations(qubo, bits, ctx.passing_pairs(), "passing", report.violations);
    collect_pair_violations(qubo, bits, ctx.headway_pairs(), "headway", report.violations);
    collect_pair_violations(qubo, bits, ctx.rollingstock_pairs(), "rollingstock",
                            report.violations);

    for (const auto& quad : ctx.overtake_quads()) {
        Minutes a1 = times[quad[0]], a2 = times[quad[1]];
        Minutes b1 = times[quad[2]], b2 = times[quad[3]];
        if (a1 < 0 || a2 < 0 || b1 < 0 || b2 < 0) continue;
        if (a1 == b1 || a2 == b2) continue;
        if ((a1 < b1) != (a2 < b2)) {
            ReportViolation v;
            v.family = "overtake";
            v.trains = {groups[quad[0]].train, groups[quad[2]].train};
            std::sort(v.trains.begin(), v.trains.end());
            v.detail = "order of trains " + std::to_string(v.trains[0]) + " and " +
                       std::to_string(v.trains[1]) + " flips between " +
                       groups[quad[0]].station + " and " + groups[quad[1]].station;
            report.violations.push_back(std::move(v));
        }
    }

    DecodeContext::Classification c = ctx.classify(bits);
    report.feasible_strict = c.strict;
    report.feasible_relaxed = c.relaxed;
    if (c.one_hot_ok) report.objective = c.objective;

    // Passing times along each train's route, where both ends are defined.
    for (std::size_t g = 0; g + 1 < groups.size(); ++g) {
        if (groups[g].train != groups[g + 1].train) continue;
        if (times[g] < 0 || times[g + 1] < 0) continue;
        Edge edge{groups[g].station, groups[g + 1].station};
        report.passing_times[{groups[g].train, edge}] =
            times[g + 1] - times[g] - qubo.station_stay;
    }
    return report;
}

Bits encode_times(const Qubo& qubo, const std::map<StationTrain, Minutes>& times) {
    Bits bits(qubo.n, 0);
    for (const VarGroup& g : qubo.catalog.groups) {
        auto it = times.find({g.station, g.train});
        if (it == times.end())
            throw ParameterError("no time for group " + g.station + "/" +
                                 std::to_string(g.train));
        int index = qubo.catalog.find(g.station, g.train, it->second);
        if (index < 0)
            throw ParameterError("time " + std::to_string(it->second) +
                                 " lies outside the window of " + g.station + "/" +
                                 std::to_string(g.train));
        bits[index] = 1;
    }
    return bits;
}

SolutionReport report_from_times(const Instance& instance,
                                 const std::map<StationTrain, Minutes>& times) {
    SolutionReport report;
    report.times = times;
    const Minutes stay = instance.params.station_stay_min;

    auto time_of = [&](const StationId& s, TrainId j) -> std::optional<Minutes> {
        auto it = times.find({s, j});
        if (it == times.end()) return std::nullopt;
        return it->second;
    };

    bool complete = true;
    for (const Train& train : instance.trains) {
        for (std::size_t k = 0; k + 1 < train.route.size(); ++k) {
            auto t = time_of(train.route[k], train.id);
            auto u = time_of(train.route[k + 1], train.id);
            if (!t || !u) {
                complete = false;
                continue;
            }
            Edge edge{train.route[k], train.route[k + 1]};
            report.passing_times[{train.id, edge}] = *u - *t - stay;
            Minutes gap = stay + instance.params.pass(edge.first, edge.second);
            if (*u < *t + gap)
                report.violations.push_back(
                    {"passing",
                     {train.id},
                     "train " + std::to_string(train.id) + " runs " + edge.first + "->" +
                         edge.second + " in " + std::to_string(*u - *t - stay) +
                         " min (needs " + std::to_string(gap - stay) + ")"});
        }
        for (const StationId& s : train.route)
            if (!time_of(s, train.id)) complete = false;
    }

    std::set<std::pair<int, int>> seen;
    for (const auto& [station, pairs] : instance.headway_pairs) {
        for (const auto& [j, j2] : pairs) {
            auto t = time_of(station, j);
            auto u = time_of(station, j2);
            if (!t || !u) continue;
            std::pair<int, int> key{std::min(j, j2), std::max(j, j2)};
            if (!seen.insert(key).second) continue;
            if (std::abs(*t - *u) < instance.params.headway_min)
                report.violations.push_back(
                    {"headway",
                     {key.first, key.second},
                     "trains " + std::to_string(j) + " and " + std::to_string(j2) +
                         " arrive at " + station + " within the headway"});
        }
    }

    for (const auto& [station, pairs] : instance.rollingstock_pairs) {
        for (const auto& [j, j2] : pairs) {
            auto t = time_of(station, j);
            auto u = time_of(station, j2);
            if (!t || !u) continue;
            if (*u < *t + instance.params.preparation_min + stay)
                report.violations.push_back(
                    {"rollingstock",
                     {j, j2},
                     "unit of train " + std::to_string(j) + " cannot turn around for " +
                         std::to_string(j2) + " at " + station});
        }
    }

    // Overtaking: same-direction consecutive station pairs shared by two routes.
    for (std::size_t a = 0; a < instance.trains.size(); ++a) {
        for (std::size_t b = a + 1; b < instance.trains.size(); ++b) {
            const Train& ta = instance.trains[a];
            const Train& tb = instance.trains[b];
            for (std::size_t i = 0; i + 1 < ta.route.size(); ++i)
                for (std::size_t k = 0; k + 1 < tb.route.size(); ++k) {
                    if (ta.route[i] != tb.route[k] || ta.route[i + 1] != tb.route[k + 1])
                        continue;
                    auto a1 = time_of(ta.route[i], ta.id);
                    auto a2 = time_of(ta.route[i + 1], ta.id);
                    auto b1 = time_of(tb.route[k], tb.id);
                    auto b2 = time_of(tb.route[k + 1], tb.id);
                    if (!a1 || !a2 || !b1 || !b2) continue;
                    if (*a1 == *b1 || *a2 == *b2) continue;
                    if ((*a1 < *b1) != (*a2 < *b2))
                        report.violations.push_back(
                            {"overtake",
                             {ta.id, tb.id},
                             "order of trains " + std::to_string(ta.id) + " and " +
                                 std::to_string(tb.id) + " flips on " + ta.route[i] +
                                 "->" + ta.route[i + 1]});
                }
        }
    }

    report.feasible_strict = report.violations.empty();
    report.feasible_relaxed =
        std::all_of(report.violations.begin(), report.violations.end(),
                    [](const ReportViolation& v) { return v.family == "passing"; });

    if (complete) {
        double objective = 0.0;
        for (const Train& train : instance.trains)
            for (const StationId& s : train.route)
                if (instance.objective_stations.count(s))
                    objective += double(*time_of(s, train.id) -
                                        train.nominal_arrivals.at(s)) /
                                 std::max(1, instance.d_max);
        report.objective = objective;
    }
    return report;
}

void Histogram::add(double value, long weight) {
    counts[static_cast<long>(std::floor(value / bin_width))] += weight;
}

long Histogram::total() const {
    long sum = 0;
    for (const auto& [bin, count] : counts) {
        (void)bin;
        sum += count;
    }
    return sum;
}

Histogram passing_histogram(const std::vector<SolutionReport>& reports, const Edge& edge,
                            bool relaxed, const std::vector<long>* weights) {
    if (weights && weights->size() != reports.size())
        throw ParameterError("weights do not match reports");
    Histogram hist;
    hist.bin_width = 1.0;
    for (std::size_t r = 0; r < reports.size(); ++r) {
        const SolutionReport& report = reports[r];
        if (!(relaxed ? report.feasible_relaxed : report.feasible_strict)) continue;
        long w = weights ? (*weights)[r] : 1;
        for (const auto& [key, minutes] : report.passing_times)
            if (key.second == edge) hist.add(minutes, w);
    }
    hist.empty_warning = hist.counts.empty();
    return hist;
}

SpectrumSummary spectrum_summary(const std::vector<SpectrumEntry>& spectrum,
                                 const Qubo& qubo, double bin_width) {
    if (bin_width <= 0) throw ParameterError("bin width must be positive");
    DecodeContext ctx(qubo);
    SpectrumSummary summary;
    summary.energy_histogram.bin_width = bin_width;

    auto take_min = [](std::optional<double>& slot, double value) {
        if (!slot || value < *slot) slot = value;
    };
    auto take_max = [](std::optional<double>& slot, double value) {
        if (!slot || value > *slot) slot = value;
    };

    for (const SpectrumEntry& entry : spectrum) {
        summary.energy_histogram.add(entry.energy);
        DecodeContext::Classification c = ctx.classify(entry.bits);
        if (c.strict) {
            ++summary.feasible_count;
            take_min(summary.min_feasible, entry.energy);
            take_max(summary.max_feasible, entry.energy);
            ++summary.feasible_objectives[c.objective];
        } else {
            ++summary.infeasible_count;
            take_min(summary.min_infeasible, entry.energy);
            take_max(summary.max_infeasible, entry.energy);
        }
    }
    summary.energy_histogram.empty_warning = spectrum.empty();

    if (summary.max_feasible && summary.min_infeasible) {
        summary.gap = *summary.min_infeasible - *summary.max_feasible;
        summary.regime = *summary.gap > 0 ? "split" : "overlapping";
    } else {
        summary.regime = "undefined";
    }
    return summary;
}

double feasible_fraction(const SampleSet& set, const Qubo& qubo, bool relaxed) {
    DecodeContext ctx(qubo);
    long total = 0, good = 0;
    for (const SampleRecord& rec : set.records) {
        total += rec.count;
        DecodeContext::Classification c = ctx.classify(rec.bits);
        if (relaxed ? c.relaxed : c.strict) good += rec.count;
    }
    return total == 0 ? 0.0 : static_cast<double>(good) / static_cast<double>(total);
}

double ScalingFit::predict(double x) const {
    double y = slope * x + intercept;
    return model == ScalingModel::Exponential ? std::exp(y) : y;
}

ScalingFit fit_scaling(const std::vector<std::pair<double, double>>& points,
                       ScalingModel model) {
    if (points.size() < 2) throw ParameterError("fit needs at least two points");
    std::vector<double> xs, ys;
    for (const auto& [x, y] : points) {
        xs.push_back(x);
        if (model == ScalingModel::Exponential) {
            if (!(y > 0))
                throw ParameterError("exponential fit needs positive values");
            ys.push_back(std::log(y));
        } else {
            ys.push_back(y);
        }
    }
    const double n = static_cast<double>(points.size());
    const double mean_x = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    const double mean_y = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mean_x) * (xs[i] - mean_x);
        sxy += (xs[i] - mean_x) * (ys[i] - mean_y);
        syy += (ys[i] - mean_y) * (ys[i] - mean_y);
    }
    if (sxx == 0.0) throw ParameterError("fit needs at least two distinct x values");

    ScalingFit fit;
    fit.model = model;
    fit.slope = sxy / sxx;
    fit.intercept = mean_y - fit.slope * mean_x;
    double ssres = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double resid = ys[i] - (fit.slope * xs[i] + fit.intercept);
        ssres += resid * resid;
    }
    fit.r2 = syy == 0.0 ? 1.0 : 1.0 - ssres / syy;
    return fit;
}

std::string export_train_diagram(const SolutionReport& report, const Instance& instance) {
    std::vector<std::string> missing;
    for (const Train& train : instance.trains)
        for (const StationId& s : train.route)
            if (!report.times.count({s, train.id}))
                missing.push_back(s + "/" + std::to_string(train.id));
    if (!missing.empty()) {
        std::string joined;
        for (const std::string& m : missing) joined += (joined.empty() ? "" : ", ") + m;
        throw ConfigError("cannot draw a diagram, unresolved choice groups: " + joined);
    }

    std::ostringstream out;
    out << "train,station,arrive,depart\n";
    for (const Train& train : instance.trains)
        for (const StationId& s : train.route) {
            Minutes t = report.times.at({s, train.id});
            out << train.id << ',' << s << ',' << t << ','
                << t + instance.params.station_stay_min << "\n";
        }
    out << "# feasibility "
        << (report.feasible_strict ? "strict"
                                   : report.feasible_relaxed ? "relaxed" : "infeasible")
        << "\n";
    return out.str();
}

std::string write_histogram_csv(const Histogram& hist) {
    std::ostringstream out;
    out << "# bin_width " << format_coeff(hist.bin_width) << "\n";
    out << "bin_start,count\n";
    for (const auto& [bin, count] : hist.counts)
        out << format_coeff(bin * hist.bin_width) << ',' << count << "\n";
    return out.str();
}

Histogram read_histogram_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    Histogram hist;
    bool header_seen = false;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream meta(line.substr(1));
            std::string key;
            double value;
            if (meta >> key >> value && key == "bin_width") {
                if (value <= 0)
                    throw ParseError("histogram line " + std::to_string(lineno) +
                                     ": bin_width must be positive");
                hist.bin_width = value;
            }
            continue;
        }
        if (!header_seen) {
            if (line != "bin_start,count")
                throw ParseError("histogram line " + std::to_string(lineno) +
                                 ": expected header 'bin_start,count'");
            header_seen = true;
            continue;
        }
        std::istringstream row(line);
        std::string start, count;
        if (!std::getline(row, start, ',') || !std::getline(row, count))
            throw ParseError("histogram line " + std::to_string(lineno) +
                             ": expected 'bin_start,count'");
        try {
            hist.counts[static_cast<long>(std::llround(std::stod(start) /
                                                       hist.bin_width))] +=
                std::stol(count);
        } catch (const std::exception&) {
            throw ParseError("histogram line " + std::to_string(lineno) +
                             ": malformed number");
        }
    }
    if (!header_seen) throw ParseError("histogram document has no column header");
    hist.empty_warning = hist.counts.empty();
    return hist;
}

double total_variation(const Histogram& a, const Histogram& b) {
    if (a.bin_width != b.bin_width)
        throw ParameterError("histograms use different bin widths");
    const double ta = static_cast<double>(a.total());
    const double tb = static_cast<double>(b.total());
    if (ta == 0.0 || tb == 0.0) throw ParameterError("cannot compare empty histograms");
    std::set<long> bins;
    for (const auto& [bin, count] : a.counts) {
        (void)count;
        bins.insert(bin);
    }
    for (const auto& [bin, count] : b.counts) {
        (void)count;
        bins.insert(bin);
    }
    double tv = 0.0;
    for (long bin : bins) {
        auto ia = a.counts.find(bin);
        auto ib = b.counts.find(bin);
        const double pa = ia == a.counts.end() ? 0.0 : ia->second / ta;
        const double pb = ib == b.counts.end() ? 0.0 : ib->second / tb;
        tv += std::abs(pa - pb);
    }
    return 0.5 * tv;
}

} // namespace railsched
