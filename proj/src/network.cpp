#include "railsched/network.hpp"

#include <algorithm>
#include <sstream>

#include "json.hpp"

namespace railsched {

Minutes NetworkParams::pass(const StationId& from, const StationId& to) const {
    auto it = pass_min.find({from, to});
    if (it == pass_min.end())
        throw ConfigError("no pass_min entry for edge " + from + "->" + to);
    return it->second;
}

const Train* Instance::find_train(TrainId id) const {
    for (const Train& t : trains)
        if (t.id == id) return &t;
    return nullptr;
}

TimeWindows compute_time_windows(const Instance& instance) {
    if (instance.d_max < 0)
        throw ConfigError("d_max must be non-negative");
    TimeWindows w;
    for (const Train& train : instance.trains) {
        Minutes prev = 0;
        for (std::size_t k = 0; k < train.route.size(); ++k) {
            const StationId& s = train.route[k];
            auto nom = train.nominal_arrivals.find(s);
            if (nom == train.nominal_arrivals.end())
                throw ConfigError("train " + std::to_string(train.id) +
                                  " has no nominal arrival at " + s);
            Minutes l;
            if (k == 0) {
                l = nom->second + train.initial_delay;
            } else {
                Minutes reach = prev + instance.params.station_stay_min +
                                instance.params.pass(train.route[k - 1], s);
                l = std::max(nom->second, reach);
            }
            w.lower[{s, train.id}] = l;
            w.upper[{s, train.id}] = l + instance.d_max;
            prev = l;
        }
    }
    return w;
}

namespace {

void check_pair_table(
    const Instance& instance,
    const std::map<StationId, std::vector<std::pair<TrainId, TrainId>>>& table,
    const char* label, std::vector<Violation>& out) {
    for (const auto& [station, pairs] : table) {
        for (const auto& [a, b] : pairs) {
            for (TrainId id : {a, b}) {
                const Train* t = instance.find_train(id);
                if (!t) {
                    out.push_back({"PairTrainMissing",
                                   std::string(label) + " pair at " + station +
                                       " references unknown train " + std::to_string(id)});
                } else if (std::find(t->route.begin(), t->route.end(), station) ==
                           t->route.end()) {
                    out.push_back({"PairTrainMissing",
                                   std::string(label) + " pair at " + station +
                                       " references train " + std::to_string(id) +
                                       " which does not visit it"});
                }
            }
            if (a == b)
                out.push_back({"PairTrainMissing",
                               std::string(label) + " pair at " + station +
                                   " pairs train " + std::to_string(a) + " with itself"});
        }
    }
}

} // namespace

std::vector<Violation> validate_instance(const Instance& instance) {
    std::vector<Violation> out;
    const NetworkParams& p = instance.params;

    if (instance.d_max < 0)
        out.push_back({"NegativeDelayBound",
                       "d_max = " + std::to_string(instance.d_max)});
    if (p.headway_min < 0 || p.preparation_min < 0 || p.station_stay_min < 0)
        out.push_back({"NegativeDuration", "network durations must be >= 0"});
    for (const auto& [edge, m] : p.pass_min)
        if (m < 0)
            out.push_back({"NegativeDuration",
                           "pass_min " + edge.first + "->" + edge.second + " < 0"});

    std::set<TrainId> seen_ids;
    std::set<StationId> visited;
    for (const Train& train : instance.trains) {
        const std::string tag = "train " + std::to_string(train.id);
        if (!seen_ids.insert(train.id).second)
            out.push_back({"DuplicateTrainId", tag + " appears twice"});
        if (train.route.empty()) {
            out.push_back({"EmptyRoute", tag + " has no stations"});
            continue;
        }
        if (train.initial_delay < 0)
            out.push_back({"NegativeInitialDelay", tag});

        std::set<StationId> unique(train.route.begin(), train.route.end());
        if (unique.size() != train.route.size())
            out.push_back({"DuplicateRouteStation", tag + " revisits a station"});
        visited.insert(unique.begin(), unique.end());

        for (const StationId& s : train.route)
            if (!train.nominal_arrivals.count(s))
                out.push_back({"NominalArrivalMismatch",
                               tag + " lacks a nominal arrival at " + s});
        for (const auto& [s, t] : train.nominal_arrivals) {
            (void)t;
            if (!unique.count(s))
                out.push_back({"NominalArrivalMismatch",
                               tag + " has a nominal arrival at off-route station " + s});
        }

        for (std::size_t k = 0; k + 1 < train.route.size(); ++k) {
            const StationId& a = train.route[k];
            const StationId& b = train.route[k + 1];
            if (!p.pass_min.count({a, b}))
                out.push_back({"MissingPassMin", a + "->" + b + " used by " + tag});
            auto na = train.nominal_arrivals.find(a);
            auto nb = train.nominal_arrivals.find(b);
            if (na != train.nominal_arrivals.end() && nb != train.nominal_arrivals.end() &&
                nb->second <= na->second)
                out.push_back({"NonMonotoneTimetable",
                               tag + " nominal arrivals do not increase " + a + "->" + b});
        }
    }

    check_pair_table(instance, instance.headway_pairs, "headway", out);
    check_pair_table(instance, instance.rollingstock_pairs, "rolling-stock", out);

    for (const StationId& s : instance.objective_stations)
        if (!visited.count(s))
            out.push_back({"ObjectiveStationUnknown",
                           s + " is visited by no train"});
    return out;
}

// ---------------------------------------------------------------------------
// JSON document

namespace {

using nlohmann::json;

std::string edge_key(const Edge& e) { return e.first + "->" + e.second; }

Edge parse_edge_key(const std::string& key) {
    auto pos = key.find("->");
    if (pos == std::string::npos || pos == 0 || pos + 2 >= key.size())
        throw ParseError("bad edge key '" + key + "' (expected FROM->TO)");
    return {key.substr(0, pos), key.substr(pos + 2)};
}

} // namespace

std::string instance_to_json(const Instance& instance) {
    json doc;
    doc["d_max"] = instance.d_max;
    doc["disturbed"] = instance.disturbed;

    json params;
    params["headway_min"] = instance.params.headway_min;
    params["preparation_min"] = instance.params.preparation_min;
    params["station_stay_min"] = instance.params.station_stay_min;
    json pass = json::object();
    for (const auto& [edge, m] : instance.params.pass_min) pass[edge_key(edge)] = m;
    params["pass_min"] = pass;
    doc["params"] = params;

    doc["objective_stations"] =
        std::vector<StationId>(instance.objective_stations.begin(),
                               instance.objective_stations.end());

    auto pairs_to_json = [](const auto& table) {
        json obj = json::object();
        for (const auto& [station, pairs] : table) {
            json list = json::array();
            for (const auto& [a, b] : pairs) list.push_back({a, b});
            obj[station] = list;
        }
        return obj;
    };
    doc["headway_pairs"] = pairs_to_json(instance.headway_pairs);
    doc["rollingstock_pairs"] = pairs_to_json(instance.rollingstock_pairs);

    json trains = json::array();
    for (const Train& t : instance.trains) {
        json jt;
        jt["id"] = t.id;
        jt["initial_delay"] = t.initial_delay;
        jt["nominal_arrivals"] = t.nominal_arrivals;
        jt["route"] = t.route;
        trains.push_back(jt);
    }
    doc["trains"] = trains;

    return doc.dump(2) + "\n";
}

Instance instance_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("instance document: ") + e.what());
    }
    try {
        Instance inst;
        inst.d_max = doc.at("d_max").get<Minutes>();
        inst.disturbed = doc.value("disturbed", false);

        const json& params = doc.at("params");
        inst.params.headway_min = params.at("headway_min").get<Minutes>();
        inst.params.preparation_min = params.at("preparation_min").get<Minutes>();
        inst.params.station_stay_min = params.at("station_stay_min").get<Minutes>();
        for (const auto& [key, value] : params.at("pass_min").items())
            inst.params.pass_min[parse_edge_key(key)] = value.get<Minutes>();

        for (const auto& s : doc.at("objective_stations"))
            inst.objective_stations.insert(s.get<StationId>());

        auto pairs_from_json = [](const json& obj) {
            std::map<StationId, std::vector<std::pair<TrainId, TrainId>>> table;
            for (const auto& [station, list] : obj.items())
                for (const auto& pair : list)
                    table[station].push_back(
                        {pair.at(0).get<TrainId>(), pair.at(1).get<TrainId>()});
            return table;
        };
        inst.headway_pairs = pairs_from_json(doc.at("headway_pairs"));
        inst.rollingstock_pairs = pairs_from_json(doc.at("rollingstock_pairs"));

        for (const auto& jt : doc.at("trains")) {
            Train t;
            t.id = jt.at("id").get<TrainId>();
            t.initial_delay = jt.value("initial_delay", 0);
            t.route = jt.at("route").get<std::vector<StationId>>();
            for (const auto& [s, m] : jt.at("nominal_arrivals").items())
                t.nominal_arrivals[s] = m.get<Minutes>();
            inst.trains.push_back(std::move(t));
        }
        std::sort(inst.trains.begin(), inst.trains.end(),
                  [](const Train& a, const Train& b) { return a.id < b.id; });
        return inst;
    } catch (const json::exception& e) {
        throw ParseError(std::string("instance document: ") + e.what());
    }
}

} // namespace railsched
