#include "camnet/io.hpp"

#include "camnet/error.hpp"

#include <fstream>
#include <sstream>

namespace camnet {

namespace {

constexpr const char* kDatasetFormat = "camnet-dataset";

template <typename T>
T get_field(const json& obj, const char* key) {
    if (!obj.is_object() || !obj.contains(key)) {
        throw InputError(std::string("missing field '") + key + "'");
    }
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw InputError(std::string("field '") + key + "' has the wrong type");
    }
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback) {
    return obj.contains(key) ? get_field<T>(obj, key) : fallback;
}

const json& get_array(const json& obj, const char* key) {
    if (!obj.is_object() || !obj.contains(key) || !obj.at(key).is_array()) {
        throw InputError(std::string("missing array '") + key + "'");
    }
    return obj.at(key);
}

json topology_to_json(const CameraTopology& t) {
    json doc;
    doc["cameras"] = json::array();
    for (CameraId c : t.cameras()) {
        doc["cameras"].push_back(c);
    }
    doc["edges"] = json::array();
    for (const auto& [u, v] : t.edges()) {
        doc["edges"].push_back(json::array({u, v}));
    }
    doc["windows"] = json::array();
    for (const auto& [key, w] : t.windows()) {
        doc["windows"].push_back(
            {{"from", key.first}, {"to", key.second}, {"min", w.min_gap}, {"max", w.max_gap}});
    }
    doc["directions"] = t.directions();
    doc["strict"] = t.strict();
    doc["direction_model"] = json::array();
    for (const auto& [key, p] : t.direction_table()) {
        doc["direction_model"].push_back({{"from", key.from},
                                          {"leave", key.leave},
                                          {"to", key.to},
                                          {"enter", key.enter},
                                          {"p", p}});
    }
    doc["markov2"] = json::array();
    for (const auto& [key, p] : t.markov2_table()) {
        doc["markov2"].push_back(
            {{"prev", key.previous}, {"cur", key.current}, {"next", key.next}, {"p", p}});
    }
    return doc;
}

CameraTopology topology_from_json(const json& doc) {
    CameraTopology t;
    for (const json& c : get_array(doc, "cameras")) {
        t.add_camera(c.get<CameraId>());
    }
    for (const json& e : get_array(doc, "edges")) {
        if (!e.is_array() || e.size() != 2) {
            throw InputError("edge entries must be [u, v]");
        }
        t.add_edge(e[0].get<CameraId>(), e[1].get<CameraId>());
    }
    if (doc.contains("windows")) {
        for (const json& w : get_array(doc, "windows")) {
            t.set_window(get_field<CameraId>(w, "from"), get_field<CameraId>(w, "to"),
                         TravelWindow{get_field<double>(w, "min"), get_field<double>(w, "max")});
        }
    }
    if (doc.contains("directions")) {
        t.set_directions(get_field<std::vector<std::string>>(doc, "directions"));
    }
    t.set_strict(get_or<bool>(doc, "strict", false));
    if (doc.contains("direction_model")) {
        for (const json& d : get_array(doc, "direction_model")) {
            t.set_direction_probability(
                get_field<CameraId>(d, "from"), get_field<std::string>(d, "leave"),
                get_field<CameraId>(d, "to"), get_field<std::string>(d, "enter"),
                get_field<double>(d, "p"));
        }
    }
    if (doc.contains("markov2")) {
        for (const json& m : get_array(doc, "markov2")) {
            t.set_markov2(get_field<CameraId>(m, "prev"), get_field<CameraId>(m, "cur"),
                          get_field<CameraId>(m, "next"), get_field<double>(m, "p"));
        }
    }
    t.validate();
    return t;
}

json histogram_to_json(const AppearanceHistogram& h) {
    json slices = json::array();
    for (int s = 0; s < kSlices; ++s) {
        auto values = h.slice(s);
        slices.push_back(std::vector<double>(values.begin(), values.end()));
    }
    return slices;
}

AppearanceHistogram histogram_from_json(const json& doc, int bins) {
    if (!doc.is_array() || doc.size() != static_cast<std::size_t>(kSlices)) {
        throw InputError("histogram must list 6 slices");
    }
    std::vector<double> mass;
    mass.reserve(static_cast<std::size_t>(bins) * kSlices);
    for (const json& slice : doc) {
        if (!slice.is_array() || slice.size() != static_cast<std::size_t>(bins)) {
            throw InputError("histogram slice does not have the dataset bin count");
        }
        for (const json& v : slice) {
            mass.push_back(v.get<double>());
        }
    }
    return AppearanceHistogram(bins, std::move(mass));
}

json endpoint(int index, const CandidateLinkSet& links, bool source_side) {
    if (index == kSource || index == kSink) {
        return source_side ? "source" : "sink";
    }
    return links.observation_id(index);
}

}  // namespace

Dataset dataset_from_scenario(Scenario scenario) {
    Dataset d;
    d.topology = std::move(scenario.topology);
    d.observations = std::move(scenario.observations);
    d.cbtf = std::move(scenario.cbtf);
    d.truth = std::move(scenario.truth);
    return d;
}

json dataset_to_json(const Dataset& dataset) {
    json doc;
    doc["format"] = kDatasetFormat;
    doc["version"] = 1;
    doc["topology"] = topology_to_json(dataset.topology);
    const int bins = dataset.observations.empty() ? kDefaultBins
                                                  : dataset.observations.front().appearance.bins();
    doc["bins"] = bins;
    doc["observations"] = json::array();
    for (const Observation& o : dataset.observations) {
        doc["observations"].push_back({{"id", o.id},
                                       {"camera", o.camera},
                                       {"t_enter", o.t_enter},
                                       {"t_leave", o.t_leave},
                                       {"dir_enter", o.dir_enter},
                                       {"dir_leave", o.dir_leave},
                                       {"histogram", histogram_to_json(o.appearance)}});
    }
    doc["cbtf"] = json::array();
    for (const auto& [key, map] : dataset.cbtf.entries()) {
        json maps = json::array();
        for (const auto& m : map.maps) {
            maps.push_back(m);
        }
        doc["cbtf"].push_back({{"from", key.first}, {"to", key.second}, {"maps", maps}});
    }
    if (dataset.truth) {
        doc["truth"] = json::array();
        for (const auto& [id, person] : *dataset.truth) {
            doc["truth"].push_back({{"observation", id}, {"person", person}});
        }
    }
    return doc;
}

Dataset dataset_from_json(const json& doc) {
    if (!doc.is_object()) {
        throw InputError("dataset must be a JSON object");
    }
    if (doc.contains("format") && doc.at("format") != kDatasetFormat) {
        throw InputError("not a camnet dataset");
    }
    Dataset d;
    try {
        d.topology = topology_from_json(doc.at("topology"));
        const int bins = get_or<int>(doc, "bins", kDefaultBins);
        for (const json& o : get_array(doc, "observations")) {
            Observation obs;
            obs.id = get_field<ObservationId>(o, "id");
            obs.camera = get_field<CameraId>(o, "camera");
            obs.t_enter = get_field<double>(o, "t_enter");
            obs.t_leave = get_field<double>(o, "t_leave");
            obs.dir_enter = get_or<std::string>(o, "dir_enter", "");
            obs.dir_leave = get_or<std::string>(o, "dir_leave", "");
            obs.appearance = histogram_from_json(o.at("histogram"), bins);
            d.observations.push_back(std::move(obs));
        }
        if (doc.contains("cbtf")) {
            for (const json& entry : get_array(doc, "cbtf")) {
                const auto maps = get_field<std::vector<std::vector<int>>>(entry, "maps");
                if (maps.size() != static_cast<std::size_t>(kSlices)) {
                    throw InputError("CBTF entry must list 6 slice maps");
                }
                CbtfMap map;
                for (std::size_t s = 0; s < maps.size(); ++s) {
                    map.maps[s] = maps[s];
                }
                const auto from = get_field<CameraId>(entry, "from");
                const auto to = get_field<CameraId>(entry, "to");
                for (CameraId c : {from, to}) {
                    if (!d.topology.has_camera(c)) {
                        throw ConfigError("CBTF entry references unknown camera id " +
                                          std::to_string(c));
                    }
                }
                d.cbtf.set(from, to, std::move(map));
            }
        }
        if (doc.contains("truth")) {
            GroundTruth truth;
            for (const json& t : get_array(doc, "truth")) {
                truth[get_field<ObservationId>(t, "observation")] = get_field<int>(t, "person");
            }
            d.truth = std::move(truth);
        }
    } catch (const json::exception& e) {
        throw InputError(std::string("malformed dataset: ") + e.what());
    }
    validate_observations(d.topology, d.observations);
    return d;
}

void write_dataset(const std::string& path, const Dataset& dataset) {
    write_json(path, dataset_to_json(dataset));
}

Dataset read_dataset(const std::string& path) { return dataset_from_json(read_json(path)); }

json scenario_spec_to_json(const ScenarioSpec& spec) {
    json doc;
    doc["cameras"] = spec.cameras;
    doc["edges"] = json::array();
    for (const ScenarioEdge& e : spec.edges) {
        doc["edges"].push_back({{"u", e.u}, {"v", e.v}, {"mean_travel", e.mean_travel}});
    }
    doc["persons"] = spec.persons;
    doc["duration"] = spec.duration;
    doc["start_spread"] = spec.start_spread;
    doc["dwell_min"] = spec.dwell_min;
    doc["dwell_max"] = spec.dwell_max;
    doc["appearance_separation"] = spec.appearance_separation;
    doc["brightness_shift"] = json::array();
    for (const auto& [camera, shift] : spec.brightness_shift) {
        doc["brightness_shift"].push_back({{"camera", camera}, {"shift", shift}});
    }
    doc["noise"] = spec.noise;
    doc["direction_noise"] = spec.direction_noise;
    doc["bins"] = spec.bins;
    doc["training_persons"] = spec.training_persons;
    doc["seed"] = spec.seed;
    return doc;
}

ScenarioSpec scenario_spec_from_json(const json& doc) {
    if (!doc.is_object()) {
        throw InputError("scenario spec must be a JSON object");
    }
    ScenarioSpec spec;
    if (doc.contains("preset")) {
        spec = scenario_preset(get_field<std::string>(doc, "preset"));
    }
    try {
        if (doc.contains("cameras")) {
            spec.cameras = get_field<std::vector<CameraId>>(doc, "cameras");
        }
        if (doc.contains("edges")) {
            spec.edges.clear();
            for (const json& e : get_array(doc, "edges")) {
                spec.edges.push_back(ScenarioEdge{get_field<CameraId>(e, "u"),
                                                  get_field<CameraId>(e, "v"),
                                                  get_field<double>(e, "mean_travel")});
            }
        }
        spec.persons = get_or<int>(doc, "persons", spec.persons);
        spec.duration = get_or<double>(doc, "duration", spec.duration);
        spec.start_spread = get_or<double>(doc, "start_spread", spec.start_spread);
        spec.dwell_min = get_or<double>(doc, "dwell_min", spec.dwell_min);
        spec.dwell_max = get_or<double>(doc, "dwell_max", spec.dwell_max);
        spec.appearance_separation =
            get_or<double>(doc, "appearance_separation", spec.appearance_separation);
        if (doc.contains("brightness_shift")) {
            spec.brightness_shift.clear();
            for (const json& s : get_array(doc, "brightness_shift")) {
                spec.brightness_shift[get_field<CameraId>(s, "camera")] = get_field<int>(s, "shift");
            }
        }
        spec.noise = get_or<double>(doc, "noise", spec.noise);
        spec.direction_noise = get_or<double>(doc, "direction_noise", spec.direction_noise);
        spec.bins = get_or<int>(doc, "bins", spec.bins);
        spec.training_persons = get_or<int>(doc, "training_persons", spec.training_persons);
        spec.seed = get_or<std::uint64_t>(doc, "seed", spec.seed);
    } catch (const json::exception& e) {
        throw InputError(std::string("malformed scenario spec: ") + e.what());
    }
    spec.validate();
    return spec;
}

json link_endpoints(const CandidateLinkSet& links, LinkId q) {
    const Link& l = links.link(q);
    return json{{"from", endpoint(l.from, links, true)}, {"to", endpoint(l.to, links, false)}};
}

json partition_to_json(const Partition& partition) {
    json doc = json::array();
    for (const auto& track : partition.tracks) {
        doc.push_back(track);
    }
    return doc;
}

Partition partition_from_json(const json& doc) {
    if (!doc.is_array()) {
        throw InputError("partition must be an array of tracks");
    }
    Partition p;
    try {
        for (const json& track : doc) {
            p.tracks.push_back(track.get<std::vector<ObservationId>>());
        }
    } catch (const json::exception&) {
        throw InputError("partition tracks must be arrays of observation ids");
    }
    return p;
}

json evaluation_to_json(const Evaluation& e) {
    return json{{"precision", e.precision},
                {"recall", e.recall},
                {"f_measure", e.f_measure},
                {"estimated_tracks", e.estimated_tracks},
                {"true_tracks", e.true_tracks}};
}

json run_report_summary(const RunReport& report) {
    json doc;
    doc["status"] = to_string(report.status);
    doc["iterations"] = report.iterations.size();
    doc["best_dual"] = report.best_dual;
    doc["best_primal"] = report.best_primal;
    doc["best_primal_iteration"] = report.best_primal_iteration;
    doc["converged_iteration"] = report.converged_iteration;
    return doc;
}

json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open '" + path + "'");
    }
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw InputError("'" + path + "' is not valid JSON: " + e.what());
    }
}

void write_json(const std::string& path, const json& doc) {
    std::ofstream out(path);
    if (!out) {
        throw InputError("cannot write '" + path + "'");
    }
    out << doc.dump(2) << '\n';
    if (!out) {
        throw InputError("failed writing '" + path + "'");
    }
}

}  // namespace camnet
