#include "camnet/scenario.hpp"

#include "camnet/error.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>

namespace camnet {

namespace {

constexpr double kWindowLow = 0.25;
constexpr double kWindowHigh = 4.0;

const std::vector<std::string>& default_directions() {
    static const std::vector<std::string> d{"N", "S", "E", "W"};
    return d;
}

// Fixed per-edge directions: where an object leaves `u` heading to `v`, and
// where it enters `v` coming from `u`.
int canonical_leave(CameraId u, CameraId v) { return static_cast<int>((u * 7 + v * 3) % 4); }
int canonical_enter(CameraId u, CameraId v) { return static_cast<int>((v * 5 + u) % 4); }

struct Walker {
    int person;
    std::vector<Observation> visits;
};

void require_known(const std::set<CameraId>& cameras, CameraId c, const char* what) {
    if (!cameras.contains(c)) {
        throw ConfigError(std::string(what) + " references unknown camera " + std::to_string(c));
    }
}

AppearanceHistogram render(const AppearanceHistogram& base, int shift, double noise,
                           std::mt19937_64& rng) {
    AppearanceHistogram h = shift_histogram(base, shift);
    if (noise > 0.0) {
        std::normal_distribution<double> gauss(0.0, 1.0);
        std::uniform_real_distribution<double> floor(0.0, 1.0);
        const double scale = noise / static_cast<double>(h.bins());
        for (int s = 0; s < kSlices; ++s) {
            for (double& v : h.slice(s)) {
                v = std::max(0.0, v * (1.0 + noise * gauss(rng))) + scale * floor(rng);
            }
        }
    }
    h.normalize();
    return h;
}

// Conditional direction model P(to, enter | from, leave) implied by the
// walk: next camera uniform over non-self neighbors, each direction the
// canonical one with probability 1 - eps and otherwise uniform.
void set_direction_model(CameraTopology& topology, double eps) {
    const auto& dirs = default_directions();
    const double nd = static_cast<double>(dirs.size());
    auto p_dir = [&](int d, int canonical) { return (d == canonical ? 1.0 - eps : 0.0) + eps / nd; };
    for (CameraId u : topology.cameras()) {
        std::vector<CameraId> next;
        for (CameraId v : topology.neighbors(u)) {
            if (v != u) {
                next.push_back(v);
            }
        }
        if (next.empty()) {
            continue;
        }
        const double pv = 1.0 / static_cast<double>(next.size());
        for (int a = 0; a < static_cast<int>(dirs.size()); ++a) {
            double pa = 0.0;
            for (CameraId v : next) {
                pa += pv * p_dir(a, canonical_leave(u, v));
            }
            for (CameraId v : next) {
                for (int b = 0; b < static_cast<int>(dirs.size()); ++b) {
                    const double joint =
                        pv * p_dir(a, canonical_leave(u, v)) * p_dir(b, canonical_enter(u, v));
                    if (joint > 0.0) {
                        topology.set_direction_probability(u, dirs[static_cast<std::size_t>(a)], v,
                                                           dirs[static_cast<std::size_t>(b)],
                                                           joint / pa);
                    }
                }
            }
        }
    }
}

std::vector<std::pair<CameraId, CameraId>> pairs_within_two_hops(const CameraTopology& topology) {
    std::vector<std::pair<CameraId, CameraId>> out;
    for (CameraId u : topology.cameras()) {
        std::map<CameraId, int> depth{{u, 0}};
        std::queue<CameraId> frontier;
        frontier.push(u);
        while (!frontier.empty()) {
            const CameraId c = frontier.front();
            frontier.pop();
            if (depth[c] == 2) {
                continue;
            }
            for (CameraId v : topology.neighbors(c)) {
                if (!depth.contains(v)) {
                    depth[v] = depth[c] + 1;
                    frontier.push(v);
                }
            }
        }
        for (const auto& [v, d] : depth) {
            if (v != u) {
                out.emplace_back(u, v);
            }
        }
    }
    return out;
}

}  // namespace

void ScenarioSpec::validate() const {
    if (cameras.empty()) {
        throw ConfigError("scenario needs at least one camera");
    }
    const std::set<CameraId> known(cameras.begin(), cameras.end());
    if (known.size() != cameras.size()) {
        throw ConfigError("scenario lists a camera twice");
    }
    for (const ScenarioEdge& e : edges) {
        require_known(known, e.u, "scenario edge");
        require_known(known, e.v, "scenario edge");
        if (!(e.mean_travel > 0.0) || !std::isfinite(e.mean_travel)) {
            throw ConfigError("mean travel time must be positive");
        }
    }
    for (const auto& [camera, shift] : brightness_shift) {
        require_known(known, camera, "brightness shift");
    }
    if (persons < 1) {
        throw ConfigError("scenario needs at least one person");
    }
    if (!(duration > 0.0)) {
        throw ConfigError("scenario duration must be positive");
    }
    if (!(start_spread >= 0.0) || !(dwell_min >= 0.0) || !(dwell_max >= dwell_min)) {
        throw ConfigError("invalid start or dwell range");
    }
    if (!(appearance_separation >= 0.0 && appearance_separation <= 1.0)) {
        throw ConfigError("appearance separation must lie in [0, 1]");
    }
    if (!(noise >= 0.0) || !(direction_noise >= 0.0 && direction_noise <= 1.0)) {
        throw ConfigError("noise levels out of range");
    }
    if (bins < 16) {
        throw ConfigError("scenario needs at least 16 histogram bins");
    }
    if (training_persons < 1) {
        throw ConfigError("CBTF training needs at least one person");
    }
}

std::vector<std::string> scenario_preset_names() { return {"paper-scale", "tiny", "shifted"}; }

ScenarioSpec scenario_preset(std::string_view name) {
    ScenarioSpec spec;
    if (name == "paper-scale" || name == "shifted") {
        // Ring of ten cameras with two chords, travel times 15-40 s.
        spec.cameras = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
        const double mean[] = {20, 25, 15, 30, 20, 35, 25, 20, 30, 15};
        for (int c = 0; c < 10; ++c) {
            spec.edges.push_back(ScenarioEdge{c, (c + 1) % 10, mean[c]});
        }
        spec.edges.push_back(ScenarioEdge{0, 5, 40});
        spec.edges.push_back(ScenarioEdge{2, 7, 40});
        spec.brightness_shift = {{0, 0},  {1, 12},  {2, -10}, {3, 20},  {4, -18},
                                 {5, 6},  {6, -24}, {7, 16},  {8, -6},  {9, 26}};
        spec.persons = 10;
        spec.duration = 1900.0;
        spec.noise = 0.3;
        spec.seed = 2013;
        if (name == "shifted") {
            spec.persons = 6;
            spec.duration = 1400.0;
            for (auto& [camera, shift] : spec.brightness_shift) {
                shift *= 2;
            }
            spec.seed = 77;
        }
        return spec;
    }
    if (name == "tiny") {
        spec.cameras = {0, 1, 2};
        spec.edges = {{0, 1, 10.0}, {1, 2, 12.0}};
        spec.brightness_shift = {{0, 0}, {1, 8}, {2, -8}};
        spec.persons = 2;
        spec.duration = 60.0;
        spec.start_spread = 10.0;
        spec.noise = 0.1;
        spec.seed = 5;
        return spec;
    }
    throw ConfigError("unknown scenario preset '" + std::string(name) + "'");
}

AppearanceHistogram shift_histogram(const AppearanceHistogram& h, int shift) {
    AppearanceHistogram out(h.bins());
    const int last = h.bins() - 1;
    for (int s = 0; s < kSlices; ++s) {
        auto src = h.slice(s);
        auto dst = out.slice(s);
        for (int b = 0; b <= last; ++b) {
            dst[static_cast<std::size_t>(std::clamp(b + shift, 0, last))] +=
                src[static_cast<std::size_t>(b)];
        }
    }
    return out;
}

AppearanceHistogram person_histogram(std::mt19937_64& rng, int bins, double separation) {
    const double lo = 40.0 / 256.0 * bins;
    const double hi = 215.0 / 256.0 * bins;
    const double mid = 0.5 * (lo + hi);
    std::uniform_real_distribution<double> offset(-0.5 * (hi - lo), 0.5 * (hi - lo));
    std::uniform_real_distribution<double> width(8.0 / 256.0 * bins, 20.0 / 256.0 * bins);
    AppearanceHistogram h(bins);
    for (int s = 0; s < kSlices; ++s) {
        const double center = mid + separation * offset(rng);
        const double sigma = width(rng);
        auto values = h.slice(s);
        for (int b = 0; b < bins; ++b) {
            const double z = (b - center) / sigma;
            values[static_cast<std::size_t>(b)] = std::exp(-0.5 * z * z);
        }
    }
    h.normalize();
    return h;
}

Scenario generate_scenario(const ScenarioSpec& spec) {
    spec.validate();
    Scenario out;
    CameraTopology& topology = out.topology;
    topology.set_directions(default_directions());
    for (CameraId c : spec.cameras) {
        topology.add_camera(c);
    }
    std::map<std::pair<CameraId, CameraId>, double> mean_travel;
    for (const ScenarioEdge& e : spec.edges) {
        topology.add_edge(e.u, e.v);
        for (auto [a, b] : {std::pair{e.u, e.v}, std::pair{e.v, e.u}}) {
            topology.set_window(a, b, TravelWindow{kWindowLow * e.mean_travel,
                                                   kWindowHigh * e.mean_travel});
            mean_travel[{a, b}] = e.mean_travel;
        }
    }
    set_direction_model(topology, spec.direction_noise);
    topology.validate();

    auto shift_of = [&](CameraId c) {
        auto it = spec.brightness_shift.find(c);
        return it == spec.brightness_shift.end() ? 0 : it->second;
    };
    const auto& dirs = default_directions();

    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> any_dir(0, static_cast<int>(dirs.size()) - 1);
    auto pick_dir = [&](int canonical) {
        return unit(rng) < spec.direction_noise ? any_dir(rng) : canonical;
    };

    std::vector<Observation> all;
    std::vector<int> owner;
    for (int person = 0; person < spec.persons; ++person) {
        const AppearanceHistogram base =
            person_histogram(rng, spec.bins, spec.appearance_separation);
        CameraId camera = spec.cameras[static_cast<std::size_t>(
            std::uniform_int_distribution<std::size_t>(0, spec.cameras.size() - 1)(rng))];
        double t = spec.start_spread * unit(rng);
        int enter_dir = any_dir(rng);
        while (t < spec.duration) {
            Observation o;
            o.camera = camera;
            o.t_enter = t;
            o.t_leave = t + spec.dwell_min + (spec.dwell_max - spec.dwell_min) * unit(rng);
            o.dir_enter = dirs[static_cast<std::size_t>(enter_dir)];
            o.appearance = render(base, shift_of(camera), spec.noise, rng);

            std::vector<CameraId> next;
            for (CameraId v : topology.neighbors(camera)) {
                if (v != camera) {
                    next.push_back(v);
                }
            }
            if (next.empty()) {
                o.dir_leave = dirs[static_cast<std::size_t>(any_dir(rng))];
                all.push_back(std::move(o));
                owner.push_back(person);
                break;
            }
            const CameraId v = next[static_cast<std::size_t>(
                std::uniform_int_distribution<std::size_t>(0, next.size() - 1)(rng))];
            o.dir_leave = dirs[static_cast<std::size_t>(pick_dir(canonical_leave(camera, v)))];
            const double mean = mean_travel.at({camera, v});
            const double travel = mean * (kWindowLow + (kWindowHigh - kWindowLow) * unit(rng));
            t = o.t_leave + travel;
            enter_dir = pick_dir(canonical_enter(camera, v));
            all.push_back(std::move(o));
            owner.push_back(person);
            camera = v;
        }
    }

    std::vector<std::size_t> order(all.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return all[a].t_enter < all[b].t_enter; });
    double previous = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < order.size(); ++k) {
        Observation o = std::move(all[order[k]]);
        o.id = static_cast<ObservationId>(k);
        if (!(o.t_enter > previous)) {
            // Coincident enter times are measure-zero; separate them minimally.
            const double dwell = o.t_leave - o.t_enter;
            o.t_enter = std::nextafter(previous, std::numeric_limits<double>::infinity());
            o.t_leave = o.t_enter + dwell;
        }
        previous = o.t_enter;
        out.truth[o.id] = owner[order[k]];
        out.observations.push_back(std::move(o));
    }

    // CBTF training: a separate population seen once on every camera.
    std::mt19937_64 train_rng(spec.seed ^ 0x9e3779b97f4a7c15ULL);
    std::vector<AppearanceHistogram> bases;
    for (int p = 0; p < spec.training_persons; ++p) {
        bases.push_back(person_histogram(train_rng, spec.bins, spec.appearance_separation));
    }
    std::map<CameraId, std::vector<AppearanceHistogram>> seen;
    for (CameraId c : spec.cameras) {
        for (const AppearanceHistogram& base : bases) {
            seen[c].push_back(render(base, shift_of(c), spec.noise, train_rng));
        }
    }
    for (const auto& [u, v] : pairs_within_two_hops(topology)) {
        std::vector<std::pair<AppearanceHistogram, AppearanceHistogram>> pairs;
        for (std::size_t p = 0; p < bases.size(); ++p) {
            pairs.emplace_back(seen[u][p], seen[v][p]);
        }
        out.cbtf.set(u, v, learn_cbtf(pairs));
    }
    return out;
}

}  // namespace camnet
