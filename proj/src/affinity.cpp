#include "camnet/affinity.hpp"

#include "camnet/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace camnet {

namespace {

// Cumulative sums are compared with this slack so that a bin-exact shift
// survives floating-point summation order.
constexpr double kCumulativeSlack = 1e-12;

}  // namespace

void AffinityConfig::validate() const {
    if (!(floor_epsilon > 0.0 && floor_epsilon < 1.0)) {
        throw ConfigError("floor_epsilon must lie in (0, 1)");
    }
    if (!std::isfinite(virtual_link_cost)) {
        throw ConfigError("virtual link cost must be finite");
    }
}

CbtfMap CbtfMap::identity(int bins) {
    CbtfMap map;
    for (auto& m : map.maps) {
        m.resize(static_cast<std::size_t>(bins));
        for (int b = 0; b < bins; ++b) {
            m[static_cast<std::size_t>(b)] = b;
        }
    }
    return map;
}

void CbtfTable::set(CameraId from, CameraId to, CbtfMap map) {
    const int bins = map.bins();
    for (const auto& m : map.maps) {
        if (static_cast<int>(m.size()) != bins || bins == 0) {
            throw ConfigError("CBTF slices must share a non-zero bin count");
        }
        for (std::size_t b = 0; b < m.size(); ++b) {
            if (m[b] < 0 || m[b] >= bins) {
                throw ConfigError("CBTF maps a bin outside the histogram range");
            }
            if (b > 0 && m[b] < m[b - 1]) {
                throw ConfigError("CBTF map must be monotone non-decreasing");
            }
        }
    }
    entries_[{from, to}] = std::move(map);
}

const CbtfMap* CbtfTable::find(CameraId from, CameraId to) const {
    auto it = entries_.find({from, to});
    return it == entries_.end() ? nullptr : &it->second;
}

double bhattacharyya_coefficient(std::span<const double> h1, std::span<const double> h2) {
    if (h1.size() != h2.size()) {
        throw InputError("Bhattacharyya coefficient over histograms of different bin counts");
    }
    double bc = 0.0;
    for (std::size_t b = 0; b < h1.size(); ++b) {
        bc += std::sqrt(h1[b] * h2[b]);
    }
    return bc;
}

double bhattacharyya_distance(const AppearanceHistogram& a, const AppearanceHistogram& b) {
    if (a.bins() != b.bins()) {
        throw InputError("appearance histograms differ in bin count");
    }
    // 1 - BC as half the squared distance between root histograms: equal for
    // normalized slices, and exactly 0 for identical ones where 1 - sum would
    // leave rounding noise that the square root blows up to ~1e-8.
    double total = 0.0;
    for (int s = 0; s < kSlices; ++s) {
        auto ha = a.slice(s);
        auto hb = b.slice(s);
        double d2 = 0.0;
        for (std::size_t k = 0; k < ha.size(); ++k) {
            const double d = std::sqrt(ha[k]) - std::sqrt(hb[k]);
            d2 += d * d;
        }
        total += std::sqrt(std::min(1.0, 0.5 * d2));
    }
    return total / kSlices;
}

double appearance_similarity_direct(const AppearanceHistogram& a, const AppearanceHistogram& b) {
    return std::clamp(1.0 - bhattacharyya_distance(a, b), 0.0, 1.0);
}

CbtfMap learn_cbtf(std::span<const std::pair<AppearanceHistogram, AppearanceHistogram>> pairs) {
    if (pairs.empty()) {
        throw LearningError("CBTF learning needs at least one training pair");
    }
    const int bins = pairs.front().first.bins();
    for (const auto& [u, v] : pairs) {
        if (u.bins() != bins || v.bins() != bins) {
            throw LearningError("CBTF training histograms differ in bin count");
        }
    }

    CbtfMap map;
    std::vector<double> cu(static_cast<std::size_t>(bins));
    std::vector<double> cv(static_cast<std::size_t>(bins));
    const double weight = 1.0 / static_cast<double>(pairs.size());
    for (int s = 0; s < kSlices; ++s) {
        std::fill(cu.begin(), cu.end(), 0.0);
        std::fill(cv.begin(), cv.end(), 0.0);
        for (const auto& [u, v] : pairs) {
            auto hu = u.slice(s);
            auto hv = v.slice(s);
            for (int b = 0; b < bins; ++b) {
                cu[static_cast<std::size_t>(b)] += weight * hu[static_cast<std::size_t>(b)];
                cv[static_cast<std::size_t>(b)] += weight * hv[static_cast<std::size_t>(b)];
            }
        }
        for (int b = 1; b < bins; ++b) {
            cu[static_cast<std::size_t>(b)] += cu[static_cast<std::size_t>(b - 1)];
            cv[static_cast<std::size_t>(b)] += cv[static_cast<std::size_t>(b - 1)];
        }
        auto& f = map.maps[static_cast<std::size_t>(s)];
        f.resize(static_cast<std::size_t>(bins));
        int target = 0;
        for (int b = 0; b < bins; ++b) {
            // cu is non-decreasing, so the search can resume where it stopped.
            while (target < bins - 1 &&
                   cv[static_cast<std::size_t>(target)] < cu[static_cast<std::size_t>(b)] -
                                                              kCumulativeSlack) {
                ++target;
            }
            f[static_cast<std::size_t>(b)] = target;
        }
    }
    return map;
}

AppearanceHistogram apply_cbtf(const AppearanceHistogram& h, const CbtfMap& map) {
    if (map.bins() != h.bins()) {
        throw InputError("CBTF bin count does not match the histogram");
    }
    AppearanceHistogram out(h.bins());
    for (int s = 0; s < kSlices; ++s) {
        auto src = h.slice(s);
        auto dst = out.slice(s);
        const auto& f = map.maps[static_cast<std::size_t>(s)];
        for (std::size_t b = 0; b < src.size(); ++b) {
            dst[static_cast<std::size_t>(f[b])] += src[b];
        }
    }
    out.normalize();
    return out;
}

double appearance_similarity_cbtf(const Observation& a, const Observation& b,
                                  const CbtfTable& table) {
    auto lookup = [&](CameraId from, CameraId to) -> const CbtfMap* {
        const CbtfMap* map = table.find(from, to);
        if (map == nullptr && from != to) {
            std::ostringstream os;
            os << "no CBTF entry for camera pair " << from << " -> " << to;
            throw ConfigError(os.str());
        }
        return map;
    };
    const CbtfMap* a_to_b = lookup(a.camera, b.camera);
    const CbtfMap* b_to_a = lookup(b.camera, a.camera);
    const AppearanceHistogram mapped_a = a_to_b ? apply_cbtf(a.appearance, *a_to_b) : a.appearance;
    const AppearanceHistogram mapped_b = b_to_a ? apply_cbtf(b.appearance, *b_to_a) : b.appearance;
    const double phi = 1.0 - 0.5 * bhattacharyya_distance(a.appearance, mapped_b) -
                       0.5 * bhattacharyya_distance(mapped_a, b.appearance);
    return std::clamp(phi, 0.0, 1.0);
}

int travel_time_factor(const CameraTopology& topology, const Observation& from,
                       const Observation& to) {
    const TravelWindow& w = topology.window(from.camera, to.camera);
    return w.contains(to.t_enter - from.t_leave) ? 1 : 0;
}

double spatio_temporal_factor(const CameraTopology& topology, const Observation& from,
                              const Observation& to) {
    if (travel_time_factor(topology, from, to) == 0) {
        return 0.0;
    }
    return topology.direction_probability(from.camera, from.dir_leave, to.camera, to.dir_enter);
}

AffinityModel::AffinityModel(const CameraTopology& topology,
                             std::span<const Observation> observations, AffinityConfig config,
                             const CbtfTable* cbtf)
    : topology_(topology), observations_(observations), config_(config), cbtf_(cbtf) {
    config_.validate();
    if (config_.appearance_mode == AppearanceMode::cbtf && cbtf_ == nullptr) {
        throw ConfigError("CBTF appearance mode needs a CBTF table");
    }
}

double AffinityModel::appearance(const Observation& a, const Observation& b) const {
    if (config_.appearance_mode == AppearanceMode::cbtf) {
        return appearance_similarity_cbtf(a, b, *cbtf_);
    }
    return appearance_similarity_direct(a.appearance, b.appearance);
}

double AffinityModel::cost_from_similarity(double phi) const {
    return -std::log(std::max(phi, config_.floor_epsilon));
}

double AffinityModel::link_cost(const CandidateLinkSet& links, LinkId q) const {
    const Link& link = links.link(q);
    if (link.is_virtual()) {
        return config_.virtual_link_cost;
    }
    const Observation& from = observations_[static_cast<std::size_t>(link.from)];
    const Observation& to = observations_[static_cast<std::size_t>(link.to)];
    return cost_from_similarity(appearance(from, to) * spatio_temporal_factor(topology_, from, to));
}

double AffinityModel::pair_cost(const CandidateLinkSet& links, LinkId p, LinkId q) const {
    const Link& in = links.link(p);
    const Link& out = links.link(q);
    if (in.is_virtual() || out.is_virtual()) {
        return 0.0;
    }
    const Observation& first = observations_[static_cast<std::size_t>(in.from)];
    const Observation& middle = observations_[static_cast<std::size_t>(in.to)];
    const Observation& last = observations_[static_cast<std::size_t>(out.to)];
    double phi = appearance(first, last);
    if (config_.use_markov2) {
        phi *= topology_.markov2(first.camera, middle.camera, last.camera);
    }
    return cost_from_similarity(phi);
}

EnergyModel AffinityModel::build(const CandidateLinkSet& links) const {
    if (links.observation_count() != observations_.size()) {
        throw InputError("link set and observation sequence differ in size");
    }
    EnergyModel model;
    model.theta.resize(links.link_count());
    for (const Link& l : links.links()) {
        model.theta[static_cast<std::size_t>(l.id)] = link_cost(links, l.id);
    }
    model.theta_pair.resize(links.observation_count());
    for (std::size_t i = 0; i < links.observation_count(); ++i) {
        const int obs = static_cast<int>(i);
        const auto& in = links.incoming(obs);
        const auto& out = links.outgoing(obs);
        auto& table = model.theta_pair[i];
        table.resize(in.size() * out.size());
        for (std::size_t a = 0; a < in.size(); ++a) {
            for (std::size_t b = 0; b < out.size(); ++b) {
                table[a * out.size() + b] = pair_cost(links, in[a], out[b]);
            }
        }
    }
    return model;
}

EnergyModel build_energy_model(const CameraTopology& topology,
                               std::span<const Observation> observations,
                               const CandidateLinkSet& links, const AffinityConfig& config,
                               const CbtfTable* cbtf) {
    return AffinityModel(topology, observations, config, cbtf).build(links);
}

}  // namespace camnet
