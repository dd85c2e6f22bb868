#include "camnet/model.hpp"

#include "camnet/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <sstream>

namespace camnet {

namespace {

std::pair<CameraId, CameraId> edge_key(CameraId u, CameraId v) {
    return u <= v ? std::pair{u, v} : std::pair{v, u};
}

std::string camera_message(const char* what, CameraId camera) {
    std::ostringstream os;
    os << what << " " << camera;
    return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// AppearanceHistogram

AppearanceHistogram::AppearanceHistogram(int bins)
    : bins_(bins), mass_(static_cast<std::size_t>(bins) * kSlices, 0.0) {
    if (bins <= 0) {
        throw InputError("histogram bin count must be positive");
    }
}

AppearanceHistogram::AppearanceHistogram(int bins, std::vector<double> mass)
    : bins_(bins), mass_(std::move(mass)) {
    if (bins <= 0) {
        throw InputError("histogram bin count must be positive");
    }
    if (mass_.size() != static_cast<std::size_t>(bins) * kSlices) {
        throw InputError("histogram payload size does not match 6 x bins");
    }
    for (double m : mass_) {
        if (!(m >= 0.0) || !std::isfinite(m)) {
            throw InputError("histogram mass must be finite and non-negative");
        }
    }
}

std::span<const double> AppearanceHistogram::slice(int index) const {
    return std::span<const double>(mass_).subspan(static_cast<std::size_t>(index) * bins_,
                                                  static_cast<std::size_t>(bins_));
}

std::span<double> AppearanceHistogram::slice(int index) {
    return std::span<double>(mass_).subspan(static_cast<std::size_t>(index) * bins_,
                                            static_cast<std::size_t>(bins_));
}

void AppearanceHistogram::normalize() {
    for (int s = 0; s < kSlices; ++s) {
        auto values = slice(s);
        const double total = std::accumulate(values.begin(), values.end(), 0.0);
        if (!(total > 0.0)) {
            throw InputError("cannot normalize an empty histogram slice");
        }
        for (double& v : values) {
            v /= total;
        }
    }
}

bool AppearanceHistogram::is_normalized(double tolerance) const {
    if (bins_ == 0) {
        return false;
    }
    for (int s = 0; s < kSlices; ++s) {
        auto values = slice(s);
        const double total = std::accumulate(values.begin(), values.end(), 0.0);
        if (std::abs(total - 1.0) > tolerance) {
            return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// CameraTopology

CameraTopology::CameraTopology() : directions_{"N", "S", "E", "W"} {}

void CameraTopology::add_camera(CameraId camera) { cameras_.insert(camera); }

void CameraTopology::require_camera(CameraId camera) const {
    if (!has_camera(camera)) {
        throw ConfigError(camera_message("unknown camera id", camera));
    }
}

void CameraTopology::add_edge(CameraId u, CameraId v) {
    require_camera(u);
    require_camera(v);
    edges_.insert(edge_key(u, v));
}

void CameraTopology::set_window(CameraId from, CameraId to, TravelWindow window) {
    require_camera(from);
    require_camera(to);
    if (!adjacent(from, to)) {
        std::ostringstream os;
        os << "travel window set on non-edge " << from << " -> " << to;
        throw ConfigError(os.str());
    }
    if (!(window.min_gap >= 0.0) || !(window.min_gap <= window.max_gap)) {
        std::ostringstream os;
        os << "invalid travel window for " << from << " -> " << to << ": [" << window.min_gap
           << ", " << window.max_gap << "]";
        throw ConfigError(os.str());
    }
    windows_[{from, to}] = window;
}

void CameraTopology::set_direction_probability(CameraId from, const std::string& leave,
                                               CameraId to, const std::string& enter,
                                               double probability) {
    require_camera(from);
    require_camera(to);
    if (!(probability >= 0.0 && probability <= 1.0)) {
        throw ConfigError("direction probability outside [0, 1]");
    }
    direction_table_[DirectionKey{from, leave, to, enter}] = probability;
}

void CameraTopology::set_markov2(CameraId previous, CameraId current, CameraId next,
                                 double probability) {
    require_camera(previous);
    require_camera(current);
    require_camera(next);
    if (!(probability >= 0.0 && probability <= 1.0)) {
        throw ConfigError("markov2 probability outside [0, 1]");
    }
    markov2_table_[Markov2Key{previous, current, next}] = probability;
}

void CameraTopology::set_directions(std::vector<std::string> labels) {
    if (labels.empty()) {
        throw ConfigError("direction label set must not be empty");
    }
    directions_ = std::move(labels);
}

bool CameraTopology::adjacent(CameraId u, CameraId v) const {
    return edges_.contains(edge_key(u, v));
}

std::vector<CameraId> CameraTopology::neighbors(CameraId camera) const {
    require_camera(camera);
    std::vector<CameraId> out;
    for (const auto& [a, b] : edges_) {
        if (a == camera) {
            out.push_back(b);
        } else if (b == camera) {
            out.push_back(a);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::optional<TravelWindow> CameraTopology::find_window(CameraId from, CameraId to) const {
    auto it = windows_.find({from, to});
    if (it == windows_.end()) {
        return std::nullopt;
    }
    return it->second;
}

const TravelWindow& CameraTopology::window(CameraId from, CameraId to) const {
    auto it = windows_.find({from, to});
    if (it == windows_.end()) {
        std::ostringstream os;
        os << "no travel window for " << from << " -> " << to;
        throw ConfigError(os.str());
    }
    return it->second;
}

double CameraTopology::direction_probability(CameraId from, const std::string& leave, CameraId to,
                                             const std::string& enter) const {
    auto it = direction_table_.find(DirectionKey{from, leave, to, enter});
    if (it != direction_table_.end()) {
        return it->second;
    }
    return strict_ ? 0.0 : 1.0 / static_cast<double>(directions_.size());
}

double CameraTopology::markov2(CameraId previous, CameraId current, CameraId next) const {
    auto it = markov2_table_.find(Markov2Key{previous, current, next});
    if (it != markov2_table_.end()) {
        return it->second;
    }
    if (strict_) {
        return 0.0;
    }
    const auto n = neighbors(current).size();
    return n == 0 ? 0.0 : 1.0 / static_cast<double>(n);
}

bool CameraTopology::direction_table_normalized(double tolerance) const {
    std::map<std::pair<CameraId, std::string>, double> totals;
    for (const auto& [key, p] : direction_table_) {
        totals[{key.from, key.leave}] += p;
    }
    return std::all_of(totals.begin(), totals.end(),
                       [&](const auto& kv) { return std::abs(kv.second - 1.0) <= tolerance; });
}

std::vector<std::vector<CameraId>> CameraTopology::components() const {
    std::map<CameraId, std::vector<CameraId>> adjacency;
    for (CameraId c : cameras_) {
        adjacency[c];
    }
    for (const auto& [a, b] : edges_) {
        if (a != b) {
            adjacency[a].push_back(b);
            adjacency[b].push_back(a);
        }
    }
    std::set<CameraId> seen;
    std::vector<std::vector<CameraId>> out;
    for (CameraId start : cameras_) {
        if (seen.contains(start)) {
            continue;
        }
        std::vector<CameraId> component;
        std::queue<CameraId> frontier;
        frontier.push(start);
        seen.insert(start);
        while (!frontier.empty()) {
            CameraId c = frontier.front();
            frontier.pop();
            component.push_back(c);
            for (CameraId n : adjacency[c]) {
                if (seen.insert(n).second) {
                    frontier.push(n);
                }
            }
        }
        std::sort(component.begin(), component.end());
        out.push_back(std::move(component));
    }
    return out;
}

void CameraTopology::validate() const {
    for (const auto& [a, b] : edges_) {
        require_camera(a);
        require_camera(b);
    }
    for (const auto& [pair, w] : windows_) {
        if (!adjacent(pair.first, pair.second)) {
            std::ostringstream os;
            os << "travel window on non-edge " << pair.first << " -> " << pair.second;
            throw ConfigError(os.str());
        }
        if (!(w.min_gap >= 0.0) || !(w.min_gap <= w.max_gap)) {
            throw ConfigError("travel window with min > max or negative min");
        }
    }
    for (const auto& [key, p] : direction_table_) {
        require_camera(key.from);
        require_camera(key.to);
    }
    for (const auto& [key, p] : markov2_table_) {
        require_camera(key.previous);
        require_camera(key.current);
        require_camera(key.next);
    }
}

// ---------------------------------------------------------------------------
// CandidateLinkSet

std::optional<int> CandidateLinkSet::index_of(ObservationId id) const {
    auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
    if (it == ids_.end() || *it != id) {
        return std::nullopt;
    }
    return static_cast<int>(it - ids_.begin());
}

std::size_t CandidateLinkSet::total_pair_count() const {
    std::size_t total = 0;
    for (std::size_t i = 0; i < ids_.size(); ++i) {
        total += pair_count(static_cast<int>(i));
    }
    return total;
}

std::vector<LinkPair> CandidateLinkSet::pairs(int obs) const {
    std::vector<LinkPair> out;
    out.reserve(pair_count(obs));
    for (LinkId p : incoming(obs)) {
        for (LinkId q : outgoing(obs)) {
            out.push_back(LinkPair{p, q});
        }
    }
    return out;
}

std::optional<int> CandidateLinkSet::pair_observation(LinkPair pair) const {
    if (pair.in < 0 || pair.out < 0 || static_cast<std::size_t>(pair.in) >= links_.size() ||
        static_cast<std::size_t>(pair.out) >= links_.size()) {
        return std::nullopt;
    }
    const Link& p = links_[static_cast<std::size_t>(pair.in)];
    const Link& q = links_[static_cast<std::size_t>(pair.out)];
    if (p.kind == LinkKind::sink_virtual || q.kind == LinkKind::source_virtual) {
        return std::nullopt;
    }
    if (p.to != q.from) {
        return std::nullopt;
    }
    return p.to;
}

std::optional<LinkId> CandidateLinkSet::find(int from, int to) const {
    if (from == kSource) {
        if (to < 0 || static_cast<std::size_t>(to) >= ids_.size()) {
            return std::nullopt;
        }
        return source_link(to);
    }
    if (from < 0 || static_cast<std::size_t>(from) >= ids_.size()) {
        return std::nullopt;
    }
    const auto& out = outgoing_[static_cast<std::size_t>(from)];
    auto it = std::lower_bound(out.begin(), out.end(), to, [&](LinkId id, int target) {
        return links_[static_cast<std::size_t>(id)].to < target;
    });
    if (it == out.end() || links_[static_cast<std::size_t>(*it)].to != to) {
        return std::nullopt;
    }
    return *it;
}

std::size_t CandidateLinkSet::ordinary_count() const {
    return static_cast<std::size_t>(std::count_if(
        links_.begin(), links_.end(), [](const Link& l) { return l.kind == LinkKind::ordinary; }));
}

void validate_observations(const CameraTopology& topology,
                           std::span<const Observation> observations) {
    for (std::size_t k = 0; k < observations.size(); ++k) {
        const Observation& o = observations[k];
        if (!topology.has_camera(o.camera)) {
            std::ostringstream os;
            os << "observation " << o.id << " references unknown camera id " << o.camera;
            throw ConfigError(os.str());
        }
        if (!(o.t_enter <= o.t_leave)) {
            std::ostringstream os;
            os << "observation " << o.id << " leaves before it enters";
            throw InputError(os.str());
        }
        if (k > 0) {
            const Observation& prev = observations[k - 1];
            if (prev.id == o.id) {
                std::ostringstream os;
                os << "duplicate observation id " << o.id;
                throw InputError(os.str());
            }
            if (prev.id > o.id) {
                throw InputError("observations must be sorted by increasing id");
            }
            if (!(prev.t_enter < o.t_enter)) {
                std::ostringstream os;
                os << "observation ids must be strictly increasing in t_enter (id " << o.id
                   << ")";
                throw InputError(os.str());
            }
        }
    }
}

std::vector<CameraId> neighbors(const CameraTopology& topology, CameraId camera) {
    return topology.neighbors(camera);
}

CandidateLinkSet build_candidate_links(const CameraTopology& topology,
                                       std::span<const Observation> observations) {
    validate_observations(topology, observations);

    const int n = static_cast<int>(observations.size());
    double widest = 0.0;
    for (const auto& [pair, w] : topology.windows()) {
        widest = std::max(widest, w.max_gap);
    }

    std::vector<std::vector<int>> successors(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const Observation& from = observations[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < n; ++j) {
            const Observation& to = observations[static_cast<std::size_t>(j)];
            const double gap = to.t_enter - from.t_leave;
            // t_enter is increasing, so no later j can fit any window.
            if (gap > widest) {
                break;
            }
            if (!(gap > 0.0) || !topology.adjacent(from.camera, to.camera)) {
                continue;
            }
            if (!topology.window(from.camera, to.camera).contains(gap)) {
                continue;
            }
            if (topology.direction_probability(from.camera, from.dir_leave, to.camera,
                                               to.dir_enter) <= 0.0) {
                continue;
            }
            successors[static_cast<std::size_t>(i)].push_back(j);
        }
    }

    CandidateLinkSet set;
    set.incoming_.resize(static_cast<std::size_t>(n));
    set.outgoing_.resize(static_cast<std::size_t>(n));
    set.ids_.reserve(static_cast<std::size_t>(n));
    set.cameras_.reserve(static_cast<std::size_t>(n));
    for (const Observation& o : observations) {
        set.ids_.push_back(o.id);
        set.cameras_.push_back(o.camera);
    }

    auto emit = [&](LinkKind kind, int from, int to) {
        Link link;
        link.id = static_cast<LinkId>(set.links_.size());
        link.kind = kind;
        link.from = from;
        link.to = to;
        if (from != kSource) {
            auto& out = set.outgoing_[static_cast<std::size_t>(from)];
            link.out_slot = static_cast<int>(out.size());
            out.push_back(link.id);
        }
        if (to != kSink) {
            auto& in = set.incoming_[static_cast<std::size_t>(to)];
            link.in_slot = static_cast<int>(in.size());
            in.push_back(link.id);
        }
        set.links_.push_back(link);
    };

    // Lexicographic (from, to) order: source row first, sink column last.
    for (int i = 0; i < n; ++i) {
        emit(LinkKind::source_virtual, kSource, i);
    }
    for (int i = 0; i < n; ++i) {
        for (int j : successors[static_cast<std::size_t>(i)]) {
            emit(LinkKind::ordinary, i, j);
        }
        emit(LinkKind::sink_virtual, i, kSink);
    }
    return set;
}

}  // namespace camnet
