#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace camnet {

using CameraId = int;
using ObservationId = std::int64_t;
using LinkId = int;

inline constexpr int kRegions = 2;   // lower, upper
inline constexpr int kChannels = 3;  // R, G, B
inline constexpr int kSlices = kRegions * kChannels;
inline constexpr int kDefaultBins = 256;

/// Color histogram of one object transit: kRegions x kChannels slices of
/// `bins` values each, stored slice-major.
class AppearanceHistogram {
public:
    AppearanceHistogram() = default;
    explicit AppearanceHistogram(int bins);
    AppearanceHistogram(int bins, std::vector<double> mass);

    int bins() const { return bins_; }
    bool empty() const { return bins_ == 0; }

    static int slice_index(int region, int channel) { return region * kChannels + channel; }

    std::span<const double> slice(int index) const;
    std::span<double> slice(int index);
    std::span<const double> slice(int region, int channel) const {
        return slice(slice_index(region, channel));
    }

    const std::vector<double>& data() const { return mass_; }

    /// Rescales every slice to unit mass. Throws InputError on a zero or
    /// negative slice.
    void normalize();
    bool is_normalized(double tolerance = 1e-9) const;

    friend bool operator==(const AppearanceHistogram&, const AppearanceHistogram&) = default;

private:
    int bins_ = 0;
    std::vector<double> mass_;
};

struct Observation {
    ObservationId id = 0;
    CameraId camera = 0;
    AppearanceHistogram appearance;
    double t_enter = 0.0;
    double t_leave = 0.0;
    std::string dir_enter;
    std::string dir_leave;
};

struct TravelWindow {
    double min_gap = 0.0;
    double max_gap = 0.0;

    bool contains(double gap) const { return min_gap <= gap && gap <= max_gap; }
    friend bool operator==(const TravelWindow&, const TravelWindow&) = default;
};

struct DirectionKey {
    CameraId from = 0;
    std::string leave;
    CameraId to = 0;
    std::string enter;

    friend auto operator<=>(const DirectionKey&, const DirectionKey&) = default;
};

struct Markov2Key {
    CameraId previous = 0;
    CameraId current = 0;
    CameraId next = 0;

    friend auto operator<=>(const Markov2Key&, const Markov2Key&) = default;
};

/// Camera activity graph plus the spatio-temporal models attached to it.
///
/// Edges are unordered; a self-edge (u, u) lets an object re-enter the same
/// view. Travel windows are keyed by ordered camera pair and may only be set
/// on edges. Direction and second-order transition tables are sparse; how a
/// missing entry scores depends on the fallback mode:
///   - lenient (default): direction entries fall back to 1 / |directions|,
///     markov2 entries to 1 / |neighbors(current)|;
///   - strict: missing entries score 0.
class CameraTopology {
public:
    CameraTopology();

    void add_camera(CameraId camera);
    void add_edge(CameraId u, CameraId v);
    void set_window(CameraId from, CameraId to, TravelWindow window);
    void set_direction_probability(CameraId from, const std::string& leave, CameraId to,
                                   const std::string& enter, double probability);
    void set_markov2(CameraId previous, CameraId current, CameraId next, double probability);

    void set_directions(std::vector<std::string> labels);
    const std::vector<std::string>& directions() const { return directions_; }

    void set_strict(bool strict) { strict_ = strict; }
    bool strict() const { return strict_; }

    bool has_camera(CameraId camera) const { return cameras_.contains(camera); }
    bool adjacent(CameraId u, CameraId v) const;
    std::vector<CameraId> neighbors(CameraId camera) const;

    const TravelWindow& window(CameraId from, CameraId to) const;
    std::optional<TravelWindow> find_window(CameraId from, CameraId to) const;

    double direction_probability(CameraId from, const std::string& leave, CameraId to,
                                 const std::string& enter) const;
    double markov2(CameraId previous, CameraId current, CameraId next) const;

    /// True when, for every (from, leave) that has entries, the table sums to
    /// one over (to, enter) within `tolerance`.
    bool direction_table_normalized(double tolerance = 1e-9) const;

    const std::set<CameraId>& cameras() const { return cameras_; }
    const std::set<std::pair<CameraId, CameraId>>& edges() const { return edges_; }
    const std::map<std::pair<CameraId, CameraId>, TravelWindow>& windows() const { return windows_; }
    const std::map<DirectionKey, double>& direction_table() const { return direction_table_; }
    const std::map<Markov2Key, double>& markov2_table() const { return markov2_table_; }

    /// Connected components over the edge set, each sorted ascending.
    std::vector<std::vector<CameraId>> components() const;

    void validate() const;

private:
    void require_camera(CameraId camera) const;

    std::set<CameraId> cameras_;
    std::set<std::pair<CameraId, CameraId>> edges_;  // stored with first <= second
    std::map<std::pair<CameraId, CameraId>, TravelWindow> windows_;
    std::map<DirectionKey, double> direction_table_;
    std::map<Markov2Key, double> markov2_table_;
    std::vector<std::string> directions_;
    bool strict_ = false;
};

enum class LinkKind { ordinary, source_virtual, sink_virtual };

/// Endpoint sentinels. Real endpoints are positions in the observation
/// sequence the link set was built from.
inline constexpr int kSource = -1;
inline constexpr int kSink = std::numeric_limits<int>::max();

struct Link {
    LinkId id = 0;
    LinkKind kind = LinkKind::ordinary;
    int from = kSource;
    int to = kSink;
    int out_slot = -1;  // position in outgoing(from), ordinary and sink links
    int in_slot = -1;   // position in incoming(to), ordinary and source links

    bool is_virtual() const { return kind != LinkKind::ordinary; }
};

/// A predecessor/successor link pair through one observation.
struct LinkPair {
    LinkId in = 0;
    LinkId out = 0;

    friend auto operator<=>(const LinkPair&, const LinkPair&) = default;
};

/// The candidate link universe over a time-ordered observation sequence.
///
/// Link ids follow lexicographic (from, to) order with the source before
/// every observation and the sink after, so incoming(i) starts with the
/// source link and outgoing(i) ends with the sink link. Pair sets are the
/// full cross product incoming(i) x outgoing(i) and are not materialized.
class CandidateLinkSet {
public:
    CandidateLinkSet() = default;

    std::size_t observation_count() const { return ids_.size(); }
    std::size_t link_count() const { return links_.size(); }

    const std::vector<Link>& links() const { return links_; }
    const Link& link(LinkId id) const { return links_.at(static_cast<std::size_t>(id)); }

    const std::vector<LinkId>& incoming(int obs) const { return incoming_.at(obs); }
    const std::vector<LinkId>& outgoing(int obs) const { return outgoing_.at(obs); }
    LinkId source_link(int obs) const { return incoming_.at(obs).front(); }
    LinkId sink_link(int obs) const { return outgoing_.at(obs).back(); }

    ObservationId observation_id(int obs) const { return ids_.at(obs); }
    CameraId camera_of(int obs) const { return cameras_.at(obs); }
    const std::vector<ObservationId>& observation_ids() const { return ids_; }
    std::optional<int> index_of(ObservationId id) const;

    std::size_t pair_count(int obs) const { return incoming(obs).size() * outgoing(obs).size(); }
    std::size_t total_pair_count() const;
    std::vector<LinkPair> pairs(int obs) const;

    /// Observation through which a pair passes, or nullopt when the pair is
    /// not a member of any B(y).
    std::optional<int> pair_observation(LinkPair pair) const;

    std::optional<LinkId> find(int from, int to) const;

    std::size_t ordinary_count() const;

private:
    friend CandidateLinkSet build_candidate_links(const CameraTopology&,
                                                  std::span<const Observation>);

    std::vector<Link> links_;
    std::vector<std::vector<LinkId>> incoming_;
    std::vector<std::vector<LinkId>> outgoing_;
    std::vector<ObservationId> ids_;
    std::vector<CameraId> cameras_;
};

/// Builds the link universe: an ordinary link i -> j for every later
/// observation j on a camera adjacent to i's whose gap t_enter(j) - t_leave(i)
/// is positive, inside the ordered travel window, and whose direction
/// probability is non-zero; plus a source and a sink link per observation.
///
/// Observations must be sorted by strictly increasing id.
CandidateLinkSet build_candidate_links(const CameraTopology& topology,
                                       std::span<const Observation> observations);

/// Throws ConfigError for an unknown camera.
std::vector<CameraId> neighbors(const CameraTopology& topology, CameraId camera);

/// Structural validation of an observation sequence against a topology.
void validate_observations(const CameraTopology& topology,
                           std::span<const Observation> observations);

}  // namespace camnet
