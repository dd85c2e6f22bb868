#pragma once

#include "camnet/affinity.hpp"
#include "camnet/dd.hpp"
#include "camnet/energy.hpp"
#include "camnet/model.hpp"

#include <cstddef>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace camnet {

enum class Algorithm { ldd, qdd };

enum class MessageKind { summary, labels, vote };

std::string to_string(MessageKind kind);

/// Delivered message as recorded in the log. Payloads are consumed on
/// delivery; the log keeps the envelope and the encoded size.
struct AgentMessage {
    int iteration = 0;  // 0 for the summary broadcast
    CameraId sender = 0;
    CameraId receiver = 0;
    MessageKind kind = MessageKind::summary;
    std::size_t bytes = 0;
};

struct EdgeCounter {
    std::size_t messages = 0;
    std::size_t bytes = 0;

    friend bool operator==(const EdgeCounter&, const EdgeCounter&) = default;
};

class MessageLog {
public:
    void append(const AgentMessage& message);

    const std::vector<AgentMessage>& messages() const { return messages_; }
    const std::map<std::pair<CameraId, CameraId>, EdgeCounter>& per_edge() const {
        return per_edge_;
    }
    std::size_t total_bytes() const { return total_bytes_; }
    std::size_t count(MessageKind kind) const;

    /// True when the counters match a recount of the message sequence.
    bool counters_consistent() const;

private:
    std::vector<AgentMessage> messages_;
    std::map<std::pair<CameraId, CameraId>, EdgeCounter> per_edge_;
    std::size_t total_bytes_ = 0;
};

/// Canonical encoding sizes: a 16-byte envelope, 17 bytes per shared-link
/// label (two observation ids and the label), 24 bytes per vote (camera,
/// conflicts, dual, primal), and per observation summary 36 bytes of fixed
/// fields plus the direction labels and 6 x bins histogram values.
inline constexpr std::size_t kEnvelopeBytes = 16;
inline constexpr std::size_t kLabelBytes = 17;
inline constexpr std::size_t kVoteBytes = 24;
std::size_t summary_bytes(const Observation& observation);

/// True iff every message's endpoints are distinct cameras joined by a
/// topology edge.
bool audit_locality(const MessageLog& log, const CameraTopology& topology);

void write_message_log_csv(std::ostream& os, const MessageLog& log);

struct DistributedResult {
    LinkingConfig config;  // over the global candidate link set
    RunReport report;
    MessageLog log;
};

/// Runs L-DD or Q-DD with one agent per camera. Phase 1: every camera sends
/// its observations to each neighbor, and each agent builds the link set and
/// costs over its own and its neighbors' observations. Phase 2, per
/// iteration: agents solve their subproblems, exchange labels of links
/// shared with a neighbor, flood (camera, conflicts, dual, primal) votes
/// through their component, and apply the consensus step to their own
/// copies. A scheduler barrier combines the votes of all components in
/// camera order and decides termination, so the report and configuration
/// are bit-identical to the centralized run on the same inputs.
DistributedResult run_distributed(Algorithm algorithm, const CameraTopology& topology,
                                  std::span<const Observation> observations,
                                  const AffinityConfig& affinity, const CbtfTable* cbtf,
                                  const DdOptions& options = {});

}  // namespace camnet
