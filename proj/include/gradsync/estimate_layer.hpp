#pragma once

#include "gradsync/topology.hpp"

#include <deque>
#include <map>
#include <optional>
#include <vector>

namespace gradsync {

struct DirectMessage {
    NodeId sender;
    double payload_L;  // sender's logical time at the send event
    long seq;
};

struct BeaconKey {
    NodeId origin;
    long id;
    auto operator<=>(const BeaconKey&) const = default;
};

struct ReceptionRecord {
    BeaconKey beacon;
    double local_H;
    double local_L;
};

struct TimestampExchange {
    NodeId from;
    BeaconKey beacon;
    double remote_L;  // sender's logical time at its reception of the beacon
};

/// One node's anchored estimate of the remote endpoint's logical clock on a
/// single estimate edge. Contract: after the first update, the read value is
/// always within the edge's certified epsilon of the true remote clock.
struct EstimateRecord {
    int edge_index = -1;
    NodeId remote = -1;
    EdgeKind kind = EdgeKind::Direct;
    double epsilon = 0.0;
    double kappa = 0.0;  // lambda * epsilon, cached by the engine

    bool initialized = false;
    double anchor_H = 0.0;
    double anchor_value = 0.0;
    long last_seq = -1;        // direct-message freshness
    long last_beacon_id = -1;  // RBS anchor freshness
};

/// Applies a direct message; stale (out-of-order) messages are ignored.
/// Returns true if the record was updated. Throws on sender mismatch.
bool on_direct_message(EstimateRecord& rec, const DirectMessage& msg, double now_H,
                       LinkBounds link, const SystemParams& p);

/// Per-node store of beacon reception timestamps; keeps the most recent
/// records per origin within a bounded window.
class ReceptionStore {
public:
    static constexpr int kWindow = 4;

    /// Returns false (and stores nothing) for a duplicate (origin, id).
    bool add(const ReceptionRecord& r);
    const ReceptionRecord* find(BeaconKey beacon) const;

private:
    std::map<NodeId, std::deque<ReceptionRecord>> by_origin_;
};

enum class ExchangeResult { Applied, StaleBeacon, BeaconMismatch };

/// Re-anchors an RBS record at the local reception of the exchanged beacon.
ExchangeResult apply_exchange(EstimateRecord& rec, const ReceptionRecord& local,
                              const TimestampExchange& ex);

/// Anchor value advanced at the reader's own hardware rate; nullopt before
/// the first update.
std::optional<double> read_estimate(const EstimateRecord& rec, double now_H);

} // namespace gradsync
