#pragma once

#include "gradsync/clocks.hpp"
#include "gradsync/gcs.hpp"
#include "gradsync/topology.hpp"

#include <cstdint>
#include <vector>

namespace gradsync {

enum class DelayKind { FixedMax, FixedMin, SeededUniform, AlternatingExtremes };

struct DelayPolicy {
    DelayKind kind = DelayKind::SeededUniform;
    std::uint64_t seed = 0;
};

/// Delay for the msg_index-th message on the directed link from -> to.
/// Always within the link's bounds and deterministic in (seed, link, index).
double assign_delay(const DelayPolicy& policy, LinkBounds link, NodeId from, NodeId to,
                    long msg_index);

struct Scenario {
    TopologySpec topology;
    SystemParams params;
    DriftKind drift = DriftKind::Constant;
    DelayKind delay = DelayKind::SeededUniform;
    double duration = 1000.0;
    double sample_period = 1.0;
    double tick = 0.01;  // mode re-evaluation period, hardware time
    std::uint64_t seed = 0;
    double loss_prob = 0.0;  // config hook; 0 in all acceptance runs
    std::size_t event_cap = 50'000'000;

    void validate() const;
};

struct TraceRow {
    double t;
    NodeId node;
    double L;
    double H;
    Mode mode;
};

/// Online invariant counters accumulated during a run.
struct ValidityStats {
    long soundness_checks = 0;
    long soundness_violations = 0;
    double max_soundness_excess = 0.0;  // worst |error| - epsilon observed
    long rate_violations = 0;           // logical increment not dH or (1+mu)*dH
    long monotonicity_violations = 0;
    long min_progress_violations = 0;  // L(t) < t beyond rounding slack

    double max_direct_age_H = 0.0;  // hardware age of direct anchors at samples
    double max_rbs_age_H = 0.0;     // hardware age of RBS anchors at samples

    long direct_sent = 0, direct_delivered = 0, direct_leftover = 0;
    long beacons_emitted = 0, beacon_receptions = 0, beacon_leftover = 0;
    long exchanges_sent = 0, exchanges_delivered = 0, exchange_leftover = 0;
};

struct Trace {
    Scenario scenario;
    EstimateGraph eg;
    double effective_diameter = 0.0;
    long s_max = 1;
    std::vector<TraceRow> rows;  // sorted by (t, node)
    ValidityStats validity;
};

/// Deterministic discrete-event run: identical scenarios produce identical
/// traces bit for bit.
Trace run_scenario(const Scenario& sc);

} // namespace gradsync
