#pragma once

#include "gradsync/topology.hpp"

#include <cstdint>
#include <vector>

namespace gradsync {

enum class DriftKind { Constant, AlternatingExtremes, RampAcrossNodes, SeededRandomWalk };

/// Piecewise-constant hardware clock rate over [0, horizon); the last segment
/// extends past the horizon so queries never fall off the end.
struct DriftSchedule {
    DriftKind kind = DriftKind::Constant;
    std::vector<double> start;  // segment start times; start[0] == 0
    std::vector<double> rate;   // rate per segment, each in [1, 1+rho]
    double horizon = 0.0;

    double rate_at(double t) const;
};

DriftSchedule make_drift_schedule(DriftKind kind, NodeId node, int n, double rho,
                                  std::uint64_t seed, double horizon);

/// Continuous, strictly increasing, piecewise-linear hardware clock.
/// Precomputes prefix values at segment starts so point queries are O(log k).
struct HardwareClock {
    NodeId owner = 0;
    DriftSchedule schedule;
    double h0 = 0.0;

    HardwareClock() = default;
    HardwareClock(NodeId owner, DriftSchedule sched, double h0 = 0.0);

    double value_at(double t) const;

    /// H(t2) - H(t1); requires 0 <= t1 <= t2.
    double interval(double t1, double t2) const;

    /// Smallest t2 >= t1 with H(t2) - H(t1) == dh.
    double time_for_interval(double t1, double dh) const;

    // Cursor-hinted variants for monotone query sequences (the cursor is a
    // segment index owned by the caller).
    double value_at(double t, std::size_t& cursor) const;
    double time_for_interval(double t1, double dh, std::size_t& cursor) const;

private:
    std::vector<double> prefix_;  // H at each segment start
    std::size_t segment_for(double t) const;
};

/// Exact integral of the rate function over [t1, t2].
double hardware_interval(const HardwareClock& c, double t1, double t2);

} // namespace gradsync
