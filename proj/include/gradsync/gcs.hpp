#pragma once

#include "gradsync/topology.hpp"

#include <optional>
#include <span>
#include <vector>

namespace gradsync {

enum class Mode { Slow, Fast };

struct LogicalClockState {
    NodeId owner = 0;
    double L = 0.0;
    Mode mode = Mode::Slow;
    double last_tick_H = 0.0;
};

/// Per-edge skew threshold unit.
double kappa_for_edge(double epsilon, double lambda);

/// One incident estimate edge as seen at a single evaluation instant.
/// Edges with no estimate yet are simply absent from the view.
struct NeighborEstimate {
    double value;    // read_estimate at the evaluation instant
    double epsilon;  // certified edge uncertainty
    double kappa;    // lambda * epsilon
};

using NeighborView = std::vector<NeighborEstimate>;

/// Fast iff some level s in [1, s_max] has a neighbor certifiably ahead by at
/// least (2s-1)*kappa while no neighbor is possibly behind by more than
/// 2s*kappa. Evaluated on certified-pessimistic leads (value - epsilon) and
/// certified-optimistic lags (value + epsilon).
Mode evaluate_fast_condition(double L_self, const NeighborView& view, long s_max);

/// Trigger evaluation with every lead and lag reduced by `shift` (the view's
/// quantities all decay at the fast-mode surplus rate while a node runs fast).
bool fast_condition_at_shift(std::span<const double> lead, std::span<const double> lag,
                             std::span<const double> kappa, double shift, long s_max);

/// Smallest k >= 1 such that the trigger fails at shift k*step, assuming it
/// holds at shift 0. The trigger is monotone in the shift, so this is the
/// exact tick at which a fast node drops back to slow absent new estimates.
long first_fast_failure_shift(std::span<const double> lead, std::span<const double> lag,
                              std::span<const double> kappa, double step, long s_max);

/// Advances L over a hardware interval at the rate fixed for that interval.
void advance_logical_clock(LogicalClockState& state, double dH, Mode mode_for_interval,
                           double mu);

/// Level cap: no true skew can exceed the global cap under the validity
/// invariants, so higher levels are vacuous.
long compute_s_max(double effective_diameter, double kappa_min, double kappa_max);

} // namespace gradsync
