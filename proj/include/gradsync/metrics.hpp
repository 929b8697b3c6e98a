#pragma once

#include "gradsync/simengine.hpp"

#include <string>
#include <vector>

namespace gradsync {

struct PairStat {
    NodeId u, v;
    double dist;      // effective distance in the estimate graph
    double max_skew;  // max |L_u - L_v| over samples after warmup
    double ratio;     // max_skew / dist
};

struct SkewReport {
    std::vector<double> sample_times;  // samples at or after warmup
    std::vector<double> global_skew;   // max-min logical value per sample
    double global_skew_max = 0.0;
    std::vector<PairStat> pairs;  // all unordered pairs, sorted (u, v)
    double effective_diameter = 0.0;
    double dimensionless_diameter = 0.0;  // D_eff / epsilon_min
    double warmup = 0.0;
};

struct GradientBoundSpec {
    double c_l = 8.0;
    double log_base = 0.0;  // 0 means 1/rho from the scenario
    double warmup = -1.0;   // <0 means 2*delta_t + 2*delta_b + 4*beta_max
};

struct BoundCheckResult {
    bool pass = true;
    double max_ratio = 0.0;  // max skew / (dist * max(1, log_base(D_hat)))
    NodeId worst_u = -1, worst_v = -1;
};

/// Default warmup window excluded from skew statistics.
double default_warmup(const Scenario& sc);

/// Exact maxima over all samples after warmup; warmup < 0 selects the default.
SkewReport compute_skew_report(const Trace& trace, const EstimateGraph& eg,
                               double warmup = -1.0);

BoundCheckResult check_gradient_bound(const SkewReport& report, const Scenario& sc,
                                      const GradientBoundSpec& spec);

// CSV exports; numbers printed with 12 significant digits, rows sorted.
void export_trace_csv(const Trace& trace, const std::string& path);
void export_skew_csv(const SkewReport& report, const std::string& path);
void export_pairs_csv(const SkewReport& report, const std::string& path);

/// Parses exported trace rows back; used for round-trip checks.
std::vector<TraceRow> parse_trace_csv(const std::string& path);

} // namespace gradsync
