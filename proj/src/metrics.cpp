#include "gradsync/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <memory>
#include <sstream>
#include <stdexcept>

namespace gradsync {

double default_warmup(const Scenario& sc) {
    return 2.0 * sc.params.delta_t + 2.0 * sc.params.delta_b + 4.0 * sc.topology.beta_max;
}

SkewReport compute_skew_report(const Trace& trace, const EstimateGraph& eg, double warmup) {
    const int n = eg.n;
    if (trace.scenario.topology.n != n)
        throw std::invalid_argument("trace and estimate graph node counts differ");
    if (trace.rows.size() % static_cast<std::size_t>(n) != 0)
        throw std::invalid_argument("trace rows are not a whole number of samples");
    if (warmup < 0.0)
        warmup = default_warmup(trace.scenario);

    SkewReport rep;
    rep.warmup = warmup;

    const std::size_t samples = trace.rows.size() / static_cast<std::size_t>(n);
    std::vector<double> pair_max(static_cast<std::size_t>(n) * n, 0.0);
    std::vector<double> l(n);
    for (std::size_t s = 0; s < samples; ++s) {
        const TraceRow* block = trace.rows.data() + s * static_cast<std::size_t>(n);
        double t = block[0].t;
        if (t + 1e-12 < warmup)
            continue;
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (int u = 0; u < n; ++u) {
            if (block[u].node != u || block[u].t != t)
                throw std::invalid_argument("trace rows not sorted by (t, node)");
            l[u] = block[u].L;
            lo = std::min(lo, l[u]);
            hi = std::max(hi, l[u]);
        }
        rep.sample_times.push_back(t);
        rep.global_skew.push_back(hi - lo);
        rep.global_skew_max = std::max(rep.global_skew_max, hi - lo);
        for (int u = 0; u < n; ++u)
            for (int v = u + 1; v < n; ++v) {
                double sk = std::abs(l[u] - l[v]);
                auto& m = pair_max[static_cast<std::size_t>(u) * n + v];
                m = std::max(m, sk);
            }
    }

    auto dist = all_pairs_distances(eg);
    double eps_min = eg.min_epsilon();
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v) {
            double d = dist[u][v];
            double sk = pair_max[static_cast<std::size_t>(u) * n + v];
            rep.pairs.push_back({u, v, d, sk, d > 0.0 ? sk / d : 0.0});
            rep.effective_diameter = std::max(rep.effective_diameter, d);
        }
    rep.dimensionless_diameter =
        std::isfinite(eps_min) && eps_min > 0.0 ? rep.effective_diameter / eps_min : 0.0;
    return rep;
}

BoundCheckResult check_gradient_bound(const SkewReport& report, const Scenario& sc,
                                      const GradientBoundSpec& spec) {
    if (spec.c_l <= 0.0)
        throw std::invalid_argument("C_L must be positive");
    BoundCheckResult res;
    if (report.pairs.empty())
        return res;
    if (report.dimensionless_diameter < 1.0)
        throw std::invalid_argument(
            "dimensionless diameter below 1: misconfigured epsilon floor");

    double base = spec.log_base;
    if (base <= 0.0)
        base = sc.params.rho > 0.0 ? 1.0 / sc.params.rho : 0.0;
    double log_term = 1.0;
    if (base > 1.0)
        log_term = std::max(1.0, std::log(report.dimensionless_diameter) / std::log(base));

    for (const PairStat& p : report.pairs) {
        double denom = p.dist * log_term;
        double ratio = denom > 0.0 ? p.max_skew / denom : 0.0;
        if (ratio > res.max_ratio) {
            res.max_ratio = ratio;
            res.worst_u = p.u;
            res.worst_v = p.v;
        }
    }
    res.pass = res.max_ratio <= spec.c_l;
    return res;
}

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f)
            std::fclose(f);
    }
};

using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_out(const std::string& path) {
    FilePtr f(std::fopen(path.c_str(), "wb"));
    if (!f)
        throw std::runtime_error("cannot open for writing: " + path);
    return f;
}

} // namespace

void export_trace_csv(const Trace& trace, const std::string& path) {
    FilePtr f = open_out(path);
    std::fputs("t,node,L,H,mode\n", f.get());
    for (const TraceRow& r : trace.rows)
        std::fprintf(f.get(), "%.12g,%d,%.12g,%.12g,%s\n", r.t, r.node, r.L, r.H,
                     r.mode == Mode::Fast ? "fast" : "slow");
}

void export_skew_csv(const SkewReport& report, const std::string& path) {
    FilePtr f = open_out(path);
    std::fputs("t,global_skew\n", f.get());
    for (std::size_t i = 0; i < report.sample_times.size(); ++i)
        std::fprintf(f.get(), "%.12g,%.12g\n", report.sample_times[i],
                     report.global_skew[i]);
}

void export_pairs_csv(const SkewReport& report, const std::string& path) {
    FilePtr f = open_out(path);
    std::fputs("u,v,dist,max_skew,ratio\n", f.get());
    for (const PairStat& p : report.pairs)
        std::fprintf(f.get(), "%d,%d,%.12g,%.12g,%.12g\n", p.u, p.v, p.dist, p.max_skew,
                     p.ratio);
}

std::vector<TraceRow> parse_trace_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open for reading: " + path);
    std::string line;
    if (!std::getline(in, line) || line != "t,node,L,H,mode")
        throw std::runtime_error("bad trace csv header in " + path);
    std::vector<TraceRow> rows;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        std::istringstream ss(line);
        std::string field;
        TraceRow r{};
        std::getline(ss, field, ',');
        r.t = std::stod(field);
        std::getline(ss, field, ',');
        r.node = std::stoi(field);
        std::getline(ss, field, ',');
        r.L = std::stod(field);
        std::getline(ss, field, ',');
        r.H = std::stod(field);
        std::getline(ss, field, ',');
        if (field != "fast" && field != "slow")
            throw std::runtime_error("bad mode field in " + path);
        r.mode = field == "fast" ? Mode::Fast : Mode::Slow;
        rows.push_back(r);
    }
    return rows;
}

} // namespace gradsync
