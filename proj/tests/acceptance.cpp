// Acceptance suite: one line per criterion, nonzero exit if any fails.
// Runs are sequential; the shared 80-run matrix backs criteria 1, 2, and 4.

#include "gradsync/metrics.hpp"
#include "gradsync/scenario_config.hpp"
#include "gradsync/simengine.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace gradsync;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Criterion {
    const char* name;
    bool pass = true;
    std::string detail;
};

void fail(Criterion& c, const std::string& why) {
    c.pass = false;
    if (c.detail.empty())
        c.detail = why;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Independent oracle for criterion 7: exhaustive simple-path enumeration.
void enum_paths(const EstimateGraph& eg, NodeId cur, NodeId target, double acc,
                std::vector<char>& visited, double& best) {
    if (cur == target) {
        best = std::min(best, acc);
        return;
    }
    for (const auto& [v, ei] : eg.adjacency[cur]) {
        if (visited[v])
            continue;
        visited[v] = 1;
        enum_paths(eg, v, target, acc + eg.edges[ei].epsilon, visited, best);
        visited[v] = 0;
    }
}

double oracle_distance(const EstimateGraph& eg, NodeId u, NodeId v) {
    if (u == v)
        return 0.0;
    std::vector<char> visited(eg.n, 0);
    visited[u] = 1;
    double best = kInf;
    enum_paths(eg, u, v, 0.0, visited, best);
    return best;
}

Scenario base_scenario(TopologyKind kind, int n, DriftKind drift, DelayKind delay,
                       std::uint64_t seed) {
    Scenario sc;
    sc.topology.kind = kind;
    sc.topology.n = n;
    sc.topology.radius = 0.35;
    sc.drift = drift;
    sc.delay = delay;
    sc.duration = 10000.0;
    sc.sample_period = 1.0;
    sc.seed = seed;
    return sc;
}

} // namespace

int main() {
    std::vector<Criterion> crit = {
        {"estimate soundness across the scenario matrix"},
        {"clock validity invariants across the scenario matrix"},
        {"global skew bounded by 4x the effective diameter"},
        {"gradient skew bound with C_L = 8"},
        {"adjacent-pair skew ratio is diameter-insensitive"},
        {"RBS shrinks the effective diameter"},
        {"effective distances match exhaustive enumeration"},
        {"bitwise deterministic replay"},
        {"drift-free network never leaves slow mode"},
    };

    // --- shared 80-run matrix for criteria 1, 2, 4 -------------------------
    auto t0 = std::chrono::steady_clock::now();
    struct Combo {
        TopologyKind kind;
        int n;
    };
    const Combo combos[] = {{TopologyKind::Path, 16},
                            {TopologyKind::Ring, 16},
                            {TopologyKind::Grid, 16},
                            {TopologyKind::RandomGeometric, 32}};
    const DriftKind drifts[] = {DriftKind::AlternatingExtremes, DriftKind::RampAcrossNodes};
    const DelayKind delays[] = {DelayKind::SeededUniform, DelayKind::AlternatingExtremes};

    int runs = 0;
    for (const auto& combo : combos)
        for (std::uint64_t seed = 0; seed < 5; ++seed)
            for (DriftKind drift : drifts)
                for (DelayKind delay : delays) {
                    Scenario sc = base_scenario(combo.kind, combo.n, drift, delay, seed);
                    Trace tr = run_scenario(sc);
                    ++runs;
                    char tag[128];
                    std::snprintf(tag, sizeof tag, "kind=%d n=%d seed=%llu drift=%d delay=%d",
                                  static_cast<int>(combo.kind), combo.n,
                                  static_cast<unsigned long long>(seed),
                                  static_cast<int>(drift), static_cast<int>(delay));

                    if (tr.validity.soundness_violations != 0)
                        fail(crit[0], std::string("soundness violations at ") + tag);
                    if (tr.validity.soundness_checks == 0)
                        fail(crit[0], std::string("no soundness checks at ") + tag);

                    if (tr.validity.rate_violations != 0 ||
                        tr.validity.monotonicity_violations != 0 ||
                        tr.validity.min_progress_violations != 0)
                        fail(crit[1], std::string("validity violation at ") + tag);

                    auto rep = compute_skew_report(tr, tr.eg);
                    auto res = check_gradient_bound(rep, sc, GradientBoundSpec{});
                    if (!res.pass) {
                        char buf[192];
                        std::snprintf(buf, sizeof buf, "ratio %.4f at %s", res.max_ratio,
                                      tag);
                        fail(crit[3], buf);
                    }
                }
    auto t1 = std::chrono::steady_clock::now();
    double matrix_s = std::chrono::duration<double>(t1 - t0).count();
    if (runs != 80)
        fail(crit[0], "expected 80 runs");
    if (matrix_s >= 180.0)
        fail(crit[0], "matrix exceeded the 3 minute budget");
    std::printf("# scenario matrix: %d runs in %.1f s\n", runs, matrix_s);

    // --- criterion 3: global skew vs effective diameter --------------------
    {
        Scenario sc = base_scenario(TopologyKind::Path, 32, DriftKind::RampAcrossNodes,
                                    DelayKind::SeededUniform, 0);
        Trace tr = run_scenario(sc);
        auto rep = compute_skew_report(tr, tr.eg);
        double cap = 4.0 * tr.effective_diameter;
        for (std::size_t i = 0; i < rep.global_skew.size(); ++i)
            if (rep.global_skew[i] > cap) {
                char buf[128];
                std::snprintf(buf, sizeof buf, "skew %.6f > %.6f at t=%.1f",
                              rep.global_skew[i], cap, rep.sample_times[i]);
                fail(crit[2], buf);
                break;
            }
    }

    // --- criterion 5: adjacent-pair ratio across path sizes ----------------
    {
        for (std::uint64_t seed = 0; seed < 3; ++seed) {
            double a8 = 0.0, a64 = 0.0;
            for (int n : {8, 16, 32, 64}) {
                Scenario sc = base_scenario(TopologyKind::Path, n,
                                            DriftKind::RampAcrossNodes,
                                            DelayKind::SeededUniform, seed);
                Trace tr = run_scenario(sc);
                auto rep = compute_skew_report(tr, tr.eg);
                double worst = 0.0;
                for (const auto& ps : rep.pairs)
                    if (ps.v == ps.u + 1)  // network-adjacent on a path
                        worst = std::max(worst, ps.ratio);
                if (n == 8)
                    a8 = worst;
                if (n == 64)
                    a64 = worst;
            }
            if (!(a8 > 0.0) || a64 / a8 >= 3.0) {
                char buf[128];
                std::snprintf(buf, sizeof buf,
                              "seed %llu: A(64)/A(8) = %.4f/%.4f = %.4f",
                              static_cast<unsigned long long>(seed), a64, a8,
                              a8 > 0 ? a64 / a8 : kInf);
                fail(crit[4], buf);
            }
        }
    }

    // --- criterion 6: RBS diameter reduction on Path64 ---------------------
    {
        TopologySpec spec;
        spec.n = 64;
        auto g = build_network(spec);
        SystemParams p;
        auto with = build_estimate_graph(g, p);
        SystemParams off = p;
        off.rbs_enabled = false;
        auto without = build_estimate_graph(g, off);
        double d_on = effective_diameter(with);
        double d_off = effective_diameter(without);
        double eps_rbs = rbs_uncertainty(p, 1.0);
        double eps_dir = direct_uncertainty({0.0, 1.0}, p);
        double structural = std::ceil(63.0 / 2.0) * eps_rbs + eps_dir;
        if (d_on / d_off > 0.25)
            fail(crit[5], "reduction ratio " + std::to_string(d_on / d_off));
        if (d_on > structural + 1e-12)
            fail(crit[5], "diameter above the structural bound");
    }

    // --- criterion 7: distances vs exhaustive enumeration ------------------
    {
        std::mt19937 rng(20240817);
        std::uniform_int_distribution<int> nd(1, 6);
        std::uniform_real_distribution<double> wd(0.01, 10.0);
        std::bernoulli_distribution ed(0.5);
        for (int iter = 0; iter < 200 && crit[6].pass; ++iter) {
            EstimateGraph eg;
            eg.n = nd(rng);
            for (int u = 0; u < eg.n; ++u)
                for (int v = u + 1; v < eg.n; ++v)
                    if (ed(rng))
                        eg.edges.push_back({u, v, wd(rng), EdgeKind::Direct, -1});
            eg.rebuild_adjacency();
            for (int u = 0; u < eg.n && crit[6].pass; ++u) {
                auto dist = single_source_distances(eg, u);
                for (int v = 0; v < eg.n; ++v) {
                    double oracle = oracle_distance(eg, u, v);
                    if (std::isinf(oracle) != std::isinf(dist[v]) ||
                        (!std::isinf(oracle) &&
                         std::abs(dist[v] - oracle) >
                             1e-12 * std::max(1.0, std::abs(oracle)))) {
                        fail(crit[6], "mismatch at graph " + std::to_string(iter));
                        break;
                    }
                }
            }
        }
    }

    // --- criterion 8: bitwise deterministic replay --------------------------
    {
        namespace fs = std::filesystem;
        Scenario sc = base_scenario(TopologyKind::RandomGeometric, 32,
                                    DriftKind::SeededRandomWalk,
                                    DelayKind::SeededUniform, 3);
        sc.duration = 500.0;
        fs::path root = fs::temp_directory_path() / "gradsync_acceptance";
        fs::create_directories(root / "a");
        fs::create_directories(root / "b");
        for (const char* sub : {"a", "b"}) {
            Trace tr = run_scenario(sc);
            auto rep = compute_skew_report(tr, tr.eg);
            fs::path d = root / sub;
            export_trace_csv(tr, (d / "trace.csv").string());
            export_skew_csv(rep, (d / "skew.csv").string());
            export_pairs_csv(rep, (d / "pairs.csv").string());
        }
        for (const char* f : {"trace.csv", "skew.csv", "pairs.csv"})
            if (slurp((root / "a" / f).string()) != slurp((root / "b" / f).string()))
                fail(crit[7], std::string(f) + " differs between replays");
        fs::remove_all(root);
    }

    // --- criterion 9: zero drift is a slow-mode fixpoint --------------------
    {
        Scenario sc = base_scenario(TopologyKind::Path, 8, DriftKind::Constant,
                                    DelayKind::FixedMax, 0);
        sc.params.rho = 0.0;
        Trace tr = run_scenario(sc);
        double eps_dir = tr.eg.edges[0].epsilon;
        auto rep = compute_skew_report(tr, tr.eg);
        for (double s : rep.global_skew)
            if (s > eps_dir + 1e-9) {
                fail(crit[8], "skew " + std::to_string(s) + " above one hop");
                break;
            }
        double warmup = rep.warmup;
        for (const auto& row : tr.rows)
            if (row.t >= warmup && row.mode == Mode::Fast) {
                fail(crit[8], "fast mode at t = " + std::to_string(row.t));
                break;
            }
    }

    bool all = true;
    for (std::size_t i = 0; i < crit.size(); ++i) {
        all = all && crit[i].pass;
        std::printf("criterion %zu: %s - %s%s%s\n", i + 1,
                    crit[i].pass ? "PASS" : "FAIL", crit[i].name,
                    crit[i].detail.empty() ? "" : " :: ",
                    crit[i].detail.c_str());
    }
    return all ? 0 : 1;
}
