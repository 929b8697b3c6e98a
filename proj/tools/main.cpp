#include "gradsync/metrics.hpp"
#include "gradsync/scenario_config.hpp"
#include "gradsync/simengine.hpp"
#include "gradsync/topology.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace gradsync;

namespace {

struct RunResult {
    Trace trace;
    SkewReport report;
    BoundCheckResult bound;
};

RunResult run_and_report(const Scenario& sc) {
    RunResult r;
    r.trace = run_scenario(sc);
    r.report = compute_skew_report(r.trace, r.trace.eg);
    r.bound = check_gradient_bound(r.report, sc, GradientBoundSpec{});
    return r;
}

void write_outputs(const RunResult& r, const fs::path& dir) {
    fs::create_directories(dir);
    export_trace_csv(r.trace, (dir / "trace.csv").string());
    export_skew_csv(r.report, (dir / "skew.csv").string());
    export_pairs_csv(r.report, (dir / "pairs.csv").string());
}

void print_summary(const RunResult& r) {
    std::printf("effective_diameter = %.12g\n", r.trace.effective_diameter);
    std::printf("global_skew_max = %.12g\n", r.report.global_skew_max);
    std::printf("gradient_ratio_max = %.12g\n", r.bound.max_ratio);
    std::printf("soundness_violations = %ld\n", r.trace.validity.soundness_violations);
    std::printf("bound_check = %s\n", r.bound.pass ? "pass" : "fail");
}

const char* kind_name(EdgeKind k) {
    return k == EdgeKind::Direct ? "direct" : "rbs";
}

int cmd_graph(const std::string& scenario_path, bool distances) {
    Scenario sc = load_scenario_file(scenario_path);
    TopologySpec tspec = sc.topology;
    tspec.seed = sc.seed;
    NetworkGraph g = build_network(tspec);
    EstimateGraph eg = build_estimate_graph(g, sc.params);
    for (const EstimateEdge& e : eg.edges) {
        if (e.kind == EdgeKind::Rbs)
            std::printf("%d %d %s %.12g %d\n", e.u, e.v, kind_name(e.kind), e.epsilon,
                        e.relay);
        else
            std::printf("%d %d %s %.12g\n", e.u, e.v, kind_name(e.kind), e.epsilon);
    }
    std::printf("diameter %.12g\n", effective_diameter(eg));
    if (distances) {
        auto d = all_pairs_distances(eg);
        for (int u = 0; u < eg.n; ++u) {
            for (int v = 0; v < eg.n; ++v)
                std::printf("%s%.12g", v == 0 ? "" : ",", d[u][v]);
            std::printf("\n");
        }
    }
    return 0;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::size_t pos = 0;
    while (true) {
        auto next = s.find(sep, pos);
        if (next == std::string::npos) {
            parts.push_back(s.substr(pos));
            break;
        }
        parts.push_back(s.substr(pos, next - pos));
        pos = next + 1;
    }
    return parts;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"gradient clock synchronization simulator"};
    app.require_subcommand(1);

    std::string scenario_path, out_dir, vary;
    bool no_rbs = false, distances = false;

    auto* run = app.add_subcommand("run", "run one scenario and check the skew bound");
    run->add_option("--scenario", scenario_path, "scenario config file")->required();
    run->add_option("--out", out_dir, "output directory for CSV files")->required();
    run->add_flag("--no-rbs", no_rbs, "disable RBS estimate edges");

    auto* sweep = app.add_subcommand("sweep", "run a scenario over a parameter sweep");
    sweep->add_option("--scenario", scenario_path, "scenario config file")->required();
    sweep->add_option("--vary", vary, "key=v1,v2,... parameter values")->required();
    sweep->add_option("--out", out_dir, "output directory for CSV files")->required();

    auto* graph = app.add_subcommand("graph", "print the estimate graph");
    graph->add_option("--scenario", scenario_path, "scenario config file")->required();
    graph->add_flag("--distances", distances, "also print the all-pairs distance matrix");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            Scenario sc = load_scenario_file(scenario_path);
            if (no_rbs)
                sc.params.rbs_enabled = false;
            RunResult r = run_and_report(sc);
            write_outputs(r, out_dir);
            print_summary(r);
            return r.bound.pass ? 0 : 1;
        }
        if (sweep->parsed()) {
            auto eq = vary.find('=');
            if (eq == std::string::npos)
                throw std::runtime_error("--vary expects key=v1,v2,...");
            std::string key = vary.substr(0, eq);
            std::vector<std::string> values = split(vary.substr(eq + 1), ',');
            bool all_pass = true;
            for (const std::string& value : values) {
                Scenario sc = load_scenario_file(scenario_path);
                set_scenario_key(sc, key, value);
                sc.validate();
                RunResult r = run_and_report(sc);
                write_outputs(r, fs::path(out_dir) / (key + "=" + value));
                std::printf("point = %s=%s\n", key.c_str(), value.c_str());
                print_summary(r);
                all_pass = all_pass && r.bound.pass;
            }
            return all_pass ? 0 : 1;
        }
        if (graph->parsed())
            return cmd_graph(scenario_path, distances);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
