#include "gradsync/scenario_config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace gradsync {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
        return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        double d = std::stod(v, &pos);
        if (pos != v.size())
            throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw std::runtime_error("unparsable value for " + key + ": '" + v + "'");
    }
}

long parse_long(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        long d = std::stol(v, &pos);
        if (pos != v.size())
            throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw std::runtime_error("unparsable value for " + key + ": '" + v + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& v) {
    std::string l = lower(v);
    if (l == "true" || l == "1" || l == "on" || l == "yes")
        return true;
    if (l == "false" || l == "0" || l == "off" || l == "no")
        return false;
    throw std::runtime_error("unparsable value for " + key + ": '" + v + "'");
}

TopologyKind parse_topology_kind(const std::string& v) {
    std::string l = lower(v);
    if (l == "path")
        return TopologyKind::Path;
    if (l == "ring")
        return TopologyKind::Ring;
    if (l == "grid")
        return TopologyKind::Grid;
    if (l == "random_geometric" || l == "rgg")
        return TopologyKind::RandomGeometric;
    throw std::runtime_error("unknown topology.kind: '" + v + "'");
}

DriftKind parse_drift_kind(const std::string& v) {
    std::string l = lower(v);
    if (l == "constant")
        return DriftKind::Constant;
    if (l == "alternating_extremes")
        return DriftKind::AlternatingExtremes;
    if (l == "ramp_across_nodes" || l == "ramp")
        return DriftKind::RampAcrossNodes;
    if (l == "seeded_random_walk" || l == "random_walk")
        return DriftKind::SeededRandomWalk;
    throw std::runtime_error("unknown adversary.drift: '" + v + "'");
}

DelayKind parse_delay_kind(const std::string& v) {
    std::string l = lower(v);
    if (l == "fixed_max")
        return DelayKind::FixedMax;
    if (l == "fixed_min")
        return DelayKind::FixedMin;
    if (l == "seeded_uniform")
        return DelayKind::SeededUniform;
    if (l == "alternating_extremes")
        return DelayKind::AlternatingExtremes;
    throw std::runtime_error("unknown adversary.delay: '" + v + "'");
}

} // namespace

void set_scenario_key(Scenario& sc, const std::string& key, const std::string& value) {
    if (key == "topology.kind")
        sc.topology.kind = parse_topology_kind(value);
    else if (key == "topology.n")
        sc.topology.n = static_cast<int>(parse_long(key, value));
    else if (key == "topology.radius")
        sc.topology.radius = parse_double(key, value);
    else if (key == "params.rho")
        sc.params.rho = parse_double(key, value);
    else if (key == "params.mu")
        sc.params.mu = parse_double(key, value);
    else if (key == "params.ru")
        sc.params.ru = parse_double(key, value);
    else if (key == "params.beta_min")
        sc.topology.beta_min = parse_double(key, value);
    else if (key == "params.beta_max")
        sc.topology.beta_max = parse_double(key, value);
    else if (key == "params.delta_t")
        sc.params.delta_t = parse_double(key, value);
    else if (key == "params.delta_b")
        sc.params.delta_b = parse_double(key, value);
    else if (key == "params.lambda")
        sc.params.lambda = parse_double(key, value);
    else if (key == "params.rbs_enabled")
        sc.params.rbs_enabled = parse_bool(key, value);
    else if (key == "params.rbs_adjacent")
        sc.params.rbs_adjacent = parse_bool(key, value);
    else if (key == "adversary.drift")
        sc.drift = parse_drift_kind(value);
    else if (key == "adversary.delay")
        sc.delay = parse_delay_kind(value);
    else if (key == "sim.duration")
        sc.duration = parse_double(key, value);
    else if (key == "sim.sample_period")
        sc.sample_period = parse_double(key, value);
    else if (key == "sim.seed")
        sc.seed = static_cast<std::uint64_t>(parse_long(key, value));
    else if (key == "sim.tick")
        sc.tick = parse_double(key, value);
    else if (key == "sim.loss_prob")
        sc.loss_prob = parse_double(key, value);
    else
        throw std::runtime_error("unknown config key: '" + key + "'");
}

Scenario parse_scenario_config(const std::string& text) {
    Scenario sc;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config line " + std::to_string(lineno) +
                                     ": expected 'key = value'");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        set_scenario_key(sc, key, value);
    }
    try {
        sc.validate();
    } catch (const std::invalid_argument& e) {
        throw std::runtime_error(std::string("invalid scenario: ") + e.what());
    }
    return sc;
}

Scenario load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open scenario file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_scenario_config(ss.str());
}

} // namespace gradsync
