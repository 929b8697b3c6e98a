#include "gradsync/topology.hpp"

#include "gradsync/detrng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string>

namespace gradsync {

void SystemParams::validate() const {
    if (rho < 0.0 || rho >= 1.0)
        throw std::invalid_argument("rho out of range [0,1)");
    if (mu <= 0.0)
        throw std::invalid_argument("mu must be positive");
    if (ru < 0.0)
        throw std::invalid_argument("ru must be non-negative");
    if (delta_t <= 0.0)
        throw std::invalid_argument("delta_t must be positive");
    if (delta_b <= 0.0)
        throw std::invalid_argument("delta_b must be positive");
    if (lambda < 1.0)
        throw std::invalid_argument("lambda must be >= 1");
    if (epsilon_floor <= 0.0)
        throw std::invalid_argument("epsilon_floor must be positive");
}

void NetworkGraph::add_link(NodeId u, NodeId v, double beta_min, double beta_max) {
    if (u == v)
        throw std::invalid_argument("self-loop link");
    if (u < 0 || v < 0 || u >= n || v >= n)
        throw std::invalid_argument("link endpoint out of range");
    if (beta_min < 0.0 || beta_min > beta_max)
        throw std::invalid_argument("invalid delay bounds");
    int idx = static_cast<int>(links.size());
    links.push_back({u, v, beta_min, beta_max});
    adjacency.resize(n);
    adjacency[u].emplace_back(v, idx);
    adjacency[v].emplace_back(u, idx);
}

bool NetworkGraph::adjacent(NodeId u, NodeId v) const {
    return link_index(u, v) >= 0;
}

int NetworkGraph::link_index(NodeId u, NodeId v) const {
    if (u < 0 || u >= n)
        return -1;
    for (const auto& [w, idx] : adjacency[u])
        if (w == v)
            return idx;
    return -1;
}

bool NetworkGraph::connected() const {
    if (n == 0)
        return false;
    std::vector<char> seen(n, 0);
    std::queue<NodeId> q;
    q.push(0);
    seen[0] = 1;
    int count = 1;
    while (!q.empty()) {
        NodeId u = q.front();
        q.pop();
        if (u < static_cast<int>(adjacency.size()))
            for (const auto& [v, idx] : adjacency[u])
                if (!seen[v]) {
                    seen[v] = 1;
                    ++count;
                    q.push(v);
                }
    }
    return count == n;
}

namespace {

NetworkGraph empty_graph(int n) {
    NetworkGraph g;
    g.n = n;
    g.adjacency.resize(n);
    return g;
}

NetworkGraph build_random_geometric(const TopologySpec& spec) {
    constexpr int kMaxAttempts = 100;
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        NetworkGraph g = empty_graph(spec.n);
        std::vector<double> xs(spec.n), ys(spec.n);
        for (int i = 0; i < spec.n; ++i) {
            xs[i] = unit_double(hash4(spec.seed, 0x6e6f6465u, attempt, 2 * i));
            ys[i] = unit_double(hash4(spec.seed, 0x6e6f6465u, attempt, 2 * i + 1));
        }
        for (int i = 0; i < spec.n; ++i)
            for (int j = i + 1; j < spec.n; ++j) {
                double dx = xs[i] - xs[j], dy = ys[i] - ys[j];
                if (std::sqrt(dx * dx + dy * dy) <= spec.radius)
                    g.add_link(i, j, spec.beta_min, spec.beta_max);
            }
        if (g.connected())
            return g;
    }
    throw std::runtime_error("random geometric graph not connected after max retries");
}

} // namespace

NetworkGraph build_network(const TopologySpec& spec) {
    if (spec.n < 1)
        throw std::invalid_argument("topology requires n >= 1");
    if (spec.beta_min < 0.0 || spec.beta_min > spec.beta_max)
        throw std::invalid_argument("invalid delay bounds");

    switch (spec.kind) {
    case TopologyKind::Path: {
        NetworkGraph g = empty_graph(spec.n);
        for (int i = 0; i + 1 < spec.n; ++i)
            g.add_link(i, i + 1, spec.beta_min, spec.beta_max);
        return g;
    }
    case TopologyKind::Ring: {
        NetworkGraph g = empty_graph(spec.n);
        for (int i = 0; i + 1 < spec.n; ++i)
            g.add_link(i, i + 1, spec.beta_min, spec.beta_max);
        if (spec.n > 2)
            g.add_link(spec.n - 1, 0, spec.beta_min, spec.beta_max);
        return g;
    }
    case TopologyKind::Grid: {
        int k = static_cast<int>(std::lround(std::sqrt(static_cast<double>(spec.n))));
        if (k * k != spec.n)
            throw std::invalid_argument("grid topology requires a perfect-square n");
        NetworkGraph g = empty_graph(spec.n);
        for (int r = 0; r < k; ++r)
            for (int c = 0; c < k; ++c) {
                if (c + 1 < k)
                    g.add_link(r * k + c, r * k + c + 1, spec.beta_min, spec.beta_max);
                if (r + 1 < k)
                    g.add_link(r * k + c, (r + 1) * k + c, spec.beta_min, spec.beta_max);
            }
        return g;
    }
    case TopologyKind::RandomGeometric:
        if (spec.radius <= 0.0)
            throw std::invalid_argument("random geometric topology requires radius > 0");
        return build_random_geometric(spec);
    }
    throw std::invalid_argument("unknown topology kind");
}

void EstimateGraph::rebuild_adjacency() {
    adjacency.assign(n, {});
    for (int i = 0; i < static_cast<int>(edges.size()); ++i) {
        adjacency[edges[i].u].emplace_back(edges[i].v, i);
        adjacency[edges[i].v].emplace_back(edges[i].u, i);
    }
}

double EstimateGraph::min_epsilon() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& e : edges)
        m = std::min(m, e.epsilon);
    return m;
}

double EstimateGraph::max_epsilon() const {
    double m = 0.0;
    for (const auto& e : edges)
        m = std::max(m, e.epsilon);
    return m;
}

double direct_uncertainty(LinkBounds link, const SystemParams& p) {
    double r = p.r_max();
    double s = p.sigma();
    double eps = (r * link.beta_max - link.beta_min) / 2.0 + s * (p.delta_t + link.beta_max);
    return std::max(eps, p.epsilon_floor);
}

double rbs_uncertainty(const SystemParams& p, double beta_max_relay) {
    double r = p.r_max();
    double s = p.sigma();
    // Staleness window: one beacon period plus the replacing exchange's
    // worst-case lag behind emission (partner reception offset <= ru, then
    // two relay hops). The ru term inside the window is required for the
    // soundness invariant to hold at the extremes.
    double eps = r * p.ru + s * (p.delta_b + p.ru + 2.0 * beta_max_relay);
    return std::max(eps, p.epsilon_floor);
}

EstimateGraph build_estimate_graph(const NetworkGraph& g, const SystemParams& p) {
    p.validate();
    if (!g.connected())
        throw std::invalid_argument("estimate graph requires a connected network graph");

    EstimateGraph eg;
    eg.n = g.n;
    for (const auto& link : g.links) {
        double eps = direct_uncertainty({link.beta_min, link.beta_max}, p);
        eg.edges.push_back({link.u, link.v, eps, EdgeKind::Direct, -1});
    }

    if (p.rbs_enabled) {
        // For each unordered pair sharing a common neighbor, pick the relay
        // minimizing the RBS uncertainty; ties broken by smallest relay id.
        for (NodeId u = 0; u < g.n; ++u) {
            for (NodeId v = u + 1; v < g.n; ++v) {
                bool adj = g.adjacent(u, v);
                if (adj && !p.rbs_adjacent)
                    continue;
                NodeId best_relay = -1;
                double best_beta = 0.0;
                for (const auto& [x, liu] : g.adjacency[u]) {
                    int liv = g.link_index(x, v);
                    if (liv < 0)
                        continue;
                    double beta = std::max(g.links[liu].beta_max, g.links[liv].beta_max);
                    if (best_relay < 0 || beta < best_beta) {
                        best_relay = x;
                        best_beta = beta;
                    }
                }
                if (best_relay >= 0) {
                    double eps = rbs_uncertainty(p, best_beta);
                    eg.edges.push_back({u, v, eps, EdgeKind::Rbs, best_relay});
                }
            }
        }
    }

    eg.rebuild_adjacency();
    return eg;
}

std::vector<double> single_source_distances(const EstimateGraph& eg, NodeId source) {
    if (source < 0 || source >= eg.n)
        throw std::invalid_argument("node id out of range");
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dist(eg.n, inf);
    dist[source] = 0.0;
    using Item = std::pair<double, NodeId>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    pq.emplace(0.0, source);
    while (!pq.empty()) {
        auto [d, u] = pq.top();
        pq.pop();
        if (d > dist[u])
            continue;
        for (const auto& [v, ei] : eg.adjacency[u]) {
            double nd = d + eg.edges[ei].epsilon;
            if (nd < dist[v]) {
                dist[v] = nd;
                pq.emplace(nd, v);
            }
        }
    }
    return dist;
}

double effective_distance(const EstimateGraph& eg, NodeId u, NodeId v) {
    if (v < 0 || v >= eg.n)
        throw std::invalid_argument("node id out of range");
    return single_source_distances(eg, u)[v];
}

std::vector<std::vector<double>> all_pairs_distances(const EstimateGraph& eg) {
    std::vector<std::vector<double>> d(eg.n);
    for (NodeId u = 0; u < eg.n; ++u)
        d[u] = single_source_distances(eg, u);
    return d;
}

double effective_diameter(const EstimateGraph& eg) {
    double diam = 0.0;
    for (NodeId u = 0; u < eg.n; ++u) {
        auto dist = single_source_distances(eg, u);
        for (NodeId v = 0; v < eg.n; ++v) {
            if (std::isinf(dist[v]))
                throw std::runtime_error("estimate graph is disconnected");
            diam = std::max(diam, dist[v]);
        }
    }
    return diam;
}

} // namespace gradsync
