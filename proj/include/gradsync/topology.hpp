#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace gradsync {

using NodeId = int;

/// Global protocol/algorithm parameters shared by all modules.
struct SystemParams {
    double rho = 1e-4;     ///< hardware drift bound; rates lie in [1, 1+rho]
    double mu = 1e-2;      ///< fast-mode logical rate boost
    double ru = 0.01;      ///< receiver uncertainty for broadcast reception
    double delta_t = 1.0;  ///< direct-message period (sender hardware time)
    double delta_b = 1.0;  ///< beacon period (sender hardware time)
    double lambda = 4.0;   ///< kappa = lambda * epsilon per estimate edge
    bool rbs_enabled = true;
    bool rbs_adjacent = false;  ///< also create RBS edges between adjacent pairs
    double epsilon_floor = 1e-9;

    double r_max() const { return (1.0 + rho) * (1.0 + mu); }
    double sigma() const { return r_max() - 1.0; }

    /// Throws std::invalid_argument on any invariant violation.
    void validate() const;
};

struct LinkBounds {
    double beta_min = 0.0;
    double beta_max = 1.0;
};

struct NetworkGraph {
    struct Link {
        NodeId u, v;
        double beta_min, beta_max;
    };

    int n = 0;
    std::vector<Link> links;

    // adjacency[u] = list of (neighbor, link index)
    std::vector<std::vector<std::pair<NodeId, int>>> adjacency;

    void add_link(NodeId u, NodeId v, double beta_min, double beta_max);
    bool adjacent(NodeId u, NodeId v) const;
    int link_index(NodeId u, NodeId v) const;  // -1 if absent
    bool connected() const;
};

enum class TopologyKind { Path, Ring, Grid, RandomGeometric };

struct TopologySpec {
    TopologyKind kind = TopologyKind::Path;
    int n = 1;
    double radius = 0.35;       // RandomGeometric only
    std::uint64_t seed = 0;     // RandomGeometric only
    double beta_min = 0.0;
    double beta_max = 1.0;
};

/// Builds the requested topology. Grid requires n to be a perfect square;
/// RandomGeometric resamples until connected (bounded retries).
NetworkGraph build_network(const TopologySpec& spec);

enum class EdgeKind { Direct, Rbs };

struct EstimateEdge {
    NodeId u, v;
    double epsilon;
    EdgeKind kind;
    NodeId relay = -1;  // common neighbor, Rbs only
};

struct EstimateGraph {
    int n = 0;
    std::vector<EstimateEdge> edges;

    // adjacency[u] = list of (neighbor, edge index)
    std::vector<std::vector<std::pair<NodeId, int>>> adjacency;

    void rebuild_adjacency();
    double min_epsilon() const;
    double max_epsilon() const;
};

/// Certified uncertainty of a direct estimate over one network link:
/// half the worst-case value spread at receipt plus drift over the
/// maximum staleness window (refresh period + delivery latency).
double direct_uncertainty(LinkBounds link, const SystemParams& p);

/// Certified uncertainty of an RBS estimate whose relay links have
/// beta_max at most beta_max_relay.
double rbs_uncertainty(const SystemParams& p, double beta_max_relay);

/// One Direct edge per network link; if enabled, one Rbs edge per pair at hop
/// distance exactly 2, relay chosen to minimize the edge uncertainty (ties by
/// smallest relay id). Throws on a disconnected input graph.
EstimateGraph build_estimate_graph(const NetworkGraph& g, const SystemParams& p);

/// Minimum epsilon-sum over paths from source; +infinity where unreachable.
std::vector<double> single_source_distances(const EstimateGraph& eg, NodeId source);

double effective_distance(const EstimateGraph& eg, NodeId u, NodeId v);

std::vector<std::vector<double>> all_pairs_distances(const EstimateGraph& eg);

/// Max effective distance over all pairs; throws if eg is disconnected.
double effective_diameter(const EstimateGraph& eg);

} // namespace gradsync
