#include "gradsync/simengine.hpp"

#include "gradsync/detrng.hpp"
#include "gradsync/estimate_layer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <stdexcept>

namespace gradsync {

double assign_delay(const DelayPolicy& policy, LinkBounds link, NodeId from, NodeId to,
                    long msg_index) {
    switch (policy.kind) {
    case DelayKind::FixedMax:
        return link.beta_max;
    case DelayKind::FixedMin:
        return link.beta_min;
    case DelayKind::SeededUniform: {
        std::uint64_t h = hash4(policy.seed, 0x64656c61u,
                                hash2(static_cast<std::uint64_t>(from), static_cast<std::uint64_t>(to)),
                                static_cast<std::uint64_t>(msg_index));
        return link.beta_min + (link.beta_max - link.beta_min) * unit_double(h);
    }
    case DelayKind::AlternatingExtremes:
        return msg_index % 2 == 0 ? link.beta_max : link.beta_min;
    }
    throw std::invalid_argument("unknown delay policy");
}

void Scenario::validate() const {
    params.validate();
    if (topology.n < 1)
        throw std::invalid_argument("topology requires n >= 1");
    if (duration <= 0.0)
        throw std::invalid_argument("duration must be positive");
    if (sample_period <= 0.0)
        throw std::invalid_argument("sample_period must be positive");
    if (tick <= 0.0)
        throw std::invalid_argument("tick must be positive");
    if (loss_prob < 0.0 || loss_prob >= 1.0)
        throw std::invalid_argument("loss_prob out of range [0,1)");
}

namespace {

constexpr double kRoundingSlack = 1e-9;

enum class EvKind : std::uint8_t {
    SendDirect,
    DeliverDirect,
    EmitBeacon,
    DeliverBeacon,
    DeliverExchange,
    Sample
};

struct Ev {
    double t;
    std::uint64_t seq;  // scheduling order; total tie-break
    EvKind kind;
    int a = -1;    // node the event acts on
    int b = -1;    // peer (sender / exchange partner)
    int c = -1;    // beacon origin
    long i = 0;    // message seq / beacon id / sample index
    double x = 0;  // payload value
};

struct EvLater {
    bool operator()(const Ev& l, const Ev& r) const {
        if (l.t != r.t)
            return l.t > r.t;
        return l.seq > r.seq;
    }
};

struct ModeTransition {
    double H;
    Mode mode;
};

struct NodeRt {
    HardwareClock hw;
    std::size_t seg_cursor = 0;
    double last_t = 0.0;
    double last_H = 0.0;
    LogicalClockState lc;
    std::vector<ModeTransition> transitions;  // sorted by H, at tick boundaries

    // Estimate records for incident estimate edges, parallel to `incident`.
    std::vector<std::pair<NodeId, int>> incident;  // (neighbor, edge index)
    std::vector<EstimateRecord> records;

    ReceptionStore receptions;
    std::map<BeaconKey, std::vector<TimestampExchange>> pending_exchanges;

    // RBS partners reachable through each relay.
    struct RbsRoute {
        NodeId partner;
        int record_idx;
        int link_up;    // self -> relay
        int link_down;  // relay -> partner
    };
    std::map<NodeId, std::vector<RbsRoute>> rbs_by_relay;

    long send_seq = 0;
    long beacon_count = 0;

    int record_index(NodeId neighbor, EdgeKind kind) const {
        for (std::size_t i = 0; i < incident.size(); ++i)
            if (incident[i].first == neighbor && records[i].kind == kind)
                return static_cast<int>(i);
        return -1;
    }
};

class Engine {
public:
    explicit Engine(const Scenario& sc) : sc_(sc) {
        sc_.validate();
        TopologySpec tspec = sc_.topology;
        tspec.seed = sc_.seed;
        g_ = build_network(tspec);
        eg_ = build_estimate_graph(g_, sc_.params);
        diameter_ = effective_diameter(eg_);
        if (eg_.edges.empty()) {
            s_max_ = 1;
        } else {
            double kmin = kappa_for_edge(eg_.min_epsilon(), sc_.params.lambda);
            double kmax = kappa_for_edge(eg_.max_epsilon(), sc_.params.lambda);
            s_max_ = compute_s_max(diameter_, kmin, kmax);
        }
        policy_ = {sc_.delay, sc_.seed};
        link_counters_.assign(2 * g_.links.size(), 0);
        init_nodes();
        schedule_initial_events();
    }

    Trace run() {
        while (!queue_.empty() && queue_.top().t <= sc_.duration) {
            Ev ev = queue_.top();
            queue_.pop();
            dispatch(ev);
        }
        drain_leftovers();
        Trace tr;
        tr.scenario = sc_;
        tr.eg = eg_;
        tr.effective_diameter = diameter_;
        tr.s_max = s_max_;
        tr.rows = std::move(rows_);
        tr.validity = stats_;
        return tr;
    }

private:
    Scenario sc_;
    NetworkGraph g_;
    EstimateGraph eg_;
    double diameter_ = 0.0;
    long s_max_ = 1;
    DelayPolicy policy_;
    std::vector<NodeRt> nodes_;
    std::vector<long> link_counters_;  // per directed link (2*idx + dir)
    std::priority_queue<Ev, std::vector<Ev>, EvLater> queue_;
    std::uint64_t next_seq_ = 0;
    std::vector<TraceRow> rows_;
    ValidityStats stats_;
    std::vector<double> scratch_lead_, scratch_lag_, scratch_kappa_;

    void init_nodes() {
        nodes_.resize(g_.n);
        for (NodeId u = 0; u < g_.n; ++u) {
            auto sched = make_drift_schedule(sc_.drift, u, g_.n, sc_.params.rho, sc_.seed,
                                             sc_.duration);
            NodeRt& nd = nodes_[u];
            nd.hw = HardwareClock(u, std::move(sched), 0.0);
            nd.lc = LogicalClockState{u, 0.0, Mode::Slow, 0.0};
            for (const auto& [v, ei] : eg_.adjacency[u]) {
                const EstimateEdge& e = eg_.edges[ei];
                EstimateRecord rec;
                rec.edge_index = ei;
                rec.remote = v;
                rec.kind = e.kind;
                rec.epsilon = e.epsilon;
                rec.kappa = kappa_for_edge(e.epsilon, sc_.params.lambda);
                int idx = static_cast<int>(nd.records.size());
                nd.incident.emplace_back(v, ei);
                nd.records.push_back(rec);
                if (e.kind == EdgeKind::Rbs)
                    nd.rbs_by_relay[e.relay].push_back(
                        {v, idx, g_.link_index(u, e.relay), g_.link_index(e.relay, v)});
            }
        }
    }

    void schedule_initial_events() {
        for (NodeId u = 0; u < g_.n; ++u) {
            double ts = nodes_[u].hw.time_for_interval(0.0, sc_.params.delta_t);
            if (ts <= sc_.duration)
                push({ts, 0, EvKind::SendDirect, u});
            double tb = nodes_[u].hw.time_for_interval(0.0, sc_.params.delta_b);
            if (tb <= sc_.duration)
                push({tb, 0, EvKind::EmitBeacon, u});
        }
        push({0.0, 0, EvKind::Sample, -1, -1, -1, 0});
    }

    void push(Ev ev) {
        ev.seq = next_seq_++;
        if (queue_.size() >= sc_.event_cap)
            throw std::runtime_error("event queue overflow: runaway schedule");
        queue_.push(ev);
    }

    long& counter_for(int li, NodeId from) {
        int dir = g_.links[li].u == from ? 0 : 1;
        return link_counters_[2 * li + dir];
    }

    LinkBounds bounds_for(int li) const {
        const auto& l = g_.links[li];
        return {l.beta_min, l.beta_max};
    }

    bool lost(NodeId from, NodeId to, long idx) {
        if (sc_.loss_prob <= 0.0)
            return false;
        std::uint64_t h = hash4(sc_.seed, 0x6c6f7373u,
                                hash2(static_cast<std::uint64_t>(from), static_cast<std::uint64_t>(to)),
                                static_cast<std::uint64_t>(idx));
        return unit_double(h) < sc_.loss_prob;
    }

    // Advances node u to real time t, applying any mode transitions whose
    // tick boundary falls inside the interval.
    void advance(NodeId u, double t) {
        NodeRt& nd = nodes_[u];
        double H = nd.hw.value_at(t, nd.seg_cursor);
        double h = nd.last_H;
        std::size_t consumed = 0;
        for (const ModeTransition& tr : nd.transitions) {
            if (tr.H > H)
                break;
            step(nd, tr.H - h);
            nd.lc.mode = tr.mode;
            h = tr.H;
            ++consumed;
        }
        if (consumed > 0)
            nd.transitions.erase(nd.transitions.begin(),
                                 nd.transitions.begin() + static_cast<long>(consumed));
        step(nd, H - h);
        nd.last_t = t;
        nd.last_H = H;
        nd.lc.last_tick_H = H;
    }

    void step(NodeRt& nd, double dH) {
        if (dH == 0.0)
            return;
        double inc = nd.lc.mode == Mode::Fast ? (1.0 + sc_.params.mu) * dH : dH;
        if (!(inc == dH || inc == (1.0 + sc_.params.mu) * dH))
            ++stats_.rate_violations;
        if (inc < 0.0)
            ++stats_.monotonicity_violations;
        nd.lc.L += inc;
    }

    // Re-derives the mode decision at the next tick boundary after an anchor
    // update, and precomputes the fast-to-slow flip tick if the node will run
    // fast. Equivalent to evaluating the trigger at every tick: while slow the
    // trigger inputs are constant between anchor updates, and while fast they
    // all decay linearly, so the first failing tick is computable directly.
    void reevaluate(NodeId u) {
        NodeRt& nd = nodes_[u];
        double tick = sc_.tick;
        double boundary = (std::floor(nd.last_H / tick) + 1.0) * tick;
        double rate = nd.lc.mode == Mode::Fast ? 1.0 + sc_.params.mu : 1.0;
        double L_at = nd.lc.L + rate * (boundary - nd.last_H);

        auto& lead = scratch_lead_;
        auto& lag = scratch_lag_;
        auto& kappa = scratch_kappa_;
        lead.clear();
        lag.clear();
        kappa.clear();
        for (const EstimateRecord& rec : nd.records) {
            if (!rec.initialized)
                continue;
            double est = rec.anchor_value + (boundary - rec.anchor_H);
            lead.push_back((est - rec.epsilon) - L_at);
            lag.push_back((est + rec.epsilon) - L_at);
            kappa.push_back(rec.kappa);
        }

        bool fast = !lead.empty() &&
                    fast_condition_at_shift(lead, lag, kappa, 0.0, s_max_);
        nd.transitions.clear();
        if (fast) {
            long k = first_fast_failure_shift(lead, lag, kappa, sc_.params.mu * tick, s_max_);
            nd.transitions.push_back({boundary, Mode::Fast});
            nd.transitions.push_back({boundary + static_cast<double>(k) * tick, Mode::Slow});
        } else if (nd.lc.mode == Mode::Fast) {
            nd.transitions.push_back({boundary, Mode::Slow});
        }
    }

    void dispatch(const Ev& ev) {
        switch (ev.kind) {
        case EvKind::SendDirect:
            on_send_direct(ev);
            break;
        case EvKind::DeliverDirect:
            on_deliver_direct(ev);
            break;
        case EvKind::EmitBeacon:
            on_emit_beacon(ev);
            break;
        case EvKind::DeliverBeacon:
            on_deliver_beacon(ev);
            break;
        case EvKind::DeliverExchange:
            on_deliver_exchange(ev);
            break;
        case EvKind::Sample:
            on_sample(ev);
            break;
        }
    }

    void on_send_direct(const Ev& ev) {
        NodeId u = ev.a;
        advance(u, ev.t);
        NodeRt& nd = nodes_[u];
        long seq = nd.send_seq++;
        double payload = nd.lc.L;
        for (const auto& [v, li] : g_.adjacency[u]) {
            long idx = counter_for(li, u)++;
            if (lost(u, v, idx))
                continue;
            double d = assign_delay(policy_, bounds_for(li), u, v, idx);
            ++stats_.direct_sent;
            push({ev.t + d, 0, EvKind::DeliverDirect, v, u, -1, seq, payload});
        }
        double tn = nd.hw.time_for_interval(ev.t, sc_.params.delta_t, nd.seg_cursor);
        if (tn <= sc_.duration)
            push({tn, 0, EvKind::SendDirect, u});
    }

    void on_deliver_direct(const Ev& ev) {
        NodeId v = ev.a, u = ev.b;
        advance(v, ev.t);
        ++stats_.direct_delivered;
        NodeRt& nd = nodes_[v];
        int ri = nd.record_index(u, EdgeKind::Direct);
        if (ri < 0)
            return;
        // Direct estimate edges are created one per network link, in order.
        LinkBounds lb = bounds_for(nd.records[ri].edge_index);
        DirectMessage msg{u, ev.x, ev.i};
        if (on_direct_message(nd.records[ri], msg, nd.last_H, lb, sc_.params))
            reevaluate(v);
    }

    void on_emit_beacon(const Ev& ev) {
        NodeId x = ev.a;
        advance(x, ev.t);
        NodeRt& nd = nodes_[x];
        long id = nd.beacon_count++;
        ++stats_.beacons_emitted;
        for (const auto& [v, li] : g_.adjacency[x]) {
            std::uint64_t h = hash4(sc_.seed, 0x62656163u,
                                    hash2(static_cast<std::uint64_t>(x), static_cast<std::uint64_t>(id)),
                                    static_cast<std::uint64_t>(v));
            double eta = sc_.params.ru * unit_double(h);
            push({ev.t + eta, 0, EvKind::DeliverBeacon, v, -1, x, id});
        }
        double tn = nd.hw.time_for_interval(ev.t, sc_.params.delta_b, nd.seg_cursor);
        if (tn <= sc_.duration)
            push({tn, 0, EvKind::EmitBeacon, x});
    }

    void on_deliver_beacon(const Ev& ev) {
        NodeId v = ev.a, x = ev.c;
        advance(v, ev.t);
        ++stats_.beacon_receptions;
        NodeRt& nd = nodes_[v];
        BeaconKey key{x, ev.i};
        ReceptionRecord rr{key, nd.last_H, nd.lc.L};
        if (!nd.receptions.add(rr))
            return;

        // Exchanges that raced ahead of our own reception of this beacon.
        bool applied = false;
        if (auto it = nd.pending_exchanges.find(key); it != nd.pending_exchanges.end()) {
            for (const TimestampExchange& ex : it->second) {
                int ri = nd.record_index(ex.from, EdgeKind::Rbs);
                if (ri >= 0 &&
                    apply_exchange(nd.records[ri], rr, ex) == ExchangeResult::Applied)
                    applied = true;
            }
            nd.pending_exchanges.erase(it);
        }
        // Pending entries for beacons older than the reception window can
        // never be matched anymore.
        for (auto pit = nd.pending_exchanges.lower_bound(
                 BeaconKey{x, std::numeric_limits<long>::min()});
             pit != nd.pending_exchanges.end() && pit->first.origin == x;) {
            if (pit->first.id + ReceptionStore::kWindow <= ev.i)
                pit = nd.pending_exchanges.erase(pit);
            else
                break;
        }

        auto rit = nd.rbs_by_relay.find(x);
        if (rit != nd.rbs_by_relay.end()) {
            for (const auto& route : rit->second) {
                long i1 = counter_for(route.link_up, v)++;
                long i2 = counter_for(route.link_down, x)++;
                if (lost(v, x, i1) || lost(x, route.partner, i2))
                    continue;
                double d1 = assign_delay(policy_, bounds_for(route.link_up), v, x, i1);
                double d2 = assign_delay(policy_, bounds_for(route.link_down), x,
                                         route.partner, i2);
                ++stats_.exchanges_sent;
                push({ev.t + d1 + d2, 0, EvKind::DeliverExchange, route.partner, v, x, ev.i,
                      rr.local_L});
            }
        }
        if (applied)
            reevaluate(v);
    }

    void on_deliver_exchange(const Ev& ev) {
        NodeId w = ev.a, from = ev.b, x = ev.c;
        advance(w, ev.t);
        ++stats_.exchanges_delivered;
        NodeRt& nd = nodes_[w];
        BeaconKey key{x, ev.i};
        TimestampExchange ex{from, key, ev.x};
        const ReceptionRecord* local = nd.receptions.find(key);
        if (local == nullptr) {
            nd.pending_exchanges[key].push_back(ex);
            return;
        }
        int ri = nd.record_index(from, EdgeKind::Rbs);
        if (ri >= 0 && apply_exchange(nd.records[ri], *local, ex) == ExchangeResult::Applied)
            reevaluate(w);
    }

    void on_sample(const Ev& ev) {
        double t = ev.t;
        for (NodeId u = 0; u < g_.n; ++u)
            advance(u, t);
        for (NodeId u = 0; u < g_.n; ++u) {
            const NodeRt& nd = nodes_[u];
            rows_.push_back({t, u, nd.lc.L, nd.last_H, nd.lc.mode});
            if (nd.lc.L + kRoundingSlack < t)
                ++stats_.min_progress_violations;
            for (const EstimateRecord& rec : nd.records) {
                if (!rec.initialized)
                    continue;
                double est = rec.anchor_value + (nd.last_H - rec.anchor_H);
                double err = std::abs(est - nodes_[rec.remote].lc.L);
                double age = nd.last_H - rec.anchor_H;
                if (rec.kind == EdgeKind::Direct)
                    stats_.max_direct_age_H = std::max(stats_.max_direct_age_H, age);
                else
                    stats_.max_rbs_age_H = std::max(stats_.max_rbs_age_H, age);
                ++stats_.soundness_checks;
                if (err > rec.epsilon + kRoundingSlack) {
                    ++stats_.soundness_violations;
                    stats_.max_soundness_excess =
                        std::max(stats_.max_soundness_excess, err - rec.epsilon);
                }
            }
        }
        long next = ev.i + 1;
        double tn = static_cast<double>(next) * sc_.sample_period;
        if (tn <= sc_.duration)
            push({tn, 0, EvKind::Sample, -1, -1, -1, next});
    }

    void drain_leftovers() {
        while (!queue_.empty()) {
            switch (queue_.top().kind) {
            case EvKind::DeliverDirect:
                ++stats_.direct_leftover;
                break;
            case EvKind::DeliverBeacon:
                ++stats_.beacon_leftover;
                break;
            case EvKind::DeliverExchange:
                ++stats_.exchange_leftover;
                break;
            default:
                break;
            }
            queue_.pop();
        }
    }
};

} // namespace

Trace run_scenario(const Scenario& sc) {
    Engine engine(sc);
    return engine.run();
}

} // namespace gradsync
