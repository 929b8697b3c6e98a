#include "gradsync/clocks.hpp"

#include "gradsync/detrng.hpp"

#include <algorithm>
#include <stdexcept>

namespace gradsync {

double DriftSchedule::rate_at(double t) const {
    auto it = std::upper_bound(start.begin(), start.end(), t);
    std::size_t i = static_cast<std::size_t>(it - start.begin());
    if (i == 0)
        return rate.front();
    return rate[i - 1];
}

DriftSchedule make_drift_schedule(DriftKind kind, NodeId node, int n, double rho,
                                  std::uint64_t seed, double horizon) {
    if (rho < 0.0 || rho >= 1.0)
        throw std::invalid_argument("rho out of range [0,1)");
    if (horizon <= 0.0)
        throw std::invalid_argument("horizon must be positive");

    DriftSchedule s;
    s.kind = kind;
    s.horizon = horizon;

    switch (kind) {
    case DriftKind::Constant:
        s.start = {0.0};
        s.rate = {1.0};
        break;
    case DriftKind::AlternatingExtremes:
        s.start = {0.0};
        s.rate = {node % 2 == 0 ? 1.0 + rho : 1.0};
        break;
    case DriftKind::RampAcrossNodes: {
        // Build skew along the node index for the first half, then recover.
        double frac = n > 1 ? static_cast<double>(node) / (n - 1) : 0.0;
        s.start = {0.0, horizon / 2.0};
        s.rate = {1.0 + rho * frac, 1.0};
        break;
    }
    case DriftKind::SeededRandomWalk: {
        constexpr double kStep = 10.0;
        for (double t = 0.0; t < horizon; t += kStep) {
            s.start.push_back(t);
            std::uint64_t h = hash4(seed, 0x64726966u, static_cast<std::uint64_t>(node),
                                    static_cast<std::uint64_t>(s.start.size()));
            s.rate.push_back(1.0 + rho * unit_double(h));
        }
        break;
    }
    }
    return s;
}

HardwareClock::HardwareClock(NodeId owner_, DriftSchedule sched, double h0_)
    : owner(owner_), schedule(std::move(sched)), h0(h0_) {
    prefix_.resize(schedule.start.size());
    double acc = h0;
    for (std::size_t i = 0; i < schedule.start.size(); ++i) {
        prefix_[i] = acc;
        if (i + 1 < schedule.start.size())
            acc += schedule.rate[i] * (schedule.start[i + 1] - schedule.start[i]);
    }
}

std::size_t HardwareClock::segment_for(double t) const {
    auto it = std::upper_bound(schedule.start.begin(), schedule.start.end(), t);
    if (it == schedule.start.begin())
        return 0;
    return static_cast<std::size_t>(it - schedule.start.begin()) - 1;
}

double HardwareClock::value_at(double t) const {
    if (t < 0.0)
        throw std::out_of_range("time before clock start");
    std::size_t i = segment_for(t);
    return prefix_[i] + schedule.rate[i] * (t - schedule.start[i]);
}

double HardwareClock::value_at(double t, std::size_t& cursor) const {
    if (t < 0.0)
        throw std::out_of_range("time before clock start");
    while (cursor + 1 < schedule.start.size() && schedule.start[cursor + 1] <= t)
        ++cursor;
    return prefix_[cursor] + schedule.rate[cursor] * (t - schedule.start[cursor]);
}

double HardwareClock::interval(double t1, double t2) const {
    if (t2 < t1)
        throw std::invalid_argument("interval end before start");
    return value_at(t2) - value_at(t1);
}

double HardwareClock::time_for_interval(double t1, double dh) const {
    std::size_t cursor = segment_for(t1);
    return time_for_interval(t1, dh, cursor);
}

double HardwareClock::time_for_interval(double t1, double dh, std::size_t& cursor) const {
    if (dh < 0.0)
        throw std::invalid_argument("negative hardware interval");
    while (cursor + 1 < schedule.start.size() && schedule.start[cursor + 1] <= t1)
        ++cursor;
    std::size_t i = cursor;
    double t = t1;
    double remaining = dh;
    while (i + 1 < schedule.start.size()) {
        double seg_end = schedule.start[i + 1];
        double gain = schedule.rate[i] * (seg_end - t);
        if (gain >= remaining)
            break;
        remaining -= gain;
        t = seg_end;
        ++i;
    }
    return t + remaining / schedule.rate[i];
}

double hardware_interval(const HardwareClock& c, double t1, double t2) {
    return c.interval(t1, t2);
}

} // namespace gradsync
