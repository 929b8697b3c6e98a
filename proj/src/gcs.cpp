#include "gradsync/gcs.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gradsync {

double kappa_for_edge(double epsilon, double lambda) {
    if (epsilon <= 0.0)
        throw std::invalid_argument("epsilon must be positive");
    if (lambda < 1.0)
        throw std::invalid_argument("lambda must be >= 1");
    return lambda * epsilon;
}

bool fast_condition_at_shift(std::span<const double> lead, std::span<const double> lag,
                             std::span<const double> kappa, double shift, long s_max) {
    // Highest level certified by some leading neighbor: lead >= (2s-1)*kappa.
    long s_hi = 0;
    for (std::size_t i = 0; i < lead.size(); ++i) {
        double bound = ((lead[i] - shift) / kappa[i] + 1.0) / 2.0;
        if (bound >= static_cast<double>(s_max))
            s_hi = s_max;
        else
            s_hi = std::max(s_hi, static_cast<long>(std::floor(bound)));
        if (s_hi == s_max)
            break;
    }
    if (s_hi < 1)
        return false;

    // Lowest level allowed by every trailing neighbor: lag >= -2s*kappa.
    long s_lo = 1;
    for (std::size_t i = 0; i < lag.size(); ++i) {
        double l = lag[i] - shift;
        if (l >= 0.0)
            continue;
        double need = -l / (2.0 * kappa[i]);
        if (need > static_cast<double>(s_max))
            return false;
        s_lo = std::max(s_lo, static_cast<long>(std::ceil(need)));
    }
    return s_lo <= s_hi;
}

Mode evaluate_fast_condition(double L_self, const NeighborView& view, long s_max) {
    if (view.empty())
        return Mode::Slow;
    std::vector<double> lead(view.size()), lag(view.size()), kappa(view.size());
    for (std::size_t i = 0; i < view.size(); ++i) {
        lead[i] = (view[i].value - view[i].epsilon) - L_self;
        lag[i] = (view[i].value + view[i].epsilon) - L_self;
        kappa[i] = view[i].kappa;
    }
    return fast_condition_at_shift(lead, lag, kappa, 0.0, s_max) ? Mode::Fast : Mode::Slow;
}

long first_fast_failure_shift(std::span<const double> lead, std::span<const double> lag,
                              std::span<const double> kappa, double step, long s_max) {
    if (step <= 0.0)
        throw std::invalid_argument("step must be positive");
    double max_lead = 0.0;
    for (double l : lead)
        max_lead = std::max(max_lead, l);
    long hi = static_cast<long>(std::ceil(max_lead / step)) + 1;
    hi = std::max(hi, 1L);
    long lo = 1;
    // The trigger is monotone decreasing in the shift: once it fails it stays
    // failed, so binary search finds the first failing tick.
    while (lo < hi) {
        long mid = lo + (hi - lo) / 2;
        if (!fast_condition_at_shift(lead, lag, kappa, static_cast<double>(mid) * step, s_max))
            hi = mid;
        else
            lo = mid + 1;
    }
    return lo;
}

void advance_logical_clock(LogicalClockState& state, double dH, Mode mode_for_interval,
                           double mu) {
    if (dH < 0.0)
        throw std::invalid_argument("negative hardware interval");
    double increment = mode_for_interval == Mode::Fast ? (1.0 + mu) * dH : dH;
    state.L += increment;
    state.last_tick_H += dH;
}

long compute_s_max(double effective_diameter, double kappa_min, double kappa_max) {
    if (kappa_min <= 0.0)
        throw std::invalid_argument("kappa_min must be positive");
    double cap = 4.0 * effective_diameter + 10.0 * kappa_max;
    return std::max(1L, static_cast<long>(std::ceil(cap / kappa_min)));
}

} // namespace gradsync
