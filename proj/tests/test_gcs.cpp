#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gradsync/gcs.hpp"
#include "gradsync/simengine.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

using namespace gradsync;

namespace {

// Literal transcription of the trigger: enumerate s and compare directly.
bool brute_force_trigger(const std::vector<double>& lead, const std::vector<double>& lag,
                         const std::vector<double>& kappa, double shift, long s_max) {
    for (long s = 1; s <= s_max; ++s) {
        bool a = false;
        for (std::size_t i = 0; i < lead.size(); ++i)
            if (lead[i] - shift >= (2.0 * s - 1.0) * kappa[i])
                a = true;
        if (!a)
            continue;
        bool b = true;
        for (std::size_t i = 0; i < lag.size(); ++i)
            if (lag[i] - shift < -2.0 * s * kappa[i])
                b = false;
        if (b)
            return true;
    }
    return false;
}

} // namespace

TEST_CASE("kappa scales epsilon by lambda") {
    CHECK(kappa_for_edge(0.5, 4.0) == 2.0);
    CHECK(kappa_for_edge(0.04050502, 4.0) == doctest::Approx(0.16202008));
    CHECK(kappa_for_edge(0.5, 1.0) == 0.5);
    CHECK_THROWS_AS(kappa_for_edge(0.0, 4.0), std::invalid_argument);
    CHECK_THROWS_AS(kappa_for_edge(0.5, 0.5), std::invalid_argument);
}

TEST_CASE("a clear leader with no laggards triggers fast") {
    // neighbor certified ahead by 9.5 - 0.5 = 9 >= (2s-1)*2 up to s = 2
    NeighborView view{{9.5, 0.5, 2.0}};
    CHECK(evaluate_fast_condition(0.0, view, 10) == Mode::Fast);
}

TEST_CASE("balanced neighborhood stays slow") {
    NeighborView view{{0.0, 0.5, 2.0}, {0.0, 0.5, 2.0}};
    CHECK(evaluate_fast_condition(0.0, view, 10) == Mode::Slow);
}

TEST_CASE("a deep laggard vetoes every level the leader certifies") {
    // leader certifies s <= 2; laggard at lag -10+0.5 = -9.5 needs s >= 3
    NeighborView view{{9.5, 0.5, 2.0}, {-10.0, 0.5, 2.0}};
    CHECK(evaluate_fast_condition(0.0, view, 10) == Mode::Slow);
    // with the laggard shallower the levels overlap again
    NeighborView view2{{9.5, 0.5, 2.0}, {-7.0, 0.5, 2.0}};
    CHECK(evaluate_fast_condition(0.0, view2, 10) == Mode::Fast);
}

TEST_CASE("no estimates means slow") {
    CHECK(evaluate_fast_condition(123.0, {}, 10) == Mode::Slow);
}

TEST_CASE("boundary inclusiveness at exact thresholds") {
    // lead exactly (2s-1)*kappa with s = 1
    NeighborView at{{2.5, 0.5, 2.0}};
    CHECK(evaluate_fast_condition(0.0, at, 5) == Mode::Fast);
    NeighborView below{{2.5 - 1e-9, 0.5, 2.0}};
    CHECK(evaluate_fast_condition(0.0, below, 5) == Mode::Slow);
    // lag exactly -2s*kappa is still allowed
    NeighborView edge{{2.5, 0.5, 2.0}, {-3.5, 0.5, 2.0}};
    CHECK(evaluate_fast_condition(0.0, edge, 5) == Mode::Fast);
}

TEST_CASE("analytic trigger matches level enumeration") {
    std::mt19937 rng(31337);
    std::uniform_int_distribution<int> sz(1, 6);
    std::uniform_real_distribution<double> vd(-30.0, 30.0);
    std::uniform_real_distribution<double> kd(0.1, 5.0);
    std::uniform_real_distribution<double> ed(0.01, 2.0);
    std::uniform_real_distribution<double> sd(0.0, 10.0);
    for (int iter = 0; iter < 5000; ++iter) {
        int m = sz(rng);
        std::vector<double> lead(m), lag(m), kappa(m);
        for (int i = 0; i < m; ++i) {
            double value = vd(rng), eps = ed(rng);
            lead[i] = value - eps;
            lag[i] = value + eps;
            kappa[i] = kd(rng);
        }
        long s_max = 1 + iter % 12;
        double shift = iter % 3 == 0 ? 0.0 : sd(rng);
        CHECK(fast_condition_at_shift(lead, lag, kappa, shift, s_max) ==
              brute_force_trigger(lead, lag, kappa, shift, s_max));
    }
}

TEST_CASE("first failure shift is the exact flip tick") {
    std::mt19937 rng(77);
    std::uniform_int_distribution<int> sz(1, 5);
    std::uniform_real_distribution<double> vd(-10.0, 25.0);
    std::uniform_real_distribution<double> kd(0.2, 4.0);
    std::uniform_real_distribution<double> ed(0.01, 1.5);
    int exercised = 0;
    for (int iter = 0; iter < 3000; ++iter) {
        int m = sz(rng);
        std::vector<double> lead(m), lag(m), kappa(m);
        for (int i = 0; i < m; ++i) {
            double value = vd(rng), eps = ed(rng);
            lead[i] = value - eps;
            lag[i] = value + eps;
            kappa[i] = kd(rng);
        }
        long s_max = 1 + iter % 8;
        double step = 0.01 * (1 + iter % 4);
        if (!fast_condition_at_shift(lead, lag, kappa, 0.0, s_max))
            continue;
        ++exercised;
        long k = first_fast_failure_shift(lead, lag, kappa, step, s_max);
        CHECK(k >= 1);
        CHECK_FALSE(fast_condition_at_shift(lead, lag, kappa, k * step, s_max));
        if (k > 1)
            CHECK(fast_condition_at_shift(lead, lag, kappa, (k - 1) * step, s_max));
    }
    CHECK(exercised > 200);
    CHECK_THROWS_AS(
        first_fast_failure_shift(std::vector<double>{1.0}, std::vector<double>{1.0},
                                 std::vector<double>{1.0}, 0.0, 1),
        std::invalid_argument);
}

TEST_CASE("logical clock advances at the rate fixed for the interval") {
    LogicalClockState st;
    st.L = 10.0;
    advance_logical_clock(st, 1.0, Mode::Slow, 0.01);
    CHECK(st.L == 11.0);
    advance_logical_clock(st, 2.0, Mode::Fast, 0.01);
    CHECK(st.L == doctest::Approx(11.0 + 2.02).epsilon(1e-15));
    advance_logical_clock(st, 0.0, Mode::Fast, 0.01);
    CHECK(st.L == doctest::Approx(13.02).epsilon(1e-15));
    CHECK_THROWS_AS(advance_logical_clock(st, -1.0, Mode::Slow, 0.01),
                    std::invalid_argument);
}

TEST_CASE("level cap covers the diameter with slack") {
    CHECK(compute_s_max(1.0, 0.1, 0.2) == 60);  // ceil((4 + 2)/0.1)
    CHECK(compute_s_max(0.0, 1.0, 1.0) == 10);
    CHECK(compute_s_max(0.0, 5.0, 5.0) >= 1);
    CHECK_THROWS_AS(compute_s_max(1.0, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("zero drift is a fixpoint: nobody ever runs fast") {
    Scenario sc;
    sc.topology.n = 5;
    sc.params.rho = 0.0;
    sc.drift = DriftKind::Constant;
    sc.delay = DelayKind::FixedMax;
    sc.duration = 200.0;
    Trace tr = run_scenario(sc);
    for (const auto& row : tr.rows)
        CHECK(row.mode == Mode::Slow);
    CHECK(tr.validity.rate_violations == 0);
    CHECK(tr.validity.soundness_violations == 0);
}
