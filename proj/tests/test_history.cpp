#include <doctest.h>

#include <cmath>

#include "rcpfluid/history.hpp"

using namespace rcp;

TEST_CASE("constant pre-history covers every past lag") {
    DelayHistory h(0.0, 0.1, 2.5);
    CHECK(h.eval(0.0) == 2.5);
    CHECK(h.eval(-0.05) == 2.5);
    CHECK(h.eval(-1000.0) == 2.5);
}

TEST_CASE("cubic segments are reproduced exactly") {
    // f(t) = t^3 - 2 t^2 + 3: Hermite data on a grid reproduces it exactly.
    const auto f = [](double t) { return t * t * t - 2.0 * t * t + 3.0; };
    const auto df = [](double t) { return 3.0 * t * t - 4.0 * t; };
    const double step = 0.25;
    DelayHistory h(0.0, step, f(0.0));
    h.set_head_slope(df(0.0));
    for (int i = 1; i <= 8; ++i) {
        h.append(f(double(i) * step));
        h.set_head_slope(df(double(i) * step));
    }
    for (double t = 0.0; t <= 2.0; t += 0.0137)
        CHECK(h.eval(t) == doctest::Approx(f(t)).epsilon(1e-13));
}

TEST_CASE("smooth functions are interpolated to fourth order") {
    const double step_a = 0.1, step_b = 0.05;
    double worst_a = 0.0, worst_b = 0.0;
    for (int pass = 0; pass < 2; ++pass) {
        const double step = pass == 0 ? step_a : step_b;
        DelayHistory h(0.0, step, std::sin(0.0));
        h.set_head_slope(std::cos(0.0));
        const int n = int(std::lround(4.0 / step));
        for (int i = 1; i <= n; ++i) {
            h.append(std::sin(double(i) * step));
            h.set_head_slope(std::cos(double(i) * step));
        }
        double worst = 0.0;
        for (double t = 0.05; t < 3.9; t += 0.0113)
            worst = std::max(worst, std::abs(h.eval(t) - std::sin(t)));
        (pass == 0 ? worst_a : worst_b) = worst;
    }
    CHECK(worst_a / worst_b >= 12.0);  // halving the grid: about 2^4
}

TEST_CASE("head lookups and the overrun guard") {
    DelayHistory h(0.0, 0.5, 1.0);
    h.set_head_slope(0.0);
    h.append(2.0);
    CHECK(h.head_time() == doctest::Approx(0.5));
    CHECK(h.head_value() == 2.0);
    CHECK(h.eval(0.5) == 2.0);
    CHECK(h.eval(0.5 + 1e-15) == 2.0);  // fp slack at the head
    CHECK_THROWS_AS(h.eval(0.8), HistoryUnderrun);
}

TEST_CASE("invalid step is rejected") {
    CHECK_THROWS_AS(DelayHistory(0.0, 0.0, 1.0), std::invalid_argument);
}
