#include "rcpfluid/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace rcp {

namespace {

constexpr double kLevelTol = 1e-12;  // relative, for fair-share comparisons
constexpr int kBisectionCap = 200;

}  // namespace

double effective_capacity(double capacity, double alpha, double beta, double d,
                          const QueueFunction& queue) {
    if (!(capacity > 0.0) || !(alpha > 0.0) || !(d > 0.0) || beta < 0.0)
        throw std::invalid_argument("effective_capacity: invalid link parameters");
    if (beta == 0.0 || queue.is_zero()) return capacity;

    // g(y) = alpha (C - y)/(d C) - beta p(y)/(d^2 C), strictly decreasing,
    // g(0) = alpha/d > 0.
    const auto g = [&](double y) {
        return alpha * (capacity - y) / (d * capacity) -
               beta * queue.eval(y) / (d * d * capacity);
    };

    double hi = std::min(capacity, queue.domain_limit());
    if (queue.domain_limit() <= capacity) {
        // Singular family: walk toward the pole until the balance turns negative.
        double gap = 0.5 * hi;
        while (g(hi - gap) > 0.0 && gap > 1e-14 * hi) gap *= 0.5;
        hi -= gap;
    }
    double lo = 0.0;
    if (!(g(hi) <= 0.0))
        throw std::logic_error("effective_capacity: failed to bracket the balance point");

    for (int i = 0; i < kBisectionCap; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        (g(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double effective_capacity(const Network& net, std::size_t link,
                          const QueueFunction& queue) {
    const Link& l = net.links().at(link);
    return effective_capacity(l.capacity, l.alpha, l.beta, net.rtt_estimate(link),
                              queue);
}

std::vector<double> effective_capacities(const Network& net, const QueueSet& queues) {
    std::vector<double> ybar(net.link_count());
    for (std::size_t l = 0; l < net.link_count(); ++l)
        ybar[l] = effective_capacity(net, l, queues.at(l));
    return ybar;
}

Equilibrium water_fill(const Network& net, std::span<const double> ybar) {
    const std::size_t links = net.link_count();
    const std::size_t routes = net.route_count();
    if (ybar.size() != links)
        throw std::invalid_argument("water_fill: ybar size mismatch");
    for (double y : ybar)
        if (!(y > 0.0))
            throw std::invalid_argument("water_fill: effective capacities must be > 0");

    Equilibrium eq;
    eq.route_rate.assign(routes, 0.0);
    eq.link_rate.assign(links, 0.0);
    eq.effective_capacity.assign(ybar.begin(), ybar.end());
    eq.bottleneck.assign(routes, std::size_t(-1));
    eq.bottleneck_tie.assign(routes, false);

    std::vector<double> residual(ybar.begin(), ybar.end());
    std::vector<std::size_t> active_count(links, 0);
    std::vector<bool> frozen(routes, false);
    for (std::size_t l = 0; l < links; ++l)
        active_count[l] = net.routes_through(l).size();

    std::size_t remaining = routes;
    while (remaining > 0) {
        double level = std::numeric_limits<double>::infinity();
        for (std::size_t l = 0; l < links; ++l)
            if (active_count[l] > 0)
                level = std::min(level, residual[l] / double(active_count[l]));

        // Every link whose fair share ties the minimum saturates in this pass.
        std::vector<bool> saturating(links, false);
        for (std::size_t l = 0; l < links; ++l)
            if (active_count[l] > 0 &&
                residual[l] / double(active_count[l]) <= level * (1.0 + kLevelTol))
                saturating[l] = true;

        for (std::size_t r = 0; r < routes; ++r) {
            if (frozen[r]) continue;
            std::size_t hit = std::size_t(-1);
            int hits = 0;
            for (std::size_t l : net.links_on(r)) {
                if (!saturating[l]) continue;
                ++hits;
                if (hit == std::size_t(-1) ||
                    net.links()[l].id < net.links()[hit].id)
                    hit = l;
            }
            if (hits == 0) continue;
            frozen[r] = true;
            --remaining;
            eq.route_rate[r] = level;
            eq.bottleneck[r] = hit;
            eq.bottleneck_tie[r] = hits > 1;
            for (std::size_t l : net.links_on(r)) {
                residual[l] -= level;
                --active_count[l];
            }
        }
        eq.levels.push_back(level);
    }

    eq.saturated.assign(links, false);
    for (std::size_t l = 0; l < links; ++l) {
        double R = 0.0, demand = 0.0;
        for (std::size_t r : net.routes_through(l)) {
            R = std::max(R, eq.route_rate[r]);
            demand += eq.route_rate[r];
        }
        eq.link_rate[l] = R;
        eq.saturated[l] = demand >= ybar[l] * (1.0 - 1e-9);
    }
    return eq;
}

bool Equilibrium::bottlenecked_at(std::size_t route, std::size_t link) const {
    if (!saturated[link]) return false;
    const double x = route_rate[route];
    const double R = link_rate[link];
    return std::abs(x - R) <= kLevelTol * std::max(std::abs(R), 1.0);
}

Equilibrium solve_equilibrium(const Network& net, const QueueSet& queues) {
    return water_fill(net, effective_capacities(net, queues));
}

BottleneckCheck check_single_bottleneck(const Network& net, const Equilibrium& eq) {
    BottleneckCheck check;
    check.bottleneck_count.assign(net.route_count(), 0);
    for (std::size_t r = 0; r < net.route_count(); ++r) {
        int count = 0;
        for (std::size_t l : net.links_on(r))
            if (eq.bottlenecked_at(r, l)) ++count;
        check.bottleneck_count[r] = count;
        if (count != 1) {
            check.ok = false;
            check.violating_routes.push_back(r);
        }
    }
    return check;
}

}  // namespace rcp
