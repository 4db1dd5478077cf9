#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rcpfluid/network.hpp"
#include "rcpfluid/queue_model.hpp"

namespace rcp {

// Limiting allocation of the fluid model: max-min rates against the
// per-link effective capacities.
struct Equilibrium {
    std::vector<double> route_rate;          // x per route
    std::vector<double> link_rate;           // R per link: max route rate through it
    std::vector<double> effective_capacity;  // y per link
    std::vector<bool> saturated;             // per link: demand meets y
    std::vector<std::size_t> bottleneck;     // per route: link index it froze at
    std::vector<bool> bottleneck_tie;        // per route: several links froze it at once
    std::vector<double> levels;              // fill levels, in freezing order

    // A route is bottlenecked at a link when the link is saturated and the
    // route attains the link rate there. Links with spare capacity are not
    // bottlenecks: their rate would drift upward and drop out of every min.
    bool bottlenecked_at(std::size_t route, std::size_t link) const;
};

// Aggregate rate y at which the link's rate update balances:
// alpha (C - y) / (d C) == beta p(y) / (d^2 C). Unique because the left
// side is strictly decreasing and the right side non-decreasing in y.
// Returns C exactly when the queue term vanishes (beta == 0 or zero family);
// otherwise solved by bisection, bracketed strictly inside the queue domain.
double effective_capacity(double capacity, double alpha, double beta, double d,
                          const QueueFunction& queue);
double effective_capacity(const Network& net, std::size_t link,
                          const QueueFunction& queue);
std::vector<double> effective_capacities(const Network& net, const QueueSet& queues);

// Progressive max-min filling against per-link capacities `ybar`:
// repeatedly find the smallest residual fair share, freeze the routes
// through the minimizing links at that level, subtract, recurse. Ties
// freeze at all minimizing links at once; the recorded bottleneck is the
// lowest link id among them and the route is flagged.
Equilibrium water_fill(const Network& net, std::span<const double> ybar);

// effective_capacities + water_fill.
Equilibrium solve_equilibrium(const Network& net, const QueueSet& queues);

// Per-route check that exactly one link on the route attains the route's
// rate as its link rate. The delay-stability conditions are only proven
// under this assumption.
struct BottleneckCheck {
    bool ok = true;
    std::vector<int> bottleneck_count;          // per route
    std::vector<std::size_t> violating_routes;  // routes with count != 1
};

BottleneckCheck check_single_bottleneck(const Network& net, const Equilibrium& eq);

}  // namespace rcp
