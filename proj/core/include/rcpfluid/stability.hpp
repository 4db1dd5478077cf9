#pragma once

#include <cstddef>
#include <vector>

#include "rcpfluid/equilibrium.hpp"
#include "rcpfluid/network.hpp"
#include "rcpfluid/queue_model.hpp"

namespace rcp {

enum class AlphaRule {
    standard,   // d_p / (d (1 + gamma))
    beta_zero,  // queue term off: d_p / d
    undefined,  // beta > 0 but the queue length is 0 at equilibrium
};

struct LinkStability {
    // Sufficient local-stability condition for the link: the gain factor
    // times the link rate times the summed RTTs of the routes bottlenecked
    // at the link must stay below 1.
    double stability_lhs = 0.0;
    bool stability_ok = false;
    // Decentralized variant using the packet-weighted RTT over all routes
    // through the link; satisfying it implies the condition above.
    double decentralized_lhs = 0.0;
    bool decentralized_ok = false;
    double recommended_alpha = 0.0;  // NaN when undefined
    AlphaRule alpha_rule = AlphaRule::standard;
};

struct StabilityReport {
    std::vector<LinkStability> links;
    bool all_ok = false;         // every link passes the per-link condition
    bool assumption_ok = false;  // single bottleneck per route at equilibrium
};

// LHS of the per-link condition:
// (alpha/(d C) + beta p'(ybar)/(d^2 C)) * Rbar * sum of rtt over routes
// bottlenecked at the link. Empty sum gives 0.
double stability_condition_lhs(const Network& net, std::size_t link,
                               const Equilibrium& eq, const QueueFunction& queue);

// LHS of the decentralized condition:
// (alpha/d + beta p'(ybar)/d^2) * (ybar/C) * per-packet RTT over all routes
// through the link.
double decentralized_condition_lhs(const Network& net, std::size_t link,
                                   const Equilibrium& eq, const QueueFunction& queue);

// Gain choice that guarantees the decentralized condition at the current
// equilibrium. The returned value must be applied and the equilibrium
// re-solved before drawing conclusions, since the effective capacities
// depend on alpha. Throws QueueDomainError when beta > 0 but the queue
// is empty at equilibrium.
double recommend_alpha(const Network& net, std::size_t link, const Equilibrium& eq,
                       const QueueFunction& queue, AlphaRule* rule_out = nullptr);

StabilityReport evaluate_stability(const Network& net, const QueueSet& queues,
                                   const Equilibrium& eq);

// Single-link predictions at the edge of stability: critical gain
// eta_c = pi/(2 alpha), oscillation period 4 tau, and the coefficient
// Rbar * sqrt(20 pi / (3 pi - 2)) multiplying sqrt(eta - eta_c) in the
// first-order amplitude law.
struct HopfPrediction {
    double eta_c = 0.0;
    double period = 0.0;
    double amplitude_coefficient = 0.0;
};

HopfPrediction hopf_prediction(double alpha, double tau, double link_rate);

}  // namespace rcp
