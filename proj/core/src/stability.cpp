#include "rcpfluid/stability.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace rcp {

namespace {

// alpha/(d C) + beta p'(ybar)/(d^2 C)
double gain_factor(const Network& net, std::size_t link, const Equilibrium& eq,
                   const QueueFunction& queue) {
    const Link& l = net.links()[link];
    const double d = net.rtt_estimate(link);
    double factor = l.alpha / (d * l.capacity);
    if (l.beta > 0.0 && !queue.is_zero())
        factor += l.beta * queue.derivative(eq.effective_capacity[link]) /
                  (d * d * l.capacity);
    return factor;
}

}  // namespace

double stability_condition_lhs(const Network& net, std::size_t link,
                               const Equilibrium& eq, const QueueFunction& queue) {
    double rtt_sum = 0.0;
    for (std::size_t r : net.routes_through(link))
        if (eq.bottlenecked_at(r, link)) rtt_sum += net.rtt(r);
    return gain_factor(net, link, eq, queue) * eq.link_rate[link] * rtt_sum;
}

double decentralized_condition_lhs(const Network& net, std::size_t link,
                                   const Equilibrium& eq, const QueueFunction& queue) {
    const Link& l = net.links()[link];
    const double d = net.rtt_estimate(link);
    const double d_packet = net.per_packet_rtt(link, eq.route_rate);
    double factor = l.alpha / d;
    if (l.beta > 0.0 && !queue.is_zero())
        factor += l.beta * queue.derivative(eq.effective_capacity[link]) / (d * d);
    return factor * (eq.effective_capacity[link] / l.capacity) * d_packet;
}

double recommend_alpha(const Network& net, std::size_t link, const Equilibrium& eq,
                       const QueueFunction& queue, AlphaRule* rule_out) {
    const Link& l = net.links()[link];
    const double d = net.rtt_estimate(link);
    const double d_packet = net.per_packet_rtt(link, eq.route_rate);

    AlphaRule rule = AlphaRule::standard;
    double alpha;
    if (l.beta == 0.0) {
        // The elasticity prefactor presumes a queue term; with it gone the
        // 1/(1+gamma) factor drops out.
        rule = AlphaRule::beta_zero;
        alpha = d_packet / d;
    } else {
        const double ybar = eq.effective_capacity[link];
        if (queue.is_zero() || !(queue.eval(ybar) > 0.0)) {
            if (rule_out) *rule_out = AlphaRule::undefined;
            throw QueueDomainError(
                "recommend_alpha: queue length is 0 at equilibrium with beta > 0");
        }
        alpha = d_packet / (d * (1.0 + queue.elasticity(ybar)));
    }
    if (rule_out) *rule_out = rule;
    return alpha;
}

StabilityReport evaluate_stability(const Network& net, const QueueSet& queues,
                                   const Equilibrium& eq) {
    StabilityReport report;
    report.links.resize(net.link_count());
    report.all_ok = true;
    for (std::size_t l = 0; l < net.link_count(); ++l) {
        LinkStability& entry = report.links[l];
        entry.stability_lhs = stability_condition_lhs(net, l, eq, queues.at(l));
        entry.stability_ok = entry.stability_lhs < 1.0;
        entry.decentralized_lhs = decentralized_condition_lhs(net, l, eq, queues.at(l));
        entry.decentralized_ok = entry.decentralized_lhs < 1.0;
        try {
            entry.recommended_alpha =
                recommend_alpha(net, l, eq, queues.at(l), &entry.alpha_rule);
        } catch (const QueueDomainError&) {
            entry.recommended_alpha = std::numeric_limits<double>::quiet_NaN();
            entry.alpha_rule = AlphaRule::undefined;
        }
        report.all_ok = report.all_ok && entry.stability_ok;
    }
    report.assumption_ok = check_single_bottleneck(net, eq).ok;
    return report;
}

HopfPrediction hopf_prediction(double alpha, double tau, double link_rate) {
    if (!(alpha > 0.0) || !(tau > 0.0))
        throw std::invalid_argument("hopf_prediction: alpha and tau must be > 0");
    HopfPrediction p;
    p.eta_c = std::numbers::pi / (2.0 * alpha);
    p.period = 4.0 * tau;
    p.amplitude_coefficient =
        link_rate * std::sqrt(20.0 * std::numbers::pi / (3.0 * std::numbers::pi - 2.0));
    return p;
}

}  // namespace rcp
