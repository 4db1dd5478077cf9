#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "rcpfluid/stability.hpp"
#include "support/builders.hpp"
#include "support/random_net.hpp"

using namespace rcp;
using rcptest::link;
using rcptest::route;

namespace {

Equilibrium solve(const Network& net, const QueueSet& queues) {
    return solve_equilibrium(net, queues);
}

}  // namespace

TEST_CASE("per-link condition on a symmetric single link") {
    // beta = 0, d = 1, C = 2, two unit-RTT routes: Rbar = 1, sum tau = 2.
    SUBCASE("alpha 0.5 passes") {
        const Network net = rcptest::single_link(2.0, 0.5, 1.0, 2);
        const QueueSet queues = QueueSet::all_zero(1);
        const Equilibrium eq = solve(net, queues);
        CHECK(stability_condition_lhs(net, 0, eq, queues.at(0)) ==
              doctest::Approx(0.5));
        CHECK(evaluate_stability(net, queues, eq).links[0].stability_ok);
    }
    SUBCASE("alpha 1.2 fails") {
        const Network net = rcptest::single_link(2.0, 1.2, 1.0, 2);
        const QueueSet queues = QueueSet::all_zero(1);
        const Equilibrium eq = solve(net, queues);
        CHECK(stability_condition_lhs(net, 0, eq, queues.at(0)) ==
              doctest::Approx(1.2));
        CHECK_FALSE(evaluate_stability(net, queues, eq).links[0].stability_ok);
    }
}

TEST_CASE("links without bottlenecked routes contribute an empty sum") {
    // B is saturated by nothing: its only route bottlenecks at A.
    NetworkConfig config;
    config.links = {link("A", 1.0, 1.0), link("B", 10.0, 1.0)};
    config.routes = {route("r1", {"A", "B"}, 1.0)};
    const Network net = Network::build(config);
    const QueueSet queues = QueueSet::all_zero(2);
    const Equilibrium eq = solve(net, queues);
    CHECK(stability_condition_lhs(net, net.link_index("B"), eq, queues.at(1)) == 0.0);
    CHECK(evaluate_stability(net, queues, eq).links[net.link_index("B")].stability_ok);
}

TEST_CASE("decentralized condition equals the per-link one in the symmetric case") {
    const Network net = rcptest::single_link(2.0, 0.5, 1.0, 2);
    const QueueSet queues = QueueSet::all_zero(1);
    const Equilibrium eq = solve(net, queues);
    CHECK(decentralized_condition_lhs(net, 0, eq, queues.at(0)) ==
          doctest::Approx(stability_condition_lhs(net, 0, eq, queues.at(0))));
}

TEST_CASE("a long non-bottlenecked route raises only the decentralized side") {
    // r2 bottlenecks at A but drags a long RTT through B.
    NetworkConfig config;
    config.links = {link("A", 1.0, 0.5), link("B", 8.0, 0.5)};
    config.routes = {route("r1", {"A"}, 1.0), route("r2", {"A", "B"}, 6.0),
                     route("r3", {"B"}, 1.0)};
    const Network net = Network::build(config);
    const QueueSet queues = QueueSet::all_zero(2);
    const Equilibrium eq = solve(net, queues);
    const std::size_t b = net.link_index("B");
    CHECK(decentralized_condition_lhs(net, b, eq, queues.at(b)) >
          stability_condition_lhs(net, b, eq, queues.at(b)));
}

TEST_CASE("vanishing gain satisfies both conditions") {
    const Network net = rcptest::single_link(2.0, 1e-4, 1.0, 2);
    const QueueSet queues = QueueSet::all_zero(1);
    const Equilibrium eq = solve(net, queues);
    CHECK(decentralized_condition_lhs(net, 0, eq, queues.at(0)) < 1e-3);
    CHECK(evaluate_stability(net, queues, eq).all_ok);
}

TEST_CASE("recommended alpha follows the gain rule") {
    SUBCASE("linear queue, gamma = 1") {
        // Single route: d_p == d, so alpha = 1/(1+1) = 0.5.
        NetworkConfig config;
        config.links = {link("L", 2.0, 1.0, 1.0)};
        config.routes = {route("r1", {"L"}, 1.0)};
        const Network net = Network::build(config);
        const QueueSet queues{{QueueFunction::linear(1.0)}};
        const Equilibrium eq = solve(net, queues);
        AlphaRule rule;
        CHECK(recommend_alpha(net, 0, eq, queues.at(0), &rule) ==
              doctest::Approx(0.5));
        CHECK(rule == AlphaRule::standard);
    }
    SUBCASE("square-law queue, gamma = 2") {
        NetworkConfig config;
        config.links = {link("L", 2.0, 1.0, 1.0)};
        config.routes = {route("r1", {"L"}, 1.0)};
        const Network net = Network::build(config);
        const QueueSet queues{{QueueFunction::power(1.0, 2.0)}};
        const Equilibrium eq = solve(net, queues);
        CHECK(recommend_alpha(net, 0, eq, queues.at(0)) ==
              doctest::Approx(1.0 / 3.0));
    }
    SUBCASE("beta = 0 variant is flagged") {
        // d_p = 1.5 (single route rtt), d = 2 override.
        NetworkConfig config;
        config.links = {link("L", 2.0, 1.0, 0.0, 2.0)};
        config.routes = {route("r1", {"L"}, 1.5)};
        const Network net = Network::build(config);
        const QueueSet queues = QueueSet::all_zero(1);
        const Equilibrium eq = solve(net, queues);
        AlphaRule rule;
        CHECK(recommend_alpha(net, 0, eq, queues.at(0), &rule) ==
              doctest::Approx(0.75));
        CHECK(rule == AlphaRule::beta_zero);
    }
    SUBCASE("beta > 0 with an identically zero queue is undefined") {
        NetworkConfig config;
        config.links = {link("L", 2.0, 1.0, 1.0)};
        config.routes = {route("r1", {"L"}, 1.0)};
        const Network net = Network::build(config);
        const QueueSet queues = QueueSet::all_zero(1);
        const Equilibrium eq = solve(net, queues);
        CHECK_THROWS_AS(recommend_alpha(net, 0, eq, queues.at(0)), QueueDomainError);
        const StabilityReport report = evaluate_stability(net, queues, eq);
        CHECK(report.links[0].alpha_rule == AlphaRule::undefined);
        CHECK(std::isnan(report.links[0].recommended_alpha));
    }
}

TEST_CASE("single-link predictions") {
    const HopfPrediction p = hopf_prediction(1.0, 1.0, 1.0);
    CHECK(p.eta_c == doctest::Approx(1.570796).epsilon(1e-6));
    CHECK(p.period == 4.0);
    // sqrt(20 pi / (3 pi - 2)) = sqrt(62.8318.../7.42478) = 2.90903...
    CHECK(p.amplitude_coefficient == doctest::Approx(2.90903).epsilon(1e-4));

    CHECK(hopf_prediction(1.0, 2.5, 1.0).period == 10.0);
    CHECK(hopf_prediction(1.0, 1.0, 3.0).amplitude_coefficient ==
          doctest::Approx(3.0 * 2.90903).epsilon(1e-4));

    std::mt19937 rng(5150);
    std::uniform_real_distribution<double> dist(0.05, 20.0);
    for (int i = 0; i < 200; ++i) {
        const double alpha = dist(rng);
        CHECK(hopf_prediction(alpha, 1.0, 1.0).eta_c * alpha ==
              doctest::Approx(std::numbers::pi / 2.0).epsilon(1e-15));
    }
    CHECK_THROWS_AS(hopf_prediction(0.0, 1.0, 1.0), std::invalid_argument);
}

namespace {

// p -> s p(y/s) keeps the condition dimensionless when capacities scale by s.
QueueFunction rescale(const QueueFunction& q, double s, double new_capacity) {
    switch (q.family()) {
        case QueueFamily::zero: return QueueFunction::zero();
        case QueueFamily::linear: return QueueFunction::linear(q.scale());
        case QueueFamily::power:
            return QueueFunction::power(q.scale() * std::pow(s, 1.0 - q.exponent()),
                                        q.exponent());
        case QueueFamily::mm1_scaled:
            return QueueFunction::mm1_scaled(q.scale() * s, new_capacity);
    }
    throw std::logic_error("unreachable");
}

}  // namespace

TEST_CASE("condition is invariant under consistent capacity rescaling") {
    std::mt19937 rng(90210);
    rcptest::RandomNetOptions opts;
    opts.linear_queues = true;
    for (int trial = 0; trial < 20; ++trial) {
        const auto inst = rcptest::random_instance(rng, opts);
        const double s = 3.7;

        NetworkConfig scaled;
        scaled.links = inst.net.links();
        scaled.routes = inst.net.routes();
        std::vector<QueueFunction> queues;
        for (std::size_t l = 0; l < scaled.links.size(); ++l) {
            scaled.links[l].capacity *= s;
            queues.push_back(
                rescale(inst.queues.at(l), s, scaled.links[l].capacity));
        }
        const Network net2 = Network::build(scaled);
        const QueueSet qs2{std::move(queues)};

        const Equilibrium eq1 = solve(inst.net, inst.queues);
        const Equilibrium eq2 = solve(net2, qs2);
        for (std::size_t l = 0; l < inst.net.link_count(); ++l) {
            CHECK(eq2.link_rate[l] ==
                  doctest::Approx(s * eq1.link_rate[l]).epsilon(1e-9));
            CHECK(stability_condition_lhs(net2, l, eq2, qs2.at(l)) ==
                  doctest::Approx(stability_condition_lhs(inst.net, l, eq1,
                                                          inst.queues.at(l)))
                      .epsilon(1e-9));
        }
    }
}

TEST_CASE("condition is strictly increasing in alpha") {
    SUBCASE("beta = 0 random networks") {
        std::mt19937 rng(424242);
        rcptest::RandomNetOptions opts;
        for (int trial = 0; trial < 20; ++trial) {
            const auto inst = rcptest::random_instance(rng, opts);
            const Equilibrium eq = solve(inst.net, inst.queues);
            for (std::size_t l = 0; l < inst.net.link_count(); ++l) {
                const double base =
                    stability_condition_lhs(inst.net, l, eq, inst.queues.at(l));
                if (base == 0.0) continue;  // no bottlenecked routes
                NetworkConfig bumped;
                bumped.links = inst.net.links();
                bumped.routes = inst.net.routes();
                bumped.links[l].alpha *= 1.25;
                const Network net2 = Network::build(bumped);
                const Equilibrium eq2 = solve(net2, inst.queues);
                CHECK(stability_condition_lhs(net2, l, eq2, inst.queues.at(l)) >
                      base);
            }
        }
    }
    SUBCASE("beta > 0 single link") {
        NetworkConfig config;
        config.links = {link("L", 2.0, 0.4, 1.0)};
        config.routes = {route("r1", {"L"}, 1.0), route("r2", {"L"}, 2.0)};
        const QueueSet queues{{QueueFunction::linear(0.8)}};
        double prev = 0.0;
        for (double alpha : {0.4, 0.6, 0.9, 1.3, 2.0}) {
            config.links[0].alpha = alpha;
            const Network net = Network::build(config);
            const Equilibrium eq = solve(net, queues);
            const double lhs = stability_condition_lhs(net, 0, eq, queues.at(0));
            CHECK(lhs > prev);
            prev = lhs;
        }
    }
}

TEST_CASE("condition is strictly increasing in a bottlenecked rtt") {
    // d fixed by override so the rtt only enters through the sum.
    NetworkConfig config;
    config.links = {link("L", 2.0, 0.4, 0.5, 1.5)};
    config.routes = {route("r1", {"L"}, 1.0), route("r2", {"L"}, 2.0)};
    const QueueSet queues{{QueueFunction::linear(0.8)}};
    double prev = 0.0;
    for (double rtt : {2.0, 2.5, 3.0, 4.0}) {
        config.routes[1].rtt = rtt;
        config.routes[1].forward_delays = {0.4 * rtt};
        const Network net = Network::build(config);
        const Equilibrium eq = solve(net, queues);
        const double lhs = stability_condition_lhs(net, 0, eq, queues.at(0));
        CHECK(lhs > prev);
        prev = lhs;
    }
}

TEST_CASE("decentralized pass implies the per-link pass") {
    std::mt19937 rng(3141592);
    int checked = 0;
    for (int trial = 0; trial < 100; ++trial) {
        rcptest::RandomNetOptions opts;
        opts.linear_queues = trial % 2 == 0;
        const auto inst = rcptest::random_instance(rng, opts);
        const Equilibrium eq = solve(inst.net, inst.queues);
        const StabilityReport report = evaluate_stability(inst.net, inst.queues, eq);
        for (const LinkStability& s : report.links) {
            if (s.decentralized_ok) CHECK(s.stability_ok);
            ++checked;
        }
    }
    CHECK(checked > 100);
}

TEST_CASE("applying the recommended gains satisfies the decentralized condition") {
    // Re-solving is required: the effective capacities move with alpha.
    NetworkConfig config;
    config.links = {link("A", 2.0, 1.0, 1.0), link("B", 5.0, 0.6, 0.8)};
    config.routes = {route("r1", {"A"}, 0.8), route("r2", {"A", "B"}, 1.0),
                     route("r3", {"B"}, 1.2)};
    const QueueSet queues{{QueueFunction::linear(1.0), QueueFunction::linear(0.5)}};

    const Network net = Network::build(config);
    const StabilityReport before =
        evaluate_stability(net, queues, solve_equilibrium(net, queues));
    for (std::size_t l = 0; l < config.links.size(); ++l)
        config.links[l].alpha = before.links[l].recommended_alpha;

    const Network tuned = Network::build(config);
    const StabilityReport after =
        evaluate_stability(tuned, queues, solve_equilibrium(tuned, queues));
    for (const LinkStability& s : after.links) {
        CHECK(s.decentralized_lhs < 1.0);
        CHECK(s.decentralized_ok);
        CHECK(s.stability_ok);
    }
}

TEST_CASE("report on the three-link scenario") {
    const Network net = Network::build(rcptest::three_link_config());
    const QueueSet queues = QueueSet::all_zero(3);
    const Equilibrium eq = solve(net, queues);

    CHECK(eq.route_rate[net.route_index("r1")] == doctest::Approx(1.0));
    CHECK(eq.route_rate[net.route_index("r2")] == doctest::Approx(1.0));
    CHECK(eq.route_rate[net.route_index("r3")] == doctest::Approx(4.0));
    CHECK(eq.route_rate[net.route_index("r4")] == doctest::Approx(5.0));

    const StabilityReport report = evaluate_stability(net, queues, eq);
    CHECK(report.assumption_ok);
    CHECK(report.all_ok);
    // Margins used by the acceptance scenario: every LHS at most 0.8.
    CHECK(report.links[net.link_index("A")].stability_lhs == doctest::Approx(0.5));
    for (const LinkStability& s : report.links) CHECK(s.stability_lhs <= 0.8);
}
