#include <doctest.h>

#include <random>

#include "rcpfluid/network.hpp"
#include "support/builders.hpp"
#include "support/random_net.hpp"

using namespace rcp;
using rcptest::link;

namespace {

NetworkConfig single_link_config(double fwd, double ret, double rtt) {
    NetworkConfig config;
    config.links = {link("L", 1.0, 1.0)};
    Route r;
    r.id = "r1";
    r.links = {"L"};
    r.forward_delays = {fwd};
    r.return_delays = {ret};
    r.rtt = rtt;
    config.routes = {r};
    return config;
}

}  // namespace

TEST_CASE("validate accepts a consistent single link") {
    CHECK(validate(single_link_config(0.4, 0.6, 1.0)).ok());
}

TEST_CASE("validate flags a per-hop RTT mismatch") {
    const ValidationReport report = validate(single_link_config(0.4, 0.7, 1.0));
    REQUIRE_FALSE(report.ok());
    CHECK(report.to_string().find("RTT mismatch on (r1,L): 1.1 != 1") !=
          std::string::npos);
}

TEST_CASE("validate flags an unknown link reference") {
    NetworkConfig config = single_link_config(0.4, 0.6, 1.0);
    config.routes[0].links = {"X"};
    config.routes[0].forward_delays = {0.4};
    config.routes[0].return_delays = {0.6};
    const ValidationReport report = validate(config);
    REQUIRE_FALSE(report.ok());
    CHECK(report.to_string().find("unknown link") != std::string::npos);
}

TEST_CASE("validate flags structural problems") {
    NetworkConfig config = single_link_config(0.4, 0.6, 1.0);

    SUBCASE("link without routes") {
        config.links.push_back(link("M", 1.0, 1.0));
        const auto report = validate(config);
        REQUIRE_FALSE(report.ok());
        CHECK(report.to_string().find("carries no routes") != std::string::npos);
    }
    SUBCASE("nonpositive parameters") {
        config.links[0].capacity = 0.0;
        CHECK_FALSE(validate(config).ok());
        config.links[0].capacity = 1.0;
        config.links[0].alpha = -1.0;
        CHECK_FALSE(validate(config).ok());
        config.links[0].alpha = 1.0;
        config.links[0].beta = -0.5;
        CHECK_FALSE(validate(config).ok());
    }
    SUBCASE("negative derived return delay") {
        config.routes[0].return_delays.clear();
        config.routes[0].forward_delays = {1.4};
        const auto report = validate(config);
        REQUIRE_FALSE(report.ok());
        CHECK(report.to_string().find("negative") != std::string::npos);
    }
    SUBCASE("zero rtt outside delay-free mode") {
        config.routes.push_back(config.routes[0]);
        config.routes[1].id = "r2";
        config.routes[1].rtt = 0.0;
        config.routes[1].forward_delays = {0.0};
        config.routes[1].return_delays = {0.0};
        CHECK_FALSE(validate(config).ok());
    }
    SUBCASE("delay-free mode needs an explicit d") {
        config.routes[0].rtt = 0.0;
        config.routes[0].forward_delays = {0.0};
        config.routes[0].return_delays = {0.0};
        CHECK_FALSE(validate(config).ok());
        config.links[0].rtt_estimate = 1.0;
        CHECK(validate(config).ok());
    }
    SUBCASE("duplicate ids") {
        config.links.push_back(config.links[0]);
        CHECK_FALSE(validate(config).ok());
    }
}

TEST_CASE("validate is pure and repeatable") {
    const NetworkConfig config = single_link_config(0.4, 0.7, 1.0);
    const auto first = validate(config);
    const auto second = validate(config);
    CHECK(first.to_string() == second.to_string());
}

TEST_CASE("return delays are derived from the rtt when omitted") {
    NetworkConfig config = single_link_config(0.4, 0.6, 1.0);
    config.routes[0].return_delays.clear();
    const Network net = Network::build(config);
    CHECK(net.return_delay(0, 0) == doctest::Approx(0.6));
}

TEST_CASE("mean_rtt averages the routes through a link") {
    NetworkConfig config;
    config.links = {link("L", 1.0, 1.0)};

    SUBCASE("one route") {
        config.routes = {rcptest::route("r1", {"L"}, 1.0)};
        CHECK(Network::build(config).mean_rtt(0) == doctest::Approx(1.0));
    }
    SUBCASE("two routes") {
        config.routes = {rcptest::route("r1", {"L"}, 1.0),
                         rcptest::route("r2", {"L"}, 3.0)};
        CHECK(Network::build(config).mean_rtt(0) == doctest::Approx(2.0));
    }
    SUBCASE("three routes") {
        config.routes = {rcptest::route("r1", {"L"}, 1.0),
                         rcptest::route("r2", {"L"}, 1.0),
                         rcptest::route("r3", {"L"}, 4.0)};
        CHECK(Network::build(config).mean_rtt(0) == doctest::Approx(2.0));
    }
}

TEST_CASE("d defaults to the mean rtt and honours overrides") {
    NetworkConfig config;
    config.links = {link("L", 1.0, 1.0)};
    config.routes = {rcptest::route("r1", {"L"}, 1.0),
                     rcptest::route("r2", {"L"}, 3.0)};
    CHECK(Network::build(config).rtt_estimate(0) == doctest::Approx(2.0));
    config.links[0].rtt_estimate = 5.0;
    CHECK(Network::build(config).rtt_estimate(0) == doctest::Approx(5.0));
}

TEST_CASE("per_packet_rtt weights by rate") {
    NetworkConfig config;
    config.links = {link("L", 1.0, 1.0)};

    SUBCASE("single route reduces to its rtt") {
        config.routes = {rcptest::route("r1", {"L"}, 2.0)};
        const Network net = Network::build(config);
        const std::vector<double> x{7.3};
        CHECK(net.per_packet_rtt(0, x) == doctest::Approx(2.0));
    }
    SUBCASE("weighted average") {
        config.routes = {rcptest::route("r1", {"L"}, 2.0),
                         rcptest::route("r2", {"L"}, 4.0)};
        const Network net = Network::build(config);
        const std::vector<double> x{1.0, 3.0};
        CHECK(net.per_packet_rtt(0, x) == doctest::Approx(3.5));
    }
    SUBCASE("uniform rates reduce to the mean rtt") {
        config.routes = {rcptest::route("r1", {"L"}, 1.0),
                         rcptest::route("r2", {"L"}, 3.0)};
        const Network net = Network::build(config);
        const std::vector<double> x{0.7, 0.7};
        CHECK(net.per_packet_rtt(0, x) == doctest::Approx(net.mean_rtt(0)));
    }
    SUBCASE("zero aggregate flow is an error") {
        config.routes = {rcptest::route("r1", {"L"}, 2.0)};
        const Network net = Network::build(config);
        const std::vector<double> x{0.0};
        CHECK_THROWS_AS(net.per_packet_rtt(0, x), std::invalid_argument);
    }
}

TEST_CASE("unknown ids raise") {
    const Network net = Network::build(single_link_config(0.4, 0.6, 1.0));
    CHECK_THROWS_AS(net.link_index("nope"), std::out_of_range);
    CHECK_THROWS_AS(net.route_index("nope"), std::out_of_range);
}

TEST_CASE("rtt statistics on random networks") {
    std::mt19937 rng(20240811);
    rcptest::RandomNetOptions opts;
    for (int i = 0; i < 50; ++i) {
        const auto inst = rcptest::random_instance(rng, opts);
        for (std::size_t l = 0; l < inst.net.link_count(); ++l) {
            double lo = 1e300, hi = 0.0;
            for (std::size_t r : inst.net.routes_through(l)) {
                lo = std::min(lo, inst.net.rtt(r));
                hi = std::max(hi, inst.net.rtt(r));
            }
            const double mean = inst.net.mean_rtt(l);
            CHECK(mean >= lo - 1e-12);
            CHECK(mean <= hi + 1e-12);

            // Equal rates: the packet-weighted mean collapses to the plain mean.
            std::vector<double> x(inst.net.route_count(), 1.7);
            CHECK(inst.net.per_packet_rtt(l, x) == doctest::Approx(mean));
        }
    }
}
