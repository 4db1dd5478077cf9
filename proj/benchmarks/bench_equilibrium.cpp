#include <benchmark/benchmark.h>

#include <random>

#include "rcpfluid/equilibrium.hpp"

namespace {

// Dense random topology: every route crosses about half the links.
rcp::NetworkConfig random_config(std::size_t links, std::size_t routes,
                                 unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> cap(1.0, 10.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    rcp::NetworkConfig config;
    for (std::size_t l = 0; l < links; ++l) {
        rcp::Link link;
        link.id = "L" + std::to_string(l);
        link.capacity = cap(rng);
        link.alpha = 1.0;
        config.links.push_back(link);
    }
    for (std::size_t r = 0; r < routes; ++r) {
        rcp::Route route;
        route.id = "r" + std::to_string(r);
        for (std::size_t l = 0; l < links; ++l)
            if (l == r % links || unit(rng) < 0.5)
                route.links.push_back("L" + std::to_string(l));
        route.rtt = 1.0;
        route.forward_delays.assign(route.links.size(), 0.4);
        config.routes.push_back(route);
    }
    return config;
}

void WaterFill(benchmark::State& state) {
    const rcp::Network net =
        rcp::Network::build(random_config(std::size_t(state.range(0)),
                                          std::size_t(state.range(0)) * 4, 42));
    std::vector<double> ybar(net.link_count());
    for (std::size_t l = 0; l < net.link_count(); ++l)
        ybar[l] = net.links()[l].capacity;
    for (auto _ : state) {
        const rcp::Equilibrium eq = rcp::water_fill(net, ybar);
        benchmark::DoNotOptimize(eq.route_rate.data());
    }
}
BENCHMARK(WaterFill)->Arg(5)->Arg(20)->Arg(80);

void EffectiveCapacityBisection(benchmark::State& state) {
    const rcp::QueueFunction q = rcp::QueueFunction::mm1_scaled(0.7, 4.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(rcp::effective_capacity(4.0, 0.9, 1.3, 1.1, q));
    }
}
BENCHMARK(EffectiveCapacityBisection);

}  // namespace
