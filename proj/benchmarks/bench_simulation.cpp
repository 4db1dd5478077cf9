#include <benchmark/benchmark.h>

#include "rcpfluid/dde_sim.hpp"
#include "rcpfluid/network.hpp"
#include "rcpfluid/queue_model.hpp"

namespace {

rcp::Network single_link(std::size_t routes) {
    rcp::NetworkConfig config;
    rcp::Link l;
    l.id = "L";
    l.capacity = 2.0;
    l.alpha = 1.0;
    config.links = {l};
    for (std::size_t i = 0; i < routes; ++i) {
        rcp::Route r;
        r.id = "r" + std::to_string(i);
        r.links = {"L"};
        r.rtt = 1.0;
        r.forward_delays = {0.4};
        config.routes.push_back(r);
    }
    return rcp::Network::build(config);
}

rcp::Network mesh() {
    rcp::NetworkConfig config;
    for (char id : {'A', 'B', 'C'}) {
        rcp::Link l;
        l.id = std::string(1, id);
        l.capacity = id == 'B' ? 10.0 : 4.0;
        l.alpha = 0.7;
        config.links.push_back(l);
    }
    const std::vector<std::vector<std::string>> paths = {
        {"A"}, {"A", "B"}, {"B", "C"}, {"B"}};
    for (std::size_t i = 0; i < paths.size(); ++i) {
        rcp::Route r;
        r.id = "r" + std::to_string(i);
        r.links = paths[i];
        r.rtt = 1.0 + 0.3 * double(i);
        r.forward_delays.assign(r.links.size(), 0.3);
        config.routes.push_back(r);
    }
    return rcp::Network::build(config);
}

void StepsSingleLink(benchmark::State& state) {
    const rcp::Network net = single_link(std::size_t(state.range(0)));
    const rcp::QueueSet queues = rcp::QueueSet::all_zero(1);
    rcp::SimConfig config;
    config.step = 0.02;
    config.horizon = 200.0;
    config.initial_rates = {1.3};
    config.record_stride = 1 << 20;
    for (auto _ : state) {
        const rcp::SimTrace trace = rcp::run_simulation(net, queues, config);
        benchmark::DoNotOptimize(trace.link_rate[0].back());
    }
    state.SetItemsProcessed(state.iterations() * int64_t(config.horizon / config.step));
}
BENCHMARK(StepsSingleLink)->Arg(1)->Arg(4)->Arg(16);

void StepsMesh(benchmark::State& state) {
    const rcp::Network net = mesh();
    const rcp::QueueSet queues = rcp::QueueSet::all_zero(net.link_count());
    rcp::SimConfig config;
    config.step = 0.01;
    config.horizon = 100.0;
    config.initial_rates = {2.0, 5.0, 3.0};
    config.record_stride = 1 << 20;
    for (auto _ : state) {
        const rcp::SimTrace trace = rcp::run_simulation(net, queues, config);
        benchmark::DoNotOptimize(trace.link_rate[0].back());
    }
    state.SetItemsProcessed(state.iterations() * int64_t(config.horizon / config.step));
}
BENCHMARK(StepsMesh);

}  // namespace

BENCHMARK_MAIN();
