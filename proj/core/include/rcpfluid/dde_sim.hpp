#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "rcpfluid/equilibrium.hpp"
#include "rcpfluid/history.hpp"
#include "rcpfluid/network.hpp"
#include "rcpfluid/queue_model.hpp"

namespace rcp {

enum class SimMode { network, single_link_beta0 };

struct SimConfig {
    double step = 0.01;
    double horizon = 100.0;
    double eta = 1.0;  // gain multiplier applied uniformly to every link
    // Constant pre-history R_l(t) for t <= 0; one entry per link, or a
    // single entry broadcast to all links.
    std::vector<double> initial_rates;
    std::size_t record_stride = 1;
    SimMode mode = SimMode::network;
};

enum class SimStatus {
    completed,
    diverged,      // some rate exceeded the runaway guard
    domain_error,  // aggregate rate left a queue family's domain
    negative_rate, // integrator produced a negative rate (bug guard)
};

std::string to_string(SimStatus status);

struct SimTrace {
    std::vector<double> times;
    // Series are indexed [entity][sample].
    std::vector<std::vector<double>> link_rate;       // R_l(t)
    std::vector<std::vector<double>> route_rate;      // x_r(t)
    std::vector<std::vector<double>> aggregate_rate;  // y_l(t)
    std::vector<std::vector<double>> queue_length;    // q_l(t)
    SimStatus status = SimStatus::completed;
    std::string abort_reason;
    std::vector<std::string> warnings;
};

// Source rate of a route at time t: the smallest delayed link rate along
// the path, each hop looked up at t minus its return delay.
double source_rate(const Network& net, std::size_t route,
                   std::span<const DelayHistory> histories, double t);

// Aggregate flow into a link at time t: source rates of the routes
// through it, each delayed by the route's forward delay to the link.
double aggregate_flow(const Network& net, std::size_t link,
                      std::span<const DelayHistory> histories, double t);

// Rate derivative of one link given its current rate and aggregate flow:
// eta * R * (alpha (C-y)/(d C) - beta p(y)/(d^2 C)), with the update
// projected to 0 when it points below zero at a nonpositive rate.
double rate_derivative(const Link& link, double d, const QueueFunction& queue,
                       double rate, double aggregate, double eta);

// Fixed-step classic RK4 over the delayed dynamics. Delayed stage lookups
// go through per-link histories (appended once per step); zero-lag terms
// use the stage's working state, which makes the delay-free case plain
// RK4 on the ODE. Requires step <= (min positive delay)/20 when delays
// are present. Aborts (keeping the partial trace) on divergence,
// queue-domain violations, or a negative rate.
SimTrace run_simulation(const Network& net, const QueueSet& queues,
                        const SimConfig& config);

// Tail-window statistics of a finished trace.
struct LinkWindowStats {
    double amplitude = 0.0;  // half peak-to-peak over the window
    double mean = 0.0;
    double drift = 0.0;           // last - first over the window
    bool monotone_increasing = false;
    bool never_route_min = false; // link rate stays above every route rate through it
    bool no_equilibrium_suspect = false;
};

struct SimSummary {
    bool converged = false;
    bool diverged = false;
    std::vector<LinkWindowStats> links;
    std::vector<double> final_link_rate;
    std::vector<double> final_route_rate;
    bool any_no_equilibrium_suspect = false;
};

SimSummary summarize(const Network& net, const SimTrace& trace,
                     double window_fraction = 0.5);

}  // namespace rcp
