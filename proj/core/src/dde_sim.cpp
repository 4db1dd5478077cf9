#include "rcpfluid/dde_sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace rcp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kDivergenceFactor = 1e6;  // of the largest capacity
constexpr double kStepsPerMinDelay = 20.0;

struct DelayedTerm {
    std::size_t link;  // whose rate is read
    double lag;        // forward delay to the observed link + its return delay
};

// Flattened lookup plan: for each link, for each route through it, the
// delayed link-rate terms whose min forms that route's contribution.
struct LookupPlan {
    struct RouteTerm {
        std::size_t first = 0;
        std::size_t count = 0;
    };
    std::vector<std::vector<RouteTerm>> per_link;
    std::vector<DelayedTerm> terms;
    double max_lag = 0.0;
    double min_positive_lag = 0.0;

    explicit LookupPlan(const Network& net) {
        per_link.resize(net.link_count());
        for (std::size_t l = 0; l < net.link_count(); ++l) {
            for (std::size_t r : net.routes_through(l)) {
                const auto hops = net.links_on(r);
                std::size_t hop_of_l = 0;
                for (std::size_t i = 0; i < hops.size(); ++i)
                    if (hops[i] == l) hop_of_l = i;
                const double fwd = net.forward_delay(r, hop_of_l);
                RouteTerm rt{terms.size(), hops.size()};
                for (std::size_t j = 0; j < hops.size(); ++j) {
                    const double lag = fwd + net.return_delay(r, j);
                    terms.push_back({hops[j], lag});
                    max_lag = std::max(max_lag, lag);
                    if (lag > 0.0 &&
                        (min_positive_lag == 0.0 || lag < min_positive_lag))
                        min_positive_lag = lag;
                }
                per_link[l].push_back(rt);
            }
        }
    }
};

std::string describe(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

void validate_single_link_mode(const Network& net) {
    if (net.link_count() != 1)
        throw std::invalid_argument("single_link_beta0 mode needs exactly one link");
    if (net.links()[0].beta != 0.0)
        throw std::invalid_argument("single_link_beta0 mode needs beta == 0");
    const double tau = net.rtt(0);
    if (!(tau > 0.0))
        throw std::invalid_argument("single_link_beta0 mode needs a positive delay");
    for (std::size_t r = 0; r < net.route_count(); ++r)
        if (std::abs(net.rtt(r) - tau) > 1e-9 * tau)
            throw std::invalid_argument(
                "single_link_beta0 mode needs one common round trip time");
    if (std::abs(net.rtt_estimate(0) - tau) > 1e-9 * tau)
        throw std::invalid_argument(
            "single_link_beta0 mode needs d equal to the round trip time");
}

}  // namespace

std::string to_string(SimStatus status) {
    switch (status) {
        case SimStatus::completed: return "completed";
        case SimStatus::diverged: return "diverged";
        case SimStatus::domain_error: return "domain_error";
        case SimStatus::negative_rate: return "negative_rate";
    }
    return "?";
}

double source_rate(const Network& net, std::size_t route,
                   std::span<const DelayHistory> histories, double t) {
    double m = kInf;
    const auto hops = net.links_on(route);
    for (std::size_t j = 0; j < hops.size(); ++j)
        m = std::min(m, histories[hops[j]].eval(t - net.return_delay(route, j)));
    return m;
}

double aggregate_flow(const Network& net, std::size_t link,
                      std::span<const DelayHistory> histories, double t) {
    double sum = 0.0;
    for (std::size_t r : net.routes_through(link)) {
        const auto hops = net.links_on(r);
        std::size_t hop_of_l = 0;
        for (std::size_t i = 0; i < hops.size(); ++i)
            if (hops[i] == link) hop_of_l = i;
        sum += source_rate(net, r, histories, t - net.forward_delay(r, hop_of_l));
    }
    return sum;
}

double rate_derivative(const Link& link, double d, const QueueFunction& queue,
                       double rate, double aggregate, double eta) {
    double g = link.alpha * (link.capacity - aggregate) / (d * link.capacity);
    if (link.beta > 0.0 && !queue.is_zero())
        g -= link.beta * queue.eval(aggregate) / (d * d * link.capacity);
    if (g < 0.0 && rate <= 0.0) g = 0.0;  // projection keeps rates nonnegative
    return eta * rate * g;
}

SimTrace run_simulation(const Network& net, const QueueSet& queues,
                        const SimConfig& config) {
    const std::size_t links = net.link_count();
    const std::size_t routes = net.route_count();
    const double h = config.step;

    if (!(h > 0.0)) throw std::invalid_argument("sim: step must be > 0");
    if (!(config.horizon >= h))
        throw std::invalid_argument("sim: horizon shorter than one step");
    if (config.record_stride < 1)
        throw std::invalid_argument("sim: record_stride must be >= 1");
    if (queues.size() != links)
        throw std::invalid_argument("sim: one queue function per link required");
    const LookupPlan plan(net);
    // Keeping every positive lookup lag at 20+ steps guarantees the RK
    // stages only ever read the frozen history.
    if (plan.min_positive_lag > 0.0 &&
        h > plan.min_positive_lag / kStepsPerMinDelay + 1e-15)
        throw std::invalid_argument(
            "sim: step must be at most 1/" + describe(kStepsPerMinDelay) +
            " of the smallest positive delay (" + describe(plan.min_positive_lag) +
            ")");
    if (config.mode == SimMode::single_link_beta0) validate_single_link_mode(net);

    std::vector<double> r0 = config.initial_rates;
    if (r0.size() == 1) r0.assign(links, r0[0]);
    if (r0.size() != links)
        throw std::invalid_argument("sim: initial_rates must match the link count");
    for (double v : r0)
        if (!(v >= 0.0) || !std::isfinite(v))
            throw std::invalid_argument("sim: initial rates must be finite and >= 0");

    SimTrace trace;
    if (!net.delay_free() && config.horizon < 10.0 * net.max_rtt())
        trace.warnings.push_back("horizon is below 10x the largest round trip time");

    const double guard = kDivergenceFactor * net.max_capacity();
    const auto steps = static_cast<long long>(std::llround(config.horizon / h));

    std::vector<DelayHistory> histories;
    histories.reserve(links);
    for (std::size_t l = 0; l < links; ++l) histories.emplace_back(0.0, h, r0[l]);

    std::vector<double> state = r0;
    std::vector<double> stage(links), k1(links), k2(links), k3(links), k4(links);

    // Aggregate flow at stage time s: delayed terms come from the frozen
    // histories, zero-lag terms from the stage's working state.
    const auto stage_aggregate = [&](std::size_t l, double s,
                                     const std::vector<double>& st) {
        double y = 0.0;
        for (const auto& rt : plan.per_link[l]) {
            double m = kInf;
            for (std::size_t i = rt.first; i < rt.first + rt.count; ++i) {
                const DelayedTerm& term = plan.terms[i];
                m = std::min(m, term.lag == 0.0 ? st[term.link]
                                                : histories[term.link].eval(s - term.lag));
            }
            y += m;
        }
        return y;
    };
    const auto derivatives = [&](double s, const std::vector<double>& st,
                                 std::vector<double>& out) {
        for (std::size_t l = 0; l < links; ++l)
            out[l] = rate_derivative(net.links()[l], net.rtt_estimate(l), queues.at(l),
                                     st[l], stage_aggregate(l, s, st), config.eta);
    };

    trace.link_rate.resize(links);
    trace.route_rate.resize(routes);
    trace.aggregate_rate.resize(links);
    trace.queue_length.resize(links);
    const std::span<const DelayHistory> hist_view(histories);
    const auto record = [&](double t) {
        trace.times.push_back(t);
        for (std::size_t l = 0; l < links; ++l)
            trace.link_rate[l].push_back(histories[l].head_value());
        for (std::size_t r = 0; r < routes; ++r)
            trace.route_rate[r].push_back(source_rate(net, r, hist_view, t));
        for (std::size_t l = 0; l < links; ++l) {
            const double y = aggregate_flow(net, l, hist_view, t);
            trace.aggregate_rate[l].push_back(y);
            double q = 0.0;
            if (!queues.at(l).is_zero()) {
                const double limit = queues.at(l).domain_limit();
                q = y < limit ? queues.at(l).eval(y)
                              : std::numeric_limits<double>::quiet_NaN();
            }
            trace.queue_length[l].push_back(q);
        }
    };

    record(0.0);
    for (long long n = 0; n < steps; ++n) {
        const double t = double(n) * h;
        try {
            derivatives(t, state, k1);
            for (std::size_t l = 0; l < links; ++l)
                histories[l].set_head_slope(k1[l]);

            for (std::size_t l = 0; l < links; ++l)
                stage[l] = state[l] + 0.5 * h * k1[l];
            derivatives(t + 0.5 * h, stage, k2);
            for (std::size_t l = 0; l < links; ++l)
                stage[l] = state[l] + 0.5 * h * k2[l];
            derivatives(t + 0.5 * h, stage, k3);
            for (std::size_t l = 0; l < links; ++l)
                stage[l] = state[l] + h * k3[l];
            derivatives(t + h, stage, k4);
        } catch (const QueueDomainError& e) {
            trace.status = SimStatus::domain_error;
            trace.abort_reason = e.what();
            break;
        }

        bool bad = false;
        for (std::size_t l = 0; l < links; ++l) {
            const double next =
                state[l] + h / 6.0 * (k1[l] + 2.0 * k2[l] + 2.0 * k3[l] + k4[l]);
            if (!std::isfinite(next) || next > guard) {
                trace.status = SimStatus::diverged;
                trace.abort_reason = "rate on link " + net.links()[l].id +
                                     " exceeded " + describe(guard);
                bad = true;
                break;
            }
            if (next < 0.0) {
                trace.status = SimStatus::negative_rate;
                trace.abort_reason = "negative rate on link " + net.links()[l].id;
                bad = true;
                break;
            }
            stage[l] = next;
        }
        if (bad) break;

        state = stage;
        for (std::size_t l = 0; l < links; ++l) histories[l].append(state[l]);
        const long long done = n + 1;
        if (done % static_cast<long long>(config.record_stride) == 0 || done == steps)
            record(double(done) * h);
    }

    if (trace.status != SimStatus::completed &&
        (trace.times.empty() || trace.times.back() < histories[0].head_time()))
        record(histories[0].head_time());
    return trace;
}

SimSummary summarize(const Network& net, const SimTrace& trace,
                     double window_fraction) {
    if (trace.times.size() < 2)
        throw std::invalid_argument("summarize: trace too short");
    if (!(window_fraction > 0.0) || !(window_fraction <= 1.0))
        throw std::invalid_argument("summarize: window_fraction must be in (0, 1]");

    SimSummary summary;
    const std::size_t samples = trace.times.size();
    const double t0 = trace.times.front(), t1 = trace.times.back();
    std::size_t begin = 0;
    while (begin + 2 < samples &&
           trace.times[begin] < t1 - window_fraction * (t1 - t0))
        ++begin;

    summary.links.resize(net.link_count());
    summary.diverged = trace.status == SimStatus::diverged;
    bool all_flat = trace.status == SimStatus::completed;

    for (std::size_t l = 0; l < net.link_count(); ++l) {
        const auto& series = trace.link_rate[l];
        LinkWindowStats& stats = summary.links[l];
        double lo = kInf, hi = -kInf, sum = 0.0;
        bool monotone = true;
        for (std::size_t i = begin; i < samples; ++i) {
            lo = std::min(lo, series[i]);
            hi = std::max(hi, series[i]);
            sum += series[i];
            if (i > begin && series[i] < series[i - 1] - 1e-9 * std::abs(series[i - 1]))
                monotone = false;
        }
        stats.amplitude = 0.5 * (hi - lo);
        stats.mean = sum / double(samples - begin);
        stats.drift = series[samples - 1] - series[begin];
        stats.monotone_increasing =
            monotone && stats.drift > 1e-3 * std::max(std::abs(series[begin]), 1e-300);

        stats.never_route_min = true;
        for (std::size_t i = begin; i < samples && stats.never_route_min; ++i)
            for (std::size_t r : net.routes_through(l))
                if (series[i] <= trace.route_rate[r][i] * (1.0 + 1e-3)) {
                    stats.never_route_min = false;
                    break;
                }

        stats.no_equilibrium_suspect =
            stats.monotone_increasing && stats.never_route_min &&
            stats.drift > 0.1 * std::max(series[begin], 1e-300);
        summary.any_no_equilibrium_suspect |= stats.no_equilibrium_suspect;

        if (stats.amplitude > 1e-6 * std::max(std::abs(stats.mean), 1e-300))
            all_flat = false;
    }
    summary.converged = all_flat;

    summary.final_link_rate.resize(net.link_count());
    for (std::size_t l = 0; l < net.link_count(); ++l)
        summary.final_link_rate[l] = trace.link_rate[l].back();
    summary.final_route_rate.resize(net.route_count());
    for (std::size_t r = 0; r < net.route_count(); ++r)
        summary.final_route_rate[r] = trace.route_rate[r].back();
    return summary;
}

}  // namespace rcp
