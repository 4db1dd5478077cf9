#include "rcpfluid/bifurcation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <thread>

#include "rcpfluid/equilibrium.hpp"

namespace rcp {

namespace {

constexpr double kConvergedFloor = 1e-6;  // of the reference rate
// Within this relative distance of the threshold a finite-horizon run
// cannot tell a slowly decaying transient from a tiny limit cycle, so the
// converged/oscillating classification is not held against the fit.
constexpr double kThresholdBand = 0.02;
constexpr double kMonotoneNoise = 0.02;

double single_link_tau(const Network& net) {
    if (net.link_count() != 1)
        throw std::invalid_argument("hopf driver: scenario must have a single link");
    return net.rtt(0);
}

}  // namespace

CycleMeasurement measure_cycle(const SimTrace& trace, double transient_fraction,
                               double reference_rate) {
    if (trace.link_rate.size() != 1)
        throw std::invalid_argument("measure_cycle: expected a single-link trace");
    if (!(transient_fraction > 0.0) || !(transient_fraction < 1.0))
        throw std::invalid_argument("measure_cycle: transient_fraction must be in (0,1)");
    if (!(reference_rate > 0.0))
        throw std::invalid_argument("measure_cycle: reference rate must be > 0");
    const auto& series = trace.link_rate[0];
    const auto& times = trace.times;
    if (times.size() < 4)
        throw std::invalid_argument("measure_cycle: trace too short");

    const double cut = times.front() + transient_fraction * (times.back() - times.front());
    std::size_t begin = 0;
    while (begin + 2 < times.size() && times[begin] < cut) ++begin;

    CycleMeasurement m;
    m.trace_completed = trace.status == SimStatus::completed;
    m.window_duration = times.back() - times[begin];

    double lo = std::numeric_limits<double>::infinity(), hi = -lo, sum = 0.0;
    for (std::size_t i = begin; i < series.size(); ++i) {
        lo = std::min(lo, series[i]);
        hi = std::max(hi, series[i]);
        sum += series[i];
    }
    m.amplitude = 0.5 * (hi - lo);
    m.converged = m.amplitude < kConvergedFloor * reference_rate;

    const double mean = sum / double(series.size() - begin);
    double first_cross = 0.0, last_cross = 0.0;
    std::size_t crossings = 0;
    for (std::size_t i = begin + 1; i < series.size(); ++i) {
        if (series[i - 1] < mean && series[i] >= mean) {
            const double frac = (mean - series[i - 1]) / (series[i] - series[i - 1]);
            const double tc = times[i - 1] + frac * (times[i] - times[i - 1]);
            if (crossings == 0) first_cross = tc;
            last_cross = tc;
            ++crossings;
        }
    }
    m.crossings = crossings;
    if (!m.converged) {
        if (crossings < 5)
            throw CycleMeasureError(
                "measure_cycle: oscillating window with fewer than 5 mean-crossings");
        m.period = (last_cross - first_cross) / double(crossings - 1);
    }
    return m;
}

CycleMeasurement run_and_measure(const Network& net, const QueueSet& queues,
                                 double eta, const HopfRunOptions& opts) {
    const double tau = single_link_tau(net);
    const Equilibrium eq = solve_equilibrium(net, queues);
    const double rbar = eq.link_rate[0];

    SimConfig config;
    config.step = tau * opts.step_per_tau;
    config.horizon = tau * opts.horizon_per_tau;
    config.eta = eta;
    config.initial_rates = {rbar * (1.0 + opts.perturbation)};
    config.record_stride = opts.record_stride;
    config.mode = SimMode::single_link_beta0;

    CycleMeasurement m =
        measure_cycle(run_simulation(net, queues, config), opts.transient_fraction, rbar);
    m.eta = eta;
    return m;
}

double estimate_eta_c(const Network& net, const QueueSet& queues, double eta_lo,
                      double eta_hi, const HopfRunOptions& opts,
                      double rel_resolution) {
    if (!(eta_lo > 0.0) || !(eta_hi > eta_lo))
        throw std::invalid_argument("estimate_eta_c: need 0 < eta_lo < eta_hi");
    if (!run_and_measure(net, queues, eta_lo, opts).converged)
        throw std::invalid_argument(
            "estimate_eta_c: lower bracket endpoint already oscillates");
    if (run_and_measure(net, queues, eta_hi, opts).converged)
        throw std::invalid_argument(
            "estimate_eta_c: upper bracket endpoint does not oscillate");

    while (eta_hi - eta_lo > rel_resolution * 0.5 * (eta_hi + eta_lo)) {
        const double mid = 0.5 * (eta_lo + eta_hi);
        (run_and_measure(net, queues, mid, opts).converged ? eta_lo : eta_hi) = mid;
    }
    return 0.5 * (eta_lo + eta_hi);
}

namespace {

ScalingFit fit_amplitude_law(const std::vector<CycleMeasurement>& points) {
    // Least squares of amplitude^2 = a + b eta; the threshold estimate is
    // the root -a/b and the reported slope is b.
    ScalingFit fit;
    if (points.size() < 2) return fit;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const auto n = double(points.size());
    for (const auto& p : points) {
        const double y = p.amplitude * p.amplitude;
        sx += p.eta;
        sy += y;
        sxx += p.eta * p.eta;
        sxy += p.eta * y;
    }
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) return fit;
    const double b = (n * sxy - sx * sy) / denom;
    const double a = (sy - b * sx) / n;
    if (!(b > 0.0)) return fit;

    double ss_res = 0, ss_tot = 0;
    const double mean_y = sy / n;
    for (const auto& p : points) {
        const double y = p.amplitude * p.amplitude;
        const double fitted = a + b * p.eta;
        ss_res += (y - fitted) * (y - fitted);
        ss_tot += (y - mean_y) * (y - mean_y);
    }
    fit.valid = true;
    fit.eta_c_estimate = -a / b;
    fit.slope = b;
    fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    fit.amplitude_prefactor = std::sqrt(b);
    fit.points_used = points.size();
    return fit;
}

}  // namespace

SweepResult sweep_and_fit(const Network& net, const QueueSet& queues,
                          std::vector<double> etas, const HopfRunOptions& opts) {
    if (etas.empty())
        throw std::invalid_argument("sweep_and_fit: empty gain grid");
    std::sort(etas.begin(), etas.end());

    SweepResult result;
    result.measurements.resize(etas.size());

    // One simulator per grid point; merge order is fixed by the index.
    std::exception_ptr failure;
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    const std::size_t workers =
        std::min<std::size_t>(std::max(1u, std::thread::hardware_concurrency()),
                              etas.size());
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::mutex failure_mutex;
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= etas.size() || failed.load()) return;
                try {
                    result.measurements[i] =
                        run_and_measure(net, queues, etas[i], opts);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                    failed.store(true);
                    return;
                }
            }
        });
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);

    std::vector<CycleMeasurement> oscillating;
    for (const auto& m : result.measurements)
        if (!m.converged && std::isfinite(m.amplitude)) oscillating.push_back(m);

    result.fit_declined = oscillating.size() < 2;
    if (!result.fit_declined) {
        result.fit = fit_amplitude_law(oscillating);
        if (result.fit.valid) {
            const double eta_c = result.fit.eta_c_estimate;
            std::vector<CycleMeasurement> band;
            for (const auto& m : oscillating)
                if (m.eta > eta_c && m.eta - eta_c <= 0.05 * eta_c) band.push_back(m);
            if (band.size() >= 2 && band.size() != oscillating.size()) {
                const ScalingFit refit = fit_amplitude_law(band);
                if (refit.valid) result.fit = refit;
            }
        }
    }

    const double eta_c = result.fit.valid
                             ? result.fit.eta_c_estimate
                             : std::numeric_limits<double>::quiet_NaN();
    result.subcritical_converged = true;
    result.supercritical_bounded = true;
    if (result.fit.valid) {
        for (const auto& m : result.measurements) {
            if (m.eta < eta_c * (1.0 - kThresholdBand) && !m.converged)
                result.subcritical_converged = false;
            if (m.eta > eta_c && m.eta <= 1.05 * eta_c &&
                (m.converged || !m.trace_completed || !std::isfinite(m.amplitude)))
                result.supercritical_bounded = false;
        }
    }

    result.amplitude_monotone = true;
    for (std::size_t i = 1; i < oscillating.size(); ++i)
        if (oscillating[i].amplitude <
            oscillating[i - 1].amplitude * (1.0 - kMonotoneNoise))
            result.amplitude_monotone = false;

    return result;
}

}  // namespace rcp
