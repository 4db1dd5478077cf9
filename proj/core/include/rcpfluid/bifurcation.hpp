#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "rcpfluid/dde_sim.hpp"
#include "rcpfluid/network.hpp"
#include "rcpfluid/queue_model.hpp"

namespace rcp {

class CycleMeasureError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Post-transient oscillation metrics of a single-link trace.
struct CycleMeasurement {
    double eta = 0.0;
    double amplitude = 0.0;  // half peak-to-peak of R over the window
    double period = 0.0;     // mean interval between upward mean-crossings
    bool converged = false;  // amplitude under 1e-6 of the reference rate
    bool trace_completed = true;
    std::size_t crossings = 0;
    double window_duration = 0.0;
};

// Discards the first `transient_fraction` of the trace's time span and
// measures the remainder. `reference_rate` sets the convergence floor
// (the equilibrium link rate). Throws CycleMeasureError when the window
// shows oscillation but fewer than 5 upward mean-crossings.
CycleMeasurement measure_cycle(const SimTrace& trace, double transient_fraction,
                               double reference_rate);

// Settings for the single-link runs driven by the estimators below.
// Times scale with the round trip time tau of the scenario.
struct HopfRunOptions {
    double step_per_tau = 1.0 / 40.0;
    double horizon_per_tau = 2000.0;
    double perturbation = 0.01;  // initial rates at Rbar * (1 + perturbation)
    double transient_fraction = 0.5;
    std::size_t record_stride = 4;
};

// Runs the single-link scenario at one gain and measures the tail.
CycleMeasurement run_and_measure(const Network& net, const QueueSet& queues,
                                 double eta, const HopfRunOptions& opts);

// Bisection on the gain with "the tail settled" as predicate. The bracket
// must straddle the transition: eta_lo settled, eta_hi oscillating.
// Resolves the boundary to `rel_resolution` relative width.
double estimate_eta_c(const Network& net, const QueueSet& queues, double eta_lo,
                      double eta_hi, const HopfRunOptions& opts = {},
                      double rel_resolution = 1e-3);

struct ScalingFit {
    bool valid = false;
    double eta_c_estimate = 0.0;
    double slope = 0.0;      // of amplitude^2 versus eta - eta_c
    double r_squared = 0.0;
    double amplitude_prefactor = 0.0;  // sqrt(slope)
    std::size_t points_used = 0;
};

struct SweepResult {
    std::vector<CycleMeasurement> measurements;  // ascending eta
    ScalingFit fit;
    bool fit_declined = false;        // fewer than two oscillating points
    bool subcritical_converged = false;
    bool supercritical_bounded = false;
    bool amplitude_monotone = false;  // within 2% measurement noise
};

// Runs the gain grid concurrently (results merged in eta order), fits
// amplitude^2 = slope * (eta - eta_c) through the oscillating points by
// least squares, then refits on the weakly nonlinear band
// 0 < eta - eta_c <= 0.05 eta_c. Points within 2% of the estimated
// threshold are excluded from the subcritical-convergence check: a finite
// horizon cannot classify them.
SweepResult sweep_and_fit(const Network& net, const QueueSet& queues,
                          std::vector<double> etas,
                          const HopfRunOptions& opts = {});

}  // namespace rcp
