#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace rcp {

class HistoryUnderrun : public std::logic_error {
  public:
    using std::logic_error::logic_error;
};

// Uniform-grid record of one link's rate, kept for delayed lookups.
// Times at or before the start map to the constant pre-history value, so
// every lag is resolvable. Inside the recorded span, eval() interpolates
// with the cubic Hermite through the bracketing grid points, which keeps
// delayed terms accurate to the integrator's order. Slopes arrive one
// step late (the derivative at a grid point is known when the next step
// begins), hence the separate set_head_slope().
class DelayHistory {
  public:
    DelayHistory(double start_time, double step, double initial_value);

    // Appends the sample one grid step after the current head, with a
    // placeholder slope.
    void append(double value);
    void set_head_slope(double slope);

    // Value at time t. t <= start returns the pre-history constant;
    // t beyond the head (modulo step-relative slack) is a bug guard.
    double eval(double t) const;

    double start_time() const { return start_time_; }
    double head_time() const;
    double head_value() const { return values_.back(); }
    std::size_t size() const { return values_.size(); }

  private:
    double start_time_;
    double step_;
    std::vector<double> values_;
    std::vector<double> slopes_;
};

}  // namespace rcp
