#include "rcpfluid/history.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rcp {

DelayHistory::DelayHistory(double start_time, double step, double initial_value) {
    if (!(step > 0.0)) throw std::invalid_argument("history: step must be > 0");
    start_time_ = start_time;
    step_ = step;
    values_.assign(1, initial_value);
    slopes_.assign(1, 0.0);
}

void DelayHistory::append(double value) {
    values_.push_back(value);
    slopes_.push_back(0.0);
}

void DelayHistory::set_head_slope(double slope) {
    slopes_.back() = slope;
}

double DelayHistory::head_time() const {
    return start_time_ + double(values_.size() - 1) * step_;
}

double DelayHistory::eval(double t) const {
    const double pos = (t - start_time_) / step_;
    if (pos <= 0.0) return values_.front();

    const double last = double(values_.size() - 1);
    const double slack = 16.0 * (std::abs(pos) + 1.0) *
                         std::numeric_limits<double>::epsilon();
    if (pos > last + slack)
        throw HistoryUnderrun("history lookup beyond the stored head");
    if (pos >= last) return values_.back();

    const auto idx = static_cast<std::size_t>(pos);
    const double theta = pos - double(idx);
    const double v0 = values_[idx], v1 = values_[idx + 1];
    const double s0 = slopes_[idx], s1 = slopes_[idx + 1];
    const double t2 = theta * theta, t3 = t2 * theta;
    return (2.0 * t3 - 3.0 * t2 + 1.0) * v0 + (t3 - 2.0 * t2 + theta) * step_ * s0 +
           (-2.0 * t3 + 3.0 * t2) * v1 + (t3 - t2) * step_ * s1;
}

}  // namespace rcp
