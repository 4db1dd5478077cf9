#include "rcpfluid/queue_model.hpp"

#include <cmath>
#include <limits>

namespace rcp {

std::string to_string(QueueFamily family) {
    switch (family) {
        case QueueFamily::zero: return "zero";
        case QueueFamily::linear: return "linear";
        case QueueFamily::power: return "power";
        case QueueFamily::mm1_scaled: return "mm1_scaled";
    }
    return "?";
}

QueueFamily queue_family_from_string(const std::string& name) {
    if (name == "zero") return QueueFamily::zero;
    if (name == "linear") return QueueFamily::linear;
    if (name == "power") return QueueFamily::power;
    if (name == "mm1_scaled") return QueueFamily::mm1_scaled;
    throw std::invalid_argument("unknown queue family: " + name);
}

QueueFunction::QueueFunction(QueueFamily family, double scale, double exponent,
                             double capacity)
    : family_(family), scale_(scale), exponent_(exponent), capacity_(capacity) {}

QueueFunction QueueFunction::zero() {
    return {QueueFamily::zero, 0.0, 0.0, 0.0};
}

QueueFunction QueueFunction::linear(double slope) {
    if (!(slope > 0.0)) throw std::invalid_argument("linear queue: slope must be > 0");
    return {QueueFamily::linear, slope, 1.0, 0.0};
}

QueueFunction QueueFunction::power(double scale, double exponent) {
    if (!(scale > 0.0)) throw std::invalid_argument("power queue: scale must be > 0");
    if (!(exponent >= 1.0))
        throw std::invalid_argument("power queue: exponent must be >= 1");
    return {QueueFamily::power, scale, exponent, 0.0};
}

QueueFunction QueueFunction::mm1_scaled(double scale, double capacity) {
    if (!(scale > 0.0)) throw std::invalid_argument("mm1 queue: scale must be > 0");
    if (!(capacity > 0.0))
        throw std::invalid_argument("mm1 queue: capacity must be > 0");
    return {QueueFamily::mm1_scaled, scale, 1.0, capacity};
}

double QueueFunction::domain_limit() const {
    return family_ == QueueFamily::mm1_scaled
               ? capacity_
               : std::numeric_limits<double>::infinity();
}

void QueueFunction::check_domain(double y) const {
    if (y < 0.0)
        throw QueueDomainError("queue function evaluated at negative rate");
    if (family_ == QueueFamily::mm1_scaled && y >= capacity_)
        throw QueueDomainError("mm1 queue evaluated at or beyond its pole");
}

double QueueFunction::eval(double y) const {
    check_domain(y);
    switch (family_) {
        case QueueFamily::zero: return 0.0;
        case QueueFamily::linear: return scale_ * y;
        case QueueFamily::power: return scale_ * std::pow(y, exponent_);
        case QueueFamily::mm1_scaled: return scale_ * y / (capacity_ - y);
    }
    return 0.0;
}

double QueueFunction::derivative(double y) const {
    check_domain(y);
    switch (family_) {
        case QueueFamily::zero: return 0.0;
        case QueueFamily::linear: return scale_;
        case QueueFamily::power:
            return scale_ * exponent_ * std::pow(y, exponent_ - 1.0);
        case QueueFamily::mm1_scaled: {
            const double gap = capacity_ - y;
            return scale_ * capacity_ / (gap * gap);
        }
    }
    return 0.0;
}

double QueueFunction::elasticity(double y) const {
    const double p = eval(y);
    if (!(p > 0.0))
        throw QueueDomainError("elasticity undefined where the queue length is 0");
    return y * derivative(y) / p;
}

QueueSet QueueSet::all_zero(std::size_t link_count) {
    return QueueSet(std::vector<QueueFunction>(link_count, QueueFunction::zero()));
}

}  // namespace rcp
