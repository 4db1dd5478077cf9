#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace rcp {

class QueueDomainError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

enum class QueueFamily { zero, linear, power, mm1_scaled };

std::string to_string(QueueFamily family);
QueueFamily queue_family_from_string(const std::string& name);

// Mean queue length as a static function of the aggregate arrival rate.
// Every family satisfies p(0) = 0 and is strictly increasing and C^1 on
// its domain, except `zero` which is identically 0 (used to switch the
// queue term off). `mm1_scaled` is k*y/(C-y) with a pole at the link
// capacity; evaluating it at y >= C is a domain error.
class QueueFunction {
  public:
    static QueueFunction zero();
    static QueueFunction linear(double slope);
    static QueueFunction power(double scale, double exponent);
    static QueueFunction mm1_scaled(double scale, double capacity);

    double eval(double y) const;        // p(y)
    double derivative(double y) const;  // p'(y)
    // gamma = y p'(y) / p(y); undefined where p(y) == 0.
    double elasticity(double y) const;

    QueueFamily family() const { return family_; }
    bool is_zero() const { return family_ == QueueFamily::zero; }
    double scale() const { return scale_; }
    double exponent() const { return exponent_; }
    // Upper end of the domain (capacity for mm1_scaled, +inf otherwise).
    double domain_limit() const;

  private:
    QueueFunction(QueueFamily family, double scale, double exponent, double capacity);
    void check_domain(double y) const;

    QueueFamily family_;
    double scale_;
    double exponent_;
    double capacity_;
};

// Per-link queue functions, indexed like Network::links().
class QueueSet {
  public:
    QueueSet() = default;
    explicit QueueSet(std::vector<QueueFunction> by_link)
        : by_link_(std::move(by_link)) {}
    static QueueSet all_zero(std::size_t link_count);

    const QueueFunction& at(std::size_t link) const { return by_link_.at(link); }
    std::size_t size() const { return by_link_.size(); }

  private:
    std::vector<QueueFunction> by_link_;
};

}  // namespace rcp
