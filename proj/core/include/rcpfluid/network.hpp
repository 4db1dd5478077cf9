#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace rcp {

// A link of the network. Rates are in flow units per unit time, delays
// in time units. `rtt_estimate` is the router-side RTT estimate d used
// in the rate-update gains; when absent it is derived as the mean RTT
// of the routes through the link.
struct Link {
    std::string id;
    double capacity = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    std::optional<double> rtt_estimate;
};

// A route (user) with its ordered hop list. forward_delays[i] is the
// propagation delay from the origin to hop i, return_delays[i] the
// delay of the feedback from hop i back to the origin; for every hop
// forward + return must equal the round trip time. return_delays may
// be left empty, in which case they are derived as rtt - forward.
struct Route {
    std::string id;
    std::vector<std::string> links;
    std::vector<double> forward_delays;
    std::vector<double> return_delays;
    double rtt = 0.0;
};

struct NetworkConfig {
    std::vector<Link> links;
    std::vector<Route> routes;
    // Absolute tolerance for the per-hop forward + return == rtt check.
    double rtt_tolerance = 1e-9;
};

struct ValidationIssue {
    std::string where;    // "link A", "route r2/B", ...
    std::string message;
};

struct ValidationReport {
    std::vector<ValidationIssue> issues;
    bool ok() const { return issues.empty(); }
    std::string to_string() const;
};

// Structural validation. Violations are data, not failures; an empty
// report means the config can be turned into a Network.
ValidationReport validate(const NetworkConfig& config);

class ValidationError : public std::runtime_error {
  public:
    explicit ValidationError(ValidationReport report);
    const ValidationReport& report() const { return report_; }

  private:
    ValidationReport report_;
};

// Validated, immutable topology. Indices are positions in links()/routes();
// all per-hop data is resolved (return delays derived where omitted, d
// filled from the mean RTT when not overridden). Safe to share across
// threads once built.
class Network {
  public:
    // Empty; usable only as a placeholder before assignment.
    Network() = default;

    // Throws ValidationError when validate(config) reports issues.
    static Network build(NetworkConfig config);

    const std::vector<Link>& links() const { return links_; }
    const std::vector<Route>& routes() const { return routes_; }
    std::size_t link_count() const { return links_.size(); }
    std::size_t route_count() const { return routes_.size(); }

    // Throws std::out_of_range for unknown ids.
    std::size_t link_index(const std::string& id) const;
    std::size_t route_index(const std::string& id) const;

    // Routes through a link, as route indices.
    std::span<const std::size_t> routes_through(std::size_t link) const;
    // Link indices along a route, in hop order.
    std::span<const std::size_t> links_on(std::size_t route) const;

    double forward_delay(std::size_t route, std::size_t hop) const;
    double return_delay(std::size_t route, std::size_t hop) const;
    double rtt(std::size_t route) const { return routes_[route].rtt; }

    // Resolved router RTT estimate d for the link.
    double rtt_estimate(std::size_t link) const { return d_[link]; }

    // Mean RTT of the routes through `link` (1/N_l sum of tau_r).
    double mean_rtt(std::size_t link) const;
    // Rate-weighted mean RTT: sum(x_r tau_r) / sum(x_r) over routes
    // through the link. Throws std::invalid_argument when the aggregate
    // rate is zero.
    double per_packet_rtt(std::size_t link, std::span<const double> route_rates) const;

    // True when every route has zero RTT (propagation delays disabled).
    bool delay_free() const { return delay_free_; }
    // Smallest strictly positive per-hop delay, or 0 when none exist.
    double min_positive_delay() const { return min_positive_delay_; }
    double max_rtt() const { return max_rtt_; }
    double max_capacity() const { return max_capacity_; }

  private:
    std::vector<Link> links_;
    std::vector<Route> routes_;
    std::unordered_map<std::string, std::size_t> link_by_id_;
    std::unordered_map<std::string, std::size_t> route_by_id_;
    std::vector<std::vector<std::size_t>> routes_through_;
    std::vector<std::vector<std::size_t>> links_on_;
    std::vector<double> d_;
    bool delay_free_ = false;
    double min_positive_delay_ = 0.0;
    double max_rtt_ = 0.0;
    double max_capacity_ = 0.0;
};

}  // namespace rcp
