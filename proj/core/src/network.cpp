#include "rcpfluid/network.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace rcp {

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

}  // namespace

std::string ValidationReport::to_string() const {
    if (issues.empty()) return "valid";
    std::ostringstream os;
    for (const auto& issue : issues)
        os << issue.where << ": " << issue.message << "\n";
    return os.str();
}

ValidationError::ValidationError(ValidationReport report)
    : std::runtime_error("invalid network:\n" + report.to_string()),
      report_(std::move(report)) {}

ValidationReport validate(const NetworkConfig& config) {
    ValidationReport report;
    auto add = [&](std::string where, std::string message) {
        report.issues.push_back({std::move(where), std::move(message)});
    };

    std::unordered_map<std::string, std::size_t> link_ids;
    for (const auto& link : config.links) {
        const std::string where = "link " + link.id;
        if (link.id.empty()) add(where, "empty link id");
        if (!link_ids.emplace(link.id, link_ids.size()).second)
            add(where, "duplicate link id");
        if (!(link.capacity > 0.0)) add(where, "capacity must be > 0");
        if (!(link.alpha > 0.0)) add(where, "alpha must be > 0");
        if (!(link.beta >= 0.0)) add(where, "beta must be >= 0");
        if (link.rtt_estimate && !(*link.rtt_estimate > 0.0))
            add(where, "d must be > 0");
    }

    const bool all_zero_rtt = std::all_of(
        config.routes.begin(), config.routes.end(),
        [](const Route& r) { return r.rtt == 0.0; });

    std::set<std::string> seen_routes;
    std::set<std::string> used_links;
    for (const auto& route : config.routes) {
        const std::string where = "route " + route.id;
        if (route.id.empty()) add(where, "empty route id");
        if (!seen_routes.insert(route.id).second)
            add(where, "duplicate route id");
        if (route.links.empty()) {
            add(where, "route has no links");
            continue;
        }
        if (route.forward_delays.size() != route.links.size())
            add(where, "forward_delays must list one delay per hop");
        if (!route.return_delays.empty() &&
            route.return_delays.size() != route.links.size())
            add(where, "return_delays must list one delay per hop");
        if (route.rtt < 0.0) add(where, "rtt must be >= 0");
        if (route.rtt == 0.0 && !all_zero_rtt)
            add(where, "rtt 0 is only allowed when every route is delay-free");

        std::set<std::string> hops;
        for (std::size_t i = 0; i < route.links.size(); ++i) {
            const std::string& lid = route.links[i];
            const std::string hop_where = "route " + route.id + "/" + lid;
            if (!link_ids.count(lid)) {
                add(hop_where, "unknown link");
            } else {
                used_links.insert(lid);
            }
            if (!hops.insert(lid).second)
                add(hop_where, "link appears twice on the route");
            if (i < route.forward_delays.size()) {
                const double fwd = route.forward_delays[i];
                if (fwd < 0.0) add(hop_where, "forward delay must be >= 0");
                if (route.return_delays.empty()) {
                    if (route.rtt - fwd < 0.0)
                        add(hop_where,
                            "derived return delay is negative (forward " +
                                fmt(fwd) + " exceeds rtt " + fmt(route.rtt) + ")");
                } else if (i < route.return_delays.size()) {
                    const double ret = route.return_delays[i];
                    if (ret < 0.0) add(hop_where, "return delay must be >= 0");
                    const double sum = fwd + ret;
                    if (std::abs(sum - route.rtt) > config.rtt_tolerance)
                        add(hop_where, "RTT mismatch on (" + route.id + "," + lid +
                                           "): " + fmt(sum) + " != " + fmt(route.rtt));
                }
            }
        }
    }

    for (const auto& link : config.links) {
        if (!used_links.count(link.id) && !link.id.empty() &&
            link_ids.count(link.id))
            add("link " + link.id, "link carries no routes");
    }

    // A delay-free scenario cannot derive d from RTTs, so it must be given.
    if (all_zero_rtt && !config.routes.empty()) {
        for (const auto& link : config.links)
            if (!link.rtt_estimate)
                add("link " + link.id,
                    "d must be set explicitly when all routes are delay-free");
    }
    if (config.routes.empty()) add("network", "no routes");

    return report;
}

Network Network::build(NetworkConfig config) {
    ValidationReport report = validate(config);
    if (!report.ok()) throw ValidationError(std::move(report));

    Network net;
    net.links_ = std::move(config.links);
    net.routes_ = std::move(config.routes);

    for (std::size_t i = 0; i < net.links_.size(); ++i)
        net.link_by_id_[net.links_[i].id] = i;
    for (std::size_t i = 0; i < net.routes_.size(); ++i)
        net.route_by_id_[net.routes_[i].id] = i;

    net.routes_through_.resize(net.links_.size());
    net.links_on_.resize(net.routes_.size());
    net.min_positive_delay_ = 0.0;
    for (std::size_t r = 0; r < net.routes_.size(); ++r) {
        Route& route = net.routes_[r];
        if (route.return_delays.empty()) {
            route.return_delays.resize(route.links.size());
            for (std::size_t i = 0; i < route.links.size(); ++i)
                route.return_delays[i] = route.rtt - route.forward_delays[i];
        }
        for (std::size_t i = 0; i < route.links.size(); ++i) {
            const std::size_t l = net.link_by_id_.at(route.links[i]);
            net.links_on_[r].push_back(l);
            net.routes_through_[l].push_back(r);
            for (double delay : {route.forward_delays[i], route.return_delays[i]})
                if (delay > 0.0 &&
                    (net.min_positive_delay_ == 0.0 || delay < net.min_positive_delay_))
                    net.min_positive_delay_ = delay;
        }
        net.max_rtt_ = std::max(net.max_rtt_, route.rtt);
    }
    net.delay_free_ = net.max_rtt_ == 0.0;

    net.d_.resize(net.links_.size());
    for (std::size_t l = 0; l < net.links_.size(); ++l) {
        net.d_[l] = net.links_[l].rtt_estimate
                        ? *net.links_[l].rtt_estimate
                        : net.mean_rtt(l);
        net.max_capacity_ = std::max(net.max_capacity_, net.links_[l].capacity);
    }
    return net;
}

std::size_t Network::link_index(const std::string& id) const {
    auto it = link_by_id_.find(id);
    if (it == link_by_id_.end())
        throw std::out_of_range("unknown link id: " + id);
    return it->second;
}

std::size_t Network::route_index(const std::string& id) const {
    auto it = route_by_id_.find(id);
    if (it == route_by_id_.end())
        throw std::out_of_range("unknown route id: " + id);
    return it->second;
}

std::span<const std::size_t> Network::routes_through(std::size_t link) const {
    return routes_through_.at(link);
}

std::span<const std::size_t> Network::links_on(std::size_t route) const {
    return links_on_.at(route);
}

double Network::forward_delay(std::size_t route, std::size_t hop) const {
    return routes_.at(route).forward_delays.at(hop);
}

double Network::return_delay(std::size_t route, std::size_t hop) const {
    return routes_.at(route).return_delays.at(hop);
}

double Network::mean_rtt(std::size_t link) const {
    const auto& through = routes_through_.at(link);
    if (through.empty())
        throw std::invalid_argument("link carries no routes");
    double sum = 0.0;
    for (std::size_t r : through) sum += routes_[r].rtt;
    return sum / static_cast<double>(through.size());
}

double Network::per_packet_rtt(std::size_t link,
                               std::span<const double> route_rates) const {
    const auto& through = routes_through_.at(link);
    double weighted = 0.0;
    double aggregate = 0.0;
    for (std::size_t r : through) {
        weighted += route_rates[r] * routes_[r].rtt;
        aggregate += route_rates[r];
    }
    if (!(aggregate > 0.0))
        throw std::invalid_argument("per_packet_rtt: zero aggregate flow through " +
                                    links_[link].id);
    return weighted / aggregate;
}

}  // namespace rcp
