#include "rcpfluid/trace_io.hpp"

#include <cmath>
#include <cstdio>
#include <iomanip>
#include <sstream>

namespace rcp {

using nlohmann::ordered_json;

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

ordered_json json_number(double v) {
    // JSON has no NaN/inf literals; emit null for non-finite values.
    if (!std::isfinite(v)) return nullptr;
    return v;
}

}  // namespace

void write_trace_csv(std::ostream& out, const Network& net, const SimTrace& trace) {
    out << "time";
    for (const Link& l : net.links()) out << ",R." << l.id;
    for (const Route& r : net.routes()) out << ",x." << r.id;
    for (const Link& l : net.links()) out << ",y." << l.id;
    for (const Link& l : net.links()) out << ",q." << l.id;
    out << "\n";
    for (std::size_t i = 0; i < trace.times.size(); ++i) {
        out << format_double(trace.times[i]);
        for (std::size_t l = 0; l < net.link_count(); ++l)
            out << ',' << format_double(trace.link_rate[l][i]);
        for (std::size_t r = 0; r < net.route_count(); ++r)
            out << ',' << format_double(trace.route_rate[r][i]);
        for (std::size_t l = 0; l < net.link_count(); ++l)
            out << ',' << format_double(trace.aggregate_rate[l][i]);
        for (std::size_t l = 0; l < net.link_count(); ++l)
            out << ',' << format_double(trace.queue_length[l][i]);
        out << "\n";
    }
}

ordered_json trace_json(const Network& net, const SimTrace& trace) {
    ordered_json doc;
    doc["time"] = trace.times;
    ordered_json R = ordered_json::object(), x = ordered_json::object(),
                 y = ordered_json::object(), q = ordered_json::object();
    for (std::size_t l = 0; l < net.link_count(); ++l) {
        R[net.links()[l].id] = trace.link_rate[l];
        y[net.links()[l].id] = trace.aggregate_rate[l];
        q[net.links()[l].id] = trace.queue_length[l];
    }
    for (std::size_t r = 0; r < net.route_count(); ++r)
        x[net.routes()[r].id] = trace.route_rate[r];
    doc["R"] = std::move(R);
    doc["x"] = std::move(x);
    doc["y"] = std::move(y);
    doc["q"] = std::move(q);
    doc["status"] = to_string(trace.status);
    return doc;
}

ordered_json summary_json(const Network& net, const SimTrace& trace,
                          const SimSummary& summary) {
    ordered_json doc;
    doc["status"] = to_string(trace.status);
    if (!trace.abort_reason.empty()) doc["abort_reason"] = trace.abort_reason;
    doc["converged"] = summary.converged;
    doc["diverged"] = summary.diverged;
    doc["no_equilibrium_suspect"] = summary.any_no_equilibrium_suspect;

    ordered_json final_rates = ordered_json::object();
    for (std::size_t l = 0; l < net.link_count(); ++l)
        final_rates[net.links()[l].id] = json_number(summary.final_link_rate[l]);
    doc["final"]["R"] = std::move(final_rates);
    ordered_json final_routes = ordered_json::object();
    for (std::size_t r = 0; r < net.route_count(); ++r)
        final_routes[net.routes()[r].id] = json_number(summary.final_route_rate[r]);
    doc["final"]["x"] = std::move(final_routes);

    ordered_json links = ordered_json::object();
    for (std::size_t l = 0; l < net.link_count(); ++l) {
        const LinkWindowStats& s = summary.links[l];
        links[net.links()[l].id] = ordered_json{
            {"amplitude", json_number(s.amplitude)},
            {"mean", json_number(s.mean)},
            {"drift", json_number(s.drift)},
            {"monotone_increasing", s.monotone_increasing},
            {"never_route_min", s.never_route_min},
            {"no_equilibrium_suspect", s.no_equilibrium_suspect},
        };
    }
    doc["oscillation"] = std::move(links);
    if (!trace.warnings.empty()) doc["warnings"] = trace.warnings;
    return doc;
}

ordered_json equilibrium_json(const Network& net, const Equilibrium& eq,
                              const BottleneckCheck& check) {
    ordered_json doc;
    ordered_json x = ordered_json::object();
    for (std::size_t r = 0; r < net.route_count(); ++r)
        x[net.routes()[r].id] = eq.route_rate[r];
    doc["x"] = std::move(x);
    ordered_json R = ordered_json::object(), y = ordered_json::object();
    for (std::size_t l = 0; l < net.link_count(); ++l) {
        R[net.links()[l].id] = eq.link_rate[l];
        y[net.links()[l].id] = eq.effective_capacity[l];
    }
    doc["R"] = std::move(R);
    doc["y"] = std::move(y);
    ordered_json bottleneck = ordered_json::object();
    for (std::size_t r = 0; r < net.route_count(); ++r) {
        ordered_json entry{{"link", net.links()[eq.bottleneck[r]].id},
                           {"tie", bool(eq.bottleneck_tie[r])}};
        bottleneck[net.routes()[r].id] = std::move(entry);
    }
    doc["bottleneck"] = std::move(bottleneck);
    doc["levels"] = eq.levels;
    doc["assumption"]["single_bottleneck_ok"] = check.ok;
    ordered_json violating = ordered_json::array();
    for (std::size_t r : check.violating_routes)
        violating.push_back(net.routes()[r].id);
    doc["assumption"]["violating_routes"] = std::move(violating);
    return doc;
}

namespace {

const char* alpha_rule_name(AlphaRule rule) {
    switch (rule) {
        case AlphaRule::standard: return "standard";
        case AlphaRule::beta_zero: return "beta_zero";
        case AlphaRule::undefined: return "undefined";
    }
    return "?";
}

}  // namespace

ordered_json stability_json(const Network& net, const StabilityReport& report) {
    ordered_json doc;
    ordered_json links = ordered_json::object();
    for (std::size_t l = 0; l < net.link_count(); ++l) {
        const LinkStability& s = report.links[l];
        links[net.links()[l].id] = ordered_json{
            {"stability_lhs", json_number(s.stability_lhs)},
            {"stability_ok", s.stability_ok},
            {"decentralized_lhs", json_number(s.decentralized_lhs)},
            {"decentralized_ok", s.decentralized_ok},
            {"recommended_alpha", json_number(s.recommended_alpha)},
            {"alpha_rule", alpha_rule_name(s.alpha_rule)},
        };
    }
    doc["links"] = std::move(links);
    doc["all_ok"] = report.all_ok;
    doc["assumption_ok"] = report.assumption_ok;
    return doc;
}

std::string stability_table(const Network& net, const StabilityReport& report) {
    std::ostringstream os;
    os << std::left << std::setw(12) << "link" << std::setw(16) << "stability_lhs"
       << std::setw(6) << "ok" << std::setw(20) << "decentralized_lhs"
       << std::setw(6) << "ok" << std::setw(18) << "recommended_alpha"
       << "rule\n";
    os << std::setprecision(6) << std::fixed;
    for (std::size_t l = 0; l < net.link_count(); ++l) {
        const LinkStability& s = report.links[l];
        os << std::setw(12) << net.links()[l].id << std::setw(16) << s.stability_lhs
           << std::setw(6) << (s.stability_ok ? "yes" : "NO") << std::setw(20)
           << s.decentralized_lhs << std::setw(6)
           << (s.decentralized_ok ? "yes" : "NO") << std::setw(18)
           << s.recommended_alpha << alpha_rule_name(s.alpha_rule) << "\n";
    }
    os << "single bottleneck per route: " << (report.assumption_ok ? "yes" : "NO");
    if (!report.assumption_ok)
        os << "  (assumption violated; conditions reported but not conclusive)";
    os << "\nall links pass: " << (report.all_ok ? "yes" : "NO") << "\n";
    return os.str();
}

void write_sweep_csv(std::ostream& out, const SweepResult& result) {
    out << "eta,amplitude,period,converged\n";
    for (const auto& m : result.measurements)
        out << format_double(m.eta) << ',' << format_double(m.amplitude) << ','
            << format_double(m.period) << ',' << (m.converged ? 1 : 0) << "\n";
}

ordered_json sweep_json(const SweepResult& result) {
    ordered_json doc;
    doc["fit"] = ordered_json{
        {"valid", result.fit.valid},
        {"eta_c_estimate", json_number(result.fit.eta_c_estimate)},
        {"slope", json_number(result.fit.slope)},
        {"r_squared", json_number(result.fit.r_squared)},
        {"amplitude_prefactor", json_number(result.fit.amplitude_prefactor)},
        {"points_used", result.fit.points_used},
    };
    doc["fit_declined"] = result.fit_declined;
    doc["subcritical_converged"] = result.subcritical_converged;
    doc["supercritical_bounded"] = result.supercritical_bounded;
    doc["amplitude_monotone"] = result.amplitude_monotone;
    ordered_json points = ordered_json::array();
    for (const auto& m : result.measurements)
        points.push_back(ordered_json{{"eta", m.eta},
                                      {"amplitude", json_number(m.amplitude)},
                                      {"period", json_number(m.period)},
                                      {"converged", m.converged}});
    doc["measurements"] = std::move(points);
    return doc;
}

}  // namespace rcp
