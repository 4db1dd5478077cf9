#include "rcpfluid/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "rcpfluid/equilibrium.hpp"

namespace rcp {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

[[noreturn]] void fail(const std::string& what) { throw ScenarioParseError(what); }

void expect_keys(const json& obj, const std::string& where,
                 std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (std::find_if(allowed.begin(), allowed.end(), [&](const char* k) {
                return it.key() == k;
            }) == allowed.end())
            fail(where + ": unknown key \"" + it.key() + "\"");
}

double require_number(const json& obj, const std::string& where, const char* key) {
    if (!obj.contains(key)) fail(where + ": missing \"" + std::string(key) + "\"");
    if (!obj[key].is_number()) fail(where + ": \"" + key + "\" must be a number");
    return obj[key].get<double>();
}

std::optional<double> optional_number(const json& obj, const std::string& where,
                                      const char* key) {
    if (!obj.contains(key)) return std::nullopt;
    if (!obj[key].is_number()) fail(where + ": \"" + key + "\" must be a number");
    return obj[key].get<double>();
}

std::string require_string(const json& obj, const std::string& where, const char* key) {
    if (!obj.contains(key)) fail(where + ": missing \"" + std::string(key) + "\"");
    if (!obj[key].is_string()) fail(where + ": \"" + key + "\" must be a string");
    return obj[key].get<std::string>();
}

std::vector<double> number_array(const json& arr, const std::string& where) {
    if (!arr.is_array()) fail(where + " must be an array of numbers");
    std::vector<double> out;
    for (const auto& v : arr) {
        if (!v.is_number()) fail(where + " must contain only numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

Link parse_link(const json& j) {
    if (!j.is_object()) fail("links entries must be objects");
    const std::string where = "link " + j.value("id", std::string("?"));
    expect_keys(j, where, {"id", "capacity", "alpha", "beta", "d"});
    Link link;
    link.id = require_string(j, where, "id");
    link.capacity = require_number(j, where, "capacity");
    link.alpha = require_number(j, where, "alpha");
    link.beta = j.contains("beta") ? require_number(j, where, "beta") : 0.0;
    link.rtt_estimate = optional_number(j, where, "d");
    return link;
}

Route parse_route(const json& j) {
    if (!j.is_object()) fail("routes entries must be objects");
    const std::string where = "route " + j.value("id", std::string("?"));
    expect_keys(j, where, {"id", "links", "forward_delays", "return_delays", "rtt"});
    Route route;
    route.id = require_string(j, where, "id");
    if (!j.contains("links") || !j["links"].is_array())
        fail(where + ": \"links\" must be an array of link ids");
    for (const auto& v : j["links"]) {
        if (!v.is_string()) fail(where + ": \"links\" must contain strings");
        route.links.push_back(v.get<std::string>());
    }
    if (!j.contains("forward_delays"))
        fail(where + ": missing \"forward_delays\"");
    route.forward_delays = number_array(j["forward_delays"], where + "/forward_delays");
    if (j.contains("return_delays"))
        route.return_delays = number_array(j["return_delays"], where + "/return_delays");
    route.rtt = require_number(j, where, "rtt");
    return route;
}

QueueSpec parse_queue_spec(const json& j) {
    if (!j.is_object()) fail("queue_models entries must be objects");
    const std::string where = "queue_models/" + j.value("link", std::string("?"));
    expect_keys(j, where, {"link", "family", "k", "m"});
    QueueSpec spec;
    spec.link = require_string(j, where, "link");
    spec.family = queue_family_from_string(require_string(j, where, "family"));
    spec.k = optional_number(j, where, "k");
    spec.m = optional_number(j, where, "m");
    return spec;
}

SimSpec parse_sim(const json& j) {
    const std::string where = "sim";
    expect_keys(j, where,
                {"step", "horizon", "eta", "record_stride", "mode", "initial_rate",
                 "initial_rates", "initial_mode", "initial_perturbation"});
    SimSpec sim;
    sim.step = optional_number(j, where, "step");
    sim.horizon = optional_number(j, where, "horizon");
    sim.eta = optional_number(j, where, "eta");
    if (j.contains("record_stride")) {
        if (!j["record_stride"].is_number_unsigned())
            fail("sim: \"record_stride\" must be a positive integer");
        sim.record_stride = j["record_stride"].get<std::size_t>();
    }
    if (j.contains("mode")) {
        const std::string mode = require_string(j, where, "mode");
        if (mode == "network")
            sim.mode = SimMode::network;
        else if (mode == "single_link_beta0")
            sim.mode = SimMode::single_link_beta0;
        else
            fail("sim: unknown mode \"" + mode + "\"");
    }
    sim.initial_rate = optional_number(j, where, "initial_rate");
    if (j.contains("initial_rates")) {
        if (!j["initial_rates"].is_object())
            fail("sim: \"initial_rates\" must map link ids to numbers");
        for (auto it = j["initial_rates"].begin(); it != j["initial_rates"].end(); ++it) {
            if (!it.value().is_number())
                fail("sim: \"initial_rates\" must map link ids to numbers");
            sim.initial_rates[it.key()] = it.value().get<double>();
        }
    }
    if (j.contains("initial_mode")) {
        sim.initial_mode = require_string(j, where, "initial_mode");
        if (*sim.initial_mode != "capacity" && *sim.initial_mode != "equilibrium")
            fail("sim: initial_mode must be \"capacity\" or \"equilibrium\"");
    }
    sim.initial_perturbation = optional_number(j, where, "initial_perturbation");
    return sim;
}

SweepSpec parse_sweep(const json& j) {
    const std::string where = "sweep";
    expect_keys(j, where,
                {"etas", "eta_min", "eta_max", "eta_count", "bracket", "horizon",
                 "step", "transient_fraction", "perturbation", "record_stride"});
    SweepSpec sweep;
    if (j.contains("etas")) sweep.etas = number_array(j["etas"], "sweep/etas");
    sweep.eta_min = optional_number(j, where, "eta_min");
    sweep.eta_max = optional_number(j, where, "eta_max");
    if (j.contains("eta_count")) {
        if (!j["eta_count"].is_number_integer())
            fail("sweep: \"eta_count\" must be an integer");
        sweep.eta_count = j["eta_count"].get<int>();
    }
    if (j.contains("bracket")) {
        const auto v = number_array(j["bracket"], "sweep/bracket");
        if (v.size() != 2) fail("sweep: \"bracket\" must be [lo, hi]");
        sweep.bracket = std::make_pair(v[0], v[1]);
    }
    sweep.horizon = optional_number(j, where, "horizon");
    sweep.step = optional_number(j, where, "step");
    sweep.transient_fraction = optional_number(j, where, "transient_fraction");
    sweep.perturbation = optional_number(j, where, "perturbation");
    if (j.contains("record_stride")) {
        if (!j["record_stride"].is_number_unsigned())
            fail("sweep: \"record_stride\" must be a positive integer");
        sweep.record_stride = j["record_stride"].get<std::size_t>();
    }
    return sweep;
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        fail(std::string("malformed JSON: ") + e.what());
    }
    if (!doc.is_object()) fail("scenario must be a JSON object");
    expect_keys(doc, "scenario",
                {"links", "routes", "queue_models", "sim", "sweep", "rtt_tolerance"});

    Scenario scenario;
    if (!doc.contains("links") || !doc["links"].is_array())
        fail("scenario: \"links\" must be an array");
    for (const auto& j : doc["links"]) scenario.network.links.push_back(parse_link(j));
    if (!doc.contains("routes") || !doc["routes"].is_array())
        fail("scenario: \"routes\" must be an array");
    for (const auto& j : doc["routes"])
        scenario.network.routes.push_back(parse_route(j));
    if (doc.contains("rtt_tolerance"))
        scenario.network.rtt_tolerance =
            require_number(doc, "scenario", "rtt_tolerance");
    if (doc.contains("queue_models")) {
        if (!doc["queue_models"].is_array())
            fail("scenario: \"queue_models\" must be an array");
        for (const auto& j : doc["queue_models"])
            scenario.queues.push_back(parse_queue_spec(j));
    }
    if (doc.contains("sim")) {
        if (!doc["sim"].is_object()) fail("scenario: \"sim\" must be an object");
        scenario.sim = parse_sim(doc["sim"]);
    }
    if (doc.contains("sweep")) {
        if (!doc["sweep"].is_object()) fail("scenario: \"sweep\" must be an object");
        scenario.sweep = parse_sweep(doc["sweep"]);
    }
    return scenario;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open scenario file: " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_scenario(buffer.str());
}

namespace {

QueueFunction build_queue(const QueueSpec& spec, double capacity) {
    switch (spec.family) {
        case QueueFamily::zero:
            if (spec.k || spec.m)
                fail("queue_models/" + spec.link + ": zero family takes no parameters");
            return QueueFunction::zero();
        case QueueFamily::linear:
            if (!spec.k) fail("queue_models/" + spec.link + ": linear family needs k");
            if (spec.m) fail("queue_models/" + spec.link + ": linear family takes no m");
            return QueueFunction::linear(*spec.k);
        case QueueFamily::power:
            if (!spec.k || !spec.m)
                fail("queue_models/" + spec.link + ": power family needs k and m");
            return QueueFunction::power(*spec.k, *spec.m);
        case QueueFamily::mm1_scaled:
            if (!spec.k) fail("queue_models/" + spec.link + ": mm1_scaled needs k");
            if (spec.m)
                fail("queue_models/" + spec.link + ": mm1_scaled takes no m");
            return QueueFunction::mm1_scaled(*spec.k, capacity);
    }
    fail("queue_models/" + spec.link + ": unknown family");
}

}  // namespace

ResolvedScenario resolve(const Scenario& scenario) {
    ResolvedScenario resolved;
    resolved.net = Network::build(scenario.network);
    const Network& net = resolved.net;

    std::vector<QueueFunction> queues(net.link_count(), QueueFunction::zero());
    std::set<std::string> seen;
    for (const auto& spec : scenario.queues) {
        if (!seen.insert(spec.link).second)
            fail("queue_models: duplicate entry for link " + spec.link);
        std::size_t l;
        try {
            l = net.link_index(spec.link);
        } catch (const std::out_of_range&) {
            fail("queue_models: unknown link " + spec.link);
        }
        queues[l] = build_queue(spec, net.links()[l].capacity);
    }
    resolved.queues = QueueSet(std::move(queues));

    // Gains alpha/d set the natural time scale when there are no delays.
    double slowest = 0.0;
    for (std::size_t l = 0; l < net.link_count(); ++l)
        slowest = std::max(slowest, net.rtt_estimate(l) / net.links()[l].alpha);

    SimConfig& sim = resolved.sim;
    sim.mode = scenario.sim.mode.value_or(SimMode::network);
    sim.eta = scenario.sim.eta.value_or(1.0);
    sim.step = scenario.sim.step.value_or(
        net.delay_free() ? 0.02 * slowest : net.min_positive_delay() / 25.0);
    sim.horizon = scenario.sim.horizon.value_or(
        net.delay_free() ? 100.0 * slowest
                         : std::max(100.0 * slowest, 20.0 * net.max_rtt()));
    if (scenario.sim.record_stride) {
        sim.record_stride = *scenario.sim.record_stride;
    } else {
        const double steps = sim.horizon / sim.step;
        sim.record_stride = std::max<std::size_t>(1, std::size_t(steps / 4000.0));
    }

    const double perturbation = scenario.sim.initial_perturbation.value_or(0.0);
    if (!scenario.sim.initial_rates.empty()) {
        if (scenario.sim.initial_rate || scenario.sim.initial_mode)
            fail("sim: initial_rates excludes initial_rate and initial_mode");
        sim.initial_rates.assign(net.link_count(), 0.0);
        std::set<std::string> covered;
        for (const auto& [id, rate] : scenario.sim.initial_rates) {
            std::size_t l;
            try {
                l = net.link_index(id);
            } catch (const std::out_of_range&) {
                fail("sim/initial_rates: unknown link " + id);
            }
            sim.initial_rates[l] = rate;
            covered.insert(id);
        }
        if (covered.size() != net.link_count())
            fail("sim/initial_rates: every link needs an entry");
    } else if (scenario.sim.initial_rate) {
        if (scenario.sim.initial_mode)
            fail("sim: initial_rate excludes initial_mode");
        sim.initial_rates.assign(net.link_count(), *scenario.sim.initial_rate);
    } else if (scenario.sim.initial_mode.value_or("capacity") == "equilibrium") {
        const Equilibrium eq = solve_equilibrium(net, resolved.queues);
        sim.initial_rates.resize(net.link_count());
        for (std::size_t l = 0; l < net.link_count(); ++l)
            sim.initial_rates[l] = eq.link_rate[l] * (1.0 + perturbation);
    } else {
        sim.initial_rates.resize(net.link_count());
        for (std::size_t l = 0; l < net.link_count(); ++l)
            sim.initial_rates[l] = net.links()[l].capacity * (1.0 + perturbation);
    }

    SweepSettings& sweep = resolved.sweep;
    sweep.etas = scenario.sweep.etas;
    if (sweep.etas.empty() && scenario.sweep.eta_count) {
        if (!scenario.sweep.eta_min || !scenario.sweep.eta_max ||
            *scenario.sweep.eta_count < 2)
            fail("sweep: eta grid needs eta_min, eta_max and eta_count >= 2");
        const int n = *scenario.sweep.eta_count;
        for (int i = 0; i < n; ++i)
            sweep.etas.push_back(*scenario.sweep.eta_min +
                                 (*scenario.sweep.eta_max - *scenario.sweep.eta_min) *
                                     double(i) / double(n - 1));
    }
    const double tau = net.max_rtt();
    if (scenario.sweep.bracket) {
        sweep.bracket_lo = scenario.sweep.bracket->first;
        sweep.bracket_hi = scenario.sweep.bracket->second;
    } else if (net.link_count() == 1) {
        // Wide straddle around the single-link stability edge; the
        // bisection still decides empirically where the transition is.
        const double hint = std::numbers::pi / (2.0 * net.links()[0].alpha);
        sweep.bracket_lo = 0.5 * hint;
        sweep.bracket_hi = 1.6 * hint;
    }
    sweep.horizon = scenario.sweep.horizon.value_or(4000.0 * tau);
    sweep.step = scenario.sweep.step.value_or(tau / 40.0);
    sweep.transient_fraction = scenario.sweep.transient_fraction.value_or(0.5);
    sweep.perturbation = scenario.sweep.perturbation.value_or(0.01);
    sweep.record_stride = scenario.sweep.record_stride.value_or(4);

    return resolved;
}

ordered_json ResolvedScenario::echo() const {
    ordered_json doc;
    doc["links"] = ordered_json::array();
    for (std::size_t l = 0; l < net.link_count(); ++l) {
        const Link& link = net.links()[l];
        ordered_json j{{"id", link.id},
                       {"capacity", link.capacity},
                       {"alpha", link.alpha},
                       {"beta", link.beta},
                       {"d", net.rtt_estimate(l)}};
        doc["links"].push_back(std::move(j));
    }
    doc["routes"] = ordered_json::array();
    for (const Route& route : net.routes()) {
        ordered_json j{{"id", route.id},
                       {"links", route.links},
                       {"forward_delays", route.forward_delays},
                       {"return_delays", route.return_delays},
                       {"rtt", route.rtt}};
        doc["routes"].push_back(std::move(j));
    }
    doc["queue_models"] = ordered_json::array();
    for (std::size_t l = 0; l < net.link_count(); ++l) {
        const QueueFunction& q = queues.at(l);
        ordered_json j{{"link", net.links()[l].id},
                       {"family", to_string(q.family())}};
        if (q.family() == QueueFamily::linear || q.family() == QueueFamily::mm1_scaled)
            j["k"] = q.scale();
        if (q.family() == QueueFamily::power) {
            j["k"] = q.scale();
            j["m"] = q.exponent();
        }
        doc["queue_models"].push_back(std::move(j));
    }
    doc["sim"] = ordered_json{
        {"step", sim.step},
        {"horizon", sim.horizon},
        {"eta", sim.eta},
        {"record_stride", sim.record_stride},
        {"mode", sim.mode == SimMode::network ? "network" : "single_link_beta0"},
    };
    ordered_json rates = ordered_json::object();
    for (std::size_t l = 0; l < net.link_count(); ++l)
        rates[net.links()[l].id] = sim.initial_rates[l];
    doc["sim"]["initial_rates"] = std::move(rates);
    doc["sweep"] = ordered_json{
        {"etas", sweep.etas},
        {"bracket", {sweep.bracket_lo, sweep.bracket_hi}},
        {"horizon", sweep.horizon},
        {"step", sweep.step},
        {"transient_fraction", sweep.transient_fraction},
        {"perturbation", sweep.perturbation},
        {"record_stride", sweep.record_stride},
    };
    return doc;
}

}  // namespace rcp
