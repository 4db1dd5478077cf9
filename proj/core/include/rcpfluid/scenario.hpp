#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rcpfluid/dde_sim.hpp"
#include "rcpfluid/network.hpp"
#include "rcpfluid/queue_model.hpp"

namespace rcp {

class ScenarioParseError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct QueueSpec {
    std::string link;
    QueueFamily family = QueueFamily::zero;
    std::optional<double> k;
    std::optional<double> m;
};

struct SimSpec {
    std::optional<double> step;
    std::optional<double> horizon;
    std::optional<double> eta;
    std::optional<std::size_t> record_stride;
    std::optional<SimMode> mode;
    std::optional<double> initial_rate;              // broadcast
    std::map<std::string, double> initial_rates;     // per link id
    std::optional<std::string> initial_mode;         // "capacity" | "equilibrium"
    std::optional<double> initial_perturbation;
};

struct SweepSpec {
    std::vector<double> etas;
    std::optional<double> eta_min, eta_max;
    std::optional<int> eta_count;
    std::optional<std::pair<double, double>> bracket;
    std::optional<double> horizon;
    std::optional<double> step;
    std::optional<double> transient_fraction;
    std::optional<double> perturbation;
    std::optional<std::size_t> record_stride;
};

// Parsed scenario file; nothing validated or defaulted yet.
struct Scenario {
    NetworkConfig network;
    std::vector<QueueSpec> queues;
    SimSpec sim;
    SweepSpec sweep;
};

// Parse errors (malformed document, wrong types, unknown keys) throw
// ScenarioParseError; structural violations are left to validate().
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::filesystem::path& path);

// Sweep settings with every default made explicit (times absolute).
struct SweepSettings {
    std::vector<double> etas;  // empty: derive a grid around the bisected threshold
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
    double horizon = 0.0;
    double step = 0.0;
    double transient_fraction = 0.5;
    double perturbation = 0.01;
    std::size_t record_stride = 4;
};

// Validated network plus fully resolved settings. `echo` is the resolved
// scenario document: re-parsing it reproduces the same resolution.
struct ResolvedScenario {
    Network net;
    QueueSet queues;
    SimConfig sim;
    SweepSettings sweep;
    nlohmann::ordered_json echo() const;
};

// Throws ValidationError (invalid network), ScenarioParseError (bad queue
// or sim settings).
ResolvedScenario resolve(const Scenario& scenario);

}  // namespace rcp
