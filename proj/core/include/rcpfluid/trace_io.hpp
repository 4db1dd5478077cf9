#pragma once

#include <ostream>
#include <string>

#include <json.hpp>

#include "rcpfluid/bifurcation.hpp"
#include "rcpfluid/dde_sim.hpp"
#include "rcpfluid/equilibrium.hpp"
#include "rcpfluid/network.hpp"
#include "rcpfluid/stability.hpp"

namespace rcp {

// Shortest round-trip decimal form; identical inputs give identical bytes.
std::string format_double(double v);

// Header: time, then R.<link>, x.<route>, y.<link>, q.<link> columns.
void write_trace_csv(std::ostream& out, const Network& net, const SimTrace& trace);
nlohmann::ordered_json trace_json(const Network& net, const SimTrace& trace);

nlohmann::ordered_json summary_json(const Network& net, const SimTrace& trace,
                                    const SimSummary& summary);

nlohmann::ordered_json equilibrium_json(const Network& net, const Equilibrium& eq,
                                        const BottleneckCheck& check);

nlohmann::ordered_json stability_json(const Network& net,
                                      const StabilityReport& report);
std::string stability_table(const Network& net, const StabilityReport& report);

// Columns: eta, amplitude, period, converged.
void write_sweep_csv(std::ostream& out, const SweepResult& result);
nlohmann::ordered_json sweep_json(const SweepResult& result);

}  // namespace rcp
