// rcpfluid: scenario validation, equilibrium and stability analysis,
// delayed-dynamics simulation, and gain sweeps for the max-min fair
// explicit rate control fluid model.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "rcpfluid/bifurcation.hpp"
#include "rcpfluid/dde_sim.hpp"
#include "rcpfluid/equilibrium.hpp"
#include "rcpfluid/scenario.hpp"
#include "rcpfluid/stability.hpp"
#include "rcpfluid/svg_plot.hpp"
#include "rcpfluid/trace_io.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

// Exit statuses, also listed in --help.
enum Status : int {
    kOk = 0,
    kInvalidScenario = 1,
    kParseFailure = 2,
    kDivergence = 3,
    kUsage = 4,
    kInternal = 5,
};

constexpr const char* kStatusFooter =
    "Exit status:\n"
    "  0  success\n"
    "  1  scenario failed validation (or invalid settings)\n"
    "  2  unreadable or malformed scenario file\n"
    "  3  simulation aborted (divergence, queue domain, negative rate)\n"
    "  4  bad command line\n"
    "  5  internal error\n";

struct CommonArgs {
    std::string scenario_path;
    std::string out_dir = ".";
    std::optional<double> eta;
    std::optional<double> step;
    std::optional<double> horizon;
    std::optional<long long> seed;  // reserved; the core has no randomness
    std::string format = "csv";
    bool plot = false;
};

void add_common_options(CLI::App* cmd, CommonArgs& args, bool sim_flags) {
    cmd->add_option("--scenario", args.scenario_path, "Scenario JSON file")
        ->required();
    cmd->add_option("--out", args.out_dir, "Output directory (created if missing)");
    cmd->add_option("--seed", args.seed,
                    "Reserved for future use; accepted and echoed only");
    if (sim_flags) {
        cmd->add_option("--eta", args.eta, "Override the gain multiplier");
        cmd->add_option("--step", args.step, "Override the integration step");
        cmd->add_option("--horizon", args.horizon, "Override the time horizon");
        cmd->add_option("--format", args.format, "Trace format: csv or json")
            ->check(CLI::IsMember({"csv", "json"}));
        cmd->add_flag("--plot", args.plot, "Also write an SVG line plot");
    }
}

rcp::Scenario load_or_exit(const std::string& path) {
    try {
        return rcp::load_scenario(path);
    } catch (const rcp::ScenarioParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        std::exit(kParseFailure);
    }
}

rcp::ResolvedScenario resolve_or_exit(const rcp::Scenario& scenario,
                                      const CommonArgs& args) {
    try {
        rcp::ResolvedScenario resolved = rcp::resolve(scenario);
        if (args.eta) resolved.sim.eta = *args.eta;
        if (args.step) resolved.sim.step = *args.step;
        if (args.horizon) resolved.sim.horizon = *args.horizon;
        return resolved;
    } catch (const rcp::ValidationError& e) {
        std::cerr << "error: " << e.what();
        std::exit(kInvalidScenario);
    } catch (const rcp::ScenarioParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        std::exit(kInvalidScenario);
    }
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

void emit_resolved(const rcp::ResolvedScenario& resolved, const CommonArgs& args) {
    fs::create_directories(args.out_dir);
    ordered_json echo = resolved.echo();
    if (args.seed) echo["seed"] = *args.seed;
    write_text(fs::path(args.out_dir) / "scenario_resolved.json", echo.dump(2) + "\n");
}

int cmd_validate(const CommonArgs& args) {
    const rcp::Scenario scenario = load_or_exit(args.scenario_path);
    const rcp::ValidationReport report = rcp::validate(scenario.network);
    std::cout << report.to_string();
    if (!report.ok()) return kInvalidScenario;
    // Queue and sim settings are resolved to surface their errors too.
    try {
        rcp::resolve(scenario);
    } catch (const std::exception& e) {
        std::cout << e.what() << "\n";
        return kInvalidScenario;
    }
    return kOk;
}

int cmd_equilibrium(const CommonArgs& args) {
    const rcp::Scenario scenario = load_or_exit(args.scenario_path);
    const rcp::ResolvedScenario resolved = resolve_or_exit(scenario, args);
    emit_resolved(resolved, args);

    const rcp::Equilibrium eq = rcp::solve_equilibrium(resolved.net, resolved.queues);
    const rcp::BottleneckCheck check = rcp::check_single_bottleneck(resolved.net, eq);
    const ordered_json doc = rcp::equilibrium_json(resolved.net, eq, check);
    std::cout << doc.dump(2) << "\n";
    write_text(fs::path(args.out_dir) / "equilibrium.json", doc.dump(2) + "\n");
    return kOk;
}

int cmd_stability(const CommonArgs& args) {
    const rcp::Scenario scenario = load_or_exit(args.scenario_path);
    const rcp::ResolvedScenario resolved = resolve_or_exit(scenario, args);
    emit_resolved(resolved, args);

    const rcp::Equilibrium eq = rcp::solve_equilibrium(resolved.net, resolved.queues);
    const rcp::StabilityReport report =
        rcp::evaluate_stability(resolved.net, resolved.queues, eq);
    const ordered_json doc = rcp::stability_json(resolved.net, report);
    if (args.format == "json")
        std::cout << doc.dump(2) << "\n";
    else
        std::cout << rcp::stability_table(resolved.net, report);
    write_text(fs::path(args.out_dir) / "stability.json", doc.dump(2) + "\n");
    return kOk;
}

int cmd_report(const CommonArgs& args) {
    const rcp::Scenario scenario = load_or_exit(args.scenario_path);
    const rcp::ResolvedScenario resolved = resolve_or_exit(scenario, args);
    emit_resolved(resolved, args);

    const rcp::Equilibrium eq = rcp::solve_equilibrium(resolved.net, resolved.queues);
    const rcp::BottleneckCheck check = rcp::check_single_bottleneck(resolved.net, eq);
    const rcp::StabilityReport report =
        rcp::evaluate_stability(resolved.net, resolved.queues, eq);

    ordered_json doc;
    doc["equilibrium"] = rcp::equilibrium_json(resolved.net, eq, check);
    doc["stability"] = rcp::stability_json(resolved.net, report);
    std::cout << doc.dump(2) << "\n";
    write_text(fs::path(args.out_dir) / "report.json", doc.dump(2) + "\n");
    return kOk;
}

int cmd_simulate(const CommonArgs& args) {
    const rcp::Scenario scenario = load_or_exit(args.scenario_path);
    const rcp::ResolvedScenario resolved = resolve_or_exit(scenario, args);
    emit_resolved(resolved, args);

    rcp::SimTrace trace;
    try {
        trace = rcp::run_simulation(resolved.net, resolved.queues, resolved.sim);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInvalidScenario;
    }
    for (const std::string& w : trace.warnings) std::cerr << "warning: " << w << "\n";

    const fs::path out(args.out_dir);
    if (args.format == "json")
        write_text(out / "trace.json",
                   rcp::trace_json(resolved.net, trace).dump(2) + "\n");
    else {
        std::ofstream csv(out / "trace.csv", std::ios::binary);
        rcp::write_trace_csv(csv, resolved.net, trace);
    }

    const rcp::SimSummary summary = rcp::summarize(resolved.net, trace);
    const ordered_json doc = rcp::summary_json(resolved.net, trace, summary);
    std::cout << doc.dump(2) << "\n";
    write_text(out / "summary.json", doc.dump(2) + "\n");

    if (args.plot) {
        std::vector<rcp::SvgSeries> series;
        for (std::size_t l = 0; l < resolved.net.link_count(); ++l)
            series.push_back({"R." + resolved.net.links()[l].id, trace.times,
                              trace.link_rate[l]});
        std::ofstream svg(out / "trace.svg", std::ios::binary);
        rcp::write_line_svg(svg, "link rates", "time", "rate", series);
    }
    return trace.status == rcp::SimStatus::completed ? kOk : kDivergence;
}

int cmd_hopf_sweep(const CommonArgs& args) {
    const rcp::Scenario scenario = load_or_exit(args.scenario_path);
    rcp::ResolvedScenario resolved = resolve_or_exit(scenario, args);
    if (args.step) resolved.sweep.step = *args.step;
    if (args.horizon) resolved.sweep.horizon = *args.horizon;
    emit_resolved(resolved, args);

    const double tau = resolved.net.max_rtt();
    if (!(tau > 0.0)) {
        std::cerr << "error: hopf-sweep needs a delayed single-link scenario\n";
        return kInvalidScenario;
    }
    rcp::HopfRunOptions opts;
    opts.step_per_tau = resolved.sweep.step / tau;
    opts.horizon_per_tau = resolved.sweep.horizon / tau;
    opts.perturbation = resolved.sweep.perturbation;
    opts.transient_fraction = resolved.sweep.transient_fraction;
    opts.record_stride = resolved.sweep.record_stride;

    try {
        ordered_json doc;
        std::vector<double> etas = resolved.sweep.etas;
        if (etas.empty()) {
            // Locate the transition first, then lay a grid around it:
            // two settled points below, the weakly nonlinear band above.
            rcp::HopfRunOptions bisect = opts;
            bisect.horizon_per_tau = std::min(opts.horizon_per_tau, 2000.0);
            const double eta_c =
                rcp::estimate_eta_c(resolved.net, resolved.queues,
                                    resolved.sweep.bracket_lo,
                                    resolved.sweep.bracket_hi, bisect);
            doc["eta_c_bisection"] = eta_c;
            etas = {0.90 * eta_c, 0.95 * eta_c};
            for (int i = 1; i <= 10; ++i) etas.push_back(eta_c * (1.0 + 0.005 * i));
        }
        const rcp::SweepResult result =
            rcp::sweep_and_fit(resolved.net, resolved.queues, etas, opts);

        const fs::path out(args.out_dir);
        {
            std::ofstream csv(out / "sweep.csv", std::ios::binary);
            rcp::write_sweep_csv(csv, result);
        }
        const ordered_json sweep_doc = rcp::sweep_json(result);
        for (const auto& [key, value] : sweep_doc.items()) doc[key] = value;
        // Scale-free inspection value: fitted prefactor over Rbar.
        const rcp::Equilibrium eq =
            rcp::solve_equilibrium(resolved.net, resolved.queues);
        if (result.fit.valid) {
            const rcp::HopfPrediction prediction = rcp::hopf_prediction(
                resolved.net.links()[0].alpha, tau, eq.link_rate[0]);
            doc["prefactor_over_prediction"] =
                result.fit.amplitude_prefactor / prediction.amplitude_coefficient;
        }
        std::cout << doc.dump(2) << "\n";
        write_text(out / "fit.json", doc.dump(2) + "\n");

        if (args.plot) {
            rcp::SvgSeries amp2{"amplitude^2", {}, {}};
            for (const auto& m : result.measurements) {
                amp2.x.push_back(m.eta);
                amp2.y.push_back(m.amplitude * m.amplitude);
            }
            std::ofstream svg(out / "sweep.svg", std::ios::binary);
            rcp::write_line_svg(svg, "amplitude^2 vs gain", "eta", "amplitude^2",
                                {amp2});
        }
        return kOk;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInvalidScenario;
    } catch (const rcp::CycleMeasureError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInternal;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fluid-model analysis toolkit for max-min fair explicit rate control"};
    app.require_subcommand(1);
    app.footer(kStatusFooter);

    CommonArgs args;
    CLI::App* validate = app.add_subcommand("validate", "Check a scenario file");
    add_common_options(validate, args, false);
    CLI::App* equilibrium =
        app.add_subcommand("equilibrium", "Compute the limiting rate allocation");
    add_common_options(equilibrium, args, false);
    CLI::App* stability = app.add_subcommand(
        "stability-check", "Evaluate the local stability conditions");
    stability->add_option("--format", args.format, "Table (default) or json output")
        ->check(CLI::IsMember({"csv", "json", "table"}));
    add_common_options(stability, args, false);
    CLI::App* report =
        app.add_subcommand("report", "Equilibrium plus stability, one JSON bundle");
    add_common_options(report, args, false);
    CLI::App* simulate =
        app.add_subcommand("simulate", "Integrate the delayed dynamics");
    add_common_options(simulate, args, true);
    CLI::App* sweep = app.add_subcommand(
        "hopf-sweep", "Gain sweep with limit-cycle measurement and scaling fit");
    add_common_options(sweep, args, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (validate->parsed()) return cmd_validate(args);
        if (equilibrium->parsed()) return cmd_equilibrium(args);
        if (stability->parsed()) return cmd_stability(args);
        if (report->parsed()) return cmd_report(args);
        if (simulate->parsed()) return cmd_simulate(args);
        if (sweep->parsed()) return cmd_hopf_sweep(args);
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kInternal;
    }
    return kUsage;
}
