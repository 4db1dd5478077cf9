// Process-level checks of the command line tool: exit statuses, output
// files, and byte-for-byte determinism.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

const std::string kCli = RCPFLUID_CLI_PATH;
const fs::path kScenarios = RCPFLUID_SCENARIO_DIR;

int run(const std::string& args) {
    const std::string cmd = kCli + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("rcpfluid_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("validate exit statuses") {
    CHECK(run("validate --scenario " + (kScenarios / "single_link.json").string()) ==
          0);
    CHECK(run("validate --scenario " + (kScenarios / "rtt_mismatch.json").string()) ==
          1);
    const fs::path dir = fresh_dir("malformed");
    std::ofstream(dir / "broken.json") << "{not json";
    CHECK(run("validate --scenario " + (dir / "broken.json").string()) == 2);
    CHECK(run("validate --scenario " + (dir / "missing.json").string()) == 2);
    CHECK(run("validate") == 4);  // missing required flag
    CHECK(run("frobnicate") == 4);
}

TEST_CASE("simulate writes trace, summary, and the resolved scenario") {
    const fs::path dir = fresh_dir("simulate");
    const int status =
        run("simulate --scenario " + (kScenarios / "single_link.json").string() +
            " --out " + dir.string() + " --eta 1.0 --plot");
    CHECK(status == 0);
    CHECK(fs::exists(dir / "trace.csv"));
    CHECK(fs::exists(dir / "summary.json"));
    CHECK(fs::exists(dir / "scenario_resolved.json"));
    CHECK(fs::exists(dir / "trace.svg"));

    const auto summary = nlohmann::json::parse(slurp(dir / "summary.json"));
    CHECK(summary["status"] == "completed");
    CHECK(summary["converged"] == true);

    const std::string header = slurp(dir / "trace.csv").substr(0, 60);
    CHECK(header.rfind("time,R.L,x.r1,x.r2,y.L,q.L", 0) == 0);
}

TEST_CASE("simulate is byte-deterministic") {
    const fs::path a = fresh_dir("det_a"), b = fresh_dir("det_b");
    const std::string scenario = (kScenarios / "three_link_heterogeneous.json").string();
    REQUIRE(run("simulate --scenario " + scenario + " --out " + a.string() +
                " --horizon 40") == 0);
    REQUIRE(run("simulate --scenario " + scenario + " --out " + b.string() +
                " --horizon 40") == 0);
    CHECK(slurp(a / "trace.csv") == slurp(b / "trace.csv"));
    CHECK(slurp(a / "summary.json") == slurp(b / "summary.json"));
}

TEST_CASE("divergent scenario exits with status 3 and flags the link") {
    const fs::path dir = fresh_dir("diverge");
    const int status =
        run("simulate --scenario " + (kScenarios / "no_equilibrium.json").string() +
            " --out " + dir.string() + " --horizon 400");
    CHECK(status == 3);
    const auto summary = nlohmann::json::parse(slurp(dir / "summary.json"));
    CHECK(summary["status"] == "diverged");
    CHECK(summary["no_equilibrium_suspect"] == true);
    CHECK(summary["oscillation"]["B"]["monotone_increasing"] == true);
    CHECK(summary["oscillation"]["B"]["no_equilibrium_suspect"] == true);
    CHECK(summary["oscillation"]["A"]["no_equilibrium_suspect"] == false);
}

TEST_CASE("equilibrium and report emit the analysis bundle") {
    const fs::path dir = fresh_dir("report");
    const std::string scenario = (kScenarios / "linear_queue_report.json").string();
    REQUIRE(run("equilibrium --scenario " + scenario + " --out " + dir.string()) == 0);
    const auto eq = nlohmann::json::parse(slurp(dir / "equilibrium.json"));
    CHECK(eq.contains("x"));
    CHECK(eq.contains("bottleneck"));
    CHECK(eq["assumption"]["single_bottleneck_ok"] == true);

    REQUIRE(run("report --scenario " + scenario + " --out " + dir.string()) == 0);
    const auto report = nlohmann::json::parse(slurp(dir / "report.json"));
    CHECK(report.contains("equilibrium"));
    CHECK(report["stability"]["links"].contains("A"));
    CHECK(report["stability"]["links"]["A"].contains("recommended_alpha"));

    REQUIRE(run("stability-check --scenario " + scenario + " --out " +
                dir.string()) == 0);
    CHECK(fs::exists(dir / "stability.json"));
}

TEST_CASE("report reproduces the worked single-link condition value") {
    const fs::path dir = fresh_dir("worked");
    // alpha 0.5, d 1, C 2, two unit-rtt routes: condition value 0.5.
    REQUIRE(run("report --scenario " + (kScenarios / "single_link.json").string() +
                " --out " + dir.string()) == 0);
    const auto report = nlohmann::json::parse(slurp(dir / "report.json"));
    CHECK(report["stability"]["links"]["L"]["stability_lhs"].get<double>() ==
          doctest::Approx(0.5));
    CHECK(report["stability"]["links"]["L"]["stability_ok"] == true);
    CHECK(report["stability"]["assumption_ok"] == true);

    // Two identical links on one route: the assumption flag comes up false.
    REQUIRE(run("report --scenario " +
                (kScenarios / "two_identical_links.json").string() + " --out " +
                dir.string()) == 0);
    const auto tie = nlohmann::json::parse(slurp(dir / "report.json"));
    CHECK(tie["stability"]["assumption_ok"] == false);
    CHECK(tie["equilibrium"]["bottleneck"]["r1"]["tie"] == true);
}

TEST_CASE("hopf-sweep with the default grid finds the edge") {
    const fs::path dir = fresh_dir("sweep_default");
    const int status =
        run("hopf-sweep --scenario " + (kScenarios / "single_link_hopf.json").string() +
            " --out " + dir.string());
    REQUIRE(status == 0);
    const auto fit = nlohmann::json::parse(slurp(dir / "fit.json"));
    REQUIRE(fit["fit"]["valid"] == true);
    const double eta_c = fit["fit"]["eta_c_estimate"].get<double>();
    CHECK(std::abs(eta_c - 1.5708) <= 0.02 * 1.5708);
    CHECK(fit["subcritical_converged"] == true);
    CHECK(fit["supercritical_bounded"] == true);
}

TEST_CASE("hopf-sweep on an explicit grid writes csv and fit") {
    const fs::path dir = fresh_dir("sweep");
    // Small grid and short horizon: exercise the pipeline, not the physics.
    std::ofstream(dir / "hopf.json") << R"({
      "links": [{"id": "L", "capacity": 2.0, "alpha": 1.0, "beta": 0.0}],
      "routes": [
        {"id": "r1", "links": ["L"], "forward_delays": [0.4], "rtt": 1.0},
        {"id": "r2", "links": ["L"], "forward_delays": [0.5], "rtt": 1.0}
      ],
      "sweep": {"etas": [1.4, 1.7], "horizon": 500.0, "step": 0.03}
    })";
    const int status = run("hopf-sweep --scenario " + (dir / "hopf.json").string() +
                           " --out " + dir.string());
    CHECK(status == 0);
    CHECK(fs::exists(dir / "sweep.csv"));
    CHECK(fs::exists(dir / "fit.json"));
    const std::string csv = slurp(dir / "sweep.csv");
    CHECK(csv.rfind("eta,amplitude,period,converged", 0) == 0);
    const auto fit = nlohmann::json::parse(slurp(dir / "fit.json"));
    CHECK(fit.contains("measurements"));
    CHECK(fit["measurements"].size() == 2);
}
