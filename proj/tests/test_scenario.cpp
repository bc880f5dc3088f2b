#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "wgf/scenario.hpp"

using namespace wgf;
using Catch::Matchers::ContainsSubstring;

static std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

TEST_CASE("minimal config picks the documented defaults") {
    const Scenario s = parse_config(
        "grid.nx = 9\n"
        "grid.ny = 9\n"
        "ic.preset = zero\n"
        "flow.t_end = 1.0\n");
    CHECK(s.name == "scenario");
    CHECK(s.task == "flow");
    CHECK(s.bc_mode == "preset");
    CHECK(s.apriori);
    CHECK(s.flow.scheme == Scheme::Explicit);
    CHECK(s.flow.dt_policy == DtPolicy::Cfl);
    CHECK(s.outdir == "out/scenario");
    CHECK(s.x1 == 1.0);
    check_scenario(s); // constructible
}

TEST_CASE("a bare flow.dt implies the fixed step policy") {
    const Scenario s = parse_config(
        "grid.nx = 9\ngrid.ny = 9\nic.preset = zero\nflow.t_end = 1.0\n"
        "flow.scheme = frozen\nflow.dt = 1e-5\n");
    CHECK(s.flow.dt_policy == DtPolicy::Fixed);
    CHECK(s.flow.scheme == Scheme::Frozen);
    CHECK(s.flow.dt == 1e-5);
}

TEST_CASE("config errors carry line numbers and suggestions") {
    CHECK_THROWS_WITH(parse_config("scenario.name = t\n"
                                   "grid.nx = 9\n"
                                   "grid.ny = 9\n"
                                   "flow.t_endd = 1.0\n"
                                   "ic.preset = zero\n"),
                      ContainsSubstring("line 4") &&
                          ContainsSubstring("unknown key") &&
                          ContainsSubstring("flow.t_end"));
    CHECK_THROWS_WITH(
        parse_config("grid.nx = 9\ngrid.nx = 11\ngrid.ny = 9\nic.preset = zero\nflow.t_end = 1\n"),
        ContainsSubstring("duplicate"));
    CHECK_THROWS_WITH(
        parse_config("grid.nx = 9\ngrid.ny = 9\ngrid.x0 = abc\nic.preset = zero\nflow.t_end = 1\n"),
        ContainsSubstring("needs a number"));
    CHECK_THROWS_WITH(
        parse_config("grid.nx = 8.5\ngrid.ny = 9\nic.preset = zero\nflow.t_end = 1\n"),
        ContainsSubstring("needs an integer"));
    CHECK_THROWS_WITH(parse_config("grid.nx = 9\ngrid.ny = 9\nic.preset = zero\n"
                                   "flow.t_end = 1\nanalysis.apriori = maybe\n"),
                      ContainsSubstring("needs on/off"));
    CHECK_THROWS_WITH(parse_config("grid.ny = 9\nic.preset = zero\nflow.t_end = 1\n"),
                      ContainsSubstring("missing required key"));
    CHECK_THROWS_AS(parse_config("grid.nx = 9\ngrid.ny = 9\nic.preset = zero\n"), ConfigError);
    CHECK_THROWS_WITH(parse_config("grid.nx = 9\ngrid.ny = 9\nic.preset = cap\nflow.t_end = 1\n"),
                      ContainsSubstring("ic.radius"));
    CHECK_THROWS_WITH(parse_config("grid.nx = 9\ngrid.ny = 9\nic.preset = blob\nflow.t_end = 1\n"),
                      ContainsSubstring("zero/plane/bump/tent/cap"));
}

TEST_CASE("geometric containment is validated before a run") {
    const Scenario s = parse_config(
        "grid.nx = 9\ngrid.ny = 9\nic.preset = bump\nic.width = 2.0\nflow.t_end = 1\n");
    CHECK_THROWS_AS(check_scenario(s), ConfigError);
}

TEST_CASE("zero scenario stops immediately and writes the artifact set") {
    Scenario s = parse_config(
        "scenario.name = zrun\ngrid.nx = 9\ngrid.ny = 9\nic.preset = zero\n"
        "flow.t_end = 1.0\noutput.dir = scen_zrun\n");
    const RunReport rep = run_scenario(s);
    CHECK(rep.stop_reason == "stationary");
    CHECK(rep.steps == 0);
    CHECK(rep.apriori_violations == 0);
    const std::string diag = slurp("scen_zrun/diag.csv");
    CHECK(diag.rfind("t,W,sup_u,sup_grad_u,l2_u,area,dWdt,dissipation_rhs,dt\n", 0) == 0);
    CHECK(std::count(diag.begin(), diag.end(), '\n') == 2); // header + the t = 0 row
    CHECK(std::filesystem::exists("scen_zrun/final.wgf1"));
    CHECK(rep.json.contains("flow"));
    CHECK(rep.json["flow"]["stop_reason"] == "stationary");
    const std::string js = slurp("scen_zrun/report.json");
    CHECK(js.find("\"violations\": 0") != std::string::npos);
}

TEST_CASE("identical configs produce byte-identical artifacts") {
    const std::string base =
        "scenario.name = det\ngrid.nx = 17\ngrid.ny = 17\nic.preset = bump\n"
        "ic.amplitude = 0.01\nflow.scheme = frozen\nflow.dt = 1e-5\n"
        "flow.t_end = 1e-4\nflow.snapshot_every = 4\nflow.stationary_tol = 0\n";
    Scenario a = parse_config(base + "output.dir = scen_det_a\n");
    Scenario b = parse_config(base + "output.dir = scen_det_b\n");
    run_scenario(a);
    run_scenario(b);
    for (const char* f : {"diag.csv", "final.wgf1", "report.json", "snap_000000.wgf1"})
        CHECK(slurp(std::string("scen_det_a/") + f) == slurp(std::string("scen_det_b/") + f));
}

TEST_CASE("blown-up runs leave partial diagnostics behind") {
    Scenario s = parse_config(
        "scenario.name = boom\ngrid.nx = 17\ngrid.ny = 17\nic.preset = bump\n"
        "ic.amplitude = 0.02\nflow.dt = 1.0\nflow.t_end = 10\n"
        "flow.stationary_tol = 0\noutput.dir = scen_boom\n");
    CHECK_THROWS_AS(run_scenario(s), FlowBlowUp);
    CHECK(std::filesystem::exists("scen_boom/diag.csv"));
    CHECK(std::filesystem::exists("scen_boom/last.wgf1"));
    const ScalarField last = load_field("scen_boom/last.wgf1");
    for (int j = 1; j <= 17; ++j)
        for (int i = 1; i <= 17; ++i) CHECK(std::isfinite(last.at(i, j)));
}

TEST_CASE("newton task writes its own artifact set") {
    Scenario s = parse_config(
        "scenario.name = nw\ngrid.nx = 11\ngrid.ny = 11\nic.preset = bump\n"
        "ic.amplitude = 0.005\nrun.task = newton\noutput.dir = scen_nw\n");
    const RunReport rep = run_scenario(s);
    CHECK(rep.newton_converged);
    CHECK(rep.stop_reason == "newton");
    const std::string csv = slurp("scen_nw/newton.csv");
    CHECK(csv.rfind("iter,res_inf,step_fraction\n", 0) == 0);
    CHECK(std::filesystem::exists("scen_nw/newton.wgf1"));
    CHECK(rep.json["newton"]["converged"] == true);
}

TEST_CASE("flow_then_newton reports the gap between the two answers") {
    Scenario s = parse_config(
        "scenario.name = fn\ngrid.nx = 17\ngrid.ny = 17\nic.preset = bump\n"
        "ic.amplitude = 0.005\nrun.task = flow_then_newton\nflow.scheme = frozen\n"
        "flow.dt = 1e-5\nflow.t_end = 5e-5\nflow.stationary_tol = 0\n"
        "output.dir = scen_fn\n");
    const RunReport rep = run_scenario(s);
    CHECK(rep.newton_converged);
    CHECK(rep.json["newton"].contains("gap_to_flow"));
    CHECK(std::filesystem::exists("scen_fn/newton.wgf1"));
    CHECK(std::filesystem::exists("scen_fn/final.wgf1"));
}
