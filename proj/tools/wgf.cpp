#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <glob.h>

#include <CLI11.hpp>

#include "wgf/scenario.hpp"

// wgf: scenario-driven laboratory for clamped graphical Willmore flow.
// Exit codes: 0 ok, 2 config error, 3 blow-up / numerical failure,
// 4 non-convergence, 5 I/O failure.

namespace {

std::string slurp(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw wgf::IoError("cannot open config '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

int code_for(const std::exception& e) {
    if (dynamic_cast<const wgf::ConfigError*>(&e)) return 2;
    if (dynamic_cast<const wgf::BlowUpError*>(&e)) return 3;
    if (dynamic_cast<const wgf::NumericalError*>(&e)) return 3;
    if (dynamic_cast<const wgf::NonConvergenceError*>(&e)) return 4;
    if (dynamic_cast<const wgf::IoError*>(&e)) return 5;
    return 1;
}

int run_one(const std::string& path, const std::string& out_override, bool quiet,
            bool sweep_mode) {
    try {
        wgf::Scenario s = wgf::parse_config(slurp(path));
        if (!out_override.empty())
            s.outdir = sweep_mode ? out_override + "/" + s.name : out_override;
        wgf::check_scenario(s);
        wgf::RunReport r = wgf::run_scenario(s);
        if (!quiet)
            std::printf("run %s: stop=%s t=%.17g steps=%ld -> %s\n", s.name.c_str(),
                        r.stop_reason.c_str(), r.t_final, r.steps, s.outdir.c_str());
        return 0;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "wgf: %s: %s\n", path.c_str(), e.what());
        return code_for(e);
    }
}

std::vector<std::string> expand_glob(const std::string& pattern) {
    glob_t g;
    const int rc = glob(pattern.c_str(), 0, nullptr, &g);
    std::vector<std::string> out;
    if (rc == 0)
        for (size_t i = 0; i < g.gl_pathc; ++i) out.emplace_back(g.gl_pathv[i]);
    globfree(&g);
    if (rc != 0 && rc != GLOB_NOMATCH) throw wgf::IoError("glob failed on '" + pattern + "'");
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"clamped graphical Willmore flow laboratory"};
    app.require_subcommand(1);
    std::string out_override;
    bool quiet = false;
    app.add_option("--out", out_override, "override the output directory");
    app.add_flag("--quiet", quiet, "suppress status lines");

    std::string run_cfg, check_cfg, sweep_pattern;
    CLI::App* cmd_run = app.add_subcommand("run", "run one scenario config");
    cmd_run->add_option("config", run_cfg, "config file")->required();
    CLI::App* cmd_sweep = app.add_subcommand("sweep", "run every config matching a glob");
    cmd_sweep->add_option("pattern", sweep_pattern, "config glob pattern")->required();
    CLI::App* cmd_check = app.add_subcommand("check", "validate a config without running");
    cmd_check->add_option("config", check_cfg, "config file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    if (cmd_run->parsed()) return run_one(run_cfg, out_override, quiet, false);

    if (cmd_check->parsed()) {
        try {
            wgf::Scenario s = wgf::parse_config(slurp(check_cfg));
            wgf::check_scenario(s);
            if (!quiet) std::printf("check %s: ok (scenario '%s')\n", check_cfg.c_str(), s.name.c_str());
            return 0;
        } catch (const std::exception& e) {
            std::fprintf(stderr, "wgf: %s: %s\n", check_cfg.c_str(), e.what());
            return code_for(e);
        }
    }

    // sweep: run every match, report each, exit with the first failure code
    try {
        const std::vector<std::string> paths = expand_glob(sweep_pattern);
        if (paths.empty()) {
            std::fprintf(stderr, "wgf: no configs match '%s'\n", sweep_pattern.c_str());
            return 2;
        }
        int first_fail = 0;
        for (const std::string& p : paths) {
            const int rc = run_one(p, out_override, quiet, true);
            if (!quiet && rc != 0) std::printf("sweep %s: exit %d\n", p.c_str(), rc);
            if (rc != 0 && first_fail == 0) first_fail = rc;
        }
        return first_fail;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "wgf: %s\n", e.what());
        return code_for(e);
    }
}
