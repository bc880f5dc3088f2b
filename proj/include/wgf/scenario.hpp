#pragma once

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "wgf/analysis.hpp"
#include "wgf/field_io.hpp"
#include "wgf/flow.hpp"
#include "wgf/presets.hpp"
#include "wgf/stationary.hpp"

// Scenario = one reproducible experiment described by a flat key-value
// config. Everything the acceptance fixtures need is reachable from here, so
// experiments never require recompilation.

namespace wgf {

struct Scenario {
    std::string name = "scenario";
    int nx = 0, ny = 0;
    double x0 = 0, x1 = 1, y0 = 0, y1 = 1;

    std::string ic_preset;
    double amplitude = 0.01;                 // bump, tent
    double plane_a = 0, plane_b = 0;         // plane
    double cx = 0, cy = 0, width = 0;        // bump (0 = centered defaults)
    bool have_center = false;
    double radius = 0;                       // cap

    std::string bc_mode = "preset";          // preset | zero | trace
    std::string task = "flow";               // flow | newton | flow_then_newton

    FlowConfig flow;
    NewtonConfig newton;
    bool apriori = true;
    std::string outdir;
};

namespace detail {

inline std::string trim(const std::string& s) {
    size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

inline int levenshtein(const std::string& a, const std::string& b) {
    std::vector<int> prev(b.size() + 1), cur(b.size() + 1);
    for (size_t j = 0; j <= b.size(); ++j) prev[j] = static_cast<int>(j);
    for (size_t i = 1; i <= a.size(); ++i) {
        cur[0] = static_cast<int>(i);
        for (size_t j = 1; j <= b.size(); ++j)
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1,
                               prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

inline const std::vector<std::string>& known_keys() {
    static const std::vector<std::string> k = {
        "scenario.name", "grid.nx", "grid.ny", "grid.x0", "grid.x1", "grid.y0", "grid.y1",
        "ic.preset", "ic.amplitude", "ic.a", "ic.b", "ic.cx", "ic.cy", "ic.width", "ic.radius",
        "bc.mode", "run.task",
        "flow.scheme", "flow.dt_policy", "flow.dt", "flow.cfl_c", "flow.t_end",
        "flow.max_steps", "flow.stationary_tol", "flow.diag_every", "flow.snapshot_every",
        "flow.blowup_sup", "flow.check_compat", "flow.cc_tol",
        "newton.tol", "newton.max_iters",
        "analysis.apriori", "output.dir"};
    return k;
}

inline std::string nearest_key(const std::string& key) {
    int best = 1 << 20;
    std::string who;
    for (const std::string& k : known_keys()) {
        const int d = levenshtein(key, k);
        if (d < best) {
            best = d;
            who = k;
        }
    }
    return who;
}

struct KvDoc {
    std::map<std::string, std::pair<std::string, int>> kv; // key -> (value, line)

    bool has(const std::string& k) const { return kv.count(k) != 0; }

    std::string str(const std::string& k, const std::string& dflt) const {
        auto it = kv.find(k);
        return it == kv.end() ? dflt : it->second.first;
    }
    std::string require(const std::string& k) const {
        auto it = kv.find(k);
        if (it == kv.end()) throw ConfigError("missing required key '" + k + "'");
        return it->second.first;
    }
    double num(const std::string& k, double dflt) const {
        auto it = kv.find(k);
        if (it == kv.end()) return dflt;
        return parse_num(it->second.first, k, it->second.second);
    }
    double parse_num(const std::string& v, const std::string& k, int line) const {
        try {
            size_t pos = 0;
            const double x = std::stod(v, &pos);
            if (pos != v.size()) throw std::invalid_argument("trailing");
            return x;
        } catch (const std::exception&) {
            throw ConfigError("line " + std::to_string(line) + ": key '" + k +
                              "' needs a number, got '" + v + "'");
        }
    }
    long integer(const std::string& k, long dflt) const {
        auto it = kv.find(k);
        if (it == kv.end()) return dflt;
        const double x = parse_num(it->second.first, k, it->second.second);
        const long n = static_cast<long>(x);
        if (static_cast<double>(n) != x)
            throw ConfigError("line " + std::to_string(it->second.second) + ": key '" + k +
                              "' needs an integer, got '" + it->second.first + "'");
        return n;
    }
    bool flag(const std::string& k, bool dflt) const {
        auto it = kv.find(k);
        if (it == kv.end()) return dflt;
        const std::string& v = it->second.first;
        if (v == "on" || v == "true" || v == "1") return true;
        if (v == "off" || v == "false" || v == "0") return false;
        throw ConfigError("line " + std::to_string(it->second.second) + ": key '" + k +
                          "' needs on/off, got '" + v + "'");
    }
};

inline KvDoc parse_kv(const std::string& text) {
    KvDoc doc;
    const std::set<std::string> known(known_keys().begin(), known_keys().end());
    int line = 0;
    size_t pos = 0;
    while (pos <= text.size()) {
        const size_t nl = text.find('\n', pos);
        std::string raw = text.substr(pos, nl == std::string::npos ? std::string::npos : nl - pos);
        pos = nl == std::string::npos ? text.size() + 1 : nl + 1;
        ++line;
        const size_t hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        const std::string s = trim(raw);
        if (s.empty()) continue;
        const size_t eq = s.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line) + ": expected 'key = value', got '" +
                              s + "'");
        const std::string key = trim(s.substr(0, eq));
        const std::string val = trim(s.substr(eq + 1));
        if (!known.count(key))
            throw ConfigError("line " + std::to_string(line) + ": unknown key '" + key +
                              "' (did you mean '" + nearest_key(key) + "'?)");
        if (doc.kv.count(key))
            throw ConfigError("line " + std::to_string(line) + ": duplicate key '" + key + "'");
        if (val.empty())
            throw ConfigError("line " + std::to_string(line) + ": key '" + key +
                              "' has an empty value");
        doc.kv[key] = {val, line};
    }
    return doc;
}

} // namespace detail

inline Scenario parse_config(const std::string& text) {
    const detail::KvDoc doc = detail::parse_kv(text);
    Scenario s;
    s.name = doc.str("scenario.name", "scenario");
    s.nx = static_cast<int>(doc.integer("grid.nx", 0));
    s.ny = static_cast<int>(doc.integer("grid.ny", 0));
    if (!doc.has("grid.nx") || !doc.has("grid.ny"))
        throw ConfigError("missing required key 'grid.nx' / 'grid.ny'");
    s.x0 = doc.num("grid.x0", 0);
    s.x1 = doc.num("grid.x1", 1);
    s.y0 = doc.num("grid.y0", 0);
    s.y1 = doc.num("grid.y1", 1);

    s.ic_preset = doc.require("ic.preset");
    static const std::set<std::string> presets = {"zero", "plane", "bump", "tent", "cap"};
    if (!presets.count(s.ic_preset))
        throw ConfigError("ic.preset '" + s.ic_preset + "' is not one of zero/plane/bump/tent/cap");
    s.amplitude = doc.num("ic.amplitude", 0.01);
    s.plane_a = doc.num("ic.a", 0);
    s.plane_b = doc.num("ic.b", 0);
    s.have_center = doc.has("ic.cx") || doc.has("ic.cy") || doc.has("ic.width");
    s.cx = doc.num("ic.cx", 0.5 * (s.x0 + s.x1));
    s.cy = doc.num("ic.cy", 0.5 * (s.y0 + s.y1));
    s.width = doc.num("ic.width", 0.4 * std::min(s.x1 - s.x0, s.y1 - s.y0));
    if (s.ic_preset == "cap") s.radius = doc.num("ic.radius", 0);
    if (s.ic_preset == "cap" && !doc.has("ic.radius"))
        throw ConfigError("missing required key 'ic.radius' (cap preset)");

    s.bc_mode = doc.str("bc.mode", "preset");
    if (s.bc_mode != "preset" && s.bc_mode != "zero" && s.bc_mode != "trace")
        throw ConfigError("bc.mode '" + s.bc_mode + "' is not one of preset/zero/trace");
    s.task = doc.str("run.task", "flow");
    if (s.task != "flow" && s.task != "newton" && s.task != "flow_then_newton")
        throw ConfigError("run.task '" + s.task + "' is not one of flow/newton/flow_then_newton");

    const std::string scheme = doc.str("flow.scheme", "explicit");
    if (scheme == "explicit")
        s.flow.scheme = Scheme::Explicit;
    else if (scheme == "frozen")
        s.flow.scheme = Scheme::Frozen;
    else
        throw ConfigError("flow.scheme '" + scheme + "' is not one of explicit/frozen");
    const std::string dtp = doc.str("flow.dt_policy", doc.has("flow.dt") ? "fixed" : "cfl");
    if (dtp == "cfl")
        s.flow.dt_policy = DtPolicy::Cfl;
    else if (dtp == "fixed")
        s.flow.dt_policy = DtPolicy::Fixed;
    else
        throw ConfigError("flow.dt_policy '" + dtp + "' is not one of cfl/fixed");
    s.flow.dt = doc.num("flow.dt", s.flow.dt);
    s.flow.cfl_c = doc.num("flow.cfl_c", s.flow.cfl_c);
    if (s.task != "newton") s.flow.t_end = doc.num("flow.t_end", -1);
    else s.flow.t_end = doc.num("flow.t_end", 1);
    if (s.task != "newton" && !(s.flow.t_end > 0))
        throw ConfigError("missing required key 'flow.t_end' (must be positive)");
    s.flow.max_steps = doc.integer("flow.max_steps", s.flow.max_steps);
    s.flow.stationary_tol = doc.num("flow.stationary_tol", s.flow.stationary_tol);
    s.flow.diag_every = doc.integer("flow.diag_every", s.flow.diag_every);
    s.flow.snapshot_every = doc.integer("flow.snapshot_every", s.flow.snapshot_every);
    s.flow.blowup_sup = doc.num("flow.blowup_sup", s.flow.blowup_sup);
    s.flow.require_compat = doc.flag("flow.check_compat", s.flow.require_compat);
    s.flow.cc_tol = doc.num("flow.cc_tol", s.flow.cc_tol);

    s.newton.tol = doc.num("newton.tol", s.newton.tol);
    s.newton.max_iters = static_cast<int>(doc.integer("newton.max_iters", s.newton.max_iters));

    s.apriori = doc.flag("analysis.apriori", true);
    s.outdir = doc.str("output.dir", "out/" + s.name);
    return s;
}

inline GridDomain scenario_grid(const Scenario& s) {
    return make_grid(s.x0, s.x1, s.y0, s.y1, s.nx, s.ny);
}

inline Preset scenario_preset(const Scenario& s, const GridDomain& d) {
    Preset p;
    if (s.ic_preset == "zero")
        p = preset_zero(d);
    else if (s.ic_preset == "plane")
        p = preset_plane(d, s.plane_a, s.plane_b);
    else if (s.ic_preset == "bump")
        p = s.have_center ? preset_bump(d, s.amplitude, s.cx, s.cy, s.width)
                          : preset_bump(d, s.amplitude);
    else if (s.ic_preset == "tent")
        p = preset_tent(d, s.amplitude);
    else
        p = preset_cap(d, s.radius);
    if (s.bc_mode == "zero")
        p.bc = BoundaryData::zero(d);
    else if (s.bc_mode == "trace")
        p.bc = BoundaryData::from_field(p.u0);
    return p;
}

// Validate everything that can be checked without running: grid, preset
// parameters, flow config invariants.
inline void check_scenario(const Scenario& s) {
    const GridDomain d = scenario_grid(s);
    (void)scenario_preset(s, d);
    if (s.task != "newton") {
        if (s.flow.dt_policy == DtPolicy::Fixed && !(s.flow.dt > 0))
            throw ConfigError("fixed dt policy needs flow.dt > 0");
        if (s.flow.dt_policy == DtPolicy::Cfl &&
            !(s.flow.cfl_c > 0 && s.flow.cfl_c <= 1))
            throw ConfigError("flow.cfl_c must lie in (0, 1]");
    }
}

struct RunReport {
    std::string stop_reason;
    double t_final = 0;
    long steps = 0;
    int apriori_violations = 0;
    bool newton_converged = false;
    nlohmann::ordered_json json;
};

namespace detail {

inline std::string stop_name(StopReason r) {
    switch (r) {
        case StopReason::ReachedTEnd: return "t_end";
        case StopReason::Stationary: return "stationary";
        default: return "max_steps";
    }
}

// The a-priori inequality evaluated from a diagnostics row plus the constant
// boundary quantities; mirrors apriori_bound applied to the field itself.
inline bool apriori_row_ok(const DiagRecord& r, double phi_w11, double dom_area,
                           double perimeter) {
    const double pi = 3.14159265358979323846;
    const double lhs = r.sup_u + r.area;
    const double rhs = 64.0 * (dom_area + perimeter + phi_w11 + (256.0 / (pi * pi)) * r.W) *
                       (1.0 + dom_area * r.W);
    return lhs <= rhs * (1 + 1e-12);
}

} // namespace detail

inline RunReport run_scenario(const Scenario& s) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(s.outdir, ec);
    if (ec) throw IoError("cannot create output directory '" + s.outdir + "': " + ec.message());

    const GridDomain d = scenario_grid(s);
    const Preset p = scenario_preset(s, d);
    RunReport rep;
    nlohmann::ordered_json& J = rep.json;
    J["name"] = s.name;
    J["task"] = s.task;
    J["grid"] = {{"nx", s.nx}, {"ny", s.ny}, {"h", d.h}};
    J["preset"] = s.ic_preset;

    const double phi_w11 = boundary_l1(p.bc, d) + boundary_total_variation(p.bc, d);

    if (s.task == "flow" || s.task == "flow_then_newton") {
        Trajectory traj;
        try {
            traj = run_flow(p.u0, p.bc, s.flow);
        } catch (FlowBlowUp& bu) {
            // partial diagnostics still land on disk before the error escapes
            std::vector<std::vector<double>> rows;
            for (const DiagRecord& r : bu.diag)
                rows.push_back({r.t, r.W, r.sup_u, r.sup_grad_u, r.l2_u, r.area, r.dWdt,
                                r.dissipation_rhs, r.dt});
            write_csv(s.outdir + "/diag.csv",
                      "t,W,sup_u,sup_grad_u,l2_u,area,dWdt,dissipation_rhs,dt", rows);
            save_field(s.outdir + "/last.wgf1", bu.last.u);
            throw;
        }
        std::vector<std::vector<double>> rows;
        rep.apriori_violations = 0;
        for (const DiagRecord& r : traj.diag) {
            rows.push_back({r.t, r.W, r.sup_u, r.sup_grad_u, r.l2_u, r.area, r.dWdt,
                            r.dissipation_rhs, r.dt});
            if (s.apriori && !detail::apriori_row_ok(r, phi_w11, d.area(), d.perimeter()))
                ++rep.apriori_violations;
        }
        write_csv(s.outdir + "/diag.csv",
                  "t,W,sup_u,sup_grad_u,l2_u,area,dWdt,dissipation_rhs,dt", rows);
        save_field(s.outdir + "/final.wgf1", traj.final_state);
        for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "snap_%06zu.wgf1", k);
            save_field(s.outdir + "/" + buf, traj.snapshots[k]);
        }
        rep.stop_reason = detail::stop_name(traj.reason);
        rep.t_final = traj.t_final;
        rep.steps = traj.steps;
        J["flow"] = {{"stop_reason", rep.stop_reason},
                     {"t_final", traj.t_final},
                     {"steps", traj.steps},
                     {"snapshots", traj.snapshots.size()},
                     {"W_initial", traj.diag.front().W},
                     {"W_final", traj.diag.back().W},
                     {"sup_u_final", traj.diag.back().sup_u}};
        if (!traj.compat_note.empty()) J["flow"]["compat_note"] = traj.compat_note;
        if (s.apriori) {
            J["apriori"] = {{"enabled", true},
                            {"rows", rows.size()},
                            {"violations", rep.apriori_violations}};
        }
        if (s.task == "flow_then_newton") {
            NewtonResult nr = newton_stationary(traj.final_state, p.bc, s.newton);
            std::vector<std::vector<double>> nrows;
            for (const NewtonIter& it : nr.history)
                nrows.push_back({static_cast<double>(it.iter), it.res_inf, it.step_fraction});
            write_csv(s.outdir + "/newton.csv", "iter,res_inf,step_fraction", nrows);
            save_field(s.outdir + "/newton.wgf1", nr.u);
            rep.newton_converged = nr.converged;
            double gap = 0;
            for (int j = 0; j <= d.ny + 1; ++j)
                for (int i = 0; i <= d.nx + 1; ++i)
                    gap = std::max(gap, std::abs(nr.u.at(i, j) - traj.final_state.at(i, j)));
            J["newton"] = {{"converged", nr.converged},
                           {"iterations", nr.iterations},
                           {"res_inf", nr.history.back().res_inf},
                           {"gap_to_flow", gap}};
        }
    } else { // newton only
        NewtonResult nr = newton_stationary(p.u0, p.bc, s.newton);
        std::vector<std::vector<double>> nrows;
        for (const NewtonIter& it : nr.history)
            nrows.push_back({static_cast<double>(it.iter), it.res_inf, it.step_fraction});
        write_csv(s.outdir + "/newton.csv", "iter,res_inf,step_fraction", nrows);
        save_field(s.outdir + "/newton.wgf1", nr.u);
        rep.newton_converged = nr.converged;
        rep.stop_reason = "newton";
        J["newton"] = {{"converged", nr.converged},
                       {"iterations", nr.iterations},
                       {"res_inf", nr.history.back().res_inf}};
    }

    std::ofstream jf(s.outdir + "/report.json", std::ios::trunc);
    if (!jf) throw IoError("cannot write " + s.outdir + "/report.json");
    jf << J.dump(2) << "\n";
    if (!jf) throw IoError("short write to " + s.outdir + "/report.json");
    return rep;
}

} // namespace wgf
