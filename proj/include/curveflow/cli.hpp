#pragma once

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "curveflow/catalog.hpp"
#include "curveflow/flow.hpp"
#include "curveflow/frenet.hpp"
#include "curveflow/scenario.hpp"
#include "curveflow/verify.hpp"

namespace curveflow::cli {

enum ExitCode { kPass = 0, kCheckFailed = 1, kUsage = 2, kNumerical = 3 };

using json = nlohmann::json;

inline int exit_code_for(const Error& e) {
    return e.error_class() == ErrorClass::Numerical ? kNumerical : kUsage;
}

/// Writes through a temporary file in the same directory, then renames.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
    static std::atomic<unsigned> counter{0};
    const auto tmp = path.parent_path() /
                     (path.filename().string() + ".tmp" + std::to_string(std::hash<std::thread::id>{}(
                                                              std::this_thread::get_id()) % 100000) +
                      "." + std::to_string(counter++));
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ConfigError("cannot write " + tmp.string());
        out << content;
        if (!out.flush()) throw ConfigError("cannot write " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

inline std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15e", x);
    return buf;
}

inline json number_or_na(const std::optional<double>& x) {
    return x ? json(*x) : json("n/a");
}

inline json to_json(const VerificationReport& r) {
    json j;
    j["identity"] = r.identity;
    j["resolutions"] = json::array();
    for (const auto& res : r.resolutions) j["resolutions"].push_back({{"samples", res.samples}, {"dt", res.dt}});
    j["residuals"] = r.residuals;
    j["order"] = number_or_na(r.order);
    j["pair_orders"] = json::array();
    for (const auto& o : r.pair_orders) j["pair_orders"].push_back(number_or_na(o));
    j["tolerance"] = r.tolerance;
    j["pass"] = r.pass;
    j["components"] = json::object();
    for (const auto& [k, v] : r.components) j["components"][k] = v;
    if (!r.note.empty()) j["note"] = r.note;
    return j;
}

inline json failed_check(const std::string& identity, const Resolution& res, double tol, const std::string& error) {
    return {{"identity", identity},
            {"resolutions", json::array({{{"samples", res.samples}, {"dt", res.dt}}})},
            {"residuals", json::array()},
            {"order", "n/a"},
            {"pair_orders", json::array()},
            {"tolerance", tol},
            {"pass", false},
            {"components", json::object()},
            {"error", error}};
}

inline json describe(const Scenario& sc, const SampledCurve& c) {
    json flow = {{"mode", to_string(sc.flow.mode)}, {"name", sc.flow.name}, {"speeds", json::array()}};
    for (const auto& e : sc.flow.speeds) flow["speeds"].push_back(print(e));
    if (sc.flow.mode == FlowMode::Inextensible) flow["f1_at_0"] = sc.flow.f1_at_0;
    json comps = json::array();
    for (const auto& e : sc.curve.components) comps.push_back(print(e));
    return {{"scenario", sc.name},
            {"curve",
             {{"dimension", sc.curve.dimension},
              {"components", comps},
              {"u0", sc.curve.u0},
              {"u1", sc.curve.u1},
              {"topology", to_string(sc.curve.topology)},
              {"samples", sc.curve.samples},
              {"quadrature", to_string(c.quadrature())},
              {"character", to_string(c.character())}}},
            {"flow", flow}};
}

inline json frame_dump(const SimState& st, std::size_t step) {
    const auto& c = st.curve;
    const auto& fd = st.frenet;
    const std::size_t n = c.dim();
    auto vec = [](const MinkVector& v) {
        json a = json::array();
        for (double x : v.components()) a.push_back(x);
        return a;
    };
    json j;
    j["step"] = step;
    j["t"] = st.t;
    j["dimension"] = n;
    j["samples"] = c.size();
    j["topology"] = to_string(c.topology());
    j["signs"] = fd.signs;
    std::vector<double> u(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) u[i] = c.u(i);
    j["u"] = u;
    j["points"] = json::array();
    for (const auto& p : c.points()) j["points"].push_back(vec(p));
    j["speed"] = c.speeds();
    j["arclength"] = c.arclengths();
    j["frame"] = json::object();
    for (std::size_t i = 1; i <= n; ++i) {
        json col = json::array();
        for (const auto& v : fd.V(i)) col.push_back(vec(v));
        j["frame"]["V" + std::to_string(i)] = col;
    }
    j["curvatures"] = json::object();
    j["curvatures_stencil"] = json::object();
    for (std::size_t i = 1; i < n; ++i) {
        j["curvatures"]["k" + std::to_string(i)] = fd.gs_curvatures[i - 1];
        j["curvatures_stencil"]["k" + std::to_string(i)] = fd.k(i);
    }
    j["speeds_f"] = json::object();
    for (std::size_t i = 1; i <= st.f.size(); ++i) j["speeds_f"]["f" + std::to_string(i)] = st.f[i - 1];
    return j;
}

inline std::string timeseries_csv(const Trajectory& traj) {
    std::string out = "step,t,total_arclength,arclength_drift,min_v,max_v,max_k1\n";
    for (const auto& d : traj.diagnostics) {
        out += std::to_string(d.step) + "," + fmt(d.t) + "," + fmt(d.total_length) + "," + fmt(d.drift) + "," +
               fmt(d.min_v) + "," + fmt(d.max_v) + "," + fmt(d.max_abs_k.empty() ? 0.0 : d.max_abs_k[0]) + "\n";
    }
    return out;
}

/// Evolution plus the requested checks at one resolution.
struct RunResult {
    SampledCurve initial;
    Trajectory trajectory;
    std::vector<json> reports;
    std::vector<VerificationReport> measured;  // parallel to reports; empty identity on error
    double dt = 0.0;
};

inline void require_states_for_checks(const Scenario& sc) {
    if (sc.checks.empty()) return;
    bool needs_three = false;
    for (const auto& id : sc.checks) needs_three = needs_three || (id != "orthonormality" && id != "frenet_residual");
    const std::size_t states = sc.integrator.steps / sc.integrator.record_every + 1;
    if (needs_three && states < 3)
        throw ConfigError("integrator: checks need at least 3 recorded states, steps / record_every gives " +
                          std::to_string(states));
}

inline RunResult simulate(const Scenario& sc, std::optional<double> dt_override = std::nullopt) {
    SampledCurve c = sample(sc.curve);
    SimState init = make_state(c, sc.flow, 0.0);
    const double dt = dt_override ? *dt_override : sc.integrator.dt ? *sc.integrator.dt : default_dt(init);
    EvolveOptions opts;
    opts.record_every = sc.integrator.record_every;
    opts.horizon = sc.integrator.t_horizon;
    Trajectory traj = evolve(init, sc.flow, dt, sc.integrator.steps, opts);
    RunResult r{std::move(c), std::move(traj), {}, {}, dt};
    for (const auto& id : sc.checks) {
        try {
            auto rep = run_check(id, r.trajectory, sc.tolerances);
            r.reports.push_back(to_json(rep));
            r.measured.push_back(std::move(rep));
        } catch (const Error& e) {
            double tol = 0.0;
            Tolerances t = sc.tolerances;
            if (id == "speed_evolution") tol = t.speed_evolution;
            else if (id == "iff_condition") tol = t.iff_a;
            else if (id == "frame_evolution") tol = t.frame_evolution;
            else if (id == "psi_matrix") tol = t.psi;
            else if (id == "curvature_pde") tol = t.curvature_pde;
            else if (id == "orthonormality") tol = t.orthonormality;
            else tol = t.frenet_residual;
            r.reports.push_back(failed_check(id, {sc.curve.samples, r.trajectory.sample_interval()}, tol, e.what()));
            r.measured.emplace_back();
        }
    }
    return r;
}

inline json breakdown_json(const Trajectory& traj) {
    if (!traj.breakdown) return nullptr;
    return {{"kind", to_string(traj.breakdown->kind)}, {"t", traj.breakdown->t}, {"message", traj.breakdown->message}};
}

inline std::filesystem::path prepare_out(const Scenario& sc, const std::optional<std::string>& out) {
    std::filesystem::path dir = out ? *out : sc.output.directory;
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory " + dir.string() + ": " + ec.message());
    return dir;
}

inline int run(const std::string& path, const std::optional<std::string>& out, std::ostream& log) {
    try {
        const Scenario sc = load_scenario(path);
        require_states_for_checks(sc);
        const auto dir = prepare_out(sc, out);
        RunResult r = simulate(sc);
        const Trajectory& traj = r.trajectory;

        if (sc.output.timeseries) write_atomic(dir / "timeseries.csv", timeseries_csv(traj));
        for (std::size_t step : sc.output.frame_steps) {
            const std::size_t idx = step / sc.integrator.record_every;
            if (idx >= traj.states.size()) continue;  // trajectory stopped early
            write_atomic(dir / ("frames_" + std::to_string(step) + ".json"),
                         frame_dump(traj.states[idx], step).dump(1) + "\n");
        }

        bool all_pass = true;
        for (const auto& rep : r.reports) all_pass = all_pass && rep.at("pass").get<bool>();
        if (sc.output.report) {
            json doc = describe(sc, r.initial);
            doc["integrator"] = {{"dt", r.dt},
                                 {"steps", sc.integrator.steps},
                                 {"steps_taken", traj.diagnostics.empty() ? 0 : traj.diagnostics.back().step},
                                 {"record_every", sc.integrator.record_every},
                                 {"t_final", traj.diagnostics.empty() ? 0.0 : traj.diagnostics.back().t}};
            doc["summary"] = {{"initial_length", traj.diagnostics.empty() ? 0.0 : traj.diagnostics.front().total_length},
                              {"final_length", traj.diagnostics.empty() ? 0.0 : traj.diagnostics.back().total_length},
                              {"arclength_drift", traj.diagnostics.empty() ? 0.0 : arclength_drift(traj)}};
            doc["breakdown"] = breakdown_json(traj);
            doc["reports"] = r.reports;
            doc["pass"] = all_pass && !traj.breakdown;
            write_atomic(dir / "report.json", doc.dump(1) + "\n");
        }

        log << sc.name << ": " << traj.diagnostics.size() - 1 << " steps, dt " << r.dt << ", drift "
            << (traj.diagnostics.empty() ? 0.0 : arclength_drift(traj)) << "\n";
        for (const auto& rep : r.reports) {
            log << "  " << rep.at("identity").get<std::string>() << ": ";
            if (rep.contains("error")) log << "error: " << rep.at("error").get<std::string>();
            else log << "residual " << rep.at("residuals").back().get<double>() << " (tol " << rep.at("tolerance").get<double>() << ")";
            log << (rep.at("pass").get<bool>() ? " pass" : " FAIL") << "\n";
        }
        if (traj.breakdown) {
            log << "breakdown: " << traj.breakdown->message << " at t = " << traj.breakdown->t << "\n";
            return kNumerical;
        }
        return all_pass ? kPass : kCheckFailed;
    } catch (const Error& e) {
        log << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::filesystem::filesystem_error& e) {
        log << "error: " << e.what() << "\n";
        return kUsage;
    }
}

inline std::size_t thread_cap() {
    std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("CURVEFLOW_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
    }
    return hw;
}

/// Reruns the scenario at (N, dt), (2N, dt/2), ... with the step count held,
/// so later levels cover a shorter time span.
inline int convergence(const std::string& path, int levels, const std::optional<std::string>& out,
                       std::ostream& log) {
    try {
        if (levels < 2) throw InvalidArgument("--levels must be at least 2");
        const Scenario base = load_scenario(path);
        if (base.checks.empty()) throw ConfigError(path + ": checks: convergence needs at least one identity");
        require_states_for_checks(base);
        const auto dir = prepare_out(base, out);

        double dt0 = 0.0;
        if (base.integrator.dt) dt0 = *base.integrator.dt;
        else dt0 = default_dt(make_state(sample(base.curve), base.flow, 0.0));

        const std::size_t L = static_cast<std::size_t>(levels);
        std::vector<std::optional<RunResult>> results(L);
        std::vector<std::string> errors(L);
        std::vector<int> codes(L, kPass);
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (std::size_t l; (l = next++) < L;) {
                Scenario sc = base;
                sc.curve.samples = base.curve.samples << l;
                sc.integrator.t_horizon.reset();
                try {
                    results[l] = simulate(sc, dt0 / static_cast<double>(1u << l));
                } catch (const Error& e) {
                    errors[l] = e.what();
                    codes[l] = exit_code_for(e);
                }
            }
        };
        std::vector<std::thread> pool;
        const std::size_t nthreads = std::min(thread_cap(), L);
        for (std::size_t i = 0; i < nthreads; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();

        for (std::size_t l = 0; l < L; ++l)
            if (!errors[l].empty()) {
                log << "error at level " << l << ": " << errors[l] << "\n";
                return codes[l];
            }
        for (std::size_t l = 0; l < L; ++l)
            if (results[l]->trajectory.breakdown) {
                log << "breakdown at level " << l << ": " << results[l]->trajectory.breakdown->message << "\n";
                return kNumerical;
            }

        std::string csv = "identity,level,samples,dt,residual,order\n";
        json reports = json::array();
        bool all_pass = true;
        for (std::size_t c = 0; c < base.checks.size(); ++c) {
            const std::string& id = base.checks[c];
            std::vector<VerificationReport> per;
            std::string error;
            for (std::size_t l = 0; l < L; ++l) {
                const auto& m = results[l]->measured[c];
                if (m.identity.empty()) error = results[l]->reports[c].at("error").get<std::string>();
                else per.push_back(m);
            }
            if (!error.empty()) {
                all_pass = false;
                reports.push_back(failed_check(id, {base.curve.samples, dt0}, 0.0, error));
                for (std::size_t l = 0; l < L; ++l)
                    csv += id + "," + std::to_string(l) + "," + std::to_string(base.curve.samples << l) + "," +
                           fmt(dt0 / static_cast<double>(1u << l)) + ",,n/a\n";
                csv += id + ",fit,,,,n/a\n";
                log << "  " << id << ": error: " << error << "\n";
                continue;
            }
            const auto rep = combine(per);
            all_pass = all_pass && rep.pass;
            reports.push_back(to_json(rep));
            for (std::size_t l = 0; l < L; ++l) {
                std::string order;
                if (l > 0) order = rep.pair_orders[l - 1] ? fmt(*rep.pair_orders[l - 1]) : "n/a";
                csv += id + "," + std::to_string(l) + "," + std::to_string(rep.resolutions[l].samples) + "," +
                       fmt(rep.resolutions[l].dt) + "," + fmt(rep.residuals[l]) + "," + order + "\n";
            }
            csv += id + ",fit,,,," + (rep.order ? fmt(*rep.order) : std::string("n/a")) + "\n";
            log << "  " << id << ": finest residual " << rep.finest() << ", order "
                << (rep.order ? std::to_string(*rep.order) : std::string("n/a")) << (rep.pass ? " pass" : " FAIL")
                << "\n";
        }
        write_atomic(dir / "convergence.csv", csv);
        json doc = describe(base, results[0]->initial);
        doc["levels"] = L;
        doc["reports"] = reports;
        doc["pass"] = all_pass;
        write_atomic(dir / "report.json", doc.dump(1) + "\n");
        return all_pass ? kPass : kCheckFailed;
    } catch (const Error& e) {
        log << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::filesystem::filesystem_error& e) {
        log << "error: " << e.what() << "\n";
        return kUsage;
    }
}

/// Frenet apparatus of the scenario's curve from jet derivatives.
inline int frenet(const std::string& path, const std::optional<std::string>& out, std::ostream& log) {
    try {
        const Scenario sc = load_scenario(path);
        const auto dir = prepare_out(sc, out);
        SampledCurve c = sample(sc.curve);
        FrenetData fd = frenet_apparatus(c);
        auto f = evaluate_speeds(c, fd, sc.flow, 0.0);
        SimState st{0.0, c, fd, std::move(f)};
        write_atomic(dir / "frames_0.json", frame_dump(st, 0).dump(1) + "\n");
        const auto rep = check_frenet(c, fd, sc.tolerances);
        json doc = describe(sc, c);
        doc["reports"] = json::array({to_json(rep)});
        doc["pass"] = rep.pass;
        write_atomic(dir / "report.json", doc.dump(1) + "\n");
        log << sc.name << ": signs";
        for (int s : fd.signs) log << " " << (s < 0 ? '-' : '+');
        log << ", frenet residual " << rep.finest() << (rep.pass ? " pass" : " FAIL") << "\n";
        return rep.pass ? kPass : kCheckFailed;
    } catch (const Error& e) {
        log << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::filesystem::filesystem_error& e) {
        log << "error: " << e.what() << "\n";
        return kUsage;
    }
}

inline int list_catalog(std::ostream& out) {
    out << "curves:\n";
    for (const auto& c : catalog_curves()) {
        out << "  " << c.name << "  (";
        for (std::size_t i = 0; i < c.components.size(); ++i) out << (i ? ", " : "") << c.components[i];
        out << ")  u in [" << c.u0 << ", " << c.u1 << "] " << to_string(c.topology) << "  - " << c.description
            << "\n";
    }
    out << "flows:\n";
    for (const auto& f : catalog_flows()) {
        out << "  " << f.name << "  " << to_string(f.mode) << " (";
        for (std::size_t i = 0; i < f.speeds.size(); ++i) out << (i ? ", " : "") << f.speeds[i];
        out << ") on " << f.curve << "  - " << f.description << "\n";
    }
    return kPass;
}

} // namespace curveflow::cli
