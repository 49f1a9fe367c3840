#pragma once

#include <cmath>
#include <cstddef>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "curveflow/curve.hpp"
#include "curveflow/error.hpp"
#include "curveflow/expr.hpp"
#include "curveflow/flow.hpp"
#include "curveflow/verify.hpp"

namespace curveflow {

struct IntegratorSettings {
    std::optional<double> dt;  // default_dt() when absent
    std::size_t steps = 1;
    std::optional<double> t_horizon;
    std::size_t record_every = 1;
};

struct OutputSettings {
    std::string directory = "out";
    bool timeseries = true;
    bool report = true;
    std::vector<std::size_t> frame_steps;
};

struct Scenario {
    std::string name;
    std::string description;
    CurveSpec curve;
    FlowSpec flow;
    IntegratorSettings integrator;
    std::vector<std::string> checks;
    Tolerances tolerances;
    OutputSettings output;
};

namespace detail {

using json = nlohmann::json;

inline void only_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw ConfigError(where + ": expected an object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || it.key() == a;
        if (!ok) throw ConfigError(where + "." + it.key() + ": unknown field");
    }
}

inline const json& need(const json& obj, const std::string& where, const char* key) {
    if (!obj.contains(key)) throw ConfigError(where + "." + key + ": missing required field");
    return obj.at(key);
}

// A number, or a string holding a constant expression such as "2*pi".
inline double constant(const json& v, const std::string& where) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        try {
            return eval(parse(v.get<std::string>(), VarSet{}), Bindings{});
        } catch (const Error& e) {
            throw ConfigError(where + ": " + e.what());
        }
    }
    throw ConfigError(where + ": expected a number or constant expression");
}

inline std::size_t count(const json& v, const std::string& where, std::size_t min) {
    if (!v.is_number_integer() || v.get<long long>() < static_cast<long long>(min))
        throw ConfigError(where + ": expected an integer >= " + std::to_string(min));
    return static_cast<std::size_t>(v.get<long long>());
}

inline std::vector<Expr> expressions(const json& v, const std::string& where, VarSet allowed) {
    if (!v.is_array()) throw ConfigError(where + ": expected an array of expressions");
    std::vector<Expr> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const std::string at = where + "[" + std::to_string(i) + "]";
        if (!v[i].is_string() && !v[i].is_number()) throw ConfigError(at + ": expected an expression string");
        const std::string text = v[i].is_string() ? v[i].get<std::string>() : v[i].dump();
        try {
            out.push_back(parse(text, allowed));
        } catch (const Error& e) {
            throw ConfigError(at + ": " + e.what());
        }
    }
    return out;
}

} // namespace detail

inline Scenario parse_scenario(const nlohmann::json& doc) {
    using detail::json;
    detail::only_keys(doc, "scenario",
                      {"name", "description", "dimension", "curve", "flow", "integrator", "checks", "tolerances",
                       "output"});
    Scenario sc;
    if (doc.contains("name")) sc.name = doc.at("name").get<std::string>();
    if (doc.contains("description")) sc.description = doc.at("description").get<std::string>();

    const json& cj = detail::need(doc, "scenario", "curve");
    detail::only_keys(cj, "curve", {"components", "u0", "u1", "topology", "samples"});
    sc.curve.components = detail::expressions(detail::need(cj, "curve", "components"), "curve.components",
                                              VarSet::of({Var::U}));
    sc.curve.dimension = sc.curve.components.size();
    sc.curve.u0 = detail::constant(detail::need(cj, "curve", "u0"), "curve.u0");
    sc.curve.u1 = detail::constant(detail::need(cj, "curve", "u1"), "curve.u1");
    const std::string topo = cj.value("topology", "open");
    if (topo != "open" && topo != "closed") throw ConfigError("curve.topology: expected \"open\" or \"closed\"");
    sc.curve.topology = topo == "closed" ? Topology::Closed : Topology::Open;
    if (cj.contains("samples")) sc.curve.samples = detail::count(cj.at("samples"), "curve.samples", kMinSamples);
    if (doc.contains("dimension")) {
        const std::size_t n = detail::count(doc.at("dimension"), "dimension", kMinDimension);
        if (n != sc.curve.dimension)
            throw ConfigError("dimension: " + std::to_string(n) + " does not match the " +
                              std::to_string(sc.curve.dimension) + " curve components");
    }
    try {
        sc.curve.validate();
    } catch (const Error& e) {
        throw ConfigError(std::string("curve: ") + e.what());
    }

    const json& fj = detail::need(doc, "scenario", "flow");
    detail::only_keys(fj, "flow", {"mode", "name", "speeds", "f1_at_0"});
    const std::string mode = fj.value("mode", "explicit");
    if (mode != "explicit" && mode != "inextensible")
        throw ConfigError("flow.mode: expected \"explicit\" or \"inextensible\"");
    auto speeds = detail::expressions(detail::need(fj, "flow", "speeds"), "flow.speeds", VarSet::of({Var::S, Var::T}));
    const double f10 = fj.contains("f1_at_0") ? detail::constant(fj.at("f1_at_0"), "flow.f1_at_0") : 0.0;
    const std::string fname = fj.value("name", "");
    sc.flow = mode == "explicit" ? FlowSpec::explicit_flow(std::move(speeds), fname)
                                 : FlowSpec::inextensible(std::move(speeds), f10, fname);
    try {
        sc.flow.validate(sc.curve.dimension);
    } catch (const Error& e) {
        throw ConfigError(std::string("flow.speeds: ") + e.what());
    }

    const json& ij = detail::need(doc, "scenario", "integrator");
    detail::only_keys(ij, "integrator", {"dt", "steps", "t_horizon", "record_every"});
    if (ij.contains("dt") && !ij.at("dt").is_null()) {
        const double dt = detail::constant(ij.at("dt"), "integrator.dt");
        if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("integrator.dt: must be positive");
        sc.integrator.dt = dt;
    }
    sc.integrator.steps = detail::count(detail::need(ij, "integrator", "steps"), "integrator.steps", 1);
    if (ij.contains("t_horizon") && !ij.at("t_horizon").is_null())
        sc.integrator.t_horizon = detail::constant(ij.at("t_horizon"), "integrator.t_horizon");
    if (ij.contains("record_every"))
        sc.integrator.record_every = detail::count(ij.at("record_every"), "integrator.record_every", 1);

    if (doc.contains("checks")) {
        const json& ch = doc.at("checks");
        if (!ch.is_array()) throw ConfigError("checks: expected an array of identity names");
        std::set<std::string> seen;
        for (std::size_t i = 0; i < ch.size(); ++i) {
            const std::string at = "checks[" + std::to_string(i) + "]";
            if (!ch[i].is_string()) throw ConfigError(at + ": expected a string");
            const std::string id = ch[i].get<std::string>();
            bool known = false;
            for (const auto& k : identity_names()) known = known || k == id;
            if (!known) throw ConfigError(at + ": unknown identity '" + id + "'");
            if (seen.insert(id).second) sc.checks.push_back(id);
        }
    }

    if (doc.contains("tolerances")) {
        const json& tj = doc.at("tolerances");
        detail::only_keys(tj, "tolerances",
                          {"speed_evolution", "iff_a", "iff_b", "frame_evolution", "psi", "curvature_pde",
                           "orthonormality", "frenet_residual", "inextensibility"});
        auto set = [&](const char* key, double& slot) {
            if (!tj.contains(key)) return;
            const double v = detail::constant(tj.at(key), std::string("tolerances.") + key);
            if (!(v > 0.0)) throw ConfigError(std::string("tolerances.") + key + ": must be positive");
            slot = v;
        };
        auto& t = sc.tolerances;
        set("speed_evolution", t.speed_evolution);
        set("iff_a", t.iff_a);
        set("iff_b", t.iff_b);
        set("frame_evolution", t.frame_evolution);
        set("psi", t.psi);
        set("curvature_pde", t.curvature_pde);
        set("orthonormality", t.orthonormality);
        set("frenet_residual", t.frenet_residual);
        set("inextensibility", t.inextensibility);
    }

    if (doc.contains("output")) {
        const json& oj = doc.at("output");
        detail::only_keys(oj, "output", {"directory", "formats", "frame_steps"});
        if (oj.contains("directory")) sc.output.directory = oj.at("directory").get<std::string>();
        if (oj.contains("formats")) {
            const json& fm = oj.at("formats");
            if (!fm.is_array()) throw ConfigError("output.formats: expected an array");
            sc.output.timeseries = sc.output.report = false;
            for (std::size_t i = 0; i < fm.size(); ++i) {
                const std::string f = fm[i].is_string() ? fm[i].get<std::string>() : "";
                if (f == "csv") sc.output.timeseries = true;
                else if (f == "report") sc.output.report = true;
                else if (f != "frames")
                    throw ConfigError("output.formats[" + std::to_string(i) + "]: expected \"csv\", \"frames\" or \"report\"");
            }
        }
        if (oj.contains("frame_steps")) {
            const json& fs = oj.at("frame_steps");
            if (!fs.is_array()) throw ConfigError("output.frame_steps: expected an array of step indices");
            for (std::size_t i = 0; i < fs.size(); ++i) {
                const std::string at = "output.frame_steps[" + std::to_string(i) + "]";
                const std::size_t step = detail::count(fs[i], at, 0);
                if (step > sc.integrator.steps) throw ConfigError(at + ": beyond integrator.steps");
                if (step % sc.integrator.record_every != 0)
                    throw ConfigError(at + ": not a multiple of integrator.record_every");
                sc.output.frame_steps.push_back(step);
            }
        }
    }
    return sc;
}

inline Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open scenario file");
    std::stringstream buf;
    buf << in.rdbuf();
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(buf.str());
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
    try {
        return parse_scenario(doc);
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

} // namespace curveflow
