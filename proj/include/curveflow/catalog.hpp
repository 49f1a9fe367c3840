#pragma once

#include <string>
#include <vector>

#include "curveflow/curve.hpp"
#include "curveflow/error.hpp"
#include "curveflow/flow.hpp"

namespace curveflow {

struct CatalogCurve {
    std::string name;
    std::string description;
    std::vector<std::string> components;
    double u0;
    double u1;
    Topology topology;

    CurveSpec spec(std::size_t samples) const {
        CurveSpec s;
        s.dimension = components.size();
        for (const auto& c : components) s.components.push_back(parse(c, VarSet::of({Var::U})));
        s.u0 = u0;
        s.u1 = u1;
        s.topology = topology;
        s.samples = samples;
        return s;
    }
};

struct CatalogFlow {
    std::string name;
    std::string curve;  // catalog curve it is meant for
    std::string description;
    FlowMode mode;
    std::vector<std::string> speeds;
    double f1_at_0 = 0.0;

    FlowSpec spec() const {
        std::vector<Expr> e;
        for (const auto& s : speeds) e.push_back(parse(s, VarSet::of({Var::S, Var::T})));
        return mode == FlowMode::Explicit ? FlowSpec::explicit_flow(std::move(e), name)
                                          : FlowSpec::inextensible(std::move(e), f1_at_0, name);
    }
};

inline constexpr double kTwoPi = 6.283185307179586;

inline const std::vector<CatalogCurve>& catalog_curves() {
    static const std::vector<CatalogCurve> curves = {
        {"circle", "unit circle in a spacelike plane of E_1^3", {"0", "cos(u)", "sin(u)"}, 0.0, kTwoPi,
         Topology::Closed},
        {"hyperbola", "unit timelike hyperbola in E_1^2", {"sinh(u)", "cosh(u)"}, -1.0, 1.0, Topology::Open},
        {"timelike_helix", "timelike helix, k1 = 1, k2 = sqrt 2", {"sqrt(2)*u", "cos(u)", "sin(u)"}, 0.0, kTwoPi,
         Topology::Open},
        {"spacelike_helix", "spacelike helix with timelike binormal", {"u/2", "cos(u)", "sin(u)"}, 0.0, kTwoPi,
         Topology::Open},
        {"line", "spacelike straight line in E_1^2", {"0", "u"}, 0.0, 1.0, Topology::Open},
        {"parabola", "spacelike parabola in E_1^3, non-constant speed", {"0", "u", "u^2/2"}, -1.0, 1.0,
         Topology::Open},
        {"timelike_parabola", "timelike parabola in E_1^2, non-constant speed", {"u^2/2 + 2*u", "u"}, 0.0, 1.0,
         Topology::Open},
    };
    return curves;
}

inline const std::vector<CatalogFlow>& catalog_flows() {
    static const std::vector<CatalogFlow> flows = {
        {"rigid_rotation", "circle", "rotation about (0,1,0) at unit rate", FlowMode::Explicit,
         {"1 - cos(s)", "sin(s)", "0"}},
        {"normal_shrink", "circle", "unit normal speed, circle radius 1 - t", FlowMode::Explicit, {"0", "1", "0"}},
        {"circle_inextensible", "circle", "f2 = sin s, f1 from the inextensibility condition",
         FlowMode::Inextensible, {"sin(s)", "0"}},
        {"helix_inextensible", "timelike_helix", "f2 = sin s, f3 = cos s, f1 synthesized",
         FlowMode::Inextensible, {"sin(s)", "cos(s)"}},
        {"spacelike_helix_inextensible", "spacelike_helix", "f2 = sin s, f3 = cos s, f1 synthesized",
         FlowMode::Inextensible, {"sin(s)", "cos(s)"}},
        {"zero", "circle", "no motion", FlowMode::Explicit, {"0", "0", "0"}},
        {"line_translation", "line", "unit tangential speed", FlowMode::Explicit, {"1", "0"}},
    };
    return flows;
}

inline const CatalogCurve& catalog_curve(const std::string& name) {
    for (const auto& c : catalog_curves())
        if (c.name == name) return c;
    throw ConfigError("unknown catalog curve '" + name + "'");
}

inline const CatalogFlow& catalog_flow(const std::string& name) {
    for (const auto& f : catalog_flows())
        if (f.name == name) return f;
    throw ConfigError("unknown catalog flow '" + name + "'");
}

} // namespace curveflow
