#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "curveflow/curve.hpp"
#include "curveflow/error.hpp"
#include "curveflow/expr.hpp"
#include "curveflow/frenet.hpp"

namespace curveflow {

enum class FlowMode {
    Explicit,      // all n speeds given
    Inextensible,  // f2..fn given, f1 solved from df1/ds = eps0 eps1 f2 k1
};

inline const char* to_string(FlowMode m) noexcept {
    return m == FlowMode::Explicit ? "explicit" : "inextensible";
}

/// d(alpha)/dt = sum_i f_i V_i with each f_i an expression in (s, t).
struct FlowSpec {
    FlowMode mode = FlowMode::Explicit;
    std::string name;
    std::vector<Expr> speeds;  // f1..fn (Explicit) or f2..fn (Inextensible)
    double f1_at_0 = 0.0;

    static FlowSpec explicit_flow(std::vector<Expr> f, std::string name = {}) {
        return {FlowMode::Explicit, std::move(name), std::move(f), 0.0};
    }
    static FlowSpec inextensible(std::vector<Expr> f2_to_fn, double f1_at_0, std::string name = {}) {
        return {FlowMode::Inextensible, std::move(name), std::move(f2_to_fn), f1_at_0};
    }

    void validate(std::size_t n) const {
        const std::size_t want = mode == FlowMode::Explicit ? n : n - 1;
        if (speeds.size() != want)
            throw InvalidArgument(std::string(to_string(mode)) + " flow in dimension " +
                                  std::to_string(n) + " needs " + std::to_string(want) +
                                  " speed expressions, got " + std::to_string(speeds.size()));
        const unsigned allowed = VarSet::of({Var::S, Var::T}).bits;
        for (const auto& e : speeds)
            if (e.free_variables().bits & ~allowed)
                throw InvalidArgument("flow speeds may only depend on s and t");
        if (!std::isfinite(f1_at_0)) throw InvalidArgument("f1_at_0 must be finite");
    }
};

inline constexpr double kCompatibilityTolerance = 1e-6;

/// f1 on the grid from df1/ds = eps0 eps1 f2 k1, integrated in arclength from
/// f1(u0) = f1_at_0. Closed curves must satisfy the loop condition first.
inline std::vector<double> solve_inextensible_f1(const SampledCurve& c, const FrenetData& fd,
                                                 std::span<const double> f2, double f1_at_0) {
    if (f2.size() != c.size()) throw DimensionMismatch(c.size(), f2.size());
    const double sign = fd.eps(0) * fd.eps(1);
    std::vector<double> integrand(c.size());
    for (std::size_t i = 0; i < c.size(); ++i)
        integrand[i] = sign * f2[i] * fd.gs_curvatures[0][i] * c.speeds()[i];
    auto integral = c.integrate(integrand);
    if (c.closed() && std::abs(integral.total) > kCompatibilityTolerance * c.total_length())
        throw IncompatibleClosedFlow(integral.total);
    for (double& v : integral.at_nodes) v += f1_at_0;
    return std::move(integral.at_nodes);
}

/// f_i at every sample, rows i = 0..n-1.
inline std::vector<std::vector<double>> evaluate_speeds(const SampledCurve& c, const FrenetData& fd,
                                                        const FlowSpec& flow, double t) {
    const std::size_t n = c.dim();
    flow.validate(n);
    std::vector<std::vector<double>> f(n, std::vector<double>(c.size(), 0.0));
    const std::size_t first = flow.mode == FlowMode::Explicit ? 0 : 1;
    Bindings env;
    env.set(Var::T, t);
    for (std::size_t j = 0; j < c.size(); ++j) {
        env.set(Var::S, c.arclengths()[j]);
        for (std::size_t i = first; i < n; ++i) f[i][j] = eval(flow.speeds[i - first], env);
    }
    if (flow.mode == FlowMode::Inextensible) f[0] = solve_inextensible_f1(c, fd, f[1], flow.f1_at_0);
    return f;
}

struct SimState {
    double t = 0.0;
    SampledCurve curve;
    FrenetData frenet;
    std::vector<std::vector<double>> f;

    const std::vector<double>& speed_values(std::size_t i) const { return f[i - 1]; }

    /// sum_i f_i V_i at every sample.
    std::vector<MinkVector> velocity() const {
        const std::size_t n = curve.dim();
        std::vector<MinkVector> w(curve.size(), MinkVector(n));
        for (std::size_t j = 0; j < curve.size(); ++j)
            for (std::size_t i = 1; i <= n; ++i) w[j].axpy(f[i - 1][j], frenet.V(i, j));
        return w;
    }
};

inline SimState make_state(SampledCurve curve, const FlowSpec& flow, double t) {
    FrenetData fd = frenet_apparatus(curve);
    auto f = evaluate_speeds(curve, fd, flow, t);
    return SimState{t, std::move(curve), std::move(fd), std::move(f)};
}

/// dv/dt per sample: df1/du - eps0 eps1 f2 v k1, from v^2 = eps0 <X_u, X_u>.
/// Equals eps0 times the form below, so the two differ only on timelike
/// curves and share their zero set.
inline std::vector<double> dv_dt_rhs(const SimState& st, std::size_t accuracy = 2) {
    const auto& c = st.curve;
    const auto& fd = st.frenet;
    const auto df1 = c.du(accuracy).apply(std::span<const double>(st.f[0]));
    std::vector<double> out(c.size());
    for (std::size_t j = 0; j < c.size(); ++j)
        out[j] = df1[j] - fd.eps(0) * fd.eps(1) * st.f[1][j] * c.speeds()[j] * fd.gs_curvatures[0][j];
    return out;
}

/// eps0 df1/du - eps1 f2 v k1, the form obtained when v^2 is taken as
/// <X_u, X_u> without the sign.
inline std::vector<double> dv_dt_rhs_unsigned(const SimState& st, std::size_t accuracy = 2) {
    auto out = dv_dt_rhs(st, accuracy);
    for (double& x : out) x *= st.frenet.eps(0);
    return out;
}

struct StepDiagnostics {
    std::size_t step = 0;
    double t = 0.0;
    double total_length = 0.0;
    double drift = 0.0;  // |L(t) - L(0)|
    double min_v = 0.0;
    double max_v = 0.0;
    std::vector<double> max_abs_k;  // max |k_i|, i = 1..n-1
};

struct Breakdown {
    enum class Kind { NullCurveDeveloped, NonGeneric, Stability, IncompatibleClosedFlow, Domain };
    Kind kind;
    double t;
    std::string message;

    [[noreturn]] void rethrow() const {
        switch (kind) {
        case Kind::NullCurveDeveloped: throw NullCurveDeveloped(t);
        case Kind::Stability: throw StabilityError(t, message);
        default: throw Error(message, ErrorClass::Numerical);
        }
    }
};

inline const char* to_string(Breakdown::Kind k) noexcept {
    switch (k) {
    case Breakdown::Kind::NullCurveDeveloped: return "NullCurveDeveloped";
    case Breakdown::Kind::NonGeneric: return "NonGenericCurve";
    case Breakdown::Kind::Stability: return "StabilityError";
    case Breakdown::Kind::IncompatibleClosedFlow: return "IncompatibleClosedFlow";
    case Breakdown::Kind::Domain: return "DomainError";
    }
    return "?";
}

/// States are kept every `record_every` steps, so consecutive states are
/// `sample_interval()` apart. Diagnostics cover every step.
struct Trajectory {
    FlowSpec flow;
    double dt = 0.0;
    std::size_t record_every = 1;
    std::vector<SimState> states;
    std::vector<StepDiagnostics> diagnostics;
    std::optional<Breakdown> breakdown;

    double sample_interval() const noexcept { return dt * static_cast<double>(record_every); }
    bool ok() const noexcept { return !breakdown; }
};

struct EvolveOptions {
    std::size_t record_every = 1;
    std::optional<double> horizon;    // stop before t reaches this value
    double max_length_change = 0.5;   // per step, relative
};

inline StepDiagnostics diagnose(const SimState& st, std::size_t step, double initial_length) {
    StepDiagnostics d;
    d.step = step;
    d.t = st.t;
    d.total_length = st.curve.total_length();
    d.drift = std::abs(d.total_length - initial_length);
    const auto& v = st.curve.speeds();
    d.min_v = *std::min_element(v.begin(), v.end());
    d.max_v = *std::max_element(v.begin(), v.end());
    for (const auto& row : st.frenet.gs_curvatures) {
        double m = 0.0;
        for (double k : row) m = std::max(m, std::abs(k));
        d.max_abs_k.push_back(m);
    }
    return d;
}

/// 0.1 * (smallest arclength spacing) / max(1, max |f_i|).
inline double default_dt(const SimState& st) {
    const auto& c = st.curve;
    double ds_min = c.h() * *std::min_element(c.speeds().begin(), c.speeds().end());
    double fmax = 1.0;
    for (const auto& row : st.f)
        for (double x : row) fmax = std::max(fmax, std::abs(x));
    return 0.1 * ds_min / fmax;
}

namespace detail {

template <class F>
std::optional<Breakdown> guarded(double t, F&& fn) {
    try {
        fn();
        return std::nullopt;
    } catch (const NullCurve& e) {
        return Breakdown{Breakdown::Kind::NullCurveDeveloped, t, e.what()};
    } catch (const MixedCausality& e) {
        return Breakdown{Breakdown::Kind::NullCurveDeveloped, t, e.what()};
    } catch (const DegenerateCurve& e) {
        return Breakdown{Breakdown::Kind::Stability, t, e.what()};
    } catch (const NonGenericCurve& e) {
        return Breakdown{Breakdown::Kind::NonGeneric, t, e.what()};
    } catch (const IncompatibleClosedFlow& e) {
        return Breakdown{Breakdown::Kind::IncompatibleClosedFlow, t, e.what()};
    } catch (const DomainError& e) {
        return Breakdown{Breakdown::Kind::Domain, t, e.what()};
    }
}

} // namespace detail

/// Classical RK4 on the sample points with the frame and speeds rebuilt at
/// every stage. The curve is re-sampled from its points at t0 so that all
/// states share finite-difference derivatives.
inline Trajectory evolve(const SimState& initial, const FlowSpec& flow, double dt, std::size_t steps,
                         const EvolveOptions& opts = {}) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("dt must be positive");
    if (steps < 1) throw InvalidArgument("steps must be >= 1");
    if (opts.record_every < 1) throw InvalidArgument("record_every must be >= 1");
    flow.validate(initial.curve.dim());

    Trajectory traj;
    traj.flow = flow;
    traj.dt = dt;
    traj.record_every = opts.record_every;

    const auto& c0 = initial.curve;
    const double u0 = c0.u0(), u1 = c0.u1();
    const Topology topo = c0.topology();
    const double t0 = initial.t;

    auto build = [&](std::vector<MinkVector> pts, double t) {
        return make_state(sample_points(std::move(pts), u0, u1, topo), flow, t);
    };

    std::optional<SimState> current;
    if (auto b = detail::guarded(t0, [&] { current = build(c0.points(), t0); })) {
        traj.breakdown = b;
        return traj;
    }
    const double length0 = current->curve.total_length();
    traj.diagnostics.push_back(diagnose(*current, 0, length0));
    traj.states.push_back(*current);

    const std::size_t count = c0.size();
    auto advance = [&](const std::vector<MinkVector>& base, const std::vector<MinkVector>& k,
                       double a) {
        std::vector<MinkVector> p = base;
        for (std::size_t j = 0; j < count; ++j) p[j].axpy(a, k[j]);
        return p;
    };

    for (std::size_t step = 1; step <= steps; ++step) {
        const double t_prev = current->t;
        const double t_next = t0 + dt * static_cast<double>(step);
        if (opts.horizon && t_next >= *opts.horizon) break;

        const auto& p0 = current->curve.points();
        std::optional<SimState> next;
        auto b = detail::guarded(t_prev, [&] {
            const auto k1 = current->velocity();
            const auto s2 = build(advance(p0, k1, 0.5 * dt), t_prev + 0.5 * dt);
            const auto k2 = s2.velocity();
            const auto s3 = build(advance(p0, k2, 0.5 * dt), t_prev + 0.5 * dt);
            const auto k3 = s3.velocity();
            const auto s4 = build(advance(p0, k3, dt), t_next);
            const auto k4 = s4.velocity();
            std::vector<MinkVector> p = p0;
            for (std::size_t j = 0; j < count; ++j) {
                MinkVector incr = k1[j];
                incr.axpy(2.0, k2[j]);
                incr.axpy(2.0, k3[j]);
                incr += k4[j];
                p[j].axpy(dt / 6.0, incr);
                if (!p[j].is_finite()) throw DegenerateCurve(j);
            }
            next = build(std::move(p), t_next);
        });
        if (b) {
            if (b->kind == Breakdown::Kind::Stability)
                b->message = "non-finite or collapsed curve: " + b->message;
            traj.breakdown = b;
            return traj;
        }
        const double l_prev = current->curve.total_length();
        const double l_next = next->curve.total_length();
        if (std::abs(l_next - l_prev) > opts.max_length_change * l_prev) {
            traj.breakdown = Breakdown{Breakdown::Kind::Stability, t_next,
                                       "total arclength changed by more than " +
                                           std::to_string(opts.max_length_change * 100.0) +
                                           "% in one step"};
            return traj;
        }
        current = std::move(next);
        traj.diagnostics.push_back(diagnose(*current, step, length0));
        if (step % opts.record_every == 0) traj.states.push_back(*current);
    }
    return traj;
}

/// max_t |L(t) - L(0)| over every step of the trajectory.
inline double arclength_drift(const Trajectory& traj) {
    if (traj.diagnostics.empty()) throw InsufficientStates(0, 1);
    double m = 0.0;
    for (const auto& d : traj.diagnostics) m = std::max(m, d.drift);
    return m;
}

} // namespace curveflow
