#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "curveflow/error.hpp"
#include "curveflow/flow.hpp"
#include "curveflow/frenet.hpp"

namespace curveflow {

// Residuals at or below this fraction of a check's tolerance count as
// roundoff; no order is fitted through them.
inline constexpr double kResidualFloorRatio = 1e-6;
// Nodes skipped at each end of an open curve, where one-sided stencils live.
inline constexpr std::size_t kBoundaryMargin = 4;

struct Tolerances {
    double speed_evolution = 1e-3;
    double iff_a = 1e-3;
    double iff_b = 1e-3;
    double frame_evolution = 1e-3;
    double psi = 1e-5;
    double curvature_pde = 5e-3;
    double orthonormality = 1e-6;
    double frenet_residual = 1e-3;
    double inextensibility = 1e-3;  // precondition of the frame and curvature checks
};

struct Resolution {
    std::size_t samples = 0;
    double dt = 0.0;
};

/// One identity measured at one or more (N, dt) levels. `residuals` holds the
/// headline residual per level; `components` holds named sub-measurements.
struct VerificationReport {
    std::string identity;
    std::vector<Resolution> resolutions;
    std::vector<double> residuals;
    std::vector<std::pair<std::string, std::vector<double>>> components;
    std::optional<double> order;              // least-squares fit; empty = n/a
    std::vector<std::optional<double>> pair_orders;
    double tolerance = 0.0;
    bool pass = false;
    std::string note;

    double finest() const { return residuals.back(); }

    void add(const std::string& name, double value) {
        for (auto& [k, v] : components)
            if (k == name) {
                v.push_back(value);
                return;
            }
        components.emplace_back(name, std::vector<double>{value});
    }
    const std::vector<double>* component(const std::string& name) const {
        for (const auto& [k, v] : components)
            if (k == name) return &v;
        return nullptr;
    }
};

/// Orders between successive levels (refinement factor 2) and their
/// least-squares fit. n/a when any residual sits at the floor.
inline void fit_orders(VerificationReport& r) {
    r.pair_orders.clear();
    r.order.reset();
    const std::size_t m = r.residuals.size();
    bool floor = false;
    for (double x : r.residuals) floor = floor || !(x > kResidualFloorRatio * r.tolerance);
    for (std::size_t i = 0; i + 1 < m; ++i) {
        if (floor) r.pair_orders.emplace_back();
        else r.pair_orders.emplace_back(std::log2(r.residuals[i] / r.residuals[i + 1]));
    }
    if (floor || m < 2) return;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < m; ++i) {
        const double x = static_cast<double>(i), y = std::log2(r.residuals[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double md = static_cast<double>(m);
    r.order = -(md * sxy - sx * sy) / (md * sxx - sx * sx);
}

/// Merges single-level reports for the same identity, coarse to fine.
inline VerificationReport combine(const std::vector<VerificationReport>& levels) {
    if (levels.empty()) throw InvalidArgument("no levels to combine");
    VerificationReport out;
    out.identity = levels.front().identity;
    out.tolerance = levels.front().tolerance;
    out.note = levels.back().note;
    for (const auto& l : levels) {
        if (l.identity != out.identity) throw InvalidArgument("mixed identities in convergence table");
        out.resolutions.insert(out.resolutions.end(), l.resolutions.begin(), l.resolutions.end());
        out.residuals.insert(out.residuals.end(), l.residuals.begin(), l.residuals.end());
        for (const auto& [k, v] : l.components)
            for (double x : v) out.add(k, x);
    }
    out.pass = levels.back().pass;
    fit_orders(out);
    return out;
}

namespace detail {

inline int sign_at(const FrenetData& fd, long i) {
    return i >= 0 && i < static_cast<long>(fd.dim) ? fd.eps(static_cast<std::size_t>(i)) : 1;
}

inline std::pair<std::size_t, std::size_t> interior(const SampledCurve& c) {
    if (c.closed()) return {0, c.size()};
    return {kBoundaryMargin, c.size() - kBoundaryMargin};
}

inline void require_states(const Trajectory& traj, std::size_t need) {
    if (traj.states.size() < need) throw InsufficientStates(traj.states.size(), need);
}

inline VerificationReport single(const std::string& identity, const Trajectory& traj, double tol) {
    VerificationReport r;
    r.identity = identity;
    r.tolerance = tol;
    const std::size_t n = traj.states.empty() ? 0 : traj.states.front().curve.size();
    r.resolutions.push_back({n, traj.sample_interval()});
    return r;
}

inline void finish(VerificationReport& r, double residual) {
    r.residuals.push_back(residual);
    r.pass = residual <= r.tolerance;
}

// Frame of `other` with each vector's sign flipped where it disagrees with
// `ref`, so that frames can be differenced across time steps.
inline std::vector<std::vector<MinkVector>> aligned(const FrenetData& ref, const FrenetData& other) {
    auto out = other.frame;
    for (std::size_t i = 0; i < ref.dim; ++i)
        for (std::size_t s = 0; s < ref.size(); ++s)
            if (ref.eps(i) * inner(ref.frame[i][s], other.frame[i][s]) < 0.0) out[i][s] *= -1.0;
    return out;
}

// Central time difference of every frame vector at state m.
inline std::vector<std::vector<MinkVector>> frame_rate(const Trajectory& traj, std::size_t m) {
    const auto& mid = traj.states[m].frenet;
    const auto prev = aligned(mid, traj.states[m - 1].frenet);
    const auto next = aligned(mid, traj.states[m + 1].frenet);
    const double inv = 1.0 / (2.0 * traj.sample_interval());
    auto out = next;
    for (std::size_t i = 0; i < mid.dim; ++i)
        for (std::size_t s = 0; s < mid.size(); ++s) {
            out[i][s] -= prev[i][s];
            out[i][s] *= inv;
        }
    return out;
}

// max |df1/ds - eps0 eps1 f2 k1| over interior samples, d/ds 4th order.
inline double inextensibility_violation(const SimState& st) {
    const auto& c = st.curve;
    const auto& fd = st.frenet;
    const auto df1 = d_ds(st.f[0], c, 4);
    const auto [lo, hi] = interior(c);
    double m = 0.0;
    for (std::size_t j = lo; j < hi; ++j)
        m = std::max(m, std::abs(df1[j] - fd.eps(0) * fd.eps(1) * st.f[1][j] * fd.gs_curvatures[0][j]));
    return m;
}

inline double max_violation(const Trajectory& traj) {
    double m = 0.0;
    for (const auto& st : traj.states) m = std::max(m, inextensibility_violation(st));
    return m;
}

inline void require_inextensible(const Trajectory& traj, double tol) {
    const double v = max_violation(traj);
    if (v > tol) throw NotInextensible(v);
}

} // namespace detail

/// Psi_kj = <dV_j/dt, V_k> at one interior state; psi[k-1][j-1][sample].
struct PsiMatrix {
    std::size_t dim = 0;
    std::vector<std::vector<std::vector<double>>> psi;
    double antisymmetry = 0.0;  // max |Psi_kj + Psi_jk|, k != j
    double diagonal = 0.0;      // max |Psi_jj|

    /// Out-of-range indices read as zero.
    double at(long k, long j, std::size_t s) const {
        if (k < 1 || j < 1 || k > static_cast<long>(dim) || j > static_cast<long>(dim)) return 0.0;
        return psi[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(j - 1)][s];
    }
    std::vector<double> row(long k, long j, std::size_t count) const {
        std::vector<double> out(count, 0.0);
        for (std::size_t s = 0; s < count; ++s) out[s] = at(k, j, s);
        return out;
    }
};

inline PsiMatrix psi_matrix(const Trajectory& traj, std::size_t at_step) {
    detail::require_states(traj, 3);
    if (at_step == 0 || at_step + 1 >= traj.states.size())
        throw InsufficientStates(traj.states.size(), at_step + 2);
    const auto& st = traj.states[at_step];
    const auto& fd = st.frenet;
    const std::size_t n = fd.dim;
    const auto rate = detail::frame_rate(traj, at_step);
    PsiMatrix p;
    p.dim = n;
    p.psi.assign(n, std::vector<std::vector<double>>(n, std::vector<double>(fd.size(), 0.0)));
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t s = 0; s < fd.size(); ++s) p.psi[k][j][s] = inner(rate[j][s], fd.frame[k][s]);
    const auto [lo, hi] = detail::interior(st.curve);
    for (std::size_t s = lo; s < hi; ++s)
        for (std::size_t k = 0; k < n; ++k) {
            p.diagonal = std::max(p.diagonal, std::abs(p.psi[k][k][s]));
            for (std::size_t j = k + 1; j < n; ++j)
                p.antisymmetry = std::max(p.antisymmetry, std::abs(p.psi[k][j][s] + p.psi[j][k][s]));
        }
    return p;
}

/// FD_t(v) against dv_dt_rhs; the unsigned form is reported alongside.
inline VerificationReport check_speed_evolution(const Trajectory& traj, const Tolerances& tol = {}) {
    detail::require_states(traj, 3);
    auto r = detail::single("speed_evolution", traj, tol.speed_evolution);
    const double inv = 1.0 / (2.0 * traj.sample_interval());
    double worst = 0.0, worst_unsigned = 0.0, lhs_max = 0.0;
    for (std::size_t m = 1; m + 1 < traj.states.size(); ++m) {
        const auto& st = traj.states[m];
        const auto rhs = dv_dt_rhs(st);
        const double e0 = st.frenet.eps(0);
        const auto& vp = traj.states[m + 1].curve.speeds();
        const auto& vm = traj.states[m - 1].curve.speeds();
        const auto [lo, hi] = detail::interior(st.curve);
        for (std::size_t j = lo; j < hi; ++j) {
            const double lhs = (vp[j] - vm[j]) * inv;
            lhs_max = std::max(lhs_max, std::abs(lhs));
            worst = std::max(worst, std::abs(lhs - rhs[j]));
            worst_unsigned = std::max(worst_unsigned, std::abs(lhs - e0 * rhs[j]));
        }
    }
    r.add("rhs_unsigned", worst_unsigned);
    r.add("max_abs_dv_dt", lhs_max);
    detail::finish(r, worst);
    return r;
}

/// (a) pointwise inextensibility violation, (b) total arclength drift; passes
/// when both are small or both are large.
inline VerificationReport check_iff_condition(const Trajectory& traj, const Tolerances& tol = {}) {
    detail::require_states(traj, 2);
    auto r = detail::single("iff_condition", traj, tol.iff_a);
    const double a = detail::max_violation(traj);
    const double b = arclength_drift(traj);
    double local = 0.0;
    const auto& v0 = traj.states.front().curve.speeds();
    const auto [lo, hi] = detail::interior(traj.states.front().curve);
    for (const auto& st : traj.states)
        for (std::size_t j = lo; j < hi; ++j) local = std::max(local, std::abs(st.curve.speeds()[j] - v0[j]));
    r.add("a_condition", a);
    r.add("b_drift", b);
    r.add("b_local_speed_drift", local);
    const bool a_small = a <= tol.iff_a;
    const bool b_small = b <= tol.iff_b;
    r.residuals.push_back(a);
    r.pass = a_small == b_small;
    r.note = std::string("condition ") + (a_small ? "holds" : "violated") + ", arclength " +
             (b_small ? "preserved" : "changed") + (r.pass ? "; equivalence upheld" : "; equivalence broken");
    return r;
}

/// dV/dt from trajectory differences against the frame-evolution formulas,
/// plus the Psi reconstruction of the normal components in two readings:
/// coefficients eps_{k-1} Psi_kj and bare Psi_kj.
inline VerificationReport check_frame_evolution(const Trajectory& traj, const Tolerances& tol = {}) {
    detail::require_states(traj, 3);
    detail::require_inextensible(traj, tol.inextensibility);
    auto r = detail::single("frame_evolution", traj, tol.frame_evolution);
    double r1 = 0, r2 = 0, r3 = 0, rec_eps = 0, rec_bare = 0, anti = 0, diag = 0;
    for (std::size_t m = 1; m + 1 < traj.states.size(); ++m) {
        const auto& st = traj.states[m];
        const auto& c = st.curve;
        const auto& fd = st.frenet;
        const std::size_t n = fd.dim;
        const auto rate = detail::frame_rate(traj, m);
        std::vector<std::vector<double>> df(n);
        for (std::size_t i = 0; i < n; ++i) df[i] = d_ds(st.f[i], c);
        auto f = [&](std::size_t i, std::size_t s) { return i >= 1 && i <= n ? st.f[i - 1][s] : 0.0; };
        auto k = [&](std::size_t i, std::size_t s) { return i >= 1 && i < n ? fd.gs_curvatures[i - 1][s] : 0.0; };
        const auto [lo, hi] = detail::interior(c);
        for (std::size_t s = lo; s < hi; ++s) {
            // c_i = f_{i-1} k_{i-1} + f_i' - eps_{i-1} eps_i f_{i+1} k_i
            std::vector<double> coef(n + 1, 0.0);
            for (std::size_t i = 2; i <= n; ++i)
                coef[i] = f(i - 1, s) * k(i - 1, s) + df[i - 1][s] -
                          detail::sign_at(fd, static_cast<long>(i) - 1) * detail::sign_at(fd, static_cast<long>(i)) *
                              f(i + 1, s) * k(i, s);
            MinkVector e1 = rate[0][s];
            for (std::size_t i = 2; i <= n; ++i) e1.axpy(-coef[i], fd.V(i, s));
            r1 = std::max(r1, euclidean_norm(e1));
            for (std::size_t j = 2; j <= n; ++j) {
                const MinkVector& dv = rate[j - 1][s];
                const double predicted = -fd.eps(0) * fd.eps(j - 1) * coef[j];
                const double measured = fd.eps(0) * inner(dv, fd.V(1, s));
                (j < n ? r2 : r3) = std::max(j < n ? r2 : r3, std::abs(measured - predicted));
                MinkVector with_eps = predicted * fd.V(1, s);
                MinkVector bare = with_eps;
                for (std::size_t kk = 2; kk <= n; ++kk) {
                    if (kk == j) continue;
                    const double psi = inner(dv, fd.V(kk, s));
                    with_eps.axpy(fd.eps(kk - 1) * psi, fd.V(kk, s));
                    bare.axpy(psi, fd.V(kk, s));
                }
                rec_eps = std::max(rec_eps, euclidean_norm(dv - with_eps));
                rec_bare = std::max(rec_bare, euclidean_norm(dv - bare));
            }
        }
        const auto p = psi_matrix(traj, m);
        anti = std::max(anti, p.antisymmetry);
        diag = std::max(diag, p.diagonal);
    }
    r.add("v1", r1);
    r.add("v1_component_interior", r2);
    r.add("v1_component_last", r3);
    r.add("reconstruction_eps", rec_eps);
    r.add("reconstruction_bare", rec_bare);
    r.add("psi_antisymmetry", anti);
    r.add("psi_diagonal", diag);
    detail::finish(r, std::max({r1, r2, r3}));
    return r;
}

/// Psi antisymmetry and zero diagonal over every interior state.
inline VerificationReport check_psi(const Trajectory& traj, const Tolerances& tol = {}) {
    detail::require_states(traj, 3);
    auto r = detail::single("psi_matrix", traj, tol.psi);
    double anti = 0, diag = 0;
    for (std::size_t m = 1; m + 1 < traj.states.size(); ++m) {
        const auto p = psi_matrix(traj, m);
        anti = std::max(anti, p.antisymmetry);
        diag = std::max(diag, p.diagonal);
    }
    r.add("antisymmetry", anti);
    r.add("diagonal", diag);
    detail::finish(r, std::max(anti, diag));
    return r;
}

/// FD_t(k_i) against the curvature evolution system. Each equation is
/// measured in its rederived form ("derived") and in an alternative form with
/// sign factors dropped ("alt"); the headline residual is the worst derived one.
inline VerificationReport check_curvature_pde(const Trajectory& traj, const Tolerances& tol = {}) {
    detail::require_states(traj, 3);
    detail::require_inextensible(traj, tol.inextensibility);
    auto r = detail::single("curvature_pde", traj, tol.curvature_pde);
    const std::size_t n = traj.states.front().curve.dim();
    const double inv = 1.0 / (2.0 * traj.sample_interval());

    std::vector<std::pair<std::string, double>> worst;
    auto bump = [&](const std::string& name, double v) {
        for (auto& [k, x] : worst)
            if (k == name) {
                x = std::max(x, v);
                return;
            }
        worst.emplace_back(name, v);
    };

    for (std::size_t m = 1; m + 1 < traj.states.size(); ++m) {
        const auto& st = traj.states[m];
        const auto& c = st.curve;
        const auto& fd = st.frenet;
        const std::size_t count = c.size();
        const auto p = psi_matrix(traj, m);

        auto e = [&](long i) { return static_cast<double>(detail::sign_at(fd, i)); };
        auto kv = [&](long i, std::size_t s) {
            return i >= 1 && i < static_cast<long>(n) ? fd.gs_curvatures[static_cast<std::size_t>(i - 1)][s] : 0.0;
        };
        auto fv = [&](long i, std::size_t s) {
            return i >= 1 && i <= static_cast<long>(n) ? st.f[static_cast<std::size_t>(i - 1)][s] : 0.0;
        };
        auto grid = [&](auto&& g) {
            std::vector<double> out(count);
            for (std::size_t s = 0; s < count; ++s) out[s] = g(s);
            return out;
        };
        auto ds = [&](const std::vector<double>& g) { return d_ds(g, c); };

        const auto k1 = grid([&](std::size_t s) { return kv(1, s); });
        const auto k2 = grid([&](std::size_t s) { return kv(2, s); });
        const auto f2 = grid([&](std::size_t s) { return fv(2, s); });
        const auto f3 = grid([&](std::size_t s) { return fv(3, s); });
        const auto dk1 = ds(k1), dk2 = ds(k2), df3 = ds(f3);
        const auto ddf2 = ds(ds(f2));

        std::vector<std::vector<double>> kt(n - 1, std::vector<double>(count));
        for (std::size_t i = 0; i + 1 < n; ++i)
            for (std::size_t s = 0; s < count; ++s)
                kt[i][s] = (traj.states[m + 1].frenet.gs_curvatures[i][s] -
                            traj.states[m - 1].frenet.gs_curvatures[i][s]) * inv;
        auto ktv = [&](long i, std::size_t s) {
            return i >= 1 && i < static_cast<long>(n) ? kt[static_cast<std::size_t>(i - 1)][s] : 0.0;
        };

        const long nn = static_cast<long>(n);
        const auto dpsi_last = ds(p.row(nn - 1, nn, count));
        std::vector<std::vector<double>> dpsi_sub(n + 1);
        for (long i = 1; i < nn; ++i) dpsi_sub[static_cast<std::size_t>(i)] = ds(p.row(i + 1, i, count));

        const auto [lo, hi] = detail::interior(c);
        for (std::size_t s = lo; s < hi; ++s) {
            const double common = e(0) * e(1) * fv(2, s) * k1[s] * k1[s] + fv(1, s) * dk1[s] + ddf2[s] -
                                  2.0 * e(1) * e(2) * df3[s] * k2[s] - e(1) * e(2) * fv(3, s) * dk2[s] -
                                  e(1) * e(2) * fv(2, s) * k2[s] * k2[s];
            const double tail = e(1) * e(3) * fv(4, s) * k2[s] * kv(3, s);
            const double a_alt = common - tail;
            const double a_derived = common + tail;
            bump("fd_t_k1", std::abs(kt[0][s]));
            bump("rhs_A", std::abs(a_derived));
            bump("A_alt", std::abs(kt[0][s] - a_alt));
            bump("A_derived", std::abs(kt[0][s] - a_derived));

            const double b_alt = -e(nn - 2) * e(nn - 1) * dpsi_last[s] -
                                   e(nn - 2) * e(nn - 1) * p.at(nn - 2, nn, s) * kv(nn - 2, s);
            const double b_derived = -e(nn - 1) * dpsi_last[s] -
                                     e(nn - 3) * e(nn - 2) * e(nn - 1) * kv(nn - 2, s) * p.at(nn - 2, nn, s);
            bump("B_alt", std::abs(ktv(nn - 1, s) - b_alt));
            bump("B_derived", std::abs(ktv(nn - 1, s) - b_derived));

            for (long i = 1; i < nn; ++i) {
                const double dpsi = dpsi_sub[static_cast<std::size_t>(i)][s];
                const double c_alt = dpsi - e(i) * e(i + 1) * p.at(i + 2, i, s) * kv(i + 1, s);
                const double c_derived = e(i) * dpsi - e(i) * kv(i + 1, s) * p.at(i + 2, i, s) +
                                         e(i - 2) * e(i - 1) * e(i) * kv(i - 1, s) * p.at(i + 1, i - 1, s);
                const std::string tag = "C" + std::to_string(i);
                bump(tag + "_alt", std::abs(ktv(i, s) - c_alt));
                bump(tag + "_derived", std::abs(ktv(i, s) - c_derived));
            }
        }
    }
    double headline = 0.0;
    for (const auto& [k, v] : worst) {
        r.add(k, v);
        if (k.size() > 8 && k.compare(k.size() - 8, 8, "_derived") == 0) headline = std::max(headline, v);
    }
    detail::finish(r, headline);
    return r;
}

/// max over states of the frame orthonormality defect.
inline VerificationReport check_orthonormality(const Trajectory& traj, const Tolerances& tol = {}) {
    detail::require_states(traj, 1);
    auto r = detail::single("orthonormality", traj, tol.orthonormality);
    double m = 0.0;
    for (const auto& st : traj.states) m = std::max(m, orthonormality_defect(st.frenet));
    detail::finish(r, m);
    return r;
}

/// Frenet-equation residual of the initial curve.
inline VerificationReport check_frenet(const SampledCurve& c, const FrenetData& fd, const Tolerances& tol = {}) {
    VerificationReport r;
    r.identity = "frenet_residual";
    r.tolerance = tol.frenet_residual;
    r.resolutions.push_back({c.size(), 0.0});
    const auto res = frenet_residuals(c, fd);
    const auto [lo, hi] = detail::interior(c);
    double m = 0.0;
    for (std::size_t i = 0; i < res.size(); ++i) {
        double mi = 0.0;
        for (std::size_t s = lo; s < hi; ++s) mi = std::max(mi, res[i][s]);
        r.add("V" + std::to_string(i + 1), mi);
        m = std::max(m, mi);
    }
    r.add("orthonormality", orthonormality_defect(fd));
    detail::finish(r, m);
    return r;
}

inline const std::vector<std::string>& identity_names() {
    static const std::vector<std::string> names = {
        "speed_evolution", "iff_condition", "frame_evolution", "psi_matrix",
        "curvature_pde",   "orthonormality", "frenet_residual"};
    return names;
}

/// Runs a named check on a trajectory.
inline VerificationReport run_check(const std::string& identity, const Trajectory& traj,
                                    const Tolerances& tol = {}) {
    if (identity == "speed_evolution") return check_speed_evolution(traj, tol);
    if (identity == "iff_condition") return check_iff_condition(traj, tol);
    if (identity == "frame_evolution") return check_frame_evolution(traj, tol);
    if (identity == "psi_matrix") return check_psi(traj, tol);
    if (identity == "curvature_pde") return check_curvature_pde(traj, tol);
    if (identity == "orthonormality") return check_orthonormality(traj, tol);
    if (identity == "frenet_residual") {
        detail::require_states(traj, 1);
        const auto& st = traj.states.front();
        return check_frenet(st.curve, st.frenet, tol);
    }
    throw ConfigError("unknown check '" + identity + "'");
}

} // namespace curveflow
