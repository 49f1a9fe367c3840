#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "curveflow/error.hpp"
#include "curveflow/expr.hpp"
#include "curveflow/minkowski.hpp"
#include "curveflow/stencil.hpp"

namespace curveflow {

enum class Topology { Closed, Open };

inline const char* to_string(Topology t) noexcept {
    return t == Topology::Closed ? "closed" : "open";
}

/// Where the derivative vectors of a sampled curve came from.
enum class DerivativeSource { Jet, FiniteDifference };

enum class Quadrature { Simpson, Trapezoid, PeriodicCubic };

inline const char* to_string(Quadrature q) noexcept {
    switch (q) {
    case Quadrature::Simpson: return "simpson";
    case Quadrature::Trapezoid: return "trapezoid";
    case Quadrature::PeriodicCubic: return "periodic-cubic";
    }
    return "?";
}

inline constexpr std::size_t kMinSamples = 16;
inline constexpr double kClosureTolerance = 1e-9;

struct CurveSpec {
    std::size_t dimension = 3;
    std::vector<Expr> components;
    double u0 = 0.0;
    double u1 = 1.0;
    Topology topology = Topology::Open;
    std::size_t samples = 256;

    void validate() const {
        if (dimension < kMinDimension || dimension > kMaxDimension)
            throw InvalidArgument("curve dimension must be in [2, 8]");
        if (components.size() != dimension)
            throw InvalidArgument("curve needs " + std::to_string(dimension) + " components, got " +
                                  std::to_string(components.size()));
        for (const auto& c : components)
            if (c.free_variables().bits & ~VarSet::of({Var::U}).bits)
                throw InvalidArgument("curve components may only depend on u");
        if (!(u1 > u0) || !std::isfinite(u0) || !std::isfinite(u1))
            throw InvalidArgument("curve domain must satisfy u0 < u1");
        if (samples < kMinSamples)
            throw InvalidArgument("curve needs at least " + std::to_string(kMinSamples) + " samples");
        if (topology == Topology::Closed) {
            for (std::size_t i = 0; i < dimension; ++i) {
                const double a = eval(components[i], Bindings{}.set(Var::U, u0));
                const double b = eval(components[i], Bindings{}.set(Var::U, u1));
                if (std::abs(a - b) > kClosureTolerance)
                    throw InvalidArgument("closed curve component " + std::to_string(i + 1) +
                                          " does not match at the domain ends");
            }
        }
    }
};

/// Cumulative integral of a grid function in u, plus the total over the full
/// domain (one period for closed curves).
struct CumulativeIntegral {
    std::vector<double> at_nodes;
    double total = 0.0;
    Quadrature method = Quadrature::Simpson;
};

namespace detail {

// Composite Simpson over `f` (intervals = f.size() - 1). Odd nodes use the
// three-point rule on the half interval so every node is fourth-order.
inline CumulativeIntegral cumulative_simpson(std::span<const double> f, double h) {
    const std::size_t m = f.size() - 1;
    CumulativeIntegral out;
    out.at_nodes.assign(f.size(), 0.0);
    if (m < 2) {
        out.method = Quadrature::Trapezoid;
        for (std::size_t i = 1; i <= m; ++i)
            out.at_nodes[i] = out.at_nodes[i - 1] + 0.5 * h * (f[i - 1] + f[i]);
        out.total = out.at_nodes[m];
        return out;
    }
    for (std::size_t i = 2; i <= m; i += 2)
        out.at_nodes[i] = out.at_nodes[i - 2] + h / 3.0 * (f[i - 2] + 4.0 * f[i - 1] + f[i]);
    for (std::size_t i = 1; i <= m; i += 2) {
        if (i + 1 <= m)
            out.at_nodes[i] = out.at_nodes[i - 1] + h / 12.0 * (5.0 * f[i - 1] + 8.0 * f[i] - f[i + 1]);
        else
            out.at_nodes[i] = out.at_nodes[i - 1] + h / 12.0 * (-f[i - 2] + 8.0 * f[i - 1] + 5.0 * f[i]);
    }
    out.total = out.at_nodes[m];
    return out;
}

// Periodic grid function over one period of n nodes. Each interval uses the
// cubic through its four nearest nodes; over a full period the weights
// collapse to the trapezoid rule, which has no odd/even bias.
inline CumulativeIntegral cumulative_periodic(std::span<const double> f, double h) {
    const std::size_t n = f.size();
    CumulativeIntegral out;
    out.method = Quadrature::PeriodicCubic;
    out.at_nodes.assign(n, 0.0);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double a = f[(i + n - 1) % n], b = f[i], c = f[(i + 1) % n], d = f[(i + 2) % n];
        acc += h / 24.0 * (-a + 13.0 * b + 13.0 * c - d);
        if (i + 1 < n) out.at_nodes[i + 1] = acc;
    }
    out.total = acc;
    return out;
}

} // namespace detail

class SampledCurve {
public:
    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return points_.size(); }
    Topology topology() const noexcept { return topology_; }
    bool closed() const noexcept { return topology_ == Topology::Closed; }
    double u0() const noexcept { return u0_; }
    double u1() const noexcept { return u1_; }
    double h() const noexcept { return h_; }
    double u(std::size_t i) const noexcept { return u0_ + h_ * static_cast<double>(i); }

    const std::vector<MinkVector>& points() const noexcept { return points_; }
    const MinkVector& point(std::size_t i) const noexcept { return points_[i]; }

    /// k-th u-derivative of the curve at sample i, 1 <= k <= dim().
    const MinkVector& derivative(std::size_t k, std::size_t i) const noexcept {
        return derivs_[k - 1][i];
    }
    const std::vector<MinkVector>& derivatives(std::size_t k) const noexcept { return derivs_[k - 1]; }

    const std::vector<double>& speeds() const noexcept { return speed_; }
    const std::vector<double>& arclengths() const noexcept { return arclength_; }
    double total_length() const noexcept { return total_length_; }

    CausalCharacter character() const noexcept { return character_; }
    /// epsilon_0: +1 spacelike, -1 timelike.
    int tangent_sign() const noexcept { return causal_sign(character_); }

    DerivativeSource source() const noexcept { return source_; }
    Quadrature quadrature() const noexcept { return quadrature_; }

    /// Integral in u of a per-node grid function.
    CumulativeIntegral integrate(std::span<const double> f) const {
        if (f.size() != size()) throw DimensionMismatch(size(), f.size());
        if (closed()) return detail::cumulative_periodic(f, h_);
        return detail::cumulative_simpson(f, h_);
    }

    /// d/du with a stencil of the given accuracy (2, 4, 6 or 8), periodic when closed.
    const GridDerivative& du(std::size_t accuracy = 2) const {
        if (accuracy < 2 || accuracy > 8 || accuracy % 2) throw InvalidArgument("accuracy must be 2, 4, 6 or 8");
        return *du_[accuracy / 2 - 1];
    }

    friend SampledCurve sample(const CurveSpec& spec);
    friend SampledCurve sample_points(std::vector<MinkVector> points, double u0, double u1,
                                      Topology topology, std::size_t accuracy);

private:
    SampledCurve(std::size_t dim, Topology topo, double u0, double u1, std::size_t n)
        : dim_(dim), topology_(topo), u0_(u0), u1_(u1),
          h_((u1 - u0) / static_cast<double>(topo == Topology::Closed ? n : n - 1)) {
        for (std::size_t a = 0; a < du_.size(); ++a)
            du_[a] = std::make_shared<GridDerivative>(n, h_, 1, topo == Topology::Closed, 2 * a + 2);
    }

    void finish() {
        const std::size_t n = size();
        speed_.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const MinkVector& d1 = derivs_[0][i];
            if (!d1.is_finite()) throw DegenerateCurve(i);
            if (euclidean_norm(d1) <= 1e-12) throw DegenerateCurve(i);
            const CausalCharacter c = causal_character(d1);
            if (c == CausalCharacter::Null) throw NullCurve(i);
            if (i == 0) character_ = c;
            else if (c != character_) throw MixedCausality(i);
            speed_[i] = norm(d1);
            if (speed_[i] <= 1e-12) throw DegenerateCurve(i);
        }
        auto integral = integrate(speed_);
        arclength_ = std::move(integral.at_nodes);
        total_length_ = integral.total;
        quadrature_ = integral.method;
    }

    std::size_t dim_;
    Topology topology_;
    double u0_, u1_, h_;
    std::vector<MinkVector> points_;
    std::vector<std::vector<MinkVector>> derivs_;
    std::vector<double> speed_;
    std::vector<double> arclength_;
    double total_length_ = 0.0;
    CausalCharacter character_ = CausalCharacter::Spacelike;
    DerivativeSource source_ = DerivativeSource::Jet;
    Quadrature quadrature_ = Quadrature::Simpson;
    std::array<std::shared_ptr<const GridDerivative>, 4> du_;
};

/// Samples an analytic curve; derivatives up to order n come from jets.
inline SampledCurve sample(const CurveSpec& spec) {
    spec.validate();
    const std::size_t n = spec.dimension;
    const std::size_t count = spec.samples;
    SampledCurve c(n, spec.topology, spec.u0, spec.u1, count);
    c.source_ = DerivativeSource::Jet;
    c.points_.assign(count, MinkVector(n));
    c.derivs_.assign(n, std::vector<MinkVector>(count, MinkVector(n)));
    for (std::size_t i = 0; i < count; ++i) {
        const double ui = c.u(i);
        for (std::size_t comp = 0; comp < n; ++comp) {
            const Jet j = eval_jet(spec.components[comp], Var::U, ui, n);
            c.points_[i][comp] = j.value();
            for (std::size_t k = 1; k <= n; ++k) c.derivs_[k - 1][i][comp] = j.derivative(k);
        }
    }
    c.finish();
    return c;
}

/// Builds a curve from point samples on a uniform u-grid; derivatives come
/// from finite differences of the given accuracy. For closed curves
/// the points cover [u0, u1) and the grid wraps.
inline SampledCurve sample_points(std::vector<MinkVector> points, double u0, double u1,
                                  Topology topology, std::size_t accuracy = 6) {
    if (points.size() < kMinSamples)
        throw InvalidArgument("curve needs at least " + std::to_string(kMinSamples) + " samples");
    const std::size_t n = points.front().dim();
    for (const auto& p : points) p.require_same(points.front());
    const std::size_t count = points.size();
    SampledCurve c(n, topology, u0, u1, count);
    c.source_ = DerivativeSource::FiniteDifference;
    c.points_ = std::move(points);
    c.derivs_.reserve(n);
    const std::span<const MinkVector> pts(c.points_);
    for (std::size_t k = 1; k <= n; ++k) {
        if (k == 1) c.derivs_.push_back(c.du(accuracy).apply(pts));
        else c.derivs_.push_back(GridDerivative(count, c.h_, k, c.closed(), accuracy).apply(pts));
    }
    c.finish();
    return c;
}

inline double speed(const SampledCurve& c, std::size_t i) { return c.speeds().at(i); }

/// s(u_i) measured from u0.
inline double arclength(const SampledCurve& c, std::size_t up_to) { return c.arclengths().at(up_to); }

/// d/ds = (1/v) d/du on the curve's grid.
template <class T>
std::vector<T> d_ds(std::span<const T> values, const SampledCurve& c, std::size_t accuracy = 2) {
    auto out = c.du(accuracy).apply(values);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] /= c.speeds()[i];
    return out;
}

inline std::vector<double> d_ds(const std::vector<double>& values, const SampledCurve& c,
                                std::size_t accuracy = 2) {
    return d_ds(std::span<const double>(values), c, accuracy);
}

inline std::vector<MinkVector> d_ds(const std::vector<MinkVector>& values, const SampledCurve& c,
                                    std::size_t accuracy = 2) {
    return d_ds(std::span<const MinkVector>(values), c, accuracy);
}

} // namespace curveflow
