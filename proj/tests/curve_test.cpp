#include <gtest/gtest.h>

#include <numbers>

#include "curveflow/curve.hpp"
#include "support.hpp"

using namespace curveflow;
using namespace testing_support;

namespace {

CurveSpec spec(std::vector<std::string> comps, double u0, double u1, Topology topo, std::size_t n) {
    CurveSpec s;
    s.dimension = comps.size();
    for (const auto& c : comps) s.components.push_back(parse(c, VarSet::of({Var::U})));
    s.u0 = u0;
    s.u1 = u1;
    s.topology = topo;
    s.samples = n;
    return s;
}

constexpr double kPi = std::numbers::pi;

} // namespace

TEST(Sample, CausalCharacter) {
    EXPECT_EQ(sampled("circle", 256).character(), CausalCharacter::Spacelike);
    EXPECT_EQ(sampled("hyperbola", 128).character(), CausalCharacter::Timelike);
    EXPECT_EQ(sampled("timelike_helix", 64).character(), CausalCharacter::Timelike);
    EXPECT_EQ(sampled("spacelike_helix", 64).character(), CausalCharacter::Spacelike);
}

TEST(Sample, Errors) {
    EXPECT_THROW(sample(spec({"u", "u", "0"}, 0, 1, Topology::Open, 32)), NullCurve);
    EXPECT_THROW(sample(spec({"u^2/2", "u"}, 0, 2, Topology::Open, 16)), MixedCausality);
    EXPECT_THROW(sample(spec({"0", "u^2", "1"}, -1, 1, Topology::Open, 17)), DegenerateCurve);
    EXPECT_THROW(sample(spec({"0", "cos(u)", "sin(u)"}, 0, 6, Topology::Closed, 64)), InvalidArgument);
    EXPECT_THROW(sample(spec({"0", "u"}, 0, 1, Topology::Open, 15)), InvalidArgument);
    EXPECT_THROW(sample(spec({"0", "u"}, 1, 0, Topology::Open, 32)), InvalidArgument);
    auto bad = spec({"0", "u"}, 0, 1, Topology::Open, 32);
    bad.dimension = 3;
    EXPECT_THROW(sample(bad), InvalidArgument);
}

TEST(Sample, Metadata) {
    const auto c = sampled("circle", 64);
    EXPECT_EQ(c.quadrature(), Quadrature::PeriodicCubic);
    EXPECT_EQ(c.source(), DerivativeSource::Jet);
    EXPECT_EQ(c.size(), 64u);
    EXPECT_NEAR(c.h(), 2 * kPi / 64, 1e-15);
    EXPECT_EQ(sampled("hyperbola", 33).quadrature(), Quadrature::Simpson);
}

TEST(Speed, HandValues) {
    const auto circle = sampled("circle", 64);
    const auto fast = sample(spec({"2*u", "0", "0"}, 0, 1, Topology::Open, 32));
    const auto doubled = sample(spec({"0", "cos(2*u)", "sin(2*u)"}, 0, kPi, Topology::Closed, 64));
    for (std::size_t i = 0; i < 32; ++i) {
        EXPECT_NEAR(speed(circle, i), 1.0, 1e-15);
        EXPECT_NEAR(speed(fast, i), 2.0, 1e-15);
        EXPECT_NEAR(speed(doubled, i), 2.0, 1e-14);
    }
}

TEST(Arclength, HandValues) {
    const auto circle = sampled("circle", 256);
    EXPECT_NEAR(circle.total_length(), 2 * kPi, 1e-8);
    EXPECT_EQ(arclength(circle, 0), 0.0);
    const auto fast = sample(spec({"2*u", "0", "0"}, 0, 1, Topology::Open, 32));
    EXPECT_NEAR(fast.total_length(), 2.0, 1e-10);
    EXPECT_NEAR(arclength(fast, 31), 2.0, 1e-10);
    const auto doubled = sample(spec({"0", "cos(2*u)", "sin(2*u)"}, 0, kPi, Topology::Closed, 256));
    EXPECT_NEAR(doubled.total_length(), circle.total_length(), 1e-8);
}

TEST(Arclength, MonotoneOnCatalog) {
    for (const auto& cc : catalog_curves()) {
        const auto c = sample(cc.spec(65));
        for (std::size_t i = 1; i < c.size(); ++i) ASSERT_GT(arclength(c, i), arclength(c, i - 1)) << cc.name;
    }
}

TEST(Arclength, SimpsonConvergence) {
    // Constant-speed catalog curves integrate exactly, so the fourth-order
    // rate is measured on curves with varying speed.
    const double parabola = std::sqrt(2.0) + std::asinh(1.0);
    auto F = [](double x) { return 0.5 * x * std::sqrt(x * x - 1) - 0.5 * std::acosh(x); };
    const double timelike_parabola = F(3.0) - F(2.0);
    for (auto [name, exact] : {std::pair{"parabola", parabola}, std::pair{"timelike_parabola", timelike_parabola}}) {
        const double e1 = std::abs(sampled(name, 33).total_length() - exact);
        const double e2 = std::abs(sampled(name, 65).total_length() - exact);
        EXPECT_GT(e1 / e2, 12.0) << name;
        EXPECT_LT(e1 / e2, 20.0) << name;
    }
    EXPECT_NEAR(sampled("hyperbola", 128).total_length(), 2.0, 1e-13);
    EXPECT_NEAR(sampled("circle", 128).total_length(), 2 * kPi, 1e-13);
}

TEST(Arclength, OddNodesAreFourthOrder) {
    // s(u) on the parabola at every node against the closed form.
    auto S = [](double u) { return 0.5 * u * std::sqrt(1 + u * u) + 0.5 * std::asinh(u); };
    auto worst = [&](std::size_t n) {
        const auto c = sampled("parabola", n);
        double m = 0.0;
        for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(arclength(c, i) - (S(c.u(i)) - S(-1.0))));
        return m;
    };
    EXPECT_GT(worst(33) / worst(65), 12.0);
}

TEST(Integrate, PeriodicRule) {
    const auto c = sampled("circle", 32);
    std::vector<double> f(32);
    for (std::size_t i = 0; i < 32; ++i) f[i] = std::cos(c.u(i)) * std::cos(c.u(i));
    const auto I = c.integrate(f);
    EXPECT_NEAR(I.total, kPi, 1e-13);
    EXPECT_EQ(I.at_nodes[0], 0.0);
    // Cumulative values follow u/2 + sin(2u)/4 to fourth order.
    for (std::size_t i = 0; i < 32; ++i)
        EXPECT_NEAR(I.at_nodes[i], c.u(i) / 2 + std::sin(2 * c.u(i)) / 4, 2e-4);
}

TEST(DDs, Examples) {
    const auto c = sampled("circle", 256);
    std::vector<double> one(256, 3.0), sin_s(256);
    for (std::size_t i = 0; i < 256; ++i) sin_s[i] = std::sin(arclength(c, i));
    EXPECT_EQ(max_abs(d_ds(one, c)), 0.0);
    const auto d = d_ds(sin_s, c);
    for (std::size_t i = 0; i < 256; ++i) EXPECT_NEAR(d[i], std::cos(arclength(c, i)), 5e-4);
}

TEST(DDs, ArclengthHasUnitDerivative) {
    auto err = [](std::size_t n) {
        const auto c = sampled("timelike_parabola", n);
        const auto d = d_ds(c.arclengths(), c);
        double m = 0.0;
        for (double x : d) m = std::max(m, std::abs(x - 1.0));
        return m;
    };
    EXPECT_LT(err(64), 1e-3);
    EXPECT_NEAR(std::log2(err(64) / err(128)), 2.0, 0.3);
}

TEST(DDs, Linear) {
    Gen g(5);
    const auto c = sampled("parabola", 64);
    std::vector<double> f(64), h(64), mix(64);
    const double a = g.uniform(-2, 2), b = g.uniform(-2, 2);
    for (std::size_t i = 0; i < 64; ++i) {
        f[i] = g.uniform(-1, 1);
        h[i] = g.uniform(-1, 1);
        mix[i] = a * f[i] + b * h[i];
    }
    const auto df = d_ds(f, c), dh = d_ds(h, c), dm = d_ds(mix, c);
    for (std::size_t i = 0; i < 64; ++i) EXPECT_NEAR(dm[i], a * df[i] + b * dh[i], 1e-11);
}

TEST(SamplePoints, MatchesJets) {
    const auto exact = sampled("timelike_helix", 128);
    const auto fd = sample_points(exact.points(), exact.u0(), exact.u1(), Topology::Open);
    EXPECT_EQ(fd.source(), DerivativeSource::FiniteDifference);
    for (std::size_t k = 1; k <= 3; ++k)
        for (std::size_t i = 0; i < 128; ++i)
            for (std::size_t a = 0; a < 3; ++a)
                ASSERT_NEAR(fd.derivative(k, i)[a], exact.derivative(k, i)[a], 1e-4) << k << " " << i;
    EXPECT_NEAR(fd.total_length(), exact.total_length(), 1e-9);
}

TEST(SamplePoints, ClosedWrap) {
    const auto exact = sampled("circle", 64);
    const auto fd = sample_points(exact.points(), exact.u0(), exact.u1(), Topology::Closed);
    EXPECT_NEAR(fd.total_length(), 2 * kPi, 1e-7);
    for (std::size_t i = 0; i < 64; ++i) EXPECT_NEAR(fd.speeds()[i], 1.0, 1e-7);
}
