#include <gtest/gtest.h>

#include "curveflow/frenet.hpp"
#include "support.hpp"

using namespace curveflow;
using namespace testing_support;

namespace {

void expect_vec(const MinkVector& got, std::initializer_list<double> want, double tol) {
    std::size_t i = 0;
    for (double w : want) EXPECT_NEAR(got[i++], w, tol);
}

CurveSpec spec(std::vector<std::string> comps, double u0, double u1, std::size_t n) {
    CurveSpec s;
    s.dimension = comps.size();
    for (const auto& c : comps) s.components.push_back(parse(c, VarSet::of({Var::U})));
    s.u0 = u0;
    s.u1 = u1;
    s.topology = Topology::Open;
    s.samples = n;
    return s;
}

} // namespace

TEST(Frenet, CircleWithCompletion) {
    const auto c = sampled("circle", 512);
    const auto fd = frenet_apparatus(c);
    EXPECT_EQ(fd.signs, (std::vector<int>{1, 1, -1}));
    for (std::size_t s = 0; s < c.size(); s += 37) {
        const double u = c.u(s);
        expect_vec(fd.V(1, s), {0, -std::sin(u), std::cos(u)}, 1e-12);
        expect_vec(fd.V(2, s), {0, -std::cos(u), -std::sin(u)}, 1e-12);
        expect_vec(fd.V(3, s), {1, 0, 0}, 1e-12);  // positive orientation
        EXPECT_TRUE(fd.completed[s]);
        EXPECT_NEAR(fd.gs_curvatures[0][s], 1.0, 1e-6);
        EXPECT_NEAR(fd.k(1, s), 1.0, 5e-4);
        EXPECT_EQ(fd.gs_curvatures[1][s], 0.0);
        EXPECT_NEAR(fd.k(2, s), 0.0, 5e-4);
    }
}

TEST(Frenet, Hyperbola) {
    const auto c = sampled("hyperbola", 512);
    const auto fd = frenet_apparatus(c);
    EXPECT_EQ(fd.signs, (std::vector<int>{-1, 1}));
    for (std::size_t s = 0; s < c.size(); s += 29) {
        const double u = c.u(s);
        expect_vec(fd.V(1, s), {std::cosh(u), std::sinh(u)}, 1e-12);
        expect_vec(fd.V(2, s), {std::sinh(u), std::cosh(u)}, 1e-12);
    }
    for (std::size_t s = 0; s < c.size(); ++s) {
        EXPECT_NEAR(fd.gs_curvatures[0][s], 1.0, 1e-6);
        EXPECT_NEAR(fd.k(1, s), 1.0, 5e-4);
    }
}

TEST(Frenet, TimelikeHelix) {
    const auto c = sampled("timelike_helix", 512);
    const auto fd = frenet_apparatus(c);
    EXPECT_EQ(fd.signs, (std::vector<int>{-1, 1, 1}));
    for (std::size_t s = 0; s < c.size(); ++s) {
        EXPECT_NEAR(fd.gs_curvatures[0][s], 1.0, 1e-6);
        EXPECT_NEAR(fd.gs_curvatures[1][s], std::sqrt(2.0), 1e-6);
        EXPECT_NEAR(fd.k(1, s), 1.0, 5e-4);
        EXPECT_NEAR(std::abs(fd.k(2, s)), std::sqrt(2.0), 5e-4);
    }
}

TEST(Frenet, SpacelikeHelixHasTimelikeBinormal) {
    const auto fd = frenet_apparatus(sampled("spacelike_helix", 128));
    EXPECT_EQ(fd.signs, (std::vector<int>{1, 1, -1}));
}

TEST(Frenet, NonGeneric) {
    // A straight line in E_1^3 has no normal.
    try {
        frenet_apparatus(sample(spec({"0", "u", "0"}, 0, 1, 32)));
        FAIL() << "expected NonGenericCurve";
    } catch (const NonGenericCurve& e) {
        EXPECT_EQ(e.vector_index(), 2);
    }
    // A planar curve in E_1^4: w3 vanishes before the last vector.
    EXPECT_THROW(frenet_apparatus(sample(spec({"0", "cos(u)", "sin(u)", "0"}, 0, 1, 32))), NonGenericCurve);
    // Spacelike curve whose normal plane is null: osculating plane degenerate.
    EXPECT_THROW(frenet_apparatus(sample(spec({"u^2/2", "u", "u^2/2"}, 0, 1, 32))), NonGenericCurve);
}

TEST(Frenet, LineInTwoDimensions) {
    const auto c = sampled("line", 32);
    const auto fd = frenet_apparatus(c);
    EXPECT_EQ(fd.signs, (std::vector<int>{1, -1}));
    EXPECT_TRUE(fd.completed[0]);
    EXPECT_EQ(max_abs(fd.k(1)), 0.0);
    EXPECT_EQ(max_frenet_residual(c, fd), 0.0);
}

TEST(Frenet, InvariantsOnCatalog) {
    for (const char* name : {"circle", "hyperbola", "timelike_helix", "spacelike_helix", "parabola",
                             "timelike_parabola"})
        for (std::size_t n : {128u, 256u, 512u}) {
            const auto c = sampled(name, n);
            const auto fd = frenet_apparatus(c);
            EXPECT_LT(orthonormality_defect(fd), 1e-8) << name << " " << n;
            EXPECT_EQ(std::count(fd.signs.begin(), fd.signs.end(), -1), 1) << name;
            EXPECT_EQ(fd.signs[0], c.tangent_sign()) << name;
            for (std::size_t i = 1; i + 1 < fd.dim; ++i)
                for (double k : fd.gs_curvatures[i - 1]) ASSERT_GT(k, 0.0) << name;
        }
}

TEST(FrenetResidual, ConvergesAtSecondOrder) {
    const double hyp = max_frenet_residual(sampled("hyperbola", 256), frenet_apparatus(sampled("hyperbola", 256)));
    EXPECT_LT(hyp, 1e-3);
    const double helix = max_frenet_residual(sampled("timelike_helix", 512), frenet_apparatus(sampled("timelike_helix", 512)));
    EXPECT_LT(helix, 3e-4);
    for (const char* name : {"circle", "hyperbola", "timelike_helix", "spacelike_helix", "parabola"}) {
        double prev = 0.0;
        for (std::size_t n : {128u, 256u, 512u}) {
            const auto c = sampled(name, n);
            const double r = max_frenet_residual(c, frenet_apparatus(c));
            if (prev > 0.0) {
                EXPECT_GT(std::log2(prev / r), 1.7) << name << " " << n;
                EXPECT_LT(std::log2(prev / r), 2.3) << name << " " << n;
            }
            prev = r;
        }
    }
}

TEST(Property, BoostInvariance) {
    // A Lorentz boost in the (x1, x2) plane is an isometry: signs and
    // curvatures must not change.
    Gen g(31);
    const auto base = catalog_curve("timelike_helix");
    const auto ref = frenet_apparatus(sample(base.spec(128)));
    for (int trial = 0; trial < 20; ++trial) {
        const double b = g.uniform(-1.5, 1.5);
        char ch[32], sh[32];
        std::snprintf(ch, sizeof ch, "%.17g", std::cosh(b));
        std::snprintf(sh, sizeof sh, "%.17g", std::sinh(b));
        const std::string x1 = base.components[0], x2 = base.components[1];
        const auto c = sample(spec({std::string(ch) + "*(" + x1 + ") + " + sh + "*(" + x2 + ")",
                                    std::string(sh) + "*(" + x1 + ") + " + ch + "*(" + x2 + ")", base.components[2]},
                                   base.u0, base.u1, 128));
        const auto fd = frenet_apparatus(c);
        ASSERT_EQ(fd.signs, ref.signs);
        for (std::size_t s = 0; s < c.size(); ++s)
            for (std::size_t i = 0; i < 2; ++i)
                ASSERT_NEAR(fd.gs_curvatures[i][s], ref.gs_curvatures[i][s], 1e-9 * std::cosh(2 * b));
    }
}

TEST(Property, RandomGenericCurves) {
    // Spacelike curves in E_1^n: x2 = 2u plus oscillations of distinct
    // frequencies, and a weak timelike component so the normals stay
    // spacelike and only the last frame vector is timelike.
    Gen g(32);
    int generic = 0;
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n = static_cast<std::size_t>(g.integer(3, 5));
        std::vector<std::string> comps(n);
        for (std::size_t a = 0; a < n; ++a) {
            char buf[96];
            const double amp = a == 0 ? g.uniform(0.01, 0.03) : g.uniform(0.3, 0.8);
            const double freq = 0.7 + 0.45 * static_cast<double>(a) + g.uniform(0.0, 0.2);
            std::snprintf(buf, sizeof buf, "%.3f*sin(%.3f*u + %.3f)", amp, freq, g.uniform(0, 6));
            comps[a] = buf;
        }
        comps[1] = "2*u + " + comps[1];
        try {
            const auto c = sample(spec(comps, 0, 2, 96));
            const auto fd = frenet_apparatus(c);
            ++generic;
            ASSERT_LT(orthonormality_defect(fd), 1e-8);
            ASSERT_EQ(std::count(fd.signs.begin(), fd.signs.end(), -1), 1);
            ASSERT_EQ(fd.signs[0], 1);
        } catch (const NonGenericCurve&) {
        }
    }
    EXPECT_GE(generic, 20);  // the rest hit an inflection somewhere
}
