#pragma once

// Shared fixtures and small random generators for the property tests.

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "curveflow/catalog.hpp"
#include "curveflow/curve.hpp"
#include "curveflow/expr.hpp"
#include "curveflow/flow.hpp"
#include "curveflow/minkowski.hpp"

namespace testing_support {

using namespace curveflow;

class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng_); }
    int integer(int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng_); }
    bool coin() { return integer(0, 1) == 1; }

    MinkVector vector(std::size_t n, double scale = 10.0) {
        MinkVector v(n);
        for (std::size_t i = 0; i < n; ++i) v[i] = uniform(-scale, scale);
        return v;
    }

    // Random polynomial in one variable: text plus coefficients, low order first.
    struct Poly {
        std::string text;
        std::vector<double> coeffs;
    };
    Poly polynomial(const char* var, int max_degree) {
        Poly p;
        const int deg = integer(0, max_degree);
        for (int k = 0; k <= deg; ++k) {
            const double c = std::round(uniform(-5.0, 5.0) * 4.0) / 4.0;
            p.coeffs.push_back(c);
            char buf[64];
            std::snprintf(buf, sizeof buf, "%s(%g)*%s^%d", k ? " + " : "", c, var, k);
            p.text += buf;
        }
        return p;
    }

    // Random smooth expression in the given variables. Sqrt and division are
    // kept away from zero so the result is defined on the whole real line.
    std::string smooth(const std::vector<std::string>& vars, int depth) {
        if (depth <= 0 || integer(0, 3) == 0) {
            if (coin()) return vars[static_cast<std::size_t>(integer(0, static_cast<int>(vars.size()) - 1))];
            char buf[32];
            std::snprintf(buf, sizeof buf, "%g", std::round(uniform(-3.0, 3.0) * 8.0) / 8.0);
            return buf;
        }
        const std::string a = smooth(vars, depth - 1);
        const std::string b = smooth(vars, depth - 1);
        switch (integer(0, 8)) {
        case 0: return "(" + a + " + " + b + ")";
        case 1: return "(" + a + " - " + b + ")";
        case 2: return "(" + a + ")*(" + b + ")";
        case 3: return "sin(" + a + ")";
        case 4: return "cos(" + a + ")";
        case 5: return "(" + a + ")/(2 + sin(" + b + "))";
        case 6: return "sqrt(1 + (" + a + ")^2)";
        case 7: return "-(" + a + ")^" + std::to_string(integer(0, 3));
        default: return "exp(sin(" + a + "))";
        }
    }

private:
    std::mt19937_64 rng_;
};

inline double poly_derivative(const std::vector<double>& c, int order, double x) {
    double acc = 0.0;
    for (std::size_t k = static_cast<std::size_t>(order); k < c.size(); ++k) {
        double falling = 1.0;
        for (int j = 0; j < order; ++j) falling *= static_cast<double>(k - static_cast<std::size_t>(j));
        acc += c[k] * falling * std::pow(x, static_cast<double>(k) - order);
    }
    return acc;
}

inline CurveSpec curve(const std::string& name, std::size_t samples) { return catalog_curve(name).spec(samples); }

inline SampledCurve sampled(const std::string& name, std::size_t samples) { return sample(curve(name, samples)); }

inline FlowSpec flow(const std::string& name) { return catalog_flow(name).spec(); }

inline EvolveOptions every(std::size_t n) {
    EvolveOptions o;
    o.record_every = n;
    return o;
}

/// Samples the catalog flow's curve and evolves it.
inline Trajectory run_flow(const std::string& name, std::size_t samples, double dt, std::size_t steps,
                           EvolveOptions opts = {}) {
    const auto& f = catalog_flow(name);
    const FlowSpec spec = f.spec();
    const SimState init = make_state(sampled(f.curve, samples), spec, 0.0);
    return evolve(init, spec, dt, steps, opts);
}

inline double max_abs(const std::vector<double>& v, std::size_t lo = 0, std::size_t hi = SIZE_MAX) {
    double m = 0.0;
    for (std::size_t i = lo; i < std::min(hi, v.size()); ++i) m = std::max(m, std::abs(v[i]));
    return m;
}

} // namespace testing_support
