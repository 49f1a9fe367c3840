#pragma once

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "curveflow/error.hpp"

namespace curveflow {

// Truncated Taylor expansion in one variable: coeffs[j] = g^(j)(x0) / j!.
//
// Arithmetic follows the usual recurrences for products, quotients and the
// elementary functions (Griewank & Walther, ch. 13). All operands of a binary
// operation must have the same order.
class Jet {
public:
    Jet() : c_(1, 0.0) {}

    Jet(std::size_t order, double value) : c_(order + 1, 0.0) { c_[0] = value; }

    static Jet constant(std::size_t order, double value) { return Jet(order, value); }

    /// The independent variable expanded at x0.
    static Jet variable(std::size_t order, double x0) {
        Jet j(order, x0);
        if (order >= 1) j.c_[1] = 1.0;
        return j;
    }

    static Jet from_coeffs(std::vector<double> coeffs) {
        if (coeffs.empty()) throw InvalidArgument("Jet needs at least one coefficient");
        Jet j;
        j.c_ = std::move(coeffs);
        return j;
    }

    std::size_t order() const noexcept { return c_.size() - 1; }
    double value() const noexcept { return c_[0]; }
    double operator[](std::size_t j) const noexcept { return c_[j]; }
    const std::vector<double>& coeffs() const noexcept { return c_; }

    /// j-th derivative, coeffs[j] * j!.
    double derivative(std::size_t j) const noexcept {
        double f = 1.0;
        for (std::size_t i = 2; i <= j; ++i) f *= static_cast<double>(i);
        return c_[j] * f;
    }

    Jet& operator+=(const Jet& o) {
        same_order(o);
        for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
        return *this;
    }
    Jet& operator-=(const Jet& o) {
        same_order(o);
        for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
        return *this;
    }
    Jet& operator*=(double a) noexcept {
        for (double& x : c_) x *= a;
        return *this;
    }

    friend Jet operator+(Jet a, const Jet& b) { return a += b; }
    friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
    friend Jet operator-(Jet a) { return a *= -1.0; }
    friend Jet operator*(double s, Jet a) { return a *= s; }

    friend Jet operator*(const Jet& a, const Jet& b) {
        a.same_order(b);
        const std::size_t n = a.c_.size();
        Jet r(n - 1, 0.0);
        for (std::size_t k = 0; k < n; ++k) {
            double acc = 0.0;
            for (std::size_t j = 0; j <= k; ++j) acc += a.c_[j] * b.c_[k - j];
            r.c_[k] = acc;
        }
        return r;
    }

    friend Jet operator/(const Jet& a, const Jet& b) {
        a.same_order(b);
        if (b.c_[0] == 0.0) throw DomainError("division by zero in jet arithmetic");
        const std::size_t n = a.c_.size();
        Jet r(n - 1, 0.0);
        for (std::size_t k = 0; k < n; ++k) {
            double acc = a.c_[k];
            for (std::size_t j = 1; j <= k; ++j) acc -= b.c_[j] * r.c_[k - j];
            r.c_[k] = acc / b.c_[0];
        }
        return r;
    }

    friend bool operator==(const Jet&, const Jet&) = default;

private:
    void same_order(const Jet& o) const {
        if (o.c_.size() != c_.size())
            throw InvalidArgument("jet order mismatch: " + std::to_string(order()) + " vs " +
                                  std::to_string(o.order()));
    }

    std::vector<double> c_;
};

inline Jet exp(const Jet& a) {
    const std::size_t n = a.order() + 1;
    std::vector<double> e(n, 0.0);
    e[0] = std::exp(a[0]);
    for (std::size_t k = 1; k < n; ++k) {
        double acc = 0.0;
        for (std::size_t j = 1; j <= k; ++j) acc += static_cast<double>(j) * a[j] * e[k - j];
        e[k] = acc / static_cast<double>(k);
    }
    return Jet::from_coeffs(std::move(e));
}

// sin/cos (hyperbolic = false) or sinh/cosh (hyperbolic = true), computed as a pair.
inline std::pair<Jet, Jet> sincos_pair(const Jet& a, bool hyperbolic) {
    const std::size_t n = a.order() + 1;
    std::vector<double> s(n, 0.0), c(n, 0.0);
    s[0] = hyperbolic ? std::sinh(a[0]) : std::sin(a[0]);
    c[0] = hyperbolic ? std::cosh(a[0]) : std::cos(a[0]);
    const double csign = hyperbolic ? 1.0 : -1.0;
    for (std::size_t k = 1; k < n; ++k) {
        double ss = 0.0, cc = 0.0;
        for (std::size_t j = 1; j <= k; ++j) {
            const double ja = static_cast<double>(j) * a[j];
            ss += ja * c[k - j];
            cc += ja * s[k - j];
        }
        s[k] = ss / static_cast<double>(k);
        c[k] = csign * cc / static_cast<double>(k);
    }
    return {Jet::from_coeffs(std::move(s)), Jet::from_coeffs(std::move(c))};
}

inline Jet sin(const Jet& a) { return sincos_pair(a, false).first; }
inline Jet cos(const Jet& a) { return sincos_pair(a, false).second; }
inline Jet sinh(const Jet& a) { return sincos_pair(a, true).first; }
inline Jet cosh(const Jet& a) { return sincos_pair(a, true).second; }

inline Jet sqrt(const Jet& a) {
    if (a[0] < 0.0) throw DomainError("sqrt of negative value in jet arithmetic");
    if (a[0] == 0.0 && a.order() > 0) throw DomainError("sqrt is not differentiable at 0");
    const std::size_t n = a.order() + 1;
    std::vector<double> r(n, 0.0);
    r[0] = std::sqrt(a[0]);
    for (std::size_t k = 1; k < n; ++k) {
        double acc = a[k];
        for (std::size_t j = 1; j < k; ++j) acc -= r[j] * r[k - j];
        r[k] = acc / (2.0 * r[0]);
    }
    return Jet::from_coeffs(std::move(r));
}

inline Jet pow(const Jet& a, int exponent) {
    Jet result(a.order(), 1.0);
    if (exponent == 0) return result;
    Jet base = a;
    unsigned e = exponent < 0 ? static_cast<unsigned>(-static_cast<long>(exponent))
                              : static_cast<unsigned>(exponent);
    while (e) {
        if (e & 1u) result = result * base;
        e >>= 1u;
        if (e) base = base * base;
    }
    if (exponent < 0) return Jet(a.order(), 1.0) / result;
    return result;
}

} // namespace curveflow
