#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>

#include "curveflow/error.hpp"

namespace curveflow {

inline constexpr std::size_t kMinDimension = 2;
inline constexpr std::size_t kMaxDimension = 8;

/// A vector of E_1^n. Component 0 is the timelike axis.
///
/// The dimension is a runtime value in [2, 8]; storage is inline so vectors
/// stay cheap to copy inside per-sample arrays.
class MinkVector {
public:
    MinkVector() = default;

    explicit MinkVector(std::size_t n) : n_(n) {
        if (n < kMinDimension || n > kMaxDimension)
            throw InvalidArgument("MinkVector dimension must be in [2, 8], got " +
                                  std::to_string(n));
    }

    MinkVector(std::initializer_list<double> xs) : MinkVector(xs.size()) {
        std::copy(xs.begin(), xs.end(), x_.begin());
        check_finite();
    }

    explicit MinkVector(std::span<const double> xs) : MinkVector(xs.size()) {
        std::copy(xs.begin(), xs.end(), x_.begin());
        check_finite();
    }

    static MinkVector basis(std::size_t n, std::size_t i) {
        MinkVector e(n);
        e[i] = 1.0;
        return e;
    }

    std::size_t dim() const noexcept { return n_; }

    double& operator[](std::size_t i) noexcept { return x_[i]; }
    double operator[](std::size_t i) const noexcept { return x_[i]; }

    std::span<const double> components() const noexcept { return {x_.data(), n_}; }

    bool is_finite() const noexcept {
        return std::all_of(x_.begin(), x_.begin() + n_, [](double v) { return std::isfinite(v); });
    }

    MinkVector& operator+=(const MinkVector& o) {
        require_same(o);
        for (std::size_t i = 0; i < n_; ++i) x_[i] += o.x_[i];
        return *this;
    }
    MinkVector& operator-=(const MinkVector& o) {
        require_same(o);
        for (std::size_t i = 0; i < n_; ++i) x_[i] -= o.x_[i];
        return *this;
    }
    MinkVector& operator*=(double a) noexcept {
        for (std::size_t i = 0; i < n_; ++i) x_[i] *= a;
        return *this;
    }
    MinkVector& operator/=(double a) noexcept {
        for (std::size_t i = 0; i < n_; ++i) x_[i] /= a;
        return *this;
    }

    /// this += a * o, the workhorse of projections.
    void axpy(double a, const MinkVector& o) {
        require_same(o);
        for (std::size_t i = 0; i < n_; ++i) x_[i] += a * o.x_[i];
    }

    friend MinkVector operator+(MinkVector a, const MinkVector& b) { return a += b; }
    friend MinkVector operator-(MinkVector a, const MinkVector& b) { return a -= b; }
    friend MinkVector operator-(MinkVector a) { return a *= -1.0; }
    friend MinkVector operator*(double s, MinkVector a) noexcept { return a *= s; }
    friend MinkVector operator*(MinkVector a, double s) noexcept { return a *= s; }
    friend MinkVector operator/(MinkVector a, double s) noexcept { return a /= s; }

    friend bool operator==(const MinkVector& a, const MinkVector& b) noexcept {
        return a.n_ == b.n_ && std::equal(a.x_.begin(), a.x_.begin() + a.n_, b.x_.begin());
    }

    void require_same(const MinkVector& o) const {
        if (o.n_ != n_) throw DimensionMismatch(n_, o.n_);
    }

private:
    void check_finite() const {
        if (!is_finite()) throw InvalidArgument("MinkVector components must be finite");
    }

    std::array<double, kMaxDimension> x_{};
    std::size_t n_ = 0;
};

enum class CausalCharacter { Spacelike, Timelike, Null };

inline const char* to_string(CausalCharacter c) noexcept {
    switch (c) {
    case CausalCharacter::Spacelike: return "spacelike";
    case CausalCharacter::Timelike: return "timelike";
    case CausalCharacter::Null: return "null";
    }
    return "?";
}

inline constexpr double kNullTolerance = 1e-9;

/// <X,Y> = -x1 y1 + sum_{i>=2} xi yi
inline double inner(const MinkVector& x, const MinkVector& y) {
    x.require_same(y);
    double acc = -x[0] * y[0];
    for (std::size_t i = 1; i < x.dim(); ++i) acc += x[i] * y[i];
    return acc;
}

inline double norm(const MinkVector& x) { return std::sqrt(std::abs(inner(x, x))); }

inline double euclidean_norm_sq(const MinkVector& x) noexcept {
    double acc = 0.0;
    for (std::size_t i = 0; i < x.dim(); ++i) acc += x[i] * x[i];
    return acc;
}

inline double euclidean_norm(const MinkVector& x) noexcept {
    return std::sqrt(euclidean_norm_sq(x));
}

/// The null band is relative to the Euclidean size of X. The zero vector is
/// spacelike.
inline CausalCharacter causal_character(const MinkVector& x, double tol = kNullTolerance) {
    if (tol < 0.0) throw InvalidArgument("causal_character: tolerance must be non-negative");
    const double q = inner(x, x);
    const double e2 = euclidean_norm_sq(x);
    if (e2 == 0.0) return CausalCharacter::Spacelike;
    const double threshold = tol * std::max(1.0, e2);
    if (std::abs(q) <= threshold) return CausalCharacter::Null;
    return q < -threshold ? CausalCharacter::Timelike : CausalCharacter::Spacelike;
}

/// +1 for spacelike, -1 for timelike; null has no sign.
inline int causal_sign(CausalCharacter c) {
    if (c == CausalCharacter::Null) throw InvalidArgument("null vectors have no causal sign");
    return c == CausalCharacter::Timelike ? -1 : 1;
}

} // namespace curveflow
