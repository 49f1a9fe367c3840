#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "curveflow/error.hpp"

namespace curveflow {

/// Finite-difference weights for derivatives 0..max_order at z from the given
/// nodes (Fornberg, Math. Comp. 51, 1988). Returns weights[k][j].
inline std::vector<std::vector<double>> fornberg_weights(double z, std::span<const double> x,
                                                         std::size_t max_order) {
    const std::size_t n = x.size();
    std::vector<std::vector<double>> c(max_order + 1, std::vector<double>(n, 0.0));
    double c1 = 1.0;
    double c4 = x[0] - z;
    c[0][0] = 1.0;
    for (std::size_t i = 1; i < n; ++i) {
        const std::size_t mn = std::min(i, max_order);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = x[i] - z;
        for (std::size_t j = 0; j < i; ++j) {
            const double c3 = x[i] - x[j];
            c2 *= c3;
            if (j == i - 1) {
                for (std::size_t k = mn; k >= 1; --k)
                    c[k][i] = c1 * (static_cast<double>(k) * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for (std::size_t k = mn; k >= 1; --k)
                c[k][j] = (c4 * c[k][j] - static_cast<double>(k) * c[k - 1][j]) / c3;
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    return c;
}

/// Derivative of a fixed order on a uniform grid, periodic or with one-sided
/// stencils at the ends. `accuracy` is the formal order in h (2, 4, 6 or 8).
class GridDerivative {
public:
    GridDerivative(std::size_t nodes, double h, std::size_t deriv_order, bool periodic,
                   std::size_t accuracy = 2)
        : nodes_(nodes), periodic_(periodic) {
        if (deriv_order == 0) throw InvalidArgument("derivative order must be >= 1");
        if (accuracy < 2 || accuracy > 8 || accuracy % 2) throw InvalidArgument("accuracy must be 2, 4, 6 or 8");
        const std::size_t half = (deriv_order + accuracy - 1) / 2;
        const std::size_t width = std::max(2 * half + 1, deriv_order + accuracy);
        if (nodes < width) throw InvalidArgument("grid too small for stencil");

        const double scale = std::pow(h, -static_cast<double>(deriv_order));
        auto make = [&](std::ptrdiff_t first, std::size_t count, std::ptrdiff_t centre) {
            std::vector<double> xs(count);
            for (std::size_t j = 0; j < count; ++j)
                xs[j] = static_cast<double>(first + static_cast<std::ptrdiff_t>(j) - centre);
            auto w = fornberg_weights(0.0, xs, deriv_order)[deriv_order];
            for (double& v : w) v *= scale;
            return w;
        };

        const auto p = static_cast<std::ptrdiff_t>(half);
        const auto nn = static_cast<std::ptrdiff_t>(nodes);
        half_ = p;
        central_ = make(-p, 2 * half + 1, 0);
        if (!periodic) {
            const auto w = static_cast<std::ptrdiff_t>(width);
            for (std::ptrdiff_t i = 0; i < nn; ++i) {
                if (i - p >= 0 && i + p < nn) continue;
                const std::ptrdiff_t first = std::clamp<std::ptrdiff_t>(i - p, 0, nn - w);
                edges_.push_back({i, first, make(first, width, i)});
            }
        }
    }

    std::size_t size() const noexcept { return nodes_; }

    template <class T>
    T at(std::span<const T> f, std::size_t i) const {
        const auto ii = static_cast<std::ptrdiff_t>(i);
        const auto nn = static_cast<std::ptrdiff_t>(nodes_);
        if (!periodic_ && (ii - half_ < 0 || ii + half_ >= nn)) {
            const Edge& e = ii - half_ < 0 ? edges_[i] : edges_[edges_.size() - (nodes_ - i)];
            T acc = f[static_cast<std::size_t>(e.first)] * e.weights[0];
            for (std::size_t j = 1; j < e.weights.size(); ++j)
                acc += f[static_cast<std::size_t>(e.first) + j] * e.weights[j];
            return acc;
        }
        T acc = f[wrap(ii - half_, nn)] * central_[0];
        for (std::size_t j = 1; j < central_.size(); ++j)
            acc += f[wrap(ii - half_ + static_cast<std::ptrdiff_t>(j), nn)] * central_[j];
        return acc;
    }

    template <class T>
    std::vector<T> apply(std::span<const T> f) const {
        if (f.size() != nodes_) throw DimensionMismatch(nodes_, f.size());
        std::vector<T> out;
        out.reserve(nodes_);
        for (std::size_t i = 0; i < nodes_; ++i) out.push_back(at(f, i));
        return out;
    }

private:
    struct Edge {
        std::ptrdiff_t node;
        std::ptrdiff_t first;
        std::vector<double> weights;
    };

    std::size_t wrap(std::ptrdiff_t j, std::ptrdiff_t nn) const noexcept {
        if (periodic_) j = ((j % nn) + nn) % nn;
        return static_cast<std::size_t>(j);
    }

    std::size_t nodes_;
    bool periodic_;
    std::ptrdiff_t half_ = 0;
    std::vector<double> central_;
    std::vector<Edge> edges_;  // leading edge nodes, then trailing ones
};

} // namespace curveflow
