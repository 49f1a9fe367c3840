#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "curveflow/stencil.hpp"

using namespace curveflow;

TEST(Fornberg, ClassicalStencils) {
    const std::vector<double> x = {-1, 0, 1};
    const auto w = fornberg_weights(0.0, x, 2);
    EXPECT_NEAR(w[0][1], 1.0, 1e-15);
    EXPECT_NEAR(w[1][0], -0.5, 1e-15);
    EXPECT_NEAR(w[1][1], 0.0, 1e-15);
    EXPECT_NEAR(w[1][2], 0.5, 1e-15);
    EXPECT_NEAR(w[2][0], 1.0, 1e-15);
    EXPECT_NEAR(w[2][1], -2.0, 1e-15);
    EXPECT_NEAR(w[2][2], 1.0, 1e-15);

    const std::vector<double> y = {0, 1, 2};  // one-sided first derivative
    const auto v = fornberg_weights(0.0, y, 1);
    EXPECT_NEAR(v[1][0], -1.5, 1e-15);
    EXPECT_NEAR(v[1][1], 2.0, 1e-15);
    EXPECT_NEAR(v[1][2], -0.5, 1e-15);
}

TEST(GridDerivative, Validation) {
    EXPECT_THROW(GridDerivative(32, 0.1, 0, true), InvalidArgument);
    EXPECT_THROW(GridDerivative(32, 0.1, 1, true, 3), InvalidArgument);
    EXPECT_THROW(GridDerivative(32, 0.1, 1, true, 10), InvalidArgument);
    EXPECT_THROW(GridDerivative(4, 0.1, 3, false, 4), InvalidArgument);
    const GridDerivative d(32, 0.1, 1, true);
    EXPECT_THROW(d.apply(std::span<const double>(std::vector<double>(31))), DimensionMismatch);
}

TEST(GridDerivative, ExactOnPolynomials) {
    // An order-p stencil for the k-th derivative is exact on degree < p + k.
    for (std::size_t acc : {2u, 4u, 6u, 8u})
        for (std::size_t k = 1; k <= 3; ++k) {
            const std::size_t nodes = 24;
            const double h = 0.1;
            const GridDerivative d(nodes, h, k, false, acc);
            const int deg = static_cast<int>(acc + k) - 1;
            std::vector<double> f(nodes);
            for (std::size_t i = 0; i < nodes; ++i) f[i] = std::pow(h * static_cast<double>(i) - 1.0, deg);
            const auto df = d.apply(std::span<const double>(f));
            for (std::size_t i = 0; i < nodes; ++i) {
                const double x = h * static_cast<double>(i) - 1.0;
                double want = 1.0;
                for (std::size_t j = 0; j < k; ++j) want *= static_cast<double>(deg - static_cast<int>(j));
                want *= std::pow(x, deg - static_cast<int>(k));
                ASSERT_NEAR(df[i], want, 1e-7 * (1 + std::abs(want))) << "acc " << acc << " k " << k << " i " << i;
            }
        }
}

TEST(GridDerivative, ObservedOrder) {
    auto err = [](std::size_t nodes, std::size_t acc, bool periodic) {
        const double L = 2 * std::numbers::pi;
        const double h = periodic ? L / static_cast<double>(nodes) : 1.0 / static_cast<double>(nodes - 1);
        const GridDerivative d(nodes, h, 1, periodic, acc);
        std::vector<double> f(nodes);
        for (std::size_t i = 0; i < nodes; ++i) f[i] = std::sin(h * static_cast<double>(i));
        const auto df = d.apply(std::span<const double>(f));
        double m = 0.0;
        for (std::size_t i = 0; i < nodes; ++i) m = std::max(m, std::abs(df[i] - std::cos(h * static_cast<double>(i))));
        return m;
    };
    for (bool periodic : {true, false})
        for (std::size_t acc : {2u, 4u, 6u}) {
            const double order = std::log2(err(32, acc, periodic) / err(64, acc, periodic));
            EXPECT_NEAR(order, static_cast<double>(acc), 0.35) << "periodic " << periodic << " acc " << acc;
        }
}
