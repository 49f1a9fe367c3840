#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "curveflow/curve.hpp"
#include "curveflow/error.hpp"
#include "curveflow/minkowski.hpp"

namespace curveflow {

inline constexpr double kGenericityTolerance = 1e-7;

/// Frenet apparatus along a sampled curve. Indices follow the usual
/// convention: V(1..n), k(1..n-1), eps(0..n-1) with <V_i, V_i> = eps(i-1).
struct FrenetData {
    std::size_t dim = 0;
    std::vector<int> signs;
    std::vector<std::vector<MinkVector>> frame;       // frame[i-1][sample] = V_i
    std::vector<std::vector<double>> curvatures;      // k_i from <dV_i/ds, V_{i+1}>
    std::vector<std::vector<double>> gs_curvatures;   // k_i from Gram-Schmidt norms
    std::vector<char> completed;                      // V_n from the orthogonal completion

    std::size_t size() const noexcept { return frame.empty() ? 0 : frame.front().size(); }
    int eps(std::size_t i) const noexcept { return signs[i]; }
    const MinkVector& V(std::size_t i, std::size_t sample) const noexcept { return frame[i - 1][sample]; }
    const std::vector<MinkVector>& V(std::size_t i) const noexcept { return frame[i - 1]; }
    double k(std::size_t i, std::size_t sample) const noexcept { return curvatures[i - 1][sample]; }
    const std::vector<double>& k(std::size_t i) const noexcept { return curvatures[i - 1]; }
};

namespace detail {

inline double determinant(std::vector<std::vector<double>> a) {
    const std::size_t n = a.size();
    double det = 1.0;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        if (a[piv][col] == 0.0) return 0.0;
        if (piv != col) {
            std::swap(a[piv], a[col]);
            det = -det;
        }
        det *= a[col][col];
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r][col] / a[col][col];
            for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
        }
    }
    return det;
}

inline double orientation(const std::vector<MinkVector>& basis) {
    const std::size_t n = basis.size();
    std::vector<std::vector<double>> m(n, std::vector<double>(n));
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) m[r][c] = basis[c][r];
    return determinant(std::move(m));
}

// Unit vector spanning the orthogonal complement of an orthonormal set of
// n-1 vectors, oriented so that the full basis has positive determinant.
inline std::pair<MinkVector, int> complete_basis(const std::vector<MinkVector>& partial,
                                                 const std::vector<int>& signs, std::size_t sample) {
    const std::size_t n = partial.front().dim();
    MinkVector best(n);
    double best_size = -1.0;
    for (std::size_t m = 0; m < n; ++m) {
        MinkVector r = MinkVector::basis(n, m);
        for (int pass = 0; pass < 2; ++pass)
            for (std::size_t j = 0; j < partial.size(); ++j)
                r.axpy(-signs[j] * inner(r, partial[j]), partial[j]);
        const double size = euclidean_norm(r);
        if (size > best_size) {
            best_size = size;
            best = r;
        }
    }
    const double q = inner(best, best);
    if (best_size <= kGenericityTolerance || std::abs(q) <= kGenericityTolerance * best_size * best_size)
        throw NonGenericCurve(static_cast<int>(n), sample);
    const int sign = q < 0.0 ? -1 : 1;
    best /= std::sqrt(std::abs(q));
    std::vector<MinkVector> full = partial;
    full.push_back(best);
    if (orientation(full) < 0.0) best *= -1.0;
    return {best, sign};
}

} // namespace detail

/// Frame by indefinite Gram-Schmidt on the curve's derivative vectors,
/// curvatures by projecting d/ds of the frame.
inline FrenetData frenet_apparatus(const SampledCurve& c) {
    const std::size_t n = c.dim();
    const std::size_t count = c.size();
    FrenetData fd;
    fd.dim = n;
    fd.frame.assign(n, std::vector<MinkVector>(count, MinkVector(n)));
    fd.gs_curvatures.assign(n - 1, std::vector<double>(count, 0.0));
    fd.completed.assign(count, 0);

    std::vector<MinkVector> basis;
    std::vector<int> signs;
    std::vector<double> w_norms(n);
    for (std::size_t s = 0; s < count; ++s) {
        basis.clear();
        signs.clear();
        for (std::size_t i = 1; i <= n; ++i) {
            const MinkVector& a = c.derivative(i, s);
            MinkVector w = a;
            for (int pass = 0; pass < 2; ++pass)
                for (std::size_t j = 0; j < basis.size(); ++j)
                    w.axpy(-signs[j] * inner(w, basis[j]), basis[j]);
            const double wn = norm(w);
            const double scale = euclidean_norm(a);
            const bool degenerate = scale == 0.0 || wn <= kGenericityTolerance * scale;
            if (degenerate) {
                if (i < n) throw NonGenericCurve(static_cast<int>(i), s);
                auto [v, sign] = detail::complete_basis(basis, signs, s);
                basis.push_back(v);
                signs.push_back(sign);
                w_norms[i - 1] = 0.0;
                fd.completed[s] = 1;
            } else {
                w_norms[i - 1] = wn;
                signs.push_back(inner(w, w) < 0.0 ? -1 : 1);
                basis.push_back(w / wn);
            }
        }
        if (s == 0) {
            fd.signs = signs;
            if (std::count(signs.begin(), signs.end(), -1) != 1)
                throw NonGenericCurve(static_cast<int>(n), s);
        } else if (signs != fd.signs) {
            std::size_t i = 0;
            while (signs[i] == fd.signs[i]) ++i;
            throw NonGenericCurve(static_cast<int>(i + 1), s);
        }
        for (std::size_t i = 0; i < n; ++i) fd.frame[i][s] = basis[i];
        const double v = c.speeds()[s];
        for (std::size_t i = 1; i < n; ++i)
            fd.gs_curvatures[i - 1][s] = w_norms[i] == 0.0 ? 0.0 : w_norms[i] / (v * w_norms[i - 1]);
    }

    fd.curvatures.assign(n - 1, std::vector<double>(count, 0.0));
    for (std::size_t i = 1; i < n; ++i) {
        const auto dV = d_ds(fd.frame[i - 1], c);
        for (std::size_t s = 0; s < count; ++s)
            fd.curvatures[i - 1][s] = fd.signs[i] * inner(dV[s], fd.frame[i][s]);
    }
    return fd;
}

/// |dV_i/ds - RHS_i| (Euclidean) per sample, for i = 1..n, where RHS is the
/// Frenet system V_i' = -eps_{i-2} eps_{i-1} k_{i-1} V_{i-1} + k_i V_{i+1}
/// and V_n' has no V_{n+1} term. The right-hand side uses the Gram-Schmidt
/// curvatures, so for jet-sampled curves the residual is the differencing
/// error of d/ds alone.
inline std::vector<std::vector<double>> frenet_residuals(const SampledCurve& c, const FrenetData& fd) {
    const std::size_t n = fd.dim;
    const std::size_t count = fd.size();
    std::vector<std::vector<double>> out(n, std::vector<double>(count, 0.0));
    for (std::size_t i = 1; i <= n; ++i) {
        const auto dV = d_ds(fd.V(i), c);
        for (std::size_t s = 0; s < count; ++s) {
            MinkVector r = dV[s];
            if (i > 1)
                r.axpy(fd.eps(i - 2) * fd.eps(i - 1) * fd.gs_curvatures[i - 2][s], fd.V(i - 1, s));
            if (i < n) r.axpy(-fd.gs_curvatures[i - 1][s], fd.V(i + 1, s));
            out[i - 1][s] = euclidean_norm(r);
        }
    }
    return out;
}

inline double max_frenet_residual(const SampledCurve& c, const FrenetData& fd) {
    double m = 0.0;
    for (const auto& row : frenet_residuals(c, fd))
        for (double r : row) m = std::max(m, r);
    return m;
}

/// max |<V_i, V_j> - eps_{i-1} delta_ij| over all samples.
inline double orthonormality_defect(const FrenetData& fd) {
    double m = 0.0;
    for (std::size_t s = 0; s < fd.size(); ++s)
        for (std::size_t i = 1; i <= fd.dim; ++i)
            for (std::size_t j = i; j <= fd.dim; ++j) {
                const double target = i == j ? fd.eps(i - 1) : 0.0;
                m = std::max(m, std::abs(inner(fd.V(i, s), fd.V(j, s)) - target));
            }
    return m;
}

} // namespace curveflow
