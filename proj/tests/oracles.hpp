#pragma once

// Independent reference computations used only by the test suites. Nothing
// here calls into the Jacobi solver or the singular-value path it checks.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>

#include "platoon/linalg.hpp"

namespace oracle {

using platoon::Mat4;
using platoon::Vec4;

// Householder reduction of symmetric `a` to tridiagonal form (diag d, off-diag e).
struct Tridiagonal {
    std::array<double, 4> d{};
    std::array<double, 3> e{};
};

inline Tridiagonal tridiagonalise(const Mat4& a) {
    std::array<std::array<double, 4>, 4> m{};
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) m[r][c] = a(r, c);
    for (int k = 0; k < 2; ++k) {
        double alpha = 0.0;
        for (int r = k + 1; r < 4; ++r) alpha += m[r][k] * m[r][k];
        alpha = std::sqrt(alpha);
        if (alpha == 0.0) continue;
        if (m[k + 1][k] > 0.0) alpha = -alpha;
        std::array<double, 4> v{};
        v[k + 1] = m[k + 1][k] - alpha;
        for (int r = k + 2; r < 4; ++r) v[r] = m[r][k];
        double vv = 0.0;
        for (double x : v) vv += x * x;
        if (vv == 0.0) continue;
        // m <- H m H with H = I - 2 v v^T / (v^T v).
        std::array<std::array<double, 4>, 4> h{};
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c) h[r][c] = (r == c ? 1.0 : 0.0) - 2.0 * v[r] * v[c] / vv;
        std::array<std::array<double, 4>, 4> t{}, out{};
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c)
                for (int j = 0; j < 4; ++j) t[r][c] += h[r][j] * m[j][c];
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c)
                for (int j = 0; j < 4; ++j) out[r][c] += t[r][j] * h[j][c];
        m = out;
    }
    Tridiagonal t;
    for (int i = 0; i < 4; ++i) t.d[i] = m[i][i];
    for (int i = 0; i < 3; ++i) t.e[i] = m[i + 1][i];
    return t;
}

// Number of eigenvalues strictly below x, by the Sturm sequence of the
// tridiagonal form (signs of the LDL^T pivots of T - xI).
inline int count_below(const Tridiagonal& t, double x) {
    int negatives = 0;
    double piv = 1.0;
    for (int i = 0; i < 4; ++i) {
        piv = t.d[i] - x - (i > 0 ? t.e[i - 1] * t.e[i - 1] / piv : 0.0);
        if (piv == 0.0) piv = -1e-300;
        if (piv < 0.0) ++negatives;
    }
    return negatives;
}

// Eigenvalues of a symmetric matrix by bisection on the inertia count,
// bracketed by Gershgorin discs. Ascending order.
inline Vec4 bisection_eigenvalues(const Mat4& a) {
    const Tridiagonal tri = tridiagonalise(a);
    double lo = 0.0, hi = 0.0;
    for (int r = 0; r < 4; ++r) {
        double radius = 0.0;
        for (int c = 0; c < 4; ++c)
            if (c != r) radius += std::abs(a(r, c));
        lo = std::min(lo, a(r, r) - radius);
        hi = std::max(hi, a(r, r) + radius);
    }
    lo -= 1.0;
    hi += 1.0;
    Vec4 out{};
    for (int k = 0; k < 4; ++k) {
        double l = lo, h = hi;
        for (int it = 0; it < 200 && h - l > 1e-15 * std::max(1.0, std::abs(l) + std::abs(h)); ++it) {
            const double mid = 0.5 * (l + h);
            if (count_below(tri, mid) > k) h = mid; else l = mid;
        }
        out[k] = 0.5 * (l + h);
    }
    return out;
}

inline double mu2(const Mat4& a) { return bisection_eigenvalues(a.symmetric_part())[3]; }

// sigma_max by power iteration on A^T A with a Rayleigh-quotient readout.
inline double power_spectral_norm(const Mat4& a, int iterations = 20000) {
    const Mat4 ata = a.transpose() * a;
    Vec4 v{1.0, 0.7, -0.3, 0.2};
    double lambda = 0.0;
    for (int it = 0; it < iterations; ++it) {
        Vec4 w = ata * v;
        const double n = platoon::norm2(w);
        if (n == 0.0) return 0.0;
        for (auto& x : w) x /= n;
        const Vec4 aw = ata * w;
        double next = 0.0;
        for (int i = 0; i < 4; ++i) next += w[i] * aw[i];
        v = w;
        if (it > 50 && std::abs(next - lambda) <= 1e-17 * std::max(1.0, next)) {
            lambda = next;
            break;
        }
        lambda = next;
    }
    return std::sqrt(std::max(0.0, lambda));
}

inline Mat4 random_matrix(std::mt19937_64& rng, double scale = 1.0) {
    std::uniform_real_distribution<double> u(-scale, scale);
    Mat4 m;
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) m(r, c) = u(rng);
    return m;
}

inline Mat4 random_symmetric(std::mt19937_64& rng, double scale = 1.0) {
    return random_matrix(rng, scale).symmetric_part();
}

}  // namespace oracle
