#include "platoon/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "platoon/tolerances.hpp"

namespace platoon {

Mat4::Mat4(std::initializer_list<std::initializer_list<double>> rows) {
    if (rows.size() != 4) throw std::invalid_argument("Mat4 needs 4 rows");
    std::size_t r = 0;
    for (const auto& row : rows) {
        if (row.size() != 4) throw std::invalid_argument("Mat4 rows need 4 entries");
        std::size_t c = 0;
        for (double v : row) {
            if (!std::isfinite(v)) throw NonFinite("Mat4 entry is not finite");
            a_[r][c++] = v;
        }
        ++r;
    }
}

Mat4 Mat4::identity() {
    Mat4 m;
    for (std::size_t i = 0; i < 4; ++i) m(i, i) = 1.0;
    return m;
}

Mat4 Mat4::diagonal(const Vec4& d) {
    Mat4 m;
    for (std::size_t i = 0; i < 4; ++i) m(i, i) = d[i];
    return m;
}

Mat4 Mat4::transpose() const {
    Mat4 t;
    for (std::size_t r = 0; r < 4; ++r)
        for (std::size_t c = 0; c < 4; ++c) t(c, r) = a_[r][c];
    return t;
}

Mat4 Mat4::symmetric_part() const {
    Mat4 s;
    for (std::size_t r = 0; r < 4; ++r)
        for (std::size_t c = 0; c < 4; ++c) s(r, c) = 0.5 * (a_[r][c] + a_[c][r]);
    return s;
}

bool Mat4::all_finite() const {
    for (const auto& row : a_)
        for (double v : row)
            if (!std::isfinite(v)) return false;
    return true;
}

double Mat4::frobenius() const {
    double s = 0.0;
    for (const auto& row : a_)
        for (double v : row) s += v * v;
    return std::sqrt(s);
}

double Mat4::max_abs() const {
    double m = 0.0;
    for (const auto& row : a_)
        for (double v : row) m = std::max(m, std::abs(v));
    return m;
}

Mat4& Mat4::operator+=(const Mat4& o) {
    for (std::size_t r = 0; r < 4; ++r)
        for (std::size_t c = 0; c < 4; ++c) a_[r][c] += o.a_[r][c];
    return *this;
}

Mat4& Mat4::operator-=(const Mat4& o) {
    for (std::size_t r = 0; r < 4; ++r)
        for (std::size_t c = 0; c < 4; ++c) a_[r][c] -= o.a_[r][c];
    return *this;
}

Mat4& Mat4::operator*=(double s) {
    for (auto& row : a_)
        for (double& v : row) v *= s;
    return *this;
}

Mat4 operator*(const Mat4& a, const Mat4& b) {
    Mat4 p;
    for (std::size_t r = 0; r < 4; ++r)
        for (std::size_t c = 0; c < 4; ++c) {
            double s = 0.0;
            for (std::size_t k = 0; k < 4; ++k) s += a(r, k) * b(k, c);
            p(r, c) = s;
        }
    return p;
}

Vec4 operator*(const Mat4& a, const Vec4& x) {
    Vec4 y{};
    for (std::size_t r = 0; r < 4; ++r)
        for (std::size_t c = 0; c < 4; ++c) y[r] += a(r, c) * x[c];
    return y;
}

double norm2(const Vec4& x) {
    return std::sqrt(std::inner_product(x.begin(), x.end(), x.begin(), 0.0));
}

double norm_inf(const Vec4& x) {
    double m = 0.0;
    for (double v : x) m = std::max(m, std::abs(v));
    return m;
}

namespace {

void require_finite(const Mat4& a, const char* who) {
    if (!a.all_finite()) throw NonFinite(std::string(who) + ": matrix has NaN/Inf entries");
}

double off_diagonal_norm(const Mat4& a) {
    double s = 0.0;
    for (std::size_t r = 0; r < 4; ++r)
        for (std::size_t c = 0; c < 4; ++c)
            if (r != c) s += a(r, c) * a(r, c);
    return std::sqrt(s);
}

}  // namespace

SpectrumResult sym_eigen(const Mat4& input, bool want_vectors) {
    require_finite(input, "sym_eigen");
    const double scale = std::max(1.0, input.max_abs());
    for (std::size_t r = 0; r < 4; ++r)
        for (std::size_t c = r + 1; c < 4; ++c)
            if (std::abs(input(r, c) - input(c, r)) > tol::kSymmetry * scale)
                throw NonSymmetric("sym_eigen: input is not symmetric");

    Mat4 a = input.symmetric_part();
    Mat4 v = Mat4::identity();
    const double stop = tol::kJacobiOffDiag * std::max(a.frobenius(), 1e-300);

    for (int sweep = 0; sweep < tol::kJacobiMaxSweeps; ++sweep) {
        if (off_diagonal_norm(a) <= stop) break;
        for (std::size_t p = 0; p < 3; ++p) {
            for (std::size_t q = p + 1; q < 4; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                // Rotation angle zeroing a(p,q); t is the smaller root of t^2 + 2 theta t - 1 = 0.
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = std::copysign(1.0, theta) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < 4; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < 4; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < 4; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::array<std::size_t, 4> order{0, 1, 2, 3};
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });

    SpectrumResult out;
    for (std::size_t i = 0; i < 4; ++i) out.eigenvalues[i] = a(order[i], order[i]);
    if (want_vectors) {
        Mat4 sorted;
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t k = 0; k < 4; ++k) sorted(k, i) = v(k, order[i]);
        out.eigenvectors = sorted;
    }
    return out;
}

double mu2(const Mat4& a) {
    require_finite(a, "mu2");
    return sym_eigen(a.symmetric_part()).eigenvalues[3];
}

Vec4 singular_values(const Mat4& a) {
    require_finite(a, "singular_values");
    const Vec4 lam = sym_eigen((a.transpose() * a).symmetric_part()).eigenvalues;
    Vec4 s{};
    for (std::size_t i = 0; i < 4; ++i) s[i] = std::sqrt(std::max(0.0, lam[i]));
    return s;
}

double spectral_norm(const Mat4& a) { return singular_values(a)[3]; }

double condition_number(const Mat4& a) {
    const Vec4 s = singular_values(a);
    if (s[0] <= tol::kSingular * std::max(1.0, s[3]))
        throw SingularMatrix("condition_number: matrix is singular");
    return s[3] / s[0];
}

Mat4 unit_triangular_inverse(const Mat4& t) {
    require_finite(t, "unit_triangular_inverse");
    for (std::size_t r = 0; r < 4; ++r) {
        if (t(r, r) != 1.0) throw NotUnitTriangular("diagonal entry differs from 1");
        for (std::size_t c = 0; c < r; ++c)
            if (t(r, c) != 0.0) throw NotUnitTriangular("nonzero entry below the diagonal");
    }
    const Mat4 i = Mat4::identity();
    const Mat4 n = t - i;
    const Mat4 n2 = n * n;
    const Mat4 n3 = n2 * n;
    return i - n + n2 - n3;
}

Mat4 inverse(const Mat4& input) {
    require_finite(input, "inverse");
    Mat4 a = input;
    Mat4 inv = Mat4::identity();
    const double scale = std::max(1.0, input.max_abs());
    for (std::size_t col = 0; col < 4; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < 4; ++r)
            if (std::abs(a(r, col)) > std::abs(a(pivot, col))) pivot = r;
        if (std::abs(a(pivot, col)) <= tol::kSingular * scale)
            throw SingularMatrix("inverse: matrix is singular");
        if (pivot != col) {
            for (std::size_t k = 0; k < 4; ++k) {
                std::swap(a(pivot, k), a(col, k));
                std::swap(inv(pivot, k), inv(col, k));
            }
        }
        const double d = a(col, col);
        for (std::size_t k = 0; k < 4; ++k) {
            a(col, k) /= d;
            inv(col, k) /= d;
        }
        for (std::size_t r = 0; r < 4; ++r) {
            if (r == col) continue;
            const double f = a(r, col);
            if (f == 0.0) continue;
            for (std::size_t k = 0; k < 4; ++k) {
                a(r, k) -= f * a(col, k);
                inv(r, k) -= f * inv(col, k);
            }
        }
    }
    return inv;
}

}  // namespace platoon
