#pragma once

#include <array>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <stdexcept>
#include <string>

namespace platoon {

// ============================================================================
// Errors
// ============================================================================

struct NonFinite : std::domain_error {
    explicit NonFinite(const std::string& what) : std::domain_error(what) {}
};

struct NonSymmetric : std::domain_error {
    explicit NonSymmetric(const std::string& what) : std::domain_error(what) {}
};

struct NotUnitTriangular : std::domain_error {
    explicit NotUnitTriangular(const std::string& what) : std::domain_error(what) {}
};

struct SingularMatrix : std::domain_error {
    explicit SingularMatrix(const std::string& what) : std::domain_error(what) {}
};

// ============================================================================
// Fixed-size types
// ============================================================================

using Vec4 = std::array<double, 4>;

/**
 * Dense 4x4 real matrix, row-major.
 *
 * The row-list constructor rejects NaN/Inf. Arithmetic results are not
 * re-checked; the analysis operations below validate their own inputs.
 */
class Mat4 {
public:
    constexpr Mat4() = default;
    Mat4(std::initializer_list<std::initializer_list<double>> rows);

    static constexpr Mat4 zero() { return Mat4{}; }
    static Mat4 identity();
    static Mat4 diagonal(const Vec4& d);

    constexpr double& operator()(std::size_t r, std::size_t c) { return a_[r][c]; }
    constexpr double operator()(std::size_t r, std::size_t c) const { return a_[r][c]; }

    [[nodiscard]] Mat4 transpose() const;
    [[nodiscard]] Mat4 symmetric_part() const;
    [[nodiscard]] bool all_finite() const;
    [[nodiscard]] double frobenius() const;
    [[nodiscard]] double max_abs() const;

    Mat4& operator+=(const Mat4& o);
    Mat4& operator-=(const Mat4& o);
    Mat4& operator*=(double s);

    friend Mat4 operator+(Mat4 a, const Mat4& b) { return a += b; }
    friend Mat4 operator-(Mat4 a, const Mat4& b) { return a -= b; }
    friend Mat4 operator*(Mat4 a, double s) { return a *= s; }
    friend Mat4 operator*(double s, Mat4 a) { return a *= s; }
    friend Mat4 operator*(const Mat4& a, const Mat4& b);
    friend Vec4 operator*(const Mat4& a, const Vec4& x);
    friend bool operator==(const Mat4&, const Mat4&) = default;

private:
    std::array<std::array<double, 4>, 4> a_{};
};

double norm2(const Vec4& x);
double norm_inf(const Vec4& x);

// ============================================================================
// Spectral routines
// ============================================================================

struct SpectrumResult {
    Vec4 eigenvalues{};                // ascending
    std::optional<Mat4> eigenvectors;  // columns, orthonormal
};

/// Cyclic Jacobi eigendecomposition of a symmetric 4x4 matrix.
/// Throws NonFinite or NonSymmetric.
SpectrumResult sym_eigen(const Mat4& a, bool want_vectors = false);

/// Matrix measure induced by the Euclidean norm: largest eigenvalue of (A+A^T)/2.
double mu2(const Mat4& a);

/// Largest singular value.
double spectral_norm(const Mat4& a);

/// Singular values in ascending order.
Vec4 singular_values(const Mat4& a);

/// Exact inverse of a unit upper-triangular matrix, I - N + N^2 - N^3 with N = T - I.
Mat4 unit_triangular_inverse(const Mat4& t);

/// General inverse by Gauss-Jordan elimination with partial pivoting.
Mat4 inverse(const Mat4& a);

/// Condition number sigma_max / sigma_min.
double condition_number(const Mat4& a);

}  // namespace platoon
