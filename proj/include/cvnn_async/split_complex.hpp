/**
 * @file split_complex.hpp
 * @brief Complex scalars stored as explicit (real, imaginary) pairs.
 *
 * Products are evaluated through the constant 2x2 matrices M^R and M^I:
 * for a = (a^R, a^I) and b = (b^R, b^I),
 *
 *     (ab)^R = a^T M^R b,   (ab)^I = a^T M^I b,
 *
 * with M^R = [[1, 0], [0, -1]] and M^I = [[0, 1], [1, 0]]. The bilinear forms
 * are evaluated literally so the decomposition itself stays under test.
 */
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace cvnn {

using Vec2 = std::array<double, 2>;
using Mat2 = std::array<std::array<double, 2>, 2>;

struct SplitComplex {
    double re = 0.0;
    double im = 0.0;

    constexpr SplitComplex() = default;
    constexpr SplitComplex(double r, double i) : re(r), im(i) {}

    [[nodiscard]] constexpr SplitComplex operator-() const { return {-re, -im}; }
    constexpr SplitComplex& operator+=(const SplitComplex& o) {
        re += o.re;
        im += o.im;
        return *this;
    }
    constexpr SplitComplex& operator-=(const SplitComplex& o) {
        re -= o.re;
        im -= o.im;
        return *this;
    }
    constexpr SplitComplex& operator*=(double s) {
        re *= s;
        im *= s;
        return *this;
    }
    friend constexpr SplitComplex operator+(SplitComplex a, const SplitComplex& b) { return a += b; }
    friend constexpr SplitComplex operator-(SplitComplex a, const SplitComplex& b) { return a -= b; }
    friend constexpr SplitComplex operator*(double s, SplitComplex a) { return a *= s; }
    friend constexpr SplitComplex operator*(SplitComplex a, double s) { return a *= s; }
    friend constexpr bool operator==(const SplitComplex&, const SplitComplex&) = default;

    [[nodiscard]] bool finite() const { return std::isfinite(re) && std::isfinite(im); }
};

/// Builds a SplitComplex and rejects NaN/inf parts.
inline SplitComplex make_split(double re, double im) {
    SplitComplex z{re, im};
    if (!z.finite()) throw std::invalid_argument("SplitComplex: non-finite component");
    return z;
}

using SplitVector = std::vector<SplitComplex>;
/// Row-major n x n grid of complex entries.
using SplitMatrix = std::vector<SplitVector>;

struct MMatrices {
    static constexpr Mat2 real{{{1.0, 0.0}, {0.0, -1.0}}};
    static constexpr Mat2 imag{{{0.0, 1.0}, {1.0, 0.0}}};
};

[[nodiscard]] constexpr Vec2 hat(const SplitComplex& a) { return {a.re, a.im}; }

/// u^T M v
[[nodiscard]] constexpr double bilinear(const Vec2& u, const Mat2& m, const Vec2& v) {
    return u[0] * (m[0][0] * v[0] + m[0][1] * v[1]) + u[1] * (m[1][0] * v[0] + m[1][1] * v[1]);
}

[[nodiscard]] constexpr SplitComplex product_split(const SplitComplex& a, const SplitComplex& b) {
    const Vec2 ah = hat(a);
    const Vec2 bh = hat(b);
    return {bilinear(ah, MMatrices::real, bh), bilinear(ah, MMatrices::imag, bh)};
}

[[nodiscard]] inline Vec2 abs_pair(const SplitComplex& a) { return {std::fabs(a.re), std::fabs(a.im)}; }

[[nodiscard]] constexpr double pos_part(double a) { return a > 0.0 ? a : 0.0; }

// Small fixed-size helpers used by the threshold formulas.

[[nodiscard]] constexpr double dot(const Vec2& u, const Vec2& v) { return u[0] * v[0] + u[1] * v[1]; }

[[nodiscard]] constexpr Vec2 mat_vec(const Mat2& m, const Vec2& v) {
    return {m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]};
}

/// Row swap; turns a bar-matrix into its tilde counterpart.
[[nodiscard]] constexpr Mat2 row_swap(const Mat2& m) { return {m[1], m[0]}; }

[[nodiscard]] inline SplitVector zeros(std::size_t n) { return SplitVector(n); }

[[nodiscard]] inline SplitMatrix zeros(std::size_t rows, std::size_t cols) {
    return SplitMatrix(rows, SplitVector(cols));
}

}  // namespace cvnn
