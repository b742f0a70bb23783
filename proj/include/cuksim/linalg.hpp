#pragma once

// Fixed-size dense vectors and matrices (dimensions 4 and 5) with the
// matrix exponential used for exact piecewise-LTI propagation.

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace cuksim {

template <std::size_t N>
struct Vec {
    std::array<double, N> e{};

    double& operator[](std::size_t i) { return e[i]; }
    const double& operator[](std::size_t i) const { return e[i]; }

    static constexpr std::size_t size() { return N; }
};

using Vec4 = Vec<4>;
using Vec5 = Vec<5>;

template <std::size_t N>
struct Mat {
    std::array<double, N * N> e{};

    double& operator()(std::size_t r, std::size_t c) { return e[r * N + c]; }
    const double& operator()(std::size_t r, std::size_t c) const { return e[r * N + c]; }

    static Mat identity() {
        Mat m;
        for (std::size_t i = 0; i < N; ++i) m(i, i) = 1.0;
        return m;
    }

    static constexpr std::size_t size() { return N; }
};

using Mat4 = Mat<4>;
using Mat5 = Mat<5>;

template <std::size_t N>
inline Vec<N> operator+(const Vec<N>& a, const Vec<N>& b) {
    Vec<N> r;
    for (std::size_t i = 0; i < N; ++i) r[i] = a[i] + b[i];
    return r;
}

template <std::size_t N>
inline Vec<N> operator-(const Vec<N>& a, const Vec<N>& b) {
    Vec<N> r;
    for (std::size_t i = 0; i < N; ++i) r[i] = a[i] - b[i];
    return r;
}

template <std::size_t N>
inline Vec<N> operator*(double s, const Vec<N>& v) {
    Vec<N> r;
    for (std::size_t i = 0; i < N; ++i) r[i] = s * v[i];
    return r;
}

template <std::size_t N>
inline Mat<N> operator+(const Mat<N>& a, const Mat<N>& b) {
    Mat<N> r;
    for (std::size_t i = 0; i < N * N; ++i) r.e[i] = a.e[i] + b.e[i];
    return r;
}

template <std::size_t N>
inline Mat<N> operator*(double s, const Mat<N>& m) {
    Mat<N> r;
    for (std::size_t i = 0; i < N * N; ++i) r.e[i] = s * m.e[i];
    return r;
}

template <std::size_t N>
inline Mat<N> operator*(const Mat<N>& a, const Mat<N>& b) {
    Mat<N> r;
    for (std::size_t i = 0; i < N; ++i) {
        for (std::size_t k = 0; k < N; ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < N; ++j) r(i, j) += aik * b(k, j);
        }
    }
    return r;
}

/// Standard matrix-vector product.
template <std::size_t N>
inline Vec<N> mat_vec(const Mat<N>& m, const Vec<N>& v) {
    Vec<N> r;
    for (std::size_t i = 0; i < N; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < N; ++j) s += m(i, j) * v[j];
        r[i] = s;
    }
    return r;
}

template <std::size_t N>
inline Vec<N> operator*(const Mat<N>& m, const Vec<N>& v) {
    return mat_vec(m, v);
}

template <std::size_t N>
inline double dot(const Vec<N>& a, const Vec<N>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < N; ++i) s += a[i] * b[i];
    return s;
}

template <std::size_t N>
inline double max_abs(const Vec<N>& v) {
    double m = 0.0;
    for (std::size_t i = 0; i < N; ++i) m = std::max(m, std::abs(v[i]));
    return m;
}

template <std::size_t N>
inline double max_abs(const Mat<N>& m) {
    double r = 0.0;
    for (std::size_t i = 0; i < N * N; ++i) r = std::max(r, std::abs(m.e[i]));
    return r;
}

/// Maximum row sum of absolute values.
template <std::size_t N>
inline double infinity_norm(const Mat<N>& m) {
    double worst = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < N; ++j) row += std::abs(m(i, j));
        worst = std::max(worst, row);
    }
    return worst;
}

template <std::size_t N>
inline bool all_finite(const Vec<N>& v) {
    for (std::size_t i = 0; i < N; ++i)
        if (!std::isfinite(v[i])) return false;
    return true;
}

template <std::size_t N>
inline bool all_finite(const Mat<N>& m) {
    for (std::size_t i = 0; i < N * N; ++i)
        if (!std::isfinite(m.e[i])) return false;
    return true;
}

/// Augmented matrix [A b; 0 0] whose exponential carries the affine flow.
inline Mat5 augment(const Mat4& a, const Vec4& b) {
    Mat5 m;
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j < 4; ++j) m(i, j) = a(i, j);
        m(i, 4) = b[i];
    }
    return m;
}

/// exp(M*t) by scaling-and-squaring: the scaled matrix has infinity norm
/// <= 0.5, where the truncated Taylor series converges to machine accuracy.
template <std::size_t N>
inline Mat<N> mat_exp(const Mat<N>& m, double t) {
    if (!all_finite(m) || !std::isfinite(t))
        throw std::invalid_argument("mat_exp: non-finite input");
    if (t < 0.0)
        throw std::invalid_argument("mat_exp: negative time");

    Mat<N> scaled = t * m;
    double norm = infinity_norm(scaled);
    if (norm == 0.0) return Mat<N>::identity();

    int squarings = 0;
    while (norm > 0.5) {
        norm *= 0.5;
        ++squarings;
    }
    scaled = std::ldexp(1.0, -squarings) * scaled;

    Mat<N> sum = Mat<N>::identity();
    Mat<N> term = scaled;
    for (int k = 2; k <= 40; ++k) {
        sum = sum + term;
        term = (1.0 / k) * (term * scaled);
        if (max_abs(term) <= 1e-20 * std::max(1.0, max_abs(sum))) break;
    }
    sum = sum + term;

    for (int s = 0; s < squarings; ++s) sum = sum * sum;
    return sum;
}

}  // namespace cuksim
