#ifndef NFT_LINALG_HPP
#define NFT_LINALG_HPP

// 2x2 complex matrices and 2x2 matrices of polynomials.
//
// A PolyMat2 represents the rational matrix P(z) * z^(-denom_power), where the
// four entries of P are dense polynomials in z stored in ascending degree and
// zero-padded to a common length.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "nft/fft.hpp"

namespace nft {

template <typename T>
using Mat2 = Eigen::Matrix<std::complex<T>, 2, 2>;

template <typename T>
using Vec2 = Eigen::Matrix<std::complex<T>, 2, 1>;

using Mat2d = Mat2<double>;
using Vec2d = Vec2<double>;

namespace detail {

// cosh(w) and sinh(w)/w as functions of w^2 (both are even in w).
template <typename T>
std::pair<Complex<T>, Complex<T>> cosh_sinhc(Complex<T> w2) {
  if (std::abs(w2) < T(1e-8)) {
    return {T(1) + w2 / T(2) + w2 * w2 / T(24), T(1) + w2 / T(6) + w2 * w2 / T(120)};
  }
  if (w2.imag() == T(0)) {
    const T x = w2.real();
    if (x < 0) {
      const T th = std::sqrt(-x);
      return {std::cos(th), std::sin(th) / th};
    }
    const T th = std::sqrt(x);
    return {std::cosh(th), std::sinh(th) / th};
  }
  const Complex<T> w = std::sqrt(w2);
  return {std::cosh(w), std::sinh(w) / w};
}

// d/d(w^2) of sinh(w)/w.
template <typename T>
Complex<T> dsinhc_dw2(Complex<T> w2, Complex<T> c, Complex<T> s) {
  if (std::abs(w2) < T(1e-3)) {
    return T(1) / T(6) + w2 * (T(1) / T(60) + w2 * (T(1) / T(1680) + w2 / T(90720)));
  }
  return (c - s) / (T(2) * w2);
}

template <typename T>
void require_traceless(const Mat2<T>& b) {
  const T scale = T(1) + b.cwiseAbs().maxCoeff();
  if (std::abs(b(0, 0) + b(1, 1)) > T(1e-12) * scale)
    throw std::invalid_argument("expm_traceless: matrix is not traceless");
}

}  // namespace detail

template <typename T>
Mat2<T> expm_traceless_unchecked(const Mat2<T>& b);

/// Closed-form exponential of a traceless 2x2 matrix:
/// expm(B) = cosh(w) I + sinh(w)/w B with w^2 = B11^2 + B12 B21.
template <typename T>
Mat2<T> expm_traceless(const Mat2<T>& b) {
  detail::require_traceless(b);
  return expm_traceless_unchecked(b);
}

/// Hot-path variant for callers that build B with an exactly traceless
/// diagonal.
template <typename T>
Mat2<T> expm_traceless_unchecked(const Mat2<T>& b) {
  const Complex<T> w2 = b(0, 0) * b(0, 0) + b(0, 1) * b(1, 0);
  const auto [c, s] = detail::cosh_sinhc(w2);
  Mat2<T> e = s * b;
  e(0, 0) += c;
  e(1, 1) += c;
  return e;
}

/// expm(B) together with its derivative along a parameter that moves only the
/// diagonal of B, dB = diag(d11, -d11).
template <typename T>
std::pair<Mat2<T>, Mat2<T>> expm_traceless_with_derivative(const Mat2<T>& b,
                                                           Complex<T> d11) {
  const Complex<T> w2 = b(0, 0) * b(0, 0) + b(0, 1) * b(1, 0);
  const auto [c, s] = detail::cosh_sinhc(w2);
  const Complex<T> dw2 = T(2) * b(0, 0) * d11;
  const Complex<T> dc = s * dw2 / T(2);
  const Complex<T> ds = detail::dsinhc_dw2(w2, c, s) * dw2;

  Mat2<T> e = s * b;
  e(0, 0) += c;
  e(1, 1) += c;

  Mat2<T> de = ds * b;
  de(0, 0) += dc + s * d11;
  de(1, 1) += dc - s * d11;
  return {e, de};
}

/// 2x2 matrix whose entries are polynomials in z, divided by z^denom_power.
template <typename T>
struct PolyMat2 {
  using Poly = std::vector<Complex<T>>;

  // Entries in row-major order: 11, 12, 21, 22.
  std::array<Poly, 4> p;
  int denom_power = 0;

  PolyMat2() = default;

  PolyMat2(std::size_t degree, int denom) : denom_power(denom) {
    for (auto& e : p) e.assign(degree + 1, Complex<T>(0));
  }

  static PolyMat2 identity() {
    PolyMat2 m(0, 0);
    m.p[0][0] = m.p[3][0] = Complex<T>(1);
    return m;
  }

  /// Constant (z-free) matrix.
  static PolyMat2 constant(const Mat2<T>& a) {
    PolyMat2 m(0, 0);
    m.p[0][0] = a(0, 0);
    m.p[1][0] = a(0, 1);
    m.p[2][0] = a(1, 0);
    m.p[3][0] = a(1, 1);
    return m;
  }

  std::size_t degree() const { return p[0].empty() ? 0 : p[0].size() - 1; }

  Poly& operator()(int i, int j) { return p[2 * i + j]; }
  const Poly& operator()(int i, int j) const { return p[2 * i + j]; }

  /// Coefficient matrix of z^k.
  Mat2<T> coefficient(std::size_t k) const {
    Mat2<T> c;
    c << p[0][k], p[1][k], p[2][k], p[3][k];
    return c;
  }

  void set_coefficient(std::size_t k, const Mat2<T>& c) {
    p[0][k] = c(0, 0);
    p[1][k] = c(0, 1);
    p[2][k] = c(1, 0);
    p[3][k] = c(1, 1);
  }
};

using PolyMat2d = PolyMat2<double>;

/// Horner evaluation of a polynomial (ascending coefficients).
template <typename T>
Complex<T> polyval(std::span<const Complex<T>> c, Complex<T> z) {
  Complex<T> acc(0);
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * z + *it;
  return acc;
}

/// Evaluates P(z) z^(-denom_power).
template <typename T>
Mat2<T> evaluate(const PolyMat2<T>& m, Complex<T> z) {
  Mat2<T> r;
  r << polyval<T>(m.p[0], z), polyval<T>(m.p[1], z), polyval<T>(m.p[2], z),
      polyval<T>(m.p[3], z);
  return r * std::pow(z, -m.denom_power);
}

/// Schoolbook product; O(degA * degB).
template <typename T>
PolyMat2<T> polymat_mul_direct(const PolyMat2<T>& a, const PolyMat2<T>& b) {
  PolyMat2<T> c(a.degree() + b.degree(), a.denom_power + b.denom_power);
  const std::size_t na = a.degree() + 1, nb = b.degree() + 1;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      auto& out = c(i, j);
      for (int k = 0; k < 2; ++k) {
        const auto& x = a(i, k);
        const auto& y = b(k, j);
        for (std::size_t s = 0; s < na; ++s) {
          const Complex<T> xs = x[s];
          for (std::size_t t = 0; t < nb; ++t) out[s + t] += xs * y[t];
        }
      }
    }
  return c;
}

/// FFT-based product: 8 forward transforms, pointwise 2x2 products, 4 inverse
/// transforms. Transform length is the next power of two above degA+degB+1.
template <typename T>
PolyMat2<T> polymat_mul(const PolyMat2<T>& a, const PolyMat2<T>& b) {
  const std::size_t deg = a.degree() + b.degree();
  const std::size_t n = next_pow2(deg + 1);
  std::array<std::vector<Complex<T>>, 4> fa, fb;
  for (int e = 0; e < 4; ++e) {
    fa[e].assign(n, Complex<T>(0));
    fb[e].assign(n, Complex<T>(0));
    std::copy(a.p[e].begin(), a.p[e].end(), fa[e].begin());
    std::copy(b.p[e].begin(), b.p[e].end(), fb[e].begin());
    fft_inplace<T>(fa[e]);
    fft_inplace<T>(fb[e]);
  }
  std::array<std::vector<Complex<T>>, 4> fc;
  for (auto& v : fc) v.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    fc[0][k] = fa[0][k] * fb[0][k] + fa[1][k] * fb[2][k];
    fc[1][k] = fa[0][k] * fb[1][k] + fa[1][k] * fb[3][k];
    fc[2][k] = fa[2][k] * fb[0][k] + fa[3][k] * fb[2][k];
    fc[3][k] = fa[2][k] * fb[1][k] + fa[3][k] * fb[3][k];
  }
  PolyMat2<T> c;
  c.denom_power = a.denom_power + b.denom_power;
  for (int e = 0; e < 4; ++e) {
    fft_inplace<T>(fc[e], true);
    fc[e].resize(deg + 1);
    c.p[e] = std::move(fc[e]);
  }
  return c;
}

}  // namespace nft

#endif  // NFT_LINALG_HPP
