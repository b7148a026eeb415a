#ifndef NFT_FFT_HPP
#define NFT_FFT_HPP

// Radix-2 FFT, FFT-based convolution and chirp-Z evaluation on unit-circle arcs.
//
// Everything here is templated on the real scalar type. Transform lengths are
// powers of two; callers pad with zeros.

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <numbers>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace nft {

template <typename T>
using Complex = std::complex<T>;

inline std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

namespace detail {

// Forward twiddles exp(-2 pi i k / n), k < n/2. Each entry is computed
// directly so there is no recurrence drift for long transforms.
template <typename T>
const std::vector<Complex<T>>& twiddles(std::size_t n) {
  thread_local std::unordered_map<std::size_t,
                                  std::unique_ptr<std::vector<Complex<T>>>>
      cache;
  auto& slot = cache[n];
  if (!slot) {
    slot = std::make_unique<std::vector<Complex<T>>>(n / 2);
    for (std::size_t k = 0; k < n / 2; ++k) {
      const long double ang =
          -2.0L * std::numbers::pi_v<long double> * static_cast<long double>(k) /
          static_cast<long double>(n);
      (*slot)[k] = Complex<T>(static_cast<T>(std::cos(ang)),
                              static_cast<T>(std::sin(ang)));
    }
  }
  return *slot;
}

}  // namespace detail

/// In-place radix-2 decimation-in-time FFT. The inverse transform is scaled
/// by 1/n so that fft(ifft(x)) == x.
template <typename T>
void fft_inplace(std::span<Complex<T>> x, bool inverse = false) {
  const std::size_t n = x.size();
  if (!is_pow2(n)) throw std::invalid_argument("fft: length must be a power of two");
  if (n == 1) return;

  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(x[i], x[j]);
  }

  const auto& tw = detail::twiddles<T>(n);
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len / 2;
    const std::size_t stride = n / len;
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t k = 0; k < half; ++k) {
        Complex<T> w = tw[k * stride];
        if (inverse) w = std::conj(w);
        const Complex<T> u = x[i + k];
        const Complex<T> v = x[i + k + half] * w;
        x[i + k] = u + v;
        x[i + k + half] = u - v;
      }
    }
  }
  if (inverse) {
    const T scale = T(1) / static_cast<T>(n);
    for (auto& v : x) v *= scale;
  }
}

template <typename T>
std::vector<Complex<T>> fft(std::vector<Complex<T>> x, bool inverse = false) {
  fft_inplace<T>(x, inverse);
  return x;
}

/// Linear convolution via zero-padded FFTs.
template <typename T>
std::vector<Complex<T>> convolve(std::span<const Complex<T>> a,
                                 std::span<const Complex<T>> b) {
  if (a.empty() || b.empty()) return {};
  const std::size_t out = a.size() + b.size() - 1;
  const std::size_t n = next_pow2(out);
  std::vector<Complex<T>> fa(n), fb(n);
  std::copy(a.begin(), a.end(), fa.begin());
  std::copy(b.begin(), b.end(), fb.begin());
  fft_inplace<T>(fa);
  fft_inplace<T>(fb);
  for (std::size_t i = 0; i < n; ++i) fa[i] *= fb[i];
  fft_inplace<T>(fa, true);
  fa.resize(out);
  return fa;
}

/// Schoolbook O(N^2) convolution.
template <typename T>
std::vector<Complex<T>> convolve_direct(std::span<const Complex<T>> a,
                                        std::span<const Complex<T>> b) {
  if (a.empty() || b.empty()) return {};
  std::vector<Complex<T>> c(a.size() + b.size() - 1);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
  return c;
}

namespace detail {

// exp(i * delta * n^2 / 2) with the angle reduced in extended precision;
// n^2 reaches 1e11 for the transform sizes used here.
template <typename T>
Complex<T> chirp(long double delta, std::int64_t n) {
  const long double two_pi = 2.0L * std::numbers::pi_v<long double>;
  const long double n2 = static_cast<long double>(n) * static_cast<long double>(n);
  long double ang = std::fmod(delta * n2 * 0.5L, two_pi);
  return Complex<T>(static_cast<T>(std::cos(ang)), static_cast<T>(std::sin(ang)));
}

}  // namespace detail

/// Evaluates p(z) = sum_n coeffs[n] z^n at the M points
/// z_k = exp(i (theta0 + k dtheta)), k = 0..M-1 (Bluestein chirp-Z).
template <typename T>
std::vector<Complex<T>> czt_unit_arc(std::span<const Complex<T>> coeffs,
                                     T theta0, T dtheta, std::size_t m) {
  const std::size_t n = coeffs.size();
  if (n == 0 || m == 0) return std::vector<Complex<T>>(m);
  const std::size_t len = next_pow2(n + m - 1);
  const long double delta = dtheta;
  const long double two_pi = 2.0L * std::numbers::pi_v<long double>;

  std::vector<Complex<T>> a(len), b(len);
  for (std::size_t i = 0; i < n; ++i) {
    const long double ang =
        std::fmod(static_cast<long double>(theta0) * static_cast<long double>(i), two_pi);
    const Complex<T> rot(static_cast<T>(std::cos(ang)), static_cast<T>(std::sin(ang)));
    a[i] = coeffs[i] * rot * detail::chirp<T>(delta, static_cast<std::int64_t>(i));
  }
  for (std::size_t j = 0; j < m; ++j)
    b[j] = std::conj(detail::chirp<T>(delta, static_cast<std::int64_t>(j)));
  for (std::size_t j = 1; j < n; ++j)
    b[len - j] = std::conj(detail::chirp<T>(delta, static_cast<std::int64_t>(j)));

  fft_inplace<T>(a);
  fft_inplace<T>(b);
  for (std::size_t i = 0; i < len; ++i) a[i] *= b[i];
  fft_inplace<T>(a, true);

  std::vector<Complex<T>> out(m);
  for (std::size_t k = 0; k < m; ++k)
    out[k] = a[k] * detail::chirp<T>(delta, static_cast<std::int64_t>(k));
  return out;
}

/// DFT of arbitrary length: radix-2 when possible, Bluestein otherwise.
/// Forward sign is exp(-2 pi i n k / N); the inverse is scaled by 1/N.
template <typename T>
std::vector<Complex<T>> dft(std::span<const Complex<T>> x, bool inverse = false) {
  const std::size_t n = x.size();
  if (n == 0) return {};
  if (is_pow2(n)) {
    std::vector<Complex<T>> y(x.begin(), x.end());
    fft_inplace<T>(y, inverse);
    return y;
  }
  const T sign = inverse ? T(1) : T(-1);
  const T dtheta = sign * T(2) * std::numbers::pi_v<T> / static_cast<T>(n);
  auto y = czt_unit_arc<T>(x, T(0), dtheta, n);
  if (inverse)
    for (auto& v : y) v /= static_cast<T>(n);
  return y;
}

}  // namespace nft

#endif  // NFT_FFT_HPP
