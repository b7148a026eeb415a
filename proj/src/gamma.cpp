#include "nft/gamma.hpp"

#include <array>
#include <complex>
#include <cmath>
#include <limits>
#include <numbers>

namespace nft {

namespace {

using cld = std::complex<long double>;

// B_2k / (2k (2k - 1)), k = 1..12.
constexpr std::array<long double, 12> kStirling = {
    1.0L / 12,          -1.0L / 360,          1.0L / 1260,          -1.0L / 1680,
    1.0L / 1188,        -691.0L / 360360,     1.0L / 156,           -3617.0L / 122400,
    43867.0L / 244188,  -174611.0L / 125400,  77683.0L / 5796,      -236364091.0L / 1506960};

constexpr long double kShift = 16.0L;

bool is_pole(std::complex<double> z) {
  return z.imag() == 0.0 && z.real() <= 0.0 && std::floor(z.real()) == z.real();
}

// log(sin(pi z)) without overflow for large |Im z|.
cld log_sin_pi(cld z) {
  constexpr long double pi = std::numbers::pi_v<long double>;
  const long double y = z.imag();
  if (std::abs(y) < 20.0L) return std::log(std::sin(pi * z));
  // sin(pi z) = (e^{i pi z} - e^{-i pi z}) / 2i; keep the dominant exponential.
  const cld i(0.0L, 1.0L);
  if (y > 0) {
    const cld rest = 1.0L - std::exp(2.0L * i * pi * z);
    return -i * pi * z + std::log(rest) - std::log(-2.0L * i);
  }
  const cld rest = 1.0L - std::exp(-2.0L * i * pi * z);
  return i * pi * z + std::log(rest) - std::log(2.0L * i);
}

// Stirling series at |z| >= 16 after upward recurrence, in extended
// precision so the large cancelling terms stay below double rounding.
cld lgamma_ext(cld z) {
  constexpr long double pi = std::numbers::pi_v<long double>;
  if (z.real() < 0.5L) return std::log(pi) - log_sin_pi(z) - lgamma_ext(1.0L - z);
  cld shift = 0.0L;
  while (std::abs(z) < kShift) {
    shift += std::log(z);
    z += 1.0L;
  }
  const cld w = 1.0L / z, w2 = w * w;
  cld series = 0.0L;
  for (auto it = kStirling.rbegin(); it != kStirling.rend(); ++it) series = series * w2 + *it;
  return (z - 0.5L) * std::log(z) - z + 0.5L * std::log(2.0L * pi) + series * w - shift;
}

}  // namespace

std::complex<double> lgamma_complex(std::complex<double> z) {
  if (is_pole(z)) return {std::numeric_limits<double>::infinity(), 0.0};
  const cld r = lgamma_ext(cld(z.real(), z.imag()));
  return {static_cast<double>(r.real()), static_cast<double>(r.imag())};
}

std::complex<double> gamma_complex(std::complex<double> z) {
  if (is_pole(z)) return {std::numeric_limits<double>::infinity(), 0.0};
  const cld r = std::exp(lgamma_ext(cld(z.real(), z.imag())));
  return {static_cast<double>(r.real()), static_cast<double>(r.imag())};
}

}  // namespace nft
