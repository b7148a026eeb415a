#include "nft/signals.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "nft/gamma.hpp"

namespace nft {

namespace {

constexpr cplx kI{0.0, 1.0};

double sech(double x) {
  // 1/cosh overflows to 0 gracefully; keep the exp form for large |x|.
  const double ax = std::abs(x);
  if (ax > 30.0) return 2.0 * std::exp(-ax);
  return 1.0 / std::cosh(x);
}

cplx non_finite() {
  return {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
}

bool is_gamma_pole(cplx z) {
  return z.imag() == 0.0 && z.real() <= 0.0 && std::floor(z.real()) == z.real();
}

}  // namespace

SignalGrid::SignalGrid(double tm, double tp, std::size_t n, int k)
    : t_minus(tm), t_plus(tp), d(n), kappa(k) {
  if (!(tp > tm)) throw std::invalid_argument("SignalGrid: need t_plus > t_minus");
  if (n < 1) throw std::invalid_argument("SignalGrid: need at least one sample");
  if (k != 1 && k != -1) throw std::invalid_argument("SignalGrid: kappa must be +1 or -1");
}

std::vector<double> SignalGrid::times() const {
  std::vector<double> t(d);
  for (std::size_t n = 0; n < d; ++n) t[n] = time(n);
  return t;
}

SampledSignal::SampledSignal(SignalGrid g, std::vector<cplx> s)
    : grid(g), samples(std::move(s)) {
  if (samples.size() != grid.d)
    throw std::invalid_argument("SampledSignal: sample count does not match grid");
}

// ---------------------------------------------------------------- example 1

cplx sech_focusing_value(double q0, double lambda0, double t) {
  return q0 * std::exp(-2.0 * kI * lambda0 * t) * sech(t);
}

SampledSignal sample_sech_focusing(double q0, double lambda0, const SignalGrid& grid) {
  if (grid.kappa != 1)
    throw std::invalid_argument("sample_sech_focusing: oracle requires kappa = +1");
  if (!(q0 > 0)) throw std::invalid_argument("sample_sech_focusing: amplitude must be positive");
  std::vector<cplx> q(grid.d);
  for (std::size_t n = 0; n < grid.d; ++n) q[n] = sech_focusing_value(q0, lambda0, grid.time(n));
  SampledSignal s(grid, std::move(q));
  s.exact = [q0, lambda0](double t) { return sech_focusing_value(q0, lambda0, t); };
  return s;
}

// a(l) = Gamma(1/2 - i(l - l0))^2 / (Gamma(1/2 - i(l - l0) + q0) Gamma(1/2 - i(l - l0) - q0)),
// b(l) = -sin(pi q0) / cosh(pi (l - l0)). Both carry the frequency shift l0
// consistently; this is the form that agrees with direct integration of the
// scattering ODE (see tests/test_signals.cpp).
ScatteringCoeffs oracle_sech_focusing(double q0, double lambda0, double lambda) {
  using std::numbers::pi;
  const double mu = lambda - lambda0;
  const cplx base(0.5, -mu);
  const cplx zp = base + q0, zm = base - q0;
  ScatteringCoeffs c;
  c.b = -std::sin(pi * q0) / std::cosh(pi * mu);
  if (is_gamma_pole(zp) || is_gamma_pole(zm)) {
    c.a = 0.0;
    c.rho = non_finite();
    return c;
  }
  c.a = std::exp(2.0 * lgamma_complex(base) - lgamma_complex(zp) - lgamma_complex(zm));
  c.rho = c.b / c.a;
  return c;
}

AnalyticSpectrum sech_focusing_spectrum(double q0, double lambda0) {
  AnalyticSpectrum s;
  s.rho = [=](double l) { return oracle_sech_focusing(q0, lambda0, l).rho; };
  s.a = [=](double l) { return oracle_sech_focusing(q0, lambda0, l).a; };
  s.b = [=](double l) { return oracle_sech_focusing(q0, lambda0, l).b; };
  const int count = static_cast<int>(std::floor(q0 + 0.5));
  for (int k = 1; k <= count; ++k) {
    s.eigenvalues.emplace_back(lambda0, q0 + 0.5 - k);
    s.b_values.emplace_back(k % 2 == 0 ? 1.0 : -1.0, 0.0);
  }
  return s;
}

// ---------------------------------------------------------------- example 2

namespace {

double onepole_gamma(cplx alpha, double beta) {
  const double g = std::sqrt(std::norm(alpha) + beta * beta);
  if (!(g > 0)) throw std::invalid_argument("rational_onepole: gamma must be positive");
  if (std::abs(beta) >= g)
    throw std::invalid_argument("rational_onepole: |beta| >= gamma, arctanh undefined");
  return g;
}

}  // namespace

cplx rational_onepole_value(cplx alpha, double beta, double t) {
  const double g = onepole_gamma(alpha, beta);
  if (t > 0) return 0.0;
  return -2.0 * kI * g * (alpha / std::abs(alpha)) * sech(2.0 * g * t + std::atanh(beta / g));
}

SampledSignal sample_rational_onepole(cplx alpha, double beta, const SignalGrid& grid) {
  if (grid.kappa != 1)
    throw std::invalid_argument("sample_rational_onepole: oracle requires kappa = +1");
  onepole_gamma(alpha, beta);
  SampledSignal s(grid, sample_rational_onepole_at(alpha, beta, grid.times()));
  s.exact = [alpha, beta](double t) { return rational_onepole_value(alpha, beta, t); };
  return s;
}

std::vector<cplx> sample_rational_onepole_at(cplx alpha, double beta,
                                             const std::vector<double>& times) {
  std::vector<cplx> q(times.size());
  for (std::size_t n = 0; n < times.size(); ++n)
    q[n] = rational_onepole_value(alpha, beta, times[n]);
  return q;
}

cplx oracle_rational_onepole(cplx alpha, double beta, cplx lambda) {
  const cplx den = lambda - kI * beta;
  if (den == 0.0) throw std::domain_error("oracle_rational_onepole: lambda = i beta is a pole");
  return alpha / den;
}

AnalyticSpectrum rational_onepole_spectrum(cplx alpha, double beta) {
  AnalyticSpectrum s;
  s.rho = [=](double l) { return oracle_rational_onepole(alpha, beta, l); };
  return s;
}

// ---------------------------------------------------------------- example 3

cplx sech_defocusing_value(double g, double l, double q, double t) {
  // sech(t/L) > 0 on the real line, so the principal power is
  // exp((1 - 2iG) log sech(t/L)) with a real logarithm.
  const double x = std::abs(t / l);
  const double log_sech = -x - std::log1p(std::exp(-2.0 * x)) + std::log(2.0);
  return (q / l) * std::exp(cplx(1.0, -2.0 * g) * log_sech);
}

SampledSignal sample_sech_defocusing(double g, double l, double q, const SignalGrid& grid) {
  if (grid.kappa != -1)
    throw std::invalid_argument("sample_sech_defocusing: oracle requires kappa = -1");
  std::vector<cplx> v(grid.d);
  for (std::size_t n = 0; n < grid.d; ++n) v[n] = sech_defocusing_value(g, l, q, grid.time(n));
  SampledSignal s(grid, std::move(v));
  s.exact = [g, l, q](double t) { return sech_defocusing_value(g, l, q, t); };
  return s;
}

// The gamma-ratio expression below is stated for the conjugate convention of
// the scattering problem (q replaced by -q*). Mapping it back gives
// rho(l) = -conj(R(-l)), which agrees with direct integration of the ODE.
cplx oracle_sech_defocusing(double g, double l, double q, double lambda) {
  const double root = std::sqrt(g * g + q * q);
  const double x = -lambda * l;
  const cplx d(0.5, x - g);
  const cplx fm(0.5, -(x - root));
  const cplx fp(0.5, -(x + root));
  const cplx gm(1.0, -(g - root));
  const cplx gp(1.0, -(g + root));
  for (cplx z : {d, fm, fp, std::conj(d), gm, gp})
    if (is_gamma_pole(z)) return non_finite();
  const cplx log_ratio = lgamma_complex(d) + lgamma_complex(fm) + lgamma_complex(fp) -
                         lgamma_complex(std::conj(d)) - lgamma_complex(gm) -
                         lgamma_complex(gp);
  const cplx pow2 = std::exp(cplx(0.0, -2.0 * g) * std::log(2.0));
  return std::conj(pow2 * q * std::exp(log_ratio));
}

AnalyticSpectrum sech_defocusing_spectrum(double g, double l, double q) {
  AnalyticSpectrum s;
  s.rho = [=](double lam) { return oracle_sech_defocusing(g, l, q, lam); };
  return s;
}

std::pair<cplx, cplx> evolve_spectrum(cplx a, cplx b, cplx lambda, double x) {
  return {a, b * std::exp(-4.0 * kI * lambda * lambda * x)};
}

// ---------------------------------------------------------------- CSV

void write_signal_csv(std::ostream& os, const SampledSignal& s) {
  os << "t,re_q,im_q\n" << std::setprecision(17);
  for (std::size_t n = 0; n < s.size(); ++n)
    os << s.grid.time(n) << ',' << s.samples[n].real() << ',' << s.samples[n].imag() << '\n';
}

void write_signal_csv(const std::string& path, const SampledSignal& s) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  write_signal_csv(f, s);
}

SampledSignal read_signal_csv(std::istream& is, int kappa) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("signal csv: empty input");
  if (line.rfind("t,re_q,im_q", 0) != 0)
    throw std::runtime_error("signal csv: expected header t,re_q,im_q");
  std::vector<double> t;
  std::vector<cplx> q;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string a, b, c;
    if (!std::getline(row, a, ',') || !std::getline(row, b, ',') || !std::getline(row, c))
      throw std::runtime_error("signal csv: malformed row '" + line + "'");
    t.push_back(std::stod(a));
    q.emplace_back(std::stod(b), std::stod(c));
  }
  if (t.size() < 2) throw std::runtime_error("signal csv: need at least two samples");
  const double h = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
  for (std::size_t n = 1; n < t.size(); ++n)
    if (std::abs(t[n] - t[n - 1] - h) > 1e-9 * std::max(1.0, std::abs(h)))
      throw std::runtime_error("signal csv: sample times are not equispaced");
  SignalGrid grid(t.front() - 0.5 * h, t.back() + 0.5 * h, t.size(), kappa);
  return SampledSignal(grid, std::move(q));
}

SampledSignal read_signal_csv(const std::string& path, int kappa) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  return read_signal_csv(f, kappa);
}

}  // namespace nft
