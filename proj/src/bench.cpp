#include "nft/bench.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace nft {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool finite(cplx v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); }

}  // namespace

// ---------------------------------------------------------------- errors

ErrorValue error_rho(std::span<const cplx> truth, std::span<const cplx> computed) {
  if (truth.size() != computed.size())
    throw std::invalid_argument("error: truth and computed lengths differ");
  ErrorValue e;
  double num = 0.0, den = 0.0, all = 0.0;
  for (std::size_t k = 0; k < truth.size(); ++k) {
    all += std::norm(truth[k]);
    if (!finite(computed[k]) || !finite(truth[k])) {
      ++e.excluded;
      continue;
    }
    num += std::norm(truth[k] - computed[k]);
    den += std::norm(truth[k]);
  }
  if (!(all > 0.0)) throw std::invalid_argument("error: reference values are all zero");
  e.value = den > 0.0 ? std::sqrt(num / den) : kNaN;
  return e;
}

ErrorValue error_b(std::span<const cplx> truth, std::span<const cplx> computed) {
  return error_rho(truth, computed);
}

// ---------------------------------------------------------------- ODE oracle

namespace {

using State = std::array<cplx, 2>;

class GbsIntegrator {
 public:
  GbsIntegrator(const std::function<cplx(double)>& q, int kappa, cplx lambda, double tol)
      : q_(q), kappa_(kappa), lambda_(lambda), tol_(tol) {}

  State panel(double t0, double t1, const State& y0, int depth) const {
    constexpr int kCols = 9;
    std::array<std::array<State, kCols>, kCols> tab{};
    std::array<int, kCols> steps{};
    for (int k = 0; k < kCols; ++k) {
      steps[k] = 2 * (k + 1);
      tab[k][0] = midpoint(t0, t1, y0, steps[k]);
      for (int j = 1; j <= k; ++j) {
        const double r = static_cast<double>(steps[k]) / steps[k - j];
        const double f = 1.0 / (r * r - 1.0);
        for (int i = 0; i < 2; ++i)
          tab[k][j][i] = tab[k][j - 1][i] + (tab[k][j - 1][i] - tab[k - 1][j - 1][i]) * f;
      }
      if (k >= 3) {
        double err = 0.0, mag = 0.0;
        for (int i = 0; i < 2; ++i) {
          err = std::max(err, std::abs(tab[k][k][i] - tab[k - 1][k - 1][i]));
          mag = std::max(mag, std::abs(tab[k][k][i]));
        }
        if (err <= tol_ * std::max(1.0, mag)) return tab[k][k];
      }
    }
    if (depth > 40) throw std::runtime_error("ode_oracle: step size underflow");
    const double tm = 0.5 * (t0 + t1);
    return panel(tm, t1, panel(t0, tm, y0, depth + 1), depth + 1);
  }

 private:
  State rhs(double t, const State& y) const {
    const cplx q = q_(t);
    const cplx ph = std::exp(cplx(0.0, 2.0) * lambda_ * t);
    return {q * ph * y[1], -static_cast<double>(kappa_) * std::conj(q) / ph * y[0]};
  }

  // Modified midpoint rule with n substeps.
  State midpoint(double t0, double t1, const State& y0, int n) const {
    const double h = (t1 - t0) / n;
    State zm = y0, z;
    const State f0 = rhs(t0, y0);
    for (int i = 0; i < 2; ++i) z[i] = y0[i] + h * f0[i];
    for (int m = 1; m < n; ++m) {
      const State f = rhs(t0 + m * h, z);
      State zn;
      for (int i = 0; i < 2; ++i) zn[i] = zm[i] + 2.0 * h * f[i];
      zm = z;
      z = zn;
    }
    const State f = rhs(t1, z);
    State out;
    for (int i = 0; i < 2; ++i) out[i] = 0.5 * (zm[i] + z[i] + h * f[i]);
    return out;
  }

  const std::function<cplx(double)>& q_;
  int kappa_;
  cplx lambda_;
  double tol_;
};

}  // namespace

ScatteringCoeffs ode_oracle(const std::function<cplx(double)>& q, int kappa, double t_minus,
                            double t_plus, cplx lambda, const OdeOptions& opts) {
  if (!(opts.tol >= 1e-13 && opts.tol <= 1e-6))
    throw std::invalid_argument("ode_oracle: tolerance must lie in [1e-13, 1e-6]");
  if (!(t_plus > t_minus)) throw std::invalid_argument("ode_oracle: need t_plus > t_minus");
  std::vector<double> cuts = opts.breaks;
  cuts.push_back(t_minus);
  cuts.push_back(t_plus);
  std::sort(cuts.begin(), cuts.end());
  const GbsIntegrator gbs(q, kappa, lambda, opts.tol);
  State y{1.0, 0.0};
  for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
    const double lo = std::max(cuts[s], t_minus), hi = std::min(cuts[s + 1], t_plus);
    if (!(hi > lo)) continue;
    const int n = std::max(1, static_cast<int>(opts.panels * (hi - lo) / (t_plus - t_minus)));
    for (int k = 0; k < n; ++k)
      y = gbs.panel(lo + (hi - lo) * k / n, lo + (hi - lo) * (k + 1) / n, y, 0);
  }
  return {y[0], y[1], y[1] / y[0]};
}

// ---------------------------------------------------------------- cost model

namespace flops {

constexpr double kMul = 1, kAdd = 1, kDiv = 4, kConj = 1, kSqrt = 4, kHyp = 8, kTrig = 8,
                 kSinc = 12, kExp = 8;

double fft(double n) { return n <= 1 ? 0.0 : 5.0 * n * std::log2(n); }

double czt(double n) {
  const double l = 2.0 * n - 1.0;
  return 3.0 * (5.0 * l * std::log2(l));
}

double fast_scattering(double n) {
  const int levels = static_cast<int>(std::ceil(std::log2(n)));
  double total = 0.0;
  for (int k = 0; k <= levels; ++k) {
    const double len = std::ldexp(1.0, k + 1) + 1.0;
    total += std::ldexp(1.0, levels - k) * (12.0 * fft(len) + (8.0 * kMul + 4.0 * kAdd) * len);
  }
  return total;
}

}  // namespace flops

double flop_count(const std::string& method, double d, double m) {
  using namespace flops;
  if (!(d >= 1.0 && m >= 1.0)) throw std::invalid_argument("flop_count: need D, M >= 1");
  if (method == "CF2_4") {
    return 3.0 * fft(d) + kMul * (14.0 * d + 9.0 * m + 18.0 * d * m) +
           kAdd * (4.0 * (d + 1.0) + 10.0 * d * m) + kDiv * 2.0 * d * m + kConj * 2.0 * d +
           kSqrt * 2.0 * d * m + kHyp * (2.0 * d * m + 2.0 * d * m) + kExp * 2.0 * m;
  }
  if (method == "FCF2_4") {
    return 3.0 * fft(d) + kMul * (86.0 * d + 4.0 * (m + 1.0)) + kAdd * (34.0 * d + 6.0) +
           kDiv * (24.0 * d + m) + kConj * 2.0 * d + kSqrt * 2.0 * d + kTrig * 4.0 * d +
           kSinc * 4.0 * d + kExp * 2.0 * m + 2.0 * czt(4.0 * d + 1.0) +
           fast_scattering(2.0 * d);
  }
  if (method == "FCF_RE2_4") {
    // Two fast runs at D and D/2 plus the pointwise combination.
    return flop_count("FCF2_4", d, m) + flop_count("FCF2_4", std::max(1.0, d / 2.0), m) +
           3.0 * m;
  }
  throw std::invalid_argument("flop_count: no cost model for method '" + method + "'");
}

std::size_t flop_crossover() {
  constexpr std::size_t kLimit = std::size_t{1} << 16;
  for (std::size_t d = 1; d <= kLimit; ++d) {
    const double x = static_cast<double>(d);
    if (flop_count("FCF2_4", x, x) < flop_count("CF2_4", x, x)) return d;
  }
  return 0;
}

// ---------------------------------------------------------------- slopes

SlopeFit fit_loglog(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("fit_loglog: need at least two points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  SlopeFit f;
  const double den = n * sxx - sx * sx;
  if (den == 0.0) throw std::invalid_argument("fit_loglog: degenerate abscissae");
  f.slope = (n * sxy - sx * sy) / den;
  f.intercept = (sy - f.slope * sx) / n;
  f.first = 0;
  f.last = x.size();
  return f;
}

SlopeFit fit_prefloor(std::span<const double> h, std::span<const double> err) {
  if (h.size() != err.size()) throw std::invalid_argument("fit_prefloor: length mismatch");
  std::size_t first = 0;
  while (first < err.size() && !(err[first] < 1.0 && err[first] > 0.0)) ++first;
  std::size_t last = first + 1;
  while (last < err.size() && err[last] > 0.0 && err[last] < err[last - 1]) ++last;
  if (first >= err.size() || last - first < 2)
    throw std::runtime_error("fit_prefloor: fewer than two points before the error floor");

  auto local = [&](std::size_t i) {  // slope of segment (i-1, i)
    return std::log(err[i - 1] / err[i]) / std::log(h[i - 1] / h[i]);
  };
  std::vector<double> slopes;
  for (std::size_t i = first + 1; i < last; ++i) slopes.push_back(local(i));
  std::nth_element(slopes.begin(), slopes.begin() + slopes.size() / 2, slopes.end());
  const double median = slopes[slopes.size() / 2];
  while (last - first > 2 && local(last - 1) < 2.0 / 3.0 * median) --last;
  while (last - first > 2 && local(first + 1) > 1.5 * median) ++first;

  SlopeFit f = fit_loglog(h.subspan(first, last - first), err.subspan(first, last - first));
  f.first = first;
  f.last = last;
  return f;
}

// ---------------------------------------------------------------- methods

Method parse_method(const std::string& id) {
  Method m;
  m.id = id;
  std::string base = id;
  if (id.rfind("user:", 0) == 0) {
    m.scheme = CfqmScheme::from_csv(id.substr(5));
    m.pipeline = Pipeline::slow;
    return m;
  }
  if (base.rfind("FCF_RE", 0) == 0) {
    m.pipeline = Pipeline::fast_re;
    base = base.substr(6);
  } else if (base.rfind("FCF", 0) == 0) {
    m.pipeline = Pipeline::fast;
    base = base.substr(3);
  } else if (base.rfind("CF", 0) == 0) {
    m.pipeline = Pipeline::slow;
    base = base.substr(2);
  } else {
    throw std::invalid_argument("unknown method '" + id + "'");
  }
  if (base == "1_2") {
    m.scheme = CfqmScheme::cf1_2();
  } else if (base == "2_4") {
    m.scheme = CfqmScheme::cf2_4();
  } else {
    throw std::invalid_argument("unknown method '" + id +
                                "' (built-in schemes are 1_2 and 2_4)");
  }
  return m;
}

SpectrumResult compute_spectrum(const Method& method, const SampledSignal& signal,
                                std::size_t m, double lambda_max, unsigned threads) {
  switch (method.pipeline) {
    case Pipeline::slow: return reflection_slow(method.scheme, signal, m, lambda_max, threads);
    case Pipeline::fast: return reflection_fast(method.scheme, signal, m, lambda_max);
    case Pipeline::fast_re: return reflection_fast_re(method.scheme, signal, m, lambda_max);
  }
  throw std::logic_error("compute_spectrum: bad pipeline");
}

// ---------------------------------------------------------------- sweeps

ExampleCase make_example(const std::string& example, std::size_t d,
                         std::optional<double> amplitude) {
  ExampleCase c;
  if (example == "1") {
    const double q0 = amplitude.value_or(5.4), l0 = 3.0;
    const SignalGrid g(-32.0, 32.0, d, 1);
    // Bandlimited node values: keep the samples only.
    c.signal = SampledSignal(g, sample_sech_focusing(q0, l0, g).samples);
    const auto closed = sech_focusing_spectrum(q0, l0);
    c.rho = closed.rho;
    c.b = closed.b;
    c.eigenvalues = closed.eigenvalues;
    c.lambda_max = 10.0;
  } else if (example == "2") {
    const cplx alpha = 1.0;
    const double beta = -1.0;
    const SignalGrid g(-12.0, 0.0, d, 1);
    c.signal = sample_rational_onepole(alpha, beta, g);  // exact sampling
    c.rho = rational_onepole_spectrum(alpha, beta).rho;
    c.lambda_max = 60.0;
  } else if (example == "3") {
    const double gg = 1.5, l = 0.04, q = 5.5;
    const SignalGrid g(-1.5, 1.5, d, -1);
    c.signal = SampledSignal(g, sample_sech_defocusing(gg, l, q, g).samples);
    c.rho = sech_defocusing_spectrum(gg, l, q).rho;
    c.lambda_max = 250.0;
  } else {
    throw std::invalid_argument("unknown example '" + example + "'");
  }
  return c;
}

std::vector<SweepRow> run_sweep(const SweepConfig& config) {
  if (config.repetitions < 1) throw std::invalid_argument("sweep: repetitions must be >= 1");
  if (config.methods.empty()) throw std::invalid_argument("sweep: no methods");
  if (config.d_values.empty()) throw std::invalid_argument("sweep: no D values");
  for (auto d : config.d_values)
    if (d < 2) throw std::invalid_argument("sweep: D values must be >= 2");
  std::vector<std::optional<double>> amps;
  if (config.amplitudes.empty()) {
    amps.push_back(std::nullopt);
  } else {
    if (config.example != "1")
      throw std::invalid_argument("sweep: amplitude sweeps apply to example 1 only");
    for (double a : config.amplitudes) amps.emplace_back(a);
  }
  std::vector<SweepRow> rows;
  for (const auto& mid : config.methods) {
    const Method method = parse_method(mid);
    for (const auto& amp : amps) {
      for (std::size_t d : config.d_values) {
        const ExampleCase ex = make_example(config.example, d, amp);
        const double lmax = config.lambda_max.value_or(ex.lambda_max);
        const std::size_t m = config.m ? config.m : d;
        SweepRow row;
        row.method = mid;
        row.example = config.example;
        row.d = d;
        row.h = ex.signal.grid.h();
        row.amplitude = amp.value_or(config.example == "1" ? 5.4 : kNaN);
        row.m = m;
        row.lambda_max = lmax;
        SpectrumResult best;
        double best_t = std::numeric_limits<double>::infinity();
        for (int rep = 0; rep < config.repetitions; ++rep) {
          const auto t0 = std::chrono::steady_clock::now();
          SpectrumResult r = compute_spectrum(method, ex.signal, m, lmax, config.threads);
          const double t =
              std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
          if (t < best_t) best_t = t;
          if (rep == 0) best = std::move(r);
        }
        row.time_s = best_t;
        std::vector<cplx> truth(m);
        if (ex.rho) {
          for (std::size_t k = 0; k < m; ++k) truth[k] = ex.rho(best.lambdas[k]);
          const auto e = error_rho(truth, best.rho);
          row.e_rho = e.value;
          row.excluded = e.excluded;
        } else {
          row.e_rho = kNaN;
        }
        if (ex.b) {
          for (std::size_t k = 0; k < m; ++k) truth[k] = ex.b(best.lambdas[k]);
          row.e_b = error_b(truth, best.b).value;
        } else {
          row.e_b = kNaN;
        }
        try {
          row.flops = flop_count(mid, static_cast<double>(d), static_cast<double>(m));
        } catch (const std::invalid_argument&) {
          row.flops = kNaN;
        }
        rows.push_back(row);
      }
    }
  }
  return rows;
}

std::vector<SweepSlope> sweep_slopes(const std::vector<SweepRow>& rows) {
  std::map<std::pair<std::string, double>, std::vector<const SweepRow*>> groups;
  std::vector<std::pair<std::string, double>> order;
  for (const auto& r : rows) {
    const auto key = std::make_pair(r.method, std::isnan(r.amplitude) ? -1.0 : r.amplitude);
    if (!groups.count(key)) order.push_back(key);
    groups[key].push_back(&r);
  }
  std::vector<SweepSlope> out;
  for (const auto& key : order) {
    auto g = groups[key];
    std::sort(g.begin(), g.end(), [](auto* a, auto* b) { return a->h > b->h; });
    std::vector<double> h, e, d, t;
    for (auto* r : g) {
      h.push_back(r->h);
      e.push_back(r->e_rho);
      d.push_back(static_cast<double>(r->d));
      t.push_back(std::max(r->time_s, 1e-9));
    }
    SweepSlope s;
    s.method = key.first;
    s.amplitude = key.second;
    s.error.slope = kNaN;
    s.time.slope = kNaN;
    try {
      s.error = fit_prefloor(h, e);
    } catch (const std::exception&) {
    }
    if (d.size() >= 2) s.time = fit_loglog(d, t);
    out.push_back(s);
  }
  return out;
}

void write_results_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  const auto old = os.precision(17);
  os << "method,example,D,h,amplitude,M,lambda_max,E_rho,E_b,excluded,time_s,flops\n";
  for (const auto& r : rows)
    os << r.method << ',' << r.example << ',' << r.d << ',' << r.h << ',' << r.amplitude << ','
       << r.m << ',' << r.lambda_max << ',' << r.e_rho << ',' << r.e_b << ',' << r.excluded
       << ',' << r.time_s << ',' << r.flops << '\n';
  os.precision(old);
}

std::vector<SweepRow> read_results_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("method,example,D,", 0) != 0)
    throw std::runtime_error("results csv: missing header");
  std::vector<SweepRow> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::istringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() != 12) throw std::runtime_error("results csv: malformed row '" + line + "'");
    SweepRow r;
    r.method = f[0];
    r.example = f[1];
    r.d = std::stoull(f[2]);
    r.h = std::stod(f[3]);
    r.amplitude = std::stod(f[4]);
    r.m = std::stoull(f[5]);
    r.lambda_max = std::stod(f[6]);
    r.e_rho = std::stod(f[7]);
    r.e_b = std::stod(f[8]);
    r.excluded = std::stoull(f[9]);
    r.time_s = std::stod(f[10]);
    r.flops = std::stod(f[11]);
    rows.push_back(r);
  }
  return rows;
}

void write_slopes_csv(std::ostream& os, const std::vector<SweepSlope>& slopes) {
  const auto old = os.precision(6);
  os << "method,amplitude,error_slope,error_points,time_exponent\n";
  for (const auto& s : slopes)
    os << s.method << ',' << s.amplitude << ',' << s.error.slope << ','
       << (s.error.last - s.error.first) << ',' << s.time.slope << '\n';
  os.precision(old);
}

void write_svg_plot(std::ostream& os, const std::vector<SweepRow>& rows,
                    const std::string& title) {
  constexpr double W = 640, H = 480, L = 70, R = 170, T = 40, B = 50;
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& r : rows) {
    if (!(r.e_rho > 0.0) || !(r.h > 0.0)) continue;
    xmin = std::min(xmin, std::log10(r.h));
    xmax = std::max(xmax, std::log10(r.h));
    ymin = std::min(ymin, std::log10(r.e_rho));
    ymax = std::max(ymax, std::log10(r.e_rho));
  }
  if (xmin > xmax) xmin = -1, xmax = 0, ymin = -1, ymax = 0;
  xmin = std::floor(xmin);
  xmax = std::ceil(xmax);
  ymin = std::floor(ymin);
  ymax = std::ceil(ymax);
  if (xmax == xmin) xmax += 1;
  if (ymax == ymin) ymax += 1;
  auto px = [&](double lx) { return L + (lx - xmin) / (xmax - xmin) * (W - L - R); };
  auto py = [&](double ly) { return H - B - (ly - ymin) / (ymax - ymin) * (H - T - B); };

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\">" << title << "</text>\n";
  for (double e = xmin; e <= xmax; e += 1)
    os << "<line x1=\"" << px(e) << "\" y1=\"" << T << "\" x2=\"" << px(e) << "\" y2=\""
       << H - B << "\" stroke=\"#ddd\"/><text x=\"" << px(e) << "\" y=\"" << H - B + 18
       << "\" text-anchor=\"middle\">1e" << e << "</text>\n";
  const double ystep = std::max(1.0, std::ceil((ymax - ymin) / 10));
  for (double e = ymin; e <= ymax; e += ystep)
    os << "<line x1=\"" << L << "\" y1=\"" << py(e) << "\" x2=\"" << W - R << "\" y2=\""
       << py(e) << "\" stroke=\"#ddd\"/><text x=\"" << L - 6 << "\" y=\"" << py(e) + 4
       << "\" text-anchor=\"end\">1e" << e << "</text>\n";
  os << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12
     << "\" text-anchor=\"middle\">h</text>\n";
  os << "<text x=\"16\" y=\"" << H / 2 << "\" transform=\"rotate(-90 16 " << H / 2
     << ")\" text-anchor=\"middle\">E_rho</text>\n";

  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                 "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};
  std::map<std::pair<std::string, double>, std::vector<std::pair<double, double>>> lines;
  std::vector<std::pair<std::string, double>> order;
  for (const auto& r : rows) {
    const auto key = std::make_pair(r.method, std::isnan(r.amplitude) ? -1.0 : r.amplitude);
    if (!lines.count(key)) order.push_back(key);
    if (r.e_rho > 0.0 && r.h > 0.0)
      lines[key].emplace_back(std::log10(r.h), std::log10(r.e_rho));
    else
      lines[key];
  }
  for (std::size_t i = 0; i < order.size(); ++i) {
    auto pts = lines[order[i]];
    std::sort(pts.begin(), pts.end());
    const char* col = colors[i % 8];
    os << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"1.5\" points=\"";
    for (auto [x, y] : pts) os << px(x) << ',' << py(y) << ' ';
    os << "\"/>\n";
    for (auto [x, y] : pts)
      os << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y) << "\" r=\"2.5\" fill=\"" << col
         << "\"/>\n";
    std::ostringstream label;
    label << order[i].first;
    if (order[i].second >= 0 && lines.size() > 1 && order.size() > 1) label << " q0=" << order[i].second;
    os << "<text x=\"" << W - R + 10 << "\" y=\"" << T + 16 * (i + 1) << "\" fill=\"" << col
       << "\">" << label.str() << "</text>\n";
  }
  os << "</svg>\n";
}

void write_spectrum_csv(std::ostream& os, const SpectrumResult& r) {
  const auto old = os.precision(17);
  os << "lambda,re_a,im_a,re_b,im_b,re_rho,im_rho\n";
  for (std::size_t k = 0; k < r.lambdas.size(); ++k)
    os << r.lambdas[k] << ',' << r.a[k].real() << ',' << r.a[k].imag() << ',' << r.b[k].real()
       << ',' << r.b[k].imag() << ',' << r.rho[k].real() << ',' << r.rho[k].imag() << '\n';
  os.precision(old);
}

}  // namespace nft
