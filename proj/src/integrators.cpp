#include "nft/integrators.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace nft {

namespace {

constexpr cplx kI{0.0, 1.0};

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  const auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

}  // namespace

// ---------------------------------------------------------------- schemes

bool CfqmScheme::complex_coeffs() const {
  for (Eigen::Index i = 0; i < a.size(); ++i)
    if (a.data()[i].imag() != 0.0) return true;
  return false;
}

Eigen::VectorXcd CfqmScheme::lambda_weights() const { return a.rowwise().sum(); }

CfqmScheme CfqmScheme::cf1_2() {
  CfqmScheme s;
  s.name = "CF1_2";
  s.order = 2;
  s.a = Eigen::MatrixXcd::Constant(1, 1, 1.0);
  s.c = Eigen::VectorXd::Constant(1, 0.5);
  return s;
}

CfqmScheme CfqmScheme::cf2_4() {
  const double r3 = std::sqrt(3.0);
  const double a1 = 0.25 + r3 / 6.0, a2 = 0.25 - r3 / 6.0;
  CfqmScheme s;
  s.name = "CF2_4";
  s.order = 4;
  s.a.resize(2, 2);
  // First exponential applied (row 0) weights the earlier node more.
  s.a << a1, a2, a2, a1;
  s.c.resize(2);
  s.c << 0.5 - r3 / 6.0, 0.5 + r3 / 6.0;
  return s;
}

CfqmScheme CfqmScheme::from_csv_text(const std::string& text, const std::string& name) {
  struct Entry {
    int j, k;
    cplx v;
  };
  std::vector<Entry> as;
  std::vector<std::pair<int, double>> cs;
  int order = 0;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> f;
    std::istringstream row(line);
    for (std::string cell; std::getline(row, cell, ',');) f.push_back(trim(cell));
    try {
      if (f[0] == "a" && (f.size() == 4 || f.size() == 5)) {
        as.push_back({std::stoi(f[1]), std::stoi(f[2]),
                      cplx(std::stod(f[3]), f.size() == 5 ? std::stod(f[4]) : 0.0)});
      } else if (f[0] == "c" && f.size() == 3) {
        cs.emplace_back(std::stoi(f[1]), std::stod(f[2]));
      } else if (f[0] == "order" && f.size() == 2) {
        order = std::stoi(f[1]);
      } else {
        throw std::invalid_argument("bad row");
      }
    } catch (const std::logic_error&) {
      throw std::invalid_argument("scheme table: malformed line '" + line + "'");
    }
  }
  if (as.empty() || cs.empty()) throw std::invalid_argument("scheme table: no coefficients");
  int jmax = 0, kmax = 0;
  for (const auto& e : as) {
    jmax = std::max(jmax, e.j);
    kmax = std::max(kmax, e.k);
  }
  for (const auto& [k, v] : cs) kmax = std::max(kmax, k);
  CfqmScheme s;
  s.name = name;
  s.order = order;
  s.a = Eigen::MatrixXcd::Zero(jmax, kmax);
  s.c = Eigen::VectorXd::Constant(kmax, std::numeric_limits<double>::quiet_NaN());
  for (const auto& e : as) {
    if (e.j < 1 || e.k < 1) throw std::invalid_argument("scheme table: indices are 1-based");
    s.a(e.j - 1, e.k - 1) = e.v;
  }
  for (const auto& [k, v] : cs) {
    if (k < 1) throw std::invalid_argument("scheme table: indices are 1-based");
    if (v < 0.0 || v > 1.0) throw std::invalid_argument("scheme table: c_k outside [0, 1]");
    s.c(k - 1) = v;
  }
  for (Eigen::Index k = 0; k < s.c.size(); ++k)
    if (std::isnan(s.c(k))) throw std::invalid_argument("scheme table: missing c_k");
  if (s.order <= 0) throw std::invalid_argument("scheme table: missing 'order,r' line");
  return s;
}

CfqmScheme CfqmScheme::from_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return from_csv_text(ss.str(), path);
}

// ---------------------------------------------------------------- interpolation

std::vector<cplx> bandlimited_shift(std::span<const cplx> samples, double t_s, double h) {
  const std::size_t n = samples.size();
  if (n == 0) throw std::invalid_argument("bandlimited_shift: empty input");
  if (t_s == 0.0) return {samples.begin(), samples.end()};
  auto bins = dft<double>(samples);
  const std::size_t npos = n / 2;
  const long double scale = -2.0L * std::numbers::pi_v<long double> * t_s /
                            (static_cast<long double>(n) * h);
  for (std::size_t k = 0; k < n; ++k) {
    const long double freq =
        k <= npos ? static_cast<long double>(k) : static_cast<long double>(k) - n;
    const long double ang = scale * freq;
    bins[k] *= cplx(static_cast<double>(std::cos(ang)), static_cast<double>(std::sin(ang)));
  }
  return dft<double>(bins, true);
}

NodeSamples node_samples(const SampledSignal& signal, const CfqmScheme& scheme) {
  NodeSamples out;
  out.grid = signal.grid;
  const double h = signal.grid.h();
  for (int k = 0; k < scheme.nodes(); ++k) {
    const double offset = (scheme.c(k) - 0.5) * h;
    if (signal.has_exact()) {
      std::vector<cplx> v(signal.size());
      for (std::size_t n = 0; n < v.size(); ++n) v[n] = signal.exact(signal.grid.time(n) + offset);
      out.nodes.push_back(std::move(v));
    } else {
      out.nodes.push_back(bandlimited_shift(signal.samples, -offset, h));
    }
  }
  return out;
}

// ---------------------------------------------------------------- stepping

namespace {

// Off-diagonal entries of B_j = h sum_k a_jk C_k for every step.
struct StepData {
  std::vector<cplx> weight;                   // h w_j
  std::vector<std::vector<cplx>> upper, lower;  // [j][n]
};

StepData prepare_steps(const CfqmScheme& scheme, const NodeSamples& nodes) {
  const int jn = scheme.exponentials();
  const int kn = scheme.nodes();
  if (static_cast<int>(nodes.nodes.size()) != kn)
    throw std::invalid_argument("node count does not match scheme");
  const std::size_t d = nodes.grid.d;
  const double h = nodes.grid.h();
  const double kappa = nodes.grid.kappa;
  StepData s;
  const Eigen::VectorXcd w = scheme.lambda_weights();
  s.upper.assign(jn, std::vector<cplx>(d));
  s.lower.assign(jn, std::vector<cplx>(d));
  for (int j = 0; j < jn; ++j) {
    s.weight.push_back(h * w(j));
    for (std::size_t n = 0; n < d; ++n) {
      cplx up = 0.0, lo = 0.0;
      for (int k = 0; k < kn; ++k) {
        const cplx q = nodes.nodes[k][n];
        up += scheme.a(j, k) * q;
        lo += scheme.a(j, k) * std::conj(q);
      }
      s.upper[j][n] = h * up;
      s.lower[j][n] = -kappa * h * lo;
    }
  }
  return s;
}

}  // namespace

Mat2d transfer_step(const CfqmScheme& scheme, std::span<const cplx> node_values, cplx lambda,
                    double h, int kappa) {
  if (static_cast<int>(node_values.size()) != scheme.nodes())
    throw std::invalid_argument("transfer_step: node count does not match scheme");
  Mat2d g = Mat2d::Identity();
  const Eigen::VectorXcd w = scheme.lambda_weights();
  for (int j = 0; j < scheme.exponentials(); ++j) {
    cplx up = 0.0, lo = 0.0;
    for (int k = 0; k < scheme.nodes(); ++k) {
      up += scheme.a(j, k) * node_values[k];
      lo += scheme.a(j, k) * std::conj(node_values[k]);
    }
    Mat2d b;
    const cplx diag = -kI * lambda * h * w(j);
    b << diag, h * up, -static_cast<double>(kappa) * h * lo, -diag;
    g = expm_traceless_unchecked(b) * g;
  }
  return g;
}

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body) {
  if (threads <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  const std::size_t workers = std::min<std::size_t>(threads, n);
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        const std::size_t lo = n * w / workers, hi = n * (w + 1) / workers;
        for (std::size_t i = lo; i < hi; ++i) body(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::vector<Eigenfunction> scatter_slow(const CfqmScheme& scheme, const NodeSamples& nodes,
                                        std::span<const cplx> lambdas,
                                        const ScatterOptions& opts) {
  const StepData steps = prepare_steps(scheme, nodes);
  const int jn = scheme.exponentials();
  const std::size_t d = nodes.grid.d;
  const double h = nodes.grid.h();
  std::vector<Eigenfunction> out(lambdas.size());

  // For real lambda and real weights, w^2 = -(lambda h w_j)^2 + upper * lower is
  // real, so each exponential reduces to one cos/sin or cosh/sinh pair.
  bool real_path = !opts.with_derivative && !scheme.complex_coeffs();
  for (cplx l : lambdas) real_path = real_path && l.imag() == 0.0;
  std::vector<std::vector<double>> off2;
  if (real_path) {
    off2.assign(jn, std::vector<double>(d));
    for (int j = 0; j < jn; ++j)
      for (std::size_t n = 0; n < d; ++n)
        off2[j][n] = (steps.upper[j][n] * steps.lower[j][n]).real();
  }

  parallel_for(lambdas.size(), opts.threads, [&](std::size_t li) {
    const cplx lambda = lambdas[li];
    if (real_path) {
      std::vector<double> beta(jn);
      for (int j = 0; j < jn; ++j) beta[j] = -lambda.real() * steps.weight[j].real();
      const cplx scale = std::exp(kI * lambda.real() * h);
      cplx p1 = 1.0, p2 = 0.0;
      for (std::size_t n = 0; n < d; ++n) {
        for (int j = 0; j < jn; ++j) {
          // B = [[i beta, u], [v, -i beta]]
          const double bj = beta[j];
          const double w2 = off2[j][n] - bj * bj;
          double c, sc;
          if (std::abs(w2) < 1e-8) {
            c = 1.0 + w2 * (0.5 + w2 / 24.0);
            sc = 1.0 + w2 * (1.0 / 6.0 + w2 / 120.0);
          } else if (w2 < 0.0) {
            const double th = std::sqrt(-w2);
            c = std::cos(th);
            sc = std::sin(th) / th;
          } else {
            const double th = std::sqrt(w2);
            const double e = std::exp(th), ei = 1.0 / e;
            c = 0.5 * (e + ei);
            sc = th < 1e-3 ? std::sinh(th) / th : 0.5 * (e - ei) / th;
          }
          const cplx diag(c, sc * bj);
          const cplx n1 = diag * p1 + sc * steps.upper[j][n] * p2;
          p2 = sc * steps.lower[j][n] * p1 + std::conj(diag) * p2;
          p1 = n1;
        }
        p1 *= scale;
        p2 *= scale;
      }
      out[li].psi = Vec2d(p1, p2);
      return;
    }
    const cplx scale = std::exp(kI * lambda * h);
    Vec2d psi(1.0, 0.0);
    Vec2d dpsi = Vec2d::Zero();
    std::vector<cplx> diag(jn), ddiag(jn);
    for (int j = 0; j < jn; ++j) {
      diag[j] = -kI * lambda * steps.weight[j];
      ddiag[j] = -kI * steps.weight[j];
    }
    Mat2d b;
    for (std::size_t n = 0; n < d; ++n) {
      for (int j = 0; j < jn; ++j) {
        b << diag[j], steps.upper[j][n], steps.lower[j][n], -diag[j];
        if (opts.with_derivative) {
          const auto [e, de] = expm_traceless_with_derivative(b, ddiag[j]);
          dpsi = e * dpsi + de * psi;
          psi = e * psi;
        } else {
          psi = expm_traceless_unchecked(b) * psi;
        }
      }
      if (opts.with_derivative) dpsi = scale * (dpsi + kI * h * psi);
      psi *= scale;
    }
    out[li].psi = psi;
    out[li].dpsi = dpsi;
    out[li].has_derivative = opts.with_derivative;
  });
  return out;
}

Coefficients scattering_to_coeffs(const Eigenfunction& phi, cplx lambda, double /*t_minus*/,
                                  double t_plus) {
  // phi is stored as psi = phi(T+) e^{i lambda T+}.
  return {phi.psi(0), phi.psi(1) * std::exp(-2.0 * kI * lambda * t_plus)};
}

std::vector<double> lambda_grid(std::size_t m, double lambda_max) {
  if (m == 0) throw std::invalid_argument("lambda_grid: need M >= 1");
  if (m == 1) return {0.0};
  std::vector<double> l(m);
  const double step = 2.0 * lambda_max / static_cast<double>(m - 1);
  for (std::size_t k = 0; k < m; ++k) l[k] = -lambda_max + step * static_cast<double>(k);
  l[m - 1] = lambda_max;
  return l;
}

SpectrumResult reflection_slow(const CfqmScheme& scheme, const SampledSignal& signal,
                               std::size_t m, double lambda_max, unsigned threads) {
  SpectrumResult r;
  r.lambdas = lambda_grid(m, lambda_max);
  const NodeSamples nodes = node_samples(signal, scheme);
  std::vector<cplx> lam(r.lambdas.begin(), r.lambdas.end());
  ScatterOptions opts;
  opts.threads = threads;
  const auto phis = scatter_slow(scheme, nodes, lam, opts);
  r.a.resize(m);
  r.b.resize(m);
  r.rho.resize(m);
  for (std::size_t k = 0; k < m; ++k) {
    const auto c = scattering_to_coeffs(phis[k], lam[k], signal.grid.t_minus, signal.grid.t_plus);
    r.a[k] = c.a;
    r.b[k] = c.b;
    r.rho[k] = c.b / c.a;
    if (c.a == 0.0 || !std::isfinite(r.rho[k].real()) || !std::isfinite(r.rho[k].imag())) {
      r.rho[k] = {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
      ++r.non_finite;
    }
  }
  return r;
}

}  // namespace nft
