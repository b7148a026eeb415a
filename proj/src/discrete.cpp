#include "nft/discrete.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace nft {

namespace {

constexpr cplx kI{0.0, 1.0};
constexpr std::size_t kCompanionMaxDegree = 256;

// p(z) / p'(z), using the reversed polynomial outside the unit disc so that
// high powers of z never overflow.
cplx newton_ratio(std::span<const cplx> c, cplx z) {
  const std::size_t n = c.size() - 1;
  if (std::abs(z) <= 1.0) {
    cplx p = c[n], dp = 0.0;
    for (std::size_t k = n; k-- > 0;) {
      dp = dp * z + p;
      p = p * z + c[k];
    }
    return p / dp;
  }
  const cplx y = 1.0 / z;
  cplx q = c[0], dq = 0.0;
  for (std::size_t k = 1; k <= n; ++k) {
    dq = dq * y + q;
    q = q * y + c[k];
  }
  return z * q / (static_cast<double>(n) * q - y * dq);
}

std::vector<cplx> companion_roots(std::span<const cplx> c) {
  const Eigen::Index n = static_cast<Eigen::Index>(c.size()) - 1;
  // Scale z = s y so that the constant and leading coefficients balance.
  const double s = std::pow(std::abs(c[0]) / std::abs(c[n]), 1.0 / static_cast<double>(n));
  Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
  double sp = 1.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    comp(k, n - 1) = -c[k] * sp / c[n];
    sp *= s;
  }
  // The last column holds c_k s^k / (c_n s^n); divide once by s^n.
  const double sn = std::pow(s, static_cast<double>(n));
  comp.col(n - 1) /= sn;
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, false);
  if (es.info() != Eigen::Success) throw std::runtime_error("find_roots: eigensolver failed");
  std::vector<cplx> r(n);
  for (Eigen::Index i = 0; i < n; ++i) r[i] = es.eigenvalues()(i) * s;
  return r;
}

std::vector<cplx> aberth_roots(std::span<const cplx> c) {
  const std::size_t n = c.size() - 1;
  const double radius = std::pow(std::abs(c[0]) / std::abs(c[n]), 1.0 / static_cast<double>(n));
  std::vector<cplx> z(n);
  for (std::size_t k = 0; k < n; ++k)
    z[k] = std::polar(radius, 2.0 * std::numbers::pi * (static_cast<double>(k) + 0.25) /
                                  static_cast<double>(n) + 0.4);
  std::vector<char> done(n, 0);
  std::size_t remaining = n;
  constexpr double eps = std::numeric_limits<double>::epsilon();
  for (int iter = 0; iter < 500 && remaining > 0; ++iter) {
    for (std::size_t k = 0; k < n; ++k) {
      if (done[k]) continue;
      const cplx ratio = newton_ratio(c, z[k]);
      if (!std::isfinite(ratio.real()) || !std::isfinite(ratio.imag())) {
        done[k] = 1;
        --remaining;
        continue;
      }
      cplx sum = 0.0;
      for (std::size_t j = 0; j < n; ++j)
        if (j != k) sum += 1.0 / (z[k] - z[j]);
      const cplx w = ratio / (1.0 - ratio * sum);
      z[k] -= w;
      if (std::abs(w) <= 4.0 * eps * std::abs(z[k]) || ratio == 0.0) {
        done[k] = 1;
        --remaining;
      }
    }
  }
  return z;
}

bool finite(cplx v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); }

}  // namespace

std::string to_string(EigenStatus s) {
  switch (s) {
    case EigenStatus::raw: return "raw";
    case EigenStatus::filtered_out: return "filtered_out";
    case EigenStatus::refined: return "refined";
    case EigenStatus::duplicate_discarded: return "duplicate_discarded";
    case EigenStatus::diverged: return "diverged";
  }
  return "unknown";
}

std::vector<cplx> EigenSet::eigenvalues(bool extrapolated) const {
  std::vector<cplx> out;
  for (const auto& c : candidates) {
    if (c.status != EigenStatus::refined) continue;
    out.push_back(extrapolated && c.lambda_extrapolated ? *c.lambda_extrapolated
                                                        : *c.lambda_refined);
  }
  return out;
}

std::vector<cplx> a_num_poly(const CfqmScheme& scheme, const NodeSamples& nodes,
                             ZMapping* mapping_out) {
  return transfer_polymat(scheme, nodes, mapping_out).p[0];
}

std::size_t subsample_size(std::size_t d) {
  if (d < 4) throw std::invalid_argument("subsample: need at least 4 samples");
  const double l = std::log2(static_cast<double>(d));
  return static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(d) * l * l)));
}

Subsampled subsample(const SampledSignal& signal, const CfqmScheme& scheme, std::size_t d_sub) {
  const std::size_t d = signal.size();
  if (d < 4) throw std::invalid_argument("subsample: need at least 4 samples");
  if (d_sub == 0) throw std::invalid_argument("subsample: target size must be positive");
  const std::size_t stride = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(static_cast<double>(d) / static_cast<double>(d_sub))));
  Subsampled out;
  out.stride = stride;
  if (stride == 1) {
    out.nodes = node_samples(signal, scheme);
    return out;
  }
  const double h = signal.grid.h();
  const double h_sub = static_cast<double>(stride) * h;
  const std::size_t d_eff = (d + stride - 1) / stride;
  const double tm = signal.grid.t_minus + 0.5 * h - 0.5 * h_sub;
  out.nodes.grid = SignalGrid(tm, tm + static_cast<double>(d_eff) * h_sub, d_eff, signal.grid.kappa);
  for (int k = 0; k < scheme.nodes(); ++k) {
    const double offset = (scheme.c(k) - 0.5) * h_sub;
    std::vector<cplx> v(d_eff);
    if (signal.has_exact()) {
      for (std::size_t n = 0; n < d_eff; ++n) v[n] = signal.exact(out.nodes.grid.time(n) + offset);
    } else {
      const auto shifted = bandlimited_shift(signal.samples, -offset, h);
      for (std::size_t n = 0; n < d_eff; ++n) v[n] = shifted[n * stride];
    }
    out.nodes.nodes.push_back(std::move(v));
  }
  return out;
}

std::vector<cplx> find_roots(std::span<const cplx> coeffs) {
  std::size_t hi = coeffs.size();
  while (hi > 0 && coeffs[hi - 1] == 0.0) --hi;
  if (hi == 0) throw std::invalid_argument("find_roots: polynomial is identically zero");
  std::size_t lo = 0;
  while (coeffs[lo] == 0.0) ++lo;
  std::vector<cplx> roots(lo, cplx(0.0));
  const auto c = coeffs.subspan(lo, hi - lo);
  if (c.size() < 2) return roots;
  if (c.size() == 2) {
    roots.push_back(-c[0] / c[1]);
    return roots;
  }
  const auto r = c.size() - 1 <= kCompanionMaxDegree ? companion_roots(c) : aberth_roots(c);
  roots.insert(roots.end(), r.begin(), r.end());
  return roots;
}

std::vector<EigenCandidate> map_and_filter(std::span<const cplx> roots, const ZMapping& mapping) {
  const double limit = 0.9 * std::numbers::pi / mapping.h;
  std::vector<EigenCandidate> out;
  for (cplx z : roots) {
    if (z == 0.0 || !finite(z)) continue;
    EigenCandidate c;
    c.lambda_init = static_cast<double>(mapping.m) * std::log(z) / (kI * mapping.h);
    c.status = c.lambda_init.imag() > 0.0 && std::abs(c.lambda_init.real()) < limit
                   ? EigenStatus::raw
                   : EigenStatus::filtered_out;
    out.push_back(c);
  }
  return out;
}

void newton_refine(std::vector<EigenCandidate>& candidates, const CfqmScheme& scheme,
                   const NodeSamples& full, const NewtonOptions& opts) {
  std::vector<std::size_t> active;
  std::vector<cplx> lam, last_step;
  for (std::size_t i = 0; i < candidates.size(); ++i)
    if (candidates[i].status == EigenStatus::raw) {
      active.push_back(i);
      lam.push_back(candidates[i].lambda_init);
    }
  last_step.assign(active.size(), cplx(std::numeric_limits<double>::infinity()));
  std::vector<char> running(active.size(), 1), failed(active.size(), 0);
  ScatterOptions so;
  so.with_derivative = true;
  so.threads = opts.threads;

  for (int iter = 0; iter < opts.max_iter; ++iter) {
    std::vector<std::size_t> idx;
    std::vector<cplx> pts;
    for (std::size_t i = 0; i < active.size(); ++i)
      if (running[i]) {
        idx.push_back(i);
        pts.push_back(lam[i]);
      }
    if (idx.empty()) break;
    const auto phis = scatter_slow(scheme, full, pts, so);
    for (std::size_t t = 0; t < idx.size(); ++t) {
      const std::size_t i = idx[t];
      const cplx a = phis[t].psi(0), da = phis[t].dpsi(0);
      if (da == 0.0 || !finite(a) || !finite(da)) {
        failed[i] = 1;
        running[i] = 0;
        continue;
      }
      const cplx step = a / da;
      lam[i] -= step;
      last_step[i] = step;
      if (!finite(lam[i])) {
        failed[i] = 1;
        running[i] = 0;
      } else if (std::abs(step) < opts.step_tol) {
        running[i] = 0;
      }
    }
  }

  const double limit = 0.9 * std::numbers::pi / full.grid.h();
  for (std::size_t i = 0; i < active.size(); ++i) {
    auto& c = candidates[active[i]];
    if (failed[i] || std::abs(last_step[i]) > 1e-8 * (1.0 + std::abs(lam[i]))) {
      c.status = EigenStatus::diverged;
      continue;
    }
    c.lambda_refined = lam[i];
    c.status = lam[i].imag() > 0.0 && std::abs(lam[i].real()) < limit ? EigenStatus::refined
                                                                      : EigenStatus::filtered_out;
  }
}

void dedupe_and_pair(std::vector<EigenCandidate>& candidates, double tol) {
  std::vector<std::size_t> reps;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    auto& c = candidates[i];
    if (c.status != EigenStatus::refined) continue;
    const cplx v = *c.lambda_refined;
    auto it = std::find_if(reps.begin(), reps.end(), [&](std::size_t r) {
      return std::abs(*candidates[r].lambda_refined - v) < tol;
    });
    if (it == reps.end()) {
      reps.push_back(i);
      continue;
    }
    auto& keep = candidates[*it];
    if (std::abs(c.lambda_init - v) < std::abs(keep.lambda_init - *keep.lambda_refined)) {
      keep.status = EigenStatus::duplicate_discarded;
      *it = i;
    } else {
      c.status = EigenStatus::duplicate_discarded;
    }
  }
}

cplx eigen_richardson(cplx lambda_newton, cplx lambda_init, int r, double h_sub, double h) {
  if (!(h > 0.0) || !(h_sub > h))
    throw std::invalid_argument("eigen_richardson: need h_sub > h > 0");
  const double w = std::pow(h_sub / h, r);
  return (w * lambda_newton - lambda_init) / (w - 1.0);
}

double eigen_error(std::span<const cplx> truth, std::span<const cplx> found) {
  if (truth.empty()) throw std::invalid_argument("eigen_error: empty reference set");
  if (found.empty()) return std::numeric_limits<double>::infinity();
  auto directed = [](std::span<const cplx> from, std::span<const cplx> to) {
    double worst = 0.0;
    for (cplx a : from) {
      double best = std::numeric_limits<double>::infinity();
      for (cplx b : to) best = std::min(best, std::abs(a - b));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(directed(truth, found), directed(found, truth));
}

EigenSet discrete_spectrum(const CfqmScheme& scheme, const SampledSignal& signal,
                           const EigenOptions& opts) {
  EigenSet set;
  set.h = signal.grid.h();
  set.r = scheme.order;
  const NodeSamples full = node_samples(signal, scheme);
  Subsampled sub;
  if (opts.subsample && signal.size() >= 4) {
    sub = subsample(signal, scheme, subsample_size(signal.size()));
  } else {
    sub.nodes = full;
  }
  set.h_sub = sub.nodes.grid.h();

  ZMapping mapping;
  const auto poly = a_num_poly(scheme, sub.nodes, &mapping);
  const auto roots = find_roots(poly);
  set.candidates = map_and_filter(roots, mapping);
  newton_refine(set.candidates, scheme, full, opts.newton);
  dedupe_and_pair(set.candidates);
  if (sub.stride > 1)
    for (auto& c : set.candidates)
      if (c.status == EigenStatus::refined)
        c.lambda_extrapolated =
            eigen_richardson(*c.lambda_refined, c.lambda_init, set.r, set.h_sub, set.h);
  return set;
}

void write_eigen_csv(std::ostream& os, const EigenSet& set) {
  const auto old = os.precision(17);
  os << "re_lambda,im_lambda,status,re_init,im_init\n";
  for (const auto& c : set.candidates) {
    const cplx v = c.lambda_extrapolated   ? *c.lambda_extrapolated
                   : c.lambda_refined      ? *c.lambda_refined
                                           : cplx(std::nan(""), std::nan(""));
    os << v.real() << ',' << v.imag() << ',' << to_string(c.status) << ','
       << c.lambda_init.real() << ',' << c.lambda_init.imag() << '\n';
  }
  os.precision(old);
}

}  // namespace nft
