#include "nft/fast.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace nft {

namespace {

constexpr cplx kI{0.0, 1.0};

Mat2d off_diagonal(cplx upper, cplx lower, double scale) {
  Mat2d b;
  b << 0.0, scale * upper, scale * lower, 0.0;
  return b;
}

PolyMat2d multiply(const PolyMat2d& a, const PolyMat2d& b) {
  const std::size_t na = a.degree() + 1, nb = b.degree() + 1;
  if (std::min(na, nb) <= 8 || na + nb <= 64) return polymat_mul_direct(a, b);
  return polymat_mul(a, b);
}

PolyMat2d block_product(std::vector<PolyMat2d>& steps, std::size_t lo, std::size_t hi) {
  if (hi - lo == 1) return std::move(steps[lo]);
  const std::size_t mid = lo + (hi - lo) / 2;
  PolyMat2d right = block_product(steps, lo, mid);
  PolyMat2d left = block_product(steps, mid, hi);
  return multiply(left, right);
}

}  // namespace

double ZMapping::band() const { return std::numbers::pi * m / h; }

ZMapping choose_mapping(const CfqmScheme& scheme, double h) {
  if (scheme.complex_coeffs())
    throw std::invalid_argument(scheme.name +
                                ": fast scattering needs real scheme coefficients");
  const Eigen::VectorXcd w = scheme.lambda_weights();
  for (int m = 1; m <= 16; ++m) {
    ZMapping z;
    z.m = m;
    z.h = h;
    bool ok = true;
    for (Eigen::Index j = 0; j < w.size() && ok; ++j) {
      const double p = m * w(j).real();
      const double r = std::round(p);
      ok = r >= 1.0 && std::abs(p - r) < 1e-12;
      z.powers.push_back(static_cast<int>(r));
    }
    if (ok) return z;
  }
  throw std::invalid_argument(scheme.name +
                              ": no mapping m <= 16 gives integer z-powers for the "
                              "diagonal weights");
}

PolyMat2d split_exponential(cplx upper, cplx lower, int p) {
  if (p < 1) throw std::invalid_argument("split_exponential: z-power must be positive");
  const Mat2d eq = expm_traceless_unchecked(off_diagonal(upper, lower, 0.25));
  const Mat2d eh = expm_traceless_unchecked(off_diagonal(upper, lower, 0.5));

  // S2(1/2)^2 scaled by z^p is Eq (M0 + M1 z^p + M2 z^2p) Eq with the entries
  // of Eh spread over the three powers; S2(1) is Eh diag(1, z^2p) Eh.
  Mat2d m0 = Mat2d::Zero(), m1 = Mat2d::Zero(), m2 = Mat2d::Zero();
  m0(0, 0) = eh(0, 0);
  m1(0, 1) = eh(0, 1);
  m1(1, 0) = eh(1, 0);
  m2(1, 1) = eh(1, 1);
  Mat2d d0 = Mat2d::Zero(), d2 = Mat2d::Zero();
  d0(0, 0) = 1.0;
  d2(1, 1) = 1.0;

  PolyMat2d r(2 * static_cast<std::size_t>(p), p);
  r.set_coefficient(0, (4.0 * eq * m0 * eq - eh * d0 * eh) / 3.0);
  r.set_coefficient(p, 4.0 * eq * m1 * eq / 3.0);
  r.set_coefficient(2 * p, (4.0 * eq * m2 * eq - eh * d2 * eh) / 3.0);
  return r;
}

PolyMat2d step_polymat(const CfqmScheme& scheme, const ZMapping& mapping,
                       std::span<const cplx> node_values, double h, int kappa) {
  if (static_cast<int>(node_values.size()) != scheme.nodes())
    throw std::invalid_argument("step_polymat: node count does not match scheme");
  if (static_cast<int>(mapping.powers.size()) != scheme.exponentials())
    throw std::invalid_argument("step_polymat: mapping does not match scheme");
  PolyMat2d acc;
  for (int j = 0; j < scheme.exponentials(); ++j) {
    cplx up = 0.0, lo = 0.0;
    for (int k = 0; k < scheme.nodes(); ++k) {
      const double a = scheme.a(j, k).real();
      up += a * node_values[k];
      lo += a * std::conj(node_values[k]);
    }
    PolyMat2d e = split_exponential(h * up, -static_cast<double>(kappa) * h * lo,
                                    mapping.powers[j]);
    acc = j == 0 ? std::move(e) : polymat_mul_direct(e, acc);
  }
  return acc;
}

std::vector<std::size_t> power_of_two_blocks(std::size_t d) {
  std::vector<std::size_t> blocks;
  while (d > 0) {
    std::size_t block = 1;
    while (block * 2 <= d) block *= 2;
    blocks.push_back(block);
    d -= block;
  }
  return blocks;
}

PolyMat2d tree_multiply(std::vector<PolyMat2d> steps) {
  if (steps.empty()) throw std::invalid_argument("tree_multiply: no steps");
  std::size_t hi = steps.size();
  PolyMat2d acc;
  bool first = true;
  for (std::size_t block : power_of_two_blocks(steps.size())) {
    PolyMat2d part = block_product(steps, hi - block, hi);
    acc = first ? std::move(part) : multiply(acc, part);
    first = false;
    hi -= block;
  }
  return acc;
}

std::vector<cplx> evaluate_poly_unit_circle(std::span<const cplx> coeffs, std::size_t m,
                                            double lambda_max, const ZMapping& mapping) {
  if (m == 0) return {};
  if (!(std::abs(lambda_max) < mapping.band()))
    throw std::domain_error("lambda_max = " + std::to_string(lambda_max) +
                            " is outside the resolvable band |lambda| < pi m / h = " +
                            std::to_string(mapping.band()));
  const double scale = mapping.h / mapping.m;
  const double dl = m > 1 ? 2.0 * lambda_max / static_cast<double>(m - 1) : 0.0;
  const double theta0 = m > 1 ? -lambda_max * scale : 0.0;
  return czt_unit_arc<double>(coeffs, theta0, dl * scale, m);
}

PolyMat2d transfer_polymat(const CfqmScheme& scheme, const NodeSamples& nodes,
                           ZMapping* mapping_out) {
  const double h = nodes.grid.h();
  const ZMapping mapping = choose_mapping(scheme, h);
  std::vector<PolyMat2d> steps(nodes.grid.d);
  std::vector<cplx> vals(scheme.nodes());
  for (std::size_t n = 0; n < steps.size(); ++n) {
    for (int k = 0; k < scheme.nodes(); ++k) vals[k] = nodes.nodes[k][n];
    steps[n] = step_polymat(scheme, mapping, vals, h, nodes.grid.kappa);
  }
  if (mapping_out) *mapping_out = mapping;
  return tree_multiply(std::move(steps));
}

PolyMat2d transfer_polymat(const CfqmScheme& scheme, const SampledSignal& signal,
                           ZMapping* mapping_out) {
  choose_mapping(scheme, signal.grid.h());
  return transfer_polymat(scheme, node_samples(signal, scheme), mapping_out);
}

namespace {

SpectrumResult fast_spectrum(const CfqmScheme& scheme, const SampledSignal& signal,
                             std::size_t m, double lambda_max) {
  SpectrumResult r;
  r.lambdas = lambda_grid(m, lambda_max);
  ZMapping mapping = choose_mapping(scheme, signal.grid.h());
  if (!(std::abs(lambda_max) < mapping.band()))
    throw std::domain_error("lambda_max = " + std::to_string(lambda_max) +
                            " is outside the resolvable band |lambda| < pi m / h = " +
                            std::to_string(mapping.band()));
  const PolyMat2d hmat = transfer_polymat(scheme, signal, &mapping);
  r.a = evaluate_poly_unit_circle(hmat.p[0], m, lambda_max, mapping);
  r.b = evaluate_poly_unit_circle(hmat.p[2], m, lambda_max, mapping);
  r.rho.resize(m);
  const double tp = signal.grid.t_plus;
  for (std::size_t k = 0; k < m; ++k) {
    r.b[k] *= std::exp(-2.0 * kI * r.lambdas[k] * tp);
    r.rho[k] = r.b[k] / r.a[k];
    if (r.a[k] == 0.0 || !std::isfinite(r.rho[k].real()) || !std::isfinite(r.rho[k].imag())) {
      r.rho[k] = {std::nan(""), std::nan("")};
      ++r.non_finite;
    }
  }
  return r;
}

}  // namespace

SpectrumResult reflection_fast(const CfqmScheme& scheme, const SampledSignal& signal,
                               std::size_t m, double lambda_max) {
  return fast_spectrum(scheme, signal, m, lambda_max);
}

std::vector<cplx> b_coefficient_fast(const CfqmScheme& scheme, const SampledSignal& signal,
                                     std::size_t m, double lambda_max) {
  return fast_spectrum(scheme, signal, m, lambda_max).b;
}

}  // namespace nft
