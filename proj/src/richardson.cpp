#include "nft/richardson.hpp"

#include <cmath>
#include <stdexcept>

namespace nft {

SampledSignal coarse_grid_signal(const SampledSignal& signal) {
  if (signal.size() % 2 != 0)
    throw std::invalid_argument("coarse_grid_signal: sample count must be even");
  const SignalGrid& g = signal.grid;
  SignalGrid coarse(g.t_minus, g.t_plus, g.d / 2, g.kappa);
  std::vector<cplx> q(coarse.d);
  if (signal.has_exact()) {
    for (std::size_t k = 0; k < coarse.d; ++k) q[k] = signal.exact(coarse.time(k));
  } else {
    const auto shifted = bandlimited_shift(signal.samples, -0.5 * g.h(), g.h());
    for (std::size_t k = 0; k < coarse.d; ++k) q[k] = shifted[2 * k];
  }
  SampledSignal out(coarse, std::move(q));
  out.exact = signal.exact;
  return out;
}

SpectrumResult reflection_fast_re(const CfqmScheme& scheme, const SampledSignal& signal,
                                  std::size_t m, double lambda_max) {
  const SampledSignal coarse_signal = coarse_grid_signal(signal);
  // The coarse run has the narrower band, so check it first.
  SpectrumResult coarse = reflection_fast(scheme, coarse_signal, m, lambda_max);
  SpectrumResult fine = reflection_fast(scheme, signal, m, lambda_max);
  SpectrumResult r;
  r.lambdas = fine.lambdas;
  r.a.resize(m);
  r.b.resize(m);
  r.rho.resize(m);
  for (std::size_t k = 0; k < m; ++k) {
    r.a[k] = richardson_combine(fine.a[k], coarse.a[k], scheme.order);
    r.b[k] = richardson_combine(fine.b[k], coarse.b[k], scheme.order);
    r.rho[k] = richardson_combine(fine.rho[k], coarse.rho[k], scheme.order);
    if (!std::isfinite(r.rho[k].real()) || !std::isfinite(r.rho[k].imag())) ++r.non_finite;
  }
  return r;
}

}  // namespace nft
