#ifndef NFT_RICHARDSON_HPP
#define NFT_RICHARDSON_HPP

// Richardson extrapolation of fast spectra computed at step sizes h and 2h.

#include "nft/fast.hpp"

namespace nft {

/// (2^r fine - coarse) / (2^r - 1).
template <typename V>
V richardson_combine(const V& fine, const V& coarse, int r) {
  const double p = std::ldexp(1.0, r);
  return (p * fine - coarse) / (p - 1.0);
}

/// Samples at the midpoints of the 2h grid, T- + (2k+1) h. Uses the exact
/// sampler when present, otherwise a half-sample bandlimited shift followed by
/// decimation.
SampledSignal coarse_grid_signal(const SampledSignal& signal);

/// Fast spectrum at h and 2h combined with the scheme's nominal order.
SpectrumResult reflection_fast_re(const CfqmScheme& scheme, const SampledSignal& signal,
                                  std::size_t m, double lambda_max);

}  // namespace nft

#endif  // NFT_RICHARDSON_HPP
