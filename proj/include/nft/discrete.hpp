#ifndef NFT_DISCRETE_HPP
#define NFT_DISCRETE_HPP

// Eigenvalues (zeros of a in the upper half-plane) by subsample and refine:
// roots of the fast a-polynomial of a subsampled signal give initial guesses,
// Newton iterations on the full signal refine them, and the two step sizes
// are combined by Richardson extrapolation.

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nft/fast.hpp"

namespace nft {

enum class EigenStatus { raw, filtered_out, refined, duplicate_discarded, diverged };

std::string to_string(EigenStatus s);

struct EigenCandidate {
  cplx lambda_init;
  std::optional<cplx> lambda_refined;
  std::optional<cplx> lambda_extrapolated;
  EigenStatus status = EigenStatus::raw;
};

struct EigenSet {
  std::vector<EigenCandidate> candidates;
  double h = 0.0;
  double h_sub = 0.0;
  int r = 0;

  /// Refined eigenvalues, or the extrapolated ones when available and asked for.
  std::vector<cplx> eigenvalues(bool extrapolated = false) const;
};

/// Numerator of the (1,1) entry of the fast transfer polynomial.
std::vector<cplx> a_num_poly(const CfqmScheme& scheme, const NodeSamples& nodes,
                             ZMapping* mapping_out = nullptr);

/// round(sqrt(D log2(D)^2)).
std::size_t subsample_size(std::size_t d);

/// Every stride-th sample, stride = round(D / d_sub), taken over the whole
/// window. The coarse grid is placed so that the kept samples sit at its cell
/// midpoints. Off-midpoint node values come from the full signal.
struct Subsampled {
  NodeSamples nodes;
  std::size_t stride = 1;
};
Subsampled subsample(const SampledSignal& signal, const CfqmScheme& scheme, std::size_t d_sub);

/// All roots of sum_k c_k z^k. Companion-matrix eigenvalues for small degree,
/// Aberth-Ehrlich iteration otherwise. Zero roots from vanishing low-order
/// coefficients are included.
std::vector<cplx> find_roots(std::span<const cplx> coeffs);

/// lambda = m log(z) / (i h); keeps Im lambda > 0 and |Re lambda| < 0.9 pi / h.
std::vector<EigenCandidate> map_and_filter(std::span<const cplx> roots, const ZMapping& mapping);

struct NewtonOptions {
  double step_tol = 1e-15;
  int max_iter = 15;
  unsigned threads = 1;
};

/// Newton on a(lambda) from the slow scheme with the derivative channel.
/// Only candidates with status raw are touched.
void newton_refine(std::vector<EigenCandidate>& candidates, const CfqmScheme& scheme,
                   const NodeSamples& full, const NewtonOptions& opts = {});

/// Merges refined values closer than tol; the nearest initial guess is kept.
void dedupe_and_pair(std::vector<EigenCandidate>& candidates, double tol = 1e-9);

/// ((h_sub/h)^r lambda_newton - lambda_init) / ((h_sub/h)^r - 1).
cplx eigen_richardson(cplx lambda_newton, cplx lambda_init, int r, double h_sub, double h);

/// Two-sided max-min distance; +inf when nothing was found.
double eigen_error(std::span<const cplx> truth, std::span<const cplx> found);

struct EigenOptions {
  bool subsample = true;
  NewtonOptions newton;
};

EigenSet discrete_spectrum(const CfqmScheme& scheme, const SampledSignal& signal,
                           const EigenOptions& opts = {});

/// Columns re_lambda,im_lambda,status,re_init,im_init; lambda is the
/// extrapolated value when present, else the refined one.
void write_eigen_csv(std::ostream& os, const EigenSet& set);

}  // namespace nft

#endif  // NFT_DISCRETE_HPP
