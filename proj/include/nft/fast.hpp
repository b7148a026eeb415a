#ifndef NFT_FAST_HPP
#define NFT_FAST_HPP

// Fast scattering: each CFQM step becomes a 2x2 polynomial matrix in
// z = exp(i lambda h / m), all steps are multiplied in a binary tree of FFT
// products and the result is evaluated on the lambda grid with a chirp-Z
// transform. Cost O(D log^2 D + (D + M) log(D + M)).

#include <span>
#include <vector>

#include "nft/integrators.hpp"
#include "nft/linalg.hpp"

namespace nft {

/// z = exp(i lambda h / m). powers[j] = m w_j is the z-power of the diagonal
/// part of exponential j.
struct ZMapping {
  int m = 1;
  double h = 0.0;
  std::vector<int> powers;

  /// Largest |Re lambda| that maps injectively onto the unit circle.
  double band() const;
};

/// Smallest m <= 16 making every m w_j a positive integer. Rejects schemes with
/// complex coefficients or no such m.
ZMapping choose_mapping(const CfqmScheme& scheme, double h);

/// Fourth-order splitting of exp(diag(-i l h w, i l h w) + [[0, u], [v, 0]])
/// where l h w = p log(z) / i. Returns z^p times the approximation, a
/// polynomial of degree 2p with denom_power p:
///   S2(t)  = e^{O t/2} e^{A t} e^{O t/2},  S4 = (4 S2(1/2)^2 - S2(1)) / 3.
PolyMat2d split_exponential(cplx upper, cplx lower, int p);

/// Product of the J split exponentials of step n, latest exponential leftmost.
/// Approximates G_n with denom_power m; the numerator alone is e^{i lambda h} G_n.
PolyMat2d step_polymat(const CfqmScheme& scheme, const ZMapping& mapping,
                       std::span<const cplx> node_values, double h, int kappa);

/// Greedy power-of-two decomposition of D, largest block first (13 -> 8, 4, 1).
std::vector<std::size_t> power_of_two_blocks(std::size_t d);

/// H = steps[D-1] ... steps[0]. Greedy power-of-two blocks, latest samples in
/// the leftmost block, each block multiplied as a balanced binary tree.
PolyMat2d tree_multiply(std::vector<PolyMat2d> steps);

/// Evaluates the polynomial at z_k = exp(i lambda_k h / m) for the M-point grid
/// on [-lambda_max, lambda_max]. Throws std::domain_error when the grid leaves
/// the resolvable band.
std::vector<cplx> evaluate_poly_unit_circle(std::span<const cplx> coeffs, std::size_t m,
                                            double lambda_max, const ZMapping& mapping);

/// Scaled transfer polynomial of the whole signal; entry (0,0) gives a and
/// entry (1,0) gives b e^{2 i lambda T+}.
PolyMat2d transfer_polymat(const CfqmScheme& scheme, const SampledSignal& signal,
                           ZMapping* mapping_out = nullptr);
PolyMat2d transfer_polymat(const CfqmScheme& scheme, const NodeSamples& nodes,
                           ZMapping* mapping_out = nullptr);

SpectrumResult reflection_fast(const CfqmScheme& scheme, const SampledSignal& signal,
                               std::size_t m, double lambda_max);

/// b on the lambda grid (same pipeline as reflection_fast).
std::vector<cplx> b_coefficient_fast(const CfqmScheme& scheme, const SampledSignal& signal,
                                     std::size_t m, double lambda_max);

}  // namespace nft

#endif  // NFT_FAST_HPP
