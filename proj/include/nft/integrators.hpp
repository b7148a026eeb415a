#ifndef NFT_INTEGRATORS_HPP
#define NFT_INTEGRATORS_HPP

// Slow O(D M) scattering with commutator-free quasi-Magnus (CFQM) exponential
// integrators, and recovery of the scattering data from the propagated
// eigenfunction.

#include <complex>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "nft/linalg.hpp"
#include "nft/signals.hpp"

namespace nft {

/// CF_J^[r]: J exponentials per step built from K signal nodes per step.
/// a is J x K, c holds the K node offsets in [0, 1].
struct CfqmScheme {
  std::string name;
  int order = 0;
  Eigen::MatrixXcd a;
  Eigen::VectorXd c;

  int exponentials() const { return static_cast<int>(a.rows()); }
  int nodes() const { return static_cast<int>(a.cols()); }
  bool complex_coeffs() const;
  /// Row sums w_j = sum_k a_jk, the weight of -i lambda in exponential j.
  Eigen::VectorXcd lambda_weights() const;

  static CfqmScheme cf1_2();
  static CfqmScheme cf2_4();
  /// Reads a user-supplied table. Rows are either "a,j,k,re[,im]" or
  /// "c,k,value" (1-based indices); lines starting with '#' are comments and a
  /// line "order,r" sets the nominal order.
  static CfqmScheme from_csv(const std::string& path);
  static CfqmScheme from_csv_text(const std::string& text, const std::string& name);
};

/// Signal values at the K scheme nodes of every step:
/// nodes[k][n] = q(t_n + (c_k - 1/2) h).
struct NodeSamples {
  SignalGrid grid;
  std::vector<std::vector<cplx>> nodes;
};

/// Fourier time shift of equispaced samples: returns q(t - t_s) on the same
/// grid, using the DFT frequency ordering [0..floor(N/2), -floor((N-1)/2)..-1].
std::vector<cplx> bandlimited_shift(std::span<const cplx> samples, double t_s, double h);

/// Node values by bandlimited interpolation, or by direct evaluation when the
/// signal carries an exact sampler.
NodeSamples node_samples(const SampledSignal& signal, const CfqmScheme& scheme);

/// One integrator step G_n = expm(B_J) ... expm(B_1) with
/// B_j = h sum_k a_jk C(q_k, lambda).
Mat2d transfer_step(const CfqmScheme& scheme, std::span<const cplx> node_values, cplx lambda,
                    double h, int kappa);

/// Eigenfunction at T+ stored in the phase-scaled form psi = phi(T+) e^{i lambda T+}.
/// Propagating psi instead of phi keeps the first component O(|a|) for every
/// lambda in the closed upper half-plane.
struct Eigenfunction {
  Vec2d psi = Vec2d::Zero();
  Vec2d dpsi = Vec2d::Zero();  // d psi / d lambda, when requested
  bool has_derivative = false;
};

struct ScatterOptions {
  bool with_derivative = false;
  unsigned threads = 1;
};

/// Propagates phi(T-) = (e^{-i lambda T-}, 0) across all D steps for every lambda.
std::vector<Eigenfunction> scatter_slow(const CfqmScheme& scheme, const NodeSamples& nodes,
                                        std::span<const cplx> lambdas,
                                        const ScatterOptions& opts = {});

struct Coefficients {
  cplx a;
  cplx b;
};

/// a = phi_1(T+) e^{i lambda T+}, b = phi_2(T+) e^{-i lambda T+}.
Coefficients scattering_to_coeffs(const Eigenfunction& phi, cplx lambda, double t_minus,
                                  double t_plus);

/// Reflection coefficient samples on a lambda grid.
struct SpectrumResult {
  std::vector<double> lambdas;
  std::vector<cplx> a;
  std::vector<cplx> b;
  std::vector<cplx> rho;
  std::size_t non_finite = 0;  // grid points where a vanished
};

/// M equally spaced points in [-lambda_max, lambda_max], endpoints included.
std::vector<double> lambda_grid(std::size_t m, double lambda_max);

SpectrumResult reflection_slow(const CfqmScheme& scheme, const SampledSignal& signal,
                               std::size_t m, double lambda_max, unsigned threads = 1);

/// Deterministic parallel loop: body(i) for i in [0, n), statically chunked.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body);

}  // namespace nft

#endif  // NFT_INTEGRATORS_HPP
