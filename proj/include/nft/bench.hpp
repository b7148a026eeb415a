#ifndef NFT_BENCH_HPP
#define NFT_BENCH_HPP

// Error metrics, the ODE reference solver, the FLOP cost model and the sweep
// driver used by the command line tool and the acceptance suite.

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nft/discrete.hpp"
#include "nft/richardson.hpp"

namespace nft {

// ---------------------------------------------------------------- errors

struct ErrorValue {
  double value = 0.0;
  std::size_t excluded = 0;  // pairs dropped because the computed value was not finite
};

/// sqrt(sum |x - y|^2) / sqrt(sum |x|^2) over finite pairs.
ErrorValue error_rho(std::span<const cplx> truth, std::span<const cplx> computed);
ErrorValue error_b(std::span<const cplx> truth, std::span<const cplx> computed);

// ---------------------------------------------------------------- ODE oracle

/// Adaptive Gragg-Bulirsch-Stoer integration of the scattering ODE in the
/// interaction picture, psi' = [[0, q e^{2ilt}], [-kappa q* e^{-2ilt}, 0]] psi,
/// psi(T-) = (1, 0); then a = psi_1(T+), b = psi_2(T+). Breakpoints mark
/// discontinuities of q.
struct OdeOptions {
  double tol = 1e-12;
  int panels = 256;
  std::vector<double> breaks;
};

ScatteringCoeffs ode_oracle(const std::function<cplx(double)>& q, int kappa, double t_minus,
                            double t_plus, cplx lambda, const OdeOptions& opts = {});

// ---------------------------------------------------------------- cost model

/// FLOP weights per operation.
namespace flops {
double fft(double n);
double czt(double n);
double fast_scattering(double n);
}  // namespace flops

/// Modelled FLOPs of CF2_4, FCF2_4 and FCF_RE2_4 for D samples and M grid
/// points. Other methods throw std::invalid_argument.
double flop_count(const std::string& method, double d, double m);

/// Smallest D (with M = D) at which the fast fourth-order method is cheaper;
/// 0 if none up to 2^16. The fast-scattering term jumps at powers of two, so
/// the ordering can flip back briefly just above a power of two.
std::size_t flop_crossover();

// ---------------------------------------------------------------- slopes

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  std::size_t first = 0;  // index range [first, last) used
  std::size_t last = 0;
};

/// Least-squares line through (log x, log y).
SlopeFit fit_loglog(std::span<const double> x, std::span<const double> y);

/// Fit over the pre-floor region of an error-vs-h curve given in order of
/// decreasing h. Leading points with error >= 1 are skipped and the fit uses
/// the leading run of strictly decreasing errors, trimmed at the tail while the
/// last segment is flatter than 2/3 of the median segment slope (floor onset)
/// and at the head while the first is steeper than 3/2 of it (pre-asymptotic).
SlopeFit fit_prefloor(std::span<const double> h, std::span<const double> err);

// ---------------------------------------------------------------- methods

enum class Pipeline { slow, fast, fast_re };

struct Method {
  std::string id;
  Pipeline pipeline = Pipeline::slow;
  CfqmScheme scheme;
};

/// CF1_2, CF2_4, FCF1_2, FCF2_4, FCF_RE1_2, FCF_RE2_4 or user:<table.csv>.
Method parse_method(const std::string& id);

SpectrumResult compute_spectrum(const Method& method, const SampledSignal& signal,
                                std::size_t m, double lambda_max, unsigned threads = 1);

// ---------------------------------------------------------------- sweeps

struct ExampleCase {
  SampledSignal signal;
  std::function<cplx(double)> rho;  // empty when unknown
  std::function<cplx(double)> b;    // empty when unknown
  std::vector<cplx> eigenvalues;
  double lambda_max = 0.0;
};

/// Benchmark signal "1", "2" or "3" with D samples; amplitude overrides the
/// first example's q0 when given.
ExampleCase make_example(const std::string& example, std::size_t d,
                         std::optional<double> amplitude = std::nullopt);

struct SweepConfig {
  std::string example = "1";
  std::string csv_path;  // signal file for example "csv"
  int kappa = 1;         // for example "csv"
  std::vector<std::string> methods;
  std::vector<std::size_t> d_values;
  std::size_t m = 0;  // 0 selects M = D
  std::optional<double> lambda_max;
  std::vector<double> amplitudes;
  int repetitions = 3;
  unsigned threads = 1;
};

struct SweepRow {
  std::string method;
  std::string example;
  std::size_t d = 0;
  double h = 0.0;
  double amplitude = 0.0;
  std::size_t m = 0;
  double lambda_max = 0.0;
  double e_rho = 0.0;
  double e_b = 0.0;
  std::size_t excluded = 0;
  double time_s = 0.0;
  double flops = 0.0;
};

struct SweepSlope {
  std::string method;
  double amplitude = 0.0;
  SlopeFit error;
  SlopeFit time;
};

/// Runs every (method, amplitude, D) cell; reported time is the minimum over
/// the repetitions. Errors are NaN where no closed-form truth is known.
std::vector<SweepRow> run_sweep(const SweepConfig& config);
std::vector<SweepSlope> sweep_slopes(const std::vector<SweepRow>& rows);

void write_results_csv(std::ostream& os, const std::vector<SweepRow>& rows);
std::vector<SweepRow> read_results_csv(std::istream& is);
void write_slopes_csv(std::ostream& os, const std::vector<SweepSlope>& slopes);

/// Log-log SVG chart of E_rho against h, one polyline per (method, amplitude).
void write_svg_plot(std::ostream& os, const std::vector<SweepRow>& rows,
                    const std::string& title);

/// Spectrum table: lambda,re_a,im_a,re_b,im_b,re_rho,im_rho.
void write_spectrum_csv(std::ostream& os, const SpectrumResult& r);

}  // namespace nft

#endif  // NFT_BENCH_HPP
