#ifndef NFT_SIGNALS_HPP
#define NFT_SIGNALS_HPP

// Sampled signals on midpoint grids and the three benchmark signals with
// closed-form nonlinear Fourier spectra.

#include <complex>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace nft {

using cplx = std::complex<double>;

/// Truncation interval [t_minus, t_plus] split into d cells of width h, sampled
/// at the cell midpoints. kappa = +1 is the focusing case, -1 defocusing.
struct SignalGrid {
  double t_minus = 0.0;
  double t_plus = 0.0;
  std::size_t d = 0;
  int kappa = 1;

  SignalGrid() = default;
  SignalGrid(double t_minus, double t_plus, std::size_t d, int kappa);

  double h() const { return (t_plus - t_minus) / static_cast<double>(d); }
  double time(std::size_t n) const {
    return t_minus + (static_cast<double>(n) + 0.5) * h();
  }
  std::vector<double> times() const;
};

/// Samples q_n = q(t_n). When `exact` is set the signal can also be evaluated
/// at arbitrary times, which bypasses bandlimited interpolation downstream.
struct SampledSignal {
  SignalGrid grid;
  std::vector<cplx> samples;
  std::function<cplx(double)> exact;

  SampledSignal() = default;
  SampledSignal(SignalGrid g, std::vector<cplx> s);

  std::size_t size() const { return samples.size(); }
  bool has_exact() const { return static_cast<bool>(exact); }
};

/// Closed-form spectrum of a benchmark signal.
struct AnalyticSpectrum {
  std::function<cplx(double)> rho;
  std::function<cplx(double)> a;
  std::function<cplx(double)> b;
  std::vector<cplx> eigenvalues;
  std::vector<cplx> b_values;
};

// Example 1: q(t) = q0 exp(-2i lambda0 t) sech(t), kappa = +1.

cplx sech_focusing_value(double q0, double lambda0, double t);
SampledSignal sample_sech_focusing(double q0, double lambda0, const SignalGrid& grid);

struct ScatteringCoeffs {
  cplx a;
  cplx b;
  cplx rho;
};

ScatteringCoeffs oracle_sech_focusing(double q0, double lambda0, double lambda);
AnalyticSpectrum sech_focusing_spectrum(double q0, double lambda0);

// Example 2: one-pole rational reflection coefficient, kappa = +1.

cplx rational_onepole_value(cplx alpha, double beta, double t);
SampledSignal sample_rational_onepole(cplx alpha, double beta, const SignalGrid& grid);
std::vector<cplx> sample_rational_onepole_at(cplx alpha, double beta,
                                             const std::vector<double>& times);
cplx oracle_rational_onepole(cplx alpha, double beta, cplx lambda);
AnalyticSpectrum rational_onepole_spectrum(cplx alpha, double beta);

// Example 3: q(t) = (Q/L) sech(t/L)^(1 - 2iG), kappa = -1.

cplx sech_defocusing_value(double g, double l, double q, double t);
SampledSignal sample_sech_defocusing(double g, double l, double q, const SignalGrid& grid);
cplx oracle_sech_defocusing(double g, double l, double q, double lambda);
AnalyticSpectrum sech_defocusing_spectrum(double g, double l, double q);

/// Propagation of the scattering data along the fibre: (a, b exp(-4i lambda^2 x)).
std::pair<cplx, cplx> evolve_spectrum(cplx a, cplx b, cplx lambda, double x);

// CSV exchange format: header "t,re_q,im_q", 17 significant digits.

void write_signal_csv(std::ostream& os, const SampledSignal& s);
void write_signal_csv(const std::string& path, const SampledSignal& s);
/// Reads a midpoint-sampled signal; the grid is inferred from the sample times.
SampledSignal read_signal_csv(std::istream& is, int kappa);
SampledSignal read_signal_csv(const std::string& path, int kappa);

}  // namespace nft

#endif  // NFT_SIGNALS_HPP
