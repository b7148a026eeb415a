// Command line driver: reflection-coefficient sweeps, eigenvalue runs and the
// FLOP cost model.

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nft/bench.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kNumericalError = 3;

std::vector<double> parse_range(const std::string& text) {
  std::vector<double> parts;
  std::stringstream ss(text);
  for (std::string tok; std::getline(ss, tok, ':');) parts.push_back(std::stod(tok));
  if (parts.size() != 3 || !(parts[1] > 0) || parts[2] < parts[0])
    throw std::invalid_argument("amplitude sweep must be a0:step:a1 with step > 0");
  std::vector<double> out;
  const auto n = static_cast<long>(std::floor((parts[2] - parts[0]) / parts[1] + 1e-9));
  for (long k = 0; k <= n; ++k) out.push_back(parts[0] + k * parts[1]);
  return out;
}

std::string with_suffix(const std::string& path, const std::string& suffix) {
  const auto dot = path.find_last_of('.');
  const auto slash = path.find_last_of('/');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
    return path + suffix;
  return path.substr(0, dot) + suffix + path.substr(dot);
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::invalid_argument("cannot write " + path);
  return f;
}

struct RunArgs {
  std::string example = "1";
  std::string signal;
  int kappa = 1;
  std::vector<std::string> methods;
  std::vector<std::size_t> d_values;
  std::size_t m = 0;
  double lambda_max = 0.0;
  std::string amplitude_sweep;
  int repetitions = 3;
  unsigned threads = 1;
  std::string out = "results.csv";
  std::string plot;
};

int cmd_run(const RunArgs& a, bool lambda_given) {
  if (a.example == "csv") {
    if (a.signal.empty()) throw std::invalid_argument("--example csv needs --signal <file>");
    if (!lambda_given) throw std::invalid_argument("--example csv needs --lambda-max");
    const nft::SampledSignal s = nft::read_signal_csv(a.signal, a.kappa);
    const std::size_t m = a.m ? a.m : s.size();
    for (const auto& id : a.methods) {
      const auto method = nft::parse_method(id);
      const auto r = nft::compute_spectrum(method, s, m, a.lambda_max, a.threads);
      const std::string path = a.methods.size() > 1 ? with_suffix(a.out, "_" + id) : a.out;
      auto f = open_out(path);
      nft::write_spectrum_csv(f, r);
      std::cout << id << ": D=" << s.size() << " M=" << m << " non-finite=" << r.non_finite
                << " -> " << path << '\n';
    }
    return 0;
  }
  nft::SweepConfig cfg;
  cfg.example = a.example;
  cfg.methods = a.methods;
  cfg.d_values = a.d_values;
  cfg.m = a.m;
  if (lambda_given) cfg.lambda_max = a.lambda_max;
  if (!a.amplitude_sweep.empty()) cfg.amplitudes = parse_range(a.amplitude_sweep);
  cfg.repetitions = a.repetitions;
  cfg.threads = a.threads;

  const auto rows = nft::run_sweep(cfg);
  {
    auto f = open_out(a.out);
    nft::write_results_csv(f, rows);
  }
  const auto slopes = nft::sweep_slopes(rows);
  {
    auto f = open_out(a.out + ".slopes.csv");
    nft::write_slopes_csv(f, slopes);
  }
  if (!a.plot.empty()) {
    auto f = open_out(a.plot);
    nft::write_svg_plot(f, rows, "Example " + a.example);
  }

  std::cout << std::setw(12) << "method" << std::setw(8) << "D" << std::setw(14) << "E_rho"
            << std::setw(14) << "E_b" << std::setw(12) << "time[s]" << '\n';
  for (const auto& r : rows)
    std::cout << std::setw(12) << r.method << std::setw(8) << r.d << std::setw(14)
              << std::setprecision(4) << r.e_rho << std::setw(14) << r.e_b << std::setw(12)
              << r.time_s << '\n';
  for (const auto& s : slopes) {
    std::cout << "slope " << s.method;
    if (s.amplitude >= 0 && !cfg.amplitudes.empty()) std::cout << " q0=" << s.amplitude;
    std::cout << ": error " << std::setprecision(3) << s.error.slope << " over "
              << (s.error.last - s.error.first) << " points, time exponent " << s.time.slope
              << '\n';
  }
  std::size_t bad = 0;
  for (const auto& r : rows) bad += r.excluded;
  if (bad > 0) {
    std::cerr << "warning: " << bad << " non-finite spectrum values were excluded\n";
    return kNumericalError;
  }
  return 0;
}

struct EigenArgs {
  std::string example = "1";
  std::vector<std::size_t> d_values;
  std::string method = "FCF_RE2_4";
  bool no_subsample = false;
  unsigned threads = 1;
  std::string out = "eigen.csv";
};

int cmd_eigen(const EigenArgs& a) {
  if (a.example != "1")
    throw std::invalid_argument("eigen: only example 1 has a discrete spectrum");
  const auto method = nft::parse_method(a.method);
  if (method.pipeline == nft::Pipeline::slow && a.method.rfind("user:", 0) == 0)
    throw std::invalid_argument("eigen: needs a fast-eligible scheme");
  for (std::size_t d : a.d_values) {
    const auto ex = nft::make_example(a.example, d);
    nft::EigenOptions opts;
    opts.subsample = !a.no_subsample;
    opts.newton.threads = a.threads;
    auto set = nft::discrete_spectrum(method.scheme, ex.signal, opts);
    if (method.pipeline != nft::Pipeline::fast_re)
      for (auto& c : set.candidates) c.lambda_extrapolated.reset();
    const std::string path =
        a.d_values.size() > 1 ? with_suffix(a.out, "_D" + std::to_string(d)) : a.out;
    auto f = open_out(path);
    nft::write_eigen_csv(f, set);
    const auto found = set.eigenvalues(method.pipeline == nft::Pipeline::fast_re);
    std::cout << a.method << " D=" << d << " h=" << set.h << " h_sub=" << set.h_sub
              << " eigenvalues=" << found.size() << " E_Lambda=" << std::setprecision(4)
              << nft::eigen_error(ex.eigenvalues, found) << " -> " << path << '\n';
  }
  return 0;
}

int cmd_flops(const std::vector<std::string>& methods, const std::vector<std::size_t>& d_values,
              std::size_t m) {
  std::ostringstream table;
  table << "method,D,M,flops\n" << std::setprecision(17);
  for (const auto& method : methods)
    for (std::size_t d : d_values) {
      const std::size_t mm = m ? m : d;
      table << method << ',' << d << ',' << mm << ','
            << nft::flop_count(method, static_cast<double>(d), static_cast<double>(mm)) << '\n';
    }
  std::cout << table.str() << "# fourth-order fast/slow crossover (M = D): D = "
            << nft::flop_crossover() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fast higher-order nonlinear Fourier transforms"};
  app.set_config("--config", "", "Read options from a TOML/INI file");
  app.require_subcommand(1);

  RunArgs run;
  auto* sub_run = app.add_subcommand("run", "Reflection-coefficient error and timing sweep");
  sub_run->add_option("--example", run.example, "1, 2, 3 or csv")
      ->check(CLI::IsMember({"1", "2", "3", "csv"}));
  sub_run->add_option("--signal", run.signal, "Signal file t,re_q,im_q (example csv)");
  sub_run->add_option("--kappa", run.kappa, "+1 focusing, -1 defocusing (example csv)")
      ->check(CLI::IsMember({1, -1}));
  sub_run->add_option("--method", run.methods, "Method ids")->required()->delimiter(',');
  sub_run->add_option("--D", run.d_values, "Sample counts")->delimiter(',');
  sub_run->add_option("--M", run.m, "Grid points (default D)");
  auto* lmax = sub_run->add_option("--lambda-max", run.lambda_max, "Grid half-width");
  sub_run->add_option("--amplitude-sweep", run.amplitude_sweep, "a0:step:a1 (example 1)");
  sub_run->add_option("--repetitions", run.repetitions, "Timing repetitions (best of)")
      ->check(CLI::PositiveNumber);
  sub_run->add_option("--threads", run.threads, "Worker threads for slow methods")
      ->check(CLI::PositiveNumber);
  sub_run->add_option("--out", run.out, "Result CSV");
  sub_run->add_option("--plot", run.plot, "SVG plot of E_rho against h");

  EigenArgs eig;
  auto* sub_eig = app.add_subcommand("eigen", "Discrete spectrum by subsample and refine");
  sub_eig->add_option("--example", eig.example, "Example id")->check(CLI::IsMember({"1"}));
  sub_eig->add_option("--D", eig.d_values, "Sample counts")->required()->delimiter(',');
  sub_eig->add_option("--method", eig.method, "Method id");
  sub_eig->add_flag("--no-subsample", eig.no_subsample, "Root-find on the full signal");
  sub_eig->add_option("--threads", eig.threads, "Worker threads for Newton refinement");
  sub_eig->add_option("--out", eig.out, "Eigenvalue CSV");

  std::vector<std::string> fl_methods{"FCF2_4"};
  std::vector<std::size_t> fl_d;
  std::size_t fl_m = 0;
  auto* sub_fl = app.add_subcommand("flops", "FLOP cost model");
  sub_fl->add_option("--method", fl_methods, "CF2_4, FCF2_4 or FCF_RE2_4")->delimiter(',');
  sub_fl->add_option("--D", fl_d, "Sample counts")->required()->delimiter(',');
  sub_fl->add_option("--M", fl_m, "Grid points (default D)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    if (*sub_run) {
      if (run.example != "csv" && run.d_values.empty())
        throw std::invalid_argument("--D is required");
      return cmd_run(run, lmax->count() > 0);
    }
    if (*sub_eig) return cmd_eigen(eig);
    if (*sub_fl) return cmd_flops(fl_methods, fl_d, fl_m);
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::domain_error& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumericalError;
  }
  return 0;
}
