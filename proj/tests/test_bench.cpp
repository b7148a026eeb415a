#include <doctest.h>

#include <cmath>
#include <sstream>

#include "nft/bench.hpp"

using nft::cplx;

TEST_CASE("relative L2 errors") {
  const std::vector<cplx> t{cplx(1, 2), cplx(-3, 0.5), cplx(0.1, 0)};
  std::vector<cplx> twice, zero(3), neg;
  for (cplx v : t) {
    twice.push_back(2.0 * v);
    neg.push_back(-v);
  }
  CHECK(nft::error_rho(t, t).value == 0.0);
  CHECK(nft::error_rho(t, twice).value == doctest::Approx(1.0));
  CHECK(nft::error_rho(t, zero).value == doctest::Approx(1.0));
  CHECK(nft::error_b(t, t).value == 0.0);
  CHECK(nft::error_b(t, neg).value == doctest::Approx(2.0));

  std::vector<cplx> holey = t;
  holey[1] = cplx(std::nan(""), 0.0);
  const auto e = nft::error_rho(t, holey);
  CHECK(e.excluded == 1);
  CHECK(e.value == 0.0);
  CHECK_THROWS_AS(nft::error_rho(zero, t), std::invalid_argument);
  CHECK_THROWS_AS(nft::error_rho(t, std::vector<cplx>(2)), std::invalid_argument);
}

TEST_CASE("ODE reference solver") {
  SUBCASE("zero signal") {
    const auto r = nft::ode_oracle([](double) { return cplx(0.0); }, 1, -1, 1, 2.5);
    CHECK(std::abs(r.a - 1.0) < 1e-15);
    CHECK(std::abs(r.b) < 1e-15);
  }
  SUBCASE("one-pole reflection at the edge of its grid") {
    const auto q = [](double t) { return nft::rational_onepole_value(1.0, -1.0, t); };
    const auto r = nft::ode_oracle(q, 1, -12, 0, 60.0);
    CHECK(std::abs(r.rho - nft::oracle_rational_onepole(1.0, -1.0, 60.0)) < 1e-8);
  }
  SUBCASE("tolerances a decade apart agree") {
    const auto q = [](double t) { return nft::sech_focusing_value(5.4, 3.0, t); };
    nft::OdeOptions tight, loose;
    loose.tol = 1e-11;
    const auto a = nft::ode_oracle(q, 1, -32, 32, 0.0, tight);
    const auto b = nft::ode_oracle(q, 1, -32, 32, 0.0, loose);
    CHECK(std::abs(a.a - b.a) < 1e-10);
    CHECK(std::abs(a.b - b.b) < 1e-10);
    const auto o = nft::oracle_sech_focusing(5.4, 3.0, 0.0);
    CHECK(std::abs(a.rho - o.rho) < 1e-8 * std::abs(o.rho));
  }
  SUBCASE("breakpoints") {
    // Square pulse of height 1 on [0, 1]: a(0) = cos(1).
    nft::OdeOptions opts;
    opts.breaks = {0.0, 1.0};
    const auto q = [](double t) { return cplx(t >= 0.0 && t <= 1.0 ? 1.0 : 0.0); };
    const auto r = nft::ode_oracle(q, 1, -1, 2, 0.0, opts);
    CHECK(std::abs(r.a - std::cos(1.0)) < 1e-10);
    CHECK(std::abs(r.b + std::sin(1.0)) < 1e-10);
  }
  CHECK_THROWS_AS(nft::ode_oracle([](double) { return cplx(0.0); }, 1, -1, 1, 0.0,
                                  nft::OdeOptions{1e-15, 256, {}}),
                  std::invalid_argument);
}

TEST_CASE("cost model") {
  // Fourth-order slow method at D = M = 4: FFTs 120, mult 380, add 180,
  // div 128, conj 8, sqrt 128, sinh+cosh 512, exp 64.
  CHECK(nft::flop_count("CF2_4", 4, 4) == doctest::Approx(1520.0));
  CHECK(14 * 4 + 9 * 4 + 18 * 16 == 380);
  // Fast scattering of size 2: levels k = 0, 1 with transforms of length 3 and 5.
  const double f3 = 5 * 3 * std::log2(3.0), f5 = 5 * 5 * std::log2(5.0);
  CHECK(nft::flops::fast_scattering(2) ==
        doctest::Approx(2 * (12 * f3 + 12 * 3) + (12 * f5 + 12 * 5)));
  CHECK(nft::flops::fft(1) == 0.0);
  CHECK(nft::flops::fft(8) == doctest::Approx(120.0));

  for (const char* m : {"CF2_4", "FCF2_4", "FCF_RE2_4"}) {
    double prev = 0;
    for (double d = 2; d <= 4096; d += 1) {
      const double v = nft::flop_count(m, d, d);
      CHECK_MESSAGE(v > prev, m << " at D = " << d);
      prev = v;
      if (d > 64) d += 13;
    }
    CHECK(nft::flop_count(m, 1024, 512) > nft::flop_count(m, 1024, 256));
  }
  const auto x = nft::flop_crossover();
  CHECK(x >= 200);
  CHECK(x <= 450);
  CHECK(nft::flop_count("FCF2_4", 1024, 1024) < nft::flop_count("CF2_4", 1024, 1024));
  CHECK(nft::flop_count("FCF2_4", 64, 64) > nft::flop_count("CF2_4", 64, 64));
  CHECK_THROWS_AS(nft::flop_count("CF1_2", 8, 8), std::invalid_argument);
}

TEST_CASE("slope fits") {
  std::vector<double> h, e;
  for (int k = 0; k < 6; ++k) {
    h.push_back(std::ldexp(1.0, -k));
    e.push_back(0.3 * std::pow(h.back(), 4));
  }
  const auto f = nft::fit_loglog(h, e);
  CHECK(f.slope == doctest::Approx(4.0));
  CHECK(std::exp(f.intercept) == doctest::Approx(0.3));

  // Floor after the fourth point and an initial point above 1.
  std::vector<double> h2{2, 1, 0.5, 0.25, 0.125, 0.0625, 0.03125};
  std::vector<double> e2{3.0, 1e-2, 1e-2 / 16, 1e-2 / 256, 1e-2 / 4096, 2e-6, 3e-6};
  const auto g = nft::fit_prefloor(h2, e2);
  CHECK(g.first == 1);
  CHECK(g.last == 5);
  CHECK(g.slope == doctest::Approx(4.0));

  // Floor onset that is still decreasing.
  std::vector<double> e3{1e-2, 1e-2 / 64, 1e-2 / 4096, 1e-2 / 262144, 3e-8, 2.5e-8};
  const auto k = nft::fit_prefloor(std::span(h2).subspan(0, 6), e3);
  CHECK(k.last == 4);
  CHECK(k.slope == doctest::Approx(6.0));

  std::vector<double> flat{1e-3, 2e-3};
  CHECK_THROWS(nft::fit_prefloor(std::span(h2).subspan(0, 2), flat));
}

TEST_CASE("method identifiers") {
  CHECK(nft::parse_method("CF1_2").pipeline == nft::Pipeline::slow);
  CHECK(nft::parse_method("FCF2_4").pipeline == nft::Pipeline::fast);
  const auto re = nft::parse_method("FCF_RE2_4");
  CHECK(re.pipeline == nft::Pipeline::fast_re);
  CHECK(re.scheme.order == 4);
  CHECK_THROWS_AS(nft::parse_method("CF3_6"), std::invalid_argument);
  CHECK_THROWS_AS(nft::parse_method("XYZ"), std::invalid_argument);
  CHECK_THROWS(nft::parse_method("user:/nonexistent/table.csv"));
}

TEST_CASE("benchmark cases") {
  const auto e1 = nft::make_example("1", 256);
  CHECK(e1.lambda_max == 10.0);
  CHECK_FALSE(e1.signal.has_exact());
  CHECK(e1.eigenvalues.size() == 5);
  CHECK(nft::make_example("1", 256, 0.4).eigenvalues.empty());
  const auto e2 = nft::make_example("2", 256);
  CHECK(e2.signal.has_exact());
  CHECK(e2.lambda_max == 60.0);
  const auto e3 = nft::make_example("3", 256);
  CHECK(e3.signal.grid.kappa == -1);
  CHECK(e3.lambda_max == 250.0);
  CHECK_THROWS_AS(nft::make_example("4", 256), std::invalid_argument);
}

TEST_CASE("sweep driver and result files") {
  nft::SweepConfig cfg;
  cfg.methods = {"FCF1_2", "FCF2_4"};
  cfg.d_values = {256, 512};
  cfg.repetitions = 1;
  const auto rows = nft::run_sweep(cfg);
  REQUIRE(rows.size() == 4);
  for (const auto& r : rows) {
    CHECK(std::isfinite(r.e_rho));
    CHECK(std::isfinite(r.e_b));
    CHECK(r.time_s >= 0.0);
    CHECK(r.m == r.d);
  }
  CHECK(rows[3].e_rho < rows[2].e_rho);

  std::stringstream ss;
  nft::write_results_csv(ss, rows);
  const auto back = nft::read_results_csv(ss);
  REQUIRE(back.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(back[i].method == rows[i].method);
    CHECK(back[i].d == rows[i].d);
    CHECK(back[i].h == rows[i].h);
    CHECK(back[i].e_rho == rows[i].e_rho);
    CHECK(back[i].e_b == rows[i].e_b);
    CHECK(back[i].time_s == rows[i].time_s);
    // Methods without a cost model carry NaN.
    CHECK((back[i].flops == rows[i].flops || (std::isnan(back[i].flops) && std::isnan(rows[i].flops))));
  }

  const auto slopes = nft::sweep_slopes(rows);
  CHECK(slopes.size() == 2);
  std::ostringstream svg, sl;
  nft::write_svg_plot(svg, rows, "smoke");
  nft::write_slopes_csv(sl, slopes);
  CHECK(svg.str().find("<svg") != std::string::npos);
  CHECK(svg.str().find("FCF2_4") != std::string::npos);

  cfg.repetitions = 0;
  CHECK_THROWS_AS(nft::run_sweep(cfg), std::invalid_argument);
  cfg.repetitions = 1;
  cfg.d_values = {1};
  CHECK_THROWS_AS(nft::run_sweep(cfg), std::invalid_argument);
}
