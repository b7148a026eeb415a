#include <doctest.h>

#include <cmath>
#include <numbers>

#include "nft/integrators.hpp"
#include "nft/signals.hpp"

using nft::cplx;
using nft::CfqmScheme;

namespace {

const cplx kI(0.0, 1.0);

nft::SampledSignal example1(std::size_t d) {
  return nft::sample_sech_focusing(5.4, 3.0, nft::SignalGrid(-32, 32, d, 1));
}

// Same signal without the exact sampler, so node values go through the
// bandlimited path.
nft::SampledSignal example1_samples_only(std::size_t d) {
  auto s = example1(d);
  s.exact = nullptr;
  return s;
}

nft::SampledSignal zero_signal(std::size_t d) {
  return nft::SampledSignal(nft::SignalGrid(-1, 1, d, 1), std::vector<cplx>(d));
}

}  // namespace

TEST_CASE("built-in scheme tables") {
  const auto cf1 = CfqmScheme::cf1_2();
  CHECK(cf1.order == 2);
  CHECK(cf1.exponentials() == 1);
  CHECK(cf1.c(0) == 0.5);
  const auto cf2 = CfqmScheme::cf2_4();
  CHECK(cf2.order == 4);
  REQUIRE(cf2.exponentials() == 2);
  REQUIRE(cf2.nodes() == 2);
  const double s3 = std::sqrt(3.0);
  CHECK(cf2.a(0, 0).real() == doctest::Approx(0.25 + s3 / 6));
  CHECK(cf2.a(0, 1).real() == doctest::Approx(0.25 - s3 / 6));
  CHECK(cf2.c(0) == doctest::Approx(0.5 - s3 / 6));
  CHECK(cf2.c(1) == doctest::Approx(0.5 + s3 / 6));
  CHECK(cf2.a.sum().real() == doctest::Approx(1.0));
  CHECK_FALSE(cf2.complex_coeffs());
  CHECK(cf2.lambda_weights()(0).real() == doctest::Approx(0.5));
}

TEST_CASE("scheme table parser") {
  const auto s = CfqmScheme::from_csv_text(
      "# midpoint rule\norder,2\na,1,1,1.0\nc,1,0.5\n", "mid");
  CHECK(s.order == 2);
  CHECK(s.a(0, 0) == cplx(1.0));
  CHECK(s.c(0) == 0.5);
  const auto z = CfqmScheme::from_csv_text("order,4\na,1,1,0.5,0.25\na,1,2,0.5,-0.25\n"
                                           "c,1,0.2\nc,2,0.8\n", "cx");
  CHECK(z.complex_coeffs());
  CHECK_THROWS_AS(CfqmScheme::from_csv_text("a,1,1,1\nc,1,0.5\n", "x"), std::invalid_argument);
  CHECK_THROWS_AS(CfqmScheme::from_csv_text("order,2\na,1,1,1\nc,1,1.5\n", "x"),
                  std::invalid_argument);
  CHECK_THROWS_AS(CfqmScheme::from_csv_text("order,2\na,0,1,1\nc,1,0.5\n", "x"),
                  std::invalid_argument);
  CHECK_THROWS_AS(CfqmScheme::from_csv_text("order,2\nbogus\n", "x"), std::invalid_argument);
  CHECK_THROWS_AS(CfqmScheme::from_csv_text("order,2\na,1,2,1\nc,1,0.5\n", "x"),
                  std::invalid_argument);
}

TEST_CASE("bandlimited shift") {
  const std::size_t n = 64;
  const double h = 0.1;
  SUBCASE("constant and zero shift") {
    const std::vector<cplx> c(n, cplx(2.0, -1.0));
    for (auto v : nft::bandlimited_shift(c, 0.37, h)) CHECK(std::abs(v - cplx(2.0, -1.0)) < 1e-14);
    const auto x = example1(n).samples;
    const auto y = nft::bandlimited_shift(x, 0.0, h);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(x[i] - y[i]) < 1e-13);
  }
  SUBCASE("pure tone") {
    const double period = double(n) * h;
    for (int k : {-20, -3, 1, 5, 31}) {
      const double omega = 2.0 * std::numbers::pi * k / period;
      std::vector<cplx> x(n);
      for (std::size_t i = 0; i < n; ++i) x[i] = std::exp(kI * omega * (double(i) * h));
      const double ts = h / 3.0;
      const auto y = nft::bandlimited_shift(x, ts, h);
      for (std::size_t i = 0; i < n; ++i)
        CHECK(std::abs(y[i] - std::exp(kI * omega * (double(i) * h - ts))) < 1e-12);
    }
  }
  SUBCASE("odd length") {
    const std::size_t m = 45;
    const double omega = 2.0 * std::numbers::pi * 7.0 / (double(m) * h);
    std::vector<cplx> x(m);
    for (std::size_t i = 0; i < m; ++i) x[i] = std::exp(kI * omega * (double(i) * h));
    const auto y = nft::bandlimited_shift(x, -0.4 * h, h);
    for (std::size_t i = 0; i < m; ++i)
      CHECK(std::abs(y[i] - std::exp(kI * omega * (double(i) * h + 0.4 * h))) < 1e-12);
  }
}

TEST_CASE("node values") {
  SUBCASE("midpoint scheme keeps the samples") {
    const auto s = example1_samples_only(256);
    const auto ns = nft::node_samples(s, CfqmScheme::cf1_2());
    REQUIRE(ns.nodes.size() == 1);
    for (std::size_t n = 0; n < 256; ++n) CHECK(std::abs(ns.nodes[0][n] - s.samples[n]) < 1e-13);
  }
  SUBCASE("fourth-order nodes by interpolation match the analytic signal") {
    const std::size_t d = 1024;
    const auto s = example1_samples_only(d);
    const auto scheme = CfqmScheme::cf2_4();
    const auto ns = nft::node_samples(s, scheme);
    const double h = s.grid.h();
    double worst = 0;
    for (int k = 0; k < 2; ++k)
      for (std::size_t n = 0; n < d; ++n) {
        const double t = s.grid.time(n) + (scheme.c(k) - 0.5) * h;
        worst = std::max(worst, std::abs(ns.nodes[k][n] - nft::sech_focusing_value(5.4, 3.0, t)));
      }
    CHECK(worst < 1e-10);
  }
  SUBCASE("zero signal") {
    const auto ns = nft::node_samples(zero_signal(32), CfqmScheme::cf2_4());
    for (const auto& node : ns.nodes)
      for (auto v : node) CHECK(v == cplx(0.0));
  }
}

TEST_CASE("single steps") {
  const double h = 0.3;
  const cplx lambda(0.7, 0.2);
  for (const auto& scheme : {CfqmScheme::cf1_2(), CfqmScheme::cf2_4()}) {
    const std::vector<cplx> zeros(scheme.nodes());
    const auto g = nft::transfer_step(scheme, zeros, lambda, h, 1);
    CHECK(std::abs(g(0, 0) - std::exp(-kI * lambda * h)) < 1e-15);
    CHECK(std::abs(g(1, 1) - std::exp(kI * lambda * h)) < 1e-15);
    CHECK(std::abs(g(0, 1)) == 0.0);
    CHECK(std::abs(g(1, 0)) == 0.0);
  }
  const std::vector<cplx> one{1.0};
  const auto g = nft::transfer_step(CfqmScheme::cf1_2(), one, 0.0, std::numbers::pi / 2, 1);
  CHECK(std::abs(g(0, 0)) < 1e-15);
  CHECK(std::abs(g(0, 1) - 1.0) < 1e-15);
  CHECK(std::abs(g(1, 0) + 1.0) < 1e-15);
  CHECK(std::abs(g(1, 1)) < 1e-15);
  CHECK_THROWS_AS(nft::transfer_step(CfqmScheme::cf2_4(), one, 0.0, 0.1, 1), std::invalid_argument);
}

TEST_CASE("slow scattering") {
  SUBCASE("zero signal is free propagation") {
    const auto s = zero_signal(16);
    const std::vector<cplx> lambdas{0.0, 1.5, cplx(-2.0, 0.5)};
    const auto ns = nft::node_samples(s, CfqmScheme::cf2_4());
    const auto phi = nft::scatter_slow(CfqmScheme::cf2_4(), ns, lambdas);
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
      const auto c = nft::scattering_to_coeffs(phi[i], lambdas[i], -1, 1);
      CHECK(std::abs(c.a - 1.0) < 1e-14);
      CHECK(std::abs(c.b) < 1e-14);
    }
    const auto r = nft::reflection_slow(CfqmScheme::cf1_2(), s, 9, 4.0);
    for (auto v : r.rho) CHECK(v == cplx(0.0));
  }
  SUBCASE("a(0) and b(0) against the closed form") {
    const auto o = nft::oracle_sech_focusing(5.4, 3.0, 0.0);
    std::vector<double> ea, eb;
    for (std::size_t d : {4096u, 8192u}) {
      const auto s = example1(d);
      const auto ns = nft::node_samples(s, CfqmScheme::cf2_4());
      const std::vector<cplx> l0{0.0};
      const auto phi = nft::scatter_slow(CfqmScheme::cf2_4(), ns, l0);
      const auto c = nft::scattering_to_coeffs(phi[0], 0.0, -32, 32);
      ea.push_back(std::abs(c.a - o.a));
      eb.push_back(std::abs(c.b - o.b));
    }
    CHECK(ea[0] < 1e-6);
    CHECK(eb[0] < 1e-9);
    const double ratio = ea[0] / ea[1];
    CHECK(ratio > 12.0);
    CHECK(ratio < 20.0);
  }
  SUBCASE("derivative channel against finite differences") {
    const auto s = example1(2048);
    const auto scheme = CfqmScheme::cf2_4();
    const auto ns = nft::node_samples(s, scheme);
    const double eps = 1e-5;
    for (cplx l : {cplx(1.0, 0.0), cplx(3.0, 2.0), cplx(2.5, 4.0)}) {
      const std::vector<cplx> pts{l, l + eps, l - eps};
      nft::ScatterOptions opts;
      opts.with_derivative = true;
      const auto phi = nft::scatter_slow(scheme, ns, pts, opts);
      REQUIRE(phi[0].has_derivative);
      const cplx fd = (phi[1].psi(0) - phi[2].psi(0)) / (2 * eps);
      CHECK(std::abs(phi[0].dpsi(0) - fd) < 1e-6 * std::abs(fd));
    }
  }
  SUBCASE("worker count does not change the result") {
    const auto s = example1(512);
    const auto a = nft::reflection_slow(CfqmScheme::cf2_4(), s, 101, 10.0, 1);
    const auto b = nft::reflection_slow(CfqmScheme::cf2_4(), s, 101, 10.0, 4);
    for (std::size_t i = 0; i < a.rho.size(); ++i) CHECK(a.rho[i] == b.rho[i]);
  }
}

TEST_CASE("lambda grid and parallel loop") {
  const auto g = nft::lambda_grid(5, 2.0);
  CHECK(g == std::vector<double>{-2.0, -1.0, 0.0, 1.0, 2.0});
  CHECK(nft::lambda_grid(1, 3.0).size() == 1);
  std::vector<int> hit(1000);
  nft::parallel_for(hit.size(), 3, [&](std::size_t i) { hit[i] += 1; });
  for (int v : hit) CHECK(v == 1);
  CHECK_THROWS_AS(nft::parallel_for(10, 2,
                                    [](std::size_t i) {
                                      if (i == 7) throw std::runtime_error("boom");
                                    }),
                  std::runtime_error);
}
