#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "nft/discrete.hpp"
#include "nft/signals.hpp"

using nft::cplx;
using nft::EigenCandidate;
using nft::EigenStatus;

namespace {

const cplx kI(0.0, 1.0);

std::vector<cplx> poly_from_roots(const std::vector<cplx>& roots) {
  std::vector<cplx> c{1.0};
  for (cplx r : roots) {
    std::vector<cplx> n(c.size() + 1);
    for (std::size_t k = 0; k < c.size(); ++k) {
      n[k + 1] += c[k];
      n[k] -= r * c[k];
    }
    c = std::move(n);
  }
  return c;
}

double match_error(std::vector<cplx> truth, std::vector<cplx> found) {
  if (truth.size() != found.size()) return std::numeric_limits<double>::infinity();
  return nft::eigen_error(truth, found);
}

const std::vector<cplx> kLambda{{3, 4.9}, {3, 3.9}, {3, 2.9}, {3, 1.9}, {3, 0.9}};

}  // namespace

TEST_CASE("polynomial roots") {
  SUBCASE("z^2 + 1") {
    const std::vector<cplx> c{1.0, 0.0, 1.0};
    CHECK(match_error({kI, -kI}, nft::find_roots(c)) < 1e-14);
  }
  SUBCASE("roots of unity") {
    std::vector<cplx> c(17);
    c[0] = -1.0;
    c[16] = 1.0;
    std::vector<cplx> truth;
    for (int k = 0; k < 16; ++k) truth.push_back(std::polar(1.0, 2 * std::numbers::pi * k / 16));
    CHECK(match_error(truth, nft::find_roots(c)) < 1e-10);
  }
  SUBCASE("zero roots and linear factors") {
    const std::vector<cplx> c{0.0, 0.0, 2.0, 1.0, 0.0};
    const auto r = nft::find_roots(c);
    CHECK(match_error({0.0, 0.0, -2.0}, r) < 1e-15);
    CHECK_THROWS_AS(nft::find_roots(std::vector<cplx>(5)), std::invalid_argument);
  }
  SUBCASE("large degree goes through simultaneous iteration") {
    std::mt19937 gen(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<cplx> truth;
    for (int k = 0; k < 400; ++k)
      truth.push_back(std::polar(0.6 + 0.3 * u(gen), 2 * std::numbers::pi * u(gen)));
    const auto c = poly_from_roots(truth);
    const auto r = nft::find_roots(c);
    REQUIRE(r.size() == 400);
    // Backward error: each computed root is a root of a nearby polynomial.
    double worst = 0, scale = 0;
    for (cplx x : c) scale += std::abs(x);
    for (cplx z : r) {
      cplx acc = 0;
      double mag = 0, pw = 1;
      for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * z + *it;
      for (cplx x : c) {
        mag += std::abs(x) * pw;
        pw *= std::abs(z);
      }
      worst = std::max(worst, std::abs(acc) / mag);
    }
    CHECK(worst < 1e-10);
  }
}

TEST_CASE("root mapping and filtering") {
  nft::ZMapping mapping;
  mapping.m = 1;
  mapping.h = 0.125;
  mapping.powers = {1};
  const double band = 0.9 * std::numbers::pi / 0.125;
  CHECK(band == doctest::Approx(22.619).epsilon(1e-4));
  std::vector<cplx> roots;
  for (cplx l : kLambda) roots.push_back(std::exp(kI * l * 0.125));
  roots.push_back(std::polar(1.0, 0.4));             // real lambda
  roots.push_back(std::polar(1.5, 0.4));             // lower half-plane
  roots.push_back(std::polar(0.5, 0.95 * std::numbers::pi));  // outside band
  roots.push_back(0.0);
  const auto c = nft::map_and_filter(roots, mapping);
  REQUIRE(c.size() == 8);
  for (int k = 0; k < 5; ++k) {
    CHECK(c[k].status == EigenStatus::raw);
    CHECK(std::abs(c[k].lambda_init - kLambda[k]) < 1e-12);
  }
  for (int k = 5; k < 8; ++k) CHECK(c[k].status == EigenStatus::filtered_out);
  CHECK(std::abs(c[5].lambda_init.imag()) < 1e-15);

  mapping.m = 2;
  const auto c2 = nft::map_and_filter(std::vector<cplx>{std::exp(kI * kLambda[0] * 0.0625)}, mapping);
  CHECK(std::abs(c2[0].lambda_init - kLambda[0]) < 1e-12);
}

TEST_CASE("deduplication keeps the nearest initial guess") {
  std::vector<EigenCandidate> c(4);
  c[0].lambda_init = cplx(3, 1.2);
  c[0].lambda_refined = cplx(3, 0.9);
  c[1].lambda_init = cplx(3, 0.95);
  c[1].lambda_refined = cplx(3, 0.9) + 1e-12;
  c[2].lambda_init = cplx(3, 2.0);
  c[2].lambda_refined = cplx(3, 1.9);
  c[3].lambda_init = cplx(1, 1);
  c[3].status = EigenStatus::filtered_out;
  for (int k = 0; k < 3; ++k) c[k].status = EigenStatus::refined;
  nft::dedupe_and_pair(c);
  CHECK(c[0].status == EigenStatus::duplicate_discarded);
  CHECK(c[1].status == EigenStatus::refined);
  CHECK(c[2].status == EigenStatus::refined);
  CHECK(c[3].status == EigenStatus::filtered_out);
}

TEST_CASE("eigenvalue extrapolation weights") {
  const cplx v(1.0, 2.0);
  CHECK(std::abs(nft::eigen_richardson(v, v, 2, 0.4, 0.1) - v) < 1e-15);
  // (h_sub/h)^r = 16: weights 16/15 and -1/15.
  CHECK(std::abs(nft::eigen_richardson(1.0, 0.0, 2, 0.4, 0.1) - 16.0 / 15.0) < 1e-15);
  CHECK(std::abs(nft::eigen_richardson(0.0, 1.0, 2, 0.4, 0.1) + 1.0 / 15.0) < 1e-15);
  CHECK_THROWS_AS(nft::eigen_richardson(v, v, 2, 0.1, 0.1), std::invalid_argument);
}

TEST_CASE("set distance") {
  const std::vector<cplx> i1{kI}, i2{kI, 100.0 + kI}, i3{kI, 2.0 * kI};
  CHECK(nft::eigen_error(i1, i1) == 0.0);
  CHECK(nft::eigen_error(i1, i2) == doctest::Approx(100.0));
  CHECK(nft::eigen_error(i3, i1) == doctest::Approx(1.0));
  CHECK(nft::eigen_error(i2, i3) == nft::eigen_error(i3, i2));
  CHECK(std::isinf(nft::eigen_error(i1, {})));
  CHECK_THROWS_AS(nft::eigen_error({}, i1), std::invalid_argument);
}

TEST_CASE("subsampling") {
  CHECK(nft::subsample_size(1024) == 320);
  const auto scheme = nft::CfqmScheme::cf2_4();
  auto s = nft::sample_sech_focusing(5.4, 3.0, nft::SignalGrid(-32, 32, 1024, 1));
  const auto same = nft::subsample(s, scheme, 1024);
  CHECK(same.stride == 1);
  CHECK(same.nodes.grid.d == 1024);

  s.exact = nullptr;
  const auto sub = nft::subsample(s, scheme, 320);
  CHECK(sub.stride == 3);
  const auto& g = sub.nodes.grid;
  CHECK(g.d == 342);
  // Kept samples sit at coarse midpoints.
  for (std::size_t n = 0; n < g.d; ++n) CHECK(g.time(n) == doctest::Approx(s.grid.time(3 * n)));
  double worst = 0;
  for (int k = 0; k < 2; ++k)
    for (std::size_t n = 0; n < g.d; ++n) {
      const double t = g.time(n) + (scheme.c(k) - 0.5) * g.h();
      worst = std::max(worst, std::abs(sub.nodes.nodes[k][n] - nft::sech_focusing_value(5.4, 3.0, t)));
    }
  CHECK(worst < 1e-9);
}

TEST_CASE("zero signal has no eigenvalues") {
  const nft::SampledSignal s(nft::SignalGrid(-1, 1, 64, 1), std::vector<cplx>(64));
  const auto scheme = nft::CfqmScheme::cf2_4();
  nft::ZMapping mapping;
  const auto a = nft::a_num_poly(scheme, nft::node_samples(s, scheme), &mapping);
  const auto roots = nft::find_roots(a);
  for (cplx z : roots) CHECK(z == cplx(0.0));
  CHECK(nft::discrete_spectrum(scheme, s).eigenvalues().empty());
}

TEST_CASE("focusing secant eigenvalues") {
  const auto s = nft::sample_sech_focusing(5.4, 3.0, nft::SignalGrid(-32, 32, 2048, 1));
  SUBCASE("fourth order") {
    const auto set = nft::discrete_spectrum(nft::CfqmScheme::cf2_4(), s);
    const auto ev = set.eigenvalues();
    CHECK(ev.size() == 5);
    CHECK(nft::eigen_error(kLambda, ev) < 1e-5);
    CHECK(set.h_sub > set.h);
    for (const auto& c : set.candidates)
      if (c.status == EigenStatus::refined) CHECK(c.lambda_extrapolated.has_value());
    std::ostringstream os;
    nft::write_eigen_csv(os, set);
    CHECK(os.str().rfind("re_lambda,im_lambda,status,re_init,im_init\n", 0) == 0);
    CHECK(os.str().find("refined") != std::string::npos);
  }
  SUBCASE("refinement is a fixed point at a converged eigenvalue") {
    const auto scheme = nft::CfqmScheme::cf1_2();
    const auto full = nft::node_samples(s, scheme);
    std::vector<EigenCandidate> c(1);
    c[0].lambda_init = kLambda[2] + cplx(0.01, -0.01);
    nft::newton_refine(c, scheme, full);
    REQUIRE(c[0].status == EigenStatus::refined);
    std::vector<EigenCandidate> again(1);
    again[0].lambda_init = *c[0].lambda_refined;
    nft::newton_refine(again, scheme, full);
    REQUIRE(again[0].status == EigenStatus::refined);
    CHECK(std::abs(*again[0].lambda_refined - *c[0].lambda_refined) < 1e-13);
  }
  SUBCASE("guesses far from any eigenvalue do not survive") {
    const auto scheme = nft::CfqmScheme::cf1_2();
    const auto full = nft::node_samples(s, scheme);
    std::vector<EigenCandidate> c(2);
    c[0].lambda_init = cplx(-20.0, 0.01);
    c[1].lambda_init = cplx(15.0, 0.02);
    nft::newton_refine(c, scheme, full);
    for (const auto& x : c) CHECK(x.status != EigenStatus::raw);
  }
}
