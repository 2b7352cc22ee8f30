#include <doctest.h>

#include <random>

#include "framelab/domain.hpp"
#include "framelab/errors.hpp"
#include "oracles.hpp"

using namespace framelab;
using oracle::pi;

namespace {

SampledFunction exp_k(const GridPtr& g, double k) {
  return sample(g, [k](double t) { return std::polar(1.0, -2.0 * pi * k * t); });
}

SampledFunction random_function(const GridPtr& g, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  std::vector<cplx> v(g->size());
  for (auto& x : v) x = {nd(rng), nd(rng)};
  return {g, v};
}

}  // namespace

TEST_SUITE("domain") {

TEST_CASE("domain validation") {
  Domain d({{3.0, 4.0}, {0.0, 1.0}});
  CHECK(d.intervals().front() == Interval{0.0, 1.0});
  CHECK(d.measure() == doctest::Approx(2.0));
  CHECK(d.radius() == doctest::Approx(2.0));
  CHECK(d.centre() == doctest::Approx(2.0));
  CHECK(d.contains(1.0));
  CHECK_FALSE(d.contains(2.0));
  CHECK_THROWS_AS(Domain({{0.0, 1.0}, {0.5, 2.0}}), InputError);
  CHECK_THROWS_AS(Domain({{1.0, 1.0}}), InputError);
  CHECK_THROWS_AS(Domain(std::vector<Interval>{}), InputError);
}

TEST_CASE("dilate examples") {
  auto a = dilate(Domain({{-0.4, 0.4}}), 0.05);
  REQUIRE(a.intervals().size() == 1);
  CHECK(a.intervals()[0].lo == doctest::Approx(-0.45));
  CHECK(a.intervals()[0].hi == doctest::Approx(0.45));

  auto b = dilate(Domain({{0.0, 1.0}, {1.05, 2.0}}), 0.05);
  REQUIRE(b.intervals().size() == 1);
  CHECK(b.intervals()[0].lo == doctest::Approx(-0.05));
  CHECK(b.intervals()[0].hi == doctest::Approx(2.05));

  auto c = dilate(Domain({{0.0, 1.0}, {3.0, 4.0}}), 0.1);
  REQUIRE(c.intervals().size() == 2);
  CHECK(c.intervals()[0].lo == doctest::Approx(-0.1));
  CHECK(c.intervals()[0].hi == doctest::Approx(1.1));
  CHECK(c.intervals()[1].lo == doctest::Approx(2.9));
  CHECK(c.intervals()[1].hi == doctest::Approx(4.1));
  CHECK(c.measure() == doctest::Approx(2.4));

  CHECK_THROWS_AS(dilate(c, 0.0), InputError);
}

TEST_CASE("dilate is monotone") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Interval> iv;
    double x = 0.0;
    for (int k = 0; k < 4; ++k) {
      const double lo = x + 0.05 + u(rng);
      const double hi = lo + 0.05 + u(rng);
      iv.push_back({lo, hi});
      x = hi;
    }
    Domain e(iv);
    const double d1 = 0.01 + 0.3 * u(rng);
    const double d2 = d1 + 0.01 + 0.3 * u(rng);
    auto e1 = dilate(e, d1);
    auto e2 = dilate(e, d2);
    CHECK(e1.covers(e));
    CHECK(e2.covers(e1));
    CHECK(e1.measure() > e.measure());
    CHECK(e2.measure() > e1.measure());
  }
}

TEST_CASE("grid nodes and weights") {
  Grid g(Domain({{-0.5, 0.5}}), {4});
  REQUIRE(g.size() == 4);
  const std::vector<double> want{-0.375, -0.125, 0.125, 0.375};
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(g.nodes()[i] == doctest::Approx(want[i]).epsilon(1e-15));
    CHECK(g.weights()[i] == doctest::Approx(0.25).epsilon(1e-15));
  }
  CHECK_THROWS_AS(make_grid(Domain({{-0.5, 0.5}}), 4), InputError);

  for (int n : {8, 13, 64, 100}) {
    Domain d({{0.0, 0.37}, {1.0, 2.5}, {3.0, 3.01}});
    auto gp = make_grid(d, n);
    double s = 0.0;
    for (double w : gp->weights()) s += w;
    CHECK(s == doctest::Approx(d.measure()).epsilon(1e-12));
    for (std::size_t i = 0; i < gp->size(); ++i) {
      CHECK(d.intervals()[gp->interval_of(i)].contains(gp->nodes()[i]));
    }
  }
}

TEST_CASE("midpoint quadrature accuracy and refinement") {
  Domain d({{0.0, 1.0}});
  auto g = make_grid(d, 128);
  auto one = constant(g, 1.0);
  CHECK(inner(*g, one, one).real() == doctest::Approx(1.0).epsilon(1e-15));
  auto t = sample(g, [](double x) { return cplx(x, 0.0); });
  CHECK(std::abs(inner(*g, t, t).real() - 1.0 / 3.0) <= 1e-5);

  double prev = 0.0;
  for (int n : {16, 32, 64, 128}) {
    auto gn = make_grid(d, n);
    auto f = sample(gn, [](double x) { return cplx(std::exp(x), 0.0); });
    const double err = std::abs(inner(*gn, f, constant(gn, 1.0)).real() - (std::exp(1.0) - 1.0));
    if (prev > 0.0) CHECK(err <= prev / 2.0);
    prev = err;
  }
}

TEST_CASE("inner product examples") {
  Domain unit({{0.0, 1.0}});
  auto g = make_grid(unit, 64);
  auto chi = indicator(g, unit);
  CHECK(inner(*g, chi, chi).real() == doctest::Approx(1.0));

  Domain half({{-0.5, 0.5}});
  auto h = make_grid(half, 64);
  CHECK(std::abs(inner(*h, exp_k(h, 1), exp_k(h, 2))) <= 1e-12);
  auto e = exp_k(h, 0.37);
  CHECK(inner(*h, e, e).real() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(inner(*h, e, e).imag()) <= 1e-15);

  auto other = make_grid(unit, 32);
  CHECK_THROWS_AS(inner(*h, e, constant(other, 1.0)), InputError);
}

TEST_CASE("inner is conjugate linear and satisfies Cauchy-Schwarz") {
  std::mt19937_64 rng(9);
  auto g = make_grid(Domain({{-1.0, 0.2}, {0.5, 1.5}}), 40);
  for (int trial = 0; trial < 100; ++trial) {
    auto f = random_function(g, rng);
    auto h = random_function(g, rng);
    const cplx ip = inner(*g, f, h);
    CHECK(std::norm(ip) <= inner(*g, f, f).real() * inner(*g, h, h).real() * (1 + 1e-12));
    const cplx a(0.3, -1.7);
    SampledFunction ah = h;
    for (auto& v : ah.values) v *= a;
    CHECK(std::abs(inner(*g, f, ah) - std::conj(a) * ip) <= 1e-12 * std::abs(ip) + 1e-12);
    CHECK(std::abs(inner(*g, h, f) - std::conj(ip)) <= 1e-12 * std::abs(ip));
  }
}

TEST_CASE("discrete Parseval for integer exponentials") {
  std::mt19937_64 rng(21);
  Domain half({{-0.5, 0.5}});
  for (int n : {16, 64, 256}) {
    auto g = make_grid(half, n);
    REQUIRE(static_cast<int>(g->size()) == n);
    for (int trial = 0; trial < 5; ++trial) {
      auto f = random_function(g, rng);
      double s = 0.0;
      for (int k = -n / 2; k < n - n / 2; ++k) s += std::norm(inner(*g, f, exp_k(g, k)));
      CHECK(s == doctest::Approx(inner(*g, f, f).real()).epsilon(1e-10));
    }
  }
}

TEST_CASE("restriction and extension") {
  Domain e({{0.0, 1.0}});
  auto g = make_grid(e, 32);
  auto r = restrict_grid(g, Domain({{0.0, 0.5}}));
  CHECK(r.indices.size() == 16);
  auto f = sample(g, [](double t) { return cplx(t, 1.0 - t); });
  auto fr = restrict_function(f, r);
  auto back = extend_function(fr, r, g);
  for (std::size_t i = 0; i < g->size(); ++i) {
    if (i < 16) {
      CHECK(back.values[i] == f.values[i]);
    } else {
      CHECK(back.values[i] == cplx(0.0, 0.0));
    }
  }
  for (std::size_t k = 0; k < r.indices.size(); ++k) CHECK(r.grid->nodes()[k] == g->nodes()[r.indices[k]]);
  CHECK_THROWS_AS(restrict_grid(g, Domain({{2.0, 3.0}})), InputError);
}

}  // TEST_SUITE
