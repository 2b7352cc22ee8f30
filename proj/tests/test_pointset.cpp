#include <doctest.h>

#include <random>

#include "framelab/errors.hpp"
#include "framelab/pointset.hpp"
#include "framelab/translates.hpp"
#include "oracles.hpp"

using namespace framelab;

namespace {

std::vector<double> as_vector(const PointSet& ps) {
  auto v = ps.values();
  return {v.begin(), v.end()};
}

}  // namespace

TEST_SUITE("pointset") {

TEST_CASE("separation of small sets") {
  CHECK(separation(uniform_lattice(0.0, 11)) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(separation(PointSet::line({0.0, 0.3, 1.1}, 0.0, 1.1)) == doctest::Approx(0.3).epsilon(1e-15));

  Box unit{{{0.0, 1.0}, {0.0, 1.0}}};
  PointSet square(2, {0, 0, 0, 1, 1, 0, 1, 1}, unit);
  CHECK(separation(square) == doctest::Approx(oracle::brute_separation(square)));
  CHECK(separation(square) == doctest::Approx(1.0));

  CHECK_THROWS_AS(separation(PointSet::line({0.0}, -1.0, 1.0)), InputError);
}

TEST_CASE("separation matches brute force in 2-D") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 4.0);
  std::vector<double> c;
  for (int k = 0; k < 60; ++k) c.push_back(u(rng));
  PointSet ps(2, c, Box{{{0.0, 4.0}, {0.0, 4.0}}});
  CHECK(separation(ps) == doctest::Approx(oracle::brute_separation(ps)).epsilon(1e-14));
}

TEST_CASE("point set invariants") {
  CHECK_THROWS_AS(PointSet::line({0.0, 0.0}, -1.0, 1.0), InputError);
  CHECK_THROWS_AS(PointSet::line({0.0, 2.0}, -1.0, 1.0), InputError);
  auto ps = PointSet::line({3.0, 1.0, 2.0}, 0.0, 4.0);
  CHECK(as_vector(ps) == std::vector<double>{1.0, 2.0, 3.0});
}

TEST_CASE("gap examples") {
  CHECK(gap(PointSet::line({0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10}, 0.0, 10.0)).value == doctest::Approx(0.5));
  CHECK(gap(PointSet::line({0.0, 1.0, 3.0}, 0.0, 3.0)).value == doctest::Approx(1.0));
  // endpoint distance dominates
  CHECK(gap(PointSet::line({1.0}, 0.0, 4.0)).value == doctest::Approx(3.0));
}

TEST_CASE("gap of jittered lattice agrees with a fine scan") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto ps = jittered_lattice(0.5, 20, 1.0, 0.2, seed);
    REQUIRE(ps.box().sides[0].first == doctest::Approx(0.0));
    REQUIRE(ps.box().sides[0].second == doctest::Approx(20.0));
    const double g = gap(ps).value;
    CHECK(g >= 0.3);
    CHECK(g <= 0.7);
    const double spacing = separation(ps) / 100.0;
    const double scan = oracle::scan_gap_1d(as_vector(ps), 0.0, 20.0, spacing);
    CHECK(std::abs(g - scan) <= spacing);
    CHECK(scan <= g + 1e-12);
  }
}

TEST_CASE("gap in 2-D is bounded by the scan resolution") {
  Box unit{{{0.0, 1.0}, {0.0, 1.0}}};
  PointSet square(2, {0, 0, 0, 1, 1, 0, 1, 1}, unit);
  auto g = gap(square);
  CHECK(g.resolution > 0.0);
  CHECK(g.resolution <= 0.25 + 1e-15);
  CHECK(g.value <= std::sqrt(0.5) + 1e-12);
  CHECK(g.value >= std::sqrt(0.5) - g.resolution);
}

TEST_CASE("Beurling density of the half-integer lattice") {
  std::vector<double> pts;
  for (int j = 0; j <= 40; ++j) pts.push_back(j / 2.0);
  auto ps = PointSet::line(pts, 0.0, 20.0);
  const std::vector<double> r{5.0};
  auto rep = beurling_density(ps, r);
  // closed windows of length 10 hold 20 points, 21 when both ends sit on points
  CHECK(rep.nu_minus[0] == 20);
  CHECK(rep.nu_plus[0] == 21);
  CHECK(rep.d_minus[0] == doctest::Approx(2.0));
  CHECK(rep.d_plus[0] == doctest::Approx(2.1));
  auto scan = oracle::scan_window_counts(pts, 0.0, 20.0, 5.0, 1.0 / 64);
  CHECK(scan.lo == rep.nu_minus[0]);
  CHECK(scan.hi == rep.nu_plus[0]);
}

TEST_CASE("Beurling density of the integer lattice") {
  std::vector<double> pts;
  for (int j = 0; j <= 20; ++j) pts.push_back(j);
  const std::vector<double> r{5.0};
  auto rep = beurling_density(PointSet::line(pts, 0.0, 20.0), r);
  CHECK(rep.d_minus[0] == doctest::Approx(1.0));
  CHECK(rep.d_plus[0] == doctest::Approx(1.1));
  CHECK_THROWS_WITH_AS(beurling_density(PointSet::line(pts, 0.0, 20.0), std::vector<double>{10.5}),
                       doctest::Contains("window exceeds analysis box"), InputError);
}

TEST_CASE("jittered lattice densities approach one") {
  const double amp = 0.3;
  auto ps = jittered_lattice(0.5, 200, 1.0, amp, 11);
  const std::vector<double> rs{2.0, 5.0, 10.0, 25.0, 50.0};
  auto rep = beurling_density(ps, rs);
  auto pts = as_vector(ps);
  for (std::size_t i = 0; i < rs.size(); ++i) {
    CHECK(rep.nu_minus[i] <= rep.nu_plus[i]);
    CHECK(rep.d_minus[i] <= rep.d_plus[i]);
    const double slack = (1.0 + 2.0 * amp) / (2.0 * rs[i]);
    CHECK(std::abs(rep.d_minus[i] - 1.0) <= slack + 1e-12);
    CHECK(std::abs(rep.d_plus[i] - 1.0) <= slack + 1e-12);
    // the exact extrema enclose every scanned window
    auto scan = oracle::scan_window_counts(pts, 0.0, 200.0, rs[i], 0.01);
    CHECK(rep.nu_minus[i] <= scan.lo);
    CHECK(scan.hi <= rep.nu_plus[i]);
    CHECK(scan.hi + 1 >= rep.nu_plus[i]);
    CHECK(scan.lo <= rep.nu_minus[i] + 1);
  }
}

TEST_CASE("density in 2-D counts lattice points") {
  std::vector<double> c;
  for (int a = 0; a <= 10; ++a) {
    for (int b = 0; b <= 10; ++b) {
      c.push_back(a + 0.5);
      c.push_back(b + 0.5);
    }
  }
  PointSet ps(2, c, Box{{{0.0, 11.0}, {0.0, 11.0}}});
  auto rep = beurling_density(ps, std::vector<double>{2.0});
  CHECK(rep.resolution > 0.0);
  CHECK(rep.nu_minus[0] >= 16);
  CHECK(rep.nu_plus[0] <= 25);
  CHECK(rep.d_minus[0] <= rep.d_plus[0]);
}

TEST_CASE("interval frame predicate") {
  auto jit = jittered_lattice(0.5, 64, 1.0, 0.2, 3);
  auto p = beurling_1d_frame_predicate(jit, 0.8, 8.0);
  CHECK(p.predicted_frame);
  CHECK(p.margin == doctest::Approx(p.d_minus - 0.8));
  CHECK(p.margin > 0.0);

  std::vector<double> even;
  for (int k = 0; k < 32; ++k) even.push_back(2.0 * k);
  auto sparse = PointSet::line(even, -1.0, 63.0);
  auto q = beurling_1d_frame_predicate(sparse, 0.8, 8.0);
  CHECK_FALSE(q.predicted_frame);
  CHECK(q.d_minus <= 0.5 + 1e-12);

  // strict inequality at the boundary
  auto at = beurling_1d_frame_predicate(sparse, q.d_minus, 8.0);
  CHECK_FALSE(at.predicted_frame);
  CHECK(at.margin == 0.0);
}

TEST_CASE("ball frame predicate") {
  auto g02 = uniform_lattice(0.0, 50, 0.4);
  REQUIRE(gap(g02).value == doctest::Approx(0.2));
  auto p = beurling_ball_frame_predicate(g02, 1.0);
  CHECK(p.predicted_frame);
  CHECK(p.product == doctest::Approx(0.2));

  CHECK_FALSE(beurling_ball_frame_predicate(uniform_lattice(0.0, 50, 1.0), 1.0).predicted_frame);

  auto near = uniform_lattice(0.0, 50, 2 * 0.24999);
  auto b = beurling_ball_frame_predicate(near, 1.0);
  CHECK(b.product == doctest::Approx(0.24999).epsilon(1e-12));
  CHECK(b.predicted_frame);
}

TEST_CASE("densify examples") {
  auto two = PointSet::line({0.0, 3.0}, 0.0, 3.0);
  auto d = densify(two, 0.5, 0.25);
  CHECK(gap(d).value <= 0.5 + 1e-12);
  CHECK(oracle::scan_gap_1d(as_vector(d), 0.0, 3.0, 1e-3) <= 0.5 + 1e-12);
  CHECK(separation(d) >= 0.25 - 1e-12);
  CHECK(contains_points(d, two));

  auto fine = uniform_lattice(0.0, 20, 0.2);
  auto same = densify(fine, 0.5, 0.1);
  CHECK(as_vector(same) == as_vector(fine));

  auto one = PointSet::line({0.0}, 0.0, 2.0);
  auto grown = densify(one, 0.5, 0.25);
  CHECK(grown.size() >= 5);
  CHECK(gap(grown).value <= 0.5 + 1e-12);

  CHECK_THROWS_AS(densify(two, 0.2, 0.3), InputError);
}

TEST_CASE("densify property: superset with small gap") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    const double hi = 2.0 + 8.0 * u(rng);
    std::vector<double> pts;
    double x = u(rng) * 0.5;
    while (x < hi) {
      pts.push_back(x);
      x += 0.05 + 1.5 * u(rng);
    }
    auto ps = PointSet::line(pts, 0.0, hi);
    const double target = 0.1 + 0.4 * u(rng);
    const double sep_min = target * (0.2 + 0.6 * u(rng));
    auto d = densify(ps, target, sep_min);
    CHECK(contains_points(d, ps));
    CHECK(gap(d).value <= target + 1e-12);
    if (ps.size() >= 2) {
      CHECK(separation(d) >= std::min(separation(ps), sep_min) - 1e-12);
    }
  }
}

TEST_CASE("lower density against the gap") {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    auto ps = jittered_lattice(0.5, 120, 1.0, 0.45, seed);
    const double g = gap(ps).value;
    const std::vector<double> rs{4.0, 8.0, 16.0, 32.0};
    auto rep = beurling_density(ps, rs);
    for (std::size_t i = 0; i < rs.size(); ++i) CHECK(rep.d_minus[i] >= 1.0 / (2.0 * g) - 2.0 / rs[i]);
  }
}

TEST_CASE("density is translation invariant") {
  auto ps = jittered_lattice(0.5, 80, 1.0, 0.3, 23);
  const std::vector<double> shift{0.6180339887};
  auto moved = ps.translated(shift);
  const std::vector<double> rs{3.0, 7.0, 15.0};
  auto a = beurling_density(ps, rs);
  auto b = beurling_density(moved, rs);
  CHECK(a.nu_minus == b.nu_minus);
  CHECK(a.nu_plus == b.nu_plus);
}

}  // TEST_SUITE
