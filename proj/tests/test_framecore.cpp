#include <doctest.h>

#include <numeric>
#include <random>

#include "framelab/framecore.hpp"
#include "oracles.hpp"

using namespace framelab;
using oracle::pi;

namespace {

GridPtr half_grid(int n) { return make_grid(Domain({{-0.5, 0.5}}), n); }

SynthesisSystem dft(const GridPtr& g) { return exponential_system(g, dft_lattice(*g)); }

SynthesisSystem duplicated(const SynthesisSystem& s) {
  Eigen::MatrixXcd v(s.values().rows(), 2 * s.values().cols());
  v << s.values(), s.values();
  return {s.grid(), v, {}};
}

SampledFunction random_span_member(const SynthesisSystem& s, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  std::vector<cplx> c(s.size());
  for (auto& x : c) x = {nd(rng), nd(rng)};
  return synthesize(s, c);
}

double analysis_energy(const SynthesisSystem& s, const SampledFunction& f) {
  double e = 0.0;
  for (const auto& c : analysis(s, f)) e += std::norm(c);
  return e;
}

}  // namespace

TEST_SUITE("framecore") {

TEST_CASE("exponential system members") {
  auto g = make_grid(Domain({{0.0, 0.7}, {1.0, 1.3}}), 40);
  auto ps = PointSet::line({-2.5, 0.0, 1.25}, -3.0, 2.0);
  auto sys = exponential_system(g, ps);
  REQUIRE(sys.size() == 3);
  CHECK(norm_sq(sys.member(1)) == doctest::Approx(1.0).epsilon(1e-14));
  for (std::size_t i = 0; i < g->size(); ++i) CHECK(std::abs(sys.member(1).values[i] - 1.0) <= 1e-15);

  auto neg = exponential_system(g, PointSet::line({-1.25}, -3.0, 2.0));
  for (std::size_t i = 0; i < g->size(); ++i) {
    CHECK(std::abs(std::conj(sys.member(2).values[i]) - neg.member(0).values[i]) <= 1e-14);
    CHECK(std::abs(sys.member(2).values[i] - std::polar(1.0, -2.0 * pi * 1.25 * g->nodes()[i])) <= 1e-14);
  }
}

TEST_CASE("DFT lattice Gram is the identity") {
  auto g = half_grid(32);
  auto sys = dft(g);
  REQUIRE(sys.size() == 32);
  CHECK(sys.labels().front() == doctest::Approx(-16.0));
  CHECK(sys.labels().back() == doctest::Approx(15.0));
  auto gm = gram(sys);
  CHECK((gm - Eigen::MatrixXcd::Identity(32, 32)).cwiseAbs().maxCoeff() <= 1e-13);
}

TEST_CASE("Gram examples") {
  auto g = half_grid(16);
  auto base = dft(g);
  std::vector<SampledFunction> pair{base.member(3), base.member(7)};
  auto gm = gram(SynthesisSystem(g, pair, {0.0, 1.0}));
  CHECK((gm - Eigen::MatrixXcd::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-13);

  std::vector<SampledFunction> dup{base.member(3), base.member(3)};
  auto gd = gram(SynthesisSystem(g, dup, {0.0, 1.0}));
  CHECK((gd - Eigen::MatrixXcd::Ones(2, 2)).cwiseAbs().maxCoeff() <= 1e-13);
  auto rep = measure_bounds(SynthesisSystem(g, dup, {0.0, 1.0}));
  CHECK(rep.rank == 1);

  // G[j,k] = <psi_k, psi_j>
  std::mt19937_64 rng(2);
  auto a = random_span_member(base, rng);
  auto b = random_span_member(base, rng);
  auto gab = gram(SynthesisSystem(g, std::vector<SampledFunction>{a, b}, {0.0, 1.0}));
  CHECK(std::abs(gab(0, 1) - inner(*g, b, a)) <= 1e-12);
  CHECK(std::abs(gab(1, 0) - inner(*g, a, b)) <= 1e-12);
}

TEST_CASE("frame operator") {
  auto g = half_grid(16);
  auto base = dft(g);
  std::mt19937_64 rng(4);
  auto f = random_span_member(base, rng);
  auto sf = frame_operator_apply(base, f);
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(std::abs(sf.values[i] - f.values[i]) <= 1e-12);

  auto psi = sample(g, [](double t) { return cplx(1.0 + t, t * t); });
  SynthesisSystem single(g, std::vector<SampledFunction>{psi}, {0.0});
  auto spsi = frame_operator_apply(single, psi);
  const double n2 = norm_sq(psi);
  for (std::size_t i = 0; i < psi.size(); ++i) CHECK(std::abs(spsi.values[i] - n2 * psi.values[i]) <= 1e-12);

  auto jit = exponential_system(make_grid(Domain({{-0.4, 0.4}}), 64), jittered_lattice(-20.5, 40, 1.0, 0.3, 8));
  for (int trial = 0; trial < 10; ++trial) {
    std::normal_distribution<double> nd;
    std::vector<cplx> v(jit.dim_space());
    for (auto& x : v) x = {nd(rng), nd(rng)};
    SampledFunction h(jit.grid(), v);
    const cplx quad = inner(*jit.grid(), frame_operator_apply(jit, h), h);
    CHECK(std::abs(quad.imag()) <= 1e-12 * quad.real());
    CHECK(quad.real() == doctest::Approx(analysis_energy(jit, h)).epsilon(1e-12));
  }
}

TEST_CASE("measure_bounds examples") {
  auto g = half_grid(64);
  auto base = dft(g);
  auto rep = measure_bounds(base);
  CHECK(rep.lower == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rep.upper == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rep.flags.tight);
  CHECK(rep.flags.frame_for_whole_space);
  CHECK(rep.flags.riesz_sequence);
  CHECK(rep.rank == 64);
  CHECK(rep.resolution.measure == doctest::Approx(1.0));

  auto twice = measure_bounds(duplicated(base));
  CHECK(twice.lower == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(twice.upper == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(twice.flags.tight);
  CHECK(twice.flags.frame_for_whole_space);
  CHECK_FALSE(twice.flags.riesz_sequence);

  std::vector<double> half_lambdas;
  for (int k = -16; k < 16; ++k) half_lambdas.push_back(k);
  auto half = measure_bounds(exponential_system(g, PointSet::line(half_lambdas, -32.0, 32.0)));
  CHECK(half.rank == 32);
  CHECK(half.flags.frame_sequence);
  CHECK_FALSE(half.flags.frame_for_whole_space);
  CHECK(half.lower == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(half.upper == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(half.min_eigenvalue == 0.0);

  MeasureOptions bb;
  bb.bessel_bound = 0.5;
  CHECK_FALSE(measure_bounds(base, bb).flags.bessel);
}

TEST_CASE("measured bounds agree with singular values") {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    auto g = make_grid(Domain({{-0.4, 0.4}}), 80);
    auto sys = exponential_system(g, jittered_lattice(-30.5, 60 + 10 * seed, 1.0, 0.35, seed));
    auto rep = measure_bounds(sys);
    auto sv = oracle::frame_spectrum_svd(sys);
    CHECK(rep.upper == doctest::Approx(sv.back()).epsilon(1e-10));
    CHECK(rep.min_eigenvalue == doctest::Approx(sv.front()).epsilon(1e-8));
    REQUIRE(rep.cross_check.has_value());
    CHECK(*rep.cross_check <= 1e-9);
  }
}

TEST_CASE("frame inequality at the measured bounds") {
  std::mt19937_64 rng(31);
  auto g = make_grid(Domain({{-0.4, 0.1}, {0.3, 0.6}}), 64);
  auto sys = exponential_system(g, jittered_lattice(-40.5, 80, 1.0, 0.3, 5));
  auto rep = measure_bounds(sys);
  REQUIRE(rep.flags.frame_for_whole_space);
  for (int trial = 0; trial < 100; ++trial) {
    auto f = random_span_member(sys, rng);
    const double e = analysis_energy(sys, f);
    const double n2 = norm_sq(f);
    CHECK(e >= rep.lower * n2 * (1 - 1e-9));
    CHECK(e <= rep.upper * n2 * (1 + 1e-9));
  }

  // frame sequence: the inequality holds on the span
  std::vector<double> lam;
  for (int k = -10; k < 10; ++k) lam.push_back(k * 1.1);
  auto fs = exponential_system(make_grid(Domain({{-0.5, 0.5}}), 64), PointSet::line(lam, -12.0, 12.0));
  auto frep = measure_bounds(fs);
  REQUIRE(frep.flags.frame_sequence);
  for (int trial = 0; trial < 100; ++trial) {
    auto f = random_span_member(fs, rng);
    const double e = analysis_energy(fs, f);
    CHECK(e >= frep.lower * norm_sq(f) * (1 - 1e-9));
    CHECK(e <= frep.upper * norm_sq(f) * (1 + 1e-9));
  }
}

TEST_CASE("nonzero spectra of S and G agree") {
  auto g = make_grid(Domain({{0.0, 1.0}}), 48);
  for (std::size_t k : {20u, 48u, 90u}) {
    auto sys = exponential_system(g, jittered_lattice(-(k / 2.0) + 0.5, k, 0.9, 0.2, k));
    auto rep = measure_bounds(sys);
    REQUIRE(rep.cross_check.has_value());
    CHECK(*rep.cross_check <= 1e-9);
  }
}

TEST_CASE("permutation and scaling") {
  auto g = make_grid(Domain({{-0.4, 0.4}}), 64);
  auto sys = exponential_system(g, jittered_lattice(-30.5, 61, 1.0, 0.3, 77));
  auto rep = measure_bounds(sys);

  std::vector<std::size_t> perm(sys.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937_64 rng(1);
  std::shuffle(perm.begin(), perm.end(), rng);
  Eigen::MatrixXcd pv(sys.values().rows(), sys.values().cols());
  for (std::size_t k = 0; k < perm.size(); ++k) pv.col(static_cast<Eigen::Index>(k)) = sys.values().col(static_cast<Eigen::Index>(perm[k]));
  auto prep = measure_bounds(SynthesisSystem(g, pv, {}));
  CHECK(prep.lower == doctest::Approx(rep.lower).epsilon(1e-10));
  CHECK(prep.upper == doctest::Approx(rep.upper).epsilon(1e-10));
  CHECK(prep.rank == rep.rank);
  CHECK(prep.flags.frame_for_whole_space == rep.flags.frame_for_whole_space);
  CHECK(prep.flags.tight == rep.flags.tight);

  for (double s : {0.5, 3.0}) {
    auto srep = measure_bounds(SynthesisSystem(g, Eigen::MatrixXcd(s * sys.values()), {}));
    CHECK(srep.lower == doctest::Approx(s * s * rep.lower).epsilon(1e-10));
    CHECK(srep.upper == doctest::Approx(s * s * rep.upper).epsilon(1e-10));
  }
}

TEST_CASE("reconstruct examples") {
  auto g = half_grid(32);
  auto base = dft(g);
  auto r = reconstruct(base, base.member(3));
  CHECK(r.residual <= 1e-12);
  for (std::size_t k = 0; k < base.size(); ++k) CHECK(std::abs(r.coeffs[k] - (k == 3 ? 1.0 : 0.0)) <= 1e-12);

  std::mt19937_64 rng(6);
  auto twice = duplicated(base);
  auto f = random_span_member(base, rng);
  auto rt = reconstruct(twice, f);
  CHECK(rt.iterations == 1);
  auto a = analysis(twice, f);
  for (std::size_t k = 0; k < a.size(); ++k) CHECK(std::abs(rt.coeffs[k] - 0.5 * a[k]) <= 1e-12);

  auto zero = reconstruct(base, constant(g, 0.0));
  CHECK(zero.residual == 0.0);
}

TEST_CASE("reconstruct matches the minimum-norm least-squares oracle") {
  auto g = make_grid(Domain({{-0.4, 0.4}}), 64);
  std::mt19937_64 rng(12);
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    auto sys = exponential_system(g, jittered_lattice(-40.5, 81, 1.0, 0.3, seed));
    auto f = random_span_member(sys, rng);
    auto r = reconstruct(sys, f);
    CHECK(r.residual <= 1e-10);
    auto ls = oracle::min_norm_coeffs(sys, f);
    double diff = 0.0;
    double nrm = 0.0;
    for (std::size_t k = 0; k < ls.size(); ++k) {
      diff += std::norm(r.coeffs[k] - ls[k]);
      nrm += std::norm(ls[k]);
    }
    CHECK(std::sqrt(diff / nrm) <= 1e-8);

    auto back = synthesize(sys, r.coeffs);
    double err = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) err += g->weights()[i] * std::norm(back.values[i] - f.values[i]);
    CHECK(std::sqrt(err / norm_sq(f)) <= 1e-10);
  }
}

TEST_CASE("reconstruct outside the span") {
  auto g = half_grid(32);
  std::vector<double> lam;
  for (int k = -8; k < 8; ++k) lam.push_back(k);
  auto sys = exponential_system(g, PointSet::line(lam, -16.0, 16.0));
  auto outside = exponential_system(g, PointSet::line({12.0}, 0.0, 16.0)).member(0);
  try {
    reconstruct(sys, outside);
    FAIL("expected an error");
  } catch (const ReconstructionError& e) {
    CHECK(e.not_in_span());
    CHECK(std::string(e.what()).find("not in span") != std::string::npos);
  }
}

}  // TEST_SUITE
