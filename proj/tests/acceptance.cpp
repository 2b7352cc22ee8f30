// Acceptance suite: one PASS/FAIL line per criterion, tolerances fixed below.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

#include "framelab/translates.hpp"
#include "oracles.hpp"

using namespace framelab;
using oracle::pi;

namespace {

constexpr double kAnchorTol = 1e-10;
constexpr double kConverseTol = 1e-9;
constexpr double kTightSpread = 1e-8;
constexpr double kRieszFactor = 0.5;
constexpr double kBesselSlack = 1e-12;
constexpr double kMinJitterGap = 0.3;
constexpr double kMaxJitterGap = 0.7;
constexpr double kPredicateA = 0.8;
constexpr double kPredicateR = 8.0;
constexpr double kJitterLower = 0.05;
constexpr double kObstructionRatio = 0.6;
constexpr double kControlSpread = 1.05;
constexpr double kPipelineTol = 1e-8;
constexpr double kPermutationTol = 1e-9;
constexpr double kCoeffSlack = 1e-9;
constexpr double kEnvelopeSlack = 1e-9;
constexpr double kDictionaryTol = 1e-6;

const Domain kHalf({{-0.5, 0.5}});
const Domain kE({{-0.4, 0.4}});

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const char* name, double limit_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (limit_s > 0.0 && secs > limit_s) {
    o.pass = false;
    o.detail += " (over time limit " + std::to_string(limit_s) + " s)";
  }
  if (!o.pass) ++failures;
  std::printf("%s %2d %-28s %6.2fs  %s\n", o.pass ? "PASS" : "FAIL", id, name, secs, o.detail.c_str());
  std::fflush(stdout);
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

PointSet period_lattice(const Grid& g, double amplitude, std::uint64_t seed) {
  const auto count = static_cast<std::size_t>(std::floor(1.0 / g.steps().front()));
  return jittered_lattice(-0.5 * static_cast<double>(count) + 0.5, count, 1.0, amplitude, seed);
}

Outcome sinc_anchor() {
  auto grid = make_grid(kHalf, 256);
  auto gen = make_generator(grid, [](double) { return cplx(1.0); }, "chi_E");
  auto rep = measure_bounds(translate_system(gen, uniform_lattice(-128.0, 256), grid));
  const double err = std::max(std::abs(rep.lower - 1.0), std::abs(rep.upper - 1.0));
  return {rep.dim_space == 256 && err <= kAnchorTol && rep.flags.tight && rep.flags.frame_for_whole_space,
          "N=" + std::to_string(rep.dim_space) + " |bounds-1|=" + num(err)};
}

Outcome multiplication_equivalence() {
  auto grid = make_grid(kHalf, 256);
  auto phi = sample(grid, [](double t) { return cplx(2.0 + std::sin(2 * pi * t)); });
  auto r = check_frame_multiplication(dft_base(grid), phi);
  const double lo = std::pow(oracle::min_abs(phi), 2);
  const double hi = std::pow(oracle::max_abs(phi), 2);
  const double err = std::max(std::abs(r.mult_report.lower - lo), std::abs(r.mult_report.upper - hi));
  const bool in_range = r.mult_report.lower >= 1.0 && r.mult_report.upper <= 9.0;
  return {err <= kAnchorTol && in_range && r.within_envelope && r.consistent,
          "bounds [" + num(r.mult_report.lower) + ", " + num(r.mult_report.upper) + "] err=" + num(err)};
}

Outcome variants() {
  auto grid = make_grid(kHalf, 256);
  auto uni = sample(grid, [](double t) { return std::polar(1.0, 2 * pi * (3 * t + t * t)); });
  auto tight = check_tight_multiplication(dft_base(grid), uni);
  const double spread = tight.mult_report.upper - tight.mult_report.lower;
  bool ok = spread <= kTightSpread * tight.mult_report.upper && tight.consistent;

  const std::vector<int> levels{64, 128, 256};
  auto riesz = sweep_multiplication(CheckKind::Riesz, kHalf, [](double t) { return cplx(std::sin(2 * pi * t)); }, levels);
  double worst = 0.0;
  for (std::size_t i = 1; i < riesz.measured_stat.size(); ++i) {
    worst = std::max(worst, riesz.measured_stat[i] / riesz.measured_stat[i - 1]);
  }
  ok = ok && riesz.measured_stat.size() == 3 && worst <= kRieszFactor;

  auto egrid = make_grid(kE, 64);
  auto base = exponential_system(egrid, period_lattice(*egrid, 0.2, 3));
  const double big_m = measure_bounds(base).upper;
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int violations = 0;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> cuts{-0.4};
    std::vector<cplx> vals;
    const int pieces = 2 + static_cast<int>(6 * u(rng));
    for (int p = 1; p < pieces; ++p) cuts.push_back(-0.4 + 0.8 * u(rng));
    std::sort(cuts.begin(), cuts.end());
    for (int p = 0; p < pieces; ++p) vals.push_back(std::polar(3.0 * u(rng), 2 * pi * u(rng)));
    auto phi = sample(egrid, [&](double t) {
      std::size_t k = 0;
      while (k + 1 < cuts.size() && t >= cuts[k + 1]) ++k;
      return vals[k];
    });
    auto b = check_bessel_multiplication(base, phi);
    const double bound = big_m * std::pow(oracle::max_abs(phi), 2);
    if (b.mult_report.upper > bound * (1 + kBesselSlack)) ++violations;
  }
  ok = ok && violations == 0;
  return {ok, "tight spread=" + num(spread) + " riesz ratio<=" + num(worst) + " bessel violations=" +
                  std::to_string(violations)};
}

Outcome converse() {
  auto grid = make_grid(kHalf, 256);
  auto phi = sample(grid, [](double t) { return cplx(2.0 + std::sin(2 * pi * t)); });
  auto r = check_converse(multiply_system(dft_base(grid), phi), phi);
  const double err = std::max(std::abs(r.base_report.lower - 1.0), std::abs(r.base_report.upper - 1.0));
  return {err <= kConverseTol && r.consistent, "recovered |bounds-1|=" + num(err)};
}

Outcome span_identity() {
  const Domain unit({{0.0, 1.0}});
  auto grid = make_grid(unit, 256);
  auto phi = sample(grid, [](double t) { return cplx(t <= 0.5 ? 1.0 : 0.0); });
  MultCheckOptions opts;
  opts.rank_tol = 1e-8;
  auto r = check_frame_sequence_multiplication(dft_base(grid), phi, opts);
  const double err = std::max(std::abs(r.mult_report.lower - 1.0), std::abs(r.mult_report.upper - 1.0));
  return {r.mult_report.rank == grid->size() / 2 && err <= kAnchorTol && r.consistent,
          "rank=" + std::to_string(r.mult_report.rank) + " of N=" + std::to_string(grid->size()) + " |bounds-1|=" +
              num(err)};
}

Outcome beurling() {
  auto grid = make_grid(kE, 64);
  int good = 0;
  double min_lower = 1e300;
  double gap_lo = 1e300, gap_hi = 0.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto ps = jittered_lattice(-31.5, 64, 1.0, 0.2, seed);
    const double g = gap(ps).value;
    gap_lo = std::min(gap_lo, g);
    gap_hi = std::max(gap_hi, g);
    const bool pred = beurling_1d_frame_predicate(ps, kPredicateA, kPredicateR).predicted_frame;
    const auto rep = measure_bounds(exponential_system(grid, ps));
    min_lower = std::min(min_lower, rep.min_eigenvalue);
    if (g >= kMinJitterGap && g <= kMaxJitterGap && pred && rep.min_eigenvalue > kJitterLower) ++good;
  }
  return {good == 10, std::to_string(good) + "/10 seeds, gap in [" + num(gap_lo) + ", " + num(gap_hi) +
                          "], min lower=" + num(min_lower)};
}

Outcome obstruction() {
  const std::vector<int> levels{64, 128, 256};
  auto tri = corollary_obstruction_demo([](double w) { return cplx(1.0 - 2.0 * std::abs(w)); }, kHalf, levels);
  double worst = 0.0;
  for (double q : tri.ratios) worst = std::max(worst, q);
  auto chi = corollary_obstruction_demo([](double) { return cplx(1.0); }, kHalf, levels);
  const auto [lo, hi] = std::minmax_element(chi.lower.begin(), chi.lower.end());
  const double spread = *hi / *lo;
  return {tri.strictly_decreasing && worst <= kObstructionRatio && spread <= kControlSpread,
          "max ratio=" + num(worst) + " control spread=" + num(spread)};
}

struct Pipeline {
  GridPtr grid = make_grid(dilate(kE, 0.05), 320);
  Generator g = build_bump_generator(BumpSpec{kE, 0.05}, grid);
  PointSet lambda_prime = densify(period_lattice(*grid, 0.2, 11), 0.2, 0.1);
};

const Pipeline& pipeline() {
  static const Pipeline p;
  return p;
}

SampledFunction random_profile(const GridPtr& grid, std::mt19937_64& rng, int terms) {
  std::normal_distribution<double> nd;
  std::vector<cplx> c;
  for (int j = -terms; j <= terms; ++j) c.emplace_back(nd(rng), nd(rng));
  return sample(grid, [&](double w) {
    if (!kE.contains(w)) return cplx(0.0);
    cplx acc = 0.0;
    for (int j = -terms; j <= terms; ++j) acc += c[static_cast<std::size_t>(j + terms)] * std::polar(1.0, 2 * pi * j * (w + 0.4) / 0.8);
    return acc;
  });
}

Outcome expansion_pipeline() {
  const auto& p = pipeline();
  OversampledExpander ex(kE, p.g, p.lambda_prime);
  std::mt19937_64 rng(8);
  double res = 0.0, van = 0.0, perm = 0.0, coeff_ratio = 0.0;
  int bad = 0;
  for (int trial = 0; trial < 50; ++trial) {
    auto f = random_profile(p.grid, rng, 8);
    auto r = ex.expand(f);
    const double ratio = r.coeff_norm_sq / (norm_sq(f) / ex.frame().lower);
    res = std::max(res, r.residual);
    van = std::max(van, r.vanishing);
    perm = std::max(perm, r.permutation_change);
    coeff_ratio = std::max(coeff_ratio, ratio);
    if (r.residual > kPipelineTol || r.vanishing > kPipelineTol || r.permutation_change > kPermutationTol ||
        ratio > 1.0 + kCoeffSlack) {
      ++bad;
    }
  }
  return {bad == 0, "K'=" + std::to_string(p.lambda_prime.size()) + " residual<=" + num(res) + " vanishing<=" +
                        num(van) + " permutation<=" + num(perm) + " coeff/bound<=" + num(coeff_ratio)};
}

Outcome outer_frame() {
  const auto& p = pipeline();
  auto r = outer_frame_check(p.g, p.lambda_prime, kE, true, kAnchorTol);
  const double diff = std::max(r.lower_diff, r.upper_diff);
  return {r.bounds_match && diff <= kAnchorTol * r.reference.upper,
          "bounds [" + num(r.projected.lower) + ", " + num(r.projected.upper) + "] diff=" + num(diff)};
}

Outcome convolution() {
  auto grid = make_grid(kE, 64);
  auto ps = period_lattice(*grid, 0.2, 5);
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int violations = 0;
  int checks = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const double a = 1 + 3 * u(rng), b = 6 * u(rng), c = 1 + 3 * u(rng), d = 6 * u(rng);
    const double f_lo = 0.5 + u(rng), f_hi = f_lo + 0.1 + u(rng);
    const double g_lo = 0.2 + u(rng), g_hi = g_lo + 0.1 + u(rng);
    auto f = make_generator(grid, [=](double w) {
      return (f_lo + (f_hi - f_lo) * (0.5 + 0.5 * std::sin(2 * pi * a * w + b))) * std::polar(1.0, b * w);
    }, "f");
    auto g = make_generator(grid, [=](double w) {
      return (g_lo + (g_hi - g_lo) * (0.5 + 0.5 * std::cos(2 * pi * c * w + d))) * std::polar(1.0, -d * w * w);
    }, "g");
    MultCheckOptions opts;
    opts.envelope_slack = kEnvelopeSlack;
    for (auto mode : {ConvolutionMode::Bessel, ConvolutionMode::Frame, ConvolutionMode::FrameSequence,
                      ConvolutionMode::Quotient, ConvolutionMode::FrameSequenceQuotient, ConvolutionMode::BesselQuotient}) {
      auto r = convolution_closure_check(f, g, ps, grid, mode, opts);
      ++checks;
      bool ok = r.within_envelope && r.consistent;
      if (mode == ConvolutionMode::Quotient || mode == ConvolutionMode::FrameSequenceQuotient) {
        ok = ok && r.envelope.lo <= oracle::min_abs(g.hat_h) * (1 + kEnvelopeSlack) &&
             r.envelope.hi >= oracle::max_abs(g.hat_h) * (1 - kEnvelopeSlack);
      }
      if (!ok) ++violations;
    }
  }
  return {violations == 0, std::to_string(checks) + " checks, violations=" + std::to_string(violations)};
}

Outcome union_criterion() {
  const Domain e1({{0.0, 1.0}});
  const Domain e2({{0.5, 1.5}});
  auto grid = make_grid(Domain({{0.0, 1.5}}), 64);
  auto h1 = sample(grid, [](double w) { return cplx(1.0 + 0.5 * std::cos(2 * pi * w)); });
  auto h2 = sample(grid, [](double w) { return std::polar(0.75, 3 * w); });
  auto rep = union_check({{{e1, h1}, {e2, h2}}, dft_lattice(*grid)}, grid);
  const bool inside = rep.report.lower >= rep.m * rep.p_hat * (1 - kEnvelopeSlack) &&
                      rep.report.upper <= rep.big_m * rep.big_p_hat * (1 + kEnvelopeSlack);

  const std::vector<int> levels{64, 128, 256};
  std::vector<std::pair<Domain, ScalarFn>> parts{{e1, [](double w) { return cplx(w - 0.75); }},
                                                 {e2, [](double w) { return cplx(2.0 * (w - 0.75)); }}};
  auto sw = union_sweep(parts, Domain({{0.0, 1.5}}), levels);
  return {inside && rep.consistent && sw.lower_trend == Trend::ToZero,
          "bounds [" + num(rep.report.lower) + ", " + num(rep.report.upper) + "] in [" + num(rep.m * rep.p_hat) + ", " +
              num(rep.big_m * rep.big_p_hat) + "], degenerate trend " + to_string(sw.lower_trend)};
}

Outcome dictionary() {
  std::mt19937_64 rng(31);
  auto grid = make_grid(kHalf, 256);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    oracle::SmoothBandlimited f(oracle::random_trig_poly(rng, 3));
    oracle::SmoothBandlimited h(oracle::random_trig_poly(rng, 2));
    auto ps = jittered_lattice(-7.5, 16, 1.0, 0.4, 500 + trial);
    const double t = time_domain_frame_sum([&](double x) { return f.time(x); }, [&](double x) { return h.time(x); }, ps);
    auto gen = make_generator(grid, [&](double w) { return h.hat(w); }, "h");
    const double s = frequency_domain_frame_sum(sample(grid, [&](double w) { return f.hat(w); }), gen, ps);
    worst = std::max(worst, std::abs(t - s) / std::max(std::abs(s), 1e-300));
  }
  return {worst <= kDictionaryTol, "max relative difference=" + num(worst)};
}

}  // namespace

int main() {
  report(1, "sinc orthonormal basis", 5.0, sinc_anchor);
  report(2, "multiplication equivalence", 10.0, multiplication_equivalence);
  report(3, "tight/Riesz/Bessel variants", 0.0, variants);
  report(4, "converse", 0.0, converse);
  report(5, "frame-sequence span", 0.0, span_identity);
  report(6, "Beurling predicates", 30.0, beurling);
  report(7, "continuous obstruction", 0.0, obstruction);
  report(8, "oversampled expansion", 60.0, expansion_pipeline);
  report(9, "outer frame", 0.0, outer_frame);
  report(10, "convolution closure", 0.0, convolution);
  report(11, "union criterion", 0.0, union_criterion);
  report(12, "dictionary unitarity", 0.0, dictionary);
  return failures == 0 ? 0 : 1;
}
