#include "framelab/translates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>

#include "framelab/errors.hpp"
#include "framelab/parallel.hpp"

namespace framelab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_on(const SampledFunction& f, const GridPtr& grid, const char* what) {
  if (!same_grid(f.grid, grid)) throw InputError(std::string("translates: ") + what + " is not on the frequency grid");
}

PointSet lattice_for(const LatticeRule& rule, const Grid& g) { return rule ? rule(g) : dft_lattice(g); }

// Smallest retained eigenvalue of S; the smallest overall when S is the
// smaller side.
double lower_of(const FrameReport& r) { return r.members >= r.dim_space ? r.min_eigenvalue : r.lower; }

double range_min_abs(const SampledFunction& f, const std::vector<std::size_t>& idx) {
  double v = std::numeric_limits<double>::infinity();
  for (std::size_t i : idx) v = std::min(v, std::abs(f.values[i]));
  return idx.empty() ? 0.0 : v;
}

double range_max_abs(const SampledFunction& f, const std::vector<std::size_t>& idx) {
  double v = 0.0;
  for (std::size_t i : idx) v = std::max(v, std::abs(f.values[i]));
  return v;
}

}  // namespace

cplx Generator::time_eval(double x) const {
  const auto& g = *hat_h.grid;
  cplx acc = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    acc += g.weights()[i] * hat_h.values[i] * std::polar(1.0, kTwoPi * g.nodes()[i] * x);
  }
  return acc;
}

double Generator::norm_sq() const { return framelab::norm_sq(hat_h); }

Generator make_generator(const GridPtr& grid, const ScalarFn& hat_h, std::string label) {
  return Generator{sample(grid, hat_h), std::move(label)};
}

SynthesisSystem translate_system(const Generator& gen, const PointSet& ps, const GridPtr& freq_grid) {
  require_on(gen.hat_h, freq_grid, "generator");
  if (ps.dim() != 1) throw InputError("translates: translate systems need a 1-D point set");
  return multiply_system(exponential_system(freq_grid, ps), gen.hat_h);
}

MultCheckReport classify_translates(const Generator& gen, const PointSet& ps, const GridPtr& freq_grid,
                                    const MultCheckOptions& opts) {
  require_on(gen.hat_h, freq_grid, "generator");
  auto r = check_frame_sequence_multiplication(exponential_system(freq_grid, ps), gen.hat_h, opts);
  r.notes.push_back("bounds refer to P_E with ||f|| = ||f_hat||_{L2(E)}");
  return r;
}

ObstructionReport corollary_obstruction_demo(const ScalarFn& hat_h, const Domain& dom,
                                             std::span<const int> refinements, const LatticeRule& rule,
                                             double max_ratio, double rank_tol) {
  if (refinements.size() < 2) throw InputError("translates: the obstruction demo needs at least two refinements");
  ObstructionReport rep;
  rep.refinements.assign(refinements.begin(), refinements.end());
  rep.max_ratio = max_ratio;
  const std::size_t n = refinements.size();
  rep.lower.resize(n);
  rep.upper.resize(n);
  rep.min_hat_sq.resize(n);
  MeasureOptions mo;
  mo.rank_tol = rank_tol;
  parallel_for(n, [&](std::size_t i) {
    const GridPtr g = make_grid(dom, refinements[i]);
    const Generator gen{sample(g, hat_h), "h"};
    const auto fr = measure_bounds(translate_system(gen, lattice_for(rule, *g), g), mo);
    rep.lower[i] = lower_of(fr);
    rep.upper[i] = fr.upper;
    double m = std::numeric_limits<double>::infinity();
    for (const auto& v : gen.hat_h.values) m = std::min(m, std::norm(v));
    rep.min_hat_sq[i] = m;
  });
  rep.strictly_decreasing = true;
  bool ratios_ok = true;
  for (std::size_t i = 1; i < n; ++i) {
    const double ratio = rep.lower[i - 1] > 0.0 ? rep.lower[i] / rep.lower[i - 1] : 1.0;
    rep.ratios.push_back(ratio);
    rep.strictly_decreasing = rep.strictly_decreasing && rep.lower[i] < rep.lower[i - 1];
    ratios_ok = ratios_ok && ratio <= max_ratio;
  }
  rep.trend = classify_trend(rep.lower);
  rep.obstruction_shown = rep.strictly_decreasing && ratios_ok;
  return rep;
}

double smoothstep(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / t);
  const double b = std::exp(-1.0 / (1.0 - t));
  return a / (a + b);
}

double bump_value(const BumpSpec& spec, double w) {
  if (spec.base_domain.contains(w)) return 1.0;
  const double d = spec.delta;
  for (const auto& iv : spec.base_domain.intervals()) {
    if (w > iv.lo - d && w < iv.hi + d) {
      return smoothstep((w - (iv.lo - d)) / d) * smoothstep(((iv.hi + d) - w) / d);
    }
  }
  return 0.0;
}

Generator build_bump_generator(const BumpSpec& spec, const GridPtr& grid) {
  if (!(spec.delta > 0.0)) throw InputError("bump: delta must be positive");
  const auto& ivs = spec.base_domain.intervals();
  for (std::size_t j = 1; j < ivs.size(); ++j) {
    if (ivs[j].lo - ivs[j - 1].hi <= 2.0 * spec.delta) {
      throw InputError("bump: transition bands overlap between intervals " + std::to_string(j - 1) + " and " +
                       std::to_string(j) + "; merge them or use a smaller delta");
    }
  }
  if (!grid->domain().covers(dilate(spec.base_domain, spec.delta))) {
    throw InputError("bump: grid does not cover the dilated domain");
  }
  for (const auto& iv : ivs) {
    std::size_t left = 0;
    std::size_t right = 0;
    for (double w : grid->nodes()) {
      left += (w > iv.lo - spec.delta && w < iv.lo) ? 1 : 0;
      right += (w > iv.hi && w < iv.hi + spec.delta) ? 1 : 0;
    }
    if (std::min(left, right) < 16) {
      throw InputError("bump: grid resolves a transition band with " + std::to_string(std::min(left, right)) +
                       " nodes, at least 16 are required");
    }
  }
  std::vector<cplx> v(grid->size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = bump_value(spec, grid->nodes()[i]);
  return Generator{SampledFunction(grid, std::move(v)), "bump"};
}

double bump_decay_constant(const Generator& gen) {
  const auto& g = *gen.hat_h.grid;
  double l1 = 0.0;
  double l1_second = 0.0;
  std::size_t start = 0;
  while (start < g.size()) {
    std::size_t end = start;
    while (end < g.size() && g.interval_of(end) == g.interval_of(start)) ++end;
    const double h = g.steps()[g.interval_of(start)];
    auto at = [&](std::ptrdiff_t k) -> cplx {
      if (k < static_cast<std::ptrdiff_t>(start) || k >= static_cast<std::ptrdiff_t>(end)) return 0.0;
      return gen.hat_h.values[static_cast<std::size_t>(k)];
    };
    for (auto k = static_cast<std::ptrdiff_t>(start) - 1; k <= static_cast<std::ptrdiff_t>(end); ++k) {
      l1 += h * std::abs(at(k));
      l1_second += std::abs(at(k + 1) - 2.0 * at(k) + at(k - 1)) / h;
    }
    start = end;
  }
  return l1 + l1_second / (kTwoPi * kTwoPi);
}

OversampledExpander::OversampledExpander(const Domain& e, Generator gen_g, PointSet ps_prime, ExpansionOptions opts)
    : e_(e),
      gen_(std::move(gen_g)),
      ps_(std::move(ps_prime)),
      opts_(opts),
      base_(exponential_system(gen_.hat_h.grid, ps_)) {
  const auto& g = *gen_.hat_h.grid;
  if (!g.domain().covers(e_)) throw InputError("expansion: generator grid does not cover E");
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (e_.contains(g.nodes()[i])) {
      if (std::abs(gen_.hat_h.values[i] - 1.0) > 1e-12) {
        throw HypothesisError("expansion: generator is not 1 on E");
      }
    } else {
      outside_e_.push_back(i);
    }
  }
  MeasureOptions mo;
  mo.rank_tol = opts_.rank_tol;
  frame_ = measure_bounds(base_, mo);
  if (!frame_.flags.frame_for_whole_space) {
    throw HypothesisError("expansion: exponentials are not a frame of L^2(E_delta) (rank " +
                          std::to_string(frame_.rank) + " of " + std::to_string(frame_.dim_space) + ")");
  }
}

ExpansionResult OversampledExpander::expand(const SampledFunction& f_hat) const {
  const GridPtr& grid = gen_.hat_h.grid;
  require_on(f_hat, grid, "f_hat");
  for (std::size_t i : outside_e_) {
    if (f_hat.values[i] != 0.0) throw InputError("expansion: f_hat must vanish outside E");
  }
  ExpansionResult out;
  const auto lam = ps_.values();
  out.lambdas.assign(lam.begin(), lam.end());
  const double f2 = norm_sq(f_hat);
  out.coeff_bound = f2 / frame_.lower;
  if (f2 == 0.0) {
    out.coeffs.assign(lam.size(), 0.0);
    return out;
  }
  const Reconstruction rec = reconstruct(base_, f_hat, opts_.recon);
  out.coeffs = rec.coeffs;
  out.iterations = rec.iterations;

  const SampledFunction s = synthesize(base_, out.coeffs);
  double out_sq = 0.0;
  for (std::size_t i : outside_e_) out_sq += grid->weights()[i] * std::norm(s.values[i]);
  const double fnorm = std::sqrt(f2);
  out.vanishing = std::sqrt(out_sq) / fnorm;

  double res_sq = 0.0;
  for (std::size_t i = 0; i < grid->size(); ++i) {
    res_sq += grid->weights()[i] * std::norm(s.values[i] * gen_.hat_h.values[i] - f_hat.values[i]);
  }
  out.residual = std::sqrt(res_sq) / fnorm;

  for (const auto& c : out.coeffs) out.coeff_norm_sq += std::norm(c);
  if (out.coeff_norm_sq > out.coeff_bound * (1.0 + opts_.coeff_slack)) {
    out.warnings.push_back("coefficient norm exceeds the frame bound ||f||^2 / lower");
  }

  std::vector<std::size_t> order(lam.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(opts_.seed);
  std::shuffle(order.begin(), order.end(), rng);
  const auto& vals = base_.values();
  double fmax = 0.0;
  for (const auto& v : f_hat.values) fmax = std::max(fmax, std::abs(v));
  double change = 0.0;
  for (std::size_t i = 0; i < grid->size(); ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    cplx natural = 0.0;
    cplx permuted = 0.0;
    for (std::size_t k = 0; k < lam.size(); ++k) natural += out.coeffs[k] * vals(row, static_cast<Eigen::Index>(k));
    for (std::size_t k : order) permuted += out.coeffs[k] * vals(row, static_cast<Eigen::Index>(k));
    change = std::max(change, std::abs((natural - permuted) * gen_.hat_h.values[i]));
  }
  out.permutation_change = change / fmax;
  return out;
}

TailProfile OversampledExpander::tail_profile(const ExpansionResult& res, const std::vector<double>& window,
                                              const std::vector<std::size_t>& truncations) const {
  const auto lam = ps_.values();
  if (res.coeffs.size() != lam.size()) throw InputError("expansion: coefficients do not match the point set");
  const auto& side = ps_.box().sides.front();
  const double centre = 0.5 * (side.first + side.second);
  std::vector<std::size_t> order(lam.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return std::abs(lam[a] - centre) < std::abs(lam[b] - centre); });

  double alpha_norm = 0.0;
  for (const auto& c : res.coeffs) alpha_norm += std::norm(c);
  alpha_norm = std::sqrt(alpha_norm);

  TailProfile tp;
  tp.truncations = truncations;
  const std::size_t nt = truncations.size();
  std::vector<std::vector<double>> tail_x(window.size(), std::vector<double>(nt));
  std::vector<std::vector<double>> bound_x(window.size(), std::vector<double>(nt));
  parallel_for(window.size(), [&](std::size_t xi) {
    const double x = window[xi];
    std::vector<cplx> term(order.size());
    std::vector<double> gsq(order.size());
    for (std::size_t j = 0; j < order.size(); ++j) {
      const cplx gv = gen_.time_eval(x - lam[order[j]]);
      term[j] = res.coeffs[order[j]] * gv;
      gsq[j] = std::norm(gv);
    }
    // Suffix sums over the omitted terms.
    std::vector<cplx> suffix(order.size() + 1, 0.0);
    std::vector<double> suffix_sq(order.size() + 1, 0.0);
    for (std::size_t j = order.size(); j-- > 0;) {
      suffix[j] = suffix[j + 1] + term[j];
      suffix_sq[j] = suffix_sq[j + 1] + gsq[j];
    }
    for (std::size_t t = 0; t < nt; ++t) {
      const std::size_t n = std::min(truncations[t], order.size());
      tail_x[xi][t] = std::abs(suffix[n]);
      bound_x[xi][t] = alpha_norm * std::sqrt(suffix_sq[n]);
    }
  });
  tp.tail.assign(nt, 0.0);
  tp.bound.assign(nt, 0.0);
  for (std::size_t xi = 0; xi < window.size(); ++xi) {
    for (std::size_t t = 0; t < nt; ++t) {
      tp.tail[t] = std::max(tp.tail[t], tail_x[xi][t]);
      tp.bound[t] = std::max(tp.bound[t], bound_x[xi][t]);
    }
  }
  tp.bound_monotone = true;
  tp.tail_within_bound = true;
  for (std::size_t t = 0; t < nt; ++t) {
    if (t > 0 && tp.bound[t] > tp.bound[t - 1]) tp.bound_monotone = false;
    if (tp.tail[t] > tp.bound[t] * (1.0 + 1e-12) + 1e-300) tp.tail_within_bound = false;
  }
  return tp;
}

ExpansionResult oversampled_expansion(const Domain& e, const SampledFunction& f_hat, const Generator& gen_g,
                                      const PointSet& ps_prime, const ExpansionOptions& opts) {
  return OversampledExpander(e, gen_g, ps_prime, opts).expand(f_hat);
}

bool contains_points(const PointSet& super, const PointSet& sub) {
  if (super.dim() != sub.dim()) return false;
  if (sub.dim() == 1) {
    const auto v = super.values();
    for (double x : sub.values()) {
      auto it = std::lower_bound(v.begin(), v.end(), x - 1e-12);
      if (it == v.end() || *it > x + 1e-12) return false;
    }
    return true;
  }
  for (std::size_t a = 0; a < sub.size(); ++a) {
    bool found = false;
    for (std::size_t b = 0; b < super.size() && !found; ++b) {
      double d = 0.0;
      for (std::size_t c = 0; c < sub.dim(); ++c) d = std::max(d, std::abs(sub.point(a)[c] - super.point(b)[c]));
      found = d <= 1e-12;
    }
    if (!found) return false;
  }
  return true;
}

OuterFrameReport outer_frame_check(const Generator& gen_g, const PointSet& ps_prime, const Domain& e, bool strict,
                                   double tol, double rank_tol) {
  const GridPtr& grid = gen_g.hat_h.grid;
  const GridRestriction r = restrict_grid(grid, e);
  OuterFrameReport rep;
  for (std::size_t i : r.indices) rep.max_deviation = std::max(rep.max_deviation, std::abs(gen_g.hat_h.values[i] - 1.0));
  if (strict && rep.max_deviation > 1e-12) {
    throw HypothesisError("outer frame: generator is not 1 on E (max deviation " +
                          std::to_string(rep.max_deviation) + ")");
  }
  const SynthesisSystem full = translate_system(gen_g, ps_prime, grid);
  Eigen::MatrixXcd rows(static_cast<Eigen::Index>(r.indices.size()), full.values().cols());
  for (std::size_t k = 0; k < r.indices.size(); ++k) {
    rows.row(static_cast<Eigen::Index>(k)) = full.values().row(static_cast<Eigen::Index>(r.indices[k]));
  }
  MeasureOptions mo;
  mo.rank_tol = rank_tol;
  rep.projected = measure_bounds(SynthesisSystem(r.grid, std::move(rows), full.labels()), mo);
  rep.reference = measure_bounds(exponential_system(r.grid, ps_prime), mo);
  rep.unprojected = measure_bounds(full, mo);
  rep.lower_diff = std::abs(rep.projected.lower - rep.reference.lower);
  rep.upper_diff = std::abs(rep.projected.upper - rep.reference.upper);
  const double scale = tol * rep.reference.upper;
  rep.bounds_match = rep.lower_diff <= scale && rep.upper_diff <= scale &&
                     rep.projected.flags.frame_for_whole_space == rep.reference.flags.frame_for_whole_space;
  return rep;
}

const char* to_string(ConvolutionMode m) {
  switch (m) {
    case ConvolutionMode::Bessel: return "bessel";
    case ConvolutionMode::Frame: return "frame";
    case ConvolutionMode::FrameSequence: return "frame_sequence";
    case ConvolutionMode::Quotient: return "quotient";
    case ConvolutionMode::FrameSequenceQuotient: return "frame_sequence_quotient";
    case ConvolutionMode::BesselQuotient: return "bessel_quotient";
  }
  return "unknown";
}

ConvolutionMode convolution_mode_from_string(const std::string& s) {
  for (auto m : {ConvolutionMode::Bessel, ConvolutionMode::Frame, ConvolutionMode::FrameSequence,
                 ConvolutionMode::Quotient, ConvolutionMode::FrameSequenceQuotient, ConvolutionMode::BesselQuotient}) {
    if (s == to_string(m)) return m;
  }
  throw InputError("convolution: unknown mode '" + s + "'");
}

ConvolutionReport convolution_closure_check(const Generator& f, const Generator& g, const PointSet& ps,
                                            const GridPtr& freq_grid, ConvolutionMode mode,
                                            const MultCheckOptions& opts) {
  require_on(f.hat_h, freq_grid, "first generator");
  require_on(g.hat_h, freq_grid, "second generator");
  const SynthesisSystem base = exponential_system(freq_grid, ps);
  std::vector<cplx> prod(freq_grid->size());
  for (std::size_t i = 0; i < prod.size(); ++i) prod[i] = f.hat_h.values[i] * g.hat_h.values[i];
  const SampledFunction h(freq_grid, std::move(prod));

  ConvolutionReport rep;
  rep.mode = mode;
  rep.product = check_frame_sequence_multiplication(base, h, opts);
  MeasureOptions mo;
  mo.rank_tol = opts.rank_tol;
  rep.f_report = measure_bounds(multiply_system(base, f.hat_h), mo);
  rep.g_report = measure_bounds(multiply_system(base, g.hat_h), mo);
  const auto pf = profile_multiplier(f.hat_h, opts.zero_tol);
  const auto pg = profile_multiplier(g.hat_h, opts.zero_tol);
  const FrameReport& b = rep.product.base_report;
  const FrameReport& p = rep.product.mult_report;
  const double m = b.lower;
  const double big_m = b.upper;
  const double slack = opts.envelope_slack;

  auto frame_seq_of = [&](const FrameReport& r, const MultiplierProfile& pr) {
    return r.flags.frame_sequence && r.rank == pr.support_nodes.size() &&
           pr.ess_inf_on_support > opts.effective_frame_eps() * pr.ess_sup;
  };

  switch (mode) {
    case ConvolutionMode::Bessel: {
      const double b12 = pf.ess_sup * pg.ess_sup;
      rep.envelope = {0.0, big_m * b12 * b12};
      rep.observed_lo = rep.observed_hi = p.upper;
      rep.within_envelope = rep.envelope.contains(p.upper, slack);
      rep.consistent = rep.within_envelope;
      break;
    }
    case ConvolutionMode::Frame: {
      if (!rep.f_report.flags.frame_for_whole_space || !rep.g_report.flags.frame_for_whole_space) {
        throw HypothesisError("convolution: hypothesis violated, factor translates are not frames for P_E");
      }
      const double a12 = pf.ess_inf * pg.ess_inf;
      const double b12 = pf.ess_sup * pg.ess_sup;
      rep.envelope = {m * a12 * a12, big_m * b12 * b12};
      rep.observed_lo = p.lower;
      rep.observed_hi = p.upper;
      rep.within_envelope = rep.envelope.contains(p.lower, slack) && rep.envelope.contains(p.upper, slack);
      rep.consistent = p.flags.frame_for_whole_space && rep.within_envelope;
      break;
    }
    case ConvolutionMode::FrameSequence: {
      if (!frame_seq_of(rep.f_report, pf) || !frame_seq_of(rep.g_report, pg)) {
        throw HypothesisError("convolution: hypothesis violated, factor translates are not frame sequences");
      }
      const double a12 = pf.ess_inf_on_support * pg.ess_inf_on_support;
      const double b12 = pf.ess_sup * pg.ess_sup;
      rep.envelope = {m * a12 * a12, big_m * b12 * b12};
      rep.observed_lo = p.lower;
      rep.observed_hi = p.upper;
      rep.within_envelope = rep.envelope.contains(p.lower, slack) && rep.envelope.contains(p.upper, slack);
      rep.consistent = rep.product.measured.frame_sequence && rep.product.span_matches.value_or(true) &&
                       rep.within_envelope;
      break;
    }
    case ConvolutionMode::Quotient:
    case ConvolutionMode::FrameSequenceQuotient: {
      const bool seq = mode == ConvolutionMode::FrameSequenceQuotient;
      const bool f_ok = seq ? frame_seq_of(rep.f_report, pf) : rep.f_report.flags.frame_for_whole_space;
      if (!f_ok) throw HypothesisError("convolution: factor not bounded below");
      const bool p_ok = seq ? rep.product.measured.frame_sequence : p.flags.frame_for_whole_space;
      if (!p_ok) throw HypothesisError("convolution: hypothesis violated, product translates are not a frame");
      // Bounds of |f_hat| and |f_hat g_hat| recovered from measured frame
      // bounds alone: a node delta gives alpha <= |phi_i|^2 K w_i <= |phi_i|^2 M.
      const double a1 = std::sqrt(rep.f_report.lower / big_m);
      const double b1 = std::sqrt(rep.f_report.upper / m);
      const double a2 = std::sqrt(p.lower / big_m);
      const double b2 = std::sqrt(p.upper / m);
      rep.envelope = {a2 / b1, b2 / a1};
      const auto& idx = rep.product.profile.support_nodes;
      rep.observed_lo = range_min_abs(g.hat_h, idx);
      rep.observed_hi = range_max_abs(g.hat_h, idx);
      rep.within_envelope =
          rep.envelope.contains(rep.observed_lo, slack) && rep.envelope.contains(rep.observed_hi, slack);
      const bool g_ok = seq ? rep.g_report.flags.frame_sequence : rep.g_report.flags.frame_for_whole_space;
      rep.consistent = rep.within_envelope && g_ok;
      break;
    }
    case ConvolutionMode::BesselQuotient: {
      const double c = pf.ess_inf;
      if (!(c > opts.effective_frame_eps() * pf.ess_sup)) throw HypothesisError("convolution: factor not bounded below");
      rep.envelope = {0.0, big_m * (p.upper / m) / (c * c)};
      rep.observed_lo = rep.observed_hi = rep.g_report.upper;
      rep.within_envelope = rep.envelope.contains(rep.g_report.upper, slack);
      rep.consistent = rep.within_envelope;
      break;
    }
  }
  if (!rep.within_envelope) rep.notes.push_back("observed values fall outside the envelope");
  return rep;
}

UnionReport union_check(const UnionSpec& spec, const GridPtr& common, const MultCheckOptions& opts) {
  if (spec.parts.empty()) throw InputError("union: no parts");
  const std::size_t n = common->size();
  for (std::size_t i = 0; i < n; ++i) {
    const double w = common->nodes()[i];
    const bool inside = std::any_of(spec.parts.begin(), spec.parts.end(), [&](const auto& p) { return p.e.contains(w); });
    if (!inside) throw InputError("union: common grid extends beyond the union of the parts");
  }
  const SynthesisSystem base = exponential_system(common, spec.ps);
  MeasureOptions mo;
  mo.rank_tol = opts.rank_tol;
  const std::size_t parts = spec.parts.size();
  const std::size_t k = base.size();

  UnionReport rep;
  rep.m_parts.resize(parts);
  rep.big_m_parts.resize(parts);
  std::vector<std::vector<cplx>> masked(parts, std::vector<cplx>(n, 0.0));
  for (std::size_t j = 0; j < parts; ++j) {
    const auto& part = spec.parts[j];
    if (!same_grid(part.hat_h.grid, common)) throw InputError("union: part " + std::to_string(j) + " is on another grid");
    const auto r = restrict_grid(common, part.e);
    const auto fr = measure_bounds(exponential_system(r.grid, spec.ps), mo);
    if (!fr.flags.frame_for_whole_space) {
      throw HypothesisError("union: exponentials are not a frame of L^2(E_" + std::to_string(j) + ")");
    }
    rep.m_parts[j] = fr.lower;
    rep.big_m_parts[j] = fr.upper;
    for (std::size_t i : r.indices) masked[j][i] = part.hat_h.values[i];
  }
  rep.m = *std::min_element(rep.m_parts.begin(), rep.m_parts.end());
  rep.big_m = *std::max_element(rep.big_m_parts.begin(), rep.big_m_parts.end());

  Eigen::MatrixXcd stacked(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k * parts));
  std::vector<double> labels;
  labels.reserve(k * parts);
  for (std::size_t j = 0; j < parts; ++j) {
    const Eigen::Map<const Eigen::VectorXcd> d(masked[j].data(), static_cast<Eigen::Index>(n));
    stacked.middleCols(static_cast<Eigen::Index>(j * k), static_cast<Eigen::Index>(k)) =
        d.asDiagonal() * base.values();
    labels.insert(labels.end(), base.labels().begin(), base.labels().end());
  }
  rep.report = measure_bounds(SynthesisSystem(common, std::move(stacked), std::move(labels)), mo);

  rep.p_hat = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < parts; ++j) s += std::norm(masked[j][i]);
    rep.p_hat = std::min(rep.p_hat, s);
    rep.big_p_hat = std::max(rep.big_p_hat, s);
  }
  // p_hat is a squared quantity, so the threshold is rank_tol itself.
  rep.predicted_frame = rep.big_p_hat > 0.0 && rep.p_hat > opts.rank_tol * rep.big_p_hat;
  rep.measured_frame = rep.report.flags.frame_for_whole_space;
  rep.envelope = {rep.m * rep.p_hat, rep.big_m * rep.big_p_hat};
  rep.within_envelope = rep.envelope.contains(rep.report.upper, opts.envelope_slack);
  if (rep.measured_frame) {
    rep.within_envelope = rep.within_envelope && rep.envelope.contains(rep.report.lower, opts.envelope_slack);
  }
  rep.consistent = rep.predicted_frame == rep.measured_frame && rep.within_envelope;
  return rep;
}

UnionSweepReport union_sweep(const std::vector<std::pair<Domain, ScalarFn>>& parts, const Domain& common,
                             std::span<const int> refinements, const LatticeRule& rule, const MultCheckOptions& opts) {
  if (refinements.empty()) throw InputError("union: empty refinement list");
  UnionSweepReport rep;
  rep.refinements.assign(refinements.begin(), refinements.end());
  rep.levels.resize(refinements.size());
  parallel_for(refinements.size(), [&](std::size_t i) {
    const GridPtr g = make_grid(common, refinements[i]);
    UnionSpec spec{{}, lattice_for(rule, *g)};
    for (const auto& [dom, fn] : parts) spec.parts.push_back({dom, sample(g, fn)});
    rep.levels[i] = union_check(spec, g, opts);
  });
  for (const auto& lv : rep.levels) {
    rep.p_hat.push_back(lv.p_hat);
    rep.lower.push_back(lower_of(lv.report));
  }
  rep.p_trend = classify_trend(rep.p_hat);
  rep.lower_trend = classify_trend(rep.lower);
  return rep;
}

double time_domain_frame_sum(const std::function<cplx(double)>& f, const std::function<cplx(double)>& h,
                             const PointSet& ps, const TimeQuadrature& q) {
  if (!(q.spacing > 0.0) || !(q.half_width > 0.0)) throw InputError("translates: bad time quadrature");
  const auto steps = static_cast<std::size_t>(std::llround(2.0 * q.half_width / q.spacing));
  std::vector<double> xs(steps + 1);
  std::vector<cplx> fx(steps + 1);
  for (std::size_t j = 0; j <= steps; ++j) {
    xs[j] = -q.half_width + static_cast<double>(j) * q.spacing;
    fx[j] = f(xs[j]);
  }
  const auto lam = ps.values();
  std::vector<double> sq(lam.size());
  parallel_for(lam.size(), [&](std::size_t k) {
    cplx acc = 0.0;
    for (std::size_t j = 0; j <= steps; ++j) {
      const double w = (j == 0 || j == steps) ? 0.5 * q.spacing : q.spacing;
      acc += w * fx[j] * std::conj(h(xs[j] - lam[k]));
    }
    sq[k] = std::norm(acc);
  });
  return std::accumulate(sq.begin(), sq.end(), 0.0);
}

double frequency_domain_frame_sum(const SampledFunction& f_hat, const Generator& gen, const PointSet& ps) {
  const auto c = analysis(translate_system(gen, ps, gen.hat_h.grid), f_hat);
  double s = 0.0;
  for (const auto& v : c) s += std::norm(v);
  return s;
}

}  // namespace framelab
