#pragma once

// Irregular translates {h(x - lambda_k)} of a generator h in the Paley-Wiener
// space P_E, handled entirely on the frequency side: T_lambda h corresponds
// to e_lambda * h_hat with e_lambda(w) = exp(-2 pi i lambda w).

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "framelab/domain.hpp"
#include "framelab/framecore.hpp"
#include "framelab/multiplication.hpp"
#include "framelab/pointset.hpp"

namespace framelab {

/// Element of P_E given by frequency samples; E is the grid's domain.
struct Generator {
  SampledFunction hat_h;
  std::string label;

  /// h(x) = int_E h_hat(w) exp(2 pi i w x) dw by the grid's midpoint rule.
  cplx time_eval(double x) const;
  /// ||h||^2 = ||h_hat||^2 on the grid.
  double norm_sq() const;
};

Generator make_generator(const GridPtr& grid, const ScalarFn& hat_h, std::string label);

/// {e_lambda_k * h_hat} on the generator's grid, labelled by lambda_k.
SynthesisSystem translate_system(const Generator& gen, const PointSet& ps, const GridPtr& freq_grid);

/// Frame classification of {T_lambda h} for P_E. Runs the frame-sequence
/// multiplication check with phi = h_hat, which also decides "frame for P_E"
/// (F = E) and carries the Bessel envelope.
MultCheckReport classify_translates(const Generator& gen, const PointSet& ps, const GridPtr& freq_grid,
                                    const MultCheckOptions& opts = {});

// --- continuous generators ---------------------------------------------------

/// Point set to pair with a grid; the default is the grid's DFT lattice.
using LatticeRule = std::function<PointSet(const Grid&)>;

struct ObstructionReport {
  std::vector<int> refinements;
  /// Smallest eigenvalue of the translate frame operator per level.
  std::vector<double> lower;
  std::vector<double> upper;
  /// min |h_hat|^2 over grid nodes per level.
  std::vector<double> min_hat_sq;
  /// lower[i+1] / lower[i].
  std::vector<double> ratios;
  Trend trend = Trend::Inconclusive;
  bool strictly_decreasing = false;
  /// Strict decrease with every ratio <= max_ratio.
  bool obstruction_shown = false;
  double max_ratio = 0.6;
};

/// Lower frame bound of {T_lambda h} across grid refinements of E. A
/// continuous h_hat supported in E has small values near the boundary that
/// the grid resolves ever more finely.
ObstructionReport corollary_obstruction_demo(const ScalarFn& hat_h, const Domain& dom,
                                             std::span<const int> refinements, const LatticeRule& rule = {},
                                             double max_ratio = 0.6, double rank_tol = 1e-8);

// --- smooth generator with oversampling --------------------------------------

struct BumpSpec {
  Domain base_domain;
  double delta = 0.0;
};

/// s(t) = b(t) / (b(t) + b(1 - t)), b(t) = exp(-1/t) for t > 0 and 0 otherwise.
double smoothstep(double t);

/// Value of the bump at w: 1 on E, 0 outside E_delta, smoothstep products on
/// the transition bands.
double bump_value(const BumpSpec& spec, double w);

/// g_hat on a grid over dilate(E, delta). Each transition band needs at least
/// 16 grid nodes.
Generator build_bump_generator(const BumpSpec& spec, const GridPtr& grid);

/// sum |g_hat| w + sum |second difference of g_hat| / (4 pi^2): a grid estimate
/// of C with (1 + x^2) |g(x)| <= C.
double bump_decay_constant(const Generator& gen);

struct ExpansionOptions {
  ReconstructOptions recon;
  double rank_tol = 1e-8;
  /// Seed of the summation-order permutation.
  std::uint64_t seed = 1;
  /// Relative slack on ||alpha||^2 <= ||f_hat||^2 / lower.
  double coeff_slack = 1e-9;
};

struct ExpansionResult {
  /// alpha_k, aligned with the points of ps_prime.
  std::vector<cplx> coeffs;
  std::vector<double> lambdas;
  std::size_t iterations = 0;
  /// ||sum_k alpha_k e_k g_hat - f_hat|| / ||f_hat|| over all nodes.
  double residual = 0.0;
  /// ||sum_k alpha_k e_k|| on the nodes of E_delta \ E, relative to ||f_hat||.
  double vanishing = 0.0;
  double coeff_norm_sq = 0.0;
  /// ||f_hat||^2 / lower bound of {e_k} on E_delta.
  double coeff_bound = 0.0;
  /// Max change of the synthesized g-expansion under a random summation order,
  /// relative to max |f_hat|.
  double permutation_change = 0.0;
  std::vector<std::string> warnings;
};

struct TailProfile {
  std::vector<std::size_t> truncations;
  /// max over the window of |sum over omitted terms alpha_k g(x - lambda_k)|.
  std::vector<double> tail;
  /// ||alpha|| * max_x (sum over omitted terms |g(x - lambda_k)|^2)^(1/2).
  std::vector<double> bound;
  bool bound_monotone = false;
  bool tail_within_bound = false;
};

/// Expansion f = sum alpha_k g(x - lambda'_k) for f in P_E. The frame of
/// exponentials on E_delta is measured once and reused for every f.
class OversampledExpander {
 public:
  /// `gen_g` lives on a grid over E_delta and equals 1 on the nodes of E.
  OversampledExpander(const Domain& e, Generator gen_g, PointSet ps_prime, ExpansionOptions opts = {});

  const FrameReport& frame() const { return frame_; }
  const Generator& generator() const { return gen_; }
  const PointSet& points() const { return ps_; }

  ExpansionResult expand(const SampledFunction& f_hat) const;

  /// Tail of the time-domain series over x in `window`, with terms ordered by
  /// distance of lambda'_k from the centre of the point-set box.
  TailProfile tail_profile(const ExpansionResult& res, const std::vector<double>& window,
                           const std::vector<std::size_t>& truncations) const;

 private:
  Domain e_;
  Generator gen_;
  PointSet ps_;
  ExpansionOptions opts_;
  SynthesisSystem base_;
  FrameReport frame_;
  std::vector<std::size_t> outside_e_;
};

ExpansionResult oversampled_expansion(const Domain& e, const SampledFunction& f_hat, const Generator& gen_g,
                                      const PointSet& ps_prime, const ExpansionOptions& opts = {});

/// True when every point of `sub` occurs in `super` (to 1e-12).
bool contains_points(const PointSet& super, const PointSet& sub);

// --- outer frames ------------------------------------------------------------

struct OuterFrameReport {
  /// {e_k g_hat} restricted to the nodes of E.
  FrameReport projected;
  /// {e_k} on the same nodes.
  FrameReport reference;
  /// {e_k g_hat} on the whole grid over E_delta.
  FrameReport unprojected;
  /// max |g_hat - 1| over nodes of E.
  double max_deviation = 0.0;
  double lower_diff = 0.0;
  double upper_diff = 0.0;
  /// Both bound differences <= tol * reference.upper.
  bool bounds_match = false;
};

/// With strict = true a g_hat that is not 1 on E is rejected.
OuterFrameReport outer_frame_check(const Generator& gen_g, const PointSet& ps_prime, const Domain& e,
                                   bool strict = true, double tol = 1e-10, double rank_tol = 1e-8);

// --- convolution -------------------------------------------------------------

enum class ConvolutionMode { Bessel, Frame, FrameSequence, Quotient, FrameSequenceQuotient, BesselQuotient };

const char* to_string(ConvolutionMode m);
ConvolutionMode convolution_mode_from_string(const std::string& s);

struct ConvolutionReport {
  ConvolutionMode mode = ConvolutionMode::Frame;
  /// Classification of {T_lambda (f*g)}.
  MultCheckReport product;
  FrameReport f_report;
  FrameReport g_report;
  /// Modes bessel/frame/frame_sequence: envelope of the product bounds.
  /// Quotient modes: envelope of |g_hat| on the product support.
  /// Bessel quotient: envelope of the upper bound of {T_lambda g}.
  Envelope envelope;
  double observed_lo = 0.0;
  double observed_hi = 0.0;
  bool within_envelope = false;
  bool consistent = false;
  std::vector<std::string> notes;
};

/// Checks the convolution statements for f*g with (f*g)^ = f_hat g_hat.
/// Quotient modes need |f_hat| bounded below (on its support for the
/// frame-sequence variant, everywhere for the others).
ConvolutionReport convolution_closure_check(const Generator& f, const Generator& g, const PointSet& ps,
                                            const GridPtr& freq_grid, ConvolutionMode mode,
                                            const MultCheckOptions& opts = {});

// --- unions of generators ----------------------------------------------------

struct UnionPart {
  Domain e;
  /// h_hat_j sampled on the common grid; values outside E_j are ignored.
  SampledFunction hat_h;
};

struct UnionSpec {
  std::vector<UnionPart> parts;
  PointSet ps;
};

struct UnionReport {
  FrameReport report;
  std::vector<double> m_parts;
  std::vector<double> big_m_parts;
  double m = 0.0;
  double big_m = 0.0;
  /// Grid min and max of sum_j |chi_Ej h_hat_j|^2.
  double p_hat = 0.0;
  double big_p_hat = 0.0;
  bool predicted_frame = false;
  bool measured_frame = false;
  Envelope envelope;
  bool within_envelope = false;
  bool consistent = false;
};

/// Stacked system {e_k chi_Ej h_hat_j} on a common grid over the union of the
/// E_j. m_j, M_j are measured on the sub-grids of the E_j.
UnionReport union_check(const UnionSpec& spec, const GridPtr& common, const MultCheckOptions& opts = {});

struct UnionSweepReport {
  std::vector<int> refinements;
  std::vector<UnionReport> levels;
  std::vector<double> p_hat;
  std::vector<double> lower;
  Trend p_trend = Trend::Inconclusive;
  Trend lower_trend = Trend::Inconclusive;
};

/// union_check at each refinement of the common domain; h_hat_j given as
/// functions and Lambda by a lattice rule on the common grid.
UnionSweepReport union_sweep(const std::vector<std::pair<Domain, ScalarFn>>& parts, const Domain& common,
                             std::span<const int> refinements, const LatticeRule& rule = {},
                             const MultCheckOptions& opts = {});

// --- translate <-> exponential dictionary ------------------------------------

struct TimeQuadrature {
  double half_width = 200.0;
  double spacing = 0.5;
};

/// sum_k |int f(x) conj(h(x - lambda_k)) dx| ^2 by the trapezoid rule on
/// [-half_width, half_width].
double time_domain_frame_sum(const std::function<cplx(double)>& f, const std::function<cplx(double)>& h,
                             const PointSet& ps, const TimeQuadrature& q = {});

/// sum_k |<f_hat, e_k h_hat>|^2 on the grid.
double frequency_domain_frame_sum(const SampledFunction& f_hat, const Generator& gen, const PointSet& ps);

}  // namespace framelab
