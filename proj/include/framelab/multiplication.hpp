#pragma once

// Frame properties of {phi * psi_k}: predictions from the range of |phi| on
// the grid, measurements from spectra, and refinement sweeps that stand in
// for "a.e." statements about essential bounds.

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "framelab/domain.hpp"
#include "framelab/framecore.hpp"

namespace framelab {

struct MultiplierProfile {
  SampledFunction phi;
  double ess_inf = 0.0;
  double ess_sup = 0.0;
  /// min |phi| over the support nodes F (0 when F is empty).
  double ess_inf_on_support = 0.0;
  /// Weight fraction of nodes with |phi| <= zero_tol * ess_sup.
  double zero_measure_fraction = 0.0;
  /// Union of the cells of support nodes; empty when phi vanishes everywhere.
  std::optional<Domain> support_domain;
  std::vector<std::size_t> support_nodes;
  double zero_tol = 1e-12;
};

/// Grid extrema of |phi| and the support F = {|phi| > zero_tol * max|phi|}.
MultiplierProfile profile_multiplier(const SampledFunction& phi, double zero_tol = 1e-12);

/// Members multiplied pointwise by phi; labels preserved.
SynthesisSystem multiply_system(const SynthesisSystem& sys, const SampledFunction& phi);

struct PropertyFlags {
  bool frame = false;
  bool tight = false;
  bool riesz = false;
  bool bessel = true;
  bool frame_sequence = false;
  bool complete = false;

  bool operator==(const PropertyFlags&) const = default;
};

enum class CheckKind { Frame, Tight, Riesz, Bessel, Converse, FrameSequence };

const char* to_string(CheckKind kind);

struct Envelope {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double v, double rel_slack) const {
    const double pad = rel_slack * std::max(std::abs(lo), std::abs(hi));
    return v >= lo - pad && v <= hi + pad;
  }
};

struct MultCheckReport {
  CheckKind kind = CheckKind::Frame;
  MultiplierProfile profile;
  FrameReport base_report;
  FrameReport mult_report;
  PropertyFlags predicted;
  PropertyFlags measured;
  /// Names of the flags that enter `consistent`.
  std::vector<std::string> compared;
  std::optional<Envelope> envelope;
  bool within_envelope = true;
  /// Frame-sequence check: Gram rank equals the number of support nodes.
  std::optional<bool> span_matches;
  /// Frame-sequence check on a larger domain gave the same verdict.
  std::optional<bool> extended_agrees;
  bool consistent = false;
  std::vector<std::string> notes;
};

struct MultCheckOptions {
  double rank_tol = 1e-8;
  /// Grid-level "bounded below": ess_inf > frame_eps * ess_sup. When unset,
  /// sqrt(rank_tol) is used, the threshold at which a tight base system's
  /// measured rank decision and the predicted flag coincide.
  std::optional<double> frame_eps;
  double zero_tol = 1e-12;
  /// Relative slack when testing measured bounds against envelopes.
  double envelope_slack = 1e-9;

  double effective_frame_eps() const;
};

MultCheckReport check_frame_multiplication(const SynthesisSystem& sys, const SampledFunction& phi,
                                           const MultCheckOptions& opts = {});
MultCheckReport check_tight_multiplication(const SynthesisSystem& sys, const SampledFunction& phi,
                                           const MultCheckOptions& opts = {});
MultCheckReport check_riesz_multiplication(const SynthesisSystem& sys, const SampledFunction& phi,
                                           const MultCheckOptions& opts = {});
MultCheckReport check_bessel_multiplication(const SynthesisSystem& sys, const SampledFunction& phi,
                                            const MultCheckOptions& opts = {});
/// Recovers {psi_k} from {phi psi_k} by division on the support of phi.
MultCheckReport check_converse(const SynthesisSystem& sys_mult, const SampledFunction& phi,
                               const MultCheckOptions& opts = {});

/// The same multiplier posed on a larger domain containing its support.
struct ExtendedCase {
  SynthesisSystem base;
  SampledFunction phi;
};

MultCheckReport check_frame_sequence_multiplication(const SynthesisSystem& sys, const SampledFunction& phi,
                                                    const MultCheckOptions& opts = {},
                                                    const ExtendedCase* extended = nullptr);

MultCheckReport run_check(CheckKind kind, const SynthesisSystem& sys, const SampledFunction& phi,
                          const MultCheckOptions& opts = {});

// --- refinement sweeps -----------------------------------------------------

enum class Trend { Stable, ToZero, Unbounded, Inconclusive };

const char* to_string(Trend t);

/// Classifies values observed at successive grid doublings:
///   Stable   max/min <= 1.05 with all values positive;
///   ToZero   all values ~0, or strictly decreasing with last/first <= 1/2;
///   Unbounded strictly increasing with last/first >= 2.
Trend classify_trend(std::span<const double> values);

using ScalarFn = std::function<cplx(double)>;
using BaseFactory = std::function<SynthesisSystem(const GridPtr&)>;

/// Sampled DFT system on a single-interval grid (tight, bound |E|).
SynthesisSystem dft_base(const GridPtr& grid);

struct MultSweepReport {
  CheckKind kind = CheckKind::Frame;
  std::vector<int> refinements;
  std::vector<MultCheckReport> levels;
  /// Multiplier statistic and measured bound driving the verdict, per level.
  std::vector<double> multiplier_stat;
  std::vector<double> measured_stat;
  Trend multiplier_trend = Trend::Inconclusive;
  Trend measured_trend = Trend::Inconclusive;
  bool predicted = false;
  bool measured = false;
  bool consistent = false;
};

/// Runs `kind` at each refinement (n_per_unit values, doubling) and decides
/// the property from trends: bounded below / frame-type properties require a
/// Stable statistic, Bessel requires a statistic that is not Unbounded.
MultSweepReport sweep_multiplication(CheckKind kind, const Domain& dom, const ScalarFn& phi,
                                     std::span<const int> refinements, const BaseFactory& base = dft_base,
                                     const MultCheckOptions& opts = {});

}  // namespace framelab
