#pragma once

// Finite-dimensional frame analysis of sampled function systems.
//
// Quadrature weights are folded into the synthesis matrix as sqrt(w_i) row
// scaling, so the singular values of that matrix are exactly the bounds of the
// discretized operators. With T the weighted N x K synthesis matrix:
//   frame operator  S = T T^*  (N x N, acting on L^2(E) samples),
//   Gram matrix     G = T^* T  (K x K), G[j,k] = <psi_k, psi_j>.
// S and G share their nonzero spectrum.

#include <Eigen/Dense>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "framelab/domain.hpp"
#include "framelab/errors.hpp"
#include "framelab/pointset.hpp"

namespace framelab {

/// Finite family {psi_k} sampled on a common grid.
class SynthesisSystem {
 public:
  /// `values` is N x K, column k holds psi_k at the grid nodes.
  SynthesisSystem(GridPtr grid, Eigen::MatrixXcd values, std::vector<double> labels);
  SynthesisSystem(GridPtr grid, const std::vector<SampledFunction>& members, std::vector<double> labels);

  const GridPtr& grid() const { return grid_; }
  std::size_t size() const { return static_cast<std::size_t>(values_.cols()); }
  std::size_t dim_space() const { return grid_->size(); }
  const Eigen::MatrixXcd& values() const { return values_; }
  const std::vector<double>& labels() const { return labels_; }
  SampledFunction member(std::size_t k) const;

  /// sqrt(w_i) * psi_k(t_i).
  Eigen::MatrixXcd weighted() const;

 private:
  GridPtr grid_;
  Eigen::MatrixXcd values_;
  std::vector<double> labels_;
};

/// Members exp(-2 pi i lambda_k t) on the grid nodes, labelled by lambda_k.
SynthesisSystem exponential_system(const GridPtr& grid, const PointSet& ps);

/// Frequencies m / L, m = -N/2 .. N - N/2 - 1, for a single-interval grid of N
/// nodes over an interval of length L. The matching exponential system is the
/// sampled DFT basis: a tight frame with bound L.
PointSet dft_lattice(const Grid& grid);

Eigen::MatrixXcd gram(const SynthesisSystem& sys);

/// <f, psi_k> for every member.
std::vector<cplx> analysis(const SynthesisSystem& sys, const SampledFunction& f);
/// sum_k c_k psi_k.
SampledFunction synthesize(const SynthesisSystem& sys, const std::vector<cplx>& coeffs);
/// S f = sum_k <f, psi_k> psi_k.
SampledFunction frame_operator_apply(const SynthesisSystem& sys, const SampledFunction& f);

struct FrameFlags {
  bool bessel = true;
  bool frame_for_whole_space = false;
  bool frame_sequence = false;
  bool riesz_sequence = false;
  bool tight = false;
};

struct GridResolution {
  std::size_t nodes = 0;
  double max_step = 0.0;
  double measure = 0.0;
};

struct FrameReport {
  /// Smallest eigenvalue of S above rank_tol * upper (frame-sequence bound).
  double lower = 0.0;
  double upper = 0.0;
  /// Smallest eigenvalue of S, retained or not (0 when K < N).
  double min_eigenvalue = 0.0;
  /// Extreme Gram eigenvalues (Riesz constants when riesz_sequence holds).
  double gram_lower = 0.0;
  double gram_upper = 0.0;
  std::size_t rank = 0;
  std::size_t dim_space = 0;
  std::size_t members = 0;
  double rank_tol = 1e-8;
  FrameFlags flags;
  GridResolution resolution;
  /// Max relative disagreement of the nonzero spectra of S and G, when both
  /// were computed.
  std::optional<double> cross_check;
  /// Ascending eigenvalues of the smaller of S and G.
  std::vector<double> spectrum;
};

struct MeasureOptions {
  double rank_tol = 1e-8;
  /// When set, flags.bessel records upper <= bessel_bound.
  std::optional<double> bessel_bound;
  /// Compute both S and G spectra when both sides are at most this size.
  std::size_t cross_check_limit = 512;
};

FrameReport measure_bounds(const SynthesisSystem& sys, const MeasureOptions& opts = {});

struct ReconstructOptions {
  double tol = 1e-10;
  std::size_t max_iter = 1000;
};

struct Reconstruction {
  /// c_k = <g, psi_k> with S g = f.
  std::vector<cplx> coeffs;
  /// ||sum_k c_k psi_k - f|| / ||f||.
  double residual = 0.0;
  std::size_t iterations = 0;
  /// Relative residual after each iteration.
  std::vector<double> history;
};

class ReconstructionError : public NumericalError {
 public:
  ReconstructionError(const std::string& what, double best_residual, bool not_in_span)
      : NumericalError(what), best_residual_(best_residual), not_in_span_(not_in_span) {}
  double best_residual() const { return best_residual_; }
  bool not_in_span() const { return not_in_span_; }

 private:
  double best_residual_;
  bool not_in_span_;
};

/// Canonical-dual coefficients of f by conjugate gradients on S g = f.
Reconstruction reconstruct(const SynthesisSystem& sys, const SampledFunction& f,
                           const ReconstructOptions& opts = {});

}  // namespace framelab
