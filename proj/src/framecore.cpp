#include "framelab/framecore.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace framelab {

namespace {

Eigen::VectorXd sqrt_weights(const Grid& g) {
  Eigen::VectorXd s(static_cast<Eigen::Index>(g.size()));
  for (std::size_t i = 0; i < g.size(); ++i) s[static_cast<Eigen::Index>(i)] = std::sqrt(g.weights()[i]);
  return s;
}

void require_grid(const SynthesisSystem& sys, const SampledFunction& f) {
  if (!same_grid(sys.grid(), f.grid)) throw InputError("framecore: function and system live on different grids");
}

Eigen::VectorXcd to_vector(const std::vector<cplx>& v) {
  return Eigen::Map<const Eigen::VectorXcd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<cplx> to_std(const Eigen::VectorXcd& v) { return {v.data(), v.data() + v.size()}; }

Eigen::VectorXd hermitian_eigenvalues(const Eigen::MatrixXcd& m, const char* which) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw NumericalError(std::string("framecore: Hermitian eigen-solver failed to converge on the ") + which +
                         " matrix of size " + std::to_string(m.rows()));
  }
  return es.eigenvalues();
}

}  // namespace

SynthesisSystem::SynthesisSystem(GridPtr grid, Eigen::MatrixXcd values, std::vector<double> labels)
    : grid_(std::move(grid)), values_(std::move(values)), labels_(std::move(labels)) {
  if (!grid_) throw InputError("framecore: system without a grid");
  if (static_cast<std::size_t>(values_.rows()) != grid_->size()) {
    throw InputError("framecore: member length differs from grid size");
  }
  if (values_.cols() < 1) throw InputError("framecore: a system needs at least one member");
  if (labels_.empty()) {
    labels_.resize(static_cast<std::size_t>(values_.cols()));
    for (std::size_t k = 0; k < labels_.size(); ++k) labels_[k] = static_cast<double>(k);
  }
  if (labels_.size() != static_cast<std::size_t>(values_.cols())) {
    throw InputError("framecore: one label per member is required");
  }
}

SynthesisSystem::SynthesisSystem(GridPtr grid, const std::vector<SampledFunction>& members,
                                 std::vector<double> labels)
    : SynthesisSystem(grid,
                      [&] {
                        if (!grid) throw InputError("framecore: system without a grid");
                        Eigen::MatrixXcd m(static_cast<Eigen::Index>(grid->size()),
                                           static_cast<Eigen::Index>(members.size()));
                        for (std::size_t k = 0; k < members.size(); ++k) {
                          if (!same_grid(grid, members[k].grid)) {
                            throw InputError("framecore: members must share the system grid");
                          }
                          m.col(static_cast<Eigen::Index>(k)) = to_vector(members[k].values);
                        }
                        return m;
                      }(),
                      std::move(labels)) {}

SampledFunction SynthesisSystem::member(std::size_t k) const {
  return SampledFunction(grid_, to_std(values_.col(static_cast<Eigen::Index>(k))));
}

Eigen::MatrixXcd SynthesisSystem::weighted() const { return sqrt_weights(*grid_).asDiagonal() * values_; }

SynthesisSystem exponential_system(const GridPtr& grid, const PointSet& ps) {
  if (ps.dim() != 1) throw InputError("framecore: exponential systems need a 1-D point set");
  if (ps.empty()) throw InputError("framecore: empty point set");
  const auto lam = ps.values();
  const auto n = static_cast<Eigen::Index>(grid->size());
  Eigen::MatrixXcd m(n, static_cast<Eigen::Index>(lam.size()));
  for (std::size_t k = 0; k < lam.size(); ++k) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double phase = -2.0 * std::numbers::pi * lam[k] * grid->nodes()[static_cast<std::size_t>(i)];
      m(i, static_cast<Eigen::Index>(k)) = std::polar(1.0, phase);
    }
  }
  return SynthesisSystem(grid, std::move(m), std::vector<double>(lam.begin(), lam.end()));
}

PointSet dft_lattice(const Grid& grid) {
  if (grid.domain().intervals().size() != 1) throw InputError("framecore: dft_lattice needs a single interval");
  const double len = grid.domain().measure();
  const auto n = static_cast<long>(grid.size());
  std::vector<double> freq;
  freq.reserve(static_cast<std::size_t>(n));
  for (long m = -n / 2; m < n - n / 2; ++m) freq.push_back(static_cast<double>(m) / len);
  const double half = 0.5 / len;
  return PointSet::line(std::move(freq), static_cast<double>(-n / 2) / len - half,
                        static_cast<double>(n - n / 2 - 1) / len + half);
}

Eigen::MatrixXcd gram(const SynthesisSystem& sys) {
  const Eigen::MatrixXcd t = sys.weighted();
  // G[j,k] = <psi_k, psi_j> = sum_i w_i psi_k(t_i) conj(psi_j(t_i)).
  return t.adjoint() * t;
}

std::vector<cplx> analysis(const SynthesisSystem& sys, const SampledFunction& f) {
  require_grid(sys, f);
  Eigen::VectorXcd wf = to_vector(f.values);
  for (std::size_t i = 0; i < sys.dim_space(); ++i) wf[static_cast<Eigen::Index>(i)] *= sys.grid()->weights()[i];
  return to_std(sys.values().adjoint() * wf);
}

SampledFunction synthesize(const SynthesisSystem& sys, const std::vector<cplx>& coeffs) {
  if (coeffs.size() != sys.size()) throw InputError("framecore: coefficient count differs from member count");
  return SampledFunction(sys.grid(), to_std(sys.values() * to_vector(coeffs)));
}

SampledFunction frame_operator_apply(const SynthesisSystem& sys, const SampledFunction& f) {
  return synthesize(sys, analysis(sys, f));
}

FrameReport measure_bounds(const SynthesisSystem& sys, const MeasureOptions& opts) {
  if (!(opts.rank_tol > 0.0)) throw InputError("framecore: rank_tol must be positive");
  const Eigen::MatrixXcd t = sys.weighted();
  const std::size_t n = sys.dim_space();
  const std::size_t k = sys.size();
  const bool use_s = n <= k;

  const Eigen::VectorXd ev = use_s ? hermitian_eigenvalues(t * t.adjoint(), "frame operator")
                                   : hermitian_eigenvalues(t.adjoint() * t, "Gram");

  FrameReport rep;
  rep.rank_tol = opts.rank_tol;
  rep.dim_space = n;
  rep.members = k;
  rep.resolution = {n, sys.grid()->max_step(), sys.grid()->domain().measure()};
  rep.spectrum.resize(static_cast<std::size_t>(ev.size()));
  for (Eigen::Index i = 0; i < ev.size(); ++i) rep.spectrum[static_cast<std::size_t>(i)] = std::max(0.0, ev[i]);

  rep.upper = rep.spectrum.back();
  const double threshold = opts.rank_tol * rep.upper;
  for (double v : rep.spectrum) {
    if (rep.upper > 0.0 && v > threshold) {
      if (rep.rank == 0) rep.lower = v;
      ++rep.rank;
    }
  }
  rep.min_eigenvalue = use_s ? rep.spectrum.front() : 0.0;
  rep.gram_upper = rep.upper;
  rep.gram_lower = use_s && n < k ? 0.0 : rep.spectrum.front();

  rep.flags.bessel = opts.bessel_bound ? rep.upper <= *opts.bessel_bound : true;
  rep.flags.frame_sequence = rep.rank > 0;
  rep.flags.frame_for_whole_space = rep.rank == n;
  rep.flags.riesz_sequence = rep.rank == k;
  rep.flags.tight = rep.flags.frame_sequence && (rep.upper - rep.lower) <= 1e-8 * rep.upper;

  if (std::max(n, k) <= opts.cross_check_limit) {
    const Eigen::VectorXd other = use_s ? hermitian_eigenvalues(t.adjoint() * t, "Gram")
                                        : hermitian_eigenvalues(t * t.adjoint(), "frame operator");
    double err = 0.0;
    for (std::size_t j = 0; j < rep.rank; ++j) {
      const double a = rep.spectrum[rep.spectrum.size() - 1 - j];
      const double b = std::max(0.0, other[other.size() - 1 - static_cast<Eigen::Index>(j)]);
      err = std::max(err, std::abs(a - b) / rep.upper);
    }
    rep.cross_check = err;
  }
  return rep;
}

Reconstruction reconstruct(const SynthesisSystem& sys, const SampledFunction& f, const ReconstructOptions& opts) {
  require_grid(sys, f);
  if (!(opts.tol > 0.0)) throw InputError("framecore: reconstruction tolerance must be positive");
  const Eigen::MatrixXcd t = sys.weighted();
  const Eigen::VectorXd sw = sqrt_weights(*sys.grid());
  const Eigen::VectorXcd b = sw.cwiseProduct(to_vector(f.values));
  const double bnorm = b.norm();

  Reconstruction out;
  if (bnorm == 0.0) {
    out.coeffs.assign(sys.size(), 0.0);
    return out;
  }

  auto apply_s = [&](const Eigen::VectorXcd& x) -> Eigen::VectorXcd { return t * (t.adjoint() * x); };

  Eigen::VectorXcd x = Eigen::VectorXcd::Zero(b.size());
  Eigen::VectorXcd r = b;
  Eigen::VectorXcd p = r;
  double rr = r.squaredNorm();
  double best = 1.0;
  Eigen::VectorXcd best_x = x;
  std::size_t since_improvement = 0;
  const std::size_t stall_window = static_cast<std::size_t>(b.size()) + 10;

  for (std::size_t it = 1; it <= opts.max_iter; ++it) {
    const Eigen::VectorXcd sp = apply_s(p);
    const double psp = p.dot(sp).real();
    if (!(psp > 0.0)) break;
    const double alpha = rr / psp;
    x += alpha * p;
    r -= alpha * sp;
    double rr_new = r.squaredNorm();
    double rel = std::sqrt(rr_new) / bnorm;
    if (rel <= opts.tol) {
      // Guard against drift of the recursive residual.
      r = b - apply_s(x);
      rr_new = r.squaredNorm();
      rel = std::sqrt(rr_new) / bnorm;
      p = r;
    } else {
      p = r + (rr_new / rr) * p;
    }
    rr = rr_new;
    out.history.push_back(rel);
    out.iterations = it;
    if (rel < best * (1.0 - 1e-3)) {
      since_improvement = 0;
    } else {
      ++since_improvement;
    }
    if (rel < best) {
      best = rel;
      best_x = x;
    }
    if (rel <= opts.tol) break;
    if (since_improvement > stall_window) break;
  }

  const Eigen::VectorXcd coeffs = t.adjoint() * best_x;
  const double residual = (t * coeffs - b).norm() / bnorm;
  if (residual > opts.tol) {
    // Distinguish "outside the span" from slow convergence by the exact
    // least-squares distance of f to the range of the synthesis operator.
    const Eigen::VectorXcd ls = t.completeOrthogonalDecomposition().solve(b);
    const double ls_residual = (t * ls - b).norm() / bnorm;
    if (ls_residual > opts.tol) {
      throw ReconstructionError("framecore: not in span (least-squares residual " + std::to_string(ls_residual) + ")",
                                residual, true);
    }
    throw ReconstructionError("framecore: conjugate gradients did not converge in " +
                                  std::to_string(out.iterations) + " iterations (best residual " +
                                  std::to_string(residual) + ")",
                              residual, false);
  }
  out.coeffs = to_std(coeffs);
  out.residual = residual;
  return out;
}

}  // namespace framelab
