#pragma once

// Bounded sets E in R as finite unions of closed intervals, the
// delta-dilation E_delta, and midpoint-rule grids that define the discretized
// inner product of L^2(E).

#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <vector>

namespace framelab {

using cplx = std::complex<double>;

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double length() const { return hi - lo; }
  bool contains(double x) const { return x >= lo && x <= hi; }
  bool operator==(const Interval&) const = default;
};

/// Finite disjoint union of closed intervals, sorted ascending.
class Domain {
 public:
  /// Validates: every interval has lo < hi; intervals are pairwise disjoint.
  /// Input order does not matter.
  explicit Domain(std::vector<Interval> intervals);

  const std::vector<Interval>& intervals() const { return intervals_; }
  double measure() const { return measure_; }
  double centre() const { return 0.5 * (intervals_.front().lo + intervals_.back().hi); }
  double radius() const { return 0.5 * (intervals_.back().hi - intervals_.front().lo); }
  bool contains(double x) const;
  /// True when every interval of `other` lies inside some interval of *this.
  bool covers(const Domain& other) const;

  bool operator==(const Domain&) const = default;

 private:
  std::vector<Interval> intervals_;
  double measure_ = 0.0;
};

/// Union of [a_i - delta, b_i + delta], merging intervals that touch or overlap.
Domain dilate(const Domain& dom, double delta);

/// Midpoint-rule quadrature over a Domain: each interval is split into equal
/// cells, nodes sit at cell centres, weights equal the cell width.
class Grid {
 public:
  Grid(Domain domain, std::vector<std::size_t> cells_per_interval);

  /// Grid with explicit nodes; used for sub-grids that must reproduce the
  /// parent's node coordinates bit for bit.
  static Grid from_nodes(Domain domain, std::vector<double> nodes, std::vector<double> steps,
                         std::vector<std::size_t> owner);

  const Domain& domain() const { return domain_; }
  std::size_t size() const { return nodes_.size(); }
  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }
  /// Cell width in each interval of the domain.
  const std::vector<double>& steps() const { return steps_; }
  /// Index of the domain interval holding node i.
  std::size_t interval_of(std::size_t i) const { return owner_[i]; }
  double max_step() const;

  bool operator==(const Grid& other) const;

 private:
  Grid() : domain_({Interval{0.0, 1.0}}) {}

  Domain domain_;
  std::vector<double> nodes_;
  std::vector<double> weights_;
  std::vector<double> steps_;
  std::vector<std::size_t> owner_;
};

using GridPtr = std::shared_ptr<const Grid>;

/// Each interval [a,b] gets ceil((b - a) * n_per_unit) equal cells.
/// Requires n_per_unit >= 8.
GridPtr make_grid(const Domain& dom, int n_per_unit);

/// True when both pointers name the same grid or the grids are equal.
bool same_grid(const GridPtr& a, const GridPtr& b);

/// Complex values at the nodes of a grid.
struct SampledFunction {
  GridPtr grid;
  std::vector<cplx> values;

  SampledFunction() = default;
  SampledFunction(GridPtr g, std::vector<cplx> v);

  std::size_t size() const { return values.size(); }
};

SampledFunction sample(const GridPtr& grid, const std::function<cplx(double)>& fn);
SampledFunction constant(const GridPtr& grid, cplx value);
SampledFunction indicator(const GridPtr& grid, const Domain& sub);

/// sum_i w_i f_i conj(h_i).
cplx inner(const Grid& g, const SampledFunction& f, const SampledFunction& h);
double norm_sq(const SampledFunction& f);

/// Sub-grid of the nodes of `grid` that lie in `sub`. Its domain is the union
/// of the selected cells, which agrees with `sub` up to one cell per endpoint.
struct GridRestriction {
  GridPtr grid;
  std::vector<std::size_t> indices;
};

GridRestriction restrict_grid(const GridPtr& grid, const Domain& sub);
SampledFunction restrict_function(const SampledFunction& f, const GridRestriction& r);
/// Zero-extension of a function on the restricted grid back to the parent.
SampledFunction extend_function(const SampledFunction& f, const GridRestriction& r,
                                const GridPtr& parent);

}  // namespace framelab
