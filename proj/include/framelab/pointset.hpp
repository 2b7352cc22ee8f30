#pragma once

// Irregular node sets in R^d: separation, gap, Beurling window densities,
// the Beurling sufficient-condition frame predicates, and lattice infill.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace framelab {

/// Closed axis-aligned box [lo_1,hi_1] x ... x [lo_d,hi_d].
struct Box {
  std::vector<std::pair<double, double>> sides;

  std::size_t dim() const { return sides.size(); }
  double shortest_side() const;
  bool contains(std::span<const double> x) const;
};

/// Finite separated point set with an analysis box standing in for R^d.
///
/// Points are pairwise distinct and lie in the box. In one dimension they are
/// kept sorted ascending. Coordinates are stored row-major (point k occupies
/// coords[k*dim .. k*dim+dim)).
class PointSet {
 public:
  PointSet(std::size_t dim, std::vector<double> coords, Box box);

  /// One-dimensional convenience constructor.
  static PointSet line(std::vector<double> points, double lo, double hi);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return coords_.size() / dim_; }
  bool empty() const { return coords_.empty(); }
  const Box& box() const { return box_; }

  std::span<const double> point(std::size_t k) const {
    return {coords_.data() + k * dim_, dim_};
  }
  /// Sorted coordinates; only valid when dim() == 1.
  std::span<const double> values() const;
  const std::vector<double>& coords() const { return coords_; }

  /// Same points shifted by `offset` (box shifted as well).
  PointSet translated(std::span<const double> offset) const;

 private:
  std::size_t dim_;
  std::vector<double> coords_;
  Box box_;
};

/// {start + k*step : k = 0..count-1}, box [start - step/2, last + step/2].
PointSet uniform_lattice(double start, std::size_t count, double step = 1.0);

/// {start + k*step + eta_k}, eta_k uniform in [-amplitude, amplitude].
/// The box is [start - step/2, start + (count - 1/2)*step]. Requires
/// amplitude < step/2 so the result stays separated.
PointSet jittered_lattice(double start, std::size_t count, double step,
                          double amplitude, std::uint64_t seed);

/// Minimum Euclidean distance over distinct pairs.
double separation(const PointSet& ps);

struct GapResult {
  double value = 0.0;
  /// Scan spacing used in d >= 2; zero when the value is exact (d = 1).
  double resolution = 0.0;
};

/// sup over x in the box of the distance to the nearest point.
GapResult gap(const PointSet& ps);

struct DensityReport {
  std::vector<double> r_values;
  std::vector<std::size_t> nu_minus;
  std::vector<std::size_t> nu_plus;
  std::vector<double> d_minus;
  std::vector<double> d_plus;
  /// Scan spacing for window centres in d >= 2; zero when exact.
  double resolution = 0.0;

  struct Limit {
    double r = 0.0;
    double d_minus = 0.0;
    double d_plus = 0.0;
  };
  /// Values at the largest admissible window for the box.
  std::optional<Limit> extrapolated;
};

/// Minimal and maximal counts over windows y + [-r, r]^d contained in the box.
DensityReport beurling_density(const PointSet& ps, std::span<const double> r_values);

struct BeurlingLinePrediction {
  bool predicted_frame = false;
  double d_minus = 0.0;
  double margin = 0.0;
};

/// Sufficient condition for {e_lambda} to be a frame of L^2[-a/2, a/2]:
/// a < d_minus(r). A false result means "not predicted".
BeurlingLinePrediction beurling_1d_frame_predicate(const PointSet& ps, double a, double r);

struct BeurlingBallPrediction {
  bool predicted_frame = false;
  double gap = 0.0;
  double product = 0.0;
};

/// Sufficient condition for {e_lambda} to be a frame of L^2(B_r): r * gap < 1/4.
BeurlingBallPrediction beurling_ball_frame_predicate(const PointSet& ps, double r_ball);

/// Superset of `ps` (d = 1) over the same box with gap <= target_gap and
/// separation >= min(separation(ps), sep_min). Infill points come from a
/// lattice of spacing at most target_gap anchored at both box ends.
PointSet densify(const PointSet& ps, double target_gap, double sep_min);

}  // namespace framelab
