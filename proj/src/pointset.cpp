#include "framelab/pointset.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "framelab/errors.hpp"

namespace framelab {

namespace {

double distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double d = a[j] - b[j];
    s += d * d;
  }
  return std::sqrt(s);
}

// Visits every point of the lattice lo + k*h (per axis, last node clamped to
// hi) inside the box [lo, hi].
template <typename Fn>
void scan_box(const std::vector<std::pair<double, double>>& sides, double h, Fn&& visit) {
  const std::size_t d = sides.size();
  std::vector<std::size_t> counts(d);
  for (std::size_t j = 0; j < d; ++j) {
    const double len = sides[j].second - sides[j].first;
    counts[j] = static_cast<std::size_t>(std::ceil(len / h)) + 1;
  }
  std::vector<std::size_t> idx(d, 0);
  std::vector<double> x(d);
  while (true) {
    for (std::size_t j = 0; j < d; ++j) {
      const double v = sides[j].first + static_cast<double>(idx[j]) * h;
      x[j] = std::min(v, sides[j].second);
    }
    visit(std::span<const double>(x));
    std::size_t j = 0;
    while (j < d) {
      if (++idx[j] < counts[j]) break;
      idx[j] = 0;
      ++j;
    }
    if (j == d) break;
  }
}

double scan_spacing(const PointSet& ps) {
  const double side = ps.box().shortest_side();
  double h = side / 64.0;
  if (ps.size() >= 2) h = std::min(h, separation(ps) / 4.0);
  if (!(h > 0.0)) h = 1.0;
  return h;
}

std::size_t count_in_window_1d(std::span<const double> v, double left, double right) {
  const auto lo = std::lower_bound(v.begin(), v.end(), left);
  const auto hi = std::upper_bound(v.begin(), v.end(), right);
  return hi > lo ? static_cast<std::size_t>(hi - lo) : 0;
}

std::pair<std::size_t, std::size_t> window_extrema_1d(const PointSet& ps, double r) {
  const auto v = ps.values();
  const double lo = ps.box().sides[0].first;
  const double x_max = ps.box().sides[0].second - 2.0 * r;
  // Windows [x, x + 2r], x in [lo, x_max]. The count is piecewise constant in x
  // with breakpoints where an end of the window meets a point.
  std::vector<double> cand{lo, x_max};
  for (double p : v) {
    if (p >= lo && p <= x_max) cand.push_back(p);
    const double q = p - 2.0 * r;
    if (q >= lo && q <= x_max) cand.push_back(q);
  }
  std::sort(cand.begin(), cand.end());
  cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
  std::size_t nmin = std::numeric_limits<std::size_t>::max();
  std::size_t nmax = 0;
  auto eval = [&](double x) {
    const std::size_t c = count_in_window_1d(v, x, x + 2.0 * r);
    nmin = std::min(nmin, c);
    nmax = std::max(nmax, c);
  };
  for (std::size_t i = 0; i < cand.size(); ++i) {
    eval(cand[i]);
    if (i + 1 < cand.size()) eval(0.5 * (cand[i] + cand[i + 1]));
  }
  return {nmin, nmax};
}

std::pair<std::size_t, std::size_t> window_extrema_scan(const PointSet& ps, double r, double h) {
  std::vector<std::pair<double, double>> centres;
  for (const auto& [l, u] : ps.box().sides) centres.emplace_back(l + r, u - r);
  std::size_t nmin = std::numeric_limits<std::size_t>::max();
  std::size_t nmax = 0;
  const std::size_t d = ps.dim();
  scan_box(centres, h, [&](std::span<const double> y) {
    std::size_t c = 0;
    for (std::size_t k = 0; k < ps.size(); ++k) {
      const auto p = ps.point(k);
      bool inside = true;
      for (std::size_t j = 0; j < d && inside; ++j) inside = std::abs(p[j] - y[j]) <= r;
      if (inside) ++c;
    }
    nmin = std::min(nmin, c);
    nmax = std::max(nmax, c);
  });
  return {nmin, nmax};
}

}  // namespace

double Box::shortest_side() const {
  double s = std::numeric_limits<double>::infinity();
  for (const auto& [l, u] : sides) s = std::min(s, u - l);
  return s;
}

bool Box::contains(std::span<const double> x) const {
  for (std::size_t j = 0; j < sides.size(); ++j) {
    if (x[j] < sides[j].first || x[j] > sides[j].second) return false;
  }
  return true;
}

PointSet::PointSet(std::size_t dim, std::vector<double> coords, Box box)
    : dim_(dim), coords_(std::move(coords)), box_(std::move(box)) {
  if (dim_ == 0) throw InputError("pointset: dimension must be positive");
  if (coords_.size() % dim_ != 0) throw InputError("pointset: coordinate count not a multiple of dim");
  if (box_.dim() != dim_) throw InputError("pointset: box dimension does not match point dimension");
  for (const auto& [l, u] : box_.sides) {
    if (!(l <= u)) throw InputError("pointset: box side has lo > hi");
  }
  for (double c : coords_) {
    if (!std::isfinite(c)) throw InputError("pointset: non-finite coordinate");
  }
  if (dim_ == 1) std::sort(coords_.begin(), coords_.end());
  for (std::size_t k = 0; k < size(); ++k) {
    if (!box_.contains(point(k))) {
      throw InputError("pointset: point " + std::to_string(k) + " lies outside the analysis box");
    }
  }
  if (dim_ == 1) {
    for (std::size_t k = 1; k < coords_.size(); ++k) {
      if (!(coords_[k] > coords_[k - 1])) throw InputError("pointset: points are not pairwise distinct");
    }
  } else if (size() >= 2 && !(separation(*this) > 0.0)) {
    throw InputError("pointset: points are not pairwise distinct");
  }
}

PointSet PointSet::line(std::vector<double> points, double lo, double hi) {
  return PointSet(1, std::move(points), Box{{{lo, hi}}});
}

std::span<const double> PointSet::values() const {
  if (dim_ != 1) throw InputError("pointset: values() requires dim == 1");
  return coords_;
}

PointSet PointSet::translated(std::span<const double> offset) const {
  if (offset.size() != dim_) throw InputError("pointset: offset dimension mismatch");
  std::vector<double> c = coords_;
  for (std::size_t k = 0; k < size(); ++k) {
    for (std::size_t j = 0; j < dim_; ++j) c[k * dim_ + j] += offset[j];
  }
  Box b = box_;
  for (std::size_t j = 0; j < dim_; ++j) {
    b.sides[j].first += offset[j];
    b.sides[j].second += offset[j];
  }
  return PointSet(dim_, std::move(c), std::move(b));
}

PointSet uniform_lattice(double start, std::size_t count, double step) {
  if (count == 0 || !(step > 0.0)) throw InputError("pointset: lattice needs count > 0 and step > 0");
  std::vector<double> v(count);
  for (std::size_t k = 0; k < count; ++k) v[k] = start + static_cast<double>(k) * step;
  const double hi = v.back() + 0.5 * step;
  return PointSet::line(std::move(v), start - 0.5 * step, hi);
}

PointSet jittered_lattice(double start, std::size_t count, double step, double amplitude,
                          std::uint64_t seed) {
  if (count == 0 || !(step > 0.0)) throw InputError("pointset: lattice needs count > 0 and step > 0");
  if (!(amplitude >= 0.0) || !(amplitude < 0.5 * step)) {
    throw InputError("pointset: jitter amplitude must lie in [0, step/2)");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jitter(-amplitude, amplitude);
  std::vector<double> v(count);
  for (std::size_t k = 0; k < count; ++k) v[k] = start + static_cast<double>(k) * step + jitter(rng);
  const double lo = start - 0.5 * step;
  const double hi = start + (static_cast<double>(count) - 0.5) * step;
  return PointSet::line(std::move(v), lo, hi);
}

double separation(const PointSet& ps) {
  if (ps.size() < 2) throw InputError("pointset: separation undefined for fewer than 2 points");
  if (ps.dim() == 1) {
    const auto v = ps.values();
    double s = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < v.size(); ++k) s = std::min(s, v[k] - v[k - 1]);
    return s;
  }
  double s = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < ps.size(); ++a) {
    for (std::size_t b = a + 1; b < ps.size(); ++b) s = std::min(s, distance(ps.point(a), ps.point(b)));
  }
  return s;
}

GapResult gap(const PointSet& ps) {
  if (ps.empty()) throw InputError("pointset: gap undefined for an empty set");
  if (ps.dim() == 1) {
    const auto v = ps.values();
    const auto [lo, hi] = ps.box().sides[0];
    double g = std::max(v.front() - lo, hi - v.back());
    for (std::size_t k = 1; k < v.size(); ++k) g = std::max(g, 0.5 * (v[k] - v[k - 1]));
    return {g, 0.0};
  }
  const double h = scan_spacing(ps);
  double g = 0.0;
  scan_box(ps.box().sides, h, [&](std::span<const double> x) {
    double nearest = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < ps.size(); ++k) nearest = std::min(nearest, distance(x, ps.point(k)));
    g = std::max(g, nearest);
  });
  return {g, h};
}

DensityReport beurling_density(const PointSet& ps, std::span<const double> r_values) {
  if (ps.empty()) throw InputError("pointset: density of an empty set");
  const double side = ps.box().shortest_side();
  const double d = static_cast<double>(ps.dim());
  DensityReport rep;
  const double h = ps.dim() == 1 ? 0.0 : scan_spacing(ps);
  rep.resolution = h;
  auto extrema = [&](double r) {
    return ps.dim() == 1 ? window_extrema_1d(ps, r) : window_extrema_scan(ps, r, h);
  };
  for (double r : r_values) {
    if (!(r > 0.0)) throw InputError("pointset: window half-width must be positive");
    if (2.0 * r > side) throw InputError("pointset: window exceeds analysis box");
    const auto [nmin, nmax] = extrema(r);
    const double vol = std::pow(2.0 * r, d);
    rep.r_values.push_back(r);
    rep.nu_minus.push_back(nmin);
    rep.nu_plus.push_back(nmax);
    rep.d_minus.push_back(static_cast<double>(nmin) / vol);
    rep.d_plus.push_back(static_cast<double>(nmax) / vol);
  }
  if (side > 0.0) {
    const double r = 0.5 * side;
    const auto [nmin, nmax] = extrema(r);
    const double vol = std::pow(side, d);
    rep.extrapolated = DensityReport::Limit{r, static_cast<double>(nmin) / vol,
                                            static_cast<double>(nmax) / vol};
  }
  return rep;
}

BeurlingLinePrediction beurling_1d_frame_predicate(const PointSet& ps, double a, double r) {
  if (ps.dim() != 1) throw InputError("pointset: the interval predicate requires dim == 1");
  if (!(a > 0.0)) throw InputError("pointset: interval length a must be positive");
  const double rs[] = {r};
  const auto rep = beurling_density(ps, rs);
  BeurlingLinePrediction out;
  out.d_minus = rep.d_minus[0];
  out.margin = out.d_minus - a;
  out.predicted_frame = a < out.d_minus;
  return out;
}

BeurlingBallPrediction beurling_ball_frame_predicate(const PointSet& ps, double r_ball) {
  if (!(r_ball > 0.0)) throw InputError("pointset: ball radius must be positive");
  BeurlingBallPrediction out;
  out.gap = gap(ps).value;
  out.product = r_ball * out.gap;
  out.predicted_frame = out.product < 0.25;
  return out;
}

PointSet densify(const PointSet& ps, double target_gap, double sep_min) {
  if (ps.dim() != 1) throw InputError("pointset: densify requires dim == 1");
  if (!(target_gap > 0.0) || !(sep_min > 0.0)) {
    throw InputError("pointset: target_gap and sep_min must be positive");
  }
  if (sep_min > target_gap) throw InputError("pointset: densify infeasible, sep_min > target_gap");
  if (!ps.empty() && gap(ps).value <= target_gap) return ps;

  const auto [lo, hi] = ps.box().sides[0];
  std::vector<double> pts(ps.values().begin(), ps.values().end());

  // Lattice infill, anchored at both box ends so the end distances are covered.
  const double len = hi - lo;
  const std::size_t cells = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(len / target_gap)));
  const double step = len / static_cast<double>(cells);
  for (std::size_t i = 0; i <= cells; ++i) {
    const double x = i == cells ? hi : lo + static_cast<double>(i) * step;
    const auto it = std::lower_bound(pts.begin(), pts.end(), x);
    double nearest = std::numeric_limits<double>::infinity();
    if (it != pts.end()) nearest = std::min(nearest, *it - x);
    if (it != pts.begin()) nearest = std::min(nearest, x - *std::prev(it));
    if (nearest >= sep_min) pts.insert(it, x);
  }

  // With sep_min > target_gap/2 the infill can leave consecutive distances in
  // (2*target_gap, target_gap + 2*sep_min]; split those evenly. The new spacing
  // is at least target_gap >= sep_min.
  std::vector<double> out;
  out.reserve(pts.size());
  for (std::size_t k = 0; k < pts.size(); ++k) {
    if (k > 0) {
      const double a = pts[k - 1];
      const double gap_len = pts[k] - a;
      if (gap_len > 2.0 * target_gap) {
        const auto pieces = static_cast<std::size_t>(std::ceil(gap_len / (2.0 * target_gap)));
        for (std::size_t m = 1; m < pieces; ++m) {
          out.push_back(a + gap_len * static_cast<double>(m) / static_cast<double>(pieces));
        }
      }
    }
    out.push_back(pts[k]);
  }
  return PointSet::line(std::move(out), lo, hi);
}

}  // namespace framelab
