#include "framelab/domain.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "framelab/errors.hpp"

namespace framelab {

Domain::Domain(std::vector<Interval> intervals) : intervals_(std::move(intervals)) {
  if (intervals_.empty()) throw InputError("domain: at least one interval is required");
  std::sort(intervals_.begin(), intervals_.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  for (std::size_t i = 0; i < intervals_.size(); ++i) {
    const auto& iv = intervals_[i];
    if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi) || !(iv.lo < iv.hi)) {
      throw InputError("domain: interval " + std::to_string(i) + " is degenerate");
    }
    if (i > 0 && !(intervals_[i - 1].hi < iv.lo)) {
      throw InputError("domain: intervals overlap or touch");
    }
    measure_ += iv.length();
  }
}

bool Domain::contains(double x) const {
  auto it = std::upper_bound(intervals_.begin(), intervals_.end(), x,
                             [](double v, const Interval& iv) { return v < iv.lo; });
  if (it == intervals_.begin()) return false;
  return std::prev(it)->contains(x);
}

bool Domain::covers(const Domain& other) const {
  for (const auto& o : other.intervals()) {
    const bool inside = std::any_of(intervals_.begin(), intervals_.end(), [&](const Interval& iv) {
      return iv.lo <= o.lo && o.hi <= iv.hi;
    });
    if (!inside) return false;
  }
  return true;
}

Domain dilate(const Domain& dom, double delta) {
  if (!(delta > 0.0)) throw InputError("domain: dilation delta must be positive");
  std::vector<Interval> merged;
  for (const auto& iv : dom.intervals()) {
    Interval grown{iv.lo - delta, iv.hi + delta};
    if (!merged.empty() && grown.lo <= merged.back().hi) {
      merged.back().hi = std::max(merged.back().hi, grown.hi);
    } else {
      merged.push_back(grown);
    }
  }
  return Domain(std::move(merged));
}

Grid::Grid(Domain domain, std::vector<std::size_t> cells_per_interval) : domain_(std::move(domain)) {
  const auto& ivs = domain_.intervals();
  if (cells_per_interval.size() != ivs.size()) {
    throw InputError("grid: one cell count per interval is required");
  }
  for (std::size_t j = 0; j < ivs.size(); ++j) {
    const std::size_t cells = cells_per_interval[j];
    if (cells == 0) throw InputError("grid: interval with zero cells");
    const double step = ivs[j].length() / static_cast<double>(cells);
    steps_.push_back(step);
    for (std::size_t c = 0; c < cells; ++c) {
      nodes_.push_back(ivs[j].lo + (static_cast<double>(c) + 0.5) * step);
      weights_.push_back(step);
      owner_.push_back(j);
    }
  }
}

Grid Grid::from_nodes(Domain domain, std::vector<double> nodes, std::vector<double> steps,
                      std::vector<std::size_t> owner) {
  if (nodes.size() != owner.size()) throw InputError("grid: node/owner size mismatch");
  if (steps.size() != domain.intervals().size()) throw InputError("grid: one step per interval is required");
  Grid g;
  g.domain_ = std::move(domain);
  g.nodes_ = std::move(nodes);
  g.steps_ = std::move(steps);
  g.owner_ = std::move(owner);
  g.weights_.reserve(g.nodes_.size());
  for (std::size_t i = 0; i < g.nodes_.size(); ++i) {
    if (g.owner_[i] >= g.steps_.size()) throw InputError("grid: node owner out of range");
    if (i > 0 && !(g.nodes_[i] > g.nodes_[i - 1])) throw InputError("grid: nodes must increase strictly");
    g.weights_.push_back(g.steps_[g.owner_[i]]);
  }
  return g;
}

double Grid::max_step() const { return *std::max_element(steps_.begin(), steps_.end()); }

bool Grid::operator==(const Grid& other) const {
  return domain_ == other.domain_ && nodes_ == other.nodes_ && weights_ == other.weights_;
}

GridPtr make_grid(const Domain& dom, int n_per_unit) {
  if (n_per_unit < 8) throw InputError("grid: n_per_unit must be at least 8");
  std::vector<std::size_t> cells;
  for (const auto& iv : dom.intervals()) {
    // The relative guard keeps exact products such as 0.9 * 320 from rounding up.
    const double exact = iv.length() * static_cast<double>(n_per_unit);
    cells.push_back(std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(exact * (1.0 - 1e-12)))));
  }
  return std::make_shared<const Grid>(dom, std::move(cells));
}

bool same_grid(const GridPtr& a, const GridPtr& b) {
  if (!a || !b) return false;
  return a == b || *a == *b;
}

SampledFunction::SampledFunction(GridPtr g, std::vector<cplx> v) : grid(std::move(g)), values(std::move(v)) {
  if (!grid) throw InputError("sampled function: null grid");
  if (values.size() != grid->size()) throw InputError("sampled function: value count differs from grid size");
}

SampledFunction sample(const GridPtr& grid, const std::function<cplx(double)>& fn) {
  std::vector<cplx> v(grid->size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = fn(grid->nodes()[i]);
  return SampledFunction(grid, std::move(v));
}

SampledFunction constant(const GridPtr& grid, cplx value) {
  return SampledFunction(grid, std::vector<cplx>(grid->size(), value));
}

SampledFunction indicator(const GridPtr& grid, const Domain& sub) {
  return sample(grid, [&](double t) { return sub.contains(t) ? cplx(1.0) : cplx(0.0); });
}

cplx inner(const Grid& g, const SampledFunction& f, const SampledFunction& h) {
  if (!f.grid || !h.grid || !(*f.grid == g) || !(*h.grid == g)) {
    throw InputError("inner: functions are not sampled on the given grid");
  }
  cplx s = 0.0;
  const auto& w = g.weights();
  for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * f.values[i] * std::conj(h.values[i]);
  return s;
}

double norm_sq(const SampledFunction& f) {
  double s = 0.0;
  const auto& w = f.grid->weights();
  for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * std::norm(f.values[i]);
  return s;
}

GridRestriction restrict_grid(const GridPtr& grid, const Domain& sub) {
  GridRestriction out;
  std::vector<double> nodes;
  std::vector<Interval> runs;
  std::vector<double> steps;
  std::vector<std::size_t> owner;
  std::size_t prev = 0;
  for (std::size_t i = 0; i < grid->size(); ++i) {
    const double t = grid->nodes()[i];
    if (!sub.contains(t)) continue;
    const std::size_t parent = grid->interval_of(i);
    const double half = 0.5 * grid->steps()[parent];
    const bool extends = !out.indices.empty() && prev + 1 == i && grid->interval_of(prev) == parent;
    if (extends) {
      runs.back().hi = t + half;
    } else {
      runs.push_back({t - half, t + half});
      steps.push_back(grid->steps()[parent]);
    }
    out.indices.push_back(i);
    nodes.push_back(t);
    owner.push_back(runs.size() - 1);
    prev = i;
  }
  if (out.indices.empty()) throw InputError("grid: restriction selects no nodes");
  out.grid = std::make_shared<const Grid>(
      Grid::from_nodes(Domain(std::move(runs)), std::move(nodes), std::move(steps), std::move(owner)));
  return out;
}

SampledFunction restrict_function(const SampledFunction& f, const GridRestriction& r) {
  std::vector<cplx> v(r.indices.size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = f.values.at(r.indices[k]);
  return SampledFunction(r.grid, std::move(v));
}

SampledFunction extend_function(const SampledFunction& f, const GridRestriction& r, const GridPtr& parent) {
  if (!same_grid(f.grid, r.grid)) throw InputError("grid: function is not on the restricted grid");
  std::vector<cplx> v(parent->size(), 0.0);
  for (std::size_t k = 0; k < r.indices.size(); ++k) v.at(r.indices[k]) = f.values[k];
  return SampledFunction(parent, std::move(v));
}

}  // namespace framelab
