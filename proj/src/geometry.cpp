#include "dynabs/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "dynabs/error.hpp"

namespace dynabs {

namespace {

void require_same_dim(const Box& a, const Box& b) {
  if (a.dim() != b.dim())
    throw DimensionMismatch("box dimensions differ: " + std::to_string(a.dim()) + " vs " +
                            std::to_string(b.dim()));
}

}  // namespace

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

Box::Box(Point lo, Point hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
  if (lo_.size() != hi_.size()) throw std::invalid_argument("Box: lo and hi differ in dimension");
  for (std::size_t i = 0; i < lo_.size(); ++i) {
    if (!std::isfinite(lo_[i]) || !std::isfinite(hi_[i]))
      throw std::invalid_argument("Box: non-finite coordinate");
    if (lo_[i] > hi_[i]) throw std::invalid_argument("Box: lo > hi on axis " + std::to_string(i));
  }
}

Box Box::point(std::span<const double> p) { return Box(Point(p.begin(), p.end()), Point(p.begin(), p.end())); }

Point Box::center() const {
  Point c(dim());
  for (std::size_t i = 0; i < dim(); ++i) c[i] = 0.5 * (lo_[i] + hi_[i]);
  return c;
}

bool Box::contains(std::span<const double> p) const {
  for (std::size_t i = 0; i < dim(); ++i)
    if (p[i] < lo_[i] || p[i] > hi_[i]) return false;
  return true;
}

bool Box::contains(const Box& o) const {
  require_same_dim(*this, o);
  for (std::size_t i = 0; i < dim(); ++i)
    if (o.lo_[i] < lo_[i] || o.hi_[i] > hi_[i]) return false;
  return true;
}

bool Box::intersects(const Box& o) const {
  require_same_dim(*this, o);
  for (std::size_t i = 0; i < dim(); ++i)
    if (o.hi_[i] < lo_[i] || o.lo_[i] > hi_[i]) return false;
  return true;
}

double box_dia(const Box& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < b.dim(); ++i) s += b.width(i) * b.width(i);
  return std::sqrt(s);
}

double box_hausdorff_directed(const Box& a, const Box& b) {
  require_same_dim(a, b);
  double s = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    auto gap = [&](double x) { return std::max({b.lo(i) - x, 0.0, x - b.hi(i)}); };
    double g = std::max(gap(a.lo(i)), gap(a.hi(i)));
    s += g * g;
  }
  return std::sqrt(s);
}

double box_separation(const Box& a, const Box& b) {
  require_same_dim(a, b);
  double s = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    double g = std::max({b.lo(i) - a.hi(i), 0.0, a.lo(i) - b.hi(i)});
    s += g * g;
  }
  return std::sqrt(s);
}

double box_maxdist(const Box& a, const Box& b) {
  require_same_dim(a, b);
  double s = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    double g = std::max(std::abs(a.lo(i) - b.hi(i)), std::abs(a.hi(i) - b.lo(i)));
    s += g * g;
  }
  return std::sqrt(s);
}

Box box_expand(const Box& b, double r) {
  if (!std::isfinite(r)) throw std::invalid_argument("box_expand: non-finite radius");
  Point lo = b.lo();
  Point hi = b.hi();
  for (std::size_t i = 0; i < b.dim(); ++i) {
    lo[i] -= r;
    hi[i] += r;
  }
  return Box(std::move(lo), std::move(hi));
}

Box box_hull(const Box& a, const Box& b) {
  require_same_dim(a, b);
  Point lo(a.dim()), hi(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) {
    lo[i] = std::min(a.lo(i), b.lo(i));
    hi[i] = std::max(a.hi(i), b.hi(i));
  }
  return Box(std::move(lo), std::move(hi));
}

Box box_hull(std::span<const double> p, std::span<const double> q) {
  Point lo(p.size()), hi(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    lo[i] = std::min(p[i], q[i]);
    hi[i] = std::max(p[i], q[i]);
  }
  return Box(std::move(lo), std::move(hi));
}

bool box_intersect(const Box& a, const Box& b, Box& out) {
  require_same_dim(a, b);
  Point lo(a.dim()), hi(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) {
    lo[i] = std::max(a.lo(i), b.lo(i));
    hi[i] = std::min(a.hi(i), b.hi(i));
    if (lo[i] > hi[i]) return false;
  }
  out = Box(std::move(lo), std::move(hi));
  return true;
}

namespace {

std::vector<std::size_t> cells_per_axis(const Box& b, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("partition: delta must be positive");
  std::vector<std::size_t> counts(b.dim());
  for (std::size_t i = 0; i < b.dim(); ++i) {
    double k = std::ceil(b.width(i) / (2.0 * delta));
    counts[i] = std::max<std::size_t>(1, static_cast<std::size_t>(k));
  }
  return counts;
}

template <class Fn>
void for_each_multi_index(const std::vector<std::size_t>& counts, Fn&& fn) {
  std::vector<std::size_t> idx(counts.size(), 0);
  for (;;) {
    fn(idx);
    std::size_t axis = 0;
    while (axis < counts.size() && ++idx[axis] == counts[axis]) idx[axis++] = 0;
    if (axis == counts.size()) return;
  }
}

}  // namespace

std::vector<Box> partition_cells(const Box& b, double delta) {
  auto counts = cells_per_axis(b, delta);
  std::vector<Box> cells;
  for_each_multi_index(counts, [&](const std::vector<std::size_t>& idx) {
    Point lo(b.dim()), hi(b.dim());
    for (std::size_t i = 0; i < b.dim(); ++i) {
      double w = b.width(i) / static_cast<double>(counts[i]);
      lo[i] = b.lo(i) + w * static_cast<double>(idx[i]);
      hi[i] = idx[i] + 1 == counts[i] ? b.hi(i) : b.lo(i) + w * static_cast<double>(idx[i] + 1);
    }
    cells.emplace_back(std::move(lo), std::move(hi));
  });
  return cells;
}

std::vector<Point> partition(const Box& b, double delta) {
  auto cells = partition_cells(b, delta);
  std::vector<Point> centers;
  centers.reserve(cells.size());
  for (const auto& c : cells) centers.push_back(c.center());
  return centers;
}

// ---------------------------------------------------------------------------

GridSet::GridSet(GridSpec spec) : spec_(std::move(spec)) {
  if (!(spec_.cell > 0.0) || !std::isfinite(spec_.cell))
    throw std::invalid_argument("GridSet: cell width must be positive");
}

void GridSet::insert(CellIndex idx) {
  if (idx.size() != dim()) throw DimensionMismatch("GridSet: index dimension mismatch");
  cells_.insert(std::move(idx));
}

void GridSet::erase(const CellIndex& idx) { cells_.erase(idx); }

bool GridSet::contains_point(std::span<const double> p) const {
  if (p.size() != dim()) throw DimensionMismatch("GridSet: point dimension mismatch");
  // A point on a cell face belongs to every cell sharing the face.
  std::vector<std::int64_t> lo(dim()), hi(dim());
  for (std::size_t i = 0; i < dim(); ++i) {
    double u = (p[i] - spec_.origin[i]) / spec_.cell;
    double f = std::floor(u);
    lo[i] = static_cast<std::int64_t>(f);
    hi[i] = lo[i];
    if (u - f <= kBoundaryTolerance) lo[i] -= 1;
    if (f + 1.0 - u <= kBoundaryTolerance) hi[i] += 1;
  }
  CellIndex idx = lo;
  for (;;) {
    if (cells_.count(idx)) return true;
    std::size_t axis = 0;
    while (axis < dim() && ++idx[axis] > hi[axis]) idx[axis] = lo[axis], ++axis;
    if (axis == dim()) return false;
  }
}

void GridSet::add_box(const Box& b) {
  if (b.dim() != dim()) throw DimensionMismatch("GridSet: box dimension mismatch");
  std::vector<std::int64_t> lo(dim()), hi(dim());
  for (std::size_t i = 0; i < dim(); ++i) {
    double ul = (b.lo(i) - spec_.origin[i]) / spec_.cell;
    double uh = (b.hi(i) - spec_.origin[i]) / spec_.cell;
    lo[i] = static_cast<std::int64_t>(std::floor(ul + kBoundaryTolerance));
    hi[i] = std::max(lo[i], static_cast<std::int64_t>(std::ceil(uh - kBoundaryTolerance)) - 1);
  }
  CellIndex idx = lo;
  for (;;) {
    cells_.insert(idx);
    std::size_t axis = 0;
    while (axis < dim() && ++idx[axis] > hi[axis]) idx[axis] = lo[axis], ++axis;
    if (axis == dim()) return;
  }
}

Box GridSet::cell_box(const CellIndex& idx) const {
  Point lo(dim()), hi(dim());
  for (std::size_t i = 0; i < dim(); ++i) {
    lo[i] = spec_.origin[i] + spec_.cell * static_cast<double>(idx[i]);
    hi[i] = spec_.origin[i] + spec_.cell * static_cast<double>(idx[i] + 1);
  }
  return Box(std::move(lo), std::move(hi));
}

Point GridSet::cell_center(const CellIndex& idx) const {
  Point c(dim());
  for (std::size_t i = 0; i < dim(); ++i)
    c[i] = spec_.origin[i] + spec_.cell * (static_cast<double>(idx[i]) + 0.5);
  return c;
}

double GridSet::cell_volume() const { return std::pow(spec_.cell, static_cast<double>(dim())); }

GridSet GridSet::refined() const {
  GridSet out(GridSpec{spec_.origin, spec_.cell / 2.0});
  const std::size_t n = dim();
  for (const auto& idx : cells_) {
    for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
      CellIndex child(n);
      for (std::size_t i = 0; i < n; ++i) child[i] = 2 * idx[i] + ((mask >> i) & 1);
      out.cells_.insert(std::move(child));
    }
  }
  return out;
}

GridSet rasterize(const Box& b, const GridSpec& spec) {
  GridSet s(spec);
  s.add_box(b);
  return s;
}

namespace {

void require_same_grid(const GridSet& a, const GridSet& b) {
  if (!(a.spec() == b.spec())) throw std::invalid_argument("GridSet: mismatched grid parameters");
}

}  // namespace

GridSet grid_union(const GridSet& a, const GridSet& b) {
  require_same_grid(a, b);
  GridSet out = a;
  for (const auto& c : b.cells()) out.insert(c);
  return out;
}

GridSet grid_difference(const GridSet& a, const GridSet& b) {
  require_same_grid(a, b);
  GridSet out(a.spec());
  for (const auto& c : a.cells())
    if (!b.contains_cell(c)) out.insert(c);
  return out;
}

}  // namespace dynabs
