#pragma once

#include <cstddef>
#include <cstdint>
#include <set>
#include <span>
#include <vector>

namespace dynabs {

using Point = std::vector<double>;

double norm2(std::span<const double> v);
double distance(std::span<const double> a, std::span<const double> b);

// Compact axis-aligned box [lo, hi]. Degenerate (point) boxes are allowed.
class Box {
 public:
  Box() = default;
  Box(Point lo, Point hi);
  static Box point(std::span<const double> p);

  std::size_t dim() const { return lo_.size(); }
  const Point& lo() const { return lo_; }
  const Point& hi() const { return hi_; }
  double lo(std::size_t i) const { return lo_[i]; }
  double hi(std::size_t i) const { return hi_[i]; }
  double width(std::size_t i) const { return hi_[i] - lo_[i]; }
  Point center() const;

  bool contains(std::span<const double> p) const;
  bool contains(const Box& other) const;
  bool intersects(const Box& other) const;

  friend bool operator==(const Box&, const Box&) = default;

 private:
  Point lo_;
  Point hi_;
};

// Length of the diagonal, which is the diameter of the box in the l2 norm.
double box_dia(const Box& b);

// sup over p in a of dist(p, b). The squared point-to-box distance is a sum of
// per-axis convex terms, so the supremum over the corners of `a` splits into
// an independent choice of the worse endpoint on each axis.
double box_hausdorff_directed(const Box& a, const Box& b);

// inf over p in a, q in b of |p - q|.
double box_separation(const Box& a, const Box& b);

// sup over p in a, q in b of |p - q|.
double box_maxdist(const Box& a, const Box& b);

Box box_expand(const Box& b, double r);
Box box_hull(const Box& a, const Box& b);
Box box_hull(std::span<const double> p, std::span<const double> q);
// Writes the intersection to `out`; false when the boxes do not meet.
bool box_intersect(const Box& a, const Box& b, Box& out);

// Centers of a uniform grid over `b` whose closed l-infinity balls of radius
// `delta` cover `b`: ceil(width / (2 delta)) cells per axis (at least one).
std::vector<Point> partition(const Box& b, double delta);
// The cells of the same grid, one per returned center.
std::vector<Box> partition_cells(const Box& b, double delta);

// ---------------------------------------------------------------------------

using CellIndex = std::vector<std::int64_t>;

struct GridSpec {
  Point origin;
  double cell = 1.0;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

// Finite union of closed cells [origin + i*cell, origin + (i+1)*cell] on a
// uniform lattice. Set algebra is exact on cells.
class GridSet {
 public:
  GridSet() = default;
  explicit GridSet(GridSpec spec);

  // Box contact with a cell boundary closer than this fraction of the cell
  // width is treated as round-off and does not pull in the neighbor cell.
  static constexpr double kBoundaryTolerance = 1e-9;

  const GridSpec& spec() const { return spec_; }
  std::size_t dim() const { return spec_.origin.size(); }
  std::size_t size() const { return cells_.size(); }
  bool empty() const { return cells_.empty(); }
  const std::set<CellIndex>& cells() const { return cells_; }

  void insert(CellIndex idx);
  void erase(const CellIndex& idx);
  bool contains_cell(const CellIndex& idx) const { return cells_.count(idx) != 0; }
  bool contains_point(std::span<const double> p) const;

  // Adds the minimal set of cells whose union contains b.
  void add_box(const Box& b);

  Box cell_box(const CellIndex& idx) const;
  Point cell_center(const CellIndex& idx) const;
  double cell_volume() const;

  // Same region on a lattice of half the cell width.
  GridSet refined() const;

  friend bool operator==(const GridSet&, const GridSet&) = default;

 private:
  GridSpec spec_;
  std::set<CellIndex> cells_;
};

GridSet rasterize(const Box& b, const GridSpec& spec);
GridSet grid_union(const GridSet& a, const GridSet& b);
GridSet grid_difference(const GridSet& a, const GridSet& b);
inline bool is_empty(const GridSet& s) { return s.empty(); }

}  // namespace dynabs
