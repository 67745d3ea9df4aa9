#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "dynabs/geometry.hpp"

using namespace dynabs;

namespace {

Box box1(double lo, double hi) { return Box({lo}, {hi}); }

Box random_box(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> pos(-2.0, 2.0), width(0.0, 1.5);
  Point lo(n), hi(n);
  for (std::size_t i = 0; i < n; ++i) {
    lo[i] = pos(rng);
    hi[i] = lo[i] + (rng() % 8 == 0 ? 0.0 : width(rng));
  }
  return Box(lo, hi);
}

Point random_point(std::mt19937_64& rng, const Box& b) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Point p(b.dim());
  for (std::size_t i = 0; i < b.dim(); ++i) p[i] = b.lo(i) + u(rng) * b.width(i);
  return p;
}

// Reference: distance from p to b by clamping.
double point_box_distance(const Point& p, const Box& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    double d = std::max({b.lo(i) - p[i], 0.0, p[i] - b.hi(i)});
    s += d * d;
  }
  return std::sqrt(s);
}

// Reference: the maximum over all 2^n corners of a.
double hausdorff_by_corners(const Box& a, const Box& b) {
  double best = 0.0;
  for (std::size_t mask = 0; mask < (std::size_t{1} << a.dim()); ++mask) {
    Point c(a.dim());
    for (std::size_t i = 0; i < a.dim(); ++i) c[i] = (mask >> i) & 1 ? a.hi(i) : a.lo(i);
    best = std::max(best, point_box_distance(c, b));
  }
  return best;
}

}  // namespace

TEST(Box, Validation) {
  EXPECT_THROW(Box({1.0}, {0.0}), std::invalid_argument);
  EXPECT_THROW(Box({0.0, 0.0}, {1.0}), std::invalid_argument);
  EXPECT_THROW(Box({NAN}, {1.0}), std::invalid_argument);
  EXPECT_NO_THROW(Box({1.0}, {1.0}));
}

TEST(Box, Diameter) {
  EXPECT_NEAR(box_dia(Box({0, 0}, {1, 1})), std::sqrt(2.0), 1e-15);
  EXPECT_EQ(box_dia(Box::point(Point{3, 4})), 0.0);
  EXPECT_DOUBLE_EQ(box_dia(Box({0, 0}, {3, 4})), 5.0);
}

TEST(Box, DirectedHausdorffExamples) {
  EXPECT_EQ(box_hausdorff_directed(box1(0, 1), box1(0, 1)), 0.0);
  EXPECT_DOUBLE_EQ(box_hausdorff_directed(box1(0, 1), box1(0.5, 1.5)), 0.5);
  EXPECT_EQ(box_hausdorff_directed(box1(0.2, 0.3), box1(0, 1)), 0.0);
  EXPECT_DOUBLE_EQ(box_hausdorff_directed(box1(0, 1), box1(0.2, 0.3)), 0.7);
}

TEST(Box, SeparationExamples) {
  EXPECT_EQ(box_separation(box1(0, 2), box1(1, 3)), 0.0);
  EXPECT_DOUBLE_EQ(box_separation(box1(0, 1), box1(3, 4)), 2.0);
  EXPECT_NEAR(box_separation(Box({0, 0}, {1, 1}), Box({2, 2}, {3, 3})), std::sqrt(2.0), 1e-15);
}

TEST(Box, MaxdistExamples) {
  EXPECT_DOUBLE_EQ(box_maxdist(box1(0, 1), box1(0, 1)), 1.0);
  EXPECT_DOUBLE_EQ(box_maxdist(box1(0, 1), box1(3, 4)), 4.0);
  EXPECT_DOUBLE_EQ(box_maxdist(Box::point(Point{0}), Box::point(Point{2.5})), 2.5);
}

TEST(Box, MetricsRejectDimensionMismatch) {
  Box a({0}, {1}), b({0, 0}, {1, 1});
  EXPECT_ANY_THROW(box_hausdorff_directed(a, b));
  EXPECT_ANY_THROW(box_separation(a, b));
  EXPECT_ANY_THROW(box_maxdist(a, b));
}

TEST(Box, ExpandAndHull) {
  EXPECT_EQ(box_expand(box1(0, 1), 0.0), box1(0, 1));
  Box e = box_expand(box1(0, 1), 0.1);
  EXPECT_DOUBLE_EQ(e.lo(0), -0.1);
  EXPECT_DOUBLE_EQ(e.hi(0), 1.1);
  EXPECT_EQ(box_expand(Box::point(Point{0, 0}), 1.0), Box({-1, -1}, {1, 1}));
  EXPECT_EQ(box_hull(Point{0, 3}, Point{2, 1}), Box({0, 1}, {2, 3}));
  Box out;
  EXPECT_TRUE(box_intersect(box1(0, 2), box1(1, 3), out));
  EXPECT_EQ(out, box1(1, 2));
  EXPECT_FALSE(box_intersect(box1(0, 1), box1(2, 3), out));
}

TEST(Box, PartitionExamples) {
  auto c1 = partition(box1(0, 1), 0.5);
  ASSERT_EQ(c1.size(), 1u);
  EXPECT_DOUBLE_EQ(c1[0][0], 0.5);
  auto c2 = partition(box1(0, 1), 0.25);
  ASSERT_EQ(c2.size(), 2u);
  EXPECT_DOUBLE_EQ(c2[0][0], 0.25);
  EXPECT_DOUBLE_EQ(c2[1][0], 0.75);
  auto c3 = partition(Box({0, 0}, {1, 1}), 0.25);
  ASSERT_EQ(c3.size(), 4u);
  for (const auto& c : c3) {
    EXPECT_TRUE(c[0] == 0.25 || c[0] == 0.75);
    EXPECT_TRUE(c[1] == 0.25 || c[1] == 0.75);
  }
  EXPECT_EQ(partition(Box::point(Point{1, 2}), 0.1).size(), 1u);
}

// Exact metrics against a corner-enumeration oracle and sampled bounds.
TEST(BoxProperty, MetricsAgainstOracles) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + trial % 4;
    Box a = random_box(rng, n), b = random_box(rng, n);
    const double h = box_hausdorff_directed(a, b);
    const double s = box_separation(a, b);
    const double m = box_maxdist(a, b);
    EXPECT_NEAR(h, hausdorff_by_corners(a, b), 1e-12);
    EXPECT_LE(s, m);
    EXPECT_LE(h, m + 1e-12);

    double sampled_h = 0.0;
    for (int k = 0; k < 2000; ++k) {
      Point p = random_point(rng, a), q = random_point(rng, b);
      sampled_h = std::max(sampled_h, point_box_distance(p, b));
      double d = distance(p, q);
      EXPECT_LE(s, d + 1e-12);
      EXPECT_GE(m, d - 1e-12);
    }
    EXPECT_GE(h, sampled_h - 1e-12);
  }
}

TEST(BoxProperty, PartitionCovers) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 1 + trial % 3;
    Box b = random_box(rng, n);
    const double delta = 0.05 + 0.3 * (trial % 5) / 4.0;
    auto centers = partition(b, delta);
    for (int k = 0; k < 10000 / 20; ++k) {
      Point p = random_point(rng, b);
      bool covered = std::any_of(centers.begin(), centers.end(), [&](const Point& c) {
        for (std::size_t i = 0; i < n; ++i)
          if (std::abs(c[i] - p[i]) > delta * (1 + 1e-12)) return false;
        return true;
      });
      EXPECT_TRUE(covered);
    }
  }
}

TEST(GridSet, RasterizeExamples) {
  GridSpec unit{{0.0}, 1.0};
  GridSet a = rasterize(box1(0.1, 0.9), unit);
  EXPECT_EQ(a.size(), 1u);
  EXPECT_TRUE(a.contains_cell({0}));
  GridSet b = rasterize(box1(0.5, 1.5), unit);
  EXPECT_EQ(b.size(), 2u);
  EXPECT_TRUE(b.contains_cell({0}) && b.contains_cell({1}));
  EXPECT_TRUE(is_empty(grid_difference(b, b)));
  // Contact with a face only through round-off does not pull in a neighbour.
  EXPECT_EQ(rasterize(box1(0.0, 1.0 + 1e-12), unit).size(), 1u);
  EXPECT_EQ(rasterize(box1(-1e-12, 1.0), unit).size(), 1u);
  EXPECT_EQ(rasterize(box1(2.0, 2.0), unit).size(), 1u);
}

TEST(GridSet, AlgebraIsExact) {
  GridSpec spec{{0.0, 0.0}, 0.5};
  GridSet a = rasterize(Box({0, 0}, {1, 1}), spec);
  GridSet b = rasterize(Box({0.5, 0.5}, {1.5, 1.5}), spec);
  EXPECT_EQ(a.size(), 4u);
  GridSet u = grid_union(a, b);
  EXPECT_EQ(u.size(), 7u);
  GridSet d = grid_difference(a, b);
  EXPECT_EQ(d.size(), 3u);
  EXPECT_FALSE(d.contains_cell({1, 1}));
  EXPECT_THROW(grid_union(a, GridSet(GridSpec{{0.0, 0.0}, 0.25})), std::invalid_argument);
}

TEST(GridSet, RefinedKeepsRegion) {
  GridSpec spec{{0.0, 0.0}, 1.0};
  GridSet a = rasterize(Box({0, 0}, {2, 1}), spec);
  GridSet r = a.refined();
  EXPECT_EQ(r.size(), 8u);
  EXPECT_DOUBLE_EQ(r.spec().cell, 0.5);
  EXPECT_DOUBLE_EQ(r.size() * r.cell_volume(), a.size() * a.cell_volume());
  EXPECT_TRUE(r.contains_point(Point{1.9, 0.1}));
  EXPECT_FALSE(r.contains_point(Point{2.1, 0.1}));
}

TEST(GridSetProperty, RasterizeContainsBox) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + trial % 3;
    Box b = random_box(rng, n);
    GridSpec spec{Point(n, -0.3), 0.07 + 0.2 * (trial % 4)};
    GridSet g = rasterize(b, spec);
    for (int k = 0; k < 100; ++k) EXPECT_TRUE(g.contains_point(random_point(rng, b)));
    for (int k = 0; k < (1 << n); ++k) {
      Point c(n);
      for (std::size_t i = 0; i < n; ++i) c[i] = (k >> i) & 1 ? b.hi(i) : b.lo(i);
      EXPECT_TRUE(g.contains_point(c));
    }
  }
}
