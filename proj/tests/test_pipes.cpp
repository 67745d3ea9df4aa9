#include <cmath>
#include <random>
#include <string>

#include <gtest/gtest.h>

#include "dynabs/discrepancy.hpp"
#include "dynabs/model.hpp"
#include "dynabs/pipes.hpp"
#include "dynabs/simulate.hpp"

using namespace dynabs;

namespace {

System corpus(const std::string& name) { return load_system(std::string(DYNABS_SYSTEMS_DIR) + "/" + name + ".sys"); }

Box box1(double lo, double hi) { return Box({lo}, {hi}); }

Pipe pipe1(std::vector<std::pair<double, double>> segs, std::vector<double> ends) {
  std::vector<Box> boxes;
  for (auto [lo, hi] : segs) boxes.push_back(box1(lo, hi));
  return Pipe(boxes, ends);
}

Point uniform_in(std::mt19937_64& rng, const Box& b) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Point p(b.dim());
  for (std::size_t i = 0; i < b.dim(); ++i) p[i] = b.lo(i) + u(rng) * b.width(i);
  return p;
}

}  // namespace

TEST(Pipe, Validation) {
  EXPECT_THROW(pipe1({{0, 1}, {0, 1}}, {1.0, 1.0}), std::invalid_argument);
  EXPECT_THROW(pipe1({{0, 1}}, {0.0}), std::invalid_argument);
  EXPECT_THROW(pipe1({{0, 1}}, {1.0, 2.0}), std::invalid_argument);
  Pipe p = pipe1({{0, 1}, {1, 2}}, {0.5, 1.0});
  EXPECT_EQ(p.len(), 2u);
  EXPECT_DOUBLE_EQ(p.dur(), 1.0);
  EXPECT_DOUBLE_EQ(p.t_begin(1), 0.5);
}

TEST(Pipe, Comparable) {
  Pipe a = pipe1({{0, 1}, {0, 1}}, {1, 2});
  EXPECT_TRUE(pipe_comparable(a, pipe1({{5, 6}, {7, 8}}, {1, 2})));
  EXPECT_FALSE(pipe_comparable(a, pipe1({{0, 1}}, {2})));
  EXPECT_FALSE(pipe_comparable(a, pipe1({{0, 1}, {0, 1}}, {1.5, 2})));
  EXPECT_THROW(pipe_hausdorff(a, pipe1({{0, 1}}, {2})), NotComparable);
  EXPECT_THROW(pipe_separation(a, pipe1({{0, 1}}, {2})), NotComparable);
  EXPECT_THROW(pipe_maxdist(a, pipe1({{0, 1}}, {2})), NotComparable);
}

TEST(Pipe, Diameter) {
  EXPECT_EQ(pipe_dia(pipe1({{1, 1}, {2, 2}}, {1, 2})), 0.0);
  EXPECT_DOUBLE_EQ(pipe_dia(pipe1({{0, 1}, {0, 2}, {0, 0.5}}, {1, 2, 3})), 2.0);
  EXPECT_NEAR(pipe_dia(Pipe({Box({0, 0}, {1, 1})}, {1.0})), std::sqrt(2.0), 1e-15);
}

TEST(Pipe, Metrics) {
  Pipe a = pipe1({{0, 1}, {0, 1}}, {1, 2});
  EXPECT_EQ(pipe_hausdorff(a, a), 0.0);
  EXPECT_EQ(pipe_hausdorff(pipe1({{0.2, 0.4}, {0.5, 0.6}}, {1, 2}), a), 0.0);
  EXPECT_DOUBLE_EQ(pipe_hausdorff(pipe1({{0, 1}}, {1}), pipe1({{0.5, 1.5}}, {1})), 0.5);

  EXPECT_EQ(pipe_separation(a, pipe1({{0.5, 2}, {-1, 0}}, {1, 2})), 0.0);
  EXPECT_DOUBLE_EQ(pipe_separation(a, pipe1({{3, 4}, {0.5, 2}}, {1, 2})), 2.0);
  EXPECT_GE(pipe_separation(a, pipe1({{2, 4}, {-3, -1}}, {1, 2})), 1.0);

  Pipe zero = pipe1({{0, 0}, {0, 0}}, {1, 2});
  EXPECT_EQ(pipe_maxdist(zero, zero), 0.0);
  EXPECT_DOUBLE_EQ(pipe_maxdist(zero, pipe1({{3, 3}, {3, 3}}, {1, 2})), 3.0);
  EXPECT_DOUBLE_EQ(pipe_maxdist(zero, pipe1({{1, 1}, {4, 4}}, {1, 2})), 4.0);
}

TEST(Pipe, ContainmentAndDisjointness) {
  Pipe a = pipe1({{0, 1}, {0, 1}}, {1, 2});
  Pipe inner = pipe1({{0.2, 0.4}, {0.5, 0.6}}, {1, 2});
  EXPECT_TRUE(pipe_contained(inner, a));
  EXPECT_FALSE(pipe_contained(a, inner));
  EXPECT_TRUE(pipe_disjoint(a, pipe1({{2, 3}, {-2, -1}}, {1, 2})));
  EXPECT_FALSE(pipe_disjoint(a, pipe1({{2, 3}, {0.5, 3}}, {1, 2})));
}

TEST(Pipe, TrajectoryMembership) {
  Pipe p = pipe1({{0, 1}, {1, 2}}, {1, 2});
  Trajectory inside{{0.0, 0.5, 1.0, 1.5, 2.0}, {{0.0}, {0.5}, {1.0}, {1.5}, {2.0}}};
  EXPECT_TRUE(pipe_contains_trajectory(p, inside));
  // The sample at the boundary time must lie in both neighbouring segments.
  Trajectory boundary{{0.0, 1.0, 2.0}, {{0.0}, {0.9}, {2.0}}};
  EXPECT_FALSE(pipe_contains_trajectory(p, boundary));
  Trajectory exits{{0.0, 0.5, 2.0}, {{0.0}, {1.5}, {2.0}}};
  EXPECT_FALSE(pipe_contains_trajectory(p, exits));
  Trajectory short_traj{{0.0, 1.0}, {{0.0}, {1.0}}};
  EXPECT_THROW(pipe_contains_trajectory(p, short_traj), std::invalid_argument);

  Pipe constant = pipe1({{3, 3}, {3, 3}}, {1, 2});
  EXPECT_TRUE(pipe_contains_trajectory(constant, Trajectory{{0.0, 0.7, 2.0}, {{3.0}, {3.0}, {3.0}}}));
}

TEST(Pipe, Align) {
  Pipe p = pipe1({{0, 1}, {1, 2}}, {1, 2});
  Pipe q = pipe_align(p, {0.5, 1.0, 1.5, 2.0});
  ASSERT_EQ(q.len(), 4u);
  EXPECT_EQ(q.box(1), box1(0, 1));
  EXPECT_EQ(q.box(2), box1(1, 2));
  EXPECT_THROW(pipe_align(p, {0.75, 1.5, 2.0}), NotComparable);
  EXPECT_THROW(pipe_align(p, {0.5, 1.0}), NotComparable);
}

TEST(Bloat, Examples) {
  System drift = corpus("drift");
  SimPipe sim = simulate(drift, Point{1.0}, 0.5, 1.0, 0.25);
  Pipe b = bloat(sim, 0.1, make_lipschitz_witness(0.0));
  for (std::size_t j = 0; j < b.len(); ++j) {
    EXPECT_NEAR(b.box(j).lo(0), sim.pipe.box(j).lo(0) - 0.1, 1e-15);
    EXPECT_NEAR(b.box(j).hi(0), sim.pipe.box(j).hi(0) + 0.1, 1e-15);
  }
  Pipe same = bloat(sim, 0.0, make_lipschitz_witness(3.0));
  EXPECT_EQ(same.boxes(), sim.pipe.boxes());

  System decay = corpus("decay");
  SimPipe sd = simulate(decay, Point{1.5}, 0.5, 2.0, 1.0);
  Pipe bd = bloat(sd, 0.1, DiscrepancyWitness::exponential(-1.0));
  for (std::size_t j = 0; j < bd.len(); ++j)
    EXPECT_NEAR(sd.pipe.box(j).lo(0) - bd.box(j).lo(0), 0.1 * std::exp(-sd.pipe.t_begin(j)), 1e-12);
}

// Trajectories from the delta-ball around the seed stay in the bloated pipe.
TEST(BloatProperty, BallTrajectoriesContained) {
  std::mt19937_64 rng(12);
  for (const char* name : {"decay", "rotation", "brusselator"}) {
    SCOPED_TRACE(name);
    System s = corpus(name);
    Point seed = s.theta().center();
    const double delta = 0.02;
    SimPipe sim = simulate(s, seed, 0.05, 4.0, 0.1);
    Pipe p = bloat(sim, delta, declared_witness(s));
    Box ball = box_expand(Box::point(seed), delta);
    for (int k = 0; k < 30; ++k) {
      Point x = uniform_in(rng, ball);
      EXPECT_TRUE(pipe_contains_trajectory(p, reference_trajectory(s, x, 4.0, 400)));
    }
  }
}

TEST(PipeProperty, MetricOrderingAndContainment) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1.0, 1.0), w(0.0, 0.8);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + trial % 3, len = 1 + trial % 5;
    std::vector<Box> pb, qb, inner;
    std::vector<double> ends;
    for (std::size_t j = 0; j < len; ++j) {
      Point plo(n), phi(n), qlo(n), qhi(n), ilo(n), ihi(n);
      for (std::size_t i = 0; i < n; ++i) {
        plo[i] = u(rng), phi[i] = plo[i] + w(rng);
        qlo[i] = u(rng), qhi[i] = qlo[i] + w(rng);
        double a = plo[i] + (phi[i] - plo[i]) * (0.5 + 0.5 * u(rng)) * 0.5;
        ilo[i] = a, ihi[i] = a + (phi[i] - a) * 0.5;
      }
      pb.emplace_back(plo, phi), qb.emplace_back(qlo, qhi), inner.emplace_back(ilo, ihi);
      ends.push_back(0.5 * static_cast<double>(j + 1));
    }
    Pipe p(pb, ends), q(qb, ends), r(inner, ends);
    EXPECT_LE(pipe_separation(p, q), pipe_hausdorff(p, q));
    EXPECT_LE(pipe_hausdorff(p, q), pipe_maxdist(p, q));
    ASSERT_TRUE(pipe_contained(r, p));
    EXPECT_EQ(pipe_hausdorff(r, p), 0.0);

    // Membership in a contained pipe implies membership in the outer one.
    Trajectory tr;
    for (std::size_t j = 0; j < len; ++j) {
      for (int k = 0; k < 3; ++k) {
        double t = r.t_begin(j) + (r.t_end(j) - r.t_begin(j)) * (k + 1) / 3.0;
        tr.times.push_back(t);
        tr.states.push_back(r.box(j).center());
      }
    }
    tr.times.insert(tr.times.begin(), 0.0);
    tr.states.insert(tr.states.begin(), r.box(0).center());
    if (pipe_contains_trajectory(r, tr)) EXPECT_TRUE(pipe_contains_trajectory(p, tr));
  }
}
