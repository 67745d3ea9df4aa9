#include <cmath>
#include <random>
#include <string>

#include <gtest/gtest.h>

#include "dynabs/error.hpp"
#include "dynabs/model.hpp"
#include "dynabs/simulate.hpp"

using namespace dynabs;

namespace {

System corpus(const std::string& name) { return load_system(std::string(DYNABS_SYSTEMS_DIR) + "/" + name + ".sys"); }

// The three defining conditions of a simulation pipe, with the trajectory
// condition checked against the reference integrator.
void expect_simulation_pipe(const System& sys, const SimPipe& sim, std::size_t samples) {
  const Pipe& p = sim.pipe;
  ASSERT_GT(p.len(), 0u);
  EXPECT_DOUBLE_EQ(p.dur(), sim.params.t_end);
  for (std::size_t j = 0; j < p.len(); ++j) {
    EXPECT_LE(p.t_end(j) - p.t_begin(j), sim.params.tau * (1 + 1e-12));
    EXPECT_LE(box_dia(p.box(j)), sim.params.epsilon);
  }
  Trajectory ref = reference_trajectory(sys, sim.seed, sim.params.t_end, samples);
  EXPECT_TRUE(pipe_contains_trajectory(p, ref));
}

}  // namespace

TEST(Reference, DecayClosedForm) {
  System s = corpus("decay");
  Trajectory tr = reference_trajectory(s, Point{1.0}, 1.0, 11);
  ASSERT_EQ(tr.size(), 11u);
  EXPECT_DOUBLE_EQ(tr.times.back(), 1.0);
  EXPECT_NEAR(tr.states.back()[0], 0.36787944117144233, 1e-8);
  for (std::size_t i = 0; i < tr.size(); ++i) EXPECT_NEAR(tr.states[i][0], std::exp(-tr.times[i]), 1e-9);
}

TEST(Reference, RotationQuarterTurn) {
  System s = corpus("rotation");
  std::vector<double> times{0.0, M_PI / 2};
  Trajectory tr = reference_trajectory_at(s, Point{1.0, 0.0}, times);
  EXPECT_NEAR(tr.states.back()[0], 0.0, 1e-7);
  EXPECT_NEAR(tr.states.back()[1], 1.0, 1e-7);
}

TEST(Reference, ConstantAndEscape) {
  System a = corpus("constA");
  Trajectory tr = reference_trajectory(a, Point{0.0}, 3.0, 5);
  for (const auto& x : tr.states) EXPECT_EQ(x[0], 0.0);
  System g = corpus("growth");
  EXPECT_THROW(reference_trajectory(g, Point{1.0}, 10.0, 50), DomainEscape);
  std::vector<double> times{0.0, 1.0, 10.0};
  Trajectory cut = reference_trajectory_at(g, Point{1.0}, times, true);
  EXPECT_EQ(cut.size(), 2u);
  EXPECT_THROW(reference_trajectory(a, Point{0.0}, 1.0, 1), std::invalid_argument);
}

TEST(Simulate, ConstantSystem) {
  System s = parse_system("dim 1\ninit x1 in [5, 5]\nfield x1' = 0\n");
  SimPipe sim = simulate(s, Point{5.0}, 0.01, 2.0, 0.5);
  EXPECT_EQ(sim.pipe.len(), 4u);
  for (const auto& b : sim.pipe.boxes()) {
    EXPECT_TRUE(b.contains(Point{5.0}));
    EXPECT_LE(box_dia(b), 1e-12);
  }
}

TEST(Simulate, DecayFinalSegmentHoldsClosedForm) {
  System s = corpus("decay");
  SimPipe sim = simulate(s, Point{1.0}, 0.05, 1.0, 0.1);
  EXPECT_TRUE(sim.pipe.box(sim.pipe.len() - 1).contains(Point{std::exp(-1.0)}));
  expect_simulation_pipe(s, sim, 1000);
}

TEST(Simulate, BrusselatorCornerSeed) {
  System s = corpus("brusselator");
  SimPipe sim = simulate(s, Point{0.9, 1.5}, 0.05, 10.0, 0.1);
  expect_simulation_pipe(s, sim, 1000);
}

TEST(Simulate, StepHalvingMeetsTightEpsilon) {
  System s = corpus("rotation");
  SimPipe coarse = simulate(s, Point{1.0, 0.0}, 0.5, 2.0, 0.25);
  SimPipe fine = simulate(s, Point{1.0, 0.0}, 0.01, 2.0, 0.25);
  EXPECT_LT(fine.step, coarse.step);
  EXPECT_DOUBLE_EQ(0.25 / fine.step, std::round(0.25 / fine.step));
  expect_simulation_pipe(s, fine, 1000);
}

TEST(Simulate, Errors) {
  System d = corpus("decay");
  EXPECT_THROW(simulate(d, Point{1.0, 2.0}, 0.1, 1.0, 0.1), DimensionMismatch);
  EXPECT_THROW(simulate(d, Point{1.0}, 0.0, 1.0, 0.1), std::invalid_argument);
  EXPECT_THROW(simulate(d, Point{1.0}, 0.1, -1.0, 0.1), std::invalid_argument);
  EXPECT_THROW(simulate(d, Point{7.0}, 0.1, 1.0, 0.1), DomainEscape);
  System g = corpus("growth");
  try {
    simulate(g, Point{1.0}, 100.0, 10.0, 0.1);
    FAIL();
  } catch (const DomainEscape& e) {
    EXPECT_GT(e.time(), 4.0);
    EXPECT_EQ(e.seed(), Point{1.0});
  }
  // A segment can never be thinner than the seed's own motion over the
  // smallest allowed step, so tiny epsilon underflows.
  System drift = corpus("drift");
  EXPECT_THROW(simulate(drift, Point{0.0}, 1e-14, 1.0, 0.1), SimulationError);
}

TEST(SimulateProperty, Deterministic) {
  System s = corpus("brusselator");
  SimPipe a = simulate(s, Point{0.92, 1.55}, 0.05, 3.0, 0.1);
  SimPipe b = simulate(s, Point{0.92, 1.55}, 0.05, 3.0, 0.1);
  EXPECT_EQ(a.pipe.boxes(), b.pipe.boxes());
  EXPECT_EQ(a.pipe.ends(), b.pipe.ends());
}

// Halving tau and epsilon never widens the enclosure at matching times.
TEST(SimulateProperty, MonotoneRefinement) {
  for (const char* name : {"decay", "rotation"}) {
    SCOPED_TRACE(name);
    System s = corpus(name);
    Point x0 = s.theta().center();
    double tau = 0.2, eps = 0.4;
    SimPipe prev = simulate(s, x0, eps, 2.0, tau);
    for (int r = 0; r < 4; ++r) {
      tau /= 2, eps /= 2;
      SimPipe next = simulate(s, x0, eps, 2.0, tau);
      for (std::size_t j = 0; j < next.pipe.len(); ++j) {
        double mid = 0.5 * (next.pipe.t_begin(j) + next.pipe.t_end(j));
        std::size_t k = 0;
        while (prev.pipe.t_end(k) < mid) ++k;
        EXPECT_LE(box_dia(next.pipe.box(j)), box_dia(prev.pipe.box(k)) * (1 + 1e-9));
      }
      prev = next;
    }
  }
}

// Random seeds across the corpus satisfy all three pipe conditions.
TEST(SimulateProperty, RandomDrawsAreSimulationPipes) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const char* names[] = {"constA", "decay", "rotation", "brusselator"};
  for (int k = 0; k < 24; ++k) {
    System s = corpus(names[k % 4]);
    Point x0(s.n());
    for (std::size_t i = 0; i < s.n(); ++i) x0[i] = s.theta().lo(i) + u(rng) * s.theta().width(i);
    double eps = 0.02 + 0.2 * u(rng);
    double tau = 0.02 + 0.2 * u(rng);
    double t_end = 0.5 + 4.5 * u(rng);
    SCOPED_TRACE(std::string(names[k % 4]) + " eps " + std::to_string(eps) + " tau " + std::to_string(tau));
    expect_simulation_pipe(s, simulate(s, x0, eps, t_end, tau), 1000);
  }
}

TEST(Simulate, EnclosureRate) {
  EXPECT_DOUBLE_EQ(enclosure_rate(corpus("decay")), -1.0);
  EXPECT_DOUBLE_EQ(enclosure_rate(corpus("brusselator")), 1.4);
  EXPECT_DOUBLE_EQ(enclosure_rate(corpus("constA")), 0.0);
  System s = parse_system("dim 1\ninit x1 in [0, 1]\nfield x1' = x1\nlipschitz_f 2\ndiscrepancy gamma 3\n");
  EXPECT_DOUBLE_EQ(enclosure_rate(s), 2.0);
}

TEST(Simulate, OutputTrace) {
  System s = parse_system("dim 2\noutput_dim 1\ninit x1 in [0, 1] x2 in [0, 1]\nfield x1' = 0\nfield x2' = 0\n"
                          "output y1 = x1 + x2\n");
  Trajectory tr = output_trace(s, reference_trajectory(s, Point{0.25, 0.5}, 1.0, 3));
  ASSERT_EQ(tr.size(), 3u);
  EXPECT_DOUBLE_EQ(tr.states[2][0], 0.75);
}
