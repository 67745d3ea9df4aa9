#include "dynabs/abstraction.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "dynabs/error.hpp"
#include "dynabs/parallel.hpp"
#include "dynabs/simulate.hpp"

namespace dynabs {

namespace {

// Axis test for keeping a grid cell in Init: the cell must overlap theta with
// positive length, or on a degenerate axis hold its point half-open so each
// point lands in exactly one cell.
bool meets(const Box& cell, const Box& theta) {
  for (std::size_t i = 0; i < theta.dim(); ++i) {
    if (theta.width(i) == 0.0) {
      if (!(cell.lo(i) <= theta.lo(i) && theta.lo(i) < cell.hi(i))) return false;
    } else if (!(std::min(cell.hi(i), theta.hi(i)) - std::max(cell.lo(i), theta.lo(i)) > 0.0)) {
      return false;
    }
  }
  return true;
}

Box clip(const Box& cell, const Box& theta) {
  Point lo(theta.dim()), hi(theta.dim());
  for (std::size_t i = 0; i < theta.dim(); ++i) {
    lo[i] = std::max(cell.lo(i), theta.lo(i));
    hi[i] = std::min(cell.hi(i), theta.hi(i));
  }
  return Box(std::move(lo), std::move(hi));
}

void drop_outside(GridSet& init, const Box& theta) {
  std::vector<CellIndex> gone;
  for (const auto& idx : init.cells())
    if (!meets(init.cell_box(idx), theta)) gone.push_back(idx);
  for (const auto& idx : gone) init.erase(idx);
}

double measure(const GridSet& init, const Box& theta) {
  double total = 0.0;
  for (const auto& idx : init.cells()) {
    Box b = clip(init.cell_box(idx), theta);
    double v = 1.0;
    for (std::size_t i = 0; i < b.dim(); ++i)
      if (theta.width(i) > 0.0) v *= b.width(i);
    total += v;
  }
  return total;
}

double linf_radius(const Box& b) {
  double r = 0.0;
  for (std::size_t i = 0; i < b.dim(); ++i) r = std::max(r, 0.5 * b.width(i));
  return r;
}

struct Seed {
  Point x;
  double radius;
};

std::vector<Pipe> pipes_for(const System& sys, const DiscrepancyWitness& w, const std::vector<Seed>& seeds,
                            double epsilon, double t_end, double tau, unsigned jobs, std::vector<double>& steps) {
  std::vector<Pipe> out(seeds.size());
  steps.assign(seeds.size(), 0.0);
  parallel_for(seeds.size(), jobs, [&](std::size_t i) {
    SimPipe sim = simulate(sys, seeds[i].x, epsilon, t_end, tau);
    steps[i] = sim.step;
    out[i] = bloat(sim, seeds[i].radius, w);
  });
  return out;
}

// Threshold forms of the pipe metrics that stop at the first deciding
// segment. Pipes are already aligned.
bool maxdist_within(const Pipe& p, const Pipe& q, double limit) {
  for (std::size_t i = 0; i < p.len(); ++i)
    if (box_maxdist(p.box(i), q.box(i)) > limit) return false;
  return true;
}

bool hausdorff_within(const Pipe& p, const Pipe& q, double limit) {
  for (std::size_t i = 0; i < p.len(); ++i)
    if (box_hausdorff_directed(p.box(i), q.box(i)) > limit) return false;
  return true;
}

template <class Metric>
bool some_segment_reaches(const Pipe& p, const Pipe& q, double limit, Metric metric) {
  for (std::size_t i = 0; i < p.len(); ++i)
    if (metric(p.box(i), q.box(i)) >= limit) return true;
  return false;
}

bool same_outputs(const System& a, const System& b) {
  if (a.m() != b.m()) return false;
  for (std::size_t i = 0; i < a.m(); ++i)
    if (!(normalize(a.g()[i]) == normalize(b.g()[i]))) return false;
  return true;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

const char* to_string(VerdictKind k) {
  switch (k) {
    case VerdictKind::c_abstraction:
      return "C_ABSTRACTION";
    case VerdictKind::counterexample:
      return "COUNTEREXAMPLE";
    case VerdictKind::unknown:
      return "UNKNOWN";
  }
  return "UNKNOWN";
}

const char* to_string(CheckMode m) { return m == CheckMode::conservative ? "conservative" : "literal"; }

Verdict check_abstraction(const System& a1, const DiscrepancyWitness& w1, const System& a2,
                          const DiscrepancyWitness& w2, const CheckConfig& cfg) {
  if (!(cfg.c > 0.0) || !(cfg.t_end > 0.0)) throw std::invalid_argument("check: c and T must be positive");
  if (!(cfg.delta0 > 0.0 && cfg.tau0 > 0.0 && cfg.epsilon0 > 0.0))
    throw std::invalid_argument("check: delta0, tau0 and eps0 must be positive");
  if (cfg.max_refinements < 1) throw std::invalid_argument("check: budget must be at least 1");
  if (a1.m() != a2.m())
    throw DimensionMismatch("check: output dimensions differ (" + std::to_string(a1.m()) + " vs " +
                            std::to_string(a2.m()) + ")");

  Verdict v;
  if (!same_outputs(a1, a2)) {
    if (cfg.mode == CheckMode::conservative)
      throw std::invalid_argument("check: the systems have different output maps g");
    v.warnings.push_back("output maps differ; the verdict is not covered by the soundness argument");
  }
  const double lg = std::max(a1.lg(), a2.lg());
  const double sg = std::min(a1.sg(), a2.sg());
  if (!(sg > 0.0)) throw std::invalid_argument("check: sensitivity_g must be positive");
  if (lg >= 2.0 * sg)
    v.warnings.push_back("lipschitz_g >= 2 sensitivity_g; termination is not guaranteed for any c");

  const bool literal = cfg.mode == CheckMode::literal;
  const Box& theta1 = a1.theta();
  double delta = cfg.delta0, tau = cfg.tau0, epsilon = cfg.epsilon0;

  GridSet init(GridSpec{theta1.lo(), 2.0 * delta});
  init.add_box(theta1);
  drop_outside(init, theta1);

  for (int round = 1;; ++round) {
    RoundRecord rec;
    rec.round = round;
    rec.delta = delta;
    rec.tau = tau;
    rec.epsilon = epsilon;
    rec.init_measure = measure(init, theta1);

    std::vector<CellIndex> cells(init.cells().begin(), init.cells().end());
    std::vector<Seed> seeds1, seeds2;
    for (const auto& idx : cells) {
      Box b = clip(init.cell_box(idx), theta1);
      seeds1.push_back({b.center(), linf_radius(b)});
    }
    std::vector<Box> cover2 = partition_cells(a2.theta(), delta);
    rec.cover1 = seeds1.size();
    rec.cover2 = cover2.size();
    if (seeds1.size() > cfg.max_cover || cover2.size() > cfg.max_cover) {
      v.transcript.push_back(rec);
      v.kind = VerdictKind::unknown;
      v.reason = "cover size limit reached in round " + std::to_string(round);
      for (const auto& idx : cells) v.remaining.push_back(clip(init.cell_box(idx), theta1));
      return v;
    }
    for (const auto& b : cover2) seeds2.push_back({b.center(), linf_radius(b)});

    std::vector<double> steps1, steps2;
    std::vector<Pipe> p1 = pipes_for(a1, w1, seeds1, epsilon, cfg.t_end, tau, cfg.jobs, steps1);
    std::vector<Pipe> p2 = pipes_for(a2, w2, seeds2, epsilon, cfg.t_end, tau, cfg.jobs, steps2);

    // Line every pipe up on the finest step used this round.
    const Pipe* finest = nullptr;
    double finest_step = 0.0;
    for (std::size_t i = 0; i < p1.size(); ++i)
      if (!finest || steps1[i] < finest_step) finest = &p1[i], finest_step = steps1[i];
    for (std::size_t i = 0; i < p2.size(); ++i)
      if (!finest || steps2[i] < finest_step) finest = &p2[i], finest_step = steps2[i];
    const std::vector<double> ends = finest->ends();
    for (auto& p : p1) p = pipe_align(p, ends);
    for (auto& p : p2) p = pipe_align(p, ends);

    std::vector<double> dia2(p2.size());
    for (std::size_t j = 0; j < p2.size(); ++j) {
      dia2[j] = pipe_dia(p2[j]);
      rec.max_dia2 = std::max(rec.max_dia2, dia2[j]);
    }

    const double near = cfg.c / lg;
    const double far = cfg.c / sg;
    for (std::size_t i = 0; i < p1.size(); ++i) {
      const double dia1 = pipe_dia(p1[i]);
      rec.max_dia1 = std::max(rec.max_dia1, dia1);

      bool removable = false;
      for (std::size_t j = 0; j < p2.size() && !removable; ++j) {
        if (literal)
          removable = dia1 <= near / 2.0 && dia2[j] <= near / 2.0 && hausdorff_within(p1[i], p2[j], near);
        else
          removable = maxdist_within(p1[i], p2[j], near);
      }
      if (removable) {
        init.erase(cells[i]);
        ++rec.removed;
        continue;
      }

      bool separated = dia1 <= far / 2.0;
      for (std::size_t j = 0; j < p2.size() && separated; ++j) {
        separated = literal ? some_segment_reaches(p1[i], p2[j], far, box_hausdorff_directed)
                            : some_segment_reaches(p1[i], p2[j], far, box_separation);
      }
      if (separated) {
        v.transcript.push_back(rec);
        v.kind = VerdictKind::counterexample;
        v.x10 = seeds1[i].x;
        v.delta = delta;
        v.reason = "every abstract pipe stays at least c/sensitivity_g = " + fmt(far) + " away";
        return v;
      }
    }
    v.transcript.push_back(rec);

    if (init.empty()) {
      v.kind = VerdictKind::c_abstraction;
      v.reason = "all of Init removed in round " + std::to_string(round);
      return v;
    }
    if (round >= cfg.max_refinements) {
      v.kind = VerdictKind::unknown;
      v.reason = "refinement budget of " + std::to_string(cfg.max_refinements) + " rounds exhausted";
      for (const auto& idx : init.cells()) v.remaining.push_back(clip(init.cell_box(idx), theta1));
      return v;
    }
    delta /= 2.0;
    tau /= 2.0;
    epsilon /= 2.0;
    init = init.refined();
    drop_outside(init, theta1);
  }
}

double trace_distance(const Trajectory& nu1, const Trajectory& nu2) {
  if (nu1.size() != nu2.size()) throw std::invalid_argument("trace_distance: sample counts differ");
  double out = 0.0;
  for (std::size_t k = 0; k < nu1.size(); ++k) {
    if (std::abs(nu1.times[k] - nu2.times[k]) > 1e-12 * std::max(1.0, std::abs(nu1.times[k])))
      throw std::invalid_argument("trace_distance: sample times differ");
    if (nu1.states[k].size() != nu2.states[k].size()) throw DimensionMismatch("trace_distance: dimensions differ");
    out = std::max(out, distance(nu1.states[k], nu2.states[k]));
  }
  return out;
}

std::vector<Point> sample_box(const Box& b, std::size_t count, unsigned long long seed) {
  std::vector<Point> out;
  const std::size_t n = b.dim();
  const std::size_t corners = n < 20 ? std::size_t{1} << n : count;
  for (std::size_t mask = 0; mask < corners && out.size() < count; ++mask) {
    Point p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = (mask >> i) & 1 ? b.hi(i) : b.lo(i);
    out.push_back(std::move(p));
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  while (out.size() < count) {
    Point p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = b.lo(i) + unit(rng) * b.width(i);
    out.push_back(std::move(p));
  }
  return out;
}

double empirical_trace_distance(const System& a1, const System& a2, double t_end, std::size_t n1, std::size_t n2,
                                unsigned long long seed, std::size_t samples) {
  if (n1 < 1 || n2 < 1) throw std::invalid_argument("empirical_trace_distance: counts must be at least 1");
  if (a1.m() != a2.m()) throw DimensionMismatch("empirical_trace_distance: output dimensions differ");
  auto traces = [&](const System& sys, std::size_t count, unsigned long long s) {
    std::vector<Trajectory> out;
    for (const auto& x : sample_box(sys.theta(), count, s))
      out.push_back(output_trace(sys, reference_trajectory(sys, x, t_end, samples)));
    return out;
  };
  auto t1 = traces(a1, n1, seed);
  auto t2 = traces(a2, n2, seed);
  double worst = 0.0;
  for (const auto& nu1 : t1) {
    double best = INFINITY;
    for (const auto& nu2 : t2) best = std::min(best, trace_distance(nu1, nu2));
    worst = std::max(worst, best);
  }
  return worst;
}

}  // namespace dynabs
