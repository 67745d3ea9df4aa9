#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "dynabs/discrepancy.hpp"
#include "dynabs/geometry.hpp"
#include "dynabs/model.hpp"

namespace dynabs {

// Union of the bloated pipe segments of a delta-cover of theta: an
// over-approximation of the states reachable within [0, t_end].
std::vector<Box> bounded_reach(const System& sys, const DiscrepancyWitness& w, double t_end, double delta,
                               double epsilon, double tau, unsigned jobs = 0);

struct ReachParams {
  std::size_t k = 10;  // each post simulates for k * tau
  double tau = 0.05;
  double delta = 0.05;
  double epsilon = 0.1;
  double grid_cell = 0.1;  // must not exceed 2 * delta
  std::size_t max_iter = 100;
  unsigned jobs = 0;
  bool keep_history = false;
};

enum class ReachStatus { fixpoint, budget_exhausted };

struct ReachResult {
  ReachStatus status = ReachStatus::budget_exhausted;
  GridSet reach;
  std::size_t iterations = 0;
  // Size of newreach after each iteration.
  std::vector<std::size_t> frontier_history;
  // reach after each iteration, when requested.
  std::vector<GridSet> history;
  // Set when a pipe left the declared domain.
  std::optional<CellIndex> escaped_cell;
  std::string note;
};

const char* to_string(ReachStatus s);

// Grid fixpoint over simulate+bloat posts. Every cell of newreach is
// simulated from its center with an l-infinity radius of half a cell; the
// bloated segments are rasterized outward and added until nothing new shows
// up (FIXPOINT) or max_iter runs out. A pipe leaving the domain stops the run
// with BUDGET_EXHAUSTED and names the cell.
ReachResult unbounded_reach(const System& sys, const DiscrepancyWitness& w, const ReachParams& params);

}  // namespace dynabs
