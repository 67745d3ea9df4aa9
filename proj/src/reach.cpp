#include "dynabs/reach.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dynabs/error.hpp"
#include "dynabs/parallel.hpp"
#include "dynabs/pipes.hpp"
#include "dynabs/simulate.hpp"

namespace dynabs {

namespace {

double linf_radius(const Box& b) {
  double r = 0.0;
  for (std::size_t i = 0; i < b.dim(); ++i) r = std::max(r, 0.5 * b.width(i));
  return r;
}

std::string index_text(const CellIndex& idx) {
  std::string s = "(";
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(idx[i]);
  }
  return s + ")";
}

}  // namespace

const char* to_string(ReachStatus s) { return s == ReachStatus::fixpoint ? "FIXPOINT" : "BUDGET_EXHAUSTED"; }

std::vector<Box> bounded_reach(const System& sys, const DiscrepancyWitness& w, double t_end, double delta,
                               double epsilon, double tau, unsigned jobs) {
  if (!(t_end > 0.0 && delta > 0.0 && epsilon > 0.0 && tau > 0.0))
    throw std::invalid_argument("bounded_reach: parameters must be positive");
  std::vector<Box> cells = partition_cells(sys.theta(), delta);
  std::vector<Pipe> pipes(cells.size());
  parallel_for(cells.size(), jobs, [&](std::size_t i) {
    pipes[i] = bloat(simulate(sys, cells[i].center(), epsilon, t_end, tau), linf_radius(cells[i]), w);
  });
  std::vector<Box> out;
  for (const auto& p : pipes) out.insert(out.end(), p.boxes().begin(), p.boxes().end());
  return out;
}

ReachResult unbounded_reach(const System& sys, const DiscrepancyWitness& w, const ReachParams& params) {
  if (params.k < 1 || params.max_iter < 1) throw std::invalid_argument("reach: k and max_iter must be at least 1");
  if (!(params.tau > 0.0 && params.delta > 0.0 && params.epsilon > 0.0 && params.grid_cell > 0.0))
    throw std::invalid_argument("reach: tau, delta, epsilon and cell must be positive");
  if (params.grid_cell > 2.0 * params.delta) throw std::invalid_argument("reach: cell must not exceed 2 * delta");

  const double horizon = static_cast<double>(params.k) * params.tau;
  const GridSpec spec{sys.theta().lo(), params.grid_cell};
  ReachResult res;
  res.reach = rasterize(sys.theta(), spec);
  GridSet newreach = res.reach;

  while (!newreach.empty()) {
    if (res.iterations >= params.max_iter) {
      res.status = ReachStatus::budget_exhausted;
      res.note = "iteration budget of " + std::to_string(params.max_iter) + " exhausted";
      return res;
    }
    std::vector<CellIndex> cells(newreach.cells().begin(), newreach.cells().end());
    std::vector<Pipe> pipes(cells.size());
    std::vector<char> escaped(cells.size(), 0);
    try {
      parallel_for(cells.size(), params.jobs, [&](std::size_t i) {
        Box cell = newreach.cell_box(cells[i]);
        try {
          Pipe p = bloat(simulate(sys, cell.center(), params.epsilon, horizon, params.tau), linf_radius(cell), w);
          for (std::size_t j = 0; j < p.len(); ++j)
            if (!sys.domain().contains(p.box(j)))
              throw DomainEscape("bloated pipe leaves the domain near t = " + std::to_string(p.t_begin(j)),
                                 p.t_begin(j), cell.center());
          pipes[i] = std::move(p);
        } catch (const DomainEscape&) {
          escaped[i] = 1;
          throw;
        }
      });
    } catch (const DomainEscape& e) {
      auto first = std::find(escaped.begin(), escaped.end(), 1);
      if (first != escaped.end()) res.escaped_cell = cells[first - escaped.begin()];
      res.status = ReachStatus::budget_exhausted;
      res.note = std::string("domain escape from cell ") +
                 (res.escaped_cell ? index_text(*res.escaped_cell) : std::string("?")) + ": " + e.what();
      return res;
    }

    GridSet post(spec);
    for (const auto& p : pipes)
      for (const auto& b : p.boxes()) post.add_box(b);
    newreach = grid_difference(post, res.reach);
    res.reach = grid_union(res.reach, newreach);
    ++res.iterations;
    res.frontier_history.push_back(newreach.size());
    if (params.keep_history) res.history.push_back(res.reach);
  }
  res.status = ReachStatus::fixpoint;
  return res;
}

}  // namespace dynabs
