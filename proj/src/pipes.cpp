#include "dynabs/pipes.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dynabs/discrepancy.hpp"
#include "dynabs/simulate.hpp"

namespace dynabs {

namespace {

double time_tolerance(double dur) { return 1e-12 * std::max(1.0, std::abs(dur)); }

void require_comparable(const Pipe& p, const Pipe& q, const char* op) {
  if (!pipe_comparable(p, q)) throw NotComparable(std::string(op) + ": pipes are not comparable");
}

template <class F>
double segment_max(const Pipe& p, const Pipe& q, F metric) {
  double out = 0.0;
  for (std::size_t i = 0; i < p.len(); ++i) out = std::max(out, metric(p.box(i), q.box(i)));
  return out;
}

}  // namespace

Pipe::Pipe(std::vector<Box> boxes, std::vector<double> ends) : boxes_(std::move(boxes)), ends_(std::move(ends)) {
  if (boxes_.size() != ends_.size()) throw std::invalid_argument("pipe: one timestamp per segment");
  for (std::size_t i = 0; i < ends_.size(); ++i) {
    if (!(ends_[i] > (i == 0 ? 0.0 : ends_[i - 1])))
      throw std::invalid_argument("pipe: timestamps must be positive and strictly increasing");
    if (boxes_[i].dim() != boxes_.front().dim()) throw DimensionMismatch("pipe: segments differ in dimension");
  }
}

bool pipe_comparable(const Pipe& p, const Pipe& q) {
  if (p.len() != q.len() || p.dim() != q.dim()) return false;
  const double tol = time_tolerance(p.dur());
  for (std::size_t i = 0; i < p.len(); ++i)
    if (std::abs(p.t_end(i) - q.t_end(i)) > tol) return false;
  return true;
}

bool pipe_contained(const Pipe& p, const Pipe& q) {
  require_comparable(p, q, "pipe_contained");
  for (std::size_t i = 0; i < p.len(); ++i)
    if (!q.box(i).contains(p.box(i))) return false;
  return true;
}

bool pipe_disjoint(const Pipe& p, const Pipe& q) {
  require_comparable(p, q, "pipe_disjoint");
  for (std::size_t i = 0; i < p.len(); ++i)
    if (!(box_separation(p.box(i), q.box(i)) > 0.0)) return false;
  return true;
}

double pipe_dia(const Pipe& p) {
  double out = 0.0;
  for (const auto& b : p.boxes()) out = std::max(out, box_dia(b));
  return out;
}

double pipe_hausdorff(const Pipe& p, const Pipe& q) {
  require_comparable(p, q, "pipe_hausdorff");
  return segment_max(p, q, box_hausdorff_directed);
}

double pipe_separation(const Pipe& p, const Pipe& q) {
  require_comparable(p, q, "pipe_separation");
  return segment_max(p, q, box_separation);
}

double pipe_maxdist(const Pipe& p, const Pipe& q) {
  require_comparable(p, q, "pipe_maxdist");
  return segment_max(p, q, box_maxdist);
}

bool pipe_contains_trajectory(const Pipe& p, const Trajectory& traj) {
  if (traj.size() == 0 || p.len() == 0) throw std::invalid_argument("pipe_contains_trajectory: empty input");
  if (std::abs(traj.duration() - p.dur()) > 1e-9 * std::max(1.0, p.dur()))
    throw std::invalid_argument("pipe_contains_trajectory: trajectory duration differs from the pipe's");
  std::size_t seg = 0;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const double t = traj.times[k];
    while (seg + 1 < p.len() && t > p.t_end(seg)) ++seg;
    if (!p.box(seg).contains(traj.states[k])) return false;
    // A sample on a boundary belongs to both neighbours.
    if (t == p.t_end(seg) && seg + 1 < p.len() && !p.box(seg + 1).contains(traj.states[k])) return false;
  }
  return true;
}

Pipe pipe_align(const Pipe& p, const std::vector<double>& ends) {
  if (ends.empty() || std::abs(ends.back() - p.dur()) > time_tolerance(p.dur()))
    throw NotComparable("pipe_align: target grid has a different duration");
  const double tol = time_tolerance(p.dur());
  std::vector<Box> boxes;
  boxes.reserve(ends.size());
  std::size_t seg = 0;
  double begin = 0.0;
  for (double end : ends) {
    while (seg < p.len() && p.t_end(seg) < end - tol) ++seg;
    if (seg == p.len() || p.t_begin(seg) > begin + tol)
      throw NotComparable("pipe_align: target interval straddles a segment boundary");
    boxes.push_back(p.box(seg));
    begin = end;
  }
  std::vector<double> out_ends = ends;
  out_ends.back() = p.dur();
  return Pipe(std::move(boxes), std::move(out_ends));
}

Pipe bloat(const SimPipe& sim, double delta, const DiscrepancyWitness& w) {
  if (!(delta >= 0.0)) throw std::invalid_argument("bloat: delta must be non-negative");
  const Pipe& r = sim.pipe;
  const double l2_radius = delta * std::sqrt(static_cast<double>(r.dim()));
  std::vector<Box> boxes;
  boxes.reserve(r.len());
  for (std::size_t j = 0; j < r.len(); ++j) {
    double e = bound_over_interval(w, l2_radius, r.t_begin(j), r.t_end(j));
    boxes.push_back(box_expand(r.box(j), alpha1_inverse(w, e)));
  }
  return Pipe(std::move(boxes), r.ends());
}

}  // namespace dynabs
