#pragma once

#include <cstddef>
#include <vector>

#include "dynabs/error.hpp"
#include "dynabs/geometry.hpp"

namespace dynabs {

class DiscrepancyWitness;
struct SimPipe;

// Sampled trajectory or trace: states[i] at times[i], times increasing.
struct Trajectory {
  std::vector<double> times;
  std::vector<Point> states;

  std::size_t size() const { return times.size(); }
  double duration() const { return times.empty() ? 0.0 : times.back(); }
};

class NotComparable : public Error {
 public:
  using Error::Error;
};

// Sequence of segments (P_i, t_i). Segment i covers the closed time interval
// [t_{i-1}, t_i] with t_{-1} = 0, so the first segment starts at time 0.
class Pipe {
 public:
  Pipe() = default;
  Pipe(std::vector<Box> boxes, std::vector<double> ends);

  std::size_t len() const { return boxes_.size(); }
  std::size_t dim() const { return boxes_.empty() ? 0 : boxes_.front().dim(); }
  double dur() const { return ends_.empty() ? 0.0 : ends_.back(); }

  const Box& box(std::size_t i) const { return boxes_[i]; }
  const std::vector<Box>& boxes() const { return boxes_; }
  const std::vector<double>& ends() const { return ends_; }
  double t_begin(std::size_t i) const { return i == 0 ? 0.0 : ends_[i - 1]; }
  double t_end(std::size_t i) const { return ends_[i]; }

 private:
  std::vector<Box> boxes_;
  std::vector<double> ends_;
};

bool pipe_comparable(const Pipe& p, const Pipe& q);
// Segmentwise containment P_i within Q_i; requires comparable pipes.
bool pipe_contained(const Pipe& p, const Pipe& q);
// Every pair of corresponding segments is disjoint.
bool pipe_disjoint(const Pipe& p, const Pipe& q);

double pipe_dia(const Pipe& p);
double pipe_hausdorff(const Pipe& p, const Pipe& q);
// Largest per-segment gap: a lower bound on sup_t |xi(t) - xi'(t)| for any
// xi in p and xi' in q.
double pipe_separation(const Pipe& p, const Pipe& q);
double pipe_maxdist(const Pipe& p, const Pipe& q);

// True iff each sample lies in every segment whose closed interval holds its
// time. Throws when the trajectory does not span the pipe's duration.
bool pipe_contains_trajectory(const Pipe& p, const Trajectory& traj);

// Re-expresses `p` on a finer grid `ends` whose every interval lies inside one
// segment of `p`. Used to line up dyadic step sizes.
Pipe pipe_align(const Pipe& p, const std::vector<double>& ends);

// Expands each simulation segment R_j by alpha1^-1(e_j), e_j the witness bound
// over the segment's time interval for initial offsets in the l-infinity ball
// of radius `delta` around the seed.
Pipe bloat(const SimPipe& sim, double delta, const DiscrepancyWitness& w);

}  // namespace dynabs
