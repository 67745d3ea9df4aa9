#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "dynabs/geometry.hpp"
#include "dynabs/model.hpp"
#include "dynabs/pipes.hpp"

namespace dynabs {

struct SimParams {
  double epsilon = 0.0;
  double tau = 0.0;
  double t_end = 0.0;
};

// (x, T, epsilon, tau)-simulation pipe: segment lengths at most tau, every
// segment of diameter at most epsilon, the trajectory from `seed` inside
// segment j throughout [t_{j-1}, t_j].
struct SimPipe {
  Pipe pipe;
  Point seed;
  SimParams params;
  // Uniform step actually used: tau / 2^k for the smallest k that met epsilon.
  double step = 0.0;
};

// Validated-style enclosure of one trajectory. Per step h: a classical RK4
// center, a local error bound of 10x the step-doubling estimate, radius
// propagation r <- r e^(rate h) + err, an intra-step excursion term, and an
// interval Picard enclosure intersected in where it converges. Steps are
// uniform; if any segment is wider than epsilon the whole run restarts with
// h halved.
SimPipe simulate(const System& sys, std::span<const double> x0, double epsilon, double t_end, double tau);

// Growth rate used for the enclosure radius: lf, or the initial rate of a
// declared discrepancy witness with identity alphas when that is smaller.
double enclosure_rate(const System& sys);

// Adaptive Dormand-Prince integration (relative tolerance 1e-10) sampled at
// `samples` uniform times over [0, t_end]. Throws DomainEscape when a sample
// leaves the domain.
Trajectory reference_trajectory(const System& sys, std::span<const double> x0, double t_end, std::size_t samples);

// Same integrator at caller-chosen times. With stop_at_escape the samples end
// just before the first one outside the domain instead of throwing.
Trajectory reference_trajectory_at(const System& sys, std::span<const double> x0, const std::vector<double>& times,
                                   bool stop_at_escape = false);

// g applied to every state of a trajectory.
Trajectory output_trace(const System& sys, const Trajectory& traj);

}  // namespace dynabs
