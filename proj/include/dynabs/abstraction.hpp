#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "dynabs/discrepancy.hpp"
#include "dynabs/geometry.hpp"
#include "dynabs/model.hpp"
#include "dynabs/pipes.hpp"

namespace dynabs {

enum class CheckMode { conservative, literal };

struct CheckConfig {
  double c = 0.0;
  double t_end = 0.0;
  double delta0 = 0.1;
  double tau0 = 0.1;
  double epsilon0 = 0.2;
  int max_refinements = 12;
  CheckMode mode = CheckMode::conservative;
  // A round whose cover of either initial set exceeds this many points ends
  // the run with UNKNOWN instead of simulating.
  std::size_t max_cover = 200000;
  unsigned jobs = 0;
};

enum class VerdictKind { c_abstraction, counterexample, unknown };

struct RoundRecord {
  int round = 0;
  double delta = 0.0;
  double tau = 0.0;
  double epsilon = 0.0;
  std::size_t cover1 = 0;
  std::size_t cover2 = 0;
  std::size_t removed = 0;
  double init_measure = 0.0;  // volume of Init at the start of the round
  double max_dia1 = 0.0;
  double max_dia2 = 0.0;
};

struct Verdict {
  VerdictKind kind = VerdictKind::unknown;
  // Counterexample seed and the cover radius it was found at.
  Point x10;
  double delta = 0.0;
  std::string reason;
  // What is left of Init when the verdict is UNKNOWN.
  std::vector<Box> remaining;
  std::vector<RoundRecord> transcript;
  std::vector<std::string> warnings;
};

const char* to_string(VerdictKind k);
const char* to_string(CheckMode m);

// Decides whether a2 c-abstracts a1 up to time cfg.t_end by refinement over
// simulation pipes. COUNTEREXAMPLE and C_ABSTRACTION are sound; UNKNOWN means
// the refinement budget ran out.
Verdict check_abstraction(const System& a1, const DiscrepancyWitness& w1, const System& a2,
                          const DiscrepancyWitness& w2, const CheckConfig& cfg);

// sup over the common samples of |nu1(t) - nu2(t)|.
double trace_distance(const Trajectory& nu1, const Trajectory& nu2);

// max over n1 random a1 traces of the min over n2 random a2 traces of
// trace_distance: a Monte-Carlo estimate of the one-sided trace distance.
// Both systems draw their initial states with the same seed (corners first,
// then uniform), so identical systems compare identical traces.
double empirical_trace_distance(const System& a1, const System& a2, double t_end, std::size_t n1, std::size_t n2,
                                unsigned long long seed = 0x7aceULL, std::size_t samples = 201);

// Points of `b`: its 2^n corners (up to `count`), then uniform random draws.
std::vector<Point> sample_box(const Box& b, std::size_t count, unsigned long long seed);

}  // namespace dynabs
