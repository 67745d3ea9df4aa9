#pragma once

#include <cstddef>
#include <vector>

#include "dynabs/geometry.hpp"
#include "dynabs/model.hpp"

namespace dynabs {

// alpha(s) = coef * s^power, a class-K-infinity function for coef, power > 0.
struct PowerLaw {
  double coef = 1.0;
  double power = 1.0;

  double operator()(double s) const;
  double inverse(double v) const;
};

// Witness (alpha1, alpha2, beta) for the discrepancy function V.
//
// beta(x1, x2, t) = alpha2(|x1 - x2|) * exp(G(t)), where G is the integral of a
// piecewise-constant rate. The exponential form has a single rate gamma and
// identity alphas, i.e. V is the l2 distance and beta = |x1 - x2| e^(gamma t).
class DiscrepancyWitness {
 public:
  enum class Form { exponential, table };

  struct RatePiece {
    double start;
    double rate;
  };

  static DiscrepancyWitness exponential(double gamma);
  static DiscrepancyWitness table(std::vector<RatePiece> pieces, PowerLaw alpha1, PowerLaw alpha2);

  Form form() const { return form_; }
  const PowerLaw& alpha1() const { return alpha1_; }
  const PowerLaw& alpha2() const { return alpha2_; }
  const std::vector<RatePiece>& pieces() const { return pieces_; }
  // Rate of the first piece; the only rate for the exponential form.
  double gamma() const { return pieces_.front().rate; }

  double log_growth(double t) const;
  double beta(double initial_distance, double t) const;

 private:
  DiscrepancyWitness() = default;

  Form form_ = Form::exponential;
  PowerLaw alpha1_;
  PowerLaw alpha2_;
  std::vector<RatePiece> pieces_;
};

DiscrepancyWitness make_lipschitz_witness(double l);

// Witness declared in the system file, or the Lipschitz witness of lf.
DiscrepancyWitness declared_witness(const System& sys);

// sup over t in [t_lo, t_hi] and |x - x'| <= delta of beta(x, x', t). `delta`
// is an l2 radius.
double bound_over_interval(const DiscrepancyWitness& w, double delta, double t_lo, double t_hi);

// Radius r with V(x1, x2) <= e  =>  |x1 - x2| <= r.
double alpha1_inverse(const DiscrepancyWitness& w, double e);

struct WitnessViolation {
  Point x1;
  Point x2;
  double t = 0.0;
  double observed = 0.0;  // alpha1(|xi1(t) - xi2(t)|), a lower bound on V
  double bound = 0.0;     // beta(x1, x2, t)
};

struct WitnessReport {
  std::size_t trials = 0;
  // Pairs whose check stopped early because a trajectory left the domain.
  std::size_t truncated = 0;
  std::vector<WitnessViolation> violations;
  // Largest observed / bound ratio seen.
  double worst_ratio = 0.0;

  bool ok() const { return violations.empty(); }
};

// Randomized falsifier: integrates random state pairs from the domain with the
// reference integrator and reports where alpha1(|xi1 - xi2|) exceeds beta by
// more than 1e-6 (1 + beta). A clean report is evidence, not proof.
WitnessReport check_witness(const System& sys, const DiscrepancyWitness& w, std::size_t trials, double horizon,
                            unsigned long long seed = 0xd15cULL);

}  // namespace dynabs
