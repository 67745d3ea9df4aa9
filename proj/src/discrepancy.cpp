#include "dynabs/discrepancy.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "dynabs/simulate.hpp"

namespace dynabs {

double PowerLaw::operator()(double s) const { return coef * std::pow(s, power); }

double PowerLaw::inverse(double v) const {
  if (v <= 0.0) return 0.0;
  return std::pow(v / coef, 1.0 / power);
}

DiscrepancyWitness DiscrepancyWitness::exponential(double gamma) {
  if (!std::isfinite(gamma)) throw std::invalid_argument("witness rate must be finite");
  DiscrepancyWitness w;
  w.form_ = Form::exponential;
  w.pieces_ = {{0.0, gamma}};
  return w;
}

DiscrepancyWitness DiscrepancyWitness::table(std::vector<RatePiece> pieces, PowerLaw alpha1, PowerLaw alpha2) {
  if (pieces.empty() || pieces.front().start != 0.0)
    throw std::invalid_argument("witness table must start at time 0");
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    if (!std::isfinite(pieces[i].rate)) throw std::invalid_argument("witness rate must be finite");
    if (i > 0 && !(pieces[i].start > pieces[i - 1].start))
      throw std::invalid_argument("witness table times must increase");
  }
  if (!(alpha1.coef > 0.0 && alpha1.power > 0.0 && alpha2.coef > 0.0 && alpha2.power > 0.0))
    throw std::invalid_argument("alpha functions need positive coefficient and power");
  // Power laws with different exponents cross, so alpha1 <= alpha2 on all of
  // [0, inf) forces equal powers.
  if (alpha1.power != alpha2.power || alpha1.coef > alpha2.coef)
    throw std::invalid_argument("alpha1 must not exceed alpha2");
  DiscrepancyWitness w;
  w.form_ = Form::table;
  w.alpha1_ = alpha1;
  w.alpha2_ = alpha2;
  w.pieces_ = std::move(pieces);
  return w;
}

double DiscrepancyWitness::log_growth(double t) const {
  double g = 0.0;
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    double a = pieces_[i].start;
    if (t <= a) break;
    double b = i + 1 < pieces_.size() ? std::min(t, pieces_[i + 1].start) : t;
    g += pieces_[i].rate * (b - a);
  }
  return g;
}

double DiscrepancyWitness::beta(double initial_distance, double t) const {
  return alpha2_(initial_distance) * std::exp(log_growth(t));
}

DiscrepancyWitness make_lipschitz_witness(double l) {
  if (!(l >= 0.0)) throw std::invalid_argument("Lipschitz constant must be non-negative");
  return DiscrepancyWitness::exponential(l);
}

DiscrepancyWitness declared_witness(const System& sys) {
  const WitnessDecl& d = sys.witness();
  PowerLaw alpha{d.alpha_coef, d.alpha_power};
  bool identity_alpha = d.alpha_coef == 1.0 && d.alpha_power == 1.0;
  if (!d.rate_table.empty()) {
    std::vector<DiscrepancyWitness::RatePiece> pieces;
    for (auto [t, r] : d.rate_table) pieces.push_back({t, r});
    return DiscrepancyWitness::table(std::move(pieces), alpha, alpha);
  }
  double gamma = d.gamma.value_or(sys.lf());
  if (identity_alpha) return DiscrepancyWitness::exponential(gamma);
  return DiscrepancyWitness::table({{0.0, gamma}}, alpha, alpha);
}

double bound_over_interval(const DiscrepancyWitness& w, double delta, double t_lo, double t_hi) {
  if (!(t_lo >= 0.0 && t_lo <= t_hi)) throw std::invalid_argument("bound_over_interval: need 0 <= t_lo <= t_hi");
  if (!(delta >= 0.0)) throw std::invalid_argument("bound_over_interval: delta must be non-negative");
  if (delta == 0.0) return 0.0;
  // G is piecewise linear, so its maximum sits at an endpoint or a breakpoint.
  double g = std::max(w.log_growth(t_lo), w.log_growth(t_hi));
  for (const auto& p : w.pieces())
    if (p.start > t_lo && p.start < t_hi) g = std::max(g, w.log_growth(p.start));
  return w.alpha2()(delta) * std::exp(g);
}

double alpha1_inverse(const DiscrepancyWitness& w, double e) {
  if (!(e >= 0.0)) throw std::invalid_argument("alpha1_inverse: e must be non-negative");
  return w.alpha1().inverse(e);
}

WitnessReport check_witness(const System& sys, const DiscrepancyWitness& w, std::size_t trials, double horizon,
                            unsigned long long seed) {
  if (trials < 1) throw std::invalid_argument("check_witness: need at least one trial");
  if (!(horizon > 0.0)) throw std::invalid_argument("check_witness: horizon must be positive");
  constexpr std::size_t kSamples = 201;
  std::vector<double> times(kSamples);
  for (std::size_t i = 0; i < kSamples; ++i) times[i] = horizon * static_cast<double>(i) / (kSamples - 1);

  const Box& d = sys.domain();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto draw = [&] {
    Point p(sys.n());
    for (std::size_t i = 0; i < sys.n(); ++i) p[i] = d.lo(i) + unit(rng) * d.width(i);
    return p;
  };

  WitnessReport report;
  report.trials = trials;
  for (std::size_t k = 0; k < trials; ++k) {
    Point x1 = draw();
    Point x2 = draw();
    Trajectory a = reference_trajectory_at(sys, x1, times, true);
    Trajectory b = reference_trajectory_at(sys, x2, times, true);
    std::size_t common = std::min(a.size(), b.size());
    if (common < kSamples) ++report.truncated;
    const double d0 = distance(x1, x2);
    for (std::size_t i = 0; i < common; ++i) {
      double observed = w.alpha1()(distance(a.states[i], b.states[i]));
      double bound = w.beta(d0, times[i]);
      if (bound > 0.0) report.worst_ratio = std::max(report.worst_ratio, observed / bound);
      if (observed > bound + 1e-6 * (1.0 + bound)) {
        report.violations.push_back({x1, x2, times[i], observed, bound});
        break;
      }
    }
  }
  return report;
}

}  // namespace dynabs
