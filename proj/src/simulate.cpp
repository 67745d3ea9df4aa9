#include "dynabs/simulate.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

#include <boost/numeric/odeint.hpp>

#include "dynabs/error.hpp"

namespace dynabs {

namespace {

std::string format_point(std::span<const double> p) {
  std::string s = "(";
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(p[i]);
  }
  return s + ")";
}

void check_finite(std::span<const double> v, double t) {
  for (std::size_t i = 0; i < v.size(); ++i)
    if (!std::isfinite(v[i]))
      throw EvalError("non-finite field value in component x" + std::to_string(i + 1) + "' near t = " +
                          std::to_string(t),
                      i);
}

struct Rk4 {
  const System& sys;
  Point k1, k2, k3, k4, tmp;
  double max_speed = 0.0;

  explicit Rk4(const System& s) : sys(s), k1(s.n()), k2(s.n()), k3(s.n()), k4(s.n()), tmp(s.n()) {}

  void field(std::span<const double> x, Point& out) {
    sys.field_into(x, out);
    max_speed = std::max(max_speed, norm2(out));
  }

  Point step(const Point& x, double h) {
    const std::size_t n = x.size();
    field(x, k1);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k1[i];
    field(tmp, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k2[i];
    field(tmp, k3);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + h * k3[i];
    field(tmp, k4);
    Point out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return out;
  }
};

// A priori enclosure over one step: if X + [0,h] f(B) lies inside B then the
// solution from any point of X stays in B over [0,h], and the tighter set
// X + [0,h] f(B) holds it too.
std::optional<Box> picard_enclosure(const System& sys, const Box& start, double h) {
  const std::size_t n = sys.n();
  std::vector<Interval> x(n), b(n), fb(n), next(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = {start.lo(i), start.hi(i)};
  const Interval span(0.0, h);

  auto image = [&](const std::vector<Interval>& box) {
    sys.field_into(box, fb);
    for (std::size_t i = 0; i < n; ++i) next[i] = x[i] + span * fb[i];
  };
  auto inflate = [&](std::vector<Interval>& box) {
    for (auto& iv : box) {
      double pad = 0.1 * iv.width() + 1e-12 * (1.0 + std::max(std::abs(iv.lo), std::abs(iv.hi)));
      iv = {iv.lo - pad, iv.hi + pad};
    }
  };

  image(x);
  b = next;
  inflate(b);
  for (int iter = 0; iter < 12; ++iter) {
    image(b);
    bool inside = true;
    for (std::size_t i = 0; i < n; ++i) {
      if (!next[i].bounded()) return std::nullopt;
      if (next[i].lo < b[i].lo || next[i].hi > b[i].hi) inside = false;
    }
    if (inside) {
      Point lo(n), hi(n);
      for (std::size_t i = 0; i < n; ++i) lo[i] = next[i].lo, hi[i] = next[i].hi;
      return Box(std::move(lo), std::move(hi));
    }
    for (std::size_t i = 0; i < n; ++i) b[i] = hull(b[i], next[i]);
    inflate(b);
  }
  return std::nullopt;
}

// One pass at fixed step h. Returns nullopt when some segment is wider than
// epsilon.
std::optional<Pipe> run_fixed_step(const System& sys, const Point& x0, double epsilon, double t_end, double h) {
  const double rate = enclosure_rate(sys);
  const double lf = sys.lf();
  const auto steps = static_cast<std::size_t>(std::max(1.0, std::ceil(t_end / h - 1e-9)));

  std::vector<Box> boxes;
  std::vector<double> ends;

  Rk4 rk(sys);
  Point c = x0;
  double r = 0.0;
  for (std::size_t j = 1; j <= steps; ++j) {
    const double t0 = static_cast<double>(j - 1) * h;
    const double t1 = j == steps ? t_end : static_cast<double>(j) * h;
    const double hj = t1 - t0;

    rk.max_speed = 0.0;
    Point full = rk.step(c, hj);
    Point half = rk.step(rk.step(c, 0.5 * hj), 0.5 * hj);
    check_finite(full, t0);
    check_finite(half, t0);

    const double err = 10.0 * distance(full, half) + 64.0 * DBL_EPSILON * (1.0 + norm2(half));
    const double r_next = r * std::exp(rate * hj) + err;
    // Speed bound near the enclosure, then the deviation of the path from the
    // chord between its endpoints over the step.
    const double speed = rk.max_speed + lf * (std::max(r, r_next) + hj * rk.max_speed);
    const double wobble = lf * hj * hj * speed;

    Box seg = box_expand(box_hull(c, half), std::max(r, r_next) + wobble);
    if (auto apriori = picard_enclosure(sys, box_expand(Box::point(c), r), hj)) {
      Box tight;
      if (box_intersect(seg, *apriori, tight)) seg = tight;
    }

    if (box_dia(seg) > epsilon) return std::nullopt;
    if (!sys.domain().contains(seg))
      throw DomainEscape("enclosure from seed " + format_point(x0) + " leaves the domain near t = " +
                             std::to_string(t0),
                         t0, x0);
    boxes.push_back(std::move(seg));
    ends.push_back(t1);
    c = std::move(half);
    r = r_next;
  }
  return Pipe(std::move(boxes), std::move(ends));
}

}  // namespace

double enclosure_rate(const System& sys) {
  // A witness with identity alphas bounds the separation of any two
  // trajectories, so chaining short steps gives growth at its initial rate.
  const WitnessDecl& w = sys.witness();
  if (w.alpha_coef != 1.0 || w.alpha_power != 1.0) return sys.lf();
  if (w.gamma) return std::min(sys.lf(), *w.gamma);
  if (!w.rate_table.empty()) return std::min(sys.lf(), w.rate_table.front().second);
  return sys.lf();
}

SimPipe simulate(const System& sys, std::span<const double> x0, double epsilon, double t_end, double tau) {
  if (x0.size() != sys.n()) throw DimensionMismatch("simulate: seed dimension differs from n");
  if (!(epsilon > 0.0) || !(t_end > 0.0) || !(tau > 0.0))
    throw std::invalid_argument("simulate: epsilon, t_end and tau must be positive");
  Point seed(x0.begin(), x0.end());
  if (!sys.domain().contains(seed)) throw DomainEscape("seed " + format_point(seed) + " is outside the domain", 0.0, seed);

  for (double h = std::min(tau, t_end); h >= 1e-12 * t_end; h *= 0.5) {
    if (auto pipe = run_fixed_step(sys, seed, epsilon, t_end, h))
      return SimPipe{std::move(*pipe), seed, SimParams{epsilon, tau, t_end}, h};
  }
  throw SimulationError("cannot meet epsilon = " + std::to_string(epsilon) + " from seed " + format_point(seed) +
                            ": step size underflow",
                        seed);
}

// ---------------------------------------------------------------------------

namespace {

struct StopIntegration {};

}  // namespace

Trajectory reference_trajectory_at(const System& sys, std::span<const double> x0, const std::vector<double>& times,
                                   bool stop_at_escape) {
  namespace odeint = boost::numeric::odeint;
  using State = std::vector<double>;
  if (x0.size() != sys.n()) throw DimensionMismatch("reference_trajectory: seed dimension differs from n");
  if (times.empty()) return {};
  if (times.front() < 0.0 || !std::is_sorted(times.begin(), times.end()))
    throw std::invalid_argument("reference_trajectory: times must be sorted and non-negative");

  std::vector<double> grid;
  const bool prepended = times.front() > 0.0;
  if (prepended) grid.push_back(0.0);
  grid.insert(grid.end(), times.begin(), times.end());

  Trajectory out;
  State x(x0.begin(), x0.end());
  auto rhs = [&](const State& s, State& dx, double t) {
    sys.field_into(s, dx);
    check_finite(dx, t);
  };
  auto observer = [&](const State& s, double t) {
    if (!sys.domain().contains(s)) {
      if (stop_at_escape) throw StopIntegration{};
      throw DomainEscape("reference trajectory from " + format_point(x0) + " leaves the domain at t = " +
                             std::to_string(t),
                         t, Point(x0.begin(), x0.end()));
    }
    out.times.push_back(t);
    out.states.push_back(s);
  };

  if (grid.size() == 1) {
    observer(x, grid.front());
    return out;
  }
  const double span = grid.back() - grid.front();
  const double dt0 = span > 0.0 ? std::min(1e-3, span * 1e-3) : 1e-3;
  auto stepper = odeint::make_dense_output(1e-12, 1e-10, odeint::runge_kutta_dopri5<State>());
  try {
    odeint::integrate_times(stepper, rhs, x, grid.begin(), grid.end(), dt0, observer);
  } catch (const StopIntegration&) {
  }
  if (prepended && !out.times.empty()) {
    out.times.erase(out.times.begin());
    out.states.erase(out.states.begin());
  }
  return out;
}

Trajectory reference_trajectory(const System& sys, std::span<const double> x0, double t_end, std::size_t samples) {
  if (samples < 2) throw std::invalid_argument("reference_trajectory: need at least two samples");
  if (!(t_end >= 0.0)) throw std::invalid_argument("reference_trajectory: t_end must be non-negative");
  std::vector<double> times(samples);
  for (std::size_t i = 0; i < samples; ++i)
    times[i] = i + 1 == samples ? t_end : t_end * static_cast<double>(i) / static_cast<double>(samples - 1);
  return reference_trajectory_at(sys, x0, times, false);
}

Trajectory output_trace(const System& sys, const Trajectory& traj) {
  Trajectory out;
  out.times = traj.times;
  out.states.reserve(traj.size());
  for (const auto& s : traj.states) out.states.push_back(eval_output(sys, s));
  return out;
}

}  // namespace dynabs
