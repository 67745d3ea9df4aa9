#pragma once

#include <limits>

namespace dynabs {

// Closed interval with outward-rounded arithmetic. Bounds may be infinite when
// an operation has no finite enclosure (division by an interval containing 0).
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  Interval() = default;
  Interval(double v) : lo(v), hi(v) {}  // NOLINT: implicit by design of eval templates
  Interval(double l, double h) : lo(l), hi(h) {}

  static Interval entire() {
    constexpr double inf = std::numeric_limits<double>::infinity();
    return {-inf, inf};
  }

  double width() const { return hi - lo; }
  double mid() const { return 0.5 * (lo + hi); }
  bool contains(double v) const { return lo <= v && v <= hi; }
  bool bounded() const;
};

Interval operator+(const Interval& a, const Interval& b);
Interval operator-(const Interval& a, const Interval& b);
Interval operator*(const Interval& a, const Interval& b);
Interval operator/(const Interval& a, const Interval& b);
Interval operator-(const Interval& a);

Interval pow_int(const Interval& a, long n);
Interval pow(const Interval& a, const Interval& b);
Interval sin(const Interval& a);
Interval cos(const Interval& a);
Interval exp(const Interval& a);
Interval sqrt(const Interval& a);

Interval hull(const Interval& a, const Interval& b);

}  // namespace dynabs
