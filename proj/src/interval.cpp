#include "dynabs/interval.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace dynabs {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double down(double x, int ulps = 1) {
  for (int i = 0; i < ulps; ++i) x = std::nextafter(x, -kInf);
  return x;
}

double up(double x, int ulps = 1) {
  for (int i = 0; i < ulps; ++i) x = std::nextafter(x, kInf);
  return x;
}

Interval outward(double lo, double hi, int ulps = 1) {
  if (std::isnan(lo) || std::isnan(hi)) return Interval::entire();
  return {down(lo, ulps), up(hi, ulps)};
}

// libm transcendental functions are not correctly rounded; two ulps of
// widening covers the error bounds of glibc's implementations.
constexpr int kLibmUlps = 2;

Interval log(const Interval& a) {
  if (a.lo <= 0.0) return Interval::entire();
  return outward(std::log(a.lo), std::log(a.hi), kLibmUlps);
}

// True when some x = base + k * period lies in [lo, hi], padded by slack so
// that rounding in the constants can only make the answer more conservative.
bool hits(double lo, double hi, double base, double period) {
  constexpr double slack = 1e-12;
  double k = std::ceil((lo - base) / period - slack);
  return base + k * period <= hi + slack * (1.0 + std::abs(hi));
}

}  // namespace

bool Interval::bounded() const { return std::isfinite(lo) && std::isfinite(hi); }

Interval operator+(const Interval& a, const Interval& b) {
  return outward(a.lo + b.lo, a.hi + b.hi);
}

Interval operator-(const Interval& a, const Interval& b) {
  return outward(a.lo - b.hi, a.hi - b.lo);
}

Interval operator-(const Interval& a) { return {-a.hi, -a.lo}; }

Interval operator*(const Interval& a, const Interval& b) {
  const double p[] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
  for (double v : p)
    if (std::isnan(v)) return Interval::entire();
  auto [mn, mx] = std::minmax_element(std::begin(p), std::end(p));
  return outward(*mn, *mx);
}

Interval operator/(const Interval& a, const Interval& b) {
  if (b.contains(0.0)) return Interval::entire();
  Interval inv = outward(1.0 / b.hi, 1.0 / b.lo);
  return a * inv;
}

Interval pow_int(const Interval& a, long n) {
  if (n == 0) return {1.0, 1.0};
  if (n < 0) return Interval(1.0) / pow_int(a, -n);
  const double dn = static_cast<double>(n);
  double plo = std::pow(a.lo, dn);
  double phi = std::pow(a.hi, dn);
  if (n % 2 == 1) return outward(plo, phi, kLibmUlps);
  if (a.lo >= 0.0) return outward(plo, phi, kLibmUlps);
  if (a.hi <= 0.0) return outward(phi, plo, kLibmUlps);
  return {0.0, up(std::max(plo, phi), kLibmUlps)};
}

Interval exp(const Interval& a) {
  Interval r = outward(std::exp(a.lo), std::exp(a.hi), kLibmUlps);
  r.lo = std::max(r.lo, 0.0);
  return r;
}

Interval pow(const Interval& a, const Interval& b) {
  if (b.lo == b.hi && std::trunc(b.lo) == b.lo && std::abs(b.lo) < 1e9)
    return pow_int(a, static_cast<long>(b.lo));
  if (a.lo > 0.0) return exp(b * log(a));
  return Interval::entire();
}

Interval sqrt(const Interval& a) {
  if (a.hi < 0.0) return Interval::entire();
  double lo = a.lo > 0.0 ? down(std::sqrt(a.lo)) : 0.0;
  return {std::max(lo, 0.0), up(std::sqrt(a.hi))};
}

Interval sin(const Interval& a) {
  constexpr double pi = std::numbers::pi;
  if (!a.bounded() || a.width() >= 2.0 * pi) return {-1.0, 1.0};
  Interval r = outward(std::min(std::sin(a.lo), std::sin(a.hi)),
                       std::max(std::sin(a.lo), std::sin(a.hi)), kLibmUlps);
  if (hits(a.lo, a.hi, pi / 2.0, 2.0 * pi)) r.hi = 1.0;
  if (hits(a.lo, a.hi, -pi / 2.0, 2.0 * pi)) r.lo = -1.0;
  return {std::max(r.lo, -1.0), std::min(r.hi, 1.0)};
}

Interval cos(const Interval& a) {
  constexpr double pi = std::numbers::pi;
  if (!a.bounded() || a.width() >= 2.0 * pi) return {-1.0, 1.0};
  Interval r = outward(std::min(std::cos(a.lo), std::cos(a.hi)),
                       std::max(std::cos(a.lo), std::cos(a.hi)), kLibmUlps);
  if (hits(a.lo, a.hi, 0.0, 2.0 * pi)) r.hi = 1.0;
  if (hits(a.lo, a.hi, pi, 2.0 * pi)) r.lo = -1.0;
  return {std::max(r.lo, -1.0), std::min(r.hi, 1.0)};
}

Interval hull(const Interval& a, const Interval& b) {
  return {std::min(a.lo, b.lo), std::max(a.hi, b.hi)};
}

}  // namespace dynabs
