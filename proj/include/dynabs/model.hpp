#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dynabs/expr.hpp"
#include "dynabs/geometry.hpp"

namespace dynabs {

// Discrepancy declaration carried by a system file. The discrepancy module
// turns it into a witness; absent any declaration the Lipschitz constant of f
// is used as the exponential rate.
struct WitnessDecl {
  std::optional<double> gamma;
  // (start time, rate) pairs of a piecewise-constant exponential rate; the
  // first start time is 0.
  std::vector<std::pair<double, double>> rate_table;
  // alpha1 = alpha2 = coef * s^power.
  double alpha_coef = 1.0;
  double alpha_power = 1.0;

  friend bool operator==(const WitnessDecl&, const WitnessDecl&) = default;
};

// Plain field set of a system, before validation.
struct SystemSpec {
  std::string name = "system";
  Box theta;
  Box domain;
  std::vector<Expr> f;
  std::vector<Expr> g;
  double lf = 0.0;
  double lg = 1.0;
  double sg = 1.0;
  WitnessDecl witness;
};

// An (n, m)-dimensional autonomous system: initial box theta, dynamics f,
// output map g, and the constants lf, lg, sg claimed valid on `domain`.
class System {
 public:
  explicit System(SystemSpec spec);

  const std::string& name() const { return spec_.name; }
  std::size_t n() const { return spec_.theta.dim(); }
  std::size_t m() const { return spec_.g.size(); }
  const Box& theta() const { return spec_.theta; }
  const Box& domain() const { return spec_.domain; }
  const std::vector<Expr>& f() const { return spec_.f; }
  const std::vector<Expr>& g() const { return spec_.g; }
  double lf() const { return spec_.lf; }
  double lg() const { return spec_.lg; }
  double sg() const { return spec_.sg; }
  const WitnessDecl& witness() const { return spec_.witness; }
  const SystemSpec& spec() const { return spec_; }

  bool field_is_constant() const;
  bool output_is_identity() const;

  // Unchecked evaluation into caller storage; used by the integrators.
  void field_into(std::span<const double> x, std::span<double> out) const;
  void field_into(std::span<const Interval> x, std::span<Interval> out) const;

 private:
  SystemSpec spec_;
  std::vector<Program> f_code_;
  std::vector<Program> g_code_;

  friend Point eval_output(const System&, std::span<const double>);
};

System parse_system(std::string_view text);
System load_system(const std::string& path);
std::string print_system(const System& sys);

// f(x); throws EvalError naming the first non-finite component.
Point eval_field(const System& sys, std::span<const double> x);
Point eval_output(const System& sys, std::span<const double> x);

// Largest |f(a) - f(b)| / |a - b| over sampled pairs in the domain. A lower
// bound on the true constant; never substituted for the declared lf.
double estimate_lipschitz(const System& sys, std::size_t samples, unsigned long long seed = 0x5eedULL);

}  // namespace dynabs
