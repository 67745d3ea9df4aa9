#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dynabs/interval.hpp"

namespace dynabs {

// Immutable expression tree over state variables x1..xn. Nodes are shared, so
// copies are cheap and safe to read from many threads.
class Expr {
 public:
  enum class Kind { constant, variable, add, sub, mul, div, pow, neg, sin, cos, exp, sqrt };

  static Expr constant(double v);
  static Expr variable(std::size_t index);
  static Expr binary(Kind op, Expr lhs, Expr rhs);
  // Unary minus of a literal folds into a negative literal, so the printed
  // form always parses back to the same tree.
  static Expr unary(Kind op, Expr operand);

  Kind kind() const;
  double value() const;
  std::size_t index() const;
  const Expr& lhs() const;
  const Expr& rhs() const;
  const Expr& operand() const { return lhs(); }

  bool is_binary() const;
  bool depends_on_state() const;
  // One past the largest variable index referenced, 0 for closed expressions.
  std::size_t arity() const;

  friend bool operator==(const Expr& a, const Expr& b);

 private:
  struct Node;
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

// Parses an infix expression. `^` binds tightest and is right-associative;
// unary minus sits between `^` and `*`. Column numbers in errors are offset by
// `column_offset` so callers can report positions within a larger line.
Expr parse_expr(std::string_view text, std::size_t n_vars, int line = 0, int column_offset = 0);

std::string to_string(const Expr& e);

// Folds closed subtrees into literals. Used for structural comparison of
// output maps.
Expr normalize(const Expr& e);

// Flat postfix form of an expression for repeated evaluation.
class Program {
 public:
  Program() = default;
  explicit Program(const Expr& e);

  double eval(std::span<const double> x) const;
  Interval eval(std::span<const Interval> x) const;

 private:
  enum class Op : unsigned char { push_const, push_var, add, sub, mul, div, pow, pow_int, neg, sin, cos, exp, sqrt };
  struct Instr {
    Op op;
    double value = 0.0;
    std::size_t index = 0;
  };

  template <class T>
  T run(std::span<const T> x) const;

  void emit(const Expr& e);

  std::vector<Instr> code_;
  std::size_t max_stack_ = 0;
};

}  // namespace dynabs
