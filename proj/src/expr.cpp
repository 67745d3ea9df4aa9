#include "dynabs/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <stdexcept>

#include "dynabs/error.hpp"

namespace dynabs {

struct Expr::Node {
  Kind kind;
  double value = 0.0;
  std::size_t index = 0;
  std::vector<Expr> children;
};

Expr Expr::constant(double v) { return Expr(std::make_shared<const Node>(Node{Kind::constant, v, 0, {}})); }

Expr Expr::variable(std::size_t index) {
  return Expr(std::make_shared<const Node>(Node{Kind::variable, 0.0, index, {}}));
}

Expr Expr::binary(Kind op, Expr lhs, Expr rhs) {
  switch (op) {
    case Kind::add:
    case Kind::sub:
    case Kind::mul:
    case Kind::div:
    case Kind::pow:
      break;
    default:
      throw std::invalid_argument("Expr::binary: not a binary operator");
  }
  return Expr(std::make_shared<const Node>(Node{op, 0.0, 0, {std::move(lhs), std::move(rhs)}}));
}

Expr Expr::unary(Kind op, Expr operand) {
  switch (op) {
    case Kind::neg:
      if (operand.kind() == Kind::constant) return constant(-operand.value());
      break;
    case Kind::sin:
    case Kind::cos:
    case Kind::exp:
    case Kind::sqrt:
      break;
    default:
      throw std::invalid_argument("Expr::unary: not a unary operator");
  }
  return Expr(std::make_shared<const Node>(Node{op, 0.0, 0, {std::move(operand)}}));
}

Expr::Kind Expr::kind() const { return node_->kind; }
double Expr::value() const { return node_->value; }
std::size_t Expr::index() const { return node_->index; }
const Expr& Expr::lhs() const { return node_->children.at(0); }
const Expr& Expr::rhs() const { return node_->children.at(1); }
bool Expr::is_binary() const { return node_->children.size() == 2; }

bool Expr::depends_on_state() const { return arity() > 0; }

std::size_t Expr::arity() const {
  if (kind() == Kind::variable) return index() + 1;
  std::size_t a = 0;
  for (const auto& c : node_->children) a = std::max(a, c.arity());
  return a;
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Expr::Kind::constant:
      return a.value() == b.value();
    case Expr::Kind::variable:
      return a.index() == b.index();
    default:
      break;
  }
  const auto& ca = a.node_->children;
  const auto& cb = b.node_->children;
  if (ca.size() != cb.size()) return false;
  for (std::size_t i = 0; i < ca.size(); ++i)
    if (!(ca[i] == cb[i])) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

class ExprParser {
 public:
  ExprParser(std::string_view text, std::size_t n_vars, int line, int offset)
      : s_(text), n_vars_(n_vars), line_(line), offset_(offset) {}

  Expr parse() {
    Expr e = expr();
    skip_ws();
    if (pos_ < s_.size()) fail(std::string("unexpected '") + s_[pos_] + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { fail_at(msg, pos_); }

  [[noreturn]] void fail_at(const std::string& msg, std::size_t at) const {
    throw ParseError(msg, line_, offset_ + static_cast<int>(at) + 1);
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expr expr() {
    Expr e = term();
    for (;;) {
      if (accept('+'))
        e = Expr::binary(Expr::Kind::add, e, term());
      else if (accept('-'))
        e = Expr::binary(Expr::Kind::sub, e, term());
      else
        return e;
    }
  }

  Expr term() {
    Expr e = unary();
    for (;;) {
      if (accept('*'))
        e = Expr::binary(Expr::Kind::mul, e, unary());
      else if (accept('/'))
        e = Expr::binary(Expr::Kind::div, e, unary());
      else
        return e;
    }
  }

  Expr unary() {
    if (accept('-')) return Expr::unary(Expr::Kind::neg, unary());
    return power();
  }

  Expr power() {
    Expr base = primary();
    if (accept('^')) return Expr::binary(Expr::Kind::pow, base, unary());
    return base;
  }

  Expr primary() {
    skip_ws();
    if (pos_ >= s_.size()) fail("unexpected end of expression");
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = expr();
      if (!accept(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    fail(std::string("unexpected '") + c + "'");
  }

  Expr number() {
    std::size_t start = pos_;
    auto digits = [&] {
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    };
    digits();
    if (pos_ < s_.size() && s_[pos_] == '.') {
      ++pos_;
      digits();
    }
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      std::size_t save = pos_++;
      if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
      if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
        digits();
      else
        pos_ = save;
    }
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s_.data() + start, s_.data() + pos_, v);
    if (ec != std::errc() || ptr != s_.data() + pos_ || !std::isfinite(v))
      fail_at("malformed number '" + std::string(s_.substr(start, pos_ - start)) + "'", start);
    return Expr::constant(v);
  }

  Expr identifier() {
    std::size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
      ++pos_;
    std::string_view name = s_.substr(start, pos_ - start);

    static constexpr std::pair<std::string_view, Expr::Kind> functions[] = {
        {"sin", Expr::Kind::sin}, {"cos", Expr::Kind::cos},
        {"exp", Expr::Kind::exp}, {"sqrt", Expr::Kind::sqrt}};
    for (auto [fname, kind] : functions) {
      if (name == fname) {
        if (!accept('(')) fail("expected '(' after " + std::string(name));
        Expr arg = expr();
        if (!accept(')')) fail("expected ')'");
        return Expr::unary(kind, arg);
      }
    }

    if (name.size() >= 2 && name[0] == 'x') {
      std::size_t k = 0;
      auto [ptr, ec] = std::from_chars(name.data() + 1, name.data() + name.size(), k);
      if (ec == std::errc() && ptr == name.data() + name.size() && name[1] != '0') {
        if (k < 1 || k > n_vars_)
          fail_at("undeclared variable '" + std::string(name) + "'", start);
        return Expr::variable(k - 1);
      }
    }
    fail_at("unknown identifier '" + std::string(name) + "'", start);
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  std::size_t n_vars_;
  int line_;
  int offset_;
};

// ---------------------------------------------------------------------------
// Printing

int precedence(const Expr& e) {
  switch (e.kind()) {
    case Expr::Kind::add:
    case Expr::Kind::sub:
      return 1;
    case Expr::Kind::mul:
    case Expr::Kind::div:
      return 2;
    case Expr::Kind::neg:
      return 3;
    case Expr::Kind::pow:
      return 4;
    case Expr::Kind::constant:
      return e.value() < 0.0 || std::signbit(e.value()) ? 3 : 5;
    default:
      return 5;
  }
}

std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, ptr);
}

void print(const Expr& e, std::string& out);

void print_wrapped(const Expr& e, bool wrap, std::string& out) {
  if (wrap) out += '(';
  print(e, out);
  if (wrap) out += ')';
}

void print(const Expr& e, std::string& out) {
  using K = Expr::Kind;
  switch (e.kind()) {
    case K::constant:
      out += format_number(e.value());
      return;
    case K::variable:
      out += 'x';
      out += std::to_string(e.index() + 1);
      return;
    case K::add:
    case K::sub:
    case K::mul:
    case K::div: {
      int p = precedence(e);
      const char* op = e.kind() == K::add   ? " + "
                       : e.kind() == K::sub ? " - "
                       : e.kind() == K::mul ? " * "
                                            : " / ";
      print_wrapped(e.lhs(), precedence(e.lhs()) < p, out);
      out += op;
      print_wrapped(e.rhs(), precedence(e.rhs()) <= p, out);
      return;
    }
    case K::pow:
      print_wrapped(e.lhs(), precedence(e.lhs()) <= 4, out);
      out += '^';
      print_wrapped(e.rhs(), precedence(e.rhs()) < 3, out);
      return;
    case K::neg:
      out += '-';
      print_wrapped(e.operand(), precedence(e.operand()) < 3, out);
      return;
    case K::sin:
    case K::cos:
    case K::exp:
    case K::sqrt:
      out += e.kind() == K::sin ? "sin(" : e.kind() == K::cos ? "cos(" : e.kind() == K::exp ? "exp(" : "sqrt(";
      print(e.operand(), out);
      out += ')';
      return;
  }
}

double apply(Expr::Kind k, double a, double b) {
  using K = Expr::Kind;
  switch (k) {
    case K::add: return a + b;
    case K::sub: return a - b;
    case K::mul: return a * b;
    case K::div: return a / b;
    case K::pow: return std::pow(a, b);
    case K::neg: return -a;
    case K::sin: return std::sin(a);
    case K::cos: return std::cos(a);
    case K::exp: return std::exp(a);
    case K::sqrt: return std::sqrt(a);
    default: return a;
  }
}

}  // namespace

Expr parse_expr(std::string_view text, std::size_t n_vars, int line, int column_offset) {
  return ExprParser(text, n_vars, line, column_offset).parse();
}

std::string to_string(const Expr& e) {
  std::string out;
  print(e, out);
  return out;
}

Expr normalize(const Expr& e) {
  using K = Expr::Kind;
  switch (e.kind()) {
    case K::constant:
    case K::variable:
      return e;
    default:
      break;
  }
  if (e.is_binary()) {
    Expr l = normalize(e.lhs());
    Expr r = normalize(e.rhs());
    if (l.kind() == K::constant && r.kind() == K::constant) {
      double v = apply(e.kind(), l.value(), r.value());
      if (std::isfinite(v)) return Expr::constant(v);
    }
    return Expr::binary(e.kind(), l, r);
  }
  Expr a = normalize(e.operand());
  if (a.kind() == K::constant) {
    double v = apply(e.kind(), a.value(), 0.0);
    if (std::isfinite(v)) return Expr::constant(v);
  }
  return Expr::unary(e.kind(), a);
}

// ---------------------------------------------------------------------------
// Compiled evaluation

Program::Program(const Expr& e) {
  std::size_t depth = 0;
  struct Walker {
    Program& p;
    std::size_t& depth;
    void push() {
      ++depth;
      p.max_stack_ = std::max(p.max_stack_, depth);
    }
    void walk(const Expr& e) {
      using K = Expr::Kind;
      switch (e.kind()) {
        case K::constant:
          p.code_.push_back({Op::push_const, e.value(), 0});
          push();
          return;
        case K::variable:
          p.code_.push_back({Op::push_var, 0.0, e.index()});
          push();
          return;
        case K::pow:
          if (e.rhs().kind() == K::constant && std::trunc(e.rhs().value()) == e.rhs().value() &&
              std::abs(e.rhs().value()) < 1e9) {
            walk(e.lhs());
            p.code_.push_back({Op::pow_int, e.rhs().value(), 0});
            return;
          }
          break;
        default:
          break;
      }
      if (e.is_binary()) {
        walk(e.lhs());
        walk(e.rhs());
        --depth;
        Op op = e.kind() == K::add   ? Op::add
                : e.kind() == K::sub ? Op::sub
                : e.kind() == K::mul ? Op::mul
                : e.kind() == K::div ? Op::div
                                     : Op::pow;
        p.code_.push_back({op, 0.0, 0});
        return;
      }
      walk(e.operand());
      Op op = e.kind() == K::neg   ? Op::neg
              : e.kind() == K::sin ? Op::sin
              : e.kind() == K::cos ? Op::cos
              : e.kind() == K::exp ? Op::exp
                                   : Op::sqrt;
      p.code_.push_back({op, 0.0, 0});
    }
  };
  Walker{*this, depth}.walk(e);
}

namespace {

double pow_int_scalar(double a, long n) { return std::pow(a, static_cast<double>(n)); }

}  // namespace

template <class T>
T Program::run(std::span<const T> x) const {
  // Small fixed buffer covers every realistic field; fall back to the heap.
  T local[32]{};
  std::vector<T> heap;
  T* st = local;
  if (max_stack_ > 32) {
    heap.resize(max_stack_);
    st = heap.data();
  }
  std::size_t sp = 0;
  for (const Instr& in : code_) {
    switch (in.op) {
      case Op::push_const: st[sp++] = T(in.value); break;
      case Op::push_var: st[sp++] = x[in.index]; break;
      case Op::add: --sp; st[sp - 1] = st[sp - 1] + st[sp]; break;
      case Op::sub: --sp; st[sp - 1] = st[sp - 1] - st[sp]; break;
      case Op::mul: --sp; st[sp - 1] = st[sp - 1] * st[sp]; break;
      case Op::div: --sp; st[sp - 1] = st[sp - 1] / st[sp]; break;
      case Op::pow: {
        --sp;
        using std::pow;
        st[sp - 1] = pow(st[sp - 1], st[sp]);
        break;
      }
      case Op::pow_int:
        if constexpr (std::is_same_v<T, double>)
          st[sp - 1] = pow_int_scalar(st[sp - 1], static_cast<long>(in.value));
        else
          st[sp - 1] = pow_int(st[sp - 1], static_cast<long>(in.value));
        break;
      case Op::neg: st[sp - 1] = -st[sp - 1]; break;
      case Op::sin: { using std::sin; st[sp - 1] = sin(st[sp - 1]); break; }
      case Op::cos: { using std::cos; st[sp - 1] = cos(st[sp - 1]); break; }
      case Op::exp: { using std::exp; st[sp - 1] = exp(st[sp - 1]); break; }
      case Op::sqrt: { using std::sqrt; st[sp - 1] = sqrt(st[sp - 1]); break; }
    }
  }
  return st[0];
}

double Program::eval(std::span<const double> x) const { return run<double>(x); }
Interval Program::eval(std::span<const Interval> x) const { return run<Interval>(x); }

ParseError::ParseError(const std::string& what, int line, int column)
    : Error(line > 0 ? "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what
                     : "column " + std::to_string(column) + ": " + what),
      line_(line),
      column_(column) {}

}  // namespace dynabs
