#include "dynabs/model.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>

#include "dynabs/error.hpp"

namespace dynabs {

System::System(SystemSpec spec) : spec_(std::move(spec)) {
  const std::size_t n = spec_.theta.dim();
  if (n == 0) throw std::invalid_argument("system: dimension must be positive");
  if (spec_.domain.dim() != n) throw std::invalid_argument("system: domain dimension differs from theta");
  if (!spec_.domain.contains(spec_.theta)) throw std::invalid_argument("system: theta is not inside the domain");
  if (spec_.f.size() != n) throw std::invalid_argument("system: need one field expression per state");
  if (spec_.g.empty()) throw std::invalid_argument("system: output map is empty");
  for (const auto& e : spec_.f)
    if (e.arity() > n) throw std::invalid_argument("system: field references an undeclared variable");
  for (const auto& e : spec_.g)
    if (e.arity() > n) throw std::invalid_argument("system: output references an undeclared variable");
  if (!std::isfinite(spec_.lf) || spec_.lf < 0.0) throw std::invalid_argument("system: lipschitz_f must be >= 0");
  if (spec_.lf == 0.0 && !field_is_constant())
    throw std::invalid_argument("system: lipschitz_f must be positive for a non-constant field");
  if (!(spec_.sg > 0.0)) throw std::invalid_argument("system: sensitivity_g must be positive");
  if (!(spec_.sg <= spec_.lg) || !std::isfinite(spec_.lg))
    throw std::invalid_argument("system: sensitivity_g exceeds lipschitz_g");
  const auto& w = spec_.witness;
  if (!(w.alpha_coef > 0.0) || !(w.alpha_power > 0.0))
    throw std::invalid_argument("system: discrepancy alpha must have positive coefficient and power");
  if (w.gamma && !w.rate_table.empty())
    throw std::invalid_argument("system: declare either a discrepancy gamma or a table, not both");
  if (!w.rate_table.empty()) {
    if (w.rate_table.front().first != 0.0)
      throw std::invalid_argument("system: discrepancy table must start at time 0");
    for (std::size_t i = 1; i < w.rate_table.size(); ++i)
      if (!(w.rate_table[i].first > w.rate_table[i - 1].first))
        throw std::invalid_argument("system: discrepancy table times must increase");
  }

  for (const auto& e : spec_.f) f_code_.emplace_back(e);
  for (const auto& e : spec_.g) g_code_.emplace_back(e);
}

bool System::field_is_constant() const {
  return std::none_of(spec_.f.begin(), spec_.f.end(), [](const Expr& e) { return e.depends_on_state(); });
}

bool System::output_is_identity() const {
  if (m() != n()) return false;
  for (std::size_t i = 0; i < m(); ++i)
    if (!(normalize(spec_.g[i]) == Expr::variable(i))) return false;
  return true;
}

void System::field_into(std::span<const double> x, std::span<double> out) const {
  for (std::size_t i = 0; i < f_code_.size(); ++i) out[i] = f_code_[i].eval(x);
}

void System::field_into(std::span<const Interval> x, std::span<Interval> out) const {
  for (std::size_t i = 0; i < f_code_.size(); ++i) out[i] = f_code_[i].eval(x);
}

Point eval_field(const System& sys, std::span<const double> x) {
  if (x.size() != sys.n()) throw DimensionMismatch("eval_field: point dimension differs from n");
  Point out(sys.n());
  sys.field_into(x, out);
  for (std::size_t i = 0; i < out.size(); ++i)
    if (!std::isfinite(out[i]))
      throw EvalError("non-finite value in field component x" + std::to_string(i + 1) + "'", i);
  return out;
}

Point eval_output(const System& sys, std::span<const double> x) {
  if (x.size() != sys.n()) throw DimensionMismatch("eval_output: point dimension differs from n");
  Point out(sys.m());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = sys.g_code_[i].eval(x);
    if (!std::isfinite(out[i]))
      throw EvalError("non-finite value in output component y" + std::to_string(i + 1), i);
  }
  return out;
}

double estimate_lipschitz(const System& sys, std::size_t samples, unsigned long long seed) {
  if (samples < 2) throw std::invalid_argument("estimate_lipschitz: need at least two samples");
  const Box& d = sys.domain();
  const std::size_t n = sys.n();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  auto draw = [&] {
    Point p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = d.lo(i) + unit(rng) * d.width(i);
    return p;
  };

  std::vector<Point> pts;
  std::vector<Point> vals;
  pts.reserve(2 * samples);
  for (std::size_t k = 0; k < samples; ++k) pts.push_back(draw());
  // Close neighbours catch local slopes that far-apart pairs average out.
  const double step = 1e-4 * std::max(box_dia(d), 1e-12);
  std::normal_distribution<double> normal;
  for (std::size_t k = 0; k < samples; ++k) {
    Point q = pts[k];
    Point dir(n);
    for (auto& v : dir) v = normal(rng);
    double len = norm2(dir);
    if (len == 0.0) continue;
    for (std::size_t i = 0; i < n; ++i) q[i] = std::clamp(q[i] + step * dir[i] / len, d.lo(i), d.hi(i));
    pts.push_back(std::move(q));
  }
  for (const auto& p : pts) vals.push_back(eval_field(sys, p));

  double best = 0.0;
  for (std::size_t a = 0; a < pts.size(); ++a) {
    for (std::size_t b = a + 1; b < pts.size(); ++b) {
      double dx = distance(pts[a], pts[b]);
      if (dx <= 0.0) continue;
      best = std::max(best, distance(vals[a], vals[b]) / dx);
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// System definition files

namespace {

class LineCursor {
 public:
  LineCursor(std::string_view text, int line) : s_(text), line_(line) {}

  [[noreturn]] void fail(const std::string& msg) const { fail_at(msg, pos_); }
  [[noreturn]] void fail_at(const std::string& msg, std::size_t at) const {
    throw ParseError(msg, line_, static_cast<int>(at) + 1);
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool at_end() {
    skip_ws();
    return pos_ >= s_.size();
  }
  std::size_t pos() const { return pos_; }
  std::string_view rest() const { return s_.substr(pos_); }

  std::string_view word() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < s_.size() && !std::isspace(static_cast<unsigned char>(s_[pos_])) && s_[pos_] != '[' &&
           s_[pos_] != '=' && s_[pos_] != ':')
      ++pos_;
    if (start == pos_) fail("expected a word");
    return s_.substr(start, pos_ - start);
  }

  void expect(char c) {
    skip_ws();
    if (pos_ >= s_.size() || s_[pos_] != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  double number() {
    skip_ws();
    std::size_t start = pos_;
    if (pos_ < s_.size() && (s_[pos_] == '-' || s_[pos_] == '+')) ++pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.' ||
                                ((s_[pos_] == '-' || s_[pos_] == '+') && (s_[pos_ - 1] == 'e' || s_[pos_ - 1] == 'E'))))
      ++pos_;
    std::string_view tok = s_.substr(start, pos_ - start);
    if (!tok.empty() && tok[0] == '+') tok.remove_prefix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (tok.empty() || ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(v))
      fail_at("expected a number", start);
    return v;
  }

  std::size_t count() {
    std::size_t start = pos_;
    double v = number();
    if (v < 1 || std::trunc(v) != v) fail_at("expected a positive integer", start);
    return static_cast<std::size_t>(v);
  }

  int line() const { return line_; }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
  int line_;
};

// 1-based k of a name "<prefix><k>", or 0 when the name has another shape.
std::size_t name_index(std::string_view w, char prefix) {
  std::size_t k = 0;
  if (w.size() < 2 || w[0] != prefix || w[1] == '0') return 0;
  auto [ptr, ec] = std::from_chars(w.data() + 1, w.data() + w.size(), k);
  if (ec != std::errc() || ptr != w.data() + w.size()) return 0;
  return k;
}

// Reads "x<k>" or "y<k>" with k in [1, limit]; returns k - 1.
std::size_t indexed_name(LineCursor& cur, char prefix, std::size_t limit, std::string_view what) {
  cur.skip_ws();
  std::size_t at = cur.pos();
  std::string_view w = cur.word();
  std::size_t k = name_index(w, prefix);
  if (k == 0) cur.fail_at("expected " + std::string(what) + " name", at);
  if (k > limit) cur.fail_at("undeclared variable '" + std::string(w) + "'", at);
  return k - 1;
}

struct BoxDecl {
  std::vector<std::optional<std::pair<double, double>>> ranges;
  int line = 0;
};

void parse_ranges(LineCursor& cur, std::size_t n, BoxDecl& out) {
  out.ranges.assign(n, std::nullopt);
  out.line = cur.line();
  while (!cur.at_end()) {
    std::size_t at = cur.pos();
    std::size_t k = indexed_name(cur, 'x', n, "state variable");
    std::size_t kw = cur.pos();
    if (cur.word() != "in") cur.fail_at("expected 'in'", kw);
    cur.expect('[');
    double a = cur.number();
    cur.expect(',');
    double b = cur.number();
    cur.expect(']');
    if (a > b) cur.fail_at("empty interval for x" + std::to_string(k + 1), at);
    if (out.ranges[k]) cur.fail_at("x" + std::to_string(k + 1) + " declared twice", at);
    out.ranges[k] = std::make_pair(a, b);
  }
  for (std::size_t i = 0; i < n; ++i)
    if (!out.ranges[i]) cur.fail("missing range for x" + std::to_string(i + 1));
}

Box to_box(const BoxDecl& d) {
  Point lo, hi;
  for (const auto& r : d.ranges) {
    lo.push_back(r->first);
    hi.push_back(r->second);
  }
  return Box(std::move(lo), std::move(hi));
}

// Absent a domain the constants are taken to hold on the initial box inflated
// tenfold about its center; zero-width axes get half-width 1.
Box default_domain(const Box& theta) {
  Point lo(theta.dim()), hi(theta.dim());
  for (std::size_t i = 0; i < theta.dim(); ++i) {
    double c = 0.5 * (theta.lo(i) + theta.hi(i));
    double h = theta.width(i) > 0.0 ? 5.0 * theta.width(i) : 1.0;
    lo[i] = c - h;
    hi[i] = c + h;
  }
  return Box(std::move(lo), std::move(hi));
}

std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace

System parse_system(std::string_view text) {
  SystemSpec spec;
  std::optional<std::size_t> n;
  std::optional<std::size_t> m;
  std::optional<BoxDecl> init, domain;
  std::map<std::size_t, Expr> fields, outputs;
  std::optional<double> lf, lg, sg;
  int sg_line = 0;
  std::map<std::string, int> seen;

  int line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    LineCursor cur(line, line_no);
    if (cur.at_end()) continue;
    std::size_t kw_at = cur.pos();
    std::string key(cur.word());

    auto once = [&](const std::string& k) {
      if (seen.count(k)) cur.fail_at("duplicate '" + k + "' declaration", kw_at);
      seen[k] = line_no;
    };
    auto need_dim = [&] {
      if (!n) cur.fail_at("'" + key + "' before 'dim'", kw_at);
      return *n;
    };
    auto finish = [&] {
      if (!cur.at_end()) cur.fail("unexpected trailing text");
    };

    if (key == "system") {
      once(key);
      spec.name = std::string(cur.word());
      finish();
    } else if (key == "dim") {
      once(key);
      n = cur.count();
      finish();
    } else if (key == "output_dim") {
      once(key);
      m = cur.count();
      finish();
    } else if (key == "init") {
      once(key);
      init.emplace();
      parse_ranges(cur, need_dim(), *init);
    } else if (key == "domain") {
      once(key);
      domain.emplace();
      parse_ranges(cur, need_dim(), *domain);
    } else if (key == "field") {
      std::size_t dim = need_dim();
      std::size_t at = cur.pos();
      cur.skip_ws();
      std::size_t name_at = cur.pos();
      std::string_view w = cur.word();
      if (w.empty() || w.back() != '\'') cur.fail_at("expected a derivative like x1'", name_at);
      std::size_t k = name_index(w.substr(0, w.size() - 1), 'x');
      if (k == 0) cur.fail_at("expected a derivative like x1'", name_at);
      if (k > dim) cur.fail_at("undeclared variable '" + std::string(w.substr(0, w.size() - 1)) + "'", name_at);
      --k;
      if (fields.count(k)) cur.fail_at("duplicate field for x" + std::to_string(k + 1), at);
      cur.expect('=');
      int offset = static_cast<int>(cur.pos());
      fields.emplace(k, parse_expr(cur.rest(), dim, line_no, offset));
    } else if (key == "output") {
      std::size_t dim = need_dim();
      std::size_t at = cur.pos();
      std::size_t k = indexed_name(cur, 'y', m.value_or(1u << 20), "output");
      if (outputs.count(k)) cur.fail_at("duplicate output y" + std::to_string(k + 1), at);
      cur.expect('=');
      int offset = static_cast<int>(cur.pos());
      outputs.emplace(k, parse_expr(cur.rest(), dim, line_no, offset));
    } else if (key == "lipschitz_f" || key == "lipschitz_g" || key == "sensitivity_g") {
      once(key);
      std::size_t at = cur.pos();
      double v = cur.number();
      finish();
      if (key == "lipschitz_f") {
        if (v < 0.0) cur.fail_at("lipschitz_f must be non-negative", at);
        lf = v;
      } else if (key == "lipschitz_g") {
        if (v <= 0.0) cur.fail_at("lipschitz_g must be positive", at);
        lg = v;
      } else {
        if (v <= 0.0) cur.fail_at("sensitivity_g must be positive", at);
        sg = v;
        sg_line = line_no;
      }
    } else if (key == "discrepancy") {
      std::size_t sub_at = cur.pos();
      std::string sub(cur.word());
      once("discrepancy " + sub);
      if (sub == "gamma") {
        spec.witness.gamma = cur.number();
        finish();
      } else if (sub == "alpha") {
        std::size_t at = cur.pos();
        spec.witness.alpha_coef = cur.number();
        spec.witness.alpha_power = cur.number();
        if (spec.witness.alpha_coef <= 0.0 || spec.witness.alpha_power <= 0.0)
          cur.fail_at("alpha coefficient and power must be positive", at);
        finish();
      } else if (sub == "table") {
        while (!cur.at_end()) {
          std::size_t at = cur.pos();
          double t = cur.number();
          cur.expect(':');
          double rate = cur.number();
          auto& table = spec.witness.rate_table;
          if (table.empty() ? t != 0.0 : !(t > table.back().first))
            cur.fail_at("table times must start at 0 and increase", at);
          table.emplace_back(t, rate);
        }
        if (spec.witness.rate_table.empty()) cur.fail("empty discrepancy table");
      } else {
        cur.fail_at("unknown discrepancy form '" + sub + "'", sub_at);
      }
    } else {
      cur.fail_at("unknown keyword '" + key + "'", kw_at);
    }
  }

  const int last = line_no;
  if (!n) throw ParseError("missing 'dim'", last, 1);
  if (!init) throw ParseError("missing 'init'", last, 1);
  for (std::size_t i = 0; i < *n; ++i)
    if (!fields.count(i)) throw ParseError("missing field for x" + std::to_string(i + 1) + "'", last, 1);

  spec.theta = to_box(*init);
  spec.domain = domain ? to_box(*domain) : default_domain(spec.theta);
  if (!spec.domain.contains(spec.theta))
    throw ParseError("initial box is not inside the domain", domain ? domain->line : init->line, 1);
  for (auto& [k, e] : fields) spec.f.push_back(e);

  if (outputs.empty()) {
    if (m && *m != *n) throw ParseError("output_dim differs from dim but no output map is given", last, 1);
    for (std::size_t i = 0; i < *n; ++i) spec.g.push_back(Expr::variable(i));
  } else {
    std::size_t count = m.value_or(outputs.size());
    for (std::size_t i = 0; i < count; ++i) {
      auto it = outputs.find(i);
      if (it == outputs.end()) throw ParseError("missing output y" + std::to_string(i + 1), last, 1);
      spec.g.push_back(it->second);
    }
    if (outputs.size() != count) throw ParseError("output index beyond output_dim", last, 1);
  }

  spec.lg = lg.value_or(1.0);
  spec.sg = sg.value_or(1.0);
  if (spec.sg > spec.lg)
    throw ParseError("sensitivity_g exceeds lipschitz_g", sg_line ? sg_line : last, 1);

  bool constant_field = std::none_of(spec.f.begin(), spec.f.end(), [](const Expr& e) { return e.depends_on_state(); });
  if (!lf && !constant_field) throw ParseError("missing 'lipschitz_f' for a non-constant field", last, 1);
  spec.lf = lf.value_or(0.0);
  if (spec.lf == 0.0 && !constant_field)
    throw ParseError("lipschitz_f must be positive for a non-constant field", seen["lipschitz_f"], 1);

  try {
    return System(std::move(spec));
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what(), last, 1);
  }
}

System load_system(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open system file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_system(ss.str());
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what(), e.line(), e.column());
  }
}

std::string print_system(const System& sys) {
  std::ostringstream out;
  auto ranges = [&](const Box& b) {
    for (std::size_t i = 0; i < b.dim(); ++i)
      out << "  x" << i + 1 << " in [" << format_number(b.lo(i)) << ", " << format_number(b.hi(i)) << "]";
  };
  out << "system " << sys.name() << "\n";
  out << "dim " << sys.n() << "\n";
  out << "output_dim " << sys.m() << "\n";
  out << "init";
  ranges(sys.theta());
  out << "\ndomain";
  ranges(sys.domain());
  out << "\n";
  for (std::size_t i = 0; i < sys.n(); ++i) out << "field x" << i + 1 << "' = " << to_string(sys.f()[i]) << "\n";
  for (std::size_t i = 0; i < sys.m(); ++i) out << "output y" << i + 1 << " = " << to_string(sys.g()[i]) << "\n";
  out << "lipschitz_f " << format_number(sys.lf()) << "\n";
  out << "lipschitz_g " << format_number(sys.lg()) << "\n";
  out << "sensitivity_g " << format_number(sys.sg()) << "\n";
  const auto& w = sys.witness();
  if (w.gamma) out << "discrepancy gamma " << format_number(*w.gamma) << "\n";
  if (!w.rate_table.empty()) {
    out << "discrepancy table";
    for (auto [t, r] : w.rate_table) out << " " << format_number(t) << ":" << format_number(r);
    out << "\n";
  }
  if (w.alpha_coef != 1.0 || w.alpha_power != 1.0)
    out << "discrepancy alpha " << format_number(w.alpha_coef) << " " << format_number(w.alpha_power) << "\n";
  return out.str();
}

}  // namespace dynabs
