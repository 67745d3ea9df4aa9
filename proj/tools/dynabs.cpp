// dynabs: command-line front end.
//
// Exit codes: 0 success (check: C_ABSTRACTION), 1 check COUNTEREXAMPLE or
// validate found a violation, 2 check UNKNOWN or reach without a fixpoint,
// 3 runtime error, 64 usage error.

#include <charconv>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dynabs/abstraction.hpp"
#include "dynabs/discrepancy.hpp"
#include "dynabs/error.hpp"
#include "dynabs/model.hpp"
#include "dynabs/parallel.hpp"
#include "dynabs/pipes.hpp"
#include "dynabs/reach.hpp"
#include "dynabs/report.hpp"
#include "dynabs/simulate.hpp"

using namespace dynabs;

namespace {

constexpr int kExitError = 3;
constexpr int kExitUsage = 64;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Point parse_point(const std::string& text, std::size_t n) {
  Point p;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    double v = 0.0;
    const char* first = text.data() + pos;
    const char* last = text.data() + comma;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) throw UsageError("bad number in point '" + text + "'");
    p.push_back(v);
    pos = comma + 1;
  }
  if (p.size() != n)
    throw UsageError("point '" + text + "' has " + std::to_string(p.size()) + " coordinates, system has " +
                     std::to_string(n));
  return p;
}

// Writes through `fn` to `path`, or to stdout when path is "-".
template <class Fn>
void emit(const std::string& path, Fn fn) {
  if (path == "-") {
    fn(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream f(path);
  if (!f) throw Error("cannot write " + path);
  fn(f);
  if (!f) throw Error("write failed for " + path);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void finish(RunRecord& rec, const std::string& log, bool record_to_stderr) {
  (record_to_stderr ? std::cerr : std::cout) << rec.line() << '\n';
  if (!log.empty()) rec.append_to(log);
}

void plot_pipe(const Pipe& p, const std::string& path, const std::string& title) {
  if (p.dim() < 2) throw Error("svg output needs a system with at least two state dimensions");
  SvgPlot svg;
  svg.set_title(title);
  for (const auto& b : p.boxes()) svg.add_box(b, "#3b6ea5");
  emit(path, [&](std::ostream& os) { svg.write(os); });
}

// --- simulate / bloat ------------------------------------------------------

struct SimOptions {
  std::string sys;
  std::string x0;
  double t_end = 0.0;
  double eps = 0.0;
  double tau = 0.0;
  double delta = 0.0;
  std::string out = "-";
  std::string svg;
  std::string log;
};

int run_simulate(const SimOptions& o, bool with_bloat) {
  auto t0 = std::chrono::steady_clock::now();
  System sys = load_system(o.sys);
  Point x0 = parse_point(o.x0, sys.n());
  SimPipe sim = simulate(sys, x0, o.eps, o.t_end, o.tau);
  Pipe pipe = with_bloat ? bloat(sim, o.delta, declared_witness(sys)) : sim.pipe;

  emit(o.out, [&](std::ostream& os) { write_pipe_csv(os, pipe); });
  if (!o.svg.empty()) plot_pipe(pipe, o.svg, sys.name());

  RunRecord rec(with_bloat ? "bloat" : "simulate");
  rec.set("sys", o.sys).set("x0", format_point(x0)).set("T", o.t_end).set("eps", o.eps).set("tau", o.tau);
  if (with_bloat) rec.set("delta", o.delta);
  rec.set("step", sim.step)
      .set("segments", static_cast<long long>(pipe.len()))
      .set("dia", pipe_dia(pipe))
      .set("out", o.out);
  if (!o.svg.empty()) rec.set("svg", o.svg);
  rec.set("wall_s", seconds_since(t0));
  finish(rec, o.log, o.out == "-");
  return 0;
}

// --- check -----------------------------------------------------------------

struct CheckOptions {
  std::string sys1;
  std::string sys2;
  CheckConfig cfg;
  std::string mode = "conservative";
  std::string transcript;
  std::string log;
};

int run_check(CheckOptions o) {
  auto t0 = std::chrono::steady_clock::now();
  System a1 = load_system(o.sys1);
  System a2 = load_system(o.sys2);
  o.cfg.mode = o.mode == "literal" ? CheckMode::literal : CheckMode::conservative;
  Verdict v = check_abstraction(a1, declared_witness(a1), a2, declared_witness(a2), o.cfg);

  for (const auto& w : v.warnings) std::cerr << "warning: " << w << '\n';
  if (!o.transcript.empty()) {
    emit(o.transcript, [&](std::ostream& os) {
      for (const auto& r : v.transcript) {
        RunRecord line("round");
        line.set("round", static_cast<long long>(r.round))
            .set("delta", r.delta)
            .set("tau", r.tau)
            .set("eps", r.epsilon)
            .set("cover1", static_cast<long long>(r.cover1))
            .set("cover2", static_cast<long long>(r.cover2))
            .set("removed", static_cast<long long>(r.removed))
            .set("init_measure", r.init_measure)
            .set("max_dia1", r.max_dia1)
            .set("max_dia2", r.max_dia2);
        os << line.line() << '\n';
      }
      for (const auto& b : v.remaining)
        os << RunRecord("remaining").set("lo", format_point(b.lo())).set("hi", format_point(b.hi())).line() << '\n';
    });
  }

  RunRecord rec("check");
  rec.set("sys1", o.sys1)
      .set("sys2", o.sys2)
      .set("c", o.cfg.c)
      .set("T", o.cfg.t_end)
      .set("delta0", o.cfg.delta0)
      .set("tau0", o.cfg.tau0)
      .set("eps0", o.cfg.epsilon0)
      .set("budget", static_cast<long long>(o.cfg.max_refinements))
      .set("mode", to_string(o.cfg.mode))
      .set("verdict", to_string(v.kind))
      .set("rounds", static_cast<long long>(v.transcript.size()));
  if (v.kind == VerdictKind::counterexample) rec.set("x10", format_point(v.x10)).set("delta", v.delta);
  if (v.kind == VerdictKind::unknown) rec.set("remaining", static_cast<long long>(v.remaining.size()));
  rec.set("reason", v.reason);
  if (!o.transcript.empty()) rec.set("transcript", o.transcript);
  rec.set("wall_s", seconds_since(t0));
  finish(rec, o.log, false);
  switch (v.kind) {
    case VerdictKind::c_abstraction:
      return 0;
    case VerdictKind::counterexample:
      return 1;
    case VerdictKind::unknown:
      return 2;
  }
  return 2;
}

// --- reach -----------------------------------------------------------------

struct ReachOptions {
  std::string sys;
  ReachParams params;
  double bounded_t = 0.0;
  std::string cells;
  std::string svg;
  std::size_t trajectories = 0;
  double traj_t = 10.0;
  std::string log;
};

void overlay_trajectories(SvgPlot& svg, const System& sys, std::size_t count, double horizon) {
  for (const auto& x : sample_box(sys.theta(), count, 0x51a7ULL)) {
    Trajectory tr = reference_trajectory_at(sys, x, [&] {
      std::vector<double> ts(401);
      for (std::size_t i = 0; i < ts.size(); ++i) ts[i] = horizon * static_cast<double>(i) / 400.0;
      return ts;
    }(), true);
    svg.add_path(tr.states, "#c0392b");
  }
}

int run_reach(const ReachOptions& o) {
  auto t0 = std::chrono::steady_clock::now();
  System sys = load_system(o.sys);
  DiscrepancyWitness w = declared_witness(sys);
  RunRecord rec("reach");
  rec.set("sys", o.sys);
  int code = 0;

  if (o.bounded_t > 0.0) {
    std::vector<Box> boxes =
        bounded_reach(sys, w, o.bounded_t, o.params.delta, o.params.epsilon, o.params.tau, o.params.jobs);
    if (!o.cells.empty()) emit(o.cells, [&](std::ostream& os) { write_boxes_csv(os, boxes); });
    if (!o.svg.empty()) {
      if (sys.n() < 2) throw Error("svg output needs a system with at least two state dimensions");
      SvgPlot svg;
      svg.set_title(sys.name() + " bounded reach, T = " + format_double(o.bounded_t));
      for (const auto& b : boxes) svg.add_box(b, "#3b6ea5", 0.2);
      overlay_trajectories(svg, sys, o.trajectories, o.bounded_t);
      emit(o.svg, [&](std::ostream& os) { svg.write(os); });
    }
    rec.set("mode", "bounded")
        .set("T", o.bounded_t)
        .set("delta", o.params.delta)
        .set("eps", o.params.epsilon)
        .set("tau", o.params.tau)
        .set("boxes", static_cast<long long>(boxes.size()));
  } else {
    ReachResult r = unbounded_reach(sys, w, o.params);
    if (!o.cells.empty()) emit(o.cells, [&](std::ostream& os) { write_cells_csv(os, r.reach); });
    if (!o.svg.empty()) {
      if (sys.n() < 2) throw Error("svg output needs a system with at least two state dimensions");
      SvgPlot svg;
      svg.set_title(sys.name() + " reach, " + to_string(r.status));
      for (const auto& idx : r.reach.cells()) svg.add_box(r.reach.cell_box(idx), "#3b6ea5", 0.3);
      overlay_trajectories(svg, sys, o.trajectories, o.traj_t);
      emit(o.svg, [&](std::ostream& os) { svg.write(os); });
    }
    std::string frontier;
    for (std::size_t f : r.frontier_history) frontier += (frontier.empty() ? "" : ",") + std::to_string(f);
    rec.set("mode", "unbounded")
        .set("k", static_cast<long long>(o.params.k))
        .set("tau", o.params.tau)
        .set("delta", o.params.delta)
        .set("eps", o.params.epsilon)
        .set("cell", o.params.grid_cell)
        .set("max_iter", static_cast<long long>(o.params.max_iter))
        .set("status", to_string(r.status))
        .set("iterations", static_cast<long long>(r.iterations))
        .set("cells", static_cast<long long>(r.reach.size()))
        .set("frontier", frontier);
    if (!r.note.empty()) rec.set("note", r.note);
    code = r.status == ReachStatus::fixpoint ? 0 : 2;
  }
  if (!o.cells.empty()) rec.set("cells_csv", o.cells);
  if (!o.svg.empty()) rec.set("svg", o.svg);
  rec.set("wall_s", seconds_since(t0));
  finish(rec, o.log, o.cells == "-" || o.svg == "-");
  return code;
}

// --- validate / plot -------------------------------------------------------

struct ValidateOptions {
  std::string sys;
  std::size_t trials = 200;
  double horizon = 5.0;
  unsigned long long seed = 0xd15cULL;
  std::string log;
};

int run_validate(const ValidateOptions& o) {
  auto t0 = std::chrono::steady_clock::now();
  System sys = load_system(o.sys);
  DiscrepancyWitness w = declared_witness(sys);
  WitnessReport report = check_witness(sys, w, o.trials, o.horizon, o.seed);
  double lip = estimate_lipschitz(sys, 400);

  RunRecord rec("validate");
  rec.set("sys", o.sys)
      .set("name", sys.name())
      .set("n", static_cast<long long>(sys.n()))
      .set("m", static_cast<long long>(sys.m()))
      .set("lipschitz_f", sys.lf())
      .set("lipschitz_f_sampled", lip)
      .set("trials", static_cast<long long>(report.trials))
      .set("truncated", static_cast<long long>(report.truncated))
      .set("violations", static_cast<long long>(report.violations.size()))
      .set("worst_ratio", report.worst_ratio);
  if (!report.ok()) {
    const auto& v = report.violations.front();
    rec.set("first_x1", format_point(v.x1)).set("first_x2", format_point(v.x2)).set("first_t", v.t);
  }
  if (lip > sys.lf() * (1.0 + 1e-9))
    std::cerr << "warning: sampled Lipschitz ratio " << lip << " exceeds lipschitz_f " << sys.lf() << '\n';
  rec.set("wall_s", seconds_since(t0));
  finish(rec, o.log, false);
  return report.ok() ? 0 : 1;
}

struct PlotOptions {
  std::string csv;
  std::string svg = "-";
};

int run_plot(const PlotOptions& o) {
  std::ifstream in(o.csv);
  if (!in) throw Error("cannot read " + o.csv);
  Pipe p = read_pipe_csv(in);
  plot_pipe(p, o.svg, o.csv);
  RunRecord rec("plot");
  rec.set("csv", o.csv).set("svg", o.svg).set("segments", static_cast<long long>(p.len()));
  finish(rec, "", o.svg == "-");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulation-based abstraction checking and reachability for ODE systems"};
  app.require_subcommand(1);
  unsigned jobs = 0;
  app.add_option("--jobs", jobs, "Worker threads (default: DYNABS_JOBS or all cores)");

  SimOptions sim;
  auto add_sim_flags = [&](CLI::App* cmd, bool with_delta) {
    cmd->add_option("--sys", sim.sys, "System file")->required()->check(CLI::ExistingFile);
    cmd->add_option("--x0", sim.x0, "Seed, comma separated")->required();
    cmd->add_option("--T", sim.t_end, "Time horizon")->required();
    cmd->add_option("--eps", sim.eps, "Segment diameter bound")->required();
    cmd->add_option("--tau", sim.tau, "Maximum step")->required();
    if (with_delta) cmd->add_option("--delta", sim.delta, "l-infinity radius around the seed")->required();
    cmd->add_option("--out", sim.out, "CSV output ('-' for stdout)");
    cmd->add_option("--svg", sim.svg, "SVG of the first two coordinates");
    cmd->add_option("--log", sim.log, "Append the run record here");
  };
  auto* simulate_cmd = app.add_subcommand("simulate", "Enclose one trajectory");
  add_sim_flags(simulate_cmd, false);
  auto* bloat_cmd = app.add_subcommand("bloat", "Enclose all trajectories from a ball around a seed");
  add_sim_flags(bloat_cmd, true);

  CheckOptions chk;
  auto* check_cmd = app.add_subcommand("check", "Decide whether sys2 is a c-abstraction of sys1");
  check_cmd->add_option("--sys1", chk.sys1, "Concrete system")->required()->check(CLI::ExistingFile);
  check_cmd->add_option("--sys2", chk.sys2, "Abstract system")->required()->check(CLI::ExistingFile);
  check_cmd->add_option("--c", chk.cfg.c, "Slack")->required();
  check_cmd->add_option("--T", chk.cfg.t_end, "Time horizon")->required();
  check_cmd->add_option("--delta0", chk.cfg.delta0, "Initial cover radius")->capture_default_str();
  check_cmd->add_option("--tau0", chk.cfg.tau0, "Initial step")->capture_default_str();
  check_cmd->add_option("--eps0", chk.cfg.epsilon0, "Initial segment diameter")->capture_default_str();
  check_cmd->add_option("--budget", chk.cfg.max_refinements, "Refinement rounds")->capture_default_str();
  check_cmd->add_option("--max-cover", chk.cfg.max_cover, "Cover size limit per round")->capture_default_str();
  check_cmd->add_option("--mode", chk.mode, "Removal and counterexample tests")
      ->check(CLI::IsMember({"conservative", "literal"}))
      ->capture_default_str();
  check_cmd->add_option("--transcript", chk.transcript, "Per-round records");
  check_cmd->add_option("--log", chk.log, "Append the run record here");

  ReachOptions rch;
  auto* reach_cmd = app.add_subcommand("reach", "Reach set by grid fixpoint, or bounded with --bounded-T");
  reach_cmd->add_option("--sys", rch.sys, "System file")->required()->check(CLI::ExistingFile);
  reach_cmd->add_option("--k", rch.params.k, "Steps of tau per post")->capture_default_str();
  reach_cmd->add_option("--tau", rch.params.tau, "Step")->capture_default_str();
  reach_cmd->add_option("--delta", rch.params.delta, "Cover radius")->capture_default_str();
  reach_cmd->add_option("--eps", rch.params.epsilon, "Segment diameter")->capture_default_str();
  reach_cmd->add_option("--cell", rch.params.grid_cell, "Grid cell width (default 2 delta)");
  reach_cmd->add_option("--max-iter", rch.params.max_iter, "Iteration budget")->capture_default_str();
  reach_cmd->add_option("--bounded-T", rch.bounded_t, "Bounded reach up to this time instead");
  reach_cmd->add_option("--cells", rch.cells, "CSV of cells or boxes");
  reach_cmd->add_option("--svg", rch.svg, "SVG of the first two coordinates");
  reach_cmd->add_option("--trajectories", rch.trajectories, "Sampled trajectories drawn over the SVG");
  reach_cmd->add_option("--traj-T", rch.traj_t, "Horizon of the drawn trajectories")->capture_default_str();
  reach_cmd->add_option("--log", rch.log, "Append the run record here");

  ValidateOptions val;
  auto* validate_cmd = app.add_subcommand("validate", "Parse a system file and falsify its witness");
  validate_cmd->add_option("--sys", val.sys, "System file")->required()->check(CLI::ExistingFile);
  validate_cmd->add_option("--trials", val.trials, "Random state pairs")->capture_default_str();
  validate_cmd->add_option("--horizon", val.horizon, "Integration horizon")->capture_default_str();
  validate_cmd->add_option("--seed", val.seed, "Random seed");
  validate_cmd->add_option("--log", val.log, "Append the run record here");

  PlotOptions plt;
  auto* plot_cmd = app.add_subcommand("plot", "Render a pipe CSV as SVG");
  plot_cmd->add_option("--csv", plt.csv, "Pipe CSV")->required()->check(CLI::ExistingFile);
  plot_cmd->add_option("--svg", plt.svg, "Output ('-' for stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return kExitUsage;
  }

  try {
    if (*simulate_cmd) return run_simulate(sim, false);
    if (*bloat_cmd) return run_simulate(sim, true);
    if (*check_cmd) {
      chk.cfg.jobs = jobs;
      return run_check(chk);
    }
    if (*reach_cmd) {
      rch.params.jobs = jobs;
      if (reach_cmd->count("--cell") == 0) rch.params.grid_cell = 2.0 * rch.params.delta;
      return run_reach(rch);
    }
    if (*validate_cmd) return run_validate(val);
    if (*plot_cmd) return run_plot(plt);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitUsage;
}
