// Command-line front end. Every subcommand resolves its parameters from
// built-in defaults, then an optional --config file, then explicit flags, and
// writes the resolved set into its output manifest so a run can be repeated
// with --config <out>/config.txt.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "ailimit/ailimit.hpp"

namespace fs = std::filesystem;
using namespace ailimit;

namespace {

enum ExitCode { kOk = 0, kBadInput = 2, kNumerical = 3, kIo = 4 };

int exit_code_for(const Error& e) {
  switch (e.category()) {
    case ErrorCategory::bad_input: return kBadInput;
    case ErrorCategory::numerical: return kNumerical;
    case ErrorCategory::io: return kIo;
  }
  return kNumerical;
}

/// Typed view over a resolved key=value set.
class Params {
 public:
  explicit Params(io::RunConfig cfg) : cfg_(std::move(cfg)) {}

  const io::RunConfig& all() const { return cfg_; }
  bool has(const std::string& k) const { return cfg_.count(k) && !cfg_.at(k).empty(); }
  const std::string& str(const std::string& k) const {
    const auto it = cfg_.find(k);
    if (it == cfg_.end() || it->second.empty()) throw Error(Errc::invalid_argument, "missing parameter '" + k + "'");
    return it->second;
  }
  double num(const std::string& k) const { return io::detail::to_double(str(k), k); }
  int integer(const std::string& k) const { return io::detail::to_int(str(k), k); }
  long long_int(const std::string& k) const {
    try {
      std::size_t used = 0;
      const long v = std::stol(str(k), &used);
      if (used != str(k).size()) throw std::invalid_argument("trailing");
      return v;
    } catch (const std::invalid_argument&) {
      throw Error(Errc::parse_error, "bad integer for " + k);
    } catch (const std::out_of_range&) {
      throw Error(Errc::parse_error, "integer out of range for " + k);
    }
  }
  bool flag(const std::string& k) const {
    const std::string& v = str(k);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw Error(Errc::parse_error, "bad boolean for " + k + ": " + v);
  }

 private:
  io::RunConfig cfg_;
};

/// Options registered on a subcommand; each maps to a config key.
struct Command {
  CLI::App* app = nullptr;
  io::RunConfig defaults;
  std::map<std::string, std::string> flag_values;
  std::vector<std::pair<std::string, CLI::Option*>> options;
  std::string config_path;
  unsigned threads = 0;

  void option(const std::string& flag, const std::string& key, const std::string& help,
              std::optional<std::string> def = std::nullopt) {
    if (def) defaults[key] = *def;
    auto* opt = app->add_option(flag, flag_values[key], help + (def && !def->empty() ? " [" + *def + "]" : ""));
    options.emplace_back(key, opt);
  }

  Params resolve() const {
    io::RunConfig cfg = defaults;
    if (!config_path.empty()) {
      for (auto& [k, v] : io::load_config(config_path)) {
        if (!defaults.count(k)) throw Error(Errc::parse_error, "unknown config key '" + k + "'");
        cfg[k] = v;
      }
    }
    for (const auto& [key, opt] : options) {
      if (opt->count() > 0) cfg[key] = flag_values.at(key);
    }
    return Params(std::move(cfg));
  }
};

Command& make_command(CLI::App& root, std::vector<std::unique_ptr<Command>>& store, const std::string& name,
                      const std::string& help) {
  store.push_back(std::make_unique<Command>());
  Command& c = *store.back();
  c.app = root.add_subcommand(name, help);
  c.app->add_option("--config", c.config_path, "key=value file or a previous manifest.json; flags override it");
  c.app->add_option("--threads", c.threads, "worker threads (0: hardware concurrency)");
  return c;
}

void print_line(const std::string& s) { std::cout << s << "\n"; }

// ---------------------------------------------------------------- commands

int run_classify(const Params& p) {
  const double r = p.num("r"), c = p.num("c");
  const ConicClass k = classify_conic(r, c);
  std::string center;
  try {
    center = io::fmt(conic_center(r, c));
  } catch (const Error&) {
    center = "undefined";
  }
  const FixedPointPair fp = fixed_points_ai(r);
  std::string membership;
  if (analytic_RA_forward(r, c)) membership += ", in R_A^+";
  if (analytic_RA_backward(r, c)) membership += ", in R_A^-";
  print_line(std::string(to_string(k)) + membership);
  print_line("center_x = " + center);
  print_line("fixed_points = " + io::fmt(fp.minus) + ", " + io::fmt(fp.plus));
  print_line(std::string("in_RA_forward = ") + (analytic_RA_forward(r, c) ? "true" : "false"));
  print_line(std::string("in_RA_backward = ") + (analytic_RA_backward(r, c) ? "true" : "false"));
  return kOk;
}

int run_regions(const Params& p, unsigned threads) {
  const ParamGrid grid = io::parse_param_grid(p.str("grid"));
  const Direction dir = parse_direction(p.str("direction"));
  RegionMask mask;
  if (p.flag("analytic")) {
    mask = analytic_mask(grid, dir);
  } else {
    const int n_max = p.integer("n_max");
    if (n_max < 1 || n_max > kMaxWordLength) throw Error(Errc::invalid_argument, "n_max must be in [1, 40]");
    mask = compute_Rn(grid, n_max, dir, p.integer("seeds"), threads);
  }
  io::RunWriter out(p.str("out"), "regions", p.all());
  out.add("mask.csv", io::mask_csv(mask));
  out.add("mask.pgm", io::mask_pgm(mask));
  out.add_json("mask.json", io::mask_metadata(mask));
  out.add_config();
  out.finish();
  print_line("cells=" + std::to_string(grid.cells()) + " members=" + std::to_string(mask.count()));
  return kOk;
}

int run_hausdorff(const Params& p) {
  RegionMask a = io::load_mask(p.str("a"));
  RegionMask b = io::load_mask(p.str("b"));
  if (p.has("n")) {
    const int n = p.integer("n");
    a = a.truncated(n);
    b = b.truncated(n);
  }
  const double d = hausdorff_distance(a, b);
  print_line(io::fmt(d));
  if (p.has("out")) {
    io::RunWriter out(p.str("out"), "hausdorff", p.all());
    out.add_json("hausdorff.json", {{"distance", d}, {"a", p.str("a")}, {"b", p.str("b")}});
    out.add_config();
    out.finish();
  }
  return kOk;
}

ScanConfig scan_config(const Params& p) {
  ScanConfig cfg;
  cfg.transient_T = p.integer("transient");
  cfg.kappa_max = p.num("kappa_max");
  cfg.return_tol = p.num("return_tol");
  cfg.period_max = p.integer("period_max");
  cfg.lyap_steps = p.integer("lyap_steps");
  cfg.lyap_discard = p.integer("lyap_discard");
  cfg.chaos_threshold = p.num("chaos_threshold");
  if (p.has("ic")) cfg.ic_mode = ExplicitIC{io::parse_state(p.str("ic"))};
  else cfg.ic_mode = FixedPointOffset{p.num("ic_offset")};
  cfg.validate();
  return cfg;
}

int run_scan(const Params& p, unsigned threads) {
  const ScanGrid grid = io::parse_scan_grid(p.str("grid"));
  const ScanConfig cfg = scan_config(p);
  const MapParams base = MapParams::reduced(0.0, 0.0, p.num("c"), p.num("delta"));
  const io::Palette palette =
      p.has("palette") ? io::parse_palette(io::read_file(p.str("palette"))) : io::builtin_palette();
  const ScanResult result = attractor_scan(grid, base, cfg, threads);
  io::RunWriter out(p.str("out"), "scan", p.all());
  out.add("scan.csv", io::scan_csv(result));
  out.add("scan.ppm", io::scan_ppm(result, palette));
  out.add_config();
  out.finish();
  print_line("cells=" + std::to_string(grid.cells()));
  return kOk;
}

ContinuationConfig continuation_config(const Params& p) {
  ContinuationConfig cc;
  cc.ell0 = p.num("ell0");
  cc.ell_min = p.num("ell_min");
  cc.jump_threshold = p.num("jump_threshold");
  cc.corrector_tol = p.num("corrector_tol");
  cc.max_corrector_iters = p.integer("max_corrector_iters");
  cc.eps_max = p.num("eps_max");
  cc.max_steps = p.long_int("max_steps");
  return cc;
}

void add_continuation_options(Command& c) {
  const ContinuationConfig d;
  c.option("--ell0", "ell0", "initial arclength step (0: by period)", io::fmt(d.ell0));
  c.option("--ell-min", "ell_min", "smallest arclength step", io::fmt(d.ell_min));
  c.option("--jump-threshold", "jump_threshold", "sup-norm jump that halves the step", io::fmt(d.jump_threshold));
  c.option("--corrector-tol", "corrector_tol", "corrector residual tolerance", io::fmt(d.corrector_tol));
  c.option("--max-corrector-iters", "max_corrector_iters", "corrector iteration cap",
           std::to_string(d.max_corrector_iters));
  c.option("--eps-max", "eps_max", "stop once epsilon reaches this", io::fmt(d.eps_max));
  c.option("--max-steps", "max_steps", "continuation step cap", std::to_string(d.max_steps));
}

void emit_branch(io::RunWriter& out, const Branch& b) {
  out.add("branch.csv", io::branch_csv(b));
  out.add_json("branch.json", io::branch_summary(b));
}

std::string branch_report(const Branch& b) {
  std::string s = "termination=" + std::string(to_string(b.termination)) +
                  " points=" + std::to_string(b.points.size()) + " max_epsilon=" + io::fmt(b.max_epsilon());
  for (const TurningPoint& t : detect_turning_points(b)) {
    s += "\nturning_point epsilon=" + io::fmt(t.epsilon) + " alpha=" + io::fmt(t.alpha);
  }
  return s;
}

int run_continue(const Params& p) {
  const SymbolSequence seq = SymbolSequence::parse(p.str("symbols"));
  const Branch b = continue_branch(seq, p.num("r"), p.num("c"), p.num("delta"), continuation_config(p));
  io::RunWriter out(p.str("out"), "continue", p.all());
  emit_branch(out, b);
  out.add_config();
  out.finish();
  print_line(branch_report(b));
  return kOk;
}

int run_pipeline(const Params& p) {
  const double alpha = p.num("alpha"), r = p.num("r"), c = p.num("c"), delta = p.num("delta");
  const MapParams mp = cell_params(alpha, r, MapParams::reduced(0.0, 0.0, c, delta));
  const State3 ic = io::parse_state(p.str("ic"));
  const double threshold = p.num("threshold");
  io::RunWriter out(p.str("out"), "pipeline", p.all());

  const auto returns = close_returns(ic, mp, threshold, p.long_int("return_steps"));
  std::string csv = "event,period,distance\n";
  for (std::size_t k = 0; k < returns.size(); ++k) {
    csv += std::to_string(k) + "," + std::to_string(returns[k].period) + "," + io::fmt(returns[k].distance) + "\n";
  }
  out.add("close_returns.csv", csv);

  long period = 0;
  if (p.has("period")) period = p.long_int("period");
  else if (!returns.empty()) period = returns.front().period;
  else throw Error(Errc::convergence_failure, "no close return within the step limit");

  const auto seg = find_periodic_segment(ic, mp, period, threshold, p.long_int("mine_steps"));
  if (!seg) throw Error(Errc::convergence_failure, "no orbit segment nearly repeats with period " + std::to_string(period));
  const double eps = 1.0 / std::sqrt(-alpha);
  const SymbolSequence seq = symbols_from_orbit(seg->x, eps);
  out.add_json("segment.json", {{"period", period}, {"start", seg->start}, {"distance", seg->distance},
                                {"symbols", seq.str()}});

  const Branch b = continue_branch(seq, r, c, delta, continuation_config(p));
  std::string ai = "t,symbol,xi\n";
  for (Eigen::Index t = 0; t < b.points.front().state.period(); ++t) {
    ai += std::to_string(t) + "," + to_char(seq[t]) + "," + io::fmt(b.points.front().state.xi(t)) + "\n";
  }
  out.add("ai_state.csv", ai);
  emit_branch(out, b);
  out.add_config();
  out.finish();
  print_line("close_returns=" + std::to_string(returns.size()) + " period=" + std::to_string(period) +
             " segment_start=" + std::to_string(seg->start) + " distance=" + io::fmt(seg->distance));
  print_line(branch_report(b));
  return kOk;
}

int run_doubling(const Params& p) {
  SymbolSequence seq = SymbolSequence::parse(p.str("symbols"));
  const int count = p.integer("count");
  if (count < 0) throw Error(Errc::invalid_argument, "count must be >= 0");
  print_line(seq.str());
  for (int k = 0; k < count; ++k) {
    seq = double_sequence(seq);
    print_line(seq.str());
  }
  return kOk;
}

int run_doubling_curve(const Params& p) {
  const DoublingRoots roots = doubling_curve_alpha(p.num("r"), p.num("delta"));
  char buf[96];
  std::snprintf(buf, sizeof buf, "%.15f %.15f", roots.alpha1, roots.alpha2);
  print_line(buf);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Anti-integrable limit analysis of a quadratic three-dimensional map"};
  app.require_subcommand(1);
  std::vector<std::unique_ptr<Command>> cmds;
  std::vector<std::function<int()>> runners;

  Command& classify = make_command(app, cmds, "classify", "classify the AI-limit conic at (r, c)");
  classify.option("--r,-r", "r", "rescaled parameter r", "");
  classify.option("--c,-c", "c", "quadratic coefficient c", "");

  Command& regions = make_command(app, cmds, "regions", "compute R_n or R_A on a parameter grid");
  regions.option("--grid", "grid", "rmin:rmax:nr,cmin:cmax:nc", "0:1.1547005383792515:200,-0.3333333333333333:0.8:200");
  regions.option("--n-max", "n_max", "largest composition length", "5");
  regions.option("--direction", "direction", "fwd or bwd", "fwd");
  regions.option("--seeds", "seeds", "equispaced seeds per word", "100");
  regions.option("--analytic", "analytic", "closed-form R_A instead of R_n (true/false)", "false");
  regions.option("--out", "out", "output directory", "regions_out");

  Command& hausdorff = make_command(app, cmds, "hausdorff", "Hausdorff distance between two mask CSVs");
  hausdorff.option("a", "a", "first mask CSV", "");
  hausdorff.option("b", "b", "second mask CSV", "");
  hausdorff.option("--n", "n", "keep labels 1..n only (R_n from an R_{n_max} mask)", "");
  hausdorff.option("--out", "out", "optional output directory", "");

  Command& scan = make_command(app, cmds, "scan", "classify attractors over an (alpha, r) grid");
  {
    const ScanConfig d;
    scan.option("--grid", "grid", "amin:amax:na,rmin:rmax:nr", "-3:-0.007518796992481203:399,-0.18:-0.18:1");
    scan.option("--c", "c", "quadratic coefficient c", "0");
    scan.option("--delta", "delta", "Jacobian determinant", "0.05");
    scan.option("--kappa-max", "kappa_max", "escape bound for |x|", "3.26724");
    scan.option("--transient", "transient", "transient steps", std::to_string(d.transient_T));
    scan.option("--return-tol", "return_tol", "close-return tolerance", io::fmt(d.return_tol));
    scan.option("--period-max", "period_max", "largest period searched", std::to_string(d.period_max));
    scan.option("--lyap-steps", "lyap_steps", "Lyapunov averaging steps", std::to_string(d.lyap_steps));
    scan.option("--lyap-discard", "lyap_discard", "Lyapunov discarded steps", std::to_string(d.lyap_discard));
    scan.option("--chaos-threshold", "chaos_threshold", "Lyapunov value above which a cell is chaotic",
                io::fmt(d.chaos_threshold));
    scan.option("--ic", "ic", "explicit initial condition x,y,z (default: offset from x_-)", "");
    scan.option("--ic-offset", "ic_offset", "offset dx of (x_- + dx, x_-, x_-)", "0.001");
    scan.option("--palette", "palette", "palette file (default: built-in version 1)", "");
    scan.option("--out", "out", "output directory", "scan_out");
  }

  Command& cont = make_command(app, cmds, "continue", "continue a periodic AI state in epsilon");
  cont.option("--symbols", "symbols", "symbol word, run-length allowed (e.g. -3+)", "");
  cont.option("--r", "r", "rescaled parameter r", "-0.18");
  cont.option("--c", "c", "quadratic coefficient c", "0");
  cont.option("--delta", "delta", "Jacobian determinant", "0.05");
  cont.option("--out", "out", "output directory", "continue_out");
  add_continuation_options(cont);

  Command& pipe = make_command(app, cmds, "pipeline", "close returns to symbols to AI state to branch");
  pipe.option("--alpha", "alpha", "map parameter alpha", "-1.25");
  pipe.option("--r", "r", "rescaled parameter r", "-0.18");
  pipe.option("--c", "c", "quadratic coefficient c", "0");
  pipe.option("--delta", "delta", "Jacobian determinant", "0.05");
  pipe.option("--ic", "ic", "initial condition x,y,z", "-1.3387,-0.2563,-0.9553");
  pipe.option("--threshold", "threshold", "close-return distance", "0.005");
  pipe.option("--return-steps", "return_steps", "steps searched for close returns", "2000");
  pipe.option("--period", "period", "period to mine (default: first close return)", "");
  pipe.option("--mine-steps", "mine_steps", "latest start time for the mined segment", "200000");
  pipe.option("--out", "out", "output directory", "pipeline_out");
  add_continuation_options(pipe);

  Command& dbl = make_command(app, cmds, "doubling", "iterate the period-doubling word rule");
  dbl.option("--symbols", "symbols", "starting word", "-");
  dbl.option("--count", "count", "number of doublings", "5");

  Command& dcurve = make_command(app, cmds, "doubling-curve", "alpha roots of the fixed-point doubling curve");
  dcurve.option("--r", "r", "rescaled parameter r", "-0.18");
  dcurve.option("--delta", "delta", "Jacobian determinant", "0.05");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kBadInput;
  }

  try {
    for (const auto& c : cmds) {
      if (!c->app->parsed()) continue;
      const Params p = c->resolve();
      const std::string name = c->app->get_name();
      if (name == "classify") return run_classify(p);
      if (name == "regions") return run_regions(p, c->threads);
      if (name == "hausdorff") return run_hausdorff(p);
      if (name == "scan") return run_scan(p, c->threads);
      if (name == "continue") return run_continue(p);
      if (name == "pipeline") return run_pipeline(p);
      if (name == "doubling") return run_doubling(p);
      if (name == "doubling-curve") return run_doubling_curve(p);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumerical;
  }
  return kBadInput;
}
