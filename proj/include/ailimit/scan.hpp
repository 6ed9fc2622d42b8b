#pragma once

// Attractor classification over the (alpha, r) plane: each cell iterates the
// map from a fixed initial condition, detects divergence, searches for a
// close return, and falls back to the maximal Lyapunov exponent.

#include <cmath>
#include <limits>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include "ailimit/core_map.hpp"
#include "ailimit/error.hpp"
#include "ailimit/parallel.hpp"
#include "ailimit/symbols.hpp"

namespace ailimit {

/// Start next to the fixed point x_-: (x_- + dx, x_-, x_-).
struct FixedPointOffset {
  double dx = 0.001;
  friend bool operator==(const FixedPointOffset&, const FixedPointOffset&) = default;
};
struct ExplicitIC {
  State3 state;
  friend bool operator==(const ExplicitIC&, const ExplicitIC&) = default;
};
using ICMode = std::variant<FixedPointOffset, ExplicitIC>;

struct ScanConfig {
  int transient_T = 5000;
  /// Escape bound for |x_t|. There is no universal value, so it must be set.
  double kappa_max = std::numeric_limits<double>::quiet_NaN();
  double return_tol = 1e-4;
  int period_max = 90;
  ICMode ic_mode = FixedPointOffset{};
  int lyap_steps = 20000;
  int lyap_discard = 1000;
  double chaos_threshold = 0.01;

  void validate() const {
    if (!(kappa_max > 0.0) || !std::isfinite(kappa_max)) {
      throw Error(Errc::invalid_argument, "kappa_max must be set to a positive value");
    }
    if (transient_T <= 0 || !(return_tol > 0.0) || period_max < 1 || lyap_steps <= 0 || lyap_discard < 0 ||
        !(chaos_threshold > 0.0)) {
      throw Error(Errc::invalid_argument, "scan configuration values must be positive");
    }
  }
};

enum class CellClass { Diverged, Periodic, Regular, Chaotic };

constexpr std::string_view to_string(CellClass k) {
  switch (k) {
    case CellClass::Diverged: return "Diverged";
    case CellClass::Periodic: return "Periodic";
    case CellClass::Regular: return "Regular";
    case CellClass::Chaotic: return "Chaotic";
  }
  return "?";
}

struct ScanCell {
  CellClass classification = CellClass::Diverged;
  std::optional<int> period;
  std::optional<double> lyapunov;

  friend bool operator==(const ScanCell&, const ScanCell&) = default;
};

/// Map parameters of a scan cell: the base supplies a, b, c, tau, delta and
/// the cell sets alpha and sigma = r sqrt(-alpha).
inline MapParams cell_params(double alpha, double r, const MapParams& base) {
  if (!(alpha < 0.0)) throw Error(Errc::invalid_argument, "scan requires alpha < 0");
  MapParams p = base;
  p.alpha = alpha;
  p.sigma = r * std::sqrt(-alpha);
  return p;
}

/// The smaller fixed point of the a = 1, b = c = tau = 0 recurrence
/// x = delta x + alpha - sigma x + x^2.
inline double fixed_point_x_minus(double alpha, double sigma, double delta) {
  const double k = 1.0 + sigma - delta;
  const double disc = k * k - 4.0 * alpha;
  if (disc < 0.0) throw Error(Errc::no_fixed_point, "no real fixed point");
  return 0.5 * (k - std::sqrt(disc));
}

inline State3 initial_condition(const ICMode& mode, const MapParams& p) {
  if (const auto* e = std::get_if<ExplicitIC>(&mode)) return e->state;
  const double dx = std::get<FixedPointOffset>(mode).dx;
  const double xm = fixed_point_x_minus(p.alpha, p.sigma, p.delta);
  return State3{xm + dx, xm, xm};
}

namespace detail {

inline bool escaped(const State3& s, double kappa) { return !(std::abs(s.x) <= kappa); }

/// Row 0 of the Jacobian of map_forward; rows 1 and 2 are the shift.
inline void tangent_step(const State3& s, const MapParams& p, double v[3]) {
  const double j0 = 2.0 * p.a * s.x + p.b * s.y + p.tau;
  const double j1 = -p.sigma + p.b * s.x + 2.0 * p.c * s.y;
  const double nv = j0 * v[0] + j1 * v[1] + p.delta * v[2];
  v[2] = v[1];
  v[1] = v[0];
  v[0] = nv;
}

}  // namespace detail

/// Mean natural-log growth per step of a tangent vector propagated along the
/// orbit of `ic` and renormalized every step. The first lyap_discard steps
/// are not averaged. Throws Errc::diverged if |x| exceeds kappa_max.
inline double max_lyapunov(const State3& ic, const MapParams& p, const ScanConfig& cfg) {
  State3 s = ic;
  double v[3] = {1.0, 0.0, 0.0};
  double sum = 0.0;
  const int total = cfg.lyap_discard + cfg.lyap_steps;
  for (int t = 0; t < total; ++t) {
    detail::tangent_step(s, p, v);
    s = map_forward(s, p);
    if (detail::escaped(s, cfg.kappa_max)) throw Error(Errc::diverged, "orbit diverged during Lyapunov estimate");
    const double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    if (!(n > 0.0) || !std::isfinite(n)) throw Error(Errc::diverged, "tangent vector degenerated");
    v[0] /= n;
    v[1] /= n;
    v[2] /= n;
    if (t >= cfg.lyap_discard) sum += std::log(n);
  }
  return sum / cfg.lyap_steps;
}

/// Iterates `transient_T` steps and returns the final state, or nothing if
/// the orbit escaped.
inline std::optional<State3> settle(State3 s, const MapParams& p, const ScanConfig& cfg) {
  for (int t = 0; t < cfg.transient_T; ++t) {
    s = map_forward(s, p);
    if (detail::escaped(s, cfg.kappa_max)) return std::nullopt;
  }
  return s;
}

/// Smallest p in [1, period_max] with |X_{T+p} - X_T| < return_tol, where X
/// is the state (x_t, x_{t-1}, x_{t-2}). Nothing if none; Errc::diverged if
/// the orbit escapes.
inline std::optional<int> detect_period(const State3& settled, const MapParams& p, const ScanConfig& cfg) {
  State3 s = settled;
  for (int k = 1; k <= cfg.period_max; ++k) {
    s = map_forward(s, p);
    if (detail::escaped(s, cfg.kappa_max)) throw Error(Errc::diverged, "orbit diverged in period search");
    if (distance(s, settled) < cfg.return_tol) return k;
  }
  return std::nullopt;
}

inline ScanCell classify_cell(double alpha, double r, const MapParams& base, const ScanConfig& cfg) {
  cfg.validate();
  const MapParams p = cell_params(alpha, r, base);
  ScanCell cell;
  const auto settled = settle(initial_condition(cfg.ic_mode, p), p, cfg);
  if (!settled) return cell;
  try {
    if (const auto period = detect_period(*settled, p, cfg)) {
      cell.classification = CellClass::Periodic;
      cell.period = *period;
      return cell;
    }
    const double lambda = max_lyapunov(*settled, p, cfg);
    cell.lyapunov = lambda;
    cell.classification = lambda > cfg.chaos_threshold ? CellClass::Chaotic : CellClass::Regular;
  } catch (const Error& e) {
    if (e.code() != Errc::diverged) throw;
    cell = ScanCell{};
  }
  return cell;
}

/// Lattice over (alpha, r) including end points. A count of 1 pins that axis
/// to its minimum.
struct ScanGrid {
  double alpha_min = -3.0, alpha_max = 0.0;
  int n_alpha = 2;
  double r_min = 0.0, r_max = 0.0;
  int n_r = 1;

  void validate() const {
    if (n_alpha < 1 || n_r < 1) throw Error(Errc::invalid_argument, "scan grid counts must be >= 1");
    if (alpha_min > alpha_max || r_min > r_max) throw Error(Errc::invalid_argument, "scan grid bounds are reversed");
    if (!(alpha_max < 0.0) && !(n_alpha == 1 && alpha_min < 0.0)) {
      throw Error(Errc::invalid_argument, "scan grid needs alpha < 0; use an upper bound such as -1e-3");
    }
  }
  double alpha_step() const { return n_alpha > 1 ? (alpha_max - alpha_min) / (n_alpha - 1) : 0.0; }
  double r_step() const { return n_r > 1 ? (r_max - r_min) / (n_r - 1) : 0.0; }
  double alpha_at(int i) const { return n_alpha > 1 && i == n_alpha - 1 ? alpha_max : alpha_min + i * alpha_step(); }
  double r_at(int j) const { return n_r > 1 && j == n_r - 1 ? r_max : r_min + j * r_step(); }
  std::size_t cells() const { return static_cast<std::size_t>(n_alpha) * static_cast<std::size_t>(n_r); }

  friend bool operator==(const ScanGrid&, const ScanGrid&) = default;
};

/// Cells stored r-major: index = j * n_alpha + i for r_at(j), alpha_at(i).
struct ScanResult {
  ScanGrid grid;
  std::vector<ScanCell> cells;

  const ScanCell& at(int i_alpha, int j_r) const {
    return cells[static_cast<std::size_t>(j_r) * grid.n_alpha + i_alpha];
  }
};

inline ScanResult attractor_scan(const ScanGrid& grid, const MapParams& base, const ScanConfig& cfg,
                                 unsigned threads = 0) {
  grid.validate();
  cfg.validate();
  ScanResult out{grid, std::vector<ScanCell>(grid.cells())};
  parallel_for(out.cells.size(), threads, [&](std::size_t k) {
    const int j = static_cast<int>(k / grid.n_alpha);
    const int i = static_cast<int>(k % grid.n_alpha);
    out.cells[k] = classify_cell(grid.alpha_at(i), grid.r_at(j), base, cfg);
  });
  return out;
}

struct CloseReturn {
  long period;  // steps since the initial condition
  double distance;
};

/// Times t <= max_steps at which the orbit of `ic` comes within `threshold`
/// of `ic`. Consecutive times below the threshold form one event, reported
/// once at its first time.
inline std::vector<CloseReturn> close_returns(const State3& ic, const MapParams& p, double threshold, long max_steps,
                                              double escape = 1e8) {
  std::vector<CloseReturn> out;
  State3 s = ic;
  bool inside = false;
  for (long t = 1; t <= max_steps; ++t) {
    s = map_forward(s, p);
    if (detail::escaped(s, escape)) throw Error(Errc::diverged, "orbit diverged while searching close returns");
    const double d = distance(s, ic);
    const bool now = d < threshold;
    if (now && !inside) out.push_back({t, d});
    inside = now;
  }
  return out;
}

/// x_0 .. x_{n-1} of the orbit, reading x off the first coordinate and
/// starting with ic.x.
inline std::vector<double> orbit_x(const State3& ic, const MapParams& p, long n) {
  std::vector<double> xs;
  xs.reserve(static_cast<std::size_t>(std::max(n, 0L)));
  State3 s = ic;
  for (long t = 0; t < n; ++t) {
    xs.push_back(s.x);
    s = map_forward(s, p);
  }
  return xs;
}

/// s_t = sign(eps x_t).
inline SymbolSequence symbols_from_orbit(const std::vector<double>& orbit, double epsilon) {
  if (!(epsilon > 0.0)) throw Error(Errc::invalid_argument, "epsilon must be positive");
  if (orbit.empty()) throw Error(Errc::invalid_argument, "empty orbit");
  std::vector<Symbol> out;
  out.reserve(orbit.size());
  for (double x : orbit) {
    const double xi = epsilon * x;
    if (xi == 0.0 || !std::isfinite(xi)) throw Error(Errc::ambiguous_symbol, "orbit point has no sign");
    out.push_back(xi > 0.0 ? Symbol::Plus : Symbol::Minus);
  }
  return SymbolSequence(std::move(out));
}

struct OrbitSegment {
  long start;       // steps after the initial condition
  double distance;  // |X_{start+period} - X_start|
  std::vector<double> x;  // x_start .. x_{start+period-1}
};

/// First start time t <= max_start at which the orbit of `ic` nearly repeats
/// with the given period: |X_{t+period} - X_t| < threshold.
inline std::optional<OrbitSegment> find_periodic_segment(const State3& ic, const MapParams& p, long period,
                                                         double threshold, long max_start) {
  if (period < 1) throw Error(Errc::invalid_argument, "period must be >= 1");
  const long n = max_start + period + 1;
  std::vector<State3> states;
  states.reserve(static_cast<std::size_t>(n));
  State3 s = ic;
  for (long t = 0; t < n; ++t) {
    states.push_back(s);
    s = map_forward(s, p);
    if (!is_finite(s)) throw Error(Errc::diverged, "orbit diverged");
  }
  for (long t = 0; t <= max_start; ++t) {
    const double d = distance(states[static_cast<std::size_t>(t + period)], states[static_cast<std::size_t>(t)]);
    if (d < threshold) {
      OrbitSegment seg{t, d, {}};
      for (long k = 0; k < period; ++k) seg.x.push_back(states[static_cast<std::size_t>(t + k)].x);
      return seg;
    }
  }
  return std::nullopt;
}

/// Parameter values read off a one-dimensional scan with increasing alpha.
struct LineLandmarks {
  std::optional<double> bounded_onset;   // smallest alpha of the final non-diverged run
  std::optional<double> window_begin;    // first run of Periodic(window_period)
  std::optional<double> window_end;
  std::optional<double> cascade_entry;   // smallest alpha of the final run of period 2^k
  std::optional<double> doubling_1_to_2; // midpoint of the last Periodic(2) -> Periodic(1) change
};

inline LineLandmarks line_landmarks(const std::vector<double>& alphas, const std::vector<ScanCell>& cells,
                                    int window_period = 5) {
  if (alphas.size() != cells.size()) throw Error(Errc::invalid_argument, "alpha and cell counts differ");
  LineLandmarks out;
  const std::size_t n = cells.size();
  if (n == 0) return out;
  auto is_pow2_periodic = [](const ScanCell& c) {
    return c.classification == CellClass::Periodic && c.period && (*c.period & (*c.period - 1)) == 0;
  };
  std::size_t k = n;
  while (k > 0 && cells[k - 1].classification != CellClass::Diverged) --k;
  if (k < n) out.bounded_onset = alphas[k];
  k = n;
  while (k > 0 && is_pow2_periodic(cells[k - 1])) --k;
  if (k < n) out.cascade_entry = alphas[k];
  for (std::size_t i = 0; i < n; ++i) {
    const bool in = cells[i].classification == CellClass::Periodic && cells[i].period == window_period;
    if (!in) continue;
    out.window_begin = alphas[i];
    std::size_t j = i;
    while (j + 1 < n && cells[j + 1].classification == CellClass::Periodic && cells[j + 1].period == window_period) ++j;
    out.window_end = alphas[j];
    break;
  }
  for (std::size_t i = n; i-- > 1;) {
    if (cells[i].period == 1 && cells[i - 1].period == 2) {
      out.doubling_1_to_2 = 0.5 * (alphas[i] + alphas[i - 1]);
      break;
    }
  }
  return out;
}

}  // namespace ailimit
