#pragma once

// The eps = 0 correspondence a xi_t^2 + c xi_{t-1}^2 = r xi_{t-1} + 1 (b = 0,
// a = 1 - c), read as a pair of forward branch maps f_s or backward branch
// maps g_s, and the construction of periodic AI states from symbol words.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ailimit/core_map.hpp"
#include "ailimit/error.hpp"
#include "ailimit/symbols.hpp"

namespace ailimit {

enum class Direction { Forward, Backward };

constexpr std::string_view to_string(Direction d) {
  return d == Direction::Forward ? "fwd" : "bwd";
}

inline Direction parse_direction(std::string_view s) {
  if (s == "fwd" || s == "forward") return Direction::Forward;
  if (s == "bwd" || s == "backward") return Direction::Backward;
  throw Error(Errc::parse_error, "direction must be fwd or bwd, got '" + std::string(s) + "'");
}

namespace detail {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Radicand of f_s: (-c xi^2 + r xi + 1) / a.
inline double forward_radicand(double xi, double r, double c) noexcept {
  return (-c * xi * xi + r * xi + 1.0) / (1.0 - c);
}

/// Radicand of g_s: r^2 + 4c - 4ac xi^2.
inline double backward_radicand(double xi, double r, double c) noexcept {
  return r * r + 4.0 * c - 4.0 * (1.0 - c) * c * xi * xi;
}

/// Value and slope of one branch step. NaN value / infinite slope when the
/// branch is undefined or has a vertical tangent. Used in the hot loops of
/// the region estimates where exceptions would be too costly.
struct BranchStep {
  double value;
  double slope;
};

inline BranchStep forward_step(double xi, double s, double r, double c) noexcept {
  const double a = 1.0 - c;
  const double q = forward_radicand(xi, r, c);
  if (!(q > 0.0)) return {kNaN, kInf};
  const double root = std::sqrt(q);
  return {s * root, s * (r - 2.0 * c * xi) / (2.0 * a * root)};
}

inline BranchStep backward_step(double xi, double s, double r, double c) noexcept {
  const double d = backward_radicand(xi, r, c);
  if (!(d > 0.0)) return {kNaN, kInf};
  const double root = std::sqrt(d);
  return {(r + s * root) / (2.0 * c), -s * 2.0 * (1.0 - c) * xi / root};
}

inline BranchStep branch_step(Direction dir, double xi, double s, double r, double c) noexcept {
  return dir == Direction::Forward ? forward_step(xi, s, r, c) : backward_step(xi, s, r, c);
}

}  // namespace detail

/// xi_t = f_s(xi_{t-1}) = s sqrt((-c xi^2 + r xi + 1) / a).
inline double ai_forward(double xi, Symbol s, double r, double c) {
  if (c == 1.0) throw Error(Errc::no_forward_map, "no forward map when a = 1 - c = 0");
  const double q = detail::forward_radicand(xi, r, c);
  if (q < 0.0) {
    throw Error(Errc::branch_undefined, "forward branch undefined at xi = " + std::to_string(xi));
  }
  return sign_of(s) * std::sqrt(q);
}

/// xi_{t-1} = g_s(xi_t) = (r + s sqrt(r^2 + 4c - 4ac xi^2)) / (2c).
inline double ai_backward(double xi, Symbol s, double r, double c) {
  if (c == 0.0) throw Error(Errc::no_backward_branching, "no backward branching when c = 0");
  const double d = detail::backward_radicand(xi, r, c);
  if (d < 0.0) {
    throw Error(Errc::branch_undefined, "backward branch undefined at xi = " + std::to_string(xi));
  }
  return (r + sign_of(s) * std::sqrt(d)) / (2.0 * c);
}

/// s (r - 2c xi) / (2 a sqrt(q)), which for a > 0 is s (r - 2c xi) / (2 sqrt(a (-c xi^2 + r xi + 1))).
inline double ai_forward_derivative(double xi, Symbol s, double r, double c) {
  if (c == 1.0) throw Error(Errc::no_forward_map, "no forward map when a = 1 - c = 0");
  const double q = detail::forward_radicand(xi, r, c);
  if (q < 0.0) throw Error(Errc::branch_undefined, "forward branch undefined");
  if (q == 0.0) throw Error(Errc::infinite_slope, "forward branch has a vertical tangent");
  return detail::forward_step(xi, sign_of(s), r, c).slope;
}

/// Implicit derivative of g_s: -s 2a xi / sqrt(r^2 + 4c - 4ac xi^2).
inline double ai_backward_derivative(double xi, Symbol s, double r, double c) {
  if (c == 0.0) throw Error(Errc::no_backward_branching, "no backward branching when c = 0");
  const double d = detail::backward_radicand(xi, r, c);
  if (d < 0.0) throw Error(Errc::branch_undefined, "backward branch undefined");
  if (d == 0.0) throw Error(Errc::infinite_slope, "backward branch has a vertical tangent");
  return detail::backward_step(xi, sign_of(s), r, c).slope;
}

/// The invariant interval B = [-beta, beta].
struct IntervalB {
  double beta;

  bool contains(double xi) const noexcept { return std::abs(xi) <= beta; }
};

/// Half-width of B for the conic case at (r, c):
///   forward  parabola / hyperbola / ellipse whose centre lies outside
///            [-xi_max, xi_max]: beta = xi_max;
///   forward  ellipse containing its centre: beta = top of the bounding box;
///   backward ellipse: beta = right edge of the bounding box;
///   backward c >= 1: beta = xi_max.
inline IntervalB beta_for(double r, double c, Direction dir) {
  const double xm = xi_max(r);
  if (dir == Direction::Forward) {
    if (c == 1.0) throw Error(Errc::no_interval, "no forward interval when a = 0");
    if (c > 0.0 && c < 1.0 && std::abs(r / (2.0 * c)) < xm) {
      return {std::sqrt((r * r + 4.0 * c) / (4.0 * (1.0 - c) * c))};
    }
    return {xm};
  }
  if (c <= 0.0) throw Error(Errc::no_interval, "no backward interval for c <= 0");
  if (c < 1.0) return {(std::abs(r) + std::sqrt(r * r + 4.0 * c)) / (2.0 * c)};
  return {xm};
}

namespace detail {

/// Relative slack for image-in-B comparisons. Several cases put an image
/// endpoint exactly on the boundary of B (a fixed point, a vertex).
inline constexpr double kContainSlack = 1e-12;

inline bool interval_within(double lo, double hi, double beta) noexcept {
  const double lim = beta * (1.0 + kContainSlack);
  return lo >= -lim && hi <= lim;
}

inline std::optional<IntervalB> try_beta_for(double r, double c, Direction dir) noexcept {
  const double xm = xi_max(r);
  if (dir == Direction::Forward) {
    if (c == 1.0) return std::nullopt;
    if (c > 0.0 && c < 1.0 && std::abs(r / (2.0 * c)) < xm) {
      return IntervalB{std::sqrt((r * r + 4.0 * c) / (4.0 * (1.0 - c) * c))};
    }
    return IntervalB{xm};
  }
  if (c <= 0.0) return std::nullopt;
  if (c < 1.0) return IntervalB{(std::abs(r) + std::sqrt(r * r + 4.0 * c)) / (2.0 * c)};
  return IntervalB{xm};
}

}  // namespace detail

/// Certifies the mapping-into condition for both branches on B from the
/// extrema of the (quadratic) radicand over B; no sampling.
///
/// Forward: f_s(B) within B and 0 not in f_s(B), i.e. the radicand is
/// strictly positive on B.
/// Backward: g_s(B) within B with the two branches strictly separated
/// (radicand strictly positive on B). The backward image of a branch may
/// straddle 0; the branch label, not the sign, selects the orbit.
inline bool verify_maps_into(double r, double c, IntervalB B, Direction dir) noexcept {
  const double beta = B.beta;
  if (!(beta > 0.0) || !std::isfinite(beta)) return false;
  if (dir == Direction::Forward) {
    const double a = 1.0 - c;
    if (a == 0.0) return false;
    auto h = [&](double x) { return -c * x * x + r * x + 1.0; };
    double hmin = std::min(h(-beta), h(beta));
    double hmax = std::max(h(-beta), h(beta));
    if (c != 0.0) {
      const double v = r / (2.0 * c);
      if (std::abs(v) < beta) {
        hmin = std::min(hmin, h(v));
        hmax = std::max(hmax, h(v));
      }
    }
    const double qmin = a > 0.0 ? hmin / a : hmax / a;
    const double qmax = a > 0.0 ? hmax / a : hmin / a;
    if (!(qmin > 0.0)) return false;
    // f_+(B) = [sqrt(qmin), sqrt(qmax)], f_- its mirror image.
    return detail::interval_within(std::sqrt(qmin), std::sqrt(qmax), beta);
  }
  if (c == 0.0) return false;
  // The radicand is even in xi and monotone in xi^2.
  const double d0 = detail::backward_radicand(0.0, r, c);
  const double db = detail::backward_radicand(beta, r, c);
  const double dmin = std::min(d0, db), dmax = std::max(d0, db);
  if (!(dmin > 0.0)) return false;
  for (double s : {-1.0, 1.0}) {
    const double y1 = (r + s * std::sqrt(dmin)) / (2.0 * c);
    const double y2 = (r + s * std::sqrt(dmax)) / (2.0 * c);
    if (!detail::interval_within(std::min(y1, y2), std::max(y1, y2), beta)) return false;
  }
  return true;
}

/// a xi_t^2 + c xi_{t-1}^2 - r xi_{t-1} - 1, the eps = 0 curve.
inline double ai_curve_value(double xi_t, double xi_tm1, double r, double c) {
  return (1.0 - c) * xi_t * xi_t + c * xi_tm1 * xi_tm1 - r * xi_tm1 - 1.0;
}

/// Largest |curve value| over all cyclic pairs (xi_{t-1}, xi_t).
inline double ai_curve_residual(std::span<const double> xi, double r, double c) {
  const std::size_t n = xi.size();
  double worst = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    const double prev = xi[(t + n - 1) % n];
    worst = std::max(worst, std::abs(ai_curve_value(xi[t], prev, r, c)));
  }
  return worst;
}

struct AIState {
  std::vector<double> xi;  // xi_0 .. xi_{n-1}, periodic
  SymbolSequence symbols;
  double r = 0.0;
  double c = 0.0;
  Direction direction = Direction::Forward;
  double residual = 0.0;  // ai_curve_residual(xi)
};

struct AIStateOptions {
  double tol = 1e-12;
  /// Total branch-map evaluations; 0 selects 10 n ceil(log2(1/tol)), floor 10000.
  long max_iter = 0;
  /// Initial value fed to the first branch map; defaults to +-beta/2.
  std::optional<double> seed;
};

inline long default_max_iter(std::size_t period, double tol) {
  const double bits = std::ceil(std::log(1.0 / tol) / std::log(2.0));
  const long est = static_cast<long>(10.0 * static_cast<double>(period) * std::max(bits, 1.0));
  return std::max(est, 10000L);
}

/// Iterates the branch maps cyclically through the word until two successive
/// period blocks agree to opts.tol in sup norm. Forward states apply
/// xi_t = f_{s_t}(xi_{t-1}); backward states apply xi_{t-1} = g_{s_{t-1}}(xi_t),
/// walking the word in reverse, so the stored state always reads forward.
inline AIState ai_state_from_symbols(const SymbolSequence& seq, double r, double c, Direction dir,
                                     const AIStateOptions& opts = {}) {
  const std::size_t n = seq.size();
  if (n == 0) throw Error(Errc::invalid_argument, "empty symbol sequence");
  if (dir == Direction::Forward && c == 1.0) {
    throw Error(Errc::no_forward_map, "no forward map when a = 1 - c = 0");
  }
  if (dir == Direction::Backward && c == 0.0) {
    throw Error(Errc::no_backward_branching, "no backward branching when c = 0");
  }
  const long max_iter = opts.max_iter > 0 ? opts.max_iter : default_max_iter(n, opts.tol);

  const auto B = detail::try_beta_for(r, c, dir);
  const double half = 0.5 * (B ? B->beta : xi_max(r));
  // The seed stands for xi_{-1} (forward) or xi_n = xi_0 (backward).
  const Symbol seed_symbol = dir == Direction::Forward ? seq[-1] : seq[0];
  double carry = opts.seed.value_or(sign_of(seed_symbol) * half);

  std::vector<double> block(n), prev(n);
  auto run_block = [&] {
    if (dir == Direction::Forward) {
      for (std::size_t t = 0; t < n; ++t) {
        const auto st = detail::forward_step(carry, sign_of(seq[static_cast<std::ptrdiff_t>(t)]), r, c);
        if (std::isnan(st.value)) {
          throw Error(Errc::branch_undefined, "forward branch undefined while building AI state");
        }
        block[t] = carry = st.value;
      }
    } else {
      for (std::size_t k = n; k-- > 0;) {
        const auto st = detail::backward_step(carry, sign_of(seq[static_cast<std::ptrdiff_t>(k)]), r, c);
        if (std::isnan(st.value)) {
          throw Error(Errc::branch_undefined, "backward branch undefined while building AI state");
        }
        block[k] = carry = st.value;
      }
    }
  };
  auto sup_change = [&] {
    double d = 0.0;
    for (std::size_t t = 0; t < n; ++t) d = std::max(d, std::abs(block[t] - prev[t]));
    return d;
  };

  run_block();
  long used = static_cast<long>(n);
  bool converged = false;
  double change = detail::kInf;
  while (used < max_iter) {
    prev = block;
    run_block();
    used += static_cast<long>(n);
    change = sup_change();
    if (change < opts.tol) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    throw Error(Errc::convergence_failure,
                "AI state for '" + seq.str() + "' did not converge within " +
                    std::to_string(max_iter) + " branch evaluations");
  }
  // Drive the wrap-around pair onto the curve: keep iterating while the
  // contraction still shrinks the block change.
  for (int extra = 0; extra < 64 && change > 0.0; ++extra) {
    prev = block;
    run_block();
    const double next = sup_change();
    if (!(next < change)) break;
    change = next;
  }

  for (std::size_t t = 0; t < n; ++t) {
    const Symbol s = seq[static_cast<std::ptrdiff_t>(t)];
    if (block[t] == 0.0 || (block[t] > 0.0) != (s == Symbol::Plus)) {
      throw Error(Errc::symbol_mismatch, "AI state sign pattern differs from '" + seq.str() +
                                             "' at index " + std::to_string(t));
    }
  }
  AIState out;
  out.residual = ai_curve_residual(block, r, c);
  out.xi = std::move(block);
  out.symbols = seq;
  out.r = r;
  out.c = c;
  out.direction = dir;
  return out;
}

}  // namespace ailimit
