#pragma once

// Parameter regions in the (r, c) plane where AI states exist:
//   R_n  - n-step compositions of the branch maps contract on B (numerical),
//   R_A  - the branch maps send B into itself (closed form),
// and the discrete Hausdorff distance used to compare them.

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <iterator>
#include <limits>
#include <numbers>
#include <optional>
#include <utility>
#include <vector>

#include "ailimit/ai_limit.hpp"
#include "ailimit/error.hpp"
#include "ailimit/parallel.hpp"

namespace ailimit {

struct ParamGrid {
  double r_min = 0.0, r_max = 1.0;
  double c_min = 0.0, c_max = 1.0;
  int nr = 2, nc = 2;

  void validate() const {
    if (!(r_min < r_max) || !(c_min < c_max) || nr < 2 || nc < 2) {
      throw Error(Errc::invalid_argument, "grid needs r_min < r_max, c_min < c_max, nr, nc >= 2");
    }
  }
  /// Lattice points include both end points.
  double r_step() const { return (r_max - r_min) / (nr - 1); }
  double c_step() const { return (c_max - c_min) / (nc - 1); }
  double r_at(int i) const { return i == nr - 1 ? r_max : r_min + i * r_step(); }
  double c_at(int j) const { return j == nc - 1 ? c_max : c_min + j * c_step(); }
  std::size_t cells() const { return static_cast<std::size_t>(nr) * static_cast<std::size_t>(nc); }

  friend bool operator==(const ParamGrid&, const ParamGrid&) = default;
};

/// Labels are stored r-major: index = i * nc + j. For numerical masks a label
/// k > 0 is the smallest n with ||DF^n|| < 1; analytical masks use 0/1.
struct RegionMask {
  ParamGrid grid;
  Direction direction = Direction::Forward;
  bool analytic = false;
  std::vector<int> labels;

  int label(int i, int j) const { return labels[static_cast<std::size_t>(i) * grid.nc + j]; }
  bool member(int i, int j) const { return label(i, j) > 0; }

  /// The mask of R_n: cells whose label is in [1, n].
  RegionMask truncated(int n) const {
    RegionMask out = *this;
    for (int& l : out.labels) {
      if (l > n) l = 0;
    }
    return out;
  }

  std::size_t count() const {
    return static_cast<std::size_t>(std::count_if(labels.begin(), labels.end(), [](int l) { return l > 0; }));
  }
};

namespace detail {

/// Walks all 2^n words from one seed, sharing prefixes: consecutive word
/// indices differ in their trailing bits only, so only that suffix of the
/// composition is recomputed. Returns the largest |d/dx| over the leaves;
/// with `stop_at` set, returns as soon as a leaf reaches it.
inline double max_composition_slope(Direction dir, double seed, double r, double c, int n,
                                    double stop_at = kInf) {
  std::array<double, 64> val{};
  std::array<double, 64> prod{};
  const std::uint64_t words = std::uint64_t{1} << n;
  double best = 0.0;
  for (std::uint64_t w = 0; w < words; ++w) {
    // Symbol j is bit (n - 1 - j) of w; the first j that changed from w - 1.
    const int first = w == 0 ? 0 : n - 1 - std::countr_zero(w);
    double x = first == 0 ? seed : val[first - 1];
    double d = first == 0 ? 1.0 : prod[first - 1];
    for (int j = first; j < n; ++j) {
      const double s = ((w >> (n - 1 - j)) & 1u) ? 1.0 : -1.0;
      const BranchStep st = branch_step(dir, x, s, r, c);
      x = st.value;
      d *= st.slope;
      val[j] = x;
      prod[j] = d;
    }
    const double m = std::isnan(d) ? kInf : std::abs(d);
    if (m > best) best = m;
    if (best >= stop_at) return best;
  }
  return best;
}

inline std::vector<double> seeds_on(IntervalB B, int num_seeds) {
  std::vector<double> seeds(static_cast<std::size_t>(num_seeds));
  const double beta = B.beta;
  if (num_seeds == 1) {
    seeds[0] = 0.0;
    return seeds;
  }
  for (int k = 0; k < num_seeds; ++k) {
    seeds[k] = -beta + 2.0 * beta * k / (num_seeds - 1);
  }
  // Radicands may vanish exactly at the ends of B.
  seeds.front() += 1e-9 * beta;
  seeds.back() -= 1e-9 * beta;
  return seeds;
}

inline double norm_estimate_on(Direction dir, double r, double c, IntervalB B, int n, int num_seeds,
                               double stop_at) {
  double best = 0.0;
  for (double seed : seeds_on(B, num_seeds)) {
    best = std::max(best, max_composition_slope(dir, seed, r, c, n, stop_at));
    if (best >= stop_at) break;
  }
  return best;
}

}  // namespace detail

inline constexpr int kMaxWordLength = 40;

/// Estimate of ||DF^n||_inf: the largest |d/dx (f_{s_{n-1}} o ... o f_{s_0})(x)|
/// over all 2^n words and num_seeds equispaced x in B. +inf when no case
/// defines B or B fails the mapping-into check.
inline double derivative_norm_estimate(double r, double c, int n, Direction dir, int num_seeds = 100) {
  if (n < 1 || n > kMaxWordLength) throw Error(Errc::invalid_argument, "word length out of range");
  if (num_seeds < 1) throw Error(Errc::invalid_argument, "num_seeds must be positive");
  const auto B = detail::try_beta_for(r, c, dir);
  if (!B || !verify_maps_into(r, c, *B, dir)) return detail::kInf;
  return detail::norm_estimate_on(dir, r, c, *B, n, num_seeds, detail::kInf);
}

/// Smallest n in [1, n_max] with ||DF^n|| < 1 at (r, c), or 0.
inline int region_label(double r, double c, int n_max, Direction dir, int num_seeds) {
  const auto B = detail::try_beta_for(r, c, dir);
  if (!B || !verify_maps_into(r, c, *B, dir)) return 0;
  for (int n = 1; n <= n_max; ++n) {
    if (detail::norm_estimate_on(dir, r, c, *B, n, num_seeds, 1.0) < 1.0) return n;
  }
  return 0;
}

inline RegionMask compute_Rn(const ParamGrid& grid, int n_max, Direction dir, int num_seeds = 100,
                             unsigned threads = 0) {
  grid.validate();
  if (n_max < 1 || n_max > kMaxWordLength) throw Error(Errc::invalid_argument, "n_max out of range");
  if (num_seeds < 1) throw Error(Errc::invalid_argument, "num_seeds must be positive");
  RegionMask mask{grid, dir, false, std::vector<int>(grid.cells(), 0)};
  parallel_for(grid.cells(), threads, [&](std::size_t idx) {
    const int i = static_cast<int>(idx / grid.nc);
    const int j = static_cast<int>(idx % grid.nc);
    mask.labels[idx] = region_label(grid.r_at(i), grid.c_at(j), n_max, dir, num_seeds);
  });
  return mask;
}

struct CubicRoots {
  std::optional<double> c1, c2, c3;
};

/// Coefficients of 64c^3 + 32(r^2-2)c^2 + (r^2-4)(5r^2-4)c - 4r^4.
inline std::array<double, 4> ellipse_cubic(double r) {
  const double r2 = r * r;
  return {64.0, 32.0 * (r2 - 2.0), (r2 - 4.0) * (5.0 * r2 - 4.0), -4.0 * r2 * r2};
}

inline double eval_cubic(const std::array<double, 4>& k, double x) {
  return ((k[0] * x + k[1]) * x + k[2]) * x + k[3];
}

/// Real roots of the ellipse cubic in ascending order. Three real roots when
/// 25 r^2 <= 8 (trigonometric method), else the single real root as C3
/// (Cardano). Each root gets one Newton step.
inline CubicRoots cubic_C_roots(double r) {
  const auto k = ellipse_cubic(r);
  // Monic form c^3 + B c^2 + C c + D, depressed with c = t - B/3.
  const double B = k[1] / k[0], C = k[2] / k[0], D = k[3] / k[0];
  const double p = C - B * B / 3.0;
  const double q = 2.0 * B * B * B / 27.0 - B * C / 3.0 + D;
  auto polish = [&](double x) {
    const double f = eval_cubic(k, x);
    const double df = (3.0 * k[0] * x + 2.0 * k[1]) * x + k[2];
    if (std::abs(df) > 1e-8 * (std::abs(k[2]) + 1.0)) x -= f / df;
    return x;
  };
  CubicRoots out;
  if (25.0 * r * r <= 8.0 && p < 0.0) {
    const double m = 2.0 * std::sqrt(-p / 3.0);
    const double arg = std::clamp(3.0 * q / (p * m), -1.0, 1.0);
    const double theta = std::acos(arg) / 3.0;
    std::array<double, 3> roots{};
    for (int i = 0; i < 3; ++i) {
      roots[i] = polish(m * std::cos(theta - 2.0 * std::numbers::pi * i / 3.0) - B / 3.0);
    }
    std::sort(roots.begin(), roots.end());
    out.c1 = roots[0];
    out.c2 = roots[1];
    out.c3 = roots[2];
    return out;
  }
  const double disc = q * q / 4.0 + p * p * p / 27.0;
  const double sq = std::sqrt(std::max(disc, 0.0));
  const double t = std::cbrt(-q / 2.0 + sq) + std::cbrt(-q / 2.0 - sq);
  out.c3 = polish(t - B / 3.0);
  return out;
}

/// Closed-form forward region:
///   |r| <= 2/sqrt(15):              c < C2(r)
///   2/sqrt(15) <= |r| <= 2/sqrt(3): c < 1 + |r|(|r| - sqrt(r^2 + 4))
///   |r| >= 2/sqrt(3):               c < -r^2/4
inline bool analytic_RA_forward(double r, double c) {
  const double R = std::abs(r);
  if (R <= 2.0 / std::sqrt(15.0)) {
    return c < *cubic_C_roots(r).c2;
  }
  if (R <= 2.0 / std::sqrt(3.0)) return c < 1.0 + R * (R - std::sqrt(r * r + 4.0));
  return c < -0.25 * r * r;
}

/// Closed-form backward region: c above the largest real root of the cubic.
inline bool analytic_RA_backward(double r, double c) { return c > *cubic_C_roots(r).c3; }

inline bool analytic_RA(double r, double c, Direction dir) {
  return dir == Direction::Forward ? analytic_RA_forward(r, c) : analytic_RA_backward(r, c);
}

inline RegionMask analytic_mask(const ParamGrid& grid, Direction dir) {
  grid.validate();
  RegionMask mask{grid, dir, true, std::vector<int>(grid.cells(), 0)};
  for (int i = 0; i < grid.nr; ++i) {
    for (int j = 0; j < grid.nc; ++j) {
      mask.labels[static_cast<std::size_t>(i) * grid.nc + j] = analytic_RA(grid.r_at(i), grid.c_at(j), dir) ? 1 : 0;
    }
  }
  return mask;
}

/// Mapping-into membership evaluated directly with beta_for on every cell.
inline RegionMask maps_into_mask(const ParamGrid& grid, Direction dir) {
  grid.validate();
  RegionMask mask{grid, dir, true, std::vector<int>(grid.cells(), 0)};
  for (int i = 0; i < grid.nr; ++i) {
    for (int j = 0; j < grid.nc; ++j) {
      const double r = grid.r_at(i), c = grid.c_at(j);
      const auto B = detail::try_beta_for(r, c, dir);
      mask.labels[static_cast<std::size_t>(i) * grid.nc + j] = B && verify_maps_into(r, c, *B, dir) ? 1 : 0;
    }
  }
  return mask;
}

namespace detail {

/// Largest distance from a member of `from` to its nearest member of `to`.
/// Members of `to` are bucketed by c-row with sorted r-indices; rows are
/// visited outward from the query row and pruned by the c offset alone.
inline double directed_hausdorff(const RegionMask& from, const RegionMask& to) {
  const ParamGrid& g = from.grid;
  const double hr = g.r_step(), hc = g.c_step();
  std::vector<std::vector<int>> rows(static_cast<std::size_t>(g.nc));
  for (int i = 0; i < g.nr; ++i) {
    for (int j = 0; j < g.nc; ++j) {
      if (to.member(i, j)) rows[j].push_back(i);
    }
  }
  double worst = 0.0;
  for (int i = 0; i < g.nr; ++i) {
    for (int j = 0; j < g.nc; ++j) {
      if (!from.member(i, j)) continue;
      double best = std::numeric_limits<double>::infinity();
      for (int off = 0; off < g.nc; ++off) {
        const double dc = off * hc;
        if (dc * dc >= best) break;
        const int candidates[2] = {j - off, j + off};
        for (int k = 0; k < (off == 0 ? 1 : 2); ++k) {
          const int jj = candidates[k];
          if (jj < 0 || jj >= g.nc || rows[jj].empty()) continue;
          const auto& row = rows[jj];
          auto it = std::lower_bound(row.begin(), row.end(), i);
          auto consider = [&](int ii) {
            const double dr = (ii - i) * hr;
            best = std::min(best, dr * dr + dc * dc);
          };
          if (it != row.end()) consider(*it);
          if (it != row.begin()) consider(*std::prev(it));
        }
      }
      worst = std::max(worst, best);
      if (worst == std::numeric_limits<double>::infinity()) return worst;
    }
  }
  return std::sqrt(worst);
}

}  // namespace detail

/// Discrete Hausdorff distance between the member cell points of two masks
/// on the same grid, Euclidean in (r, c).
inline double hausdorff_distance(const RegionMask& A, const RegionMask& B) {
  if (!(A.grid == B.grid)) throw Error(Errc::invalid_argument, "masks are on different grids");
  if (A.count() == 0 || B.count() == 0) {
    throw Error(Errc::undefined_distance, "Hausdorff distance undefined for an empty set");
  }
  return std::max(detail::directed_hausdorff(A, B), detail::directed_hausdorff(B, A));
}

}  // namespace ailimit
