#pragma once

// The 3D quadratic diffeomorphism
//
//   L(x, y, z) = (delta z + alpha + tau x - sigma y + Q(x, y), x, y),
//   Q(x, y)    = a x^2 + b x y + c y^2,
//
// its scalar third-order recurrence, the rescaled (xi = eps x) residual and
// the classification of the quadratic curve obtained at eps = 0.

#include <cmath>
#include <string_view>

#include "ailimit/error.hpp"

namespace ailimit {

/// Absolute tolerance used when testing parameter degeneracies such as
/// c == -r^2/4. Those sets have measure zero, so a float grid only lands on
/// them up to round-off.
inline constexpr double kDegeneracyTol = 1e-12;

struct RescaledParams;

struct MapParams {
  double alpha = 0.0;
  double sigma = 0.0;
  double tau = 0.0;
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double delta = 0.0;  // Jacobian determinant

  /// a + b + c = 1 and tau = 0.
  static MapParams normalized(double alpha, double sigma, double a, double c, double delta) {
    return MapParams{alpha, sigma, 0.0, a, 1.0 - a - c, c, delta};
  }

  /// Normalized with b = 0, so a = 1 - c.
  static MapParams reduced(double alpha, double sigma, double c, double delta) {
    return MapParams{alpha, sigma, 0.0, 1.0 - c, 0.0, c, delta};
  }

  /// alpha = -eps^-2, sigma = r eps^-1. Requires eps > 0.
  static MapParams from_rescaled(const RescaledParams& q, double c, double delta);

  bool is_normalized(double tol = kDegeneracyTol) const {
    return std::abs(a + b + c - 1.0) <= tol && std::abs(tau) <= tol;
  }
  bool is_reduced(double tol = kDegeneracyTol) const {
    return is_normalized(tol) && std::abs(b) <= tol;
  }
  bool volume_contracting() const { return std::abs(delta) <= 1.0; }
};

struct RescaledParams {
  double epsilon = 0.0;
  double r = 0.0;

  /// Inverse of MapParams::from_rescaled; requires alpha < 0.
  static RescaledParams from_map(const MapParams& p) {
    if (!(p.alpha < 0.0)) {
      throw Error(Errc::invalid_argument, "rescaling requires alpha < 0");
    }
    const double eps = 1.0 / std::sqrt(-p.alpha);
    return RescaledParams{eps, p.sigma * eps};
  }
};

inline MapParams MapParams::from_rescaled(const RescaledParams& q, double c, double delta) {
  if (!(q.epsilon > 0.0)) {
    throw Error(Errc::invalid_argument, "rescaled parameters need epsilon > 0");
  }
  return reduced(-1.0 / (q.epsilon * q.epsilon), q.r / q.epsilon, c, delta);
}

struct State3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const State3&, const State3&) = default;
};

inline bool is_finite(const State3& s) {
  return std::isfinite(s.x) && std::isfinite(s.y) && std::isfinite(s.z);
}

inline double distance(const State3& u, const State3& v) {
  const double dx = u.x - v.x, dy = u.y - v.y, dz = u.z - v.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

inline double quadratic_form(double x, double y, double a, double b, double c) {
  return a * x * x + b * x * y + c * y * y;
}

inline double quadratic_form(double x, double y, const MapParams& p) {
  return quadratic_form(x, y, p.a, p.b, p.c);
}

/// x_{t+1} = delta x_{t-2} + alpha + tau x_t - sigma x_{t-1} + Q(x_t, x_{t-1}).
/// The tau term vanishes under the normalization; it is kept so the recurrence
/// and map_forward share one evaluation order for any parameters.
inline double difference_step(double x_t, double x_tm1, double x_tm2, const MapParams& p) {
  return p.delta * x_tm2 + p.alpha + p.tau * x_t - p.sigma * x_tm1 + quadratic_form(x_t, x_tm1, p);
}

/// Non-finite components signal divergence; no exception is thrown.
inline State3 map_forward(const State3& s, const MapParams& p) {
  return State3{difference_step(s.x, s.y, s.z, p), s.x, s.y};
}

inline State3 map_inverse(const State3& s, const MapParams& p) {
  if (p.delta == 0.0) {
    throw Error(Errc::non_invertible, "map is not invertible when delta = 0");
  }
  // s = (x', y', z') with y' = x, z' = y.
  const double x = s.y;
  const double y = s.z;
  const double z = (s.x - p.alpha - p.tau * x + p.sigma * y - quadratic_form(x, y, p)) / p.delta;
  return State3{x, y, z};
}

/// Q(xi_t, xi_{t-1}) - r xi_{t-1} - 1 - eps (xi_{t+1} - delta xi_{t-2}).
inline double rescaled_residual(double xi_tp1, double xi_t, double xi_tm1, double xi_tm2,
                                const RescaledParams& q, double a, double b, double c,
                                double delta) {
  return quadratic_form(xi_t, xi_tm1, a, b, c) - q.r * xi_tm1 - 1.0 -
         q.epsilon * (xi_tp1 - delta * xi_tm2);
}

enum class ConicClass {
  Ellipse,
  Parabola,
  Hyperbola,
  DegenerateVerticalLines,
  DegenerateIntersectingLines,
  DegenerateHorizontalLines,
  DegeneratePoint,
};

constexpr std::string_view to_string(ConicClass k) {
  switch (k) {
    case ConicClass::Ellipse: return "Ellipse";
    case ConicClass::Parabola: return "Parabola";
    case ConicClass::Hyperbola: return "Hyperbola";
    case ConicClass::DegenerateVerticalLines: return "DegenerateVerticalLines";
    case ConicClass::DegenerateIntersectingLines: return "DegenerateIntersectingLines";
    case ConicClass::DegenerateHorizontalLines: return "DegenerateHorizontalLines";
    case ConicClass::DegeneratePoint: return "DegeneratePoint";
  }
  return "?";
}

/// Reduced mode (b = 0, a = 1 - c): the discriminant is 4c(c - 1).
/// The degenerate point case needs c = -r^2/4 with 0 < c < 1 and so cannot
/// occur here; the tag exists for the general classification.
inline ConicClass classify_conic(double r, double c, double tol = kDegeneracyTol) {
  if (std::abs(c) <= tol && std::abs(r) <= tol) return ConicClass::DegenerateHorizontalLines;
  if (std::abs(c - 1.0) <= tol) return ConicClass::DegenerateVerticalLines;
  if (std::abs(c) <= tol) return ConicClass::Parabola;
  if (std::abs(c + 0.25 * r * r) <= tol) return ConicClass::DegenerateIntersectingLines;
  if (c > 0.0 && c < 1.0) return ConicClass::Ellipse;
  return ConicClass::Hyperbola;
}

struct FixedPointPair {
  double minus;
  double plus;
};

/// xi_{+-} = (r +- sqrt(r^2 + 4)) / 2, the roots of xi^2 = r xi + 1.
/// The small-magnitude root comes from the product of the roots (= -1).
inline FixedPointPair fixed_points_ai(double r) {
  const double root = std::sqrt(r * r + 4.0);
  if (r >= 0.0) {
    const double plus = 0.5 * (r + root);
    return {-1.0 / plus, plus};
  }
  const double minus = 0.5 * (r - root);
  return {minus, -1.0 / minus};
}

/// max(|xi_+|, |xi_-|).
inline double xi_max(double r) { return 0.5 * (std::abs(r) + std::sqrt(r * r + 4.0)); }

inline double conic_center(double r, double c) {
  if (c == 0.0) {
    throw Error(Errc::undefined_center, "conic center undefined for c = 0");
  }
  return r / (2.0 * c);
}

}  // namespace ailimit
