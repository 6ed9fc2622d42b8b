#pragma once

// Pseudo-arclength continuation of periodic AI states (eps = 0) into periodic
// orbits of the full map (eps > 0).
//
// A period-n orbit xi is a zero of G : R^n x R -> R^n with
//   G_t(xi, eps) = a xi_t^2 + c xi_{t-1}^2 - r xi_{t-1} - 1 - eps (xi_{t+1} - delta xi_{t-2}),
// indices mod n. Each step predicts along the unit tangent and corrects with
// Broyden's method on the bordered system {G = 0, v . (z - z_k) = ell}.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "ailimit/ai_limit.hpp"
#include "ailimit/error.hpp"
#include "ailimit/qr_update.hpp"
#include "ailimit/symbols.hpp"

namespace ailimit {

/// Reduced-mode parameters of G (b = 0, a = 1 - c).
struct ContinuationParams {
  double r = 0.0;
  double c = 0.0;
  double delta = 0.0;

  double a() const { return 1.0 - c; }
};

struct PeriodicState {
  Eigen::VectorXd xi;
  double epsilon = 0.0;

  Eigen::Index period() const { return xi.size(); }
};

struct Tangent {
  Eigen::VectorXd xi_dot;
  double eps_dot = 0.0;

  Eigen::VectorXd stacked() const {
    Eigen::VectorXd v(xi_dot.size() + 1);
    v << xi_dot, eps_dot;
    return v;
  }
  static Tangent unstack(const Eigen::VectorXd& v) {
    return Tangent{v.head(v.size() - 1), v(v.size() - 1)};
  }
  double norm() const { return std::sqrt(xi_dot.squaredNorm() + eps_dot * eps_dot); }
  Tangent normalized() const {
    const double n = norm();
    return Tangent{xi_dot / n, eps_dot / n};
  }
};

struct BranchPoint {
  PeriodicState state;
  Tangent tangent;
  double residual_norm = 0.0;  // ||G||_inf
  double step_len = 0.0;       // ell used to reach this point (0 for the start)
  int corrector_iters = 0;
};

enum class Termination { EpsilonTurnaround, StepUnderflow, CorrectorFailure, EpsilonLimit, StepLimit };

constexpr std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::EpsilonTurnaround: return "EpsilonTurnaround";
    case Termination::StepUnderflow: return "StepUnderflow";
    case Termination::CorrectorFailure: return "CorrectorFailure";
    case Termination::EpsilonLimit: return "EpsilonLimit";
    case Termination::StepLimit: return "StepLimit";
  }
  return "?";
}

struct Branch {
  std::vector<BranchPoint> points;
  Termination termination = Termination::StepLimit;
  SymbolSequence symbols;
  std::vector<std::string> log;  // step-size reductions and why

  double max_epsilon() const {
    double m = 0.0;
    for (const auto& p : points) m = std::max(m, p.state.epsilon);
    return m;
  }
};

struct ContinuationConfig {
  double ell0 = 0.0;  // 0: 1e-2 below period 10, 1e-1 otherwise
  double ell_min = 1e-15;
  double jump_threshold = 0.1;
  double corrector_tol = 1e-12;
  int max_corrector_iters = 150;
  double initial_eps_dot = 0.005;
  double divergence_radius = 10.0;
  /// Stop once eps reaches this value; branches that never turn need a bound.
  double eps_max = 2.0;
  long max_steps = 200000;

  double initial_step(Eigen::Index period) const {
    if (ell0 > 0.0) return ell0;
    return period < 10 ? 1e-2 : 1e-1;
  }
};

/// Reciprocal condition estimate below which a linear solve is refused.
inline constexpr double kSingularRcond = 1e-14;

inline Eigen::VectorXd residual_G(const PeriodicState& s, const ContinuationParams& p) {
  const Eigen::Index n = s.period();
  const double a = p.a(), eps = s.epsilon;
  Eigen::VectorXd g(n);
  for (Eigen::Index t = 0; t < n; ++t) {
    const double next = s.xi((t + 1) % n);
    const double cur = s.xi(t);
    const double prev = s.xi((t + n - 1) % n);
    const double prev2 = s.xi((t + 2 * n - 2) % n);
    g(t) = a * cur * cur + p.c * prev * prev - p.r * prev - 1.0 - eps * (next - p.delta * prev2);
  }
  return g;
}

struct JacobianG {
  Eigen::MatrixXd dxi;   // n x n, cyclic with four wrapped diagonals
  Eigen::VectorXd deps;  // n
};

/// For n <= 3 several of the four stencil columns coincide; their partials add.
inline JacobianG jacobian_G(const PeriodicState& s, const ContinuationParams& p) {
  const Eigen::Index n = s.period();
  const double a = p.a(), eps = s.epsilon;
  JacobianG J{Eigen::MatrixXd::Zero(n, n), Eigen::VectorXd(n)};
  for (Eigen::Index t = 0; t < n; ++t) {
    const Eigen::Index tp1 = (t + 1) % n, tm1 = (t + n - 1) % n, tm2 = (t + 2 * n - 2) % n;
    J.dxi(t, tp1) += -eps;
    J.dxi(t, t) += 2.0 * a * s.xi(t);
    J.dxi(t, tm1) += 2.0 * p.c * s.xi(tm1) - p.r;
    J.dxi(t, tm2) += eps * p.delta;
    J.deps(t) = -(s.xi(tp1) - p.delta * s.xi(tm2));
  }
  return J;
}

/// eps_dot = cfg.initial_eps_dot and dG/dxi xi_dot = -dG/deps eps_dot.
/// Not normalized.
inline Tangent initial_tangent(const PeriodicState& s, const ContinuationParams& p,
                               const ContinuationConfig& cfg) {
  const JacobianG J = jacobian_G(s, p);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(J.dxi);
  if (!(lu.rcond() > kSingularRcond)) throw Error(Errc::tangent_failure, "dG/dxi is singular at the start point");
  const double eps_dot = cfg.initial_eps_dot;
  return Tangent{lu.solve(-J.deps * eps_dot), eps_dot};
}

inline Eigen::MatrixXd bordered_matrix(const PeriodicState& s, const ContinuationParams& p,
                                       const Tangent& v) {
  const Eigen::Index n = s.period();
  const JacobianG J = jacobian_G(s, p);
  Eigen::MatrixXd M(n + 1, n + 1);
  M.topLeftCorner(n, n) = J.dxi;
  M.topRightCorner(n, 1) = J.deps;
  M.bottomRows(1) = v.stacked().transpose();
  return M;
}

/// Solves [dG/dxi dG/deps; v_prev^T] w = (0, ..., 0, 1) at the accepted point
/// and normalizes. The last row makes w . v_prev = 1 > 0, so the orientation
/// carries over.
inline Tangent next_tangent(const BranchPoint& prev, const ContinuationParams& p) {
  const Eigen::MatrixXd M = bordered_matrix(prev.state, p, prev.tangent);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(M.rows());
  rhs(rhs.size() - 1) = 1.0;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(M);
  if (!(lu.rcond() > kSingularRcond)) throw Error(Errc::tangent_failure, "bordered tangent system is singular");
  const Eigen::VectorXd w = lu.solve(rhs);
  if (!w.allFinite()) throw Error(Errc::tangent_failure, "tangent is not finite");
  return Tangent::unstack(w).normalized();
}

namespace detail {

inline Eigen::VectorXd stack(const PeriodicState& s) {
  Eigen::VectorXd z(s.period() + 1);
  z << s.xi, s.epsilon;
  return z;
}

inline PeriodicState unstack_state(const Eigen::VectorXd& z) {
  return PeriodicState{z.head(z.size() - 1), z(z.size() - 1)};
}

}  // namespace detail

/// Broyden iteration on F(z) = (G(z), v . (z - z_prev) - ell) from the
/// predicted point. The approximate Jacobian starts from the analytic
/// bordered matrix at the predictor and is kept as a QR factor with rank-one
/// updates. The arclength row is linear, so Broyden leaves it exact.
inline BranchPoint corrector(const PeriodicState& predicted, const BranchPoint& prev,
                             const ContinuationParams& p, const ContinuationConfig& cfg, double ell) {
  const Eigen::VectorXd v = prev.tangent.stacked();
  const Eigen::VectorXd z_prev = detail::stack(prev.state);
  const Eigen::VectorXd z_pred = detail::stack(predicted);
  const Eigen::Index n = predicted.period();

  auto F = [&](const Eigen::VectorXd& z) {
    Eigen::VectorXd f(n + 1);
    f.head(n) = residual_G(detail::unstack_state(z), p);
    f(n) = v.dot(z - z_prev) - ell;
    return f;
  };
  auto accepted = [&](const Eigen::VectorXd& f) {
    return f.head(n).cwiseAbs().maxCoeff() < cfg.corrector_tol && std::abs(f(n)) < cfg.corrector_tol;
  };

  Eigen::VectorXd z = z_pred;
  Eigen::VectorXd f = F(z);
  QrFactor A(bordered_matrix(predicted, p, prev.tangent));
  for (int it = 0; it <= cfg.max_corrector_iters; ++it) {
    if (!f.allFinite()) throw Error(Errc::divergence_failure, "corrector produced non-finite residual");
    if (accepted(f)) {
      BranchPoint out;
      out.state = detail::unstack_state(z);
      out.residual_norm = f.head(n).cwiseAbs().maxCoeff();
      out.step_len = ell;
      out.corrector_iters = it;
      return out;
    }
    if (it == cfg.max_corrector_iters) break;
    const Eigen::VectorXd dz = A.solve(-f);
    z += dz;
    if ((z - z_pred).norm() > cfg.divergence_radius) {
      throw Error(Errc::divergence_failure, "corrector left the ball around the predictor");
    }
    const Eigen::VectorXd f_new = F(z);
    // Broyden: A += (df - A dz) dz^T / |dz|^2 with A dz = -f, so df - A dz = f_new.
    const double dz2 = dz.squaredNorm();
    if (dz2 == 0.0) break;
    A.rank_one_update(f_new / dz2, dz);
    f = f_new;
  }
  throw Error(Errc::corrector_failure,
              "corrector did not converge in " + std::to_string(cfg.max_corrector_iters) + " iterations");
}

/// Newton polish of an eps = 0 state on G(., 0) = 0.
inline PeriodicState polish_ai_state(PeriodicState s, const ContinuationParams& p, double tol) {
  for (int it = 0; it < 8; ++it) {
    const Eigen::VectorXd g = residual_G(s, p);
    if (g.cwiseAbs().maxCoeff() <= tol * 1e-2) break;
    s.xi -= jacobian_G(s, p).dxi.partialPivLu().solve(g);
  }
  return s;
}

inline Branch continue_branch(const SymbolSequence& seq, double r, double c, double delta,
                              const ContinuationConfig& cfg = {}) {
  const ContinuationParams p{r, c, delta};
  AIState ai;
  try {
    ai = ai_state_from_symbols(seq, r, c, Direction::Forward);
  } catch (const Error& e) {
    if (e.code() != Errc::no_forward_map) throw;
    ai = ai_state_from_symbols(seq, r, c, Direction::Backward);
  }
  const auto n = static_cast<Eigen::Index>(ai.xi.size());

  Branch branch;
  branch.symbols = seq;

  BranchPoint start;
  start.state.xi = Eigen::Map<const Eigen::VectorXd>(ai.xi.data(), n);
  start.state.epsilon = 0.0;
  if (residual_G(start.state, p).cwiseAbs().maxCoeff() > 1e-2 * cfg.corrector_tol) {
    start.state = polish_ai_state(start.state, p, cfg.corrector_tol);
  }
  start.residual_norm = residual_G(start.state, p).cwiseAbs().maxCoeff();
  start.tangent = initial_tangent(start.state, p, cfg).normalized();
  branch.points.push_back(start);

  double ell = cfg.initial_step(n);
  for (long step = 0; step < cfg.max_steps; ++step) {
    const BranchPoint& prev = branch.points.back();
    PeriodicState predicted{prev.state.xi + ell * prev.tangent.xi_dot,
                            prev.state.epsilon + ell * prev.tangent.eps_dot};
    BranchPoint next;
    try {
      next = corrector(predicted, prev, p, cfg, ell);
    } catch (const Error& e) {
      ell *= 0.5;
      branch.log.push_back("step " + std::to_string(step) + ": corrector failed (" + e.what() +
                           "), ell halved to " + std::to_string(ell));
      if (ell < cfg.ell_min) {
        branch.termination = Termination::CorrectorFailure;
        return branch;
      }
      continue;
    }
    const double jump = std::max((next.state.xi - prev.state.xi).cwiseAbs().maxCoeff(),
                                 std::abs(next.state.epsilon - prev.state.epsilon));
    if (jump > cfg.jump_threshold) {
      ell *= 0.5;
      branch.log.push_back("step " + std::to_string(step) + ": jump " + std::to_string(jump) +
                           ", ell halved to " + std::to_string(ell));
      if (ell < cfg.ell_min) {
        branch.termination = Termination::StepUnderflow;
        return branch;
      }
      continue;
    }
    const bool turned = next.state.epsilon < prev.state.epsilon;
    try {
      next.tangent = turned ? prev.tangent : next_tangent(BranchPoint{next.state, prev.tangent}, p);
    } catch (const Error& e) {
      branch.log.push_back("step " + std::to_string(step) + ": " + e.what());
      next.tangent = prev.tangent;
      branch.points.push_back(std::move(next));
      branch.termination = Termination::CorrectorFailure;
      return branch;
    }
    branch.points.push_back(std::move(next));
    if (turned) {
      branch.termination = Termination::EpsilonTurnaround;
      return branch;
    }
    if (branch.points.back().state.epsilon >= cfg.eps_max) {
      branch.termination = Termination::EpsilonLimit;
      return branch;
    }
  }
  branch.termination = Termination::StepLimit;
  return branch;
}

struct TurningPoint {
  double epsilon;
  double alpha;  // -eps^-2
};

/// Local maxima of eps along the branch. Each maximum is refined by the
/// vertex of the parabola through its two neighbours, parametrized by
/// accumulated step length.
inline std::vector<TurningPoint> detect_turning_points(const Branch& branch) {
  std::vector<TurningPoint> out;
  const auto& pts = branch.points;
  if (pts.empty()) throw Error(Errc::invalid_argument, "empty branch");
  for (std::size_t k = 1; k + 1 < pts.size(); ++k) {
    const double e0 = pts[k - 1].state.epsilon, e1 = pts[k].state.epsilon, e2 = pts[k + 1].state.epsilon;
    if (!(e1 > e0 && e1 >= e2)) continue;
    const double h0 = pts[k].step_len, h1 = pts[k + 1].step_len;
    double eps = e1;
    if (h0 > 0.0 && h1 > 0.0) {
      // Quadratic through (-h0, e0), (0, e1), (h1, e2).
      const double d0 = (e1 - e0) / h0, d1 = (e2 - e1) / h1;
      const double curv = (d1 - d0) / (h0 + h1);  // half the second derivative
      const double slope = d0 + curv * h0;         // derivative at 0
      if (curv < 0.0) {
        const double s = -slope / (2.0 * curv);
        if (s > -h0 && s < h1) eps = e1 + slope * s + curv * s * s;
      }
    }
    out.push_back({eps, -1.0 / (eps * eps)});
  }
  return out;
}

struct DoublingRoots {
  double alpha1;  // smaller
  double alpha2;
};

/// Roots in alpha of
///   (3r^2-4)^2 alpha^2 + 2((5d^2+6d+9) r^2 - 4d^2 + 8d + 12) alpha + (d+1)^2 (d-3)^2 = 0,
/// the period-doubling locus of the fixed point (d = delta).
inline DoublingRoots doubling_curve_alpha(double r, double delta) {
  const double r2 = r * r, d = delta;
  const double A = (3.0 * r2 - 4.0) * (3.0 * r2 - 4.0);
  const double B = 2.0 * ((5.0 * d * d + 6.0 * d + 9.0) * r2 - 4.0 * d * d + 8.0 * d + 12.0);
  const double C = (d + 1.0) * (d + 1.0) * (d - 3.0) * (d - 3.0);
  if (A == 0.0) throw Error(Errc::invalid_argument, "doubling curve degenerates at 3r^2 = 4");
  const double disc = B * B - 4.0 * A * C;
  if (disc < 0.0) throw Error(Errc::no_real_doubling, "doubling curve has no real root");
  // Cancellation-free pair: q = -(B + sign(B) sqrt(disc)) / 2, roots q/A and C/q.
  const double q = -0.5 * (B + std::copysign(std::sqrt(disc), B));
  double x1 = q / A;
  double x2 = q != 0.0 ? C / q : x1;
  if (x1 > x2) std::swap(x1, x2);
  return {x1, x2};
}

/// The word repeated twice with its first symbol flipped.
inline SymbolSequence double_sequence(const SymbolSequence& seq) {
  std::vector<Symbol> out(seq.begin(), seq.end());
  out.insert(out.end(), seq.begin(), seq.end());
  out.front() = flip(out.front());
  return SymbolSequence(std::move(out));
}

/// One representative per primitive periodic orbit: the Lyndon words over
/// {-, +} (with - < +) of length 1..max_period, by Duval's algorithm.
inline std::vector<SymbolSequence> periodic_words_up_to(int max_period) {
  std::vector<SymbolSequence> out;
  if (max_period < 1) return out;
  std::vector<int> w{-1};  // -1 marks "before the first letter"
  while (!w.empty()) {
    ++w.back();
    const auto len = static_cast<int>(w.size());
    std::vector<Symbol> word;
    word.reserve(w.size());
    for (int x : w) word.push_back(x == 0 ? Symbol::Minus : Symbol::Plus);
    out.emplace_back(std::move(word));
    // Extend periodically to max_period, then drop trailing maximal letters.
    for (int i = len; i < max_period; ++i) w.push_back(w[static_cast<std::size_t>(i - len)]);
    while (!w.empty() && w.back() == 1) w.pop_back();
  }
  std::stable_sort(out.begin(), out.end(), [](const SymbolSequence& x, const SymbolSequence& y) {
    return x.size() < y.size();
  });
  return out;
}

}  // namespace ailimit
