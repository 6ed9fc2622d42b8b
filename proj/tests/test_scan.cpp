#include <cmath>

#include <gtest/gtest.h>

#include "ailimit/continuation.hpp"
#include "ailimit/scan.hpp"

using namespace ailimit;

namespace {

const MapParams kBase = MapParams::reduced(0.0, 0.0, 0.0, 0.05);

ScanConfig henon_config() {
  ScanConfig cfg;
  cfg.kappa_max = 3.26724;
  return cfg;
}

}  // namespace

TEST(FixedPoint, ClosedFormAndStationarity) {
  EXPECT_EQ(fixed_point_x_minus(0.0, 0.0, 0.0), 0.0);
  const double alpha = -1.25, sigma = -0.18 * std::sqrt(1.25), delta = 0.05;
  const double x = fixed_point_x_minus(alpha, sigma, delta);
  const MapParams p = MapParams::reduced(alpha, sigma, 0.0, delta);
  EXPECT_NEAR(difference_step(x, x, x, p), x, 1e-10);
  try {
    fixed_point_x_minus(1.0, 0.0, 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::no_fixed_point);
  }
}

TEST(Classify, ReferenceCells) {
  const ScanConfig cfg = henon_config();
  const ScanCell p1 = classify_cell(-0.4, -0.18, kBase, cfg);
  EXPECT_EQ(p1.classification, CellClass::Periodic);
  EXPECT_EQ(p1.period, 1);
  const ScanCell p5 = classify_cell(-1.43, -0.18, kBase, cfg);
  EXPECT_EQ(p5.classification, CellClass::Periodic);
  EXPECT_EQ(p5.period, 5);
  const ScanCell chaos = classify_cell(-1.25, -0.18, kBase, cfg);
  EXPECT_EQ(chaos.classification, CellClass::Chaotic);
  ASSERT_TRUE(chaos.lyapunov);
  EXPECT_GT(*chaos.lyapunov, cfg.chaos_threshold);
  EXPECT_EQ(classify_cell(-2.5, -0.18, kBase, cfg).classification, CellClass::Diverged);
}

TEST(Classify, RequiresEscapeBound) {
  EXPECT_THROW(classify_cell(-0.4, -0.18, kBase, ScanConfig{}), Error);
}

TEST(Classify, DoublingTransitionBracketsCurveRoot) {
  const ScanConfig cfg = henon_config();
  const DoublingRoots roots = doubling_curve_alpha(-0.18, 0.05);
  const double root = roots.alpha2 > -1.0 && roots.alpha2 < 0.0 ? roots.alpha2 : roots.alpha1;
  const double h = 3.0 / 399.0;
  EXPECT_EQ(classify_cell(root + h, -0.18, kBase, cfg).period, 1);
  EXPECT_EQ(classify_cell(root - h, -0.18, kBase, cfg).period, 2);
}

TEST(Lyapunov, NegativeOnAttractingCycles) {
  const ScanConfig cfg = henon_config();
  for (double alpha : {-0.4, -0.8, -1.43}) {
    const MapParams p = cell_params(alpha, -0.18, kBase);
    const auto settled = settle(initial_condition(cfg.ic_mode, p), p, cfg);
    ASSERT_TRUE(settled);
    EXPECT_LT(max_lyapunov(*settled, p, cfg), 0.0) << alpha;
  }
}

TEST(Lyapunov, LinearMapHasLogOfDominantEigenvalue) {
  // a = b = c = 0, sigma = 0, tau = 0.5, delta = 0: x' = 0.5 x + alpha,
  // companion eigenvalues 0.5, 0, 0.
  MapParams p{};
  p.alpha = 0.1;
  p.tau = 0.5;
  ScanConfig cfg = henon_config();
  EXPECT_NEAR(max_lyapunov(State3{0.3, 0.1, 0.2}, p, cfg), std::log(0.5), 1e-12);
}

TEST(Scan, DeterministicAcrossThreadCounts) {
  const ScanGrid g{-1.6, -0.3, 9, -0.3, 0.2, 4};
  const ScanConfig cfg = henon_config();
  const ScanResult a = attractor_scan(g, kBase, cfg, 1);
  const ScanResult b = attractor_scan(g, kBase, cfg, 3);
  ASSERT_EQ(a.cells.size(), 36u);
  EXPECT_EQ(a.cells, b.cells);
}

TEST(Scan, ExplicitInitialConditionChangesPositiveRAttractors) {
  // A different initial point finds a period-3 attractor for r > 0.
  ScanConfig off = henon_config(), expl = henon_config();
  off.kappa_max = expl.kappa_max = 2.28343;
  expl.ic_mode = ExplicitIC{State3{0.0125839, 0.677585, -1.25765}};
  const ScanGrid g{-1.2, -0.05, 47, 0.02, 0.5, 25};
  const ScanResult a = attractor_scan(g, kBase, off, 0);
  const ScanResult b = attractor_scan(g, kBase, expl, 0);
  int p3_off = 0, p3_expl = 0;
  for (const auto& c : a.cells) p3_off += c.period == 3;
  for (const auto& c : b.cells) p3_expl += c.period == 3;
  EXPECT_EQ(p3_off, 0);
  EXPECT_GT(p3_expl, 0);
}

TEST(CloseReturns, ExactCycleReturnsAtZeroDistance) {
  // x' = alpha - x^2 form with a period-2 orbit: r = c = delta = 0,
  // sigma = 0, alpha = -1, a = 1: x' = x^2 - 1 has the cycle 0 -> -1 -> 0.
  const MapParams p = MapParams::reduced(-1.0, 0.0, 0.0, 0.0);
  const auto ev = close_returns(State3{0.0, -1.0, 0.0}, p, 1e-9, 10);
  ASSERT_FALSE(ev.empty());
  EXPECT_EQ(ev[0].period, 2);
  EXPECT_EQ(ev[0].distance, 0.0);
}

TEST(CloseReturns, DistancesBelowThresholdAndZeroThresholdIsEmpty) {
  const MapParams p = cell_params(-1.25, -0.18, kBase);
  const State3 ic{-1.3387, -0.2563, -0.9553};
  for (const auto& e : close_returns(ic, p, 0.005, 3000)) {
    EXPECT_GE(e.distance, 0.0);
    EXPECT_LT(e.distance, 0.005);
  }
  EXPECT_TRUE(close_returns(ic, p, 0.0, 3000).empty());
}

TEST(Symbols, FromOrbitSigns) {
  EXPECT_EQ(symbols_from_orbit({0.5, 1.0, 2.0}, 0.3).str(), "+++");
  EXPECT_EQ(symbols_from_orbit({-0.5, 1.0, -2.0}, 1.7).str(), symbols_from_orbit({-0.5, 1.0, -2.0}, 0.01).str());
  try {
    symbols_from_orbit({1.0, 0.0}, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::ambiguous_symbol);
  }
}

TEST(Consistency, AttractorMatchesContinuedOrbit) {
  // Inside the period-1, 2, 4 and 5 windows the scan's attractor is the
  // continued branch of a low-period word at the same epsilon.
  const ScanConfig cfg = henon_config();
  const struct {
    double alpha;
    std::vector<std::string> words;  // candidates sharing the period
  } cases[] = {{-0.4, {"-"}}, {-0.8, {"-+"}}, {-1.12, {"---+", "--++"}}, {-1.43, {"----+", "---++"}}};
  for (const auto& k : cases) {
    const MapParams p = cell_params(k.alpha, -0.18, kBase);
    const auto settled = settle(initial_condition(cfg.ic_mode, p), p, cfg);
    ASSERT_TRUE(settled);
    const auto period = detect_period(*settled, p, cfg);
    const auto word = SymbolSequence::parse(k.words.front());
    ASSERT_TRUE(period);
    EXPECT_EQ(static_cast<std::size_t>(*period), word.size()) << k.alpha;

    const double eps = 1.0 / std::sqrt(-k.alpha);
    const std::vector<double> xs = orbit_x(*settled, p, static_cast<long>(word.size()));
    bool matched = false;
    for (const std::string& w : k.words) {
      const Branch b = continue_branch(SymbolSequence::parse(w), -0.18, 0.0, 0.05);
      // Bracket eps along the branch and correct onto it with a fixed-eps Newton solve.
      for (std::size_t i = 1; i < b.points.size() && !matched; ++i) {
        const double e0 = b.points[i - 1].state.epsilon, e1 = b.points[i].state.epsilon;
        if ((e0 - eps) * (e1 - eps) > 0.0) continue;
        const double t = (eps - e0) / (e1 - e0);
        PeriodicState s{(1 - t) * b.points[i - 1].state.xi + t * b.points[i].state.xi, eps};
        const ContinuationParams cp{-0.18, 0.0, 0.05};
        for (int it = 0; it < 20; ++it) s.xi -= jacobian_G(s, cp).dxi.partialPivLu().solve(residual_G(s, cp));
        const auto n = static_cast<long>(word.size());
        for (long shift = 0; shift < n && !matched; ++shift) {
          double worst = 0.0;
          for (long t2 = 0; t2 < n; ++t2) {
            worst = std::max(worst, std::abs(s.xi((t2 + shift) % n) - eps * xs[static_cast<std::size_t>(t2)]));
          }
          matched = worst < 1e-3;
        }
      }
      if (matched) break;
    }
    EXPECT_TRUE(matched) << k.alpha;
  }
}

TEST(Landmarks, ReadOffSyntheticLine) {
  const std::vector<double> a{-5, -4, -3, -2, -1, 0};
  auto P = [](int p) { return ScanCell{CellClass::Periodic, p, std::nullopt}; };
  const std::vector<ScanCell> cells{ScanCell{}, ScanCell{}, P(5), ScanCell{CellClass::Chaotic, {}, 0.2}, P(2), P(1)};
  const LineLandmarks L = line_landmarks(a, cells);
  EXPECT_EQ(L.bounded_onset, -3);
  EXPECT_EQ(L.window_begin, -3);
  EXPECT_EQ(L.window_end, -3);
  EXPECT_EQ(L.cascade_entry, -1);
  EXPECT_EQ(L.doubling_1_to_2, -0.5);
}
