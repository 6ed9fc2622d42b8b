#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "ailimit/core_map.hpp"

using namespace ailimit;

namespace {

double rel_err(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

TEST(MapForward, CyclicShiftWhenOnlyDeltaIsOne) {
  MapParams p{};
  p.delta = 1.0;
  const State3 s{1.5, -2.0, 0.25};
  EXPECT_EQ(map_forward(s, p), (State3{0.25, 1.5, -2.0}));
}

TEST(MapForward, MatchesHandEvaluatedStep) {
  const double alpha = -1.25, sigma = -0.18 * std::sqrt(1.25), delta = 0.05;
  const MapParams p = MapParams::reduced(alpha, sigma, 0.0, delta);
  const double xm = (1.0 + sigma - delta - std::sqrt((1.0 + sigma - delta) * (1.0 + sigma - delta) - 4.0 * alpha)) / 2.0;
  const State3 s{xm + 0.001, xm, xm};
  const double expected = delta * xm + alpha - sigma * xm + (xm + 0.001) * (xm + 0.001);
  const State3 next = map_forward(s, p);
  EXPECT_NEAR(next.x, expected, 1e-15);
  EXPECT_EQ(next.y, s.x);
  EXPECT_EQ(next.z, s.y);
  EXPECT_EQ(next.x, difference_step(s.x, s.y, s.z, p));
}

TEST(MapForward, GeneralQuadraticFormTerms) {
  const MapParams p{0.3, 0.7, -0.2, 0.5, 0.25, 0.25, 0.4};
  const State3 s{1.1, -0.6, 2.0};
  const double q = 0.5 * 1.21 + 0.25 * 1.1 * -0.6 + 0.25 * 0.36;
  EXPECT_NEAR(map_forward(s, p).x, 0.4 * 2.0 + 0.3 + -0.2 * 1.1 - 0.7 * -0.6 + q, 1e-15);
}

TEST(MapInverse, RoundTripOnRandomStates) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-2.0, 2.0), d(0.05, 1.0);
  for (int k = 0; k < 500; ++k) {
    const double sgn = k % 2 ? 1.0 : -1.0;
    const MapParams p{u(rng), u(rng), u(rng), u(rng), u(rng), u(rng), sgn * d(rng)};
    const State3 s{u(rng), u(rng), u(rng)};
    const State3 back = map_inverse(map_forward(s, p), p);
    EXPECT_LT(rel_err(back.x, s.x), 1e-12);
    EXPECT_LT(rel_err(back.y, s.y), 1e-12);
    EXPECT_LT(rel_err(back.z, s.z), 1e-12);
  }
}

TEST(MapInverse, InverseCyclicShift) {
  MapParams p{};
  p.delta = 1.0;
  EXPECT_EQ(map_inverse(State3{1.0, 2.0, 3.0}, p), (State3{2.0, 3.0, 1.0}));
}

TEST(MapInverse, SingularWhenDeltaIsZero) {
  try {
    map_inverse(State3{1, 2, 3}, MapParams::reduced(-1.0, 0.0, 0.0, 0.0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::non_invertible);
  }
}

TEST(Rescaling, ResidualVanishesOnRescaledOrbit) {
  // xi = eps x turns the recurrence into the rescaled residual.
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0), e(0.1, 1.5), cc(-0.5, 0.9);
  for (int k = 0; k < 200; ++k) {
    const double eps = e(rng), r = u(rng), c = cc(rng), delta = 0.5 * u(rng);
    const RescaledParams q{eps, r};
    const MapParams p = MapParams::from_rescaled(q, c, delta);
    const double x2 = u(rng), x1 = u(rng), x0 = u(rng);
    const double xn = difference_step(x0, x1, x2, p);
    const double res = rescaled_residual(eps * xn, eps * x0, eps * x1, eps * x2, q, p.a, p.b, p.c, delta);
    EXPECT_LT(std::abs(res), 1e-12);
  }
}

TEST(Rescaling, RoundTripThroughMapParams) {
  const RescaledParams q{0.7, -0.3};
  const MapParams p = MapParams::from_rescaled(q, 0.2, 0.05);
  EXPECT_NEAR(p.alpha, -1.0 / 0.49, 1e-14);
  EXPECT_NEAR(p.sigma, -0.3 / 0.7, 1e-14);
  EXPECT_TRUE(p.is_reduced());
  const RescaledParams back = RescaledParams::from_map(p);
  EXPECT_NEAR(back.epsilon, 0.7, 1e-14);
  EXPECT_NEAR(back.r, -0.3, 1e-14);
}

TEST(Conic, ClassesByC) {
  EXPECT_EQ(classify_conic(0.0, 0.0), ConicClass::DegenerateHorizontalLines);
  EXPECT_EQ(classify_conic(0.5, 0.0), ConicClass::Parabola);
  EXPECT_EQ(classify_conic(0.3, 1.0), ConicClass::DegenerateVerticalLines);
  EXPECT_EQ(classify_conic(0.4, -0.04), ConicClass::DegenerateIntersectingLines);
  EXPECT_EQ(classify_conic(0.1, 0.3), ConicClass::Ellipse);
  EXPECT_EQ(classify_conic(0.0, 2.0), ConicClass::Hyperbola);
  EXPECT_EQ(classify_conic(0.0, -0.5), ConicClass::Hyperbola);
}

TEST(Conic, CenterUndefinedAtCZero) {
  EXPECT_DOUBLE_EQ(conic_center(0.4, 0.5), 0.4);
  EXPECT_THROW(conic_center(0.4, 0.0), Error);
}

TEST(FixedPoints, RootsOfTheFixedPointQuadratic) {
  for (double r : {-3.0, -0.18, 0.0, 0.5, 2.0, 1e6}) {
    const FixedPointPair fp = fixed_points_ai(r);
    EXPECT_LT(fp.minus, 0.0);
    EXPECT_GT(fp.plus, 0.0);
    EXPECT_NEAR(fp.minus * fp.plus, -1.0, 1e-14);
    // Oracle: the textbook formula, fine away from cancellation.
    if (std::abs(r) < 10.0) {
      EXPECT_NEAR(fp.plus, (r + std::sqrt(r * r + 4.0)) / 2.0, 1e-14);
      EXPECT_NEAR(fp.minus, (r - std::sqrt(r * r + 4.0)) / 2.0, 1e-14);
    }
    EXPECT_DOUBLE_EQ(xi_max(r), std::max(std::abs(fp.minus), fp.plus));
  }
}
