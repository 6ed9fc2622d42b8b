#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "ailimit/ai_limit.hpp"
#include "ailimit/continuation.hpp"

using namespace ailimit;

namespace {

Errc code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return Errc::io_error;
}

}  // namespace

TEST(Forward, UnitRadicand) { EXPECT_DOUBLE_EQ(ai_forward(0.0, Symbol::Plus, 0.0, 0.0), 1.0); }

TEST(Forward, NegativeRadicandIsAnError) {
  EXPECT_EQ(code_of([] { ai_forward(-3.0, Symbol::Plus, 0.5, 0.0); }), Errc::branch_undefined);
  EXPECT_EQ(code_of([] { ai_forward(0.0, Symbol::Plus, 0.5, 1.0); }), Errc::no_forward_map);
}

TEST(Forward, BranchesAreMirrorImages) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int checked = 0;
  for (int k = 0; k < 2000; ++k) {
    const double xi = 2.0 * u(rng), r = u(rng), c = u(rng);
    try {
      EXPECT_EQ(ai_forward(xi, Symbol::Minus, r, c), -ai_forward(xi, Symbol::Plus, r, c));
      ++checked;
    } catch (const Error&) {
    }
  }
  EXPECT_GT(checked, 500);
}

TEST(Forward, DerivativeMatchesCentredDifference) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int checked = 0;
  for (int k = 0; k < 2000 && checked < 300; ++k) {
    const double xi = u(rng), r = u(rng), c = 0.9 * u(rng);
    const Symbol s = k % 2 ? Symbol::Plus : Symbol::Minus;
    const double h = 1e-6;
    const double q = (-c * xi * xi + r * xi + 1.0) / (1.0 - c);
    if (q < 1e-2) continue;
    const double fd = (ai_forward(xi + h, s, r, c) - ai_forward(xi - h, s, r, c)) / (2.0 * h);
    const double an = ai_forward_derivative(xi, s, r, c);
    EXPECT_NEAR(an, fd, 1e-6 * std::max(1.0, std::abs(fd)));
    ++checked;
  }
  EXPECT_EQ(checked, 300);
  EXPECT_EQ(ai_forward_derivative(0.0, Symbol::Plus, 0.0, 0.0), 0.0);
}

TEST(Forward, VerticalTangentAtVertex) {
  // c = 0.25, r = 0: radicand (1 - 0.25 xi^2)/0.75 is exactly zero at xi = 2.
  EXPECT_EQ(code_of([] { ai_forward_derivative(2.0, Symbol::Plus, 0.0, 0.25); }), Errc::infinite_slope);
}

TEST(Backward, ConstantBranchesAtCOne) {
  for (double xi : {-5.0, 0.0, 0.3, 7.0}) {
    EXPECT_DOUBLE_EQ(ai_backward(xi, Symbol::Plus, 0.0, 1.0), 1.0);
    EXPECT_DOUBLE_EQ(ai_backward(xi, Symbol::Minus, 0.0, 1.0), -1.0);
  }
}

TEST(Backward, DirectSubstitution) {
  EXPECT_NEAR(ai_backward(0.0, Symbol::Plus, 0.0, 2.0), std::sqrt(2.0) / 2.0, 1e-15);
  EXPECT_EQ(code_of([] { ai_backward(0.0, Symbol::Plus, 0.3, 0.0); }), Errc::no_backward_branching);
}

TEST(Backward, ImagesLieOnTheCurve) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int checked = 0;
  for (int k = 0; k < 2000; ++k) {
    const double xi = u(rng), r = u(rng), c = 2.0 * u(rng);
    if (c == 0.0) continue;
    const Symbol s = k % 2 ? Symbol::Plus : Symbol::Minus;
    try {
      const double y = ai_backward(xi, s, r, c);
      EXPECT_NEAR(ai_curve_value(xi, y, r, c), 0.0, 1e-12 * std::max(1.0, y * y));
      ++checked;
    } catch (const Error&) {
    }
  }
  EXPECT_GT(checked, 500);
}

TEST(Backward, DerivativeMatchesCentredDifference) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int checked = 0;
  for (int k = 0; k < 4000 && checked < 300; ++k) {
    const double xi = u(rng), r = u(rng), c = 2.0 * u(rng);
    if (std::abs(c) < 0.05) continue;
    const double d = r * r + 4.0 * c - 4.0 * (1.0 - c) * c * xi * xi;
    if (d < 1e-2) continue;
    const Symbol s = k % 2 ? Symbol::Plus : Symbol::Minus;
    const double h = 1e-6;
    const double fd = (ai_backward(xi + h, s, r, c) - ai_backward(xi - h, s, r, c)) / (2.0 * h);
    EXPECT_NEAR(ai_backward_derivative(xi, s, r, c), fd, 1e-6 * std::max(1.0, std::abs(fd)));
    ++checked;
  }
  EXPECT_EQ(checked, 300);
}

TEST(Backward, UndoesForwardOnMatchingBranch) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int checked = 0;
  for (int k = 0; k < 4000; ++k) {
    const double xi = u(rng), r = u(rng), c = 0.9 * u(rng);
    if (std::abs(c) < 1e-3) continue;
    double y;
    try {
      y = ai_forward(xi, k % 2 ? Symbol::Plus : Symbol::Minus, r, c);
    } catch (const Error&) {
      continue;
    }
    // The preimage branch is the side of the vertex r/(2c) on which xi lies.
    const Symbol back = (xi - r / (2.0 * c)) * c > 0.0 ? Symbol::Plus : Symbol::Minus;
    try {
      EXPECT_NEAR(ai_backward(y, back, r, c), xi, 1e-10);
      ++checked;
    } catch (const Error&) {
    }
  }
  EXPECT_GT(checked, 500);
}

TEST(Interval, BetaCases) {
  EXPECT_NEAR(beta_for(0.5, 0.0, Direction::Forward).beta, (0.5 + std::sqrt(4.25)) / 2.0, 1e-15);
  EXPECT_NEAR(beta_for(0.5, 0.0, Direction::Forward).beta, 1.28078, 1e-5);
  EXPECT_DOUBLE_EQ(beta_for(0.0, 0.0, Direction::Forward).beta, 1.0);
  EXPECT_NEAR(beta_for(0.1, 0.3, Direction::Forward).beta, std::sqrt((0.01 + 1.2) / (4 * 0.7 * 0.3)), 1e-15);
  EXPECT_NEAR(beta_for(0.2, 0.5, Direction::Backward).beta, (0.2 + std::sqrt(0.04 + 2.0)) / 1.0, 1e-15);
  EXPECT_DOUBLE_EQ(beta_for(0.0, 2.0, Direction::Backward).beta, 1.0);
  EXPECT_EQ(code_of([] { beta_for(0.0, -0.5, Direction::Backward); }), Errc::no_interval);
}

TEST(MapsInto, ReferenceCases) {
  EXPECT_TRUE(verify_maps_into(0.0, 0.0, {1.0}, Direction::Forward));
  EXPECT_FALSE(verify_maps_into(0.8, 0.0, {xi_max(0.8)}, Direction::Forward));
  EXPECT_TRUE(verify_maps_into(0.0, -1.0, {1.0}, Direction::Forward));
  EXPECT_TRUE(verify_maps_into(-0.18, 0.0, {xi_max(-0.18)}, Direction::Forward));
}

TEST(MapsInto, AgreesWithDenseSampling) {
  // Oracle: sample both branches on 20001 points of B.
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> ur(-1.2, 1.2), uc(-0.4, 0.85);
  int agree = 0, total = 0;
  for (int k = 0; k < 300; ++k) {
    const double r = ur(rng), c = uc(rng);
    const auto B = detail::try_beta_for(r, c, Direction::Forward);
    if (!B) continue;
    bool ok = true;
    for (int i = 0; i <= 20000 && ok; ++i) {
      const double xi = -B->beta + 2.0 * B->beta * i / 20000.0;
      const auto st = detail::forward_step(xi, 1.0, r, c);
      ok = std::isfinite(st.value) && st.value > 0.0 && st.value <= B->beta * (1 + 1e-12);
    }
    const bool certified = verify_maps_into(r, c, *B, Direction::Forward);
    // Certification may be stricter than sampling, never looser.
    if (certified) EXPECT_TRUE(ok) << r << " " << c;
    agree += certified == ok;
    ++total;
  }
  EXPECT_GT(agree, total * 95 / 100);
}

TEST(AIState, FixedPointWord) {
  for (double r : {-0.18, 0.0, 0.3}) {
    const AIState s = ai_state_from_symbols(SymbolSequence::parse("+"), r, 0.0, Direction::Forward);
    ASSERT_EQ(s.xi.size(), 1u);
    EXPECT_NEAR(s.xi[0], fixed_points_ai(r).plus, 1e-12);
  }
}

TEST(AIState, HorizontalLinesGiveTheSymbols) {
  const AIState s = ai_state_from_symbols(SymbolSequence::parse("+-"), 0.0, 0.0, Direction::Forward);
  EXPECT_DOUBLE_EQ(s.xi[0], 1.0);
  EXPECT_DOUBLE_EQ(s.xi[1], -1.0);
}

TEST(AIState, SeedIndependence) {
  const double r = -0.18, c = 0.0, tol = 1e-12;
  const double beta = beta_for(r, c, Direction::Forward).beta;
  const auto seq = SymbolSequence::parse("--+-++");
  const AIState ref = ai_state_from_symbols(seq, r, c, Direction::Forward);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-beta, beta);
  for (int k = 0; k < 10; ++k) {
    AIStateOptions opts;
    opts.seed = u(rng);
    const AIState s = ai_state_from_symbols(seq, r, c, Direction::Forward, opts);
    for (std::size_t t = 0; t < seq.size(); ++t) EXPECT_NEAR(s.xi[t], ref.xi[t], 10 * tol);
  }
}

TEST(AIState, ResidualAndSignsOnAllShortWords) {
  const struct {
    double r, c;
    Direction dir;
  } cases[] = {{-0.18, 0.0, Direction::Forward}, {0.4, -0.3, Direction::Forward},
               {0.1, 0.3, Direction::Forward},   {0.0, 2.0, Direction::Backward},
               {0.3, 1.5, Direction::Backward}};
  for (const auto& k : cases) {
    for (const SymbolSequence& w : periodic_words_up_to(6)) {
      const AIState s = ai_state_from_symbols(w, k.r, k.c, k.dir);
      EXPECT_LE(s.residual, 1e-12) << w.str() << " at " << k.r << "," << k.c;
      for (std::size_t t = 0; t < w.size(); ++t) {
        EXPECT_EQ(s.xi[t] > 0.0, w[static_cast<std::ptrdiff_t>(t)] == Symbol::Plus);
      }
    }
  }
}

TEST(AIState, RejectsImpossibleSettings) {
  const auto w = SymbolSequence::parse("-+");
  EXPECT_EQ(code_of([&] { ai_state_from_symbols(w, 0.0, 1.0, Direction::Forward); }), Errc::no_forward_map);
  EXPECT_EQ(code_of([&] { ai_state_from_symbols(w, 0.0, 0.0, Direction::Backward); }),
            Errc::no_backward_branching);
  EXPECT_EQ(code_of([&] { ai_state_from_symbols(w, 3.0, 0.0, Direction::Forward); }), Errc::branch_undefined);
}
