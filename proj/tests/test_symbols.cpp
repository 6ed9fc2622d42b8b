#include <gtest/gtest.h>

#include "ailimit/symbols.hpp"

using namespace ailimit;

TEST(Symbols, ParsesPlainWords) {
  const auto s = SymbolSequence::parse("-+-");
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s[0], Symbol::Minus);
  EXPECT_EQ(s[1], Symbol::Plus);
  EXPECT_EQ(s.str(), "-+-");
}

TEST(Symbols, RunLengthExpandsOnParse) {
  EXPECT_EQ(SymbolSequence::parse("-3+").str(), "---+");
  EXPECT_EQ(SymbolSequence::parse("+2-10").str(), "++----------");
}

TEST(Symbols, AcceptsUnicodeMinus) {
  EXPECT_EQ(SymbolSequence::parse("\xE2\x88\x92+\xE2\x88\x92" "2").str(), "-+--");
}

TEST(Symbols, RejectsMalformedInput) {
  for (const char* bad : {"", "--- +", "+a", "0", "+0", "3+", "+99999999"}) {
    try {
      SymbolSequence::parse(bad);
      ADD_FAILURE() << "accepted '" << bad << "'";
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::parse_error) << bad;
    }
  }
}

TEST(Symbols, PeriodicIndexing) {
  const auto s = SymbolSequence::parse("-++");
  EXPECT_EQ(s[3], s[0]);
  EXPECT_EQ(s[-1], s[2]);
  EXPECT_EQ(s[-4], s[2]);
  EXPECT_EQ(s.period(), 3u);
}

TEST(Symbols, PeriodIsNotReduced) {
  EXPECT_EQ(SymbolSequence::parse("-+-+").period(), 4u);
}

TEST(Symbols, FlipAndSign) {
  EXPECT_EQ(flip(Symbol::Plus), Symbol::Minus);
  EXPECT_EQ(sign_of(Symbol::Minus), -1.0);
  EXPECT_EQ(to_char(Symbol::Plus), '+');
}
