#pragma once

#include <cctype>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "ailimit/error.hpp"

namespace ailimit {

enum class Symbol : std::int8_t { Minus = -1, Plus = 1 };

constexpr double sign_of(Symbol s) noexcept { return s == Symbol::Plus ? 1.0 : -1.0; }
constexpr Symbol flip(Symbol s) noexcept { return s == Symbol::Plus ? Symbol::Minus : Symbol::Plus; }
constexpr char to_char(Symbol s) noexcept { return s == Symbol::Plus ? '+' : '-'; }

/// A finite word over {-, +} read periodically. The period is the length of
/// the word; it is never reduced to a primitive root.
class SymbolSequence {
 public:
  SymbolSequence() = default;
  explicit SymbolSequence(std::vector<Symbol> symbols) : symbols_(std::move(symbols)) {
    if (symbols_.empty()) {
      throw Error(Errc::invalid_argument, "symbol sequence must be non-empty");
    }
  }

  /// Accepts '+', '-' and U+2212; a symbol may be followed by a decimal
  /// repeat count, so "-3+" reads as "---+". Anything else is rejected.
  static SymbolSequence parse(std::string_view text);

  std::size_t size() const noexcept { return symbols_.size(); }
  std::size_t period() const noexcept { return symbols_.size(); }
  bool empty() const noexcept { return symbols_.empty(); }

  /// Periodic indexing; negative indices wrap.
  Symbol operator[](std::ptrdiff_t t) const noexcept {
    const auto n = static_cast<std::ptrdiff_t>(symbols_.size());
    return symbols_[static_cast<std::size_t>(((t % n) + n) % n)];
  }

  const std::vector<Symbol>& symbols() const noexcept { return symbols_; }
  auto begin() const noexcept { return symbols_.begin(); }
  auto end() const noexcept { return symbols_.end(); }

  /// Fully expanded ASCII form.
  std::string str() const {
    std::string out;
    out.reserve(symbols_.size());
    for (Symbol s : symbols_) out.push_back(to_char(s));
    return out;
  }

  friend bool operator==(const SymbolSequence&, const SymbolSequence&) = default;

 private:
  std::vector<Symbol> symbols_;
};

inline SymbolSequence SymbolSequence::parse(std::string_view text) {
  std::vector<Symbol> out;
  std::size_t i = 0;
  while (i < text.size()) {
    Symbol sym;
    const unsigned char ch = static_cast<unsigned char>(text[i]);
    if (ch == '+') {
      sym = Symbol::Plus;
      ++i;
    } else if (ch == '-') {
      sym = Symbol::Minus;
      ++i;
    } else if (text.substr(i, 3) == "\xE2\x88\x92") {  // U+2212 minus sign
      sym = Symbol::Minus;
      i += 3;
    } else {
      throw Error(Errc::parse_error, "invalid character in symbol sequence '" +
                                         std::string(text) + "' at offset " + std::to_string(i));
    }
    std::size_t count = 1;
    if (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
      count = 0;
      while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
        count = count * 10 + static_cast<std::size_t>(text[i] - '0');
        if (count > 10'000'000) {
          throw Error(Errc::parse_error, "repeat count too large in '" + std::string(text) + "'");
        }
        ++i;
      }
      if (count == 0) {
        throw Error(Errc::parse_error, "zero repeat count in '" + std::string(text) + "'");
      }
    }
    out.insert(out.end(), count, sym);
  }
  if (out.empty()) throw Error(Errc::parse_error, "empty symbol sequence");
  return SymbolSequence(std::move(out));
}

}  // namespace ailimit
