// Continues every primitive periodic orbit of period <= 6 from the
// anti-integrable limit in the strongly contracting Henon-like case and
// prints where each branch ends.

#include <cstdio>

#include "ailimit/continuation.hpp"

int main() {
  using namespace ailimit;
  const double r = -0.18, c = 0.0, delta = 0.05;
  std::printf("%-8s %-18s %10s %10s\n", "word", "termination", "eps_turn", "alpha");
  for (const SymbolSequence& word : periodic_words_up_to(6)) {
    const Branch b = continue_branch(word, r, c, delta);
    const auto turns = detect_turning_points(b);
    if (turns.empty()) {
      std::printf("%-8s %-18s %10s %10s  (reached eps %.4f)\n", word.str().c_str(),
                  std::string(to_string(b.termination)).c_str(), "-", "-", b.max_epsilon());
    } else {
      std::printf("%-8s %-18s %10.5f %10.5f\n", word.str().c_str(), std::string(to_string(b.termination)).c_str(),
                  turns.front().epsilon, turns.front().alpha);
    }
  }
}
