// Walks the line c = 0 and reports where the contraction certificate for
// compositions of length 1 and 2 stops holding, next to the closed-form
// forward region.

#include <cstdio>

#include "ailimit/regions.hpp"

int main() {
  using namespace ailimit;
  const int n = 1000;
  double last[3] = {-1.0, -1.0, -1.0};
  for (int i = 0; i < n; ++i) {
    const double r = i * (1.0 / (n - 1));
    const int label = region_label(r, 0.0, 2, Direction::Forward, 100);
    if (label == 1) last[1] = r;
    if (label >= 1 && label <= 2) last[2] = r;
    if (analytic_RA_forward(r, 0.0)) last[0] = r;
  }
  std::printf("R_1 edge  |r| = %.6f\n", last[1]);
  std::printf("R_2 edge  |r| = %.6f\n", last[2]);
  std::printf("R_A edge  |r| = %.6f\n", last[0]);
}
