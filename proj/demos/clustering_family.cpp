// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the tubespec authors

// Counts eigenvalues in [1, 1 + x^2] along a family of smooth fillings with
// shrinking core and prints the fitted growth rate against the radius.

#include <cstdio>
#include <numbers>

#include "tubespec/tubespec.hpp"

int main() {
  using namespace tubespec;
  FamilySpec spec;
  spec.kind = SmoothFilling{{1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6}};
  for (double x : {1.0, 2.0}) {
    const CountingReport rep = run_clustering(spec, x);
    std::printf("x = %g: slope %.4f vs R (x/pi = %.4f), %.4f vs log(1/covol) (x/2pi = %.4f)\n", x,
                rep.fit_radius.slope, rep.reference_slope_radius, rep.fit_log_area->slope,
                rep.reference_slope_log_area);
    for (const CountingRow& row : rep.rows) std::printf("  R = %8.4f  N = %d\n", row.radius, row.count);
  }
}
