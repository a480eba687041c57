// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the tubespec authors

// Lowest eigenvalues of the zero-mode operator for a few tube radii, with
// Dirichlet and natural conditions at the boundary torus.

#include <cstdio>

#include "tubespec/tubespec.hpp"

int main() {
  using namespace tubespec;
  const DualMode zero{};
  std::printf("%6s %22s %22s %22s\n", "R", "natural lambda0", "natural lambda1", "dirichlet lambda0");
  for (double R : {1.0, 2.0, 4.0, 6.0}) {
    const EigenList nat = solve(ModePotential{zero, R}, RightBoundary::natural(), Selection::lowest(2));
    const EigenList dir = solve(ModePotential{zero, R}, RightBoundary::dirichlet(), Selection::lowest(1));
    std::printf("%6.2f %22.14e %22.14f %22.14f\n", R, nat.values[0], nat.values[1], dir.values[0]);
  }
}
