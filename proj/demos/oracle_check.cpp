// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the tubespec authors

// Compares the lowest tube eigenvalues from the Fourier-mode decomposition
// with a direct 3D finite element discretization of the same tube.

#include <cstdio>

#include "tubespec/tubespec.hpp"

int main() {
  using namespace tubespec;
  const LatticeBasis basis = LatticeBasis::cone(std::numbers::pi, 0.3, 0.05);
  const TubeGeometry geo = solve_tube_radius(basis, 1.0);
  const OracleComparison cmp = oracle_compare(basis, geo, RightBoundary::dirichlet(), 10, 0);
  const OracleComparisonLevel& lv = cmp.levels.front();
  std::printf("R = %.6f, %lld unknowns\n", geo.radius, static_cast<long long>(lv.dimension));
  for (std::size_t i = 0; i < lv.modes.size(); ++i)
    std::printf("%3zu  modes %12.6f  grid %12.6f  mode (%lld, %lld)\n", i, lv.modes[i], lv.oracle[i],
                static_cast<long long>(lv.mode_of[i].index[0]), static_cast<long long>(lv.mode_of[i].index[1]));
  std::printf("max relative deviation %.3e\n", lv.max_relative_deviation);
}
