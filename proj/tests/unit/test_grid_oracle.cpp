// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the tubespec authors

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "tubespec/grid_oracle.hpp"

namespace ts = tubespec;
using ts::LeftBoundary;
using ts::RightBoundary;

namespace {

constexpr double pi = std::numbers::pi;

ts::TubeGeometry geometry_at(const ts::LatticeBasis& b, double R) {
  return {R, ts::cross_section_area(b, R), ts::covolume(b)};
}

double asymmetry(const ts::SparseMatrix& A) {
  const ts::SparseMatrix d = ts::SparseMatrix(A.transpose()) - A;
  return d.norm() / A.norm();
}

}  // namespace

TEST(BuildOperator, SymmetricAndPositiveMass) {
  const auto b = ts::LatticeBasis::cone(pi, 0.3, 0.5);
  ts::GridParams grid;
  grid.nr = 12;
  const auto p = ts::build_operator(b, geometry_at(b, 1.5), grid, RightBoundary::natural(), LeftBoundary::natural_at(0.05));
  EXPECT_LT(asymmetry(p.K), 1e-14);
  EXPECT_LT(asymmetry(p.M), 1e-14);
  EXPECT_EQ(p.K.rows(), static_cast<Eigen::Index>(13 * p.n1 * p.n2));
  // Constants lie in the kernel of K under natural conditions at both ends.
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(p.K.rows());
  EXPECT_LT((p.K * ones).norm(), 1e-12 * p.K.norm());
  EXPECT_GT(ones.dot(p.M * ones), 0.0);
}

TEST(BuildOperator, SingleCellCollapsesToRadialProblem) {
  const auto b = ts::LatticeBasis::cone(2 * pi, 0.7, 0.3);
  const double R = 2.0, eps = 0.04;
  for (double blend : {1.0, 0.5, 0.0}) {
    for (const auto& right : {RightBoundary::dirichlet(), RightBoundary::natural()}) {
      ts::GridParams grid;
      grid.nr = 80;
      grid.n1 = grid.n2 = 1;
      grid.enforce_resolution = false;
      grid.quad_blend = blend;
      const auto p = ts::build_operator(b, geometry_at(b, R), grid, right, LeftBoundary::natural_at(eps));
      const auto oracle = ts::oracle_spectrum(p, 5).values;

      const auto radial = ts::RadialProblem::mode(ts::DualMode{}, R, {LeftBoundary::natural_at(eps), right});
      const auto sturm = ts::pencil_eigenvalues(radial.assemble(radial.mesh(80, 2.0), blend), 5);
      for (int i = 0; i < 5; ++i)
        EXPECT_NEAR(oracle[i], sturm[i], 1e-8 * std::max(1.0, std::abs(sturm[i]))) << blend << " " << i;
    }
  }
}

TEST(BuildOperator, Errors) {
  const auto b = ts::LatticeBasis::cone(pi, 0.3, 0.5);
  const auto g = geometry_at(b, 1.5);
  ts::GridParams grid;
  grid.nr = 8;
  EXPECT_THROW(ts::build_operator(b, g, grid, RightBoundary::natural(), LeftBoundary::friedrichs()), ts::BadConfig);
  EXPECT_THROW(ts::build_operator(b, g, grid, RightBoundary::robin(1.0), LeftBoundary::natural_at(0.1)), ts::BadConfig);
  EXPECT_THROW(ts::build_operator(b, g, grid, RightBoundary::natural(), LeftBoundary::natural_at(2.0)), ts::BadConfig);
  auto bad = grid;
  bad.quad_blend = 1.5;
  EXPECT_THROW(ts::build_operator(b, g, bad, RightBoundary::natural(), LeftBoundary::natural_at(0.1)), ts::BadConfig);
  bad = grid;
  bad.n1 = 4;
  EXPECT_THROW(ts::build_operator(b, g, bad, RightBoundary::natural(), LeftBoundary::natural_at(0.1)), ts::GridTooCoarse);
  bad.enforce_resolution = false;
  EXPECT_NO_THROW(ts::build_operator(b, g, bad, RightBoundary::natural(), LeftBoundary::natural_at(0.1)));
  EXPECT_THROW(ts::build_operator(b, {0.0, 1.0, 1.0}, grid, RightBoundary::natural(), LeftBoundary::natural_at(0.1)),
               ts::NonPositiveRadius);
}

TEST(OracleCell, SpansTheSameLattice) {
  const auto b = ts::LatticeBasis::cone(2 * pi, pi, 1e-3);
  const auto cell = ts::make_oracle_cell(b, 3.0);
  EXPECT_NEAR(cell.area, ts::covolume(b), 1e-12 * ts::covolume(b));
  // Columns of the cell are integer combinations of the basis and vice versa.
  const Eigen::Matrix2d coeff = b.matrix().inverse() * cell.primal;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) EXPECT_NEAR(coeff(i, j), std::round(coeff(i, j)), 1e-8);
  EXPECT_NEAR(std::abs(coeff.determinant()), 1.0, 1e-8);
}

TEST(OracleFriedrichs, TwistedTubeMatchesModes) {
  // Cone angle 2 pi, core length 1, twist pi: the twist mixes theta and z
  // frequencies, which the mode decomposition handles through the dual lattice.
  const auto b = ts::LatticeBasis::cone(2 * pi, pi, 1.0);
  const auto g = geometry_at(b, 1.0);
  // The (1, 0) mode is the least resolved transversally; its error should
  // drop by about four per refinement.
  const auto cmp = ts::oracle_compare(b, g, RightBoundary::dirichlet(), 6, 1);
  ASSERT_EQ(cmp.levels.size(), 2u);
  EXPECT_LT(cmp.levels[0].max_relative_deviation, 0.03);
  EXPECT_GT(cmp.levels[0].max_relative_deviation / cmp.levels[1].max_relative_deviation, 3.5);
  EXPECT_LT(cmp.levels[1].max_relative_deviation, 0.006);
  for (const auto& level : cmp.levels) EXPECT_LT(level.max_residual, 1e-8);
}

TEST(OracleFriedrichs, ConvergesUnderRefinement) {
  const auto b = ts::LatticeBasis::cone(pi, 0.3, 0.5);
  const auto g = geometry_at(b, 1.2);
  const auto cmp = ts::oracle_compare(b, g, RightBoundary::natural(), 5, 1);
  ASSERT_EQ(cmp.levels.size(), 2u);
  EXPECT_GT(cmp.levels[1].dimension, 4 * cmp.levels[0].dimension);
  EXPECT_LT(cmp.levels[1].max_relative_deviation, cmp.levels[0].max_relative_deviation);
  EXPECT_LT(cmp.levels[1].max_relative_deviation, 0.005);
}

TEST(OracleFriedrichs, FlatConeBesselZeros) {
  // dr^2 + r^2 dtheta^2 + dz^2 on a disc of radius 1 times a circle of length 1:
  // lowest Dirichlet eigenvalues are squares of Bessel zeros.
  const auto b = ts::LatticeBasis::cone(2 * pi, 0.0, 1.0);
  const auto g = geometry_at(b, 1.0);
  ts::GridParams grid;
  grid.nr = 64;
  grid.max_index = {2, 0};
  const double eps = 1.0 / 64.0;
  std::vector<double> vals[2];
  for (int h = 0; h < 2; ++h) {
    const auto p = ts::build_operator(b, g, grid, RightBoundary::dirichlet(), LeftBoundary::natural_at(eps / (1 + h)),
                                      ts::MetricModel::flat_cone());
    vals[h] = ts::oracle_spectrum(p, 5).values;
  }
  const double j01 = 2.404825557695773, j11 = 3.831705970207512, j21 = 5.135622301840683;
  const std::vector<double> want{j01 * j01, j11 * j11, j11 * j11, j21 * j21, j21 * j21};
  for (int i = 0; i < 5; ++i) EXPECT_NEAR(vals[1][i], want[i], 0.02 * want[i]) << i;
}

TEST(QuasiIsometryBracket, ConstantScalingIsExact) {
  const auto b = ts::LatticeBasis::cone(pi, 0.3, 0.5);
  const auto g = geometry_at(b, 1.2);
  ts::GridParams grid;
  grid.nr = 16;
  const auto base = ts::build_operator(b, g, grid, RightBoundary::dirichlet(), LeftBoundary::natural_at(0.05));
  for (double c : {1.21, 0.8, 2.0}) {
    ts::MetricModel m;
    m.conformal = [c](double, double, double) { return c; };
    const auto scaled = ts::build_operator(b, g, grid, RightBoundary::dirichlet(), LeftBoundary::natural_at(0.05), m);
    const double beta = std::max(std::sqrt(c), 1 / std::sqrt(c)) - 1.0;
    const auto rep = ts::quasi_isometry_bracket(base, scaled, beta, 6);
    for (int i = 0; i < 6; ++i) EXPECT_NEAR(rep.second[i], rep.first[i] / c, 1e-10 * rep.first[i]);
    EXPECT_TRUE(rep.within);
    EXPECT_TRUE(rep.within_rigorous);
  }
}

TEST(QuasiIsometryBracket, VariableFactorWithinBracket) {
  const auto b = ts::LatticeBasis::cone(pi, 0.3, 0.5);
  const auto g = geometry_at(b, 1.2);
  ts::GridParams grid;
  grid.nr = 16;
  const double beta = 0.1, q2 = 1.21;
  ts::MetricModel m;
  m.conformal = [q2](double r, double s1, double s2) {
    const double t = 0.5 + 0.5 * std::sin(3 * r + 2 * pi * s1) * std::cos(2 * pi * s2);
    return std::pow(q2, 2 * t - 1);  // within [1/q2, q2]
  };
  for (const auto& right : {RightBoundary::dirichlet(), RightBoundary::natural()}) {
    const auto base = ts::build_operator(b, g, grid, right, LeftBoundary::natural_at(0.05));
    const auto varied = ts::build_operator(b, g, grid, right, LeftBoundary::natural_at(0.05), m);
    const auto rep = ts::quasi_isometry_bracket(base, varied, beta, 6);
    EXPECT_TRUE(rep.within_rigorous);
    EXPECT_GE(rep.worst_low, rep.rigorous_lower);
    EXPECT_LE(rep.worst_high, rep.rigorous_upper);
  }
}

TEST(QuasiIsometryBracket, RejectsLargeDistortion) {
  const auto b = ts::LatticeBasis::cone(pi, 0.3, 0.5);
  const auto g = geometry_at(b, 1.2);
  ts::GridParams grid;
  grid.nr = 8;
  ts::MetricModel m;
  m.conformal = [](double, double, double) { return 1.5; };
  const auto base = ts::build_operator(b, g, grid, RightBoundary::dirichlet(), LeftBoundary::natural_at(0.05));
  const auto far = ts::build_operator(b, g, grid, RightBoundary::dirichlet(), LeftBoundary::natural_at(0.05), m);
  EXPECT_THROW(ts::quasi_isometry_bracket(base, far, 0.1, 4), ts::NotQuasiIsometric);
  EXPECT_THROW(ts::quasi_isometry_bracket(base, far, -0.1, 4), ts::InvalidArgument);
  auto other = grid;
  other.nr = 10;
  const auto mismatched = ts::build_operator(b, g, other, RightBoundary::dirichlet(), LeftBoundary::natural_at(0.05));
  EXPECT_THROW(ts::quasi_isometry_bracket(base, mismatched, 0.5, 4), ts::InvalidArgument);
}
