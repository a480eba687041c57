// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the tubespec authors

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "tubespec/lattice_geometry.hpp"

namespace ts = tubespec;
using ts::LatticeBasis;
using ts::Vec2;

namespace {

constexpr double pi = std::numbers::pi;

LatticeBasis random_basis(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (;;) {
    const Vec2 a(u(rng), u(rng)), b(u(rng), u(rng));
    if (std::abs(a.x() * b.y() - a.y() * b.x()) > 0.2 * a.norm() * b.norm() && a.norm() > 0.1 && b.norm() > 0.1) return {a, b};
  }
}

// Every dual index pair in a generous box, filtered by the energy bound.
std::vector<std::pair<std::array<std::int64_t, 2>, double>> brute_force_modes(const LatticeBasis& b, double R, double E,
                                                                               int box) {
  std::vector<std::pair<std::array<std::int64_t, 2>, double>> out;
  const Eigen::Matrix2d w = b.matrix().inverse().transpose();
  for (int m = -box; m <= box; ++m)
    for (int n = -box; n <= box; ++n) {
      const Vec2 lam = m * w.col(0) + n * w.col(1);
      const double s = std::sinh(R), c = std::cosh(R);
      const double v = (m == 0 && n == 0) ? 0.0
                                          : 4 * pi * pi * (lam.x() * lam.x() / (s * s) + lam.y() * lam.y() / (c * c));
      if (v <= E) out.push_back({{m, n}, v});
    }
  return out;
}

}  // namespace

TEST(Covolume, Examples) {
  EXPECT_NEAR(ts::covolume(LatticeBasis(Vec2(2 * pi, 0), Vec2(0, 0.1))), 0.2 * pi, 1e-15);
  EXPECT_DOUBLE_EQ(ts::covolume(LatticeBasis(Vec2(1, 0), Vec2(0, 1))), 1.0);
  EXPECT_NEAR(ts::covolume(LatticeBasis(Vec2(2 * pi, 0), Vec2(0.3, 0.05))), 0.1 * pi, 1e-15);
}

TEST(Covolume, DegenerateBasisThrows) {
  EXPECT_THROW(LatticeBasis(Vec2(1, 2), Vec2(2, 4)), ts::DegenerateLattice);
  EXPECT_THROW(LatticeBasis(Vec2(0, 0), Vec2(1, 0)), ts::DegenerateLattice);
  EXPECT_THROW(LatticeBasis(Vec2(1, 0), Vec2(1, 1e-16)), ts::DegenerateLattice);
  EXPECT_NO_THROW(LatticeBasis(Vec2(1, 0), Vec2(1, 1e-12)));
}

TEST(DualBasis, Examples) {
  const double l = 0.37;
  auto [w1, w2] = ts::dual_basis(LatticeBasis(Vec2(2 * pi, 0), Vec2(0, l)));
  EXPECT_NEAR(w1.x(), 1 / (2 * pi), 1e-15);
  EXPECT_NEAR(w1.y(), 0.0, 1e-15);
  EXPECT_NEAR(w2.x(), 0.0, 1e-15);
  EXPECT_NEAR(w2.y(), 1 / l, 1e-13);

  const double alpha = 1.3, t = 0.4;
  std::tie(w1, w2) = ts::dual_basis(LatticeBasis::cone(alpha, t, l));
  EXPECT_NEAR(w1.x(), 1 / alpha, 1e-14);
  EXPECT_NEAR(w1.y(), -t / (alpha * l), 1e-14);
  EXPECT_NEAR(w2.x(), 0.0, 1e-15);
  EXPECT_NEAR(w2.y(), 1 / l, 1e-14);

  std::tie(w1, w2) = ts::dual_basis(LatticeBasis(Vec2(1, 0), Vec2(0, 1)));
  EXPECT_EQ(w1, Vec2(1, 0));
  EXPECT_EQ(w2, Vec2(0, 1));
}

TEST(DualBasis, DualityOnRandomBases) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 1000; ++trial) {
    const LatticeBasis b = random_basis(rng);
    const auto [w1, w2] = ts::dual_basis(b);
    EXPECT_NEAR(w1.dot(b.v1()), 1.0, 1e-10);
    EXPECT_NEAR(w1.dot(b.v2()), 0.0, 1e-10);
    EXPECT_NEAR(w2.dot(b.v1()), 0.0, 1e-10);
    EXPECT_NEAR(w2.dot(b.v2()), 1.0, 1e-10);
    EXPECT_NEAR(ts::covolume(LatticeBasis(w1, w2)) * ts::covolume(b), 1.0, 1e-10);
  }
}

TEST(DualMode, PairsIntegrallyWithTheLattice) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const LatticeBasis b = random_basis(rng);
    for (int m = -3; m <= 3; ++m)
      for (int n = -3; n <= 3; ++n) {
        const ts::DualMode mode = ts::mode_from_index(b, m, n);
        EXPECT_NEAR(mode.lambda.dot(b.v1()), m, 1e-12 * (1 + std::abs(m) + std::abs(n)) * 10);
        EXPECT_NEAR(mode.lambda.dot(b.v2()), n, 1e-12 * (1 + std::abs(m) + std::abs(n)) * 10);
      }
  }
}

TEST(Classify, NormalForm) {
  const auto s = ts::classify(LatticeBasis(Vec2(2 * pi, 0), Vec2(0, 0.1)));
  const auto* c = std::get_if<ts::ConeTube>(&s);
  ASSERT_NE(c, nullptr);
  EXPECT_DOUBLE_EQ(c->alpha, 2 * pi);
  EXPECT_DOUBLE_EQ(c->twist, 0.0);
  EXPECT_NEAR(c->length, 0.1, 1e-15);
}

TEST(Classify, ReducesTwistModuloAlpha) {
  const LatticeBasis b(Vec2(2 * pi, 0), Vec2(2 * pi + 0.3, 0.05));
  const auto s = ts::classify(b);
  const auto* c = std::get_if<ts::ConeTube>(&s);
  ASSERT_NE(c, nullptr);
  EXPECT_NEAR(c->alpha, 2 * pi, 1e-14);
  EXPECT_NEAR(c->twist, 0.3, 1e-14);
  EXPECT_NEAR(c->length, 0.05, 1e-15);
  // Both bases generate the same lattice: the change of basis is integral and unimodular.
  const Eigen::Matrix2d normal = LatticeBasis::cone(c->alpha, c->twist, c->length).matrix();
  const Eigen::Matrix2d u = normal.inverse() * b.matrix();
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) EXPECT_NEAR(u(i, j), std::round(u(i, j)), 1e-12);
  EXPECT_NEAR(std::abs(u.determinant()), 1.0, 1e-12);
}

TEST(Classify, IrrationalLatticeHasNoHorizontalVector) {
  const LatticeBasis b(Vec2(1, std::sqrt(2.0)), Vec2(std::sqrt(3.0), 1));
  EXPECT_TRUE(std::holds_alternative<ts::Irrational>(ts::classify(b)));
  // Brute force over a smaller box: no combination has |z| <= tol |v|.
  for (int m = -300; m <= 300; ++m)
    for (int n = -300; n <= 300; ++n) {
      if (m == 0 && n == 0) continue;
      const Vec2 v = m * b.v1() + n * b.v2();
      ASSERT_GT(std::abs(v.y()), 1e-12 * v.norm());
    }
}

TEST(Classify, UnimodularChangesAndIdempotence) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ua(0.2, 7.0), ut(-5.0, 5.0), ul(0.01, 2.0);
  std::uniform_int_distribution<int> ui(-4, 4);
  for (int trial = 0; trial < 200; ++trial) {
    const double alpha = ua(rng), twist = ut(rng), length = ul(rng);
    const LatticeBasis normal = LatticeBasis::cone(alpha, twist, length);
    // Random unimodular matrix from elementary moves.
    Eigen::Matrix2d u = Eigen::Matrix2d::Identity();
    for (int k = 0; k < 3; ++k) {
      Eigen::Matrix2d e = Eigen::Matrix2d::Identity();
      e(k % 2, 1 - k % 2) = ui(rng);
      u = u * e;
    }
    const Eigen::Matrix2d m = normal.matrix() * u;
    const auto s = ts::classify(LatticeBasis(m.col(0), m.col(1)), {1e-10, 10000});
    const auto* c = std::get_if<ts::ConeTube>(&s);
    ASSERT_NE(c, nullptr);
    const double t_expected = twist - std::floor(twist / alpha) * alpha;
    EXPECT_NEAR(c->alpha, alpha, 1e-10 * alpha);
    EXPECT_NEAR(c->length, length, 1e-10 * std::max(1.0, length));
    const double dt = std::abs(c->twist - t_expected);
    EXPECT_TRUE(dt < 1e-9 || std::abs(dt - alpha) < 1e-9) << c->twist << " vs " << t_expected;
    EXPECT_GE(c->twist, 0.0);
    EXPECT_LT(c->twist, c->alpha);

    const auto again = ts::classify(LatticeBasis::cone(c->alpha, c->twist, c->length));
    const auto* c2 = std::get_if<ts::ConeTube>(&again);
    ASSERT_NE(c2, nullptr);
    EXPECT_DOUBLE_EQ(c2->alpha, c->alpha);
    EXPECT_DOUBLE_EQ(c2->twist, c->twist);
    EXPECT_NEAR(c2->length, c->length, 1e-15 * c->length);
  }
}

TEST(EnumerateModes, ZeroBoundGivesOnlyZeroMode) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const auto modes = ts::enumerate_modes(random_basis(rng), 1.5, 0.0);
    ASSERT_EQ(modes.size(), 1u);
    EXPECT_TRUE(modes[0].mode.is_zero());
    EXPECT_EQ(modes[0].value, 0.0);
  }
}

TEST(EnumerateModes, SmallExample) {
  const LatticeBasis b(Vec2(2 * pi, 0), Vec2(0, 0.5));
  const auto modes = ts::enumerate_modes(b, 2.0, 0.1);
  ASSERT_EQ(modes.size(), 3u);
  EXPECT_TRUE(modes[0].mode.is_zero());
  const double expected = 0.0760218298380710992533730125222;  // 1 / sinh(2)^2
  for (int i = 1; i < 3; ++i) {
    EXPECT_NEAR(modes[i].value, expected, 1e-15);
    EXPECT_NEAR(std::abs(modes[i].mode.lambda.x()), 1 / (2 * pi), 1e-15);
    EXPECT_EQ(modes[i].mode.lambda.y(), 0.0);
  }
  const auto brute = brute_force_modes(b, 2.0, 0.1, 50);
  EXPECT_EQ(brute.size(), 3u);
}

TEST(EnumerateModes, MatchesBruteForce) {
  std::vector<std::pair<LatticeBasis, double>> cases = {
      {LatticeBasis(Vec2(2 * pi, 0), Vec2(0, 0.5)), 2.0},
      {LatticeBasis::cone(pi, 0.3, 0.05), 1.6},
      {LatticeBasis(Vec2(1, std::sqrt(2.0)), Vec2(std::sqrt(3.0), 1)).scaled(0.3), 1.2},
      {LatticeBasis::cone(2 * pi, 3.88, 0.01), 2.1},
  };
  std::mt19937_64 rng(13);
  for (int i = 0; i < 10; ++i) cases.push_back({random_basis(rng), 0.5 + i * 0.3});
  for (const auto& [b, R] : cases) {
    for (double E : {1.0, 25.0, 200.0}) {
      const auto modes = ts::enumerate_modes(b, R, E);
      const auto brute = brute_force_modes(b, R, E, 150);
      ASSERT_EQ(modes.size(), brute.size()) << "R=" << R << " E=" << E;
      std::map<std::array<std::int64_t, 2>, double> want(brute.begin(), brute.end());
      for (std::size_t j = 0; j < modes.size(); ++j) {
        const auto it = want.find(modes[j].mode.index);
        ASSERT_NE(it, want.end());
        EXPECT_NEAR(modes[j].value, it->second, 1e-12 * std::max(1.0, it->second));
        if (j > 0) EXPECT_LE(modes[j - 1].value, modes[j].value);
      }
      EXPECT_TRUE(modes.front().mode.is_zero());
      // Symmetry lambda -> -lambda.
      for (const auto& mv : modes) {
        const std::array<std::int64_t, 2> neg{-mv.mode.index[0], -mv.mode.index[1]};
        EXPECT_EQ(want.count(neg), 1u);
      }
    }
  }
}

TEST(EnumerateModes, CapThrows) {
  EXPECT_THROW(ts::enumerate_modes(LatticeBasis(Vec2(1, 0), Vec2(0, 1)), 1.0, 1e9, 1000), ts::BoundTooLarge);
  EXPECT_THROW(ts::enumerate_modes(LatticeBasis(Vec2(1, 0), Vec2(0, 1)), 0.0, 1.0), ts::NonPositiveRadius);
}

TEST(CrossSectionArea, Examples) {
  const LatticeBasis unit(Vec2(1, 0), Vec2(0, 1));
  EXPECT_LT(ts::cross_section_area(unit, 1e-12), 1e-11);
  const LatticeBasis b(Vec2(2 * pi, 0), Vec2(0, 0.1));
  EXPECT_NEAR(ts::cross_section_area(b, 1.0), 1.13941180128878760863562199276, 1e-14);
  const LatticeBasis two(Vec2(2, 0), Vec2(0, 1));
  EXPECT_NEAR(ts::cross_section_area(two, 0.5), 1.1752011936438014568823818506, 1e-14);
}

TEST(CrossSectionArea, IncreasingAndInvertedByRadius) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const LatticeBasis b = random_basis(rng);
    double prev = 0.0;
    for (double r = 0.01; r < 8; r *= 1.3) {
      const double a = ts::cross_section_area(b, r);
      EXPECT_GT(a, prev);
      prev = a;
    }
    for (double A : {0.01, 1.0, 50.0}) {
      const auto geo = ts::solve_tube_radius(b, A);
      EXPECT_NEAR(ts::cross_section_area(b, geo.radius), A, 1e-10 * A);
    }
  }
}

TEST(SolveTubeRadius, Examples) {
  const LatticeBasis b(Vec2(1, 0), Vec2(0, 0.01));
  EXPECT_NEAR(ts::solve_tube_radius(b, 1.0).radius, 2.99573539852469452532958964275, 1e-13);
  EXPECT_NEAR(ts::solve_tube_radius(LatticeBasis(Vec2(1, 0), Vec2(0, 1)), 0.5 * std::sinh(2.0)).radius, 1.0, 1e-14);
  const double R = ts::solve_tube_radius(LatticeBasis::cone(2 * pi, 0, 0.01), 1.0).radius;
  EXPECT_NEAR(R, 2.07691706476884041912818102382, 1e-13);
  EXPECT_LE(std::abs(R - 0.5 * std::log(1 / 0.01)), 2.0);
  EXPECT_THROW(ts::solve_tube_radius(b, 0.0), ts::InvalidArgument);
}

TEST(DehnCoefficients, Examples) {
  auto [x, y] = ts::dehn_coefficients({2 * pi, 0, 1}, 1, 0);
  EXPECT_DOUBLE_EQ(x, 1.0);
  EXPECT_DOUBLE_EQ(y, 0.0);
  std::tie(x, y) = ts::dehn_coefficients({pi, 0, 1}, 1, 0);
  EXPECT_DOUBLE_EQ(x, 2.0);
  std::tie(x, y) = ts::dehn_coefficients({2 * pi / 5, 0, 1}, 2, 3);
  EXPECT_NEAR(x, 10.0, 1e-13);
  EXPECT_NEAR(y, 15.0, 1e-13);
  EXPECT_THROW(ts::dehn_coefficients({2 * pi / 5, 0, 1}, 2, 4), ts::NotCoprime);
}

TEST(TorusDiameter, MatchesSampledCoveringRadius) {
  // Square lattice: half the diagonal. Hexagonal: side / sqrt 3.
  EXPECT_NEAR(ts::torus_diameter(LatticeBasis(Vec2(2, 0), Vec2(0, 2))), std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(ts::torus_diameter(LatticeBasis(Vec2(1, 0), Vec2(0.5, std::sqrt(3.0) / 2))), 1 / std::sqrt(3.0), 1e-14);
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const LatticeBasis b = random_basis(rng);
    double worst = 0.0;
    for (int s = 0; s < 4000; ++s) {
      const Vec2 p = u01(rng) * b.v1() + u01(rng) * b.v2();
      double best = 1e300;
      for (int m = -6; m <= 6; ++m)
        for (int n = -6; n <= 6; ++n) best = std::min(best, (p - m * b.v1() - n * b.v2()).norm());
      worst = std::max(worst, best);
    }
    const double d = ts::torus_diameter(b);
    EXPECT_LE(worst, d * (1 + 1e-12));
    EXPECT_GT(worst, 0.9 * d);
  }
}
