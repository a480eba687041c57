// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the tubespec authors

#include <cmath>
#include <numbers>
#include <variant>
#include <vector>

#include <gtest/gtest.h>

#include "tubespec/deformation_scan.hpp"
#include "tubespec/io.hpp"

namespace ts = tubespec;
using ts::RightBoundary;

namespace {

constexpr double pi = std::numbers::pi;

ts::FamilySpec smooth_family(std::vector<double> lengths, double twist = ts::golden_twist) {
  ts::FamilySpec spec;
  spec.kind = ts::SmoothFilling{std::move(lengths), twist};
  return spec;
}

}  // namespace

TEST(Generate, SmoothFillingRadii) {
  const auto gen = ts::generate(smooth_family({0.1, 0.01, 0.001}, 0.0));
  ASSERT_EQ(gen.size(), 3u);
  const double lengths[] = {0.1, 0.01, 0.001};
  for (std::size_t i = 0; i < gen.size(); ++i) {
    EXPECT_NEAR(gen[i].geometry.radius, 0.5 * std::asinh(2.0 / (2 * pi * lengths[i])), 1e-12);
    if (i > 0) EXPECT_GT(gen[i].geometry.radius, gen[i - 1].geometry.radius);
    const auto* c = std::get_if<ts::ConeTube>(&gen[i].shape);
    ASSERT_NE(c, nullptr);
    EXPECT_EQ(c->alpha, 2 * pi);
  }
}

TEST(Generate, GoldenTwistKeepsClassification) {
  const auto gen = ts::generate(smooth_family({1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6}));
  for (std::size_t i = 0; i < gen.size(); ++i) {
    const auto* c = std::get_if<ts::ConeTube>(&gen[i].shape);
    ASSERT_NE(c, nullptr);
    EXPECT_EQ(c->alpha, 2 * pi);
    if (i > 0) {
      EXPECT_LT(gen[i].geometry.base_covolume, gen[i - 1].geometry.base_covolume);
      EXPECT_LT(gen[i].diameter, gen[i - 1].diameter) << i;
    }
  }
}

TEST(Generate, ConeFamilyWithFixedAreaHasConstantRadius) {
  ts::FamilySpec spec;
  spec.kind = ts::ConeFamily{{2 * pi, pi, pi / 2}, ts::LengthLaw::FixedArea, 0.01, 0.0};
  const auto gen = ts::generate(spec);
  ASSERT_EQ(gen.size(), 3u);
  for (const auto& m : gen) {
    EXPECT_NEAR(m.geometry.base_covolume, 0.01, 1e-15);
    EXPECT_NEAR(m.geometry.radius, gen[0].geometry.radius, 1e-12);
  }
}

TEST(Generate, AreaLawConstantsWithinFactorTwo) {
  // e^{2R} covol = 4 A e^{2R} / (e^{2R} - e^{-2R}) lies in [4A, 4A / (1 - e^{-4R})].
  for (double area : {1.0, 2.0}) {
    auto spec = smooth_family({1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6});
    spec.boundary_area = area;
    double lo = INFINITY, hi = 0.0;
    for (const auto& m : ts::generate(spec)) {
      if (m.geometry.radius < 2.0) continue;
      const double v = std::exp(2 * m.geometry.radius) * m.geometry.base_covolume;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      EXPECT_GE(v, 4 * area * (1 - 1e-12));
    }
    EXPECT_LE(hi / lo, 2.0);
  }
  ts::FamilySpec irr;
  irr.kind = ts::IrrationalFamily{ts::IrrationalFamily{}.base, {0.3, 0.1, 0.03, 0.01}};
  double lo = INFINITY, hi = 0.0;
  for (const auto& m : ts::generate(irr)) {
    EXPECT_TRUE(std::holds_alternative<ts::Irrational>(m.shape));
    const double v = std::exp(2 * m.geometry.radius) * m.geometry.base_covolume;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  EXPECT_LE(hi / lo, 2.0);
}

TEST(Generate, RejectsBadFamilies) {
  EXPECT_THROW(ts::generate(smooth_family({})), ts::BadFamily);
  EXPECT_THROW(ts::generate(smooth_family({0.1, 0.2})), ts::BadFamily);
  EXPECT_THROW(ts::generate(smooth_family({0.1, 0.1})), ts::BadFamily);
  EXPECT_THROW(ts::generate(smooth_family({0.1, -0.01})), ts::BadFamily);
  auto spec = smooth_family({0.1});
  spec.boundary_area = 0.0;
  EXPECT_THROW(ts::generate(spec), ts::BadFamily);

  ts::FamilySpec cone;
  cone.kind = ts::ConeFamily{{pi, 2 * pi}, ts::LengthLaw::FixedLength, 0.01, 0.0};
  EXPECT_THROW(ts::generate(cone), ts::BadFamily);
  cone.kind = ts::ConeFamily{{pi}, ts::LengthLaw::FixedLength, 0.0, 0.0};
  EXPECT_THROW(ts::generate(cone), ts::BadFamily);

  ts::FamilySpec irr;
  irr.kind = ts::IrrationalFamily{ts::LatticeBasis::cone(1.0, 0.2, 1.0), {1.0, 0.5}};
  EXPECT_THROW(ts::generate(irr), ts::BadFamily);
}

TEST(RunClustering, FitsAgree) {
  auto spec = smooth_family({1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6});
  spec.right_bc = RightBoundary::dirichlet();
  const auto rep = ts::run_clustering(spec, 1.0);
  ASSERT_EQ(rep.rows.size(), 6u);
  ASSERT_TRUE(rep.fit_log_area.has_value());
  EXPECT_DOUBLE_EQ(rep.reference_slope_log_area, 1.0 / (2 * pi));
  EXPECT_NEAR(rep.fit_radius.slope, 1.0 / pi, 0.1 / pi);
  EXPECT_NEAR(rep.fit_log_area->slope, 1.0 / (2 * pi), 0.1 / (2 * pi));
  // Implied x from each fit.
  const double x_radius = rep.fit_radius.slope * pi;
  const double x_area = rep.fit_log_area->slope * 2 * pi;
  EXPECT_NEAR(x_radius / x_area, 1.0, 0.15);
  for (const auto& row : rep.rows) EXPECT_GE(row.count, 0);

  auto wide = spec;
  wide.boundary_area = 2.0;
  const auto shifted = ts::run_clustering(wide, 1.0);
  // R = asinh(2 A / covol) / 2 shifts by log(2) / 2 once the tube is deep.
  const double shift = std::log(2.0) / 2.0;
  for (std::size_t i = 0; i < rep.rows.size(); ++i)
    if (rep.rows[i].radius > 2.0) EXPECT_NEAR(shifted.rows[i].radius - rep.rows[i].radius, shift, 1e-2);
  // Integer counts make the slope noisy; compare within the combined standard error.
  EXPECT_GT(rep.fit_radius.slope_error, 0.0);
  EXPECT_LE(std::abs(shifted.fit_radius.slope - rep.fit_radius.slope),
            rep.fit_radius.slope_error + shifted.fit_radius.slope_error);

  EXPECT_THROW(ts::run_clustering(smooth_family({0.1, 0.01, 0.001}), 1.0), ts::BadFamily);
}

TEST(RunClustering, ModelOperatorSlope) {
  const auto spec = smooth_family({1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6});
  for (double x : {1.0, 2.0}) {
    const auto rep = ts::run_clustering(spec, x, ts::CountingSource::ModelOperator);
    for (const auto& row : rep.rows) EXPECT_EQ(row.count, static_cast<int>(std::floor(x * row.radius / pi)));
    EXPECT_NEAR(rep.fit_radius.slope, x / pi, 0.1 * x / pi);
  }
}

TEST(RunClustering, DeterministicAcrossJobs) {
  auto spec = smooth_family({1e-1, 1e-2, 1e-3, 1e-4});
  spec.jobs = 1;
  const auto a = ts::io::to_json(ts::run_clustering(spec, 2.0)).dump();
  spec.jobs = 3;
  const auto b = ts::io::to_json(ts::run_clustering(spec, 2.0)).dump();
  EXPECT_EQ(a, b);
}

TEST(SmallEigenvalueTable, NaturalAndDirichlet) {
  const auto spec = smooth_family({1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6});
  const auto natural = ts::small_eigenvalue_table(spec, 0.5);
  ASSERT_EQ(natural.size(), 6u);
  ASSERT_EQ(natural.back().eigenvalues.size(), 1u);
  EXPECT_LT(std::abs(natural.back().eigenvalues[0]), 1e-6);
  for (std::size_t i = 1; i < natural.size(); ++i)
    EXPECT_LE(natural[i].eigenvalues.size(), natural[i - 1].eigenvalues.size());
  for (const auto& row : ts::small_eigenvalue_table(spec, 0.5, RightBoundary::dirichlet()))
    EXPECT_TRUE(row.eigenvalues.empty()) << row.radius;
  EXPECT_THROW(ts::small_eigenvalue_table(spec, 1.0), ts::InvalidArgument);
  EXPECT_THROW(ts::small_eigenvalue_table(spec, 0.0), ts::InvalidArgument);
}
