// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the tubespec authors

#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <variant>
#include <vector>

#include "tubespec/errors.hpp"
#include "tubespec/lattice_geometry.hpp"
#include "tubespec/parallel.hpp"
#include "tubespec/sturm_solver.hpp"
#include "tubespec/tube_spectrum.hpp"

namespace tubespec {

/// Golden-ratio twist 2 pi (sqrt 5 - 1) / 2. Keeps the boundary tori of a
/// smooth-filling family uniformly non-degenerate as the core shrinks.
inline const double golden_twist = two_pi * (std::sqrt(5.0) - 1.0) / 2.0;

/// Smooth fillings (cone angle 2 pi) with shrinking core length.
struct SmoothFilling {
  std::vector<double> lengths;  ///< strictly decreasing
  double twist = golden_twist;
};

enum class LengthLaw {
  FixedArea,    ///< alpha * length = value
  FixedLength,  ///< length = value
};

struct ConeFamily {
  std::vector<double> alphas;
  LengthLaw law = LengthLaw::FixedArea;
  double value = 0.01;
  double twist = 0.0;
};

/// A fixed lattice scaled by shrink factors s, covolume s^2 covol.
struct IrrationalFamily {
  LatticeBasis base{Vec2(1.0, std::sqrt(2.0)), Vec2(std::sqrt(3.0), 1.0)};
  std::vector<double> shrink;  ///< strictly decreasing, positive
};

using FamilyKind = std::variant<SmoothFilling, ConeFamily, IrrationalFamily>;

struct FamilySpec {
  FamilyKind kind;
  double boundary_area = 1.0;
  SolverConfig solver;
  RightBoundary right_bc = RightBoundary::dirichlet();
  int jobs = 1;
};

struct GeneratedMember {
  LatticeBasis basis;
  TubeGeometry geometry;
  TubeShapeClass shape;
  double diameter = 0.0;  ///< of the flat base torus
};

namespace detail {

inline bool close(double a, double b, double rel) { return std::abs(a - b) <= rel * std::max(1.0, std::abs(b)); }

inline void check_cone(const GeneratedMember& m, double alpha, double twist, double length, std::size_t i) {
  const auto* c = std::get_if<ConeTube>(&m.shape);
  if (c == nullptr) throw BadFamily("member " + std::to_string(i) + " does not classify as a cone tube");
  double t = twist - std::floor(twist / alpha) * alpha;
  if (t >= alpha) t -= alpha;
  const bool twist_ok = close(c->twist, t, 1e-9) || close(std::abs(c->twist - t), alpha, 1e-9);
  if (!close(c->alpha, alpha, 1e-12) || !close(c->length, length, 1e-9) || !twist_ok)
    throw BadFamily("member " + std::to_string(i) + " classifies as " + to_string(m.shape));
}

}  // namespace detail

/// Lattices and tube geometries of a family, in family order.
inline std::vector<GeneratedMember> generate(const FamilySpec& spec) {
  if (!(spec.boundary_area > 0.0) || !std::isfinite(spec.boundary_area))
    throw BadFamily("boundary area must be positive");
  std::vector<LatticeBasis> bases;
  bool strict = true;

  if (const auto* s = std::get_if<SmoothFilling>(&spec.kind)) {
    for (double l : s->lengths) {
      if (!(l > 0.0) || !std::isfinite(l)) throw BadFamily("core lengths must be positive");
      bases.push_back(LatticeBasis::cone(two_pi, s->twist, l));
    }
  } else if (const auto* c = std::get_if<ConeFamily>(&spec.kind)) {
    if (!(c->value > 0.0)) throw BadFamily("length law value must be positive");
    strict = false;
    for (double a : c->alphas) {
      if (!(a > 0.0) || !std::isfinite(a)) throw BadFamily("cone angles must be positive");
      const double l = c->law == LengthLaw::FixedArea ? c->value / a : c->value;
      bases.push_back(LatticeBasis::cone(a, c->twist, l));
    }
  } else {
    const auto& irr = std::get<IrrationalFamily>(spec.kind);
    if (!std::holds_alternative<Irrational>(classify(irr.base)))
      throw BadFamily("base lattice of an irrational family contains a horizontal vector");
    for (double sf : irr.shrink) {
      if (!(sf > 0.0) || !std::isfinite(sf)) throw BadFamily("shrink factors must be positive");
      bases.push_back(irr.base.scaled(sf));
    }
  }
  if (bases.empty()) throw BadFamily("empty family");

  std::vector<GeneratedMember> out;
  for (std::size_t i = 0; i < bases.size(); ++i) {
    GeneratedMember m{bases[i], solve_tube_radius(bases[i], spec.boundary_area), classify(bases[i]),
                      torus_diameter(bases[i])};
    if (i > 0) {
      const double prev = out.back().geometry.base_covolume;
      const double cur = m.geometry.base_covolume;
      const bool ok = strict ? cur < prev : cur <= prev * (1.0 + 1e-12);
      if (!ok) throw BadFamily("covolume increases at member " + std::to_string(i));
    }
    if (const auto* s = std::get_if<SmoothFilling>(&spec.kind)) {
      detail::check_cone(m, two_pi, s->twist, s->lengths[i], i);
    } else if (const auto* c = std::get_if<ConeFamily>(&spec.kind)) {
      const double a = c->alphas[i];
      detail::check_cone(m, a, c->twist, c->law == LengthLaw::FixedArea ? c->value / a : c->value, i);
    } else if (!std::holds_alternative<Irrational>(m.shape)) {
      throw BadFamily("member " + std::to_string(i) + " classifies as " + to_string(m.shape));
    }
    out.push_back(std::move(m));
  }
  return out;
}

inline std::vector<FamilyMember> members(const std::vector<GeneratedMember>& generated) {
  std::vector<FamilyMember> out;
  out.reserve(generated.size());
  for (const GeneratedMember& g : generated) out.push_back({g.basis, g.geometry});
  return out;
}

/// Clustering scan over a family: N[1, 1 + x^2] fitted against R and against
/// log(1 / covolume).
inline CountingReport run_clustering(const FamilySpec& spec, double x,
                                     CountingSource source = CountingSource::Tube) {
  const std::vector<GeneratedMember> gen = generate(spec);
  if (gen.size() < 4) throw BadFamily("a clustering run needs at least four members");
  CountingReport rep = clustering_scan(members(gen), x, spec.right_bc, spec.solver, spec.jobs, source);
  std::vector<double> xs, ys;
  for (const CountingRow& r : rep.rows) {
    xs.push_back(std::log(1.0 / r.covolume));
    ys.push_back(static_cast<double>(r.count));
  }
  rep.fit_log_area = least_squares(xs, ys);
  rep.reference_slope_log_area = x / (2.0 * std::numbers::pi);
  return rep;
}

struct SmallEigenvalueRow {
  double radius = 0.0;
  double covolume = 0.0;
  std::vector<double> eigenvalues;
};

/// Tube eigenvalues below the threshold for every member of the family.
inline std::vector<SmallEigenvalueRow> small_eigenvalue_table(const FamilySpec& spec, double threshold,
                                                              const RightBoundary& right_bc = RightBoundary::natural()) {
  if (!(threshold > 0.0 && threshold < 1.0)) throw InvalidArgument("spectral threshold must lie in (0, 1)");
  const std::vector<GeneratedMember> gen = generate(spec);
  std::vector<SmallEigenvalueRow> rows(gen.size());
  parallel_for(gen.size(), spec.jobs, [&](std::size_t i) {
    const TubeSpectrum s = assemble_spectrum(gen[i].basis, gen[i].geometry, right_bc, -1.0, threshold, spec.solver);
    SmallEigenvalueRow row{gen[i].geometry.radius, gen[i].geometry.base_covolume, {}};
    for (const SpectrumEntry& e : s.entries)
      if (e.eigenvalue < threshold) row.eigenvalues.push_back(e.eigenvalue);
    rows[i] = std::move(row);
  });
  return rows;
}

}  // namespace tubespec
