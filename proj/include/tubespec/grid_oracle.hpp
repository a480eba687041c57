// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the tubespec authors

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "tubespec/errors.hpp"
#include "tubespec/lanczos.hpp"
#include "tubespec/lattice_geometry.hpp"
#include "tubespec/sturm_solver.hpp"
#include "tubespec/tube_spectrum.hpp"

namespace tubespec {

/// Fundamental cell used by the oracle: a basis of the same lattice whose dual
/// basis is reduced for the cross-section metric at the tube boundary. The
/// reduction keeps angle derivatives from cancelling between skewed cell
/// directions.
struct OracleCell {
  Eigen::Matrix2d primal;   ///< columns span the lattice
  Eigen::Matrix2d inverse;  ///< rows are the reduced dual basis
  double area = 0.0;

  /// Index of a dual vector in the reduced dual basis.
  std::array<std::int64_t, 2> reduced_index(const Vec2& lambda) const {
    const Vec2 j = primal.transpose() * lambda;
    return {std::llround(j.x()), std::llround(j.y())};
  }
};

inline OracleCell make_oracle_cell(const LatticeBasis& basis, double R) {
  const auto [w1, w2] = dual_basis(basis);
  Vec2 a = w1, b = w2;
  Eigen::Matrix2d metric = Eigen::Matrix2d::Zero();
  metric(0, 0) = two_pi * two_pi / std::pow(std::sinh(R), 2);
  metric(1, 1) = two_pi * two_pi / std::pow(std::cosh(R), 2);
  detail::gauss_reduce(a, b, metric);
  Eigen::Matrix2d dual;
  dual.row(0) = a.transpose();
  dual.row(1) = b.transpose();
  OracleCell cell;
  cell.inverse = dual;
  cell.primal = dual.inverse();
  cell.area = std::abs(cell.primal.determinant());
  return cell;
}

enum class BaseMetric { Hyperbolic, FlatCone };

/// Metric on the tube: a base metric times an optional conformal factor
/// depending on (r, s1, s2), with s the coordinates in the oracle cell.
struct MetricModel {
  BaseMetric base = BaseMetric::Hyperbolic;
  std::function<double(double, double, double)> conformal;

  static MetricModel hyperbolic() { return {}; }
  static MetricModel flat_cone() { return {BaseMetric::FlatCone, {}}; }
};

struct GridParams {
  int nr = 64;               ///< radial elements
  double gamma = 2.0;        ///< radial grading exponent
  int n1 = 0;                ///< cell divisions along the first reduced direction (0 = auto)
  int n2 = 0;
  double eps = 0.0;          ///< truncation radius (0 = R / 64)
  double quad_blend = 0.5;   ///< Gauss share of the quadrature; the rest is nodal
  int points_per_period = 8;
  std::array<int, 2> max_index{1, 1};  ///< largest reduced mode index to resolve
  bool enforce_resolution = true;

  /// One uniform refinement: twice the nodes in every direction, half the truncation radius.
  GridParams refined(double R) const {
    GridParams g = *this;
    g.nr *= 2;
    g.n1 = resolved_n(0) * 2;
    g.n2 = resolved_n(1) * 2;
    g.eps = (eps > 0.0 ? eps : R / 64.0) / 2.0;
    return g;
  }

  int resolved_n(int axis) const {
    const int given = axis == 0 ? n1 : n2;
    if (given > 0) return given;
    const int m = max_index[static_cast<std::size_t>(axis)];
    if (m <= 0) return axis == 0 ? points_per_period : 4;
    return points_per_period * (m + 1);
  }
};

/// Generalized eigenproblem K u = lambda M u of the 3D quadratic form.
struct OracleProblem {
  SparseMatrix K;
  SparseMatrix M;
  OracleCell cell;
  int nr = 0, n1 = 0, n2 = 0;
  double eps = 0.0;
  double R = 0.0;
  bool left_pinned = false;
  bool right_pinned = false;
  std::vector<double> r_nodes;
  double conformal_min = 1.0;
  double conformal_max = 1.0;
  MetricModel metric;
};

namespace detail {

struct Rule1D {
  std::vector<double> t, w;
};

inline Rule1D blended_rule(int gauss_points, double blend) {
  Rule1D rule;
  if (blend > 0.0) {
    if (gauss_points == 4) {
      for (std::size_t q = 0; q < gauss_x.size(); ++q) {
        rule.t.push_back(gauss_x[q]);
        rule.w.push_back(blend * gauss_w[q]);
      }
    } else {
      const double g = 0.5 / std::sqrt(3.0);
      rule.t = {0.5 - g, 0.5 + g};
      rule.w = {0.5 * blend, 0.5 * blend};
    }
  }
  if (blend < 1.0) {
    rule.t.push_back(0.0);
    rule.w.push_back(0.5 * (1.0 - blend));
    rule.t.push_back(1.0);
    rule.w.push_back(0.5 * (1.0 - blend));
  }
  return rule;
}

}  // namespace detail

/// Assembles the stiffness and mass of the tube's Dirichlet energy on
/// [eps, R] x cell, periodic in the cell, with Q1 elements in the cell and
/// linear elements in r.
inline OracleProblem build_operator(const LatticeBasis& basis, const TubeGeometry& geometry, const GridParams& grid,
                                    const RightBoundary& right_bc, const LeftBoundary& left_bc,
                                    const MetricModel& metric = MetricModel::hyperbolic()) {
  const double R = geometry.radius;
  if (!(R > 0.0)) throw NonPositiveRadius("tube radius must be positive");
  OracleProblem p;
  p.R = R;
  p.metric = metric;
  p.cell = make_oracle_cell(basis, R);
  p.nr = grid.nr;
  p.n1 = grid.resolved_n(0);
  p.n2 = grid.resolved_n(1);
  if (p.nr < 2 || p.n1 < 1 || p.n2 < 1) throw BadConfig("grid needs nr >= 2 and at least one cell node per direction");
  if (!(grid.quad_blend >= 0.0 && grid.quad_blend <= 1.0)) throw BadConfig("quad_blend must be in [0, 1]");
  if (grid.enforce_resolution && p.n1 < 8)
    throw GridTooCoarse(std::to_string(p.n1) + " nodes per period of the shortest dual vector (need 8)");

  switch (left_bc.kind) {
    case LeftKind::Friedrichs:
      throw BadConfig("the oracle truncates at eps; use DirichletAt or NaturalAt and extrapolate");
    case LeftKind::DirichletAt:
    case LeftKind::NaturalAt:
      p.eps = left_bc.eps > 0.0 ? left_bc.eps : (grid.eps > 0.0 ? grid.eps : R / 64.0);
      p.left_pinned = left_bc.kind == LeftKind::DirichletAt;
      break;
  }
  if (!(p.eps > 0.0 && p.eps < R)) throw BadConfig("truncation radius must lie in (0, R)");
  p.right_pinned = right_bc.kind == RightKind::Dirichlet;
  if (right_bc.kind == RightKind::Robin) throw BadConfig("the oracle supports Dirichlet or natural conditions at R");

  const int nr = p.nr, n1 = p.n1, n2 = p.n2;
  p.r_nodes.resize(static_cast<std::size_t>(nr) + 1);
  for (int i = 0; i <= nr; ++i) p.r_nodes[i] = p.eps + (R - p.eps) * std::pow(static_cast<double>(i) / nr, grid.gamma);
  p.r_nodes.back() = R;

  // Free-node numbering.
  const int first = p.left_pinned ? 1 : 0;
  const int last = p.right_pinned ? nr - 1 : nr;
  if (last < first) throw BadConfig("no free radial nodes");
  const std::int64_t layer = static_cast<std::int64_t>(n1) * n2;
  const std::int64_t dofs = static_cast<std::int64_t>(last - first + 1) * layer;
  auto dof = [&](int i, int a, int b) -> std::int64_t {
    if (i < first || i > last) return -1;
    return static_cast<std::int64_t>(i - first) * layer + static_cast<std::int64_t>(((a % n1) + n1) % n1) * n2 +
           ((b % n2) + n2) % n2;
  };

  const Vec2 d_theta = p.cell.inverse.col(0);  // d/dtheta = d_theta . grad_s
  const Vec2 d_z = p.cell.inverse.col(1);
  const double area = p.cell.area;
  const double h1 = 1.0 / n1, h2 = 1.0 / n2;
  const detail::Rule1D rr = detail::blended_rule(4, grid.quad_blend);
  const detail::Rule1D rs = detail::blended_rule(2, grid.quad_blend);

  auto weights = [&](double r, double& w, double& ct, double& cz) {
    if (metric.base == BaseMetric::Hyperbolic) {
      w = 0.5 * std::sinh(2.0 * r);
      ct = 1.0 / std::tanh(r);
      cz = std::tanh(r);
    } else {
      w = r;
      ct = 1.0 / r;
      cz = r;
    }
  };

  std::vector<Eigen::Triplet<double>> kt, mt;
  kt.reserve(static_cast<std::size_t>(nr) * layer * 64);
  mt.reserve(static_cast<std::size_t>(nr) * layer * 64);
  double cmin = std::numeric_limits<double>::infinity(), cmax = 0.0;

  for (int i = 0; i < nr; ++i) {
    const double r0 = p.r_nodes[i], hr = p.r_nodes[i + 1] - r0;
    for (int a = 0; a < n1; ++a) {
      for (int b = 0; b < n2; ++b) {
        std::array<std::int64_t, 8> ids{};
        for (int c = 0; c < 8; ++c) ids[c] = dof(i + (c >> 2), a + ((c >> 1) & 1), b + (c & 1));
        double ke[8][8] = {};
        double me[8][8] = {};
        for (std::size_t qr = 0; qr < rr.t.size(); ++qr) {
          const double tr = rr.t[qr];
          const double r = r0 + tr * hr;
          double w, ct, cz;
          weights(r, w, ct, cz);
          const double lr[2] = {1.0 - tr, tr};
          const double dr[2] = {-1.0 / hr, 1.0 / hr};
          for (std::size_t q1 = 0; q1 < rs.t.size(); ++q1) {
            const double t1 = rs.t[q1];
            const double l1[2] = {1.0 - t1, t1};
            const double d1[2] = {-1.0 / h1, 1.0 / h1};
            for (std::size_t q2 = 0; q2 < rs.t.size(); ++q2) {
              const double t2 = rs.t[q2];
              const double l2[2] = {1.0 - t2, t2};
              const double d2[2] = {-1.0 / h2, 1.0 / h2};
              const double wq = rr.w[qr] * rs.w[q1] * rs.w[q2] * hr * h1 * h2 * area;
              double kscale = 1.0, mscale = 1.0;
              if (metric.conformal) {
                const double phi = metric.conformal(r, (a + t1) * h1, (b + t2) * h2);
                cmin = std::min(cmin, phi);
                cmax = std::max(cmax, phi);
                kscale = std::sqrt(phi);
                mscale = phi * kscale;
              }
              double val[8], gr[8], gt[8], gz[8];
              for (int c = 0; c < 8; ++c) {
                const int ir = c >> 2, i1 = (c >> 1) & 1, i2 = c & 1;
                val[c] = lr[ir] * l1[i1] * l2[i2];
                gr[c] = dr[ir] * l1[i1] * l2[i2];
                const double g1 = lr[ir] * d1[i1] * l2[i2];
                const double g2 = lr[ir] * l1[i1] * d2[i2];
                gt[c] = d_theta.x() * g1 + d_theta.y() * g2;
                gz[c] = d_z.x() * g1 + d_z.y() * g2;
              }
              const double kw = wq * kscale;
              const double mw = wq * mscale * w;
              for (int x = 0; x < 8; ++x)
                for (int y = 0; y < 8; ++y) {
                  ke[x][y] += kw * (w * gr[x] * gr[y] + ct * gt[x] * gt[y] + cz * gz[x] * gz[y]);
                  me[x][y] += mw * val[x] * val[y];
                }
            }
          }
        }
        for (int x = 0; x < 8; ++x) {
          if (ids[x] < 0) continue;
          for (int y = 0; y < 8; ++y) {
            if (ids[y] < 0) continue;
            kt.emplace_back(ids[x], ids[y], ke[x][y]);
            mt.emplace_back(ids[x], ids[y], me[x][y]);
          }
        }
      }
    }
  }
  p.K.resize(dofs, dofs);
  p.M.resize(dofs, dofs);
  p.K.setFromTriplets(kt.begin(), kt.end());
  p.M.setFromTriplets(mt.begin(), mt.end());
  p.K.makeCompressed();
  p.M.makeCompressed();
  if (metric.conformal) {
    p.conformal_min = cmin;
    p.conformal_max = cmax;
  }
  return p;
}

struct SparseSpectralResult {
  std::vector<double> values;
  std::vector<double> residuals;
  int restarts = 0;
  std::int64_t dimension = 0;
};

/// Lowest k eigenvalues of an oracle problem.
inline SparseSpectralResult oracle_spectrum(const OracleProblem& problem, int k, const LanczosOptions& opt = {}) {
  const GeneralizedEigenResult g = lowest_generalized_eigenpairs(problem.K, problem.M, k, opt);
  SparseSpectralResult out;
  out.values = g.values;
  out.residuals = g.residuals;
  out.restarts = g.restarts;
  out.dimension = problem.K.rows();
  for (double res : out.residuals)
    if (!(res < 1e-8))
      throw IterationFailure("eigenpair residual " + std::to_string(res) + " exceeds 1e-8 (dimension " +
                             std::to_string(out.dimension) + ")");
  return out;
}

struct OracleSpectrum {
  std::vector<double> values;         ///< extrapolated to eps -> 0
  std::vector<double> values_eps;     ///< natural truncation at eps
  std::vector<double> values_half;    ///< natural truncation at eps / 2
  double eps = 0.0;
  std::int64_t dimension = 0;
  double max_residual = 0.0;
};

/// Friedrichs eigenvalues from the 3D discretization: natural truncations at
/// eps and eps/2 combined by extrapolation in eps^2.
inline OracleSpectrum oracle_friedrichs(const LatticeBasis& basis, const TubeGeometry& geometry, const GridParams& grid,
                                        const RightBoundary& right_bc, int k, const LanczosOptions& opt = {}) {
  const double eps = grid.eps > 0.0 ? grid.eps : geometry.radius / 64.0;
  OracleSpectrum out;
  out.eps = eps;
  const OracleProblem p1 = build_operator(basis, geometry, grid, right_bc, LeftBoundary::natural_at(eps));
  const SparseSpectralResult s1 = oracle_spectrum(p1, k, opt);
  const OracleProblem p2 = build_operator(basis, geometry, grid, right_bc, LeftBoundary::natural_at(eps / 2.0));
  const SparseSpectralResult s2 = oracle_spectrum(p2, k, opt);
  out.values_eps = s1.values;
  out.values_half = s2.values;
  out.dimension = p1.K.rows();
  for (int i = 0; i < k; ++i) out.values.push_back((4.0 * s2.values[i] - s1.values[i]) / 3.0);
  for (double r : s1.residuals) out.max_residual = std::max(out.max_residual, r);
  for (double r : s2.residuals) out.max_residual = std::max(out.max_residual, r);
  return out;
}

struct BracketReport {
  std::vector<double> first, second;
  std::vector<double> ratios;  ///< second / first, 1 where both vanish
  double worst_low = 1.0;      ///< smallest ratio
  double worst_high = 1.0;     ///< largest ratio
  double lower = 1.0;          ///< (1 + beta)^-2
  double upper = 1.0;          ///< (1 + beta)^2
  double rigorous_lower = 1.0; ///< (1 + beta)^-(2 + 2 dim): pointwise bound on the Rayleigh quotients
  double rigorous_upper = 1.0;
  bool within = true;          ///< all ratios in [lower, upper]
  bool within_rigorous = true;
};

/// Compares the lowest k eigenvalues of two discretizations whose metrics are
/// (1 + beta)-quasi-isometric.
inline BracketReport quasi_isometry_bracket(const OracleProblem& first, const OracleProblem& second, double beta, int k,
                                            const LanczosOptions& opt = {}) {
  if (!(beta >= 0.0)) throw InvalidArgument("beta must be nonnegative");
  if (first.K.rows() != second.K.rows() || first.nr != second.nr || first.n1 != second.n1 || first.n2 != second.n2 ||
      first.eps != second.eps || first.left_pinned != second.left_pinned || first.right_pinned != second.right_pinned)
    throw InvalidArgument("bracketing compares two metrics on the same grid");
  if (first.metric.base != second.metric.base) throw InvalidArgument("base metrics differ");
  const double q2 = (1.0 + beta) * (1.0 + beta);
  const double slack = 1e-12;
  // Pointwise check: both conformal factors relative to the common base metric.
  const double lo = second.conformal_min / first.conformal_max;
  const double hi = second.conformal_max / first.conformal_min;
  if (lo < 1.0 / q2 * (1.0 - slack) || hi > q2 * (1.0 + slack))
    throw NotQuasiIsometric("metric ratio range [" + std::to_string(lo) + ", " + std::to_string(hi) +
                            "] exceeds (1+beta)^2");

  BracketReport rep;
  rep.lower = 1.0 / q2;
  rep.upper = q2;
  rep.rigorous_lower = std::pow(1.0 + beta, -8.0);
  rep.rigorous_upper = std::pow(1.0 + beta, 8.0);
  rep.first = oracle_spectrum(first, k, opt).values;
  rep.second = oracle_spectrum(second, k, opt).values;
  rep.worst_low = std::numeric_limits<double>::infinity();
  rep.worst_high = -std::numeric_limits<double>::infinity();
  const double scale = std::max(1.0, std::abs(rep.first.back()));
  for (int i = 0; i < k; ++i) {
    const double a = rep.first[i], b = rep.second[i];
    double ratio = 1.0;
    if (std::abs(a) > 1e-9 * scale)
      ratio = b / a;
    else if (std::abs(b) > 1e-9 * scale)
      ratio = std::numeric_limits<double>::infinity();
    rep.ratios.push_back(ratio);
    rep.worst_low = std::min(rep.worst_low, ratio);
    rep.worst_high = std::max(rep.worst_high, ratio);
    const double tol = 1e-10;
    if (ratio < rep.lower * (1.0 - tol) || ratio > rep.upper * (1.0 + tol)) rep.within = false;
    if (ratio < rep.rigorous_lower * (1.0 - tol) || ratio > rep.rigorous_upper * (1.0 + tol)) rep.within_rigorous = false;
  }
  return rep;
}

struct OracleComparisonLevel {
  std::int64_t dimension = 0;
  std::vector<double> oracle;
  std::vector<double> modes;
  std::vector<DualMode> mode_of;
  double max_relative_deviation = 0.0;  ///< |oracle - modes| / max(|modes|, 1)
  double max_residual = 0.0;
};

struct OracleComparison {
  double radius = 0.0;
  std::array<int, 2> max_index{0, 0};
  std::vector<OracleComparisonLevel> levels;
};

/// Lowest k eigenvalues from the mode decomposition against the 3D oracle at
/// the default grid and after each of `refinements` uniform refinements. The
/// grid resolves every mode that carries one of the k values.
inline OracleComparison oracle_compare(const LatticeBasis& basis, const TubeGeometry& geometry,
                                       const RightBoundary& right_bc, int k, int refinements,
                                       const SolverConfig& cfg = {}, const LanczosOptions& opt = {}) {
  if (refinements < 0) throw BadConfig("refinement count must be nonnegative");
  const std::vector<SpectrumEntry> ref = lowest_tube_eigenvalues(basis, geometry, right_bc, k, cfg);
  const OracleCell cell = make_oracle_cell(basis, geometry.radius);
  OracleComparison out;
  out.radius = geometry.radius;
  for (const SpectrumEntry& e : ref) {
    const auto j = cell.reduced_index(e.mode.lambda);
    out.max_index[0] = std::max<int>(out.max_index[0], static_cast<int>(std::abs(j[0])));
    out.max_index[1] = std::max<int>(out.max_index[1], static_cast<int>(std::abs(j[1])));
  }
  GridParams grid;
  grid.max_index = out.max_index;
  for (int level = 0; level <= refinements; ++level, grid = grid.refined(geometry.radius)) {
    const OracleSpectrum o = oracle_friedrichs(basis, geometry, grid, right_bc, k, opt);
    OracleComparisonLevel row;
    row.dimension = o.dimension;
    row.oracle = o.values;
    row.max_residual = o.max_residual;
    for (int i = 0; i < k; ++i) {
      const double m = ref[static_cast<std::size_t>(i)].eigenvalue;
      row.modes.push_back(m);
      row.mode_of.push_back(ref[static_cast<std::size_t>(i)].mode);
      row.max_relative_deviation =
          std::max(row.max_relative_deviation, std::abs(o.values[static_cast<std::size_t>(i)] - m) / std::max(std::abs(m), 1.0));
    }
    out.levels.push_back(std::move(row));
  }
  return out;
}

}  // namespace tubespec
