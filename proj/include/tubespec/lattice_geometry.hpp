// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the tubespec authors

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "tubespec/errors.hpp"

namespace tubespec {

using Vec2 = Eigen::Vector2d;

inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Two generators of a lattice in the (angle, length) plane.
class LatticeBasis {
 public:
  LatticeBasis(const Vec2& v1, const Vec2& v2) : v1_(v1), v2_(v2) {
    const double det = v1.x() * v2.y() - v1.y() * v2.x();
    const double scale = v1.norm() * v2.norm();
    if (!std::isfinite(det) || !(std::abs(det) > 1e-14 * scale))
      throw DegenerateLattice("basis vectors are linearly dependent");
  }

  /// Cone-tube generators (alpha, 0) and (twist, length).
  static LatticeBasis cone(double alpha, double twist, double length) {
    return LatticeBasis(Vec2(alpha, 0.0), Vec2(twist, length));
  }

  const Vec2& v1() const { return v1_; }
  const Vec2& v2() const { return v2_; }

  /// Basis vectors as matrix columns.
  Eigen::Matrix2d matrix() const {
    Eigen::Matrix2d b;
    b.col(0) = v1_;
    b.col(1) = v2_;
    return b;
  }

  double determinant() const { return v1_.x() * v2_.y() - v1_.y() * v2_.x(); }

  LatticeBasis scaled(double s) const { return LatticeBasis(s * v1_, s * v2_); }

 private:
  Vec2 v1_;
  Vec2 v2_;
};

struct ConeTube {
  double alpha = 0.0;
  double twist = 0.0;
  double length = 0.0;
};

struct Irrational {};

using TubeShapeClass = std::variant<ConeTube, Irrational>;

/// Element of the dual lattice together with its index in the dual basis.
struct DualMode {
  std::array<std::int64_t, 2> index{0, 0};
  Vec2 lambda = Vec2::Zero();

  bool is_zero() const { return index[0] == 0 && index[1] == 0; }
};

/// An enumerated mode and its cross-section eigenvalue at the tube boundary.
struct ModeValue {
  DualMode mode;
  double value = 0.0;
};

struct TubeGeometry {
  double radius = 0.0;
  double boundary_area = 0.0;
  double base_covolume = 0.0;
};

struct ClassifyOptions {
  double tol = 1e-12;
  std::int64_t coefficient_bound = 10000;
};

inline double covolume(const LatticeBasis& basis) { return std::abs(basis.determinant()); }

/// Returns (w1, w2) with <wi, vj> = delta_ij.
inline std::pair<Vec2, Vec2> dual_basis(const LatticeBasis& basis) {
  const Eigen::Matrix2d w = basis.matrix().inverse().transpose();
  return {w.col(0), w.col(1)};
}

inline DualMode mode_from_index(const LatticeBasis& basis, std::int64_t m, std::int64_t n) {
  const auto [w1, w2] = dual_basis(basis);
  DualMode mode;
  mode.index = {m, n};
  mode.lambda = static_cast<double>(m) * w1 + static_cast<double>(n) * w2;
  return mode;
}

/// Eigenvalue of the flat cross-section torus at radius r for frequency lambda.
inline double cross_section_eigenvalue(const Vec2& lambda, double r) {
  const double s = std::sinh(r);
  const double c = std::cosh(r);
  return two_pi * two_pi * (lambda.x() * lambda.x() / (s * s) + lambda.y() * lambda.y() / (c * c));
}

namespace detail {

inline std::int64_t ext_gcd(std::int64_t a, std::int64_t b, std::int64_t& x, std::int64_t& y) {
  if (b == 0) {
    x = a >= 0 ? 1 : -1;
    y = 0;
    return std::abs(a);
  }
  std::int64_t x1 = 0, y1 = 0;
  const std::int64_t g = ext_gcd(b, a % b, x1, y1);
  x = y1;
  y = x1 - (a / b) * y1;
  return g;
}

/// Lagrange-Gauss reduction of (a, b) for the quadratic form given by g.
/// Returns the integer matrix u with [a' b'] = [a b] * u.
inline Eigen::Matrix<std::int64_t, 2, 2> gauss_reduce(Vec2& a, Vec2& b, const Eigen::Matrix2d& g) {
  Eigen::Matrix<std::int64_t, 2, 2> u = Eigen::Matrix<std::int64_t, 2, 2>::Identity();
  auto q = [&](const Vec2& x, const Vec2& y) { return x.dot(g * y); };
  if (q(a, a) > q(b, b)) {
    std::swap(a, b);
    u.col(0).swap(u.col(1));
  }
  for (int iter = 0; iter < 200; ++iter) {
    const double mu = std::round(q(a, b) / q(a, a));
    if (mu != 0.0) {
      b -= mu * a;
      u.col(1) -= static_cast<std::int64_t>(mu) * u.col(0);
    }
    if (q(b, b) >= q(a, a)) break;
    std::swap(a, b);
    u.col(0).swap(u.col(1));
  }
  return u;
}

}  // namespace detail

/// Cone tube with normalized generators, or Irrational when no horizontal
/// lattice vector exists within the coefficient bound.
inline TubeShapeClass classify(const LatticeBasis& basis, const ClassifyOptions& opt = {}) {
  if (opt.tol < 0.0) throw InvalidArgument("classify tolerance must be nonnegative");
  const Vec2& v1 = basis.v1();
  const Vec2& v2 = basis.v2();
  const double b1 = v1.y();
  const double b2 = v2.y();

  std::int64_t fm = 0, fn = 0;
  auto horizontal = [&](std::int64_t m, std::int64_t n) {
    const Vec2 v = static_cast<double>(m) * v1 + static_cast<double>(n) * v2;
    return std::abs(v.y()) <= opt.tol * v.norm();
  };
  if (horizontal(1, 0)) {
    fm = 1;
  } else if (horizontal(0, 1)) {
    fn = 1;
  } else {
    const std::int64_t bound = opt.coefficient_bound;
    for (std::int64_t n = 1; n <= bound && fm == 0 && fn == 0; ++n) {
      const double centre = -static_cast<double>(n) * b2 / b1;
      if (std::abs(centre) > static_cast<double>(bound) + 1.0) continue;
      const auto m0 = static_cast<std::int64_t>(std::llround(centre));
      for (std::int64_t m = m0 - 1; m <= m0 + 1; ++m) {
        if (std::abs(m) > bound) continue;
        if (horizontal(m, n)) {
          fm = m;
          fn = n;
          break;
        }
      }
    }
  }
  if (fm == 0 && fn == 0) return Irrational{};

  std::int64_t x = 0, y = 0;
  const std::int64_t g = detail::ext_gcd(fm, fn, x, y);
  fm /= g;
  fn /= g;
  detail::ext_gcd(fm, fn, x, y);  // fm*x + fn*y = 1
  Vec2 h = static_cast<double>(fm) * v1 + static_cast<double>(fn) * v2;
  Vec2 u = static_cast<double>(-y) * v1 + static_cast<double>(x) * v2;
  h.y() = 0.0;
  if (h.x() < 0.0) h = -h;
  if (u.y() < 0.0) u = -u;

  ConeTube cone;
  cone.alpha = h.x();
  cone.length = covolume(basis) / cone.alpha;
  double t = u.x() - std::floor(u.x() / cone.alpha) * cone.alpha;
  if (t >= cone.alpha) t -= cone.alpha;
  if (t < 0.0) t = 0.0;
  cone.twist = t;
  return cone;
}

/// All dual-lattice modes with cross-section eigenvalue at R not exceeding
/// energy_bound, ascending by value, zero mode first.
inline std::vector<ModeValue> enumerate_modes(const LatticeBasis& basis, double R, double energy_bound,
                                              std::size_t mode_cap = 1000000) {
  if (!(R > 0.0)) throw NonPositiveRadius("enumerate_modes needs R > 0");
  if (!(energy_bound >= 0.0) || !std::isfinite(energy_bound))
    throw InvalidArgument("energy bound must be finite and nonnegative");

  const auto [w1, w2] = dual_basis(basis);
  const double s = std::sinh(R);
  const double c = std::cosh(R);
  Eigen::Matrix2d metric = Eigen::Matrix2d::Zero();
  metric(0, 0) = two_pi * two_pi / (s * s);
  metric(1, 1) = two_pi * two_pi / (c * c);

  Vec2 a = w1;
  Vec2 b = w2;
  const auto u = detail::gauss_reduce(a, b, metric);

  const double g11 = a.dot(metric * a);
  const double g12 = a.dot(metric * b);
  const double g22 = b.dot(metric * b);
  const double det = g11 * g22 - g12 * g12;
  const double estimate = std::numbers::pi * energy_bound / std::sqrt(det) + 1.0;
  if (estimate > 4.0 * static_cast<double>(mode_cap))
    throw BoundTooLarge("about " + std::to_string(static_cast<long long>(estimate)) + " modes requested");

  const double slack = 1.0 + 1e-9;
  const double j2max = std::sqrt(energy_bound * g11 / det * slack);
  std::vector<ModeValue> out;
  for (auto j2 = static_cast<std::int64_t>(-std::floor(j2max)); j2 <= static_cast<std::int64_t>(std::floor(j2max)); ++j2) {
    const double jd = static_cast<double>(j2);
    const double rest = energy_bound * slack - det / g11 * jd * jd;
    if (rest < 0.0) continue;
    const double centre = -g12 / g11 * jd;
    const double half = std::sqrt(rest / g11);
    for (auto j1 = static_cast<std::int64_t>(std::floor(centre - half)); j1 <= static_cast<std::int64_t>(std::ceil(centre + half)); ++j1) {
      const std::int64_t m = u(0, 0) * j1 + u(0, 1) * j2;
      const std::int64_t n = u(1, 0) * j1 + u(1, 1) * j2;
      ModeValue mv;
      mv.mode.index = {m, n};
      mv.mode.lambda = static_cast<double>(m) * w1 + static_cast<double>(n) * w2;
      mv.value = (m == 0 && n == 0) ? 0.0 : cross_section_eigenvalue(mv.mode.lambda, R);
      if (mv.value > energy_bound) continue;
      out.push_back(mv);
      if (out.size() > mode_cap)
        throw BoundTooLarge("mode enumeration exceeded cap of " + std::to_string(mode_cap));
    }
  }
  std::sort(out.begin(), out.end(), [](const ModeValue& x, const ModeValue& y) {
    if (x.value != y.value) return x.value < y.value;
    return x.mode.index < y.mode.index;
  });
  return out;
}

inline double cross_section_area(const LatticeBasis& basis, double r) {
  if (!(r > 0.0)) throw NonPositiveRadius("cross_section_area needs r > 0");
  return std::sinh(r) * std::cosh(r) * covolume(basis);
}

/// Radius at which the cross-section torus has the given area.
inline TubeGeometry solve_tube_radius(const LatticeBasis& basis, double boundary_area = 1.0) {
  if (!(boundary_area > 0.0) || !std::isfinite(boundary_area))
    throw InvalidArgument("boundary area must be positive");
  const double covol = covolume(basis);
  TubeGeometry geo;
  geo.base_covolume = covol;
  geo.boundary_area = boundary_area;
  geo.radius = 0.5 * std::asinh(2.0 * boundary_area / covol);
  return geo;
}

/// Generalized Dehn coefficients (x, y) of a cone tube for a coprime pair.
inline std::pair<double, double> dehn_coefficients(const ConeTube& shape, std::int64_t p, std::int64_t q) {
  if (!(shape.alpha > 0.0)) throw InvalidArgument("cone angle must be positive");
  if (std::gcd(p, q) != 1) throw NotCoprime("(" + std::to_string(p) + ", " + std::to_string(q) + ")");
  const double f = two_pi / shape.alpha;
  return {f * static_cast<double>(p), f * static_cast<double>(q)};
}

/// Diameter of the flat torus R^2 / lattice, i.e. the covering radius.
inline double torus_diameter(const LatticeBasis& basis) {
  Vec2 a = basis.v1();
  Vec2 b = basis.v2();
  detail::gauss_reduce(a, b, Eigen::Matrix2d::Identity());
  // Pick the non-obtuse triangle spanned by a reduced pair.
  if (a.dot(b) < 0.0) b = -b;
  const double la = a.norm();
  const double lb = b.norm();
  const double lc = (a - b).norm();
  const double area2 = std::abs(a.x() * b.y() - a.y() * b.x());
  return la * lb * lc / (2.0 * area2);
}

inline std::string to_string(const TubeShapeClass& shape) {
  if (const auto* c = std::get_if<ConeTube>(&shape))
    return "ConeTube{alpha=" + std::to_string(c->alpha) + ", twist=" + std::to_string(c->twist) +
           ", length=" + std::to_string(c->length) + "}";
  return "Irrational";
}

}  // namespace tubespec
