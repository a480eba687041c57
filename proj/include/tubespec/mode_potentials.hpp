// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the tubespec authors

#pragma once

#include <array>
#include <cmath>
#include <numbers>

#include "tubespec/errors.hpp"
#include "tubespec/lattice_geometry.hpp"

namespace tubespec {

/// Radial potential of the zero mode, 2 - coth(2r)^2.
inline double base_potential(double r) {
  if (!(r > 0.0)) throw NonPositiveRadius("potential needs r > 0");
  if (r < 1e-4) return -0.25 / (r * r) + 4.0 / 3.0 - (4.0 / 15.0) * r * r;
  const double ct = 1.0 / std::tanh(2.0 * r);
  return 2.0 - ct * ct;
}

/// Cross-section part of the potential, V_lambda - V_0.
inline double mode_excess(const DualMode& mode, double r) {
  if (!(r > 0.0)) throw NonPositiveRadius("potential needs r > 0");
  return mode.is_zero() ? 0.0 : cross_section_eigenvalue(mode.lambda, r);
}

inline double potential_value(const DualMode& mode, double r) { return base_potential(r) + mode_excess(mode, r); }

/// A mode potential restricted to (0, R].
struct ModePotential {
  DualMode mode;
  double R = 0.0;

  double operator()(double r) const {
    if (r > R * (1.0 + 1e-14)) throw InvalidArgument("potential evaluated outside (0, R]");
    return potential_value(mode, r);
  }
};

enum class EndpointKind { LimitPoint, LimitCircle };

struct EndpointClass {
  EndpointKind kind = EndpointKind::LimitCircle;
  double c2 = -0.25;  ///< lim r^2 V(r) as r -> 0
};

/// Weyl classification of the endpoint r = 0 via the inverse-square coefficient.
inline EndpointClass classify_endpoint(const DualMode& mode) {
  const double s = two_pi * std::abs(mode.lambda.x());
  EndpointClass out;
  out.c2 = s * s - 0.25;
  // s >= 1 exactly at the threshold; absorb the rounding of 2*pi*(1/(2*pi)).
  out.kind = s >= 1.0 - 1e-12 ? EndpointKind::LimitPoint : EndpointKind::LimitCircle;
  return out;
}

inline const char* to_string(EndpointKind k) { return k == EndpointKind::LimitPoint ? "LimitPoint" : "LimitCircle"; }

/// Numerical estimate of lim r^2 V(r): Richardson extrapolation in r^2 from
/// samples at r = 1e-3, 1e-4, 1e-5.
inline double estimate_inverse_square_coefficient(const DualMode& mode) {
  const std::array<double, 3> rs{1e-3, 1e-4, 1e-5};
  std::array<double, 3> g{};
  for (std::size_t i = 0; i < rs.size(); ++i) g[i] = rs[i] * rs[i] * potential_value(mode, rs[i]);
  // Samples are g(h) = c2 + a h + b h^2 with h = r^2; Neville on h.
  std::array<double, 3> h{};
  for (std::size_t i = 0; i < rs.size(); ++i) h[i] = rs[i] * rs[i];
  std::array<double, 3> p = g;
  for (std::size_t level = 1; level < 3; ++level)
    for (std::size_t i = 2; i >= level; --i) {
      p[i] = (h[i - level] * p[i] - h[i] * p[i - 1]) / (h[i - level] - h[i]);
      if (i == level) break;
    }
  return p[2];
}

/// Unique positive zero of the base potential, by bisection on [0.1, 1].
inline double zero_of_V0() {
  double lo = 0.1;
  double hi = 1.0;
  for (int i = 0; i < 200 && hi - lo > 0.0; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (base_potential(mid) < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return std::abs(base_potential(lo)) < std::abs(base_potential(hi)) ? lo : hi;
}

/// Sharp lower bound of V_lambda - V_0 on (0, R]; attained at r = R.
inline double mode_gap(const DualMode& mode, double R) {
  if (mode.is_zero() || mode.lambda.squaredNorm() == 0.0) throw ZeroMode("mode gap undefined for the zero mode");
  if (!(R > 0.0)) throw NonPositiveRadius("mode gap needs R > 0");
  return cross_section_eigenvalue(mode.lambda, R);
}

}  // namespace tubespec
