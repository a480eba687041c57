// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the tubespec authors

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "tubespec/errors.hpp"
#include "tubespec/lattice_geometry.hpp"
#include "tubespec/mode_potentials.hpp"
#include "tubespec/parallel.hpp"
#include "tubespec/sturm_solver.hpp"

namespace tubespec {

struct SpectrumEntry {
  double eigenvalue = 0.0;
  DualMode mode;
  double error_estimate = 0.0;
};

/// Tube eigenvalues in a window, each tagged with the Fourier mode it came from.
struct TubeSpectrum {
  LatticeBasis basis;
  TubeGeometry geometry;
  RightBoundary right_bc;
  double window_a = 0.0;
  double window_b = 0.0;
  double truncation_bound = 0.0;
  std::size_t modes_used = 0;
  std::vector<SpectrumEntry> entries;
};

/// Spectrum in [a, b] as the union of mode spectra. Modes whose gap exceeds
/// truncation_bound (default b) are skipped: their operators are bounded below
/// by the gap because the zero-mode operator is nonnegative.
inline TubeSpectrum assemble_spectrum(const LatticeBasis& basis, const TubeGeometry& geometry,
                                      const RightBoundary& right_bc, double a, double b,
                                      const SolverConfig& cfg = {}, int jobs = 1,
                                      std::optional<double> truncation_bound = std::nullopt) {
  const Selection sel = Selection::window(a, b);
  const double bound = truncation_bound.value_or(b);
  if (bound < b) throw BadConfig("truncation bound below the window top would drop eigenvalues");
  const double R = geometry.radius;
  const std::vector<ModeValue> modes = enumerate_modes(basis, R, std::max(bound, 0.0));

  std::vector<EigenList> per_mode(modes.size());
  parallel_for(modes.size(), jobs, [&](std::size_t i) {
    per_mode[i] = solve(ModePotential{modes[i].mode, R}, right_bc, sel, cfg);
  });

  TubeSpectrum out{basis, geometry, right_bc, a, b, bound, modes.size(), {}};
  for (std::size_t i = 0; i < modes.size(); ++i)
    for (std::size_t j = 0; j < per_mode[i].values.size(); ++j)
      out.entries.push_back({per_mode[i].values[j], modes[i].mode, per_mode[i].error_estimates[j]});
  std::stable_sort(out.entries.begin(), out.entries.end(), [](const SpectrumEntry& x, const SpectrumEntry& y) {
    if (x.eigenvalue != y.eigenvalue) return x.eigenvalue < y.eigenvalue;
    return x.mode.index < y.mode.index;
  });
  return out;
}

/// Lowest k tube eigenvalues. Grows the energy window until the k-th value is
/// enclosed, so every contributing mode is included.
inline std::vector<SpectrumEntry> lowest_tube_eigenvalues(const LatticeBasis& basis, const TubeGeometry& geometry,
                                                          const RightBoundary& right_bc, int k,
                                                          const SolverConfig& cfg = {}, int jobs = 1) {
  if (k <= 0) throw BadConfig("eigenvalue count must be positive");
  double top = 4.0;
  for (int attempt = 0; attempt < 60; ++attempt, top *= 2.0) {
    const TubeSpectrum s = assemble_spectrum(basis, geometry, right_bc, -1.0, top, cfg, jobs);
    if (static_cast<int>(s.entries.size()) >= k)
      return {s.entries.begin(), s.entries.begin() + k};
  }
  throw NoConvergence("could not enclose the requested number of eigenvalues");
}

struct WindowCount {
  int strict = 0;     ///< a <= lambda <= b up to round-off
  int tolerant = 0;   ///< [lambda - err, lambda + err] meets [a, b]
};

inline WindowCount counting_function(const TubeSpectrum& spectrum, double a, double b) {
  if (!(a <= b)) throw BadConfig("window [a, b] needs a <= b");
  const double ta = 1e-12 * std::max(1.0, std::abs(a));
  const double tb = 1e-12 * std::max(1.0, std::abs(b));
  if (a < spectrum.window_a - ta || b > spectrum.window_b + tb)
    throw WindowNotCovered("count window exceeds the assembled window");
  WindowCount c;
  for (const SpectrumEntry& e : spectrum.entries) {
    if (e.eigenvalue >= a - ta && e.eigenvalue <= b + tb) ++c.strict;
    if (e.eigenvalue + e.error_estimate >= a - ta && e.eigenvalue - e.error_estimate <= b + tb) ++c.tolerant;
  }
  return c;
}

struct FamilyMember {
  LatticeBasis basis;
  TubeGeometry geometry;
};

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_error = 0.0;  ///< standard error of the slope (0 for two points)
  std::vector<double> residuals;
};

inline LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw InvalidArgument("a line fit needs at least two points");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw InvalidArgument("fit abscissae are all equal");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ssr = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    f.residuals.push_back(y[i] - (f.intercept + f.slope * x[i]));
    ssr += f.residuals.back() * f.residuals.back();
  }
  if (n > 2) f.slope_error = std::sqrt(ssr / static_cast<double>(n - 2) / sxx);
  return f;
}

struct CountingRow {
  double radius = 0.0;
  double covolume = 0.0;
  double boundary_area = 0.0;
  int count = 0;
  int count_tolerant = 0;
  double reference = 0.0;  ///< x R / pi
};

struct CountingReport {
  double x = 0.0;
  double window_a = 0.0;
  double window_b = 0.0;
  std::string right_bc;
  std::string source;
  std::vector<CountingRow> rows;
  LinearFit fit_radius;
  double reference_slope_radius = 0.0;   ///< x / pi
  std::vector<double> law_residuals;     ///< N - x R / pi
  std::optional<LinearFit> fit_log_area;  ///< N against log(1 / covolume)
  double reference_slope_log_area = 0.0;  ///< x / (2 pi)
};

/// Counts from the tube, or from the comparison operator -d^2 + 1 with
/// Dirichlet ends on (0, R).
enum class CountingSource { Tube, ModelOperator };

/// Eigenvalue counts in [1, 1 + x^2] across a family of tubes and the
/// least-squares slope against the radius.
inline CountingReport clustering_scan(const std::vector<FamilyMember>& family, double x, const RightBoundary& right_bc,
                                      const SolverConfig& cfg = {}, int jobs = 1,
                                      CountingSource source = CountingSource::Tube) {
  if (!(x > 0.0)) throw InvalidArgument("x must be positive");
  if (family.size() < 2) throw InvalidArgument("a clustering scan needs at least two members");
  for (std::size_t i = 1; i < family.size(); ++i)
    if (!(family[i].geometry.radius > family[i - 1].geometry.radius))
      throw InvalidArgument("family must be sorted by increasing radius");

  CountingReport rep;
  rep.x = x;
  rep.window_a = 1.0;
  rep.window_b = 1.0 + x * x;
  rep.right_bc = source == CountingSource::Tube ? to_string(right_bc.kind) : "dirichlet";
  rep.source = source == CountingSource::Tube ? "tube" : "model_operator";
  rep.reference_slope_radius = x / std::numbers::pi;
  rep.rows.resize(family.size());

  parallel_for(family.size(), jobs, [&](std::size_t i) {
    const FamilyMember& m = family[i];
    CountingRow row;
    row.radius = m.geometry.radius;
    row.covolume = m.geometry.base_covolume;
    row.boundary_area = m.geometry.boundary_area;
    row.reference = x * row.radius / std::numbers::pi;
    if (source == CountingSource::Tube) {
      const TubeSpectrum s = assemble_spectrum(m.basis, m.geometry, right_bc, rep.window_a, rep.window_b, cfg);
      const WindowCount c = counting_function(s, rep.window_a, rep.window_b);
      row.count = c.strict;
      row.count_tolerant = c.tolerant;
    } else {
      const auto model = RadialProblem::schrodinger([](double) { return 1.0; }, row.radius,
                                                    {LeftBoundary::friedrichs(), RightBoundary::dirichlet()});
      const EigenList e = solve(model, Selection::window(rep.window_a, rep.window_b), cfg);
      row.count = static_cast<int>(e.values.size());
      row.count_tolerant = row.count;
    }
    rep.rows[i] = row;
  });

  std::vector<double> xs, ys;
  for (const CountingRow& r : rep.rows) {
    xs.push_back(r.radius);
    ys.push_back(static_cast<double>(r.count));
    rep.law_residuals.push_back(static_cast<double>(r.count) - r.reference);
  }
  rep.fit_radius = least_squares(xs, ys);
  return rep;
}

// ---------------------------------------------------------------------------
// Tube functions given by finitely many Fourier modes.

/// One Fourier component F(r) Psi_lambda of a tube function, with Psi_lambda
/// normalized on the base torus.
struct ModeComponent {
  DualMode mode;
  RadialFunction profile;
};

using TubeFunction = std::vector<ModeComponent>;

namespace detail {

inline double volume_weight(double r) { return 0.5 * std::sinh(2.0 * r); }

inline double transverse_weight(const DualMode& mode, double r) {
  return mode.is_zero() ? 0.0 : cross_section_eigenvalue(mode.lambda, r);
}

inline std::size_t element_of(const RadialFunction& fn, double r) {
  const auto it = std::upper_bound(fn.r.begin(), fn.r.end(), r);
  std::size_t e = it == fn.r.begin() ? 0 : static_cast<std::size_t>(it - fn.r.begin()) - 1;
  return std::min(e, fn.r.size() - 2);
}

inline double interpolate(const RadialFunction& fn, double r) {
  const std::size_t e = element_of(fn, r);
  const double t = (r - fn.r[e]) / (fn.r[e + 1] - fn.r[e]);
  return (1.0 - t) * fn.f[e] + t * fn.f[e + 1];
}

struct LocalValue {
  double value = 0.0;
  double slope = 0.0;
};

/// Cubic through the four nodes around the element containing r (fewer near
/// short meshes). Value and slope inherit the accuracy of the nodal values,
/// unlike the piecewise-linear slope.
inline LocalValue local_cubic(const RadialFunction& fn, double r) {
  const std::size_t n = fn.r.size();
  const std::size_t m = std::min<std::size_t>(4, n);
  const std::size_t e = element_of(fn, r);
  std::size_t i0 = e > 0 ? e - 1 : 0;
  i0 = std::min(i0, n - m);
  LocalValue out;
  for (std::size_t i = i0; i < i0 + m; ++i) {
    double li = 1.0, dli = 0.0;
    for (std::size_t k = i0; k < i0 + m; ++k) {
      if (k == i) continue;
      const double den = fn.r[i] - fn.r[k];
      dli = dli * (r - fn.r[k]) / den + li / den;
      li *= (r - fn.r[k]) / den;
    }
    out.value += fn.f[i] * li;
    out.slope += fn.f[i] * dli;
  }
  return out;
}

inline double recovered_slope(const RadialFunction& fn, double r) { return local_cubic(fn, r).slope; }

struct RadialIntegrals {
  double gradient = 0.0;  ///< int (F'^2 + mu F^2) w
  double mass = 0.0;      ///< int F^2 w
};

/// Integrals of one component over [lo, hi] with four-point Gauss rules on
/// the pieces of each element inside the interval.
inline RadialIntegrals integrate_component(const ModeComponent& c, double lo, double hi) {
  const RadialFunction& fn = c.profile;
  RadialIntegrals out;
  lo = std::max(lo, fn.r.front());
  hi = std::min(hi, fn.r.back());
  if (!(hi > lo)) return out;
  for (std::size_t e = element_of(fn, lo); e + 1 < fn.r.size() && fn.r[e] < hi; ++e) {
    const double x0 = fn.r[e], x1 = fn.r[e + 1];
    const double a = std::max(x0, lo), b = std::min(x1, hi);
    if (!(b > a)) continue;
    const double slope = (fn.f[e + 1] - fn.f[e]) / (x1 - x0);
    for (std::size_t q = 0; q < gauss_x.size(); ++q) {
      const double r = a + gauss_x[q] * (b - a);
      const double wq = gauss_w[q] * (b - a);
      const double f = fn.f[e] + slope * (r - x0);
      const double w = volume_weight(r);
      out.gradient += wq * (slope * slope + transverse_weight(c.mode, r) * f * f) * w;
      out.mass += wq * f * f * w;
    }
  }
  return out;
}

/// Sum over components of (|F'|^2 + mu F^2 + F^2) w at radius r: the H^1
/// density integrated over the cross-section torus at r.
inline double boundary_density(const TubeFunction& fn, double r) {
  double s = 0.0;
  for (const ModeComponent& c : fn) {
    if (r < c.profile.r.front() || r > c.profile.r.back()) continue;
    const double f = interpolate(c.profile, r);
    const double d = recovered_slope(c.profile, r);
    s += (d * d + (transverse_weight(c.mode, r) + 1.0) * f * f) * volume_weight(r);
  }
  return s;
}

}  // namespace detail

struct TubeNorms {
  double l2 = 0.0;        ///< |f|^2
  double gradient = 0.0;  ///< |df|^2
};

inline TubeNorms tube_norms(const TubeFunction& fn, double lo = 0.0,
                            double hi = std::numeric_limits<double>::infinity()) {
  TubeNorms n;
  for (const ModeComponent& c : fn) {
    const auto v = detail::integrate_component(c, lo, hi);
    n.l2 += v.mass;
    n.gradient += v.gradient;
  }
  return n;
}

/// Residual of the Green identity on T^2_(0, r_cut) for a mode eigenpair:
/// |int |df|^2 - lambda int |f|^2 - int_{T^2_r} f d_r f|. Every term uses the
/// local cubic through the nodal values, so the residual tracks the accuracy
/// of the eigenvector itself rather than where the cut falls in an element.
inline double greens_residual(const ModeComponent& eigenfunction, double eigenvalue, double r_cut) {
  const RadialFunction& fn = eigenfunction.profile;
  if (!(r_cut > fn.r.front() && r_cut < fn.r.back())) throw InvalidArgument("cut radius must lie inside the tube");
  double energy = 0.0;
  for (std::size_t e = 0; e + 1 < fn.r.size() && fn.r[e] < r_cut; ++e) {
    const double a = fn.r[e], b = std::min(fn.r[e + 1], r_cut);
    for (std::size_t q = 0; q < detail::gauss_x.size(); ++q) {
      const double r = a + detail::gauss_x[q] * (b - a);
      const detail::LocalValue v = detail::local_cubic(fn, r);
      const double mu = detail::transverse_weight(eigenfunction.mode, r) - eigenvalue;
      energy += detail::gauss_w[q] * (b - a) * (v.slope * v.slope + mu * v.value * v.value) * detail::volume_weight(r);
    }
  }
  const detail::LocalValue at = detail::local_cubic(fn, r_cut);
  return std::abs(energy - detail::volume_weight(r_cut) * at.value * at.slope);
}

/// |dh|^2 / |h|^2 for a tube function supported away from both tube ends.
inline double poincare_check(const TubeFunction& h) {
  double num = 0.0, den = 0.0;
  for (const ModeComponent& c : h) {
    const RadialFunction& fn = c.profile;
    if (fn.r.size() != fn.f.size() || fn.r.size() < 2) throw InvalidArgument("malformed profile");
    if (fn.f.front() != 0.0 || fn.f.back() != 0.0)
      throw InvalidArgument("test function must vanish at both ends of its support");
    if (!(fn.r.front() > 0.0)) throw InvalidArgument("support must stay away from r = 0");
    const auto v = detail::integrate_component(c, fn.r.front(), fn.r.back());
    num += v.gradient;
    den += v.mass;
  }
  if (!(den > 0.0)) throw ZeroFunction("Poincare quotient of the zero function");
  return num / den;
}

struct GroundState {
  double eigenvalue = 0.0;
  TubeFunction function;  ///< normalized, |f|^2 = 1
};

/// Lowest eigenpair of the zero mode on a tube of radius R; with the natural
/// condition this is the near-constant function with eigenvalue near 0.
inline GroundState zero_mode_ground_state(double R, const RightBoundary& right_bc, SolverConfig cfg = {}) {
  cfg.want_vectors = true;
  const DualMode zero{};
  const EigenList e = solve(ModePotential{zero, R}, right_bc, Selection::lowest(1), cfg);
  GroundState out;
  out.eigenvalue = e.values.at(0);
  ModeComponent c{zero, e.vectors.at(0)};
  if (c.profile.f[c.profile.f.size() / 2] < 0.0)
    for (double& v : c.profile.f) v = -v;
  const double norm = std::sqrt(detail::integrate_component(c, 0.0, R).mass);
  if (!(norm > 0.0)) throw ZeroFunction("eigenvector vanished");
  for (double& v : c.profile.f) v /= norm;
  out.function.push_back(std::move(c));
  return out;
}

struct SlabReport {
  double r = 0.0;
  double slab_mass = 0.0;        ///< |f|^2_{H^1} over (r - 1, r]
  double boundary_mass = 0.0;    ///< int over T^2_r of |f|^2 + |df|^2
  double slab_bound = 0.0;       ///< 2 (1 + Lambda) / (c - 4)
  double inner_mass = 0.0;       ///< |f|^2_{H^1} over (0, r]
  double inner_bound = 0.0;      ///< 40 / ((1 - Lambda)(c - 4))
  std::size_t candidates = 0;
};

/// Searches the mesh radii in [rho + 2, rho + c] for a slab where both the
/// slab H^1 mass and the boundary integral are small.
inline SlabReport slab_localization(const TubeFunction& f, double R, double rho, double c, double threshold) {
  if (!(c > 4.0)) throw InvalidArgument("slab search needs c > 4");
  if (!(threshold > 0.0 && threshold < 1.0)) throw InvalidArgument("spectral threshold must lie in (0, 1)");
  if (!(rho >= 0.0)) throw InvalidArgument("rho must be nonnegative");
  if (R < rho + c) throw TubeTooShort("tube radius " + std::to_string(R) + " < rho + c");
  const TubeNorms total = tube_norms(f);
  if (std::abs(total.l2 - 1.0) > 1e-6) throw NotNormalized("|f|^2 = " + std::to_string(total.l2));
  if (!(total.gradient < threshold)) throw InvalidArgument("|df|^2 must be below the spectral threshold");

  std::vector<double> radii;
  for (const ModeComponent& comp : f)
    for (double r : comp.profile.r)
      if (r >= rho + 2.0 && r <= rho + c) radii.push_back(r);
  radii.push_back(rho + 2.0);
  radii.push_back(rho + c);
  std::sort(radii.begin(), radii.end());
  radii.erase(std::unique(radii.begin(), radii.end()), radii.end());

  SlabReport best;
  best.slab_bound = 2.0 * (1.0 + threshold) / (c - 4.0);
  best.inner_bound = 40.0 / ((1.0 - threshold) * (c - 4.0));
  best.candidates = radii.size();
  double best_score = std::numeric_limits<double>::infinity();
  for (double r : radii) {
    const TubeNorms slab = tube_norms(f, r - 1.0, r);
    const double slab_mass = slab.l2 + slab.gradient;
    const double boundary = detail::boundary_density(f, r);
    const double score = std::max(slab_mass, boundary);
    if (score < best_score) {
      best_score = score;
      best.r = r;
      best.slab_mass = slab_mass;
      best.boundary_mass = boundary;
    }
  }
  const TubeNorms inner = tube_norms(f, 0.0, best.r);
  best.inner_mass = inner.l2 + inner.gradient;
  return best;
}

}  // namespace tubespec
