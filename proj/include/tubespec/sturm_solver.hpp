// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the tubespec authors

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tubespec/errors.hpp"
#include "tubespec/lattice_geometry.hpp"
#include "tubespec/mode_potentials.hpp"

namespace tubespec {

enum class LeftKind { Friedrichs, DirichletAt, NaturalAt };
enum class RightKind { Dirichlet, Robin, Natural };

struct LeftBoundary {
  LeftKind kind = LeftKind::Friedrichs;
  double eps = 0.0;

  static LeftBoundary friedrichs() { return {LeftKind::Friedrichs, 0.0}; }
  static LeftBoundary dirichlet_at(double eps) { return {LeftKind::DirichletAt, eps}; }
  static LeftBoundary natural_at(double eps) { return {LeftKind::NaturalAt, eps}; }
};

/// Condition at r = R. Natural is the condition coming from the quadratic
/// form on functions free at R; for mode problems it equals Robin(coth 2R).
struct RightBoundary {
  RightKind kind = RightKind::Dirichlet;
  double kappa = 0.0;

  static RightBoundary dirichlet() { return {RightKind::Dirichlet, 0.0}; }
  static RightBoundary robin(double kappa) { return {RightKind::Robin, kappa}; }
  static RightBoundary natural() { return {RightKind::Natural, 0.0}; }
};

struct BoundarySpec {
  LeftBoundary left;
  RightBoundary right;
};

inline const char* to_string(RightKind k) {
  switch (k) {
    case RightKind::Dirichlet: return "dirichlet";
    case RightKind::Robin: return "robin";
    case RightKind::Natural: return "natural";
  }
  return "?";
}

inline const char* to_string(LeftKind k) {
  switch (k) {
    case LeftKind::Friedrichs: return "friedrichs";
    case LeftKind::DirichletAt: return "dirichlet_at";
    case LeftKind::NaturalAt: return "natural_at";
  }
  return "?";
}

struct SolverConfig {
  int n = 64;                  ///< elements on the coarsest mesh
  double gamma = 2.0;          ///< grading exponent toward the left end
  double tol_eig = 1e-8;       ///< absolute below 10, relative to |lambda|/10 above
  int max_refinements = 10;    ///< mesh doublings
  double mass_blend = 1.0;     ///< 1 = Gauss (consistent), 0 = nodal (lumped) quadrature
  double eps0 = 0.0;           ///< first truncation radius for diagnostics; 0 picks min(0.1, R/8)
  int max_eps_halvings = 40;
  bool want_vectors = false;

  void validate() const {
    if (n < 16) throw BadConfig("mesh size must be at least 16");
    if (!(gamma >= 1.0)) throw BadConfig("grading exponent must be >= 1");
    if (!(tol_eig > 0.0)) throw BadConfig("tolerance must be positive");
    if (max_refinements < 2 || max_refinements > 16) throw BadConfig("max_refinements must be in [2, 16]");
    if (!(mass_blend >= 0.0 && mass_blend <= 1.0)) throw BadConfig("mass_blend must be in [0, 1]");
  }
};

/// Which eigenvalues to compute.
struct Selection {
  bool by_count = false;
  int k = 0;
  double a = 0.0;
  double b = 0.0;

  static Selection lowest(int k) { return {true, k, 0.0, 0.0}; }
  static Selection window(double a, double b) {
    if (!(a <= b)) throw BadConfig("window [a, b] needs a <= b");
    if (!std::isfinite(a) || !std::isfinite(b)) throw BadConfig("window must be bounded");
    return {false, 0, a, b};
  }
};

/// Nodal samples of a radial profile; values at pinned nodes are zero.
struct RadialFunction {
  std::vector<double> r;
  std::vector<double> f;
};

struct MeshDescriptor {
  int n = 0;
  double gamma = 0.0;
  double left = 0.0;
  double right = 0.0;
  double mass_blend = 1.0;
  int levels = 0;
};

struct EigenList {
  std::vector<double> values;
  std::vector<double> error_estimates;
  std::vector<double> raw_values;  ///< finest-mesh values before extrapolation
  std::vector<RadialFunction> vectors;
  MeshDescriptor mesh;
  double epsilon_used = 0.0;
};

/// Symmetric tridiagonal pencil (K, M) on the free nodes of a mesh.
struct TridiagonalPencil {
  std::vector<double> kd, ke, md, me;
  std::vector<int> node_of;  ///< mesh node index of each unknown
  std::vector<double> nodes;

  std::size_t size() const { return kd.size(); }
};

namespace detail {

inline constexpr std::array<double, 4> gauss_x{0.0694318442029737, 0.3300094782075719, 0.6699905217924281,
                                               0.9305681557970263};
inline constexpr std::array<double, 4> gauss_w{0.1739274225687269, 0.3260725774312731, 0.3260725774312731,
                                               0.1739274225687269};

/// Number of eigenvalues of the pencil strictly below sigma.
inline int count_below(const TridiagonalPencil& p, double sigma) {
  const std::size_t n = p.size();
  int neg = 0;
  double d = 0.0;
  const double tiny = std::numeric_limits<double>::min() * 1e10;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = p.kd[i] - sigma * p.md[i];
    if (i == 0) {
      d = a;
    } else {
      const double b = p.ke[i - 1] - sigma * p.me[i - 1];
      d = a - b * b / d;
    }
    if (d == 0.0) d = -tiny;
    if (d < 0.0) ++neg;
  }
  return neg;
}

/// j-th (0-based) eigenvalue by bisection on the Sturm count.
inline double bisect_eigenvalue(const TridiagonalPencil& p, int j, double lo, double hi) {
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(mid))) break;
    if (count_below(p, mid) > j)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

/// Brackets containing all eigenvalues with index < k.
inline std::pair<double, double> spectral_brackets(const TridiagonalPencil& p, int k) {
  double lo = -1.0;
  while (count_below(p, lo) > 0) {
    lo *= 2.0;
    if (lo < -1e300) throw NoConvergence("pencil unbounded below");
  }
  double hi = 1.0;
  while (count_below(p, hi) < k) {
    hi *= 2.0;
    if (hi > 1e300) throw NoConvergence("too few eigenvalues in pencil");
  }
  return {lo, hi};
}

/// Solves a general tridiagonal system by Gaussian elimination with partial
/// pivoting; dl, d, du are the sub-, main and super-diagonals. rhs is
/// overwritten by the solution.
inline void tridiagonal_solve(std::vector<double> dl, std::vector<double> d, std::vector<double> du,
                              std::vector<double>& rhs) {
  const std::size_t n = d.size();
  if (n == 0) return;
  const double tiny = std::numeric_limits<double>::min() * 1e10;
  if (n == 1) {
    rhs[0] /= d[0] != 0.0 ? d[0] : tiny;
    return;
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (std::abs(d[i]) >= std::abs(dl[i])) {
      if (d[i] == 0.0) d[i] = tiny;
      const double fact = dl[i] / d[i];
      d[i + 1] -= fact * du[i];
      rhs[i + 1] -= fact * rhs[i];
      dl[i] = 0.0;
    } else {
      const double fact = d[i] / dl[i];
      d[i] = dl[i];
      const double temp = d[i + 1];
      d[i + 1] = du[i] - fact * temp;
      if (i + 2 < n) {
        dl[i] = du[i + 1];  // fill-in, second superdiagonal
        du[i + 1] = -fact * dl[i];
      } else {
        dl[i] = 0.0;
      }
      du[i] = temp;
      const double b = rhs[i];
      rhs[i] = rhs[i + 1];
      rhs[i + 1] = b - fact * rhs[i + 1];
    }
  }
  if (d[n - 1] == 0.0) d[n - 1] = tiny;
  rhs[n - 1] /= d[n - 1];
  rhs[n - 2] = (rhs[n - 2] - du[n - 2] * rhs[n - 1]) / d[n - 2];
  for (std::size_t i = n - 2; i-- > 0;) rhs[i] = (rhs[i] - du[i] * rhs[i + 1] - dl[i] * rhs[i + 2]) / d[i];
}

inline std::vector<double> pencil_apply_mass(const TridiagonalPencil& p, const std::vector<double>& x) {
  const std::size_t n = p.size();
  std::vector<double> y(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = p.md[i] * x[i];
    if (i > 0) y[i] += p.me[i - 1] * x[i - 1];
    if (i + 1 < n) y[i] += p.me[i] * x[i + 1];
  }
  return y;
}

/// M-normalized eigenvector for the eigenvalue lambda by inverse iteration.
inline std::vector<double> inverse_iteration(const TridiagonalPencil& p, double lambda) {
  const std::size_t n = p.size();
  const double shift = lambda - 1e-9 * std::max(1.0, std::abs(lambda));
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = 1.0 + 0.1 * std::sin(1.7 * static_cast<double>(i) + 0.3);
  std::vector<double> sub(n > 0 ? n - 1 : 0), sup(n > 0 ? n - 1 : 0), diag(n);
  for (std::size_t i = 0; i < n; ++i) diag[i] = p.kd[i] - shift * p.md[i];
  for (std::size_t i = 0; i + 1 < n; ++i) sub[i] = sup[i] = p.ke[i] - shift * p.me[i];
  for (int it = 0; it < 4; ++it) {
    std::vector<double> rhs = pencil_apply_mass(p, x);
    tridiagonal_solve(sub, diag, sup, rhs);
    const std::vector<double> mx = pencil_apply_mass(p, rhs);
    double nrm = 0.0;
    for (std::size_t i = 0; i < n; ++i) nrm += rhs[i] * mx[i];
    nrm = std::sqrt(nrm);
    for (std::size_t i = 0; i < n; ++i) x[i] = rhs[i] / nrm;
  }
  std::size_t imax = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (std::abs(x[i]) > std::abs(x[imax])) imax = i;
  if (x[imax] < 0.0)
    for (double& v : x) v = -v;
  return x;
}

}  // namespace detail

/// A one-dimensional quadratic-form eigenproblem
///   q(f) = int p f'^2 + s f^2 dr + boundary_term * f(right)^2,  |f|^2 = int m f^2 dr
/// on [left, right], with optional pinned (Dirichlet) ends.
class RadialProblem {
 public:
  using Coefficient = std::function<double(double)>;

  /// Radial operator of one Fourier mode of the tube, in the variable f
  /// with weight sinh r cosh r (the tube function itself).
  static RadialProblem mode(const DualMode& mode, double R, const BoundarySpec& bc) {
    if (!(R > 0.0)) throw NonPositiveRadius("tube radius must be positive");
    RadialProblem p;
    p.R_ = R;
    const double a = two_pi * mode.lambda.x();
    const double b = two_pi * mode.lambda.y();
    const double a2 = mode.is_zero() ? 0.0 : a * a;
    const double b2 = mode.is_zero() ? 0.0 : b * b;
    p.p_ = [](double r) { return 0.5 * std::sinh(2.0 * r); };
    p.m_ = p.p_;
    p.s_ = [a2, b2](double r) {
      double v = 0.0;
      if (a2 != 0.0) v += a2 / std::tanh(r);
      if (b2 != 0.0) v += b2 * std::tanh(r);
      return v;
    };
    p.singular_left_ = a2 != 0.0;
    p.set_left(bc.left, R);
    p.right_pinned_ = bc.right.kind == RightKind::Dirichlet;
    if (bc.right.kind == RightKind::Robin)
      p.boundary_term_ = (1.0 / std::tanh(2.0 * R) - bc.right.kappa) * 0.5 * std::sinh(2.0 * R);
    p.tag_ = mode;
    return p;
  }

  /// -u'' + V u on (0, R], with the left end treated as regular.
  static RadialProblem schrodinger(Coefficient V, double R, const BoundarySpec& bc) {
    if (!(R > 0.0)) throw NonPositiveRadius("interval length must be positive");
    RadialProblem p;
    p.R_ = R;
    p.p_ = [](double) { return 1.0; };
    p.m_ = p.p_;
    p.s_ = std::move(V);
    p.singular_left_ = true;  // a Friedrichs left end is taken as Dirichlet at 0
    p.set_left(bc.left, R);
    p.right_pinned_ = bc.right.kind == RightKind::Dirichlet;
    if (bc.right.kind == RightKind::Robin) p.boundary_term_ = -bc.right.kappa;
    return p;
  }

  double left() const { return left_; }
  double right() const { return R_; }
  bool left_pinned() const { return left_pinned_; }
  bool right_pinned() const { return right_pinned_; }
  double boundary_term() const { return boundary_term_; }
  const std::optional<DualMode>& mode_tag() const { return tag_; }

  double stiffness_weight(double r) const { return p_(r); }
  double potential_weight(double r) const { return s_(r); }
  double mass_weight(double r) const { return m_(r); }

  std::vector<double> mesh(int n, double gamma) const {
    std::vector<double> x(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) x[i] = left_ + (R_ - left_) * std::pow(static_cast<double>(i) / n, gamma);
    x.back() = R_;
    return x;
  }

  /// Element-by-element assembly; blend mixes Gauss and nodal quadrature.
  TridiagonalPencil assemble(const std::vector<double>& x, double blend) const {
    const std::size_t nn = x.size();
    std::vector<double> kd(nn, 0.0), ke(nn - 1, 0.0), md(nn, 0.0), me(nn - 1, 0.0);
    const bool pin0 = left_pinned_;
    const bool pin1 = right_pinned_;
    for (std::size_t e = 0; e + 1 < nn; ++e) {
      const double x0 = x[e];
      const double h = x[e + 1] - x0;
      double k00 = 0, k01 = 0, k11 = 0, m00 = 0, m01 = 0, m11 = 0;
      if (blend > 0.0) {
        for (std::size_t q = 0; q < detail::gauss_x.size(); ++q) {
          const double t = detail::gauss_x[q];
          const double r = x0 + t * h;
          const double wq = blend * detail::gauss_w[q] * h;
          const double pv = p_(r) / (h * h);
          const double sv = s_(r);
          const double mv = m_(r);
          const double n0 = 1.0 - t;
          const double n1 = t;
          k00 += wq * (pv + sv * n0 * n0);
          k01 += wq * (-pv + sv * n0 * n1);
          k11 += wq * (pv + sv * n1 * n1);
          m00 += wq * mv * n0 * n0;
          m01 += wq * mv * n0 * n1;
          m11 += wq * mv * n1 * n1;
        }
      }
      if (blend < 1.0) {
        const double wn = (1.0 - blend) * 0.5 * h;
        const bool skip0 = e == 0 && pin0;
        const bool skip1 = e + 2 == nn && pin1;
        const double pbar = (p_(x0) + p_(x[e + 1])) / (h * h);
        k00 += wn * pbar;
        k11 += wn * pbar;
        k01 -= wn * pbar;
        if (!skip0) {
          k00 += wn * s_(x0);
          m00 += wn * m_(x0);
        }
        if (!skip1) {
          k11 += wn * s_(x[e + 1]);
          m11 += wn * m_(x[e + 1]);
        }
      }
      kd[e] += k00;
      kd[e + 1] += k11;
      ke[e] += k01;
      md[e] += m00;
      md[e + 1] += m11;
      me[e] += m01;
    }
    kd[nn - 1] += pin1 ? 0.0 : boundary_term_;

    TridiagonalPencil out;
    out.nodes = x;
    const std::size_t first = pin0 ? 1 : 0;
    const std::size_t last = pin1 ? nn - 2 : nn - 1;
    if (last < first || last >= nn) throw BadConfig("mesh has no free nodes");
    for (std::size_t i = first; i <= last; ++i) {
      out.kd.push_back(kd[i]);
      out.md.push_back(md[i]);
      out.node_of.push_back(static_cast<int>(i));
      if (i < last) {
        out.ke.push_back(ke[i]);
        out.me.push_back(me[i]);
      }
    }
    for (double v : out.kd)
      if (!std::isfinite(v)) throw BadConfig("non-finite stiffness entry (singular coefficient at a free node)");
    return out;
  }

 private:
  void set_left(const LeftBoundary& lb, double R) {
    switch (lb.kind) {
      case LeftKind::Friedrichs:
        left_ = 0.0;
        left_pinned_ = singular_left_;
        break;
      case LeftKind::DirichletAt:
      case LeftKind::NaturalAt:
        if (!(lb.eps > 0.0) || !(lb.eps < R)) throw BadConfig("truncation radius must lie in (0, R)");
        left_ = lb.eps;
        left_pinned_ = lb.kind == LeftKind::DirichletAt;
        break;
    }
  }

  Coefficient p_, s_, m_;
  double left_ = 0.0;
  double R_ = 0.0;
  bool singular_left_ = false;
  bool left_pinned_ = false;
  bool right_pinned_ = false;
  double boundary_term_ = 0.0;
  std::optional<DualMode> tag_;
};

/// Expands the free-node vector of a pencil to all mesh nodes.
inline RadialFunction expand(const TridiagonalPencil& p, const std::vector<double>& x) {
  RadialFunction out;
  out.r = p.nodes;
  out.f.assign(p.nodes.size(), 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) out.f[static_cast<std::size_t>(p.node_of[i])] = x[i];
  return out;
}

/// Lowest eigenvalues of a single discretization (no extrapolation).
inline std::vector<double> pencil_eigenvalues(const TridiagonalPencil& p, int k) {
  k = std::min<int>(k, static_cast<int>(p.size()));
  std::vector<double> out;
  if (k <= 0) return out;
  const auto [lo, hi] = detail::spectral_brackets(p, k);
  out.reserve(static_cast<std::size_t>(k));
  for (int j = 0; j < k; ++j) out.push_back(detail::bisect_eigenvalue(p, j, lo, hi));
  return out;
}

/// Eigenvalues of a radial problem, Richardson-extrapolated over mesh doublings
/// until consecutive extrapolated values agree to tol_eig.
inline EigenList solve(const RadialProblem& problem, const Selection& sel, const SolverConfig& cfg = {}) {
  cfg.validate();
  if (sel.by_count && sel.k <= 0) throw BadConfig("eigenvalue count must be positive");
  const double margin = sel.by_count ? 0.0 : 0.05 * (1.0 + std::abs(sel.b));

  std::vector<double> prev_raw, prev_ext, ext, raw;
  TridiagonalPencil finest;
  bool converged = false;
  int level = 0;
  std::vector<double> change;
  for (; level <= cfg.max_refinements; ++level) {
    const int n = cfg.n << level;
    TridiagonalPencil p = problem.assemble(problem.mesh(n, cfg.gamma), cfg.mass_blend);
    int want = sel.k;
    if (!sel.by_count) want = detail::count_below(p, sel.b + margin);
    if (level > 0) want = std::max<int>(want, static_cast<int>(prev_raw.size()));
    raw = pencil_eigenvalues(p, want);
    finest = std::move(p);
    if (level > 0) {
      const std::size_t m = std::min(raw.size(), prev_raw.size());
      ext.assign(m, 0.0);
      for (std::size_t j = 0; j < m; ++j) ext[j] = (4.0 * raw[j] - prev_raw[j]) / 3.0;
      if (level > 1) {
        const std::size_t mm = std::min(ext.size(), prev_ext.size());
        change.assign(mm, 0.0);
        bool ok = mm >= (sel.by_count ? static_cast<std::size_t>(sel.k) : 0);
        for (std::size_t j = 0; j < mm; ++j) {
          change[j] = std::abs(ext[j] - prev_ext[j]);
          const bool relevant = sel.by_count || ext[j] <= sel.b + margin;
          if (relevant && change[j] >= cfg.tol_eig * std::max(1.0, std::abs(ext[j]) / 10.0)) ok = false;
        }
        if (!sel.by_count) {
          // Indices beyond the comparable range must lie safely above the window.
          for (std::size_t j = mm; j < ext.size(); ++j)
            if (ext[j] <= sel.b + 0.5 * margin) ok = false;
        }
        if (ok) {
          converged = true;
          break;
        }
      }
      prev_ext = ext;
    }
    prev_raw = raw;
  }
  if (!converged)
    throw NoConvergence("mesh extrapolation did not reach tolerance after " + std::to_string(cfg.max_refinements) +
                        " doublings");

  EigenList out;
  out.mesh = {cfg.n << level, cfg.gamma, problem.left(), problem.right(), cfg.mass_blend, level + 1};
  out.epsilon_used = problem.left();
  const double tie = 1e-12;
  for (std::size_t j = 0; j < change.size(); ++j) {
    const double v = ext[j];
    if (sel.by_count) {
      if (static_cast<int>(j) >= sel.k) break;
    } else if (v < sel.a - tie * std::max(1.0, std::abs(sel.a)) || v > sel.b + tie * std::max(1.0, std::abs(sel.b))) {
      continue;
    }
    out.values.push_back(v);
    out.error_estimates.push_back(change[j]);
    out.raw_values.push_back(raw[j]);
    if (cfg.want_vectors) out.vectors.push_back(expand(finest, detail::inverse_iteration(finest, raw[j])));
  }
  return out;
}

/// Friedrichs-realized mode operator on (0, R].
inline EigenList solve(const ModePotential& potential, const RightBoundary& right, const Selection& sel,
                       const SolverConfig& cfg = {}) {
  return solve(RadialProblem::mode(potential.mode, potential.R, {LeftBoundary::friedrichs(), right}), sel, cfg);
}

/// Number of eigenvalues in [a, b] of the discretization on cfg.n elements,
/// from Sturm counts at the window edges.
inline int count_window(const RadialProblem& problem, double a, double b, const SolverConfig& cfg = {}) {
  cfg.validate();
  if (!(a <= b)) throw BadConfig("window [a, b] needs a <= b");
  const TridiagonalPencil p = problem.assemble(problem.mesh(cfg.n, cfg.gamma), cfg.mass_blend);
  const double above_b = std::nextafter(b, std::numeric_limits<double>::infinity());
  return detail::count_below(p, above_b) - detail::count_below(p, a);
}

struct FormValues {
  double stiffness = 0.0;  ///< q(f)
  double mass = 0.0;       ///< |f|^2
};

/// Quadratic form and mass of a sampled profile, with the solver's quadrature.
inline FormValues form_values(const RadialFunction& fn, const RadialProblem& problem, double mass_blend = 1.0) {
  if (fn.r.size() != fn.f.size() || fn.r.size() < 2) throw InvalidArgument("samples and nodes differ in size");
  if (problem.left_pinned() && fn.f.front() != 0.0) throw InvalidArgument("function must vanish at the left end");
  if (problem.right_pinned() && fn.f.back() != 0.0) throw InvalidArgument("function must vanish at the right end");
  const TridiagonalPencil p = problem.assemble(fn.r, mass_blend);
  std::vector<double> x(p.size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = fn.f[static_cast<std::size_t>(p.node_of[i])];
  FormValues out;
  for (std::size_t i = 0; i < x.size(); ++i) {
    out.stiffness += p.kd[i] * x[i] * x[i];
    if (i + 1 < x.size()) out.stiffness += 2.0 * p.ke[i] * x[i] * x[i + 1];
  }
  const std::vector<double> mx = detail::pencil_apply_mass(p, x);
  for (std::size_t i = 0; i < x.size(); ++i) out.mass += x[i] * mx[i];
  return out;
}

/// Rayleigh quotient q(f)/|f|^2 with the solver's quadrature.
inline double rayleigh_quotient(const RadialFunction& fn, const RadialProblem& problem, double mass_blend = 1.0) {
  const FormValues v = form_values(fn, problem, mass_blend);
  if (!(v.mass > 0.0)) throw ZeroFunction("Rayleigh quotient of the zero function");
  return v.stiffness / v.mass;
}

struct DiscreteEigenpair {
  double value = 0.0;
  RadialFunction vector;
};

/// j-th eigenpair of one fixed discretization with n elements.
inline DiscreteEigenpair discrete_eigenpair(const RadialProblem& problem, int n, int j, double gamma = 2.0,
                                            double mass_blend = 1.0) {
  const TridiagonalPencil p = problem.assemble(problem.mesh(n, gamma), mass_blend);
  const std::vector<double> vals = pencil_eigenvalues(p, j + 1);
  if (static_cast<int>(vals.size()) <= j) throw BadConfig("mesh too small for the requested eigenpair");
  DiscreteEigenpair out;
  out.value = vals[static_cast<std::size_t>(j)];
  out.vector = expand(p, detail::inverse_iteration(p, out.value));
  return out;
}

/// k-th eigenvalue (0-based) of Dirichlet truncations at eps0 * 2^-j, each
/// mesh-converged; used to watch the approach to the Friedrichs value.
inline std::vector<double> truncation_sequence(const DualMode& mode, double R, const RightBoundary& right, int k,
                                               int halvings, const SolverConfig& cfg = {}) {
  const double eps0 = cfg.eps0 > 0.0 ? cfg.eps0 : std::min(0.1, R / 8.0);
  if (!(eps0 < R / 4.0 + 1e-15)) throw BadConfig("eps0 must be below R/4");
  std::vector<double> out;
  double eps = eps0;
  for (int j = 0; j <= std::min(halvings, cfg.max_eps_halvings); ++j, eps *= 0.5) {
    const EigenList e = solve(RadialProblem::mode(mode, R, {LeftBoundary::dirichlet_at(eps), right}),
                              Selection::lowest(k + 1), cfg);
    out.push_back(e.values.at(static_cast<std::size_t>(k)));
  }
  return out;
}

}  // namespace tubespec
