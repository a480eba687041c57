// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the tubespec authors

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#if defined(TUBESPEC_HAVE_CHOLMOD)
#include <Eigen/CholmodSupport>
#endif

#include "tubespec/errors.hpp"

namespace tubespec {

using SparseMatrix = Eigen::SparseMatrix<double>;

namespace detail {
#if defined(TUBESPEC_HAVE_CHOLMOD)
using PositiveFactor = Eigen::CholmodSupernodalLLT<SparseMatrix>;
#else
using PositiveFactor = Eigen::SimplicialLDLT<SparseMatrix>;
#endif
}  // namespace detail

struct LanczosOptions {
  double shift = -1.0;          ///< sigma; must lie below the wanted eigenvalues
  int krylov_dim = 0;           ///< 0 picks max(3k, 40)
  double tol = 1e-11;           ///< relative Ritz residual for locking
  int max_restarts = 60;
  std::uint64_t seed = 20261015;
};

struct GeneralizedEigenResult {
  std::vector<double> values;
  std::vector<double> residuals;  ///< |K u - lambda M u| / |M u|
  Eigen::MatrixXd vectors;        ///< M-orthonormal columns
  int restarts = 0;
  int operator_applications = 0;
};

/// Lowest k eigenpairs of K u = lambda M u (K symmetric, M symmetric positive
/// definite) by shift-invert Lanczos in the M inner product. Converged Ritz
/// pairs are locked and the iteration restarts in their M-orthogonal
/// complement, which also recovers repeated eigenvalues; it stops once a fresh
/// start finds nothing below the k-th locked value.
inline GeneralizedEigenResult lowest_generalized_eigenpairs(const SparseMatrix& K, const SparseMatrix& M, int k,
                                                            const LanczosOptions& opt = {}) {
  const Eigen::Index n = K.rows();
  if (K.cols() != n || M.rows() != n || M.cols() != n) throw InvalidArgument("matrix sizes differ");
  if (k <= 0 || k >= n) throw InvalidArgument("need 0 < k < matrix dimension");

  const SparseMatrix shifted = K - opt.shift * M;
  detail::PositiveFactor factor(shifted);
  if (factor.info() != Eigen::Success)
    throw IterationFailure("factorization of K - sigma M failed (shift not below the spectrum?)");
#if !defined(TUBESPEC_HAVE_CHOLMOD)
  for (Eigen::Index i = 0; i < n; ++i)
    if (!(factor.vectorD()(i) > 0.0)) throw IterationFailure("shift is not below the spectrum (indefinite K - sigma M)");
#endif

  const int m = std::min<int>(static_cast<int>(n) - 1, opt.krylov_dim > 0 ? opt.krylov_dim : std::max(3 * k, 40));
  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  Eigen::MatrixXd locked(n, 0);
  Eigen::MatrixXd locked_m(n, 0);  // M * locked
  std::vector<double> locked_values;
  GeneralizedEigenResult out;

  auto orthogonalize = [&](Eigen::VectorXd& w, const Eigen::MatrixXd& basis, const Eigen::MatrixXd& mbasis,
                           Eigen::Index cols) -> Eigen::VectorXd {
    Eigen::VectorXd total = Eigen::VectorXd::Zero(cols);
    for (int pass = 0; pass < 2; ++pass) {
      if (cols == 0) break;
      const Eigen::VectorXd h = mbasis.leftCols(cols).transpose() * w;
      w.noalias() -= basis.leftCols(cols) * h;
      total += h;
    }
    return total;
  };

  for (int restart = 0; restart < opt.max_restarts; ++restart) {
    out.restarts = restart + 1;
    Eigen::MatrixXd V(n, m + 1);
    Eigen::MatrixXd MV(n, m + 1);
    std::vector<double> alpha, beta;

    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = gauss(rng);
    orthogonalize(v, locked, locked_m, locked.cols());
    Eigen::VectorXd mv = M * v;
    double nrm = std::sqrt(v.dot(mv));
    V.col(0) = v / nrm;
    MV.col(0) = mv / nrm;

    int steps = 0;
    for (int j = 0; j < m; ++j) {
      Eigen::VectorXd w = factor.solve(MV.col(j));
      ++out.operator_applications;
      orthogonalize(w, locked, locked_m, locked.cols());
      const Eigen::VectorXd h = orthogonalize(w, V, MV, j + 1);
      orthogonalize(w, locked, locked_m, locked.cols());
      alpha.push_back(h(j));
      Eigen::VectorXd mw = M * w;
      const double b = std::sqrt(std::max(0.0, w.dot(mw)));
      beta.push_back(b);
      steps = j + 1;
      if (b <= 1e-14 * std::abs(h(j))) break;
      V.col(j + 1) = w / b;
      MV.col(j + 1) = mw / b;
    }

    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(steps, steps);
    for (int j = 0; j < steps; ++j) {
      T(j, j) = alpha[static_cast<std::size_t>(j)];
      if (j + 1 < steps) T(j, j + 1) = T(j + 1, j) = beta[static_cast<std::size_t>(j)];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
    const Eigen::VectorXd theta = es.eigenvalues();
    const Eigen::MatrixXd S = es.eigenvectors();
    const double last_beta = beta.back();

    std::vector<int> converged;
    for (int i = steps - 1; i >= 0; --i) {
      const double th = theta(i);
      if (!(th > 0.0)) continue;
      const double res = std::abs(last_beta * S(steps - 1, i));
      if (res <= opt.tol * th) converged.push_back(i);
    }
    if (converged.empty()) continue;

    // Smallest eigenvalue reached by this start, i.e. the dominant Ritz value.
    const double fresh = opt.shift + 1.0 / theta(converged.front());
    if (static_cast<int>(locked_values.size()) >= k) {
      std::vector<double> sorted = locked_values;
      std::sort(sorted.begin(), sorted.end());
      const double kth = sorted[static_cast<std::size_t>(k - 1)];
      if (fresh >= kth - 1e-10 * std::max(1.0, std::abs(kth))) break;
    }

    const Eigen::Index old = locked.cols();
    locked.conservativeResize(n, old + static_cast<Eigen::Index>(converged.size()));
    locked_m.conservativeResize(n, old + static_cast<Eigen::Index>(converged.size()));
    for (std::size_t c = 0; c < converged.size(); ++c) {
      Eigen::VectorXd u = V.leftCols(steps) * S.col(converged[c]);
      orthogonalize(u, locked, locked_m, old + static_cast<Eigen::Index>(c));
      Eigen::VectorXd mu = M * u;
      const double un = std::sqrt(u.dot(mu));
      u /= un;
      mu /= un;
      locked.col(old + static_cast<Eigen::Index>(c)) = u;
      locked_m.col(old + static_cast<Eigen::Index>(c)) = mu;
      locked_values.push_back(u.dot(K * u));
    }
    if (restart + 1 == opt.max_restarts)
      throw IterationFailure("Lanczos did not confirm the lowest " + std::to_string(k) + " eigenvalues after " +
                             std::to_string(opt.max_restarts) + " restarts (" + std::to_string(locked_values.size()) +
                             " locked)");
  }
  if (static_cast<int>(locked_values.size()) < k)
    throw IterationFailure("Lanczos locked only " + std::to_string(locked_values.size()) + " of " + std::to_string(k) +
                           " eigenpairs");

  // Polish the locked block: subspace iteration with the shift-invert
  // operator followed by Rayleigh-Ritz in (K, M).
  for (int sweep = 0; sweep < 2; ++sweep) {
    const Eigen::Index c = locked.cols();
    Eigen::MatrixXd Y(n, c);
    for (Eigen::Index j = 0; j < c; ++j) Y.col(j) = factor.solve(locked_m.col(j));
    out.operator_applications += static_cast<int>(c);
    const Eigen::MatrixXd KY = K * Y;
    const Eigen::MatrixXd MY = M * Y;
    Eigen::MatrixXd kp = Y.transpose() * KY;
    Eigen::MatrixXd mp = Y.transpose() * MY;
    kp = 0.5 * (kp + kp.transpose()).eval();
    mp = 0.5 * (mp + mp.transpose()).eval();
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> small(kp, mp);
    if (small.info() != Eigen::Success) break;
    locked = Y * small.eigenvectors();
    locked_m = MY * small.eigenvectors();
    for (Eigen::Index j = 0; j < c; ++j) locked_values[static_cast<std::size_t>(j)] = small.eigenvalues()(j);
  }

  std::vector<int> order(locked_values.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return locked_values[a] < locked_values[b]; });
  out.vectors.resize(n, k);
  for (int i = 0; i < k; ++i) {
    const int idx = order[static_cast<std::size_t>(i)];
    const Eigen::VectorXd u = locked.col(idx);
    const double lam = locked_values[static_cast<std::size_t>(idx)];
    const Eigen::VectorXd mu = locked_m.col(idx);
    out.values.push_back(lam);
    out.residuals.push_back((K * u - lam * mu).norm() / mu.norm());
    out.vectors.col(i) = u;
  }
  return out;
}

}  // namespace tubespec
