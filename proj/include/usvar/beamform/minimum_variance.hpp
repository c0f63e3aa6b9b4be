/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The usvar Authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <cstddef>
#include <sstream>

#include "usvar/beamform/config.hpp"
#include "usvar/beamform/das.hpp"
#include "usvar/core/types.hpp"

namespace usvar::beamform {

/// Spatially smoothed, diagonally loaded sample covariance.
struct CovarianceEstimate {
  Matrix R;              // [L x L], exactly symmetric
  std::size_t subarray;  // L
  double loading;        // epsilon added to the diagonal
};

/// R0 = 1/((Ne-L+1) Np) sum_l sum_k y_l[k] y_l[k]^T over sliding length-L
/// element windows, then R = R0 + eps I with eps = refCoef * trace(R0) / L.
inline CovarianceEstimate estimate_covariance(const DelayedDataMatrix& data, std::size_t subarray,
                                              double loading_coefficient) {
  const auto ne = data.elements();
  const auto np = data.taps();
  const auto l = static_cast<Eigen::Index>(subarray);
  if (l < 1 || l > ne) throw ConfigError("subarray length must lie in [1, Ne]");
  if (!(loading_coefficient >= 0.0)) throw ConfigError("loading coefficient must be non-negative");

  const Eigen::Index windows = ne - l + 1;
  Matrix r0 = Matrix::Zero(l, l);
  for (Eigen::Index k = 0; k < np; ++k) {
    for (Eigen::Index s = 0; s < windows; ++s) {
      r0.selfadjointView<Eigen::Lower>().rankUpdate(data.y.col(k).segment(s, l));
    }
  }
  r0 /= static_cast<double>(windows * np);
  r0.triangularView<Eigen::StrictlyUpper>() = r0.transpose();

  const double trace = r0.trace();
  if (!(trace > 0.0)) {
    if (std::isfinite(trace)) throw DegenerateInputError("covariance of an all-zero snapshot is degenerate");
    throw NumericalError("covariance trace is not finite");
  }
  const double eps = loading_coefficient * trace / static_cast<double>(l);
  r0.diagonal().array() += eps;
  return {std::move(r0), subarray, eps};
}

/// Distortionless minimum-variance weights w = R^-1 1 / (1^T R^-1 1).
inline Vector mv_weights(const Matrix& r) {
  const Eigen::LLT<Matrix> llt(r);
  const Vector ones = Vector::Ones(r.rows());
  const Vector u = llt.info() == Eigen::Success ? Vector(llt.solve(ones)) : Vector();
  const double denom = u.size() ? u.sum() : 0.0;
  if (llt.info() != Eigen::Success || !(denom > 0.0) || !u.allFinite()) {
    const Eigen::SelfAdjointEigenSolver<Matrix> es(r, Eigen::EigenvaluesOnly);
    std::ostringstream msg;
    msg << "minimum-variance solve failed: covariance is not positive definite";
    if (es.info() == Eigen::Success && es.eigenvalues().size() > 0) {
      const double lo = es.eigenvalues().minCoeff();
      const double hi = es.eigenvalues().maxCoeff();
      msg << " (eigenvalue range [" << lo << ", " << hi << "], condition ";
      if (lo > 0.0) msg << hi / lo; else msg << "inf";
      msg << ")";
    }
    throw NumericalError(msg.str());
  }
  return u / denom;
}

inline Vector mv_weights(const CovarianceEstimate& cov) { return mv_weights(cov.R); }

/// Eigenpairs in descending order; the first `selected` columns span the signal subspace.
struct EigenBasis {
  Vector eigenvalues;
  Matrix eigenvectors;
  std::size_t selected = 0;

  auto signal() const { return eigenvectors.leftCols(static_cast<Eigen::Index>(selected)); }
};

/// Keeps eigenvectors whose eigenvalue is >= criterion * lambda_max (ties included).
inline EigenBasis signal_subspace(const Matrix& r, double criterion) {
  if (!(criterion > 0.0 && criterion <= 1.0)) throw ConfigError("subspace criterion must lie in (0, 1]");
  const Eigen::SelfAdjointEigenSolver<Matrix> es(r);
  if (es.info() != Eigen::Success) throw NumericalError("eigendecomposition did not converge");

  const auto n = r.rows();
  EigenBasis basis{es.eigenvalues().reverse(), es.eigenvectors().rowwise().reverse(), 0};
  const double cutoff = criterion * basis.eigenvalues(0);
  for (Eigen::Index i = 0; i < n && basis.eigenvalues(i) >= cutoff; ++i) ++basis.selected;
  if (basis.selected == 0) basis.selected = 1;
  return basis;
}

inline EigenBasis signal_subspace(const CovarianceEstimate& cov, double criterion) {
  return signal_subspace(cov.R, criterion);
}

/// Projection of the MV weights onto the signal subspace: E_s E_s^T w.
inline Vector ebmv_weights(const Vector& w_mv, const EigenBasis& basis) {
  const auto es = basis.signal();
  return es * (es.transpose() * w_mv);
}

/// EBMV output for one pixel: subarray outputs w^T y_l at the center tap,
/// averaged over the Ne - L + 1 windows.
inline double ebmv_pixel(const DelayedDataMatrix& data, std::size_t subarray, double loading_coefficient,
                         double criterion) {
  const auto cov = estimate_covariance(data, subarray, loading_coefficient);
  const Vector w = ebmv_weights(mv_weights(cov), signal_subspace(cov, criterion));

  const auto l = static_cast<Eigen::Index>(subarray);
  const Eigen::Index windows = data.elements() - l + 1;
  const auto center = data.y.col(data.center_tap());
  double acc = 0.0;
  for (Eigen::Index s = 0; s < windows; ++s) acc += w.dot(center.segment(s, l));
  return acc / static_cast<double>(windows);
}

inline double ebmv_pixel(const DelayedDataMatrix& data, const BeamformerConfig& config) {
  const auto ne = static_cast<std::size_t>(data.elements());
  config.validate(ne);
  return ebmv_pixel(data, config.resolved_subarray(ne), config.loading_coefficient, config.subspace_criterion);
}

}  // namespace usvar::beamform
