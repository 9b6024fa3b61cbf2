#pragma once

#include <cmath>

#include "mcf/types.hpp"

namespace mcf {

// The 2n equally weighted third-degree cubature points xi_i = sqrt(n)*[I]_i
// with [I] = [I_n, -I_n].
struct CubatureSet {
  Eigen::MatrixXd points;   // n x 2n, one point per column
  Eigen::VectorXd weights;  // 2n entries, all 1/(2n)
};

inline CubatureSet cubature_points(int n) {
  if (n < 1) throw InvalidDimensionError("cubature_points: state dimension must be >= 1");
  CubatureSet set;
  set.points = Eigen::MatrixXd::Zero(n, 2 * n);
  const double s = std::sqrt(static_cast<double>(n));
  for (int i = 0; i < n; ++i) {
    set.points(i, i) = s;
    set.points(i, n + i) = -s;
  }
  set.weights = Eigen::VectorXd::Constant(2 * n, 1.0 / (2.0 * n));
  return set;
}

// Lower-triangular factor S with S*S^T = cov. Accumulated rounding can make a
// covariance marginally indefinite, so one retry with a trace-scaled jitter on
// the diagonal is attempted before giving up.
inline Eigen::MatrixXd matrix_sqrt(const Eigen::MatrixXd& cov) {
  if (!cov.allFinite())
    throw NotPositiveDefiniteError("matrix_sqrt: covariance has non-finite entries");
  // A covariance of exactly zero (noiseless limit) factors trivially.
  if (cov.isZero(0.0)) return Eigen::MatrixXd::Zero(cov.rows(), cov.cols());
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() == Eigen::Success) return llt.matrixL();

  const int n = static_cast<int>(cov.rows());
  const double jitter = 1e-10 * cov.trace() / n;
  Eigen::LLT<Eigen::MatrixXd> retry(cov + jitter * Eigen::MatrixXd::Identity(n, n));
  if (retry.info() == Eigen::Success) return retry.matrixL();
  throw NotPositiveDefiniteError("matrix_sqrt: covariance not positive definite after jitter retry");
}

namespace detail {

// Propagated-point matrix: column i holds x + sqrt(n)*S.col(i mod n) (+/-).
inline Eigen::MatrixXd spread_points(const Eigen::VectorXd& x, const Eigen::MatrixXd& S) {
  const int n = static_cast<int>(x.size());
  const double s = std::sqrt(static_cast<double>(n));
  Eigen::MatrixXd pts(n, 2 * n);
  for (int i = 0; i < n; ++i) {
    pts.col(i) = x + s * S.col(i);
    pts.col(n + i) = x - s * S.col(i);
  }
  return pts;
}

}  // namespace detail

// Time update: push the cubature points of the prior through f, average.
inline GaussianBelief predict(const GaussianBelief& prior, const StateSpaceModel& model, int k = 0) {
  const int n = prior.dim();
  const Eigen::MatrixXd S = matrix_sqrt(prior.cov);
  const Eigen::MatrixXd pts = detail::spread_points(prior.mean, S);

  Eigen::MatrixXd prop(n, 2 * n);
  for (int i = 0; i < 2 * n; ++i) prop.col(i) = model.f(pts.col(i), k);

  GaussianBelief pred;
  pred.mean = prop.rowwise().mean();
  const Eigen::MatrixXd centered = prop.colwise() - pred.mean;
  pred.cov = centered * centered.transpose() / (2.0 * n) + model.Q_at(k);
  symmetrize(pred.cov);
  return pred;
}

// Measurement statistics of the predicted belief. S_innov is the noise-free
// part of the innovation covariance; the caller adds the effective R. That
// split lets the reweighted update iterate over R without re-propagating the
// cubature points.
struct MeasurementStats {
  Eigen::VectorXd y_hat;
  Eigen::MatrixXd S_innov;
  Eigen::MatrixXd P_xy;
};

inline MeasurementStats measurement_stats(const GaussianBelief& pred, const StateSpaceModel& model,
                                          int k = 0) {
  const int n = pred.dim();
  const int m = model.meas_dim;
  const Eigen::MatrixXd S = matrix_sqrt(pred.cov);
  const Eigen::MatrixXd pts = detail::spread_points(pred.mean, S);

  Eigen::MatrixXd prop(m, 2 * n);
  for (int i = 0; i < 2 * n; ++i) prop.col(i) = model.h(pts.col(i), k);

  MeasurementStats stats;
  stats.y_hat = prop.rowwise().mean();
  const Eigen::MatrixXd cy = prop.colwise() - stats.y_hat;
  const Eigen::MatrixXd cx = pts.colwise() - pred.mean;
  stats.S_innov = cy * cy.transpose() / (2.0 * n);
  symmetrize(stats.S_innov);
  stats.P_xy = cx * cy.transpose() / (2.0 * n);
  return stats;
}

// Standard Kalman correction with an arbitrary effective measurement
// covariance (the robust loop passes the reweighted R-bar here).
inline GaussianBelief kalman_update(const GaussianBelief& pred, const MeasurementStats& stats,
                                    const Eigen::VectorXd& y, const Eigen::MatrixXd& R_eff) {
  Eigen::MatrixXd S = stats.S_innov + R_eff;
  symmetrize(S);
  Eigen::LLT<Eigen::MatrixXd> llt(S);
  if (!S.allFinite() || llt.info() != Eigen::Success)
    throw SingularInnovationError("kalman_update: innovation covariance is singular");

  const Eigen::MatrixXd K = llt.solve(stats.P_xy.transpose()).transpose();
  GaussianBelief post;
  post.mean = pred.mean + K * (y - stats.y_hat);
  post.cov = pred.cov - K * S * K.transpose();
  symmetrize(post.cov);
  return post;
}

}  // namespace mcf
