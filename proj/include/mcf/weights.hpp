#pragma once

#include <cmath>
#include <string>

#include "mcf/cubature.hpp"
#include "mcf/types.hpp"

namespace mcf {

enum class LossKind { none, dg_mcl, lg_mcl, huber };

// Configuration of the robust measurement loss.
//  - dg_mcl: mixture of two Gaussian kernels (widths sigma1, sigma2)
//  - lg_mcl: Gaussian kernel (sigma1) mixed with a Laplace kernel (sigma2)
//  - huber:  classic M-estimator weights with threshold huber_c
//  - none:   plain (non-robust) update
// alpha in [0,1] is the mixture coefficient; the endpoints reduce the mixture
// to a single kernel and are accepted for exactly that purpose.
struct RobustLossConfig {
  LossKind kind = LossKind::none;
  double sigma1 = 4.0;
  double sigma2 = 5.0;
  double alpha = 0.5;
  double huber_c = 1.345;
  double tol = 1e-6;
  int max_iter = 50;

  void validate() const {
    if (!(sigma1 > 0)) throw std::invalid_argument("sigma1 must be > 0");
    if (!(sigma2 > 0)) throw std::invalid_argument("sigma2 must be > 0");
    if (!(alpha >= 0 && alpha <= 1)) throw std::invalid_argument("alpha must lie in [0, 1]");
    if (!(huber_c > 0)) throw std::invalid_argument("huber_c must be > 0");
    if (!(tol > 0)) throw std::invalid_argument("tol must be > 0");
    if (max_iter < 1) throw std::invalid_argument("max_iter must be >= 1");
  }
};

// Diagonal residual weights Lambda_{ii} in (0, 1].
struct WeightMatrix {
  Eigen::VectorXd diag;
};

// A gross outlier drives a weight toward 0 and the reweighted covariance
// toward overflow (it enters as R_ii / Lambda_ii); flooring at 1e-12 bounds
// the inflation while still numerically discarding the component.
inline constexpr double kWeightFloor = 1e-12;

inline double gaussian_kernel(double e, double sigma) {
  return std::exp(-(e * e) / (2.0 * sigma * sigma));
}

inline double laplace_kernel(double e, double sigma) {
  return std::exp(-std::abs(e) / sigma);
}

// Mixture correntropy loss: 1 - (1/m) sum_i [a*k1(e_i) + (1-a)*k2(e_i)],
// with k2 Gaussian (dg_mcl) or Laplace (lg_mcl).
inline double mcl_loss(const Eigen::VectorXd& e, const RobustLossConfig& cfg) {
  const int m = static_cast<int>(e.size());
  double acc = 0.0;
  if (cfg.kind == LossKind::dg_mcl) {
    for (int i = 0; i < m; ++i)
      acc += cfg.alpha * gaussian_kernel(e(i), cfg.sigma1) +
             (1.0 - cfg.alpha) * gaussian_kernel(e(i), cfg.sigma2);
  } else if (cfg.kind == LossKind::lg_mcl) {
    for (int i = 0; i < m; ++i)
      acc += cfg.alpha * gaussian_kernel(e(i), cfg.sigma1) +
             (1.0 - cfg.alpha) * laplace_kernel(e(i), cfg.sigma2);
  } else {
    throw UnsupportedLossError("mcl_loss: loss kind carries no mixture correntropy loss");
  }
  return 1.0 - acc / m;
}

// Tradeoff coefficient calibrated so the loss matches the quadratic cost for
// small residuals: lambda = m*s1^2*s2^2 / (a*s2^2 + (1-a)*s1^2).
inline double dg_lambda(const RobustLossConfig& cfg, int m) {
  const double s1sq = cfg.sigma1 * cfg.sigma1;
  const double s2sq = cfg.sigma2 * cfg.sigma2;
  return m * s1sq * s2sq / (cfg.alpha * s2sq + (1.0 - cfg.alpha) * s1sq);
}

// Double-Gaussian weights: Lambda_ii = (lambda/m) [a*k1/s1^2 + (1-a)*k2/s2^2].
// By construction of lambda, Lambda_ii(0) = 1.
inline WeightMatrix dg_weights(const Eigen::VectorXd& e, const RobustLossConfig& cfg) {
  const int m = static_cast<int>(e.size());
  const double lam_over_m = dg_lambda(cfg, m) / m;
  const double s1sq = cfg.sigma1 * cfg.sigma1;
  const double s2sq = cfg.sigma2 * cfg.sigma2;
  WeightMatrix w;
  w.diag.resize(m);
  for (int i = 0; i < m; ++i) {
    const double v = lam_over_m * (cfg.alpha * gaussian_kernel(e(i), cfg.sigma1) / s1sq +
                                   (1.0 - cfg.alpha) * gaussian_kernel(e(i), cfg.sigma2) / s2sq);
    w.diag(i) = std::max(v, kWeightFloor);
  }
  return w;
}

// Laplace-Gaussian weights. With the per-component tradeoff
//   lambda_i = m (a/s1^2 + 2(1-a)/(s2 |e_i|))^{-1}
// the weight is algebraically a convex combination
//   Lambda_ii = w_g * k_gauss + (1 - w_g) * k_laplace,
// whose limit at e_i = 0 is exactly 1; the 1/|e_i| singularity in the raw
// formula is removable and handled by a branch.
inline WeightMatrix lg_weights(const Eigen::VectorXd& e, const RobustLossConfig& cfg) {
  const int m = static_cast<int>(e.size());
  const double s1sq = cfg.sigma1 * cfg.sigma1;
  WeightMatrix w;
  w.diag.resize(m);
  for (int i = 0; i < m; ++i) {
    const double ae = std::abs(e(i));
    if (ae < 1e-12) {
      w.diag(i) = 1.0;
      continue;
    }
    const double g_term = cfg.alpha / s1sq;
    const double l_term = 2.0 * (1.0 - cfg.alpha) / (cfg.sigma2 * ae);
    const double v = (g_term * gaussian_kernel(e(i), cfg.sigma1) +
                      l_term * laplace_kernel(e(i), cfg.sigma2)) /
                     (g_term + l_term);
    w.diag(i) = std::max(v, kWeightFloor);
  }
  return w;
}

// Standard M-estimation weights psi(e)/e for Huber's cost.
inline WeightMatrix huber_weights(const Eigen::VectorXd& e, double c) {
  const int m = static_cast<int>(e.size());
  WeightMatrix w;
  w.diag.resize(m);
  for (int i = 0; i < m; ++i) {
    const double ae = std::abs(e(i));
    w.diag(i) = (ae <= c) ? 1.0 : c / ae;
  }
  return w;
}

inline WeightMatrix residual_weights(const Eigen::VectorXd& e, const RobustLossConfig& cfg) {
  switch (cfg.kind) {
    case LossKind::dg_mcl: return dg_weights(e, cfg);
    case LossKind::lg_mcl: return lg_weights(e, cfg);
    case LossKind::huber: return huber_weights(e, cfg.huber_c);
    default: throw UnsupportedLossError("residual_weights: kind 'none' has no weights");
  }
}

namespace detail {

// R-bar from a precomputed lower-triangular factor of R (hot path of the
// iterated update: the factor never changes, only the weights do).
inline Eigen::MatrixXd effective_cov_from_factor(const Eigen::MatrixXd& L_R,
                                                 const WeightMatrix& w) {
  Eigen::MatrixXd r = L_R * w.diag.cwiseInverse().asDiagonal() * L_R.transpose();
  symmetrize(r);
  return r;
}

}  // namespace detail

// Reweighted measurement covariance R-bar = R^{T/2} Lambda^{-1} R^{1/2}.
// For diagonal R this reduces to R_ii / Lambda_ii elementwise.
inline Eigen::MatrixXd effective_measurement_cov(const Eigen::MatrixXd& R, const WeightMatrix& w) {
  return detail::effective_cov_from_factor(matrix_sqrt(R), w);
}

}  // namespace mcf
