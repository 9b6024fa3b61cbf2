#pragma once

#include <utility>
#include <vector>

#include "mcf/cubature.hpp"
#include "mcf/types.hpp"
#include "mcf/weights.hpp"

namespace mcf {

struct FilterStepDiagnostics {
  int iterations = 0;        // number of measurement-update passes executed
  double final_delta = 0.0;  // ||x^{k+1} - x^k|| at exit
  WeightMatrix final_weights;
  bool converged = false;
};

// Whitened residual e = L^{-1} (y - h(x)) with L the lower Cholesky factor of
// the nominal R; for diagonal R this is (y_i - h_i(x)) / sqrt(R_ii).
inline Eigen::VectorXd whitened_residual(const Eigen::VectorXd& y, const Eigen::VectorXd& x,
                                         const StateSpaceModel& model, int k = 0) {
  const Eigen::MatrixXd L = matrix_sqrt(model.R_at(k));
  return L.triangularView<Eigen::Lower>().solve(y - model.h(x, k));
}

// One time step of the iteratively reweighted robust filter:
//   predict once, compute the cubature measurement statistics once, then
//   repeat { update with R-bar(Lambda), re-evaluate the whitened residual at
//   the new posterior, recompute Lambda } until the state iterate moves less
//   than tol or max_iter passes have run. Lambda starts at the identity, so
//   the first pass is exactly the conventional CKF update; with kind == none
//   that single pass is the whole step.
// Non-convergence at max_iter is reported via diagnostics, not an error.
inline std::pair<GaussianBelief, FilterStepDiagnostics> robust_step(const GaussianBelief& prior,
                                                                    const Eigen::VectorXd& y,
                                                                    const StateSpaceModel& model,
                                                                    const RobustLossConfig& cfg,
                                                                    int k = 0) {
  const GaussianBelief pred = predict(prior, model, k);
  const MeasurementStats stats = measurement_stats(pred, model, k);
  const Eigen::MatrixXd R = model.R_at(k);
  const Eigen::MatrixXd L_R = matrix_sqrt(R);

  const int m = model.meas_dim;
  FilterStepDiagnostics diag;
  diag.final_weights.diag = Eigen::VectorXd::Ones(m);

  GaussianBelief out;
  Eigen::VectorXd x_prev = pred.mean;
  for (int it = 1; it <= cfg.max_iter; ++it) {
    diag.iterations = it;
    const Eigen::MatrixXd R_bar =
        detail::effective_cov_from_factor(L_R, diag.final_weights);
    out = kalman_update(pred, stats, y, R_bar);
    diag.final_delta = (out.mean - x_prev).norm();

    if (cfg.kind == LossKind::none) {
      diag.converged = true;
      break;
    }
    const Eigen::VectorXd e =
        L_R.triangularView<Eigen::Lower>().solve(y - model.h(out.mean, k));
    diag.final_weights = residual_weights(e, cfg);
    x_prev = out.mean;
    if (diag.final_delta < cfg.tol) {
      diag.converged = true;
      break;
    }
  }
  return {out, diag};
}

// Fold robust_step over a measurement sequence. Numerical errors abort the
// run and report the failing time index; a non-finite iterate is treated the
// same way (an overflowing process map produces inf/nan before any
// factorization has a chance to object).
inline std::pair<std::vector<GaussianBelief>, std::vector<FilterStepDiagnostics>> run_filter(
    const GaussianBelief& x0, const std::vector<Eigen::VectorXd>& ys, const StateSpaceModel& model,
    const RobustLossConfig& cfg) {
  std::vector<GaussianBelief> beliefs;
  std::vector<FilterStepDiagnostics> diags;
  beliefs.reserve(ys.size());
  diags.reserve(ys.size());

  GaussianBelief cur = x0;
  for (int t = 0; t < static_cast<int>(ys.size()); ++t) {
    try {
      auto [next, diag] = robust_step(cur, ys[t], model, cfg, t);
      if (!next.mean.allFinite() || !next.cov.allFinite())
        throw NumericalError("state estimate is non-finite");
      cur = std::move(next);
      beliefs.push_back(cur);
      diags.push_back(std::move(diag));
    } catch (const NumericalError& err) {
      throw FilterRunError(t, err.what());
    }
  }
  return {std::move(beliefs), std::move(diags)};
}

}  // namespace mcf
