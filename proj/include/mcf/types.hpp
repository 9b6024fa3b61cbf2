#pragma once

#include <Eigen/Dense>
#include <functional>
#include <stdexcept>
#include <string>

namespace mcf {

// Numerical failures that can legitimately occur during filtering (e.g. a
// covariance that stops being positive definite after an outlier-driven
// divergence). The Monte-Carlo harness catches this hierarchy to implement
// its failed-run accounting; anything else is a programming error.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NotPositiveDefiniteError : NumericalError {
  using NumericalError::NumericalError;
};

struct SingularInnovationError : NumericalError {
  using NumericalError::NumericalError;
};

struct InvalidDimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct UnsupportedLossError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Thrown by run_filter when a numerical error surfaces mid-trajectory;
// carries the offending time index.
struct FilterRunError : NumericalError {
  FilterRunError(int step, const std::string& why)
      : NumericalError("filter diverged at step " + std::to_string(step) + ": " + why),
        failed_step(step) {}
  int failed_step;
};

// State mean plus symmetric positive-definite covariance.
struct GaussianBelief {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;

  int dim() const { return static_cast<int>(mean.size()); }
};

// Discrete-time nonlinear state-space model
//   x_t = f(x_{t-1}, t) + w,  w ~ N(0, Q_t)
//   y_t = h(x_t, t) + v,      v ~ N(0, R_t)   (nominal)
// The integer passed to f/h is the index of the produced state/measurement,
// which lets models consume per-step exogenous inputs (e.g. a discharge
// current profile). Constant Q/R are the default; set Q_t/R_t for
// time-varying noise.
struct StateSpaceModel {
  int state_dim = 0;
  int meas_dim = 0;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&, int)> f;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&, int)> h;
  Eigen::MatrixXd Q;
  Eigen::MatrixXd R;
  std::function<Eigen::MatrixXd(int)> Q_t;  // optional per-step override
  std::function<Eigen::MatrixXd(int)> R_t;  // optional per-step override

  Eigen::MatrixXd Q_at(int k) const { return Q_t ? Q_t(k) : Q; }
  Eigen::MatrixXd R_at(int k) const { return R_t ? R_t(k) : R; }
};

inline void symmetrize(Eigen::MatrixXd& P) { P = ((P + P.transpose()) * 0.5).eval(); }

}  // namespace mcf
