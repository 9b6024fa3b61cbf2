#pragma once

#include "mcf/types.hpp"

namespace mcf {

// Van der Pol oscillator benchmark:
//   x1' = x2,  x2' = mu (1 - x1^2) x2 - x1
// discretized by one classical RK4 step per sample, measured through the
// quadratic map y = (x1 - 1)^2 + 1.
struct VpoConfig {
  double mu = 1.0;
  double delta = 0.1;  // sampling interval [s]
  Eigen::Matrix2d Q = 0.005 * Eigen::Matrix2d::Identity();
  double R = 1.0;  // nominal measurement variance

  void validate() const {
    if (!(delta > 0)) throw std::invalid_argument("VpoConfig: delta must be > 0");
    if (!(R > 0)) throw std::invalid_argument("VpoConfig: R must be > 0");
    Eigen::LLT<Eigen::Matrix2d> llt(Q);
    if (llt.info() != Eigen::Success) throw std::invalid_argument("VpoConfig: Q must be SPD");
  }
};

inline Eigen::Vector2d vpo_derivative(const Eigen::Vector2d& x, double mu) {
  return {x(1), mu * (1.0 - x(0) * x(0)) * x(1) - x(0)};
}

// One classical RK4 step of the deterministic flow; process noise is added
// discretely by the simulator, not integrated through the scheme.
inline Eigen::Vector2d rk4_step(const Eigen::Vector2d& x, double mu, double delta) {
  const Eigen::Vector2d k1 = vpo_derivative(x, mu);
  const Eigen::Vector2d k2 = vpo_derivative(x + 0.5 * delta * k1, mu);
  const Eigen::Vector2d k3 = vpo_derivative(x + 0.5 * delta * k2, mu);
  const Eigen::Vector2d k4 = vpo_derivative(x + delta * k3, mu);
  return x + (delta / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

inline double vpo_measure(const Eigen::Vector2d& x) {
  return (x(0) - 1.0) * (x(0) - 1.0) + 1.0;
}

inline StateSpaceModel make_vpo_model(const VpoConfig& cfg = {}) {
  cfg.validate();
  StateSpaceModel model;
  model.state_dim = 2;
  model.meas_dim = 1;
  model.f = [mu = cfg.mu, d = cfg.delta](const Eigen::VectorXd& x, int) -> Eigen::VectorXd {
    return rk4_step(x, mu, d);
  };
  model.h = [](const Eigen::VectorXd& x, int) -> Eigen::VectorXd {
    return Eigen::VectorXd::Constant(1, vpo_measure(x));
  };
  model.Q = cfg.Q;
  model.R = Eigen::MatrixXd::Constant(1, 1, cfg.R);
  return model;
}

}  // namespace mcf
