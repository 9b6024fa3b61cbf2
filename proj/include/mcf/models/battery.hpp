#pragma once

#include <cmath>
#include <functional>

#include "mcf/types.hpp"

namespace mcf {

// Lithium-ion battery equivalent-circuit model, Euler-discretized.
// State x = (a, b, c): state of charge, RC-branch (diffusion) voltage, and
// hysteresis voltage. The terminal voltage is measured against the
// open-circuit-voltage curve.
struct BatteryParams {
  double beta = 5.634e-5;  // SoC consumed per ampere-second
  double R_d = 3e-3;       // diffusion resistance [ohm]
  double C_d = 9e3;        // diffusion capacitance [F]
  double R_s = 5e-3;       // series resistance [ohm]
  double gamma = 2.47e-3;  // hysteresis rate coefficient
  double delta = 1.0;      // Euler step [s]
  // Discharge current by step index [A]; constant 5 A by default.
  std::function<double(int)> current_profile = [](int) { return 5.0; };

  void validate() const {
    if (!(beta > 0 && R_d > 0 && C_d > 0 && R_s > 0 && gamma > 0))
      throw std::invalid_argument("BatteryParams: physical parameters must be > 0");
    if (!(delta > 0)) throw std::invalid_argument("BatteryParams: delta must be > 0");
  }
};

// Open-circuit voltage as a function of SoC.
inline double ocv_curve(double a) {
  return -1.031 * std::exp(-35.0 * a) + 3.685 + 0.2156 * a - 0.1178 * a * a +
         0.3201 * a * a * a;
}

// One Euler step of the circuit dynamics under the step-k discharge current.
inline Eigen::Vector3d battery_step(const Eigen::Vector3d& x, const BatteryParams& p, int k) {
  const double I = p.current_profile(k);
  const double a = x(0), b = x(1), c = x(2);
  Eigen::Vector3d next;
  next(0) = a - p.delta * p.beta * I;
  next(1) = b + p.delta * (-b / (p.R_d * p.C_d) + I / p.C_d);
  next(2) = c - p.delta * p.gamma * I * (0.0755 * (1.0 - a) + c);
  return next;
}

// Terminal voltage: OCV minus diffusion drop plus hysteresis minus ohmic drop.
inline double battery_measure(const Eigen::Vector3d& x, const BatteryParams& p, int k) {
  return ocv_curve(x(0)) - x(1) + x(2) - p.R_s * p.current_profile(k);
}

inline StateSpaceModel make_battery_model(const BatteryParams& params = {},
                                          double process_var = 1e-6, double meas_var = 0.01) {
  params.validate();
  StateSpaceModel model;
  model.state_dim = 3;
  model.meas_dim = 1;
  model.f = [params](const Eigen::VectorXd& x, int k) -> Eigen::VectorXd {
    return battery_step(x, params, k);
  };
  model.h = [params](const Eigen::VectorXd& x, int k) -> Eigen::VectorXd {
    return Eigen::VectorXd::Constant(1, battery_measure(x, params, k));
  };
  model.Q = process_var * Eigen::Matrix3d::Identity();
  model.R = Eigen::MatrixXd::Constant(1, 1, meas_var);
  return model;
}

}  // namespace mcf
