#include <gtest/gtest.h>

#include <cmath>

#include "mcf/models/battery.hpp"
#include "mcf/models/vanderpol.hpp"

using namespace mcf;

TEST(VpoDerivative, KnownPoints) {
  EXPECT_EQ(vpo_derivative({0.0, 0.0}, 1.0), Eigen::Vector2d(0.0, 0.0));
  EXPECT_EQ(vpo_derivative({1.0, 1.0}, 1.0), Eigen::Vector2d(1.0, -1.0));
  EXPECT_EQ(vpo_derivative({0.0, -0.5}, 1.0), Eigen::Vector2d(-0.5, -0.5));
  // The damping term switches sign with mu.
  EXPECT_EQ(vpo_derivative({0.0, 2.0}, 3.0), Eigen::Vector2d(2.0, 6.0));
}

TEST(Rk4Step, EquilibriumIsFixed) {
  EXPECT_EQ(rk4_step({0.0, 0.0}, 1.0, 0.1), Eigen::Vector2d(0.0, 0.0));
}

TEST(Rk4Step, FrozenOneStepValue) {
  const Eigen::Vector2d next = rk4_step({0.0, -0.5}, 1.0, 0.1);
  EXPECT_NEAR(next(0), -0.052496739537070715, 1e-14);
  EXPECT_NEAR(next(1), -0.54986518126350459, 1e-14);
}

TEST(Rk4Step, TinyStepReducesToEuler) {
  const Eigen::Vector2d x(0.0, -0.5);
  const double d = 1e-6;
  const Eigen::Vector2d euler = x + d * vpo_derivative(x, 1.0);
  EXPECT_LT((rk4_step(x, 1.0, d) - euler).norm(), 1e-10);
}

TEST(Rk4Step, TracksFineReference) {
  // Reference flow over one sampling interval via 1000 substeps; a single
  // coarse step carries only its ~6e-8 truncation error.
  const Eigen::Vector2d x0(0.0, -0.5);
  Eigen::Vector2d ref = x0;
  for (int i = 0; i < 1000; ++i) ref = rk4_step(ref, 1.0, 0.1 / 1000.0);
  EXPECT_LT((rk4_step(x0, 1.0, 0.1) - ref).norm(), 1e-7);
}

TEST(Rk4Step, FourthOrderConvergence) {
  const Eigen::Vector2d x0(0.0, -0.5);
  Eigen::Vector2d ref = x0;
  for (int i = 0; i < 100000; ++i) ref = rk4_step(ref, 1.0, 0.1 / 100000.0);

  const double e1 = (rk4_step(x0, 1.0, 0.1) - ref).norm();
  const double e2 = (rk4_step(rk4_step(x0, 1.0, 0.05), 1.0, 0.05) - ref).norm();
  const double order = std::log2(e1 / e2);
  EXPECT_GT(order, 3.5);
  EXPECT_LT(order, 4.5);
}

TEST(VpoMeasure, QuadraticMap) {
  EXPECT_DOUBLE_EQ(vpo_measure({1.0, 9.0}), 1.0);
  EXPECT_DOUBLE_EQ(vpo_measure({0.0, 0.0}), 2.0);
  EXPECT_DOUBLE_EQ(vpo_measure({-1.0, 0.0}), 5.0);
  EXPECT_DOUBLE_EQ(vpo_measure({3.0, -2.0}), 5.0);
}

TEST(VpoModel, DefaultsAndDimensions) {
  const StateSpaceModel model = make_vpo_model();
  EXPECT_EQ(model.state_dim, 2);
  EXPECT_EQ(model.meas_dim, 1);
  EXPECT_LT((model.Q - 0.005 * Eigen::Matrix2d::Identity()).norm(), 1e-15);
  EXPECT_DOUBLE_EQ(model.R(0, 0), 1.0);

  const Eigen::VectorXd x = Eigen::Vector2d(0.0, -0.5);
  EXPECT_TRUE(model.f(x, 0).isApprox(rk4_step({0.0, -0.5}, 1.0, 0.1)));
  EXPECT_DOUBLE_EQ(model.h(x, 0)(0), 2.0);
}

TEST(VpoModel, RejectsBadConfig) {
  VpoConfig cfg;
  cfg.delta = 0.0;
  EXPECT_THROW(make_vpo_model(cfg), std::invalid_argument);
  cfg = VpoConfig{};
  cfg.R = -1.0;
  EXPECT_THROW(make_vpo_model(cfg), std::invalid_argument);
}

TEST(OcvCurve, FrozenValues) {
  EXPECT_NEAR(ocv_curve(0.0), 2.654, 1e-15);
  EXPECT_NEAR(ocv_curve(0.5), 3.803362474111599, 1e-12);
  EXPECT_NEAR(ocv_curve(1.0), 4.1029, 1e-12);
}

TEST(OcvCurve, MonotoneOverOperatingRange) {
  double prev = ocv_curve(0.05);
  for (double a = 0.1; a <= 1.0; a += 0.05) {
    const double v = ocv_curve(a);
    EXPECT_GT(v, prev) << "at SoC " << a;
    prev = v;
  }
}

TEST(BatteryStep, FrozenOneStepValue) {
  const BatteryParams p;
  const Eigen::Vector3d next = battery_step({1.0, 0.0, 0.0}, p, 0);
  EXPECT_NEAR(next(0), 0.9997183, 1e-15);
  EXPECT_DOUBLE_EQ(next(1), 5.0 / 9000.0);
  EXPECT_DOUBLE_EQ(next(2), 0.0);
}

TEST(BatteryStep, ZeroCurrentFreezesSocAndHysteresis) {
  BatteryParams p;
  p.current_profile = [](int) { return 0.0; };
  const Eigen::Vector3d next = battery_step({0.8, 0.01, 0.002}, p, 0);
  EXPECT_DOUBLE_EQ(next(0), 0.8);
  EXPECT_DOUBLE_EQ(next(2), 0.002);
  // The RC branch still relaxes toward zero.
  EXPECT_NEAR(next(1), 0.01 * (1.0 - 1.0 / 27.0), 1e-15);
}

TEST(BatteryStep, DiffusionVoltageFixedPoint) {
  const BatteryParams p;
  const double b_star = 5.0 * p.R_d;  // I * R_d
  const Eigen::Vector3d next = battery_step({0.9, b_star, 0.0}, p, 0);
  EXPECT_NEAR(next(1), b_star, 1e-15);

  // Contraction toward the fixed point from both sides.
  for (double b : {0.0, 0.01, 0.02, 0.05}) {
    const Eigen::Vector3d n = battery_step({0.9, b, 0.0}, p, 0);
    EXPECT_LT(std::abs(n(1) - b_star), std::abs(b - b_star) + 1e-18);
  }
}

TEST(BatteryMeasure, ComposesTerms) {
  BatteryParams p;
  p.current_profile = [](int) { return 0.0; };
  EXPECT_DOUBLE_EQ(battery_measure({1.0, 0.0, 0.0}, p, 0), ocv_curve(1.0));
  EXPECT_DOUBLE_EQ(battery_measure({1.0, 0.1, 0.0}, p, 0), ocv_curve(1.0) - 0.1);
  EXPECT_DOUBLE_EQ(battery_measure({1.0, 0.0, 0.05}, p, 0), ocv_curve(1.0) + 0.05);

  const BatteryParams nominal;  // 5 A
  EXPECT_NEAR(battery_measure({1.0, 0.0, 0.0}, nominal, 0), ocv_curve(1.0) - 0.025, 1e-15);
}

TEST(BatteryModel, DefaultsAndDimensions) {
  const StateSpaceModel model = make_battery_model();
  EXPECT_EQ(model.state_dim, 3);
  EXPECT_EQ(model.meas_dim, 1);
  EXPECT_LT((model.Q - 1e-6 * Eigen::Matrix3d::Identity()).norm(), 1e-18);
  EXPECT_DOUBLE_EQ(model.R(0, 0), 0.01);

  // The step index reaches the current profile through both f and h.
  BatteryParams p;
  p.current_profile = [](int k) { return k == 0 ? 5.0 : 0.0; };
  const StateSpaceModel timed = make_battery_model(p);
  const Eigen::VectorXd x = Eigen::Vector3d(1.0, 0.0, 0.0);
  EXPECT_DOUBLE_EQ(timed.f(x, 1)(0), 1.0);             // no discharge at k = 1
  EXPECT_DOUBLE_EQ(timed.h(x, 1)(0), ocv_curve(1.0));  // no ohmic drop either
  EXPECT_NEAR(timed.f(x, 0)(0), 0.9997183, 1e-15);
}

TEST(BatteryModel, SocDrainsOverFullDischarge) {
  // 1800 s at 5 A drains beta*I*T ~ 0.507 of the SoC; integrate the noiseless
  // dynamics and check the endpoint.
  const StateSpaceModel model = make_battery_model();
  Eigen::VectorXd x = Eigen::Vector3d(1.0, 0.0, 0.0);
  for (int k = 0; k < 1800; ++k) x = model.f(x, k);
  EXPECT_NEAR(x(0), 1.0 - 5.634e-5 * 5.0 * 1800.0, 1e-12);
  EXPECT_NEAR(x(1), 0.015, 1e-12);  // settled at I * R_d
  EXPECT_LT(x(2), 0.0);             // discharge drives hysteresis negative
  EXPECT_GT(x(2), -0.05);
}

TEST(BatteryModel, RejectsBadParams) {
  BatteryParams p;
  p.C_d = 0.0;
  EXPECT_THROW(make_battery_model(p), std::invalid_argument);
}
