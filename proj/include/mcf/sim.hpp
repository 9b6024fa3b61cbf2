#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mcf/cubature.hpp"
#include "mcf/rng.hpp"
#include "mcf/types.hpp"
#include "mcf/weights.hpp"

namespace mcf {

// Gaussian-mixture measurement noise: with probability phi the draw comes
// from the inflated outlier component N(0, varphi * R), otherwise from the
// nominal N(0, R).
struct MixtureNoiseConfig {
  double phi = 0.0;     // contamination ratio
  double varphi = 1.0;  // outlier variance multiplier
  Eigen::MatrixXd R;    // nominal covariance

  void validate() const {
    if (!(phi >= 0.0 && phi <= 1.0))
      throw std::invalid_argument("MixtureNoiseConfig: phi must lie in [0, 1]");
    if (!(varphi >= 1.0))
      throw std::invalid_argument("MixtureNoiseConfig: varphi must be >= 1");
    Eigen::LLT<Eigen::MatrixXd> llt(R);
    if (R.rows() != R.cols() || llt.info() != Eigen::Success)
      throw std::invalid_argument("MixtureNoiseConfig: R must be SPD");
  }
};

inline Eigen::VectorXd sample_mixture_noise(RandomStream& rng, const MixtureNoiseConfig& cfg) {
  const Eigen::MatrixXd L = matrix_sqrt(cfg.R);
  const double u = rng.uniform();
  const Eigen::VectorXd z = rng.normal_vector(static_cast<int>(cfg.R.rows()));
  const double scale = (u < cfg.phi) ? std::sqrt(cfg.varphi) : 1.0;
  return scale * (L * z);
}

// Full experiment definition: model, contamination, Monte-Carlo extent, the
// true initial state, the initial-estimate sampling distribution, and the
// filter bank to compare. init_mean defaults to x0 when left empty (the
// battery study initializes the filters away from the true state).
struct ScenarioConfig {
  std::string name = "scenario";
  StateSpaceModel model;
  MixtureNoiseConfig noise;
  int horizon = 120;
  int runs = 1000;
  std::uint64_t base_seed = 1;
  Eigen::VectorXd x0;
  Eigen::VectorXd init_mean;  // empty -> x0
  Eigen::MatrixXd init_cov;
  std::vector<std::pair<std::string, RobustLossConfig>> filters;

  Eigen::VectorXd initial_estimate_mean() const { return init_mean.size() ? init_mean : x0; }

  void validate() const {
    if (horizon < 1) throw std::invalid_argument("ScenarioConfig: horizon must be >= 1");
    if (runs < 1) throw std::invalid_argument("ScenarioConfig: runs must be >= 1");
    if (x0.size() != model.state_dim)
      throw std::invalid_argument("ScenarioConfig: x0 dimension mismatch");
    if (init_mean.size() && init_mean.size() != model.state_dim)
      throw std::invalid_argument("ScenarioConfig: init_mean dimension mismatch");
    if (init_cov.rows() != model.state_dim || init_cov.cols() != model.state_dim)
      throw std::invalid_argument("ScenarioConfig: init_cov dimension mismatch");
    if (filters.empty()) throw std::invalid_argument("ScenarioConfig: no filters configured");
    noise.validate();
    for (const auto& [name_, cfg] : filters) cfg.validate();
  }
};

// Per-run random streams.
struct RunRngs {
  RandomStream process;
  RandomStream measurement;
  RandomStream init;

  RunRngs(std::uint64_t base_seed, std::uint64_t run_index)
      : process(base_seed, run_index, kStreamProcessNoise),
        measurement(base_seed, run_index, kStreamMeasurementNoise),
        init(base_seed, run_index, kStreamInitialEstimate) {}
};

// Simulate one trajectory: x_{k+1} = f(x_k, k) + w, y_{k+1} = h(x_{k+1}, k) + v,
// with the true x0 fixed. Row k of the outputs holds x_{k+1} / y_{k+1} for
// k = 0..T-1; the filter loop passes the same 0-based step index to f and h.
inline std::pair<Eigen::MatrixXd, Eigen::MatrixXd> simulate_trajectory(
    RunRngs& rngs, const ScenarioConfig& scenario) {
  const int T = scenario.horizon;
  const int n = scenario.model.state_dim;
  const int m = scenario.model.meas_dim;

  Eigen::MatrixXd states(T, n);
  Eigen::MatrixXd measurements(T, m);

  const Eigen::MatrixXd LQ = matrix_sqrt(scenario.model.Q_at(0));
  const bool constant_q = !scenario.model.Q_t;

  Eigen::VectorXd x = scenario.x0;
  for (int t = 0; t < T; ++t) {
    const Eigen::VectorXd w = constant_q ? (LQ * rngs.process.normal_vector(n)).eval()
                                         : (matrix_sqrt(scenario.model.Q_at(t)) *
                                            rngs.process.normal_vector(n))
                                               .eval();
    x = scenario.model.f(x, t) + w;
    states.row(t) = x.transpose();
    measurements.row(t) =
        (scenario.model.h(x, t) + sample_mixture_noise(rngs.measurement, scenario.noise))
            .transpose();
  }
  return {std::move(states), std::move(measurements)};
}

}  // namespace mcf
