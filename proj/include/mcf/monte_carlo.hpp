#pragma once

#include <atomic>
#include <cmath>
#include <thread>
#include <vector>

#include "mcf/robust_filter.hpp"
#include "mcf/sim.hpp"

namespace mcf {

// Aggregated results for one filter across a Monte-Carlo study.
struct FilterMetrics {
  std::string name;
  Eigen::VectorXd trmse;        // per state component
  Eigen::MatrixXd rmse_series;  // n x T, per-step RMSE across surviving runs
  double mean_iterations = 0.0;
  int failed_runs = 0;
  int surviving_runs = 0;
};

struct MetricsReport {
  std::vector<FilterMetrics> filters;
  int runs = 0;
  int horizon = 0;
  // False when any filter had to exclude more than 1% of its runs; metrics
  // then still cover the surviving runs but comparisons may be biased.
  bool valid = true;
};

namespace detail {

// Everything one run contributes, kept per run index so that the final
// reduction is a fixed-order fold and the output does not depend on how runs
// were scheduled across workers.
struct RunContribution {
  std::vector<Eigen::MatrixXd> sq_err;  // per filter: n x T squared errors
  std::vector<double> iteration_sum;    // per filter: sum of per-step iteration counts
  std::vector<char> failed;             // per filter
};

inline RunContribution execute_run(const ScenarioConfig& scenario, std::uint64_t run_index) {
  const int T = scenario.horizon;
  const int n = scenario.model.state_dim;
  const int nf = static_cast<int>(scenario.filters.size());

  RunRngs rngs(scenario.base_seed, run_index);
  const auto [states, measurements] = simulate_trajectory(rngs, scenario);

  // All filters see the same trajectory and the same initial estimate.
  GaussianBelief init;
  init.mean = rngs.init.gaussian(scenario.initial_estimate_mean(), matrix_sqrt(scenario.init_cov));
  init.cov = scenario.init_cov;

  RunContribution out;
  out.sq_err.assign(nf, Eigen::MatrixXd::Zero(n, T));
  out.iteration_sum.assign(nf, 0.0);
  out.failed.assign(nf, 0);

  for (int fi = 0; fi < nf; ++fi) {
    const RobustLossConfig& cfg = scenario.filters[fi].second;
    GaussianBelief belief = init;
    try {
      for (int t = 0; t < T; ++t) {
        auto [next, diag] = robust_step(belief, measurements.row(t).transpose(),
                                        scenario.model, cfg, t);
        if (!next.mean.allFinite() || !next.cov.allFinite())
          throw NumericalError("state estimate is non-finite");
        belief = std::move(next);
        out.iteration_sum[fi] += diag.iterations;
        out.sq_err[fi].col(t) =
            (belief.mean - states.row(t).transpose()).array().square().matrix();
      }
    } catch (const NumericalError&) {
      out.failed[fi] = 1;
    }
  }
  return out;
}

}  // namespace detail

// Run the full study. Runs are independent and are distributed over the
// requested number of worker threads; per-run results land in slots indexed
// by run number and are reduced sequentially, so the report is bit-identical
// for any worker count. Failed runs (numerical divergence) are excluded from
// the averages and counted per filter.
inline MetricsReport run_monte_carlo(const ScenarioConfig& scenario, int workers = 1) {
  scenario.validate();
  if (workers < 1) throw std::invalid_argument("run_monte_carlo: workers must be >= 1");

  const int L = scenario.runs;
  const int T = scenario.horizon;
  const int n = scenario.model.state_dim;
  const int nf = static_cast<int>(scenario.filters.size());

  std::vector<detail::RunContribution> slots(L);
  std::atomic<int> next_run{0};
  auto worker_loop = [&] {
    for (int i = next_run.fetch_add(1); i < L; i = next_run.fetch_add(1))
      slots[i] = detail::execute_run(scenario, static_cast<std::uint64_t>(i));
  };

  const int nthreads = std::min(workers, L);
  if (nthreads <= 1) {
    worker_loop();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (int w = 0; w < nthreads; ++w) pool.emplace_back(worker_loop);
    for (auto& th : pool) th.join();
  }

  MetricsReport report;
  report.runs = L;
  report.horizon = T;
  for (int fi = 0; fi < nf; ++fi) {
    FilterMetrics metrics;
    metrics.name = scenario.filters[fi].first;

    Eigen::MatrixXd sq_sum = Eigen::MatrixXd::Zero(n, T);
    double iter_sum = 0.0;
    int survivors = 0;
    for (int i = 0; i < L; ++i) {
      if (slots[i].failed[fi]) continue;
      sq_sum += slots[i].sq_err[fi];
      iter_sum += slots[i].iteration_sum[fi];
      ++survivors;
    }
    metrics.surviving_runs = survivors;
    metrics.failed_runs = L - survivors;
    if (survivors > 0) {
      metrics.rmse_series = (sq_sum / survivors).array().sqrt();
      metrics.trmse = metrics.rmse_series.rowwise().mean();
      metrics.mean_iterations = iter_sum / (static_cast<double>(survivors) * T);
    } else {
      metrics.rmse_series = Eigen::MatrixXd::Constant(n, T, std::nan(""));
      metrics.trmse = Eigen::VectorXd::Constant(n, std::nan(""));
      metrics.mean_iterations = std::nan("");
    }
    if (metrics.failed_runs > 0.01 * L) report.valid = false;
    report.filters.push_back(std::move(metrics));
  }
  return report;
}

}  // namespace mcf
