#pragma once

#include <cmath>
#include <cstdint>

#include <Eigen/Dense>

namespace mcf {

namespace detail {

// SplitMix64 finalizer: a cheap, well-mixed 64-bit hash.
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace detail

// Deterministic stream of random numbers built on SplitMix64.
//
// The standard-library distributions are implementation-defined, which would
// make byte-identical output depend on the toolchain; everything here is
// spelled out instead. Each Monte-Carlo run owns independent streams keyed by
// (base_seed, run_index, stream_tag) so that results do not depend on worker
// scheduling: the run seed is base_seed + run_index, and the tag separates
// the process-noise, measurement-noise, and initial-estimate draws.
class RandomStream {
 public:
  RandomStream(std::uint64_t base_seed, std::uint64_t run_index, std::uint64_t stream_tag)
      : state_(detail::mix64(detail::mix64(base_seed + run_index) ^
                             (0x9E3779B97F4A7C15ULL * (stream_tag + 1)))) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return detail::mix64(state_);
  }

  // Uniform on [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller; consumes two uniforms per draw (no cached
  // spare, so the consumption pattern is trivially reproducible).
  double normal() {
    const double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
    const double u2 = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;        // [0, 1)
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  Eigen::VectorXd normal_vector(int n) {
    Eigen::VectorXd z(n);
    for (int i = 0; i < n; ++i) z(i) = normal();
    return z;
  }

  // Draw from N(mean, L L^T) given the lower factor L.
  Eigen::VectorXd gaussian(const Eigen::VectorXd& mean, const Eigen::MatrixXd& chol_lower) {
    return mean + chol_lower * normal_vector(static_cast<int>(mean.size()));
  }

 private:
  std::uint64_t state_;
};

// Stream tags used by the simulation harness.
enum : std::uint64_t {
  kStreamProcessNoise = 0,
  kStreamMeasurementNoise = 1,
  kStreamInitialEstimate = 2,
};

}  // namespace mcf
