#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "excite/chain.hpp"
#include "excite/trajectory.hpp"

namespace excite {

enum class NoiseMode {
  multiplicative,  // x (1 + u)
  additive,        // x + u * rms(channel)
};

/// Measured samples of one execution; row k holds sample k.
struct MeasuredRun {
  double dt = 0.0;
  Eigen::MatrixXd q, qd, qdd, tau;  // n x J
  std::uint64_t seed = 0;
  double noise_level = 0.0;
  NoiseMode mode = NoiseMode::multiplicative;
  std::string source;
  std::vector<std::string> warnings;

  std::size_t size() const { return static_cast<std::size_t>(q.rows()); }
  int joints() const { return static_cast<int>(q.cols()); }
};

/// Executes a sampled trajectory on the ground-truth parameters: torques from
/// inverse dynamics plus friction, then i.i.d. u ~ U(-noise_level, noise_level)
/// applied to every scalar of q, qd, qdd and tau. Draw order: for each sample,
/// the J values of q, then qd, qdd and tau. A trajectory violating the model
/// constraints still runs and gets a warning.
MeasuredRun execute(const RobotModel& model, const InertialParams& truth,
                    const SampledTrajectory& traj, double noise_level, std::uint64_t seed,
                    NoiseMode mode = NoiseMode::multiplicative);

}  // namespace excite
