#pragma once

// Line-delimited JSON files for sampled trajectories and measured runs (a
// header line, then one line per sample) and a JSON document for estimates.

#include <filesystem>
#include <string>

#include "excite/identify.hpp"
#include "excite/simrobot.hpp"
#include "excite/trajectory.hpp"

namespace excite {

void save_sampled(const SampledTrajectory& traj, const std::filesystem::path& path);
SampledTrajectory load_sampled(const std::filesystem::path& path);

void save_run(const MeasuredRun& run, const std::filesystem::path& path);
MeasuredRun load_run(const std::filesystem::path& path);

/// Identification output: estimate, covariance diagonal and provenance.
struct EstimateFile {
  std::string model_hash;
  std::string method;  // "rls" or "batch"
  Eigen::VectorXd estimate;
  Eigen::VectorXd covariance_diagonal;  // empty for batch
  std::size_t samples = 0;
  double delta = 0.0;
};

void save_estimate(const EstimateFile& est, const std::filesystem::path& path);
EstimateFile load_estimate(const std::filesystem::path& path);

}  // namespace excite
