#include "excite/simrobot.hpp"

#include "excite/constraints.hpp"
#include "excite/error.hpp"
#include "excite/rng.hpp"

namespace excite {

MeasuredRun execute(const RobotModel& model, const InertialParams& truth,
                    const SampledTrajectory& traj, double noise_level, std::uint64_t seed,
                    NoiseMode mode) {
  if (!(noise_level >= 0.0 && noise_level < 1.0)) {
    throw ContractError("execute: noise level must lie in [0, 1)");
  }
  const int joints = model.joint_count();
  if (traj.joints() != joints) throw ContractError("execute: joint count mismatch");
  if (truth.vector().size() != joints * kParamsPerLink) {
    throw ContractError("execute: ground-truth parameter vector has the wrong length");
  }

  MeasuredRun run;
  run.dt = traj.dt;
  run.seed = seed;
  run.noise_level = noise_level;
  run.mode = mode;
  run.source = traj.source;
  run.q = traj.q;
  run.qd = traj.qd;
  run.qdd = traj.qdd;
  run.tau.resize(traj.q.rows(), joints);
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const JointState s = traj.state(k);
    run.tau.row(static_cast<Eigen::Index>(k)) =
        (rnea(model, truth, s, model.gravity) + friction_torque(truth, s.qd)).transpose();
  }

  const ValidityReport report = check(traj, model, ConstraintSet::from_model(model));
  if (!report.valid) {
    run.warnings.push_back("trajectory violates the model constraints (" +
                           std::string(to_string(report.kind)) + " at sample " +
                           std::to_string(report.sample) + ")");
  }
  if (noise_level == 0.0) return run;

  Eigen::MatrixXd* channels[] = {&run.q, &run.qd, &run.qdd, &run.tau};
  Eigen::RowVectorXd rms[4];
  for (int c = 0; c < 4; ++c) {
    const auto n = static_cast<double>(std::max<Eigen::Index>(1, channels[c]->rows()));
    rms[c] = (channels[c]->colwise().squaredNorm() / n).cwiseSqrt();
  }
  Rng rng(seed);
  for (Eigen::Index k = 0; k < run.q.rows(); ++k) {
    for (int c = 0; c < 4; ++c) {
      for (int j = 0; j < joints; ++j) {
        const double u = rng.uniform(-noise_level, noise_level);
        double& x = (*channels[c])(k, j);
        x = mode == NoiseMode::multiplicative ? x * (1.0 + u) : x + u * rms[c][j];
      }
    }
  }
  return run;
}

}  // namespace excite
