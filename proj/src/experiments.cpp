#include "excite/experiments.hpp"

#include "excite/error.hpp"
#include "excite/regressor_stack.hpp"
#include "excite/rng.hpp"

namespace excite {

FourierTrajectory random_valid_trajectory(const RobotModel& model, const ConstraintSet& cs,
                                          const OptimizerConfig& cfg, Rng& rng, int attempts) {
  for (int i = 0; i < attempts; ++i) {
    FourierTrajectory t = random_trajectory(model, cfg, rng);
    if (check(sample(t, cfg.rate_hz), model, cs).valid) return t;
  }
  throw NumericalError("no valid random trajectory in " + std::to_string(attempts) + " attempts");
}

namespace {

VariantResult run_variant(const RobotModel& model, const BaseProjection& projection,
                          const ConstraintSet& cs, const LongVsMultiConfig& cfg, std::string name,
                          int count, double duration, std::uint64_t stream,
                          const MeasuredRun& test) {
  VariantResult res;
  res.name = std::move(name);
  res.trajectories = count;
  res.duration = count * duration;

  OptimizerConfig oc = cfg.optimizer;
  oc.duration = duration;
  oc.time_budget_seconds = cfg.budget_seconds / count;

  RegressorStack data;
  Eigen::MatrixXd gram_sum;
  for (int i = 0; i < count; ++i) {
    const auto index = static_cast<std::uint64_t>(i);
    const OptimizedTrajectory opt =
        optimize_one(model, projection, cs, oc, derive_seed(derive_seed(cfg.seed, stream), index));
    res.evaluations += opt.evaluations;
    if (opt.report.valid) ++res.valid;
    const SampledTrajectory s = sample(opt.trajectory, oc.rate_hz);
    const Eigen::MatrixXd g = excitation_gram(model, projection, s);
    gram_sum = i == 0 ? g : Eigen::MatrixXd(gram_sum + g);
    const MeasuredRun run = execute(model, model.truth, s, cfg.noise_level,
                                    derive_seed(derive_seed(cfg.seed, stream + 1), index), cfg.noise_mode);
    append(data, stack_samples(model, projection, run.q, run.qd, run.qdd, run.tau));
  }
  res.stacked_fitness = eigenvalue_fitness_from_gram(gram_sum);

  IdentState state = IdentState::initial(projection.base_count(), cfg.delta);
  rls_update(state, data);
  res.evaluation = evaluate(model, projection, state.estimate, test, &state);
  return res;
}

}  // namespace

LongVsMultiResult compare_long_vs_multi(const RobotModel& model, const BaseProjection& projection,
                                        const ConstraintSet& cs, const LongVsMultiConfig& cfg) {
  if (cfg.segments < 1 || !(cfg.segment_duration > 0.0) || !(cfg.long_duration > 0.0) ||
      !(cfg.budget_seconds > 0.0)) {
    throw ContractError("compare_long_vs_multi: segments, durations and budget must be positive");
  }
  OptimizerConfig test_cfg = cfg.optimizer;
  test_cfg.duration = cfg.test_duration;
  Rng rng(derive_seed(cfg.seed, 1000));
  const FourierTrajectory held_out = random_valid_trajectory(model, cs, test_cfg, rng);
  const MeasuredRun test = execute(model, model.truth, sample(held_out, test_cfg.rate_hz),
                                   cfg.noise_level, derive_seed(cfg.seed, 1001), cfg.noise_mode);

  LongVsMultiResult out;
  out.single = run_variant(model, projection, cs, cfg, "single", 1, cfg.long_duration, 10, test);
  out.multi = run_variant(model, projection, cs, cfg, "multi", cfg.segments, cfg.segment_duration, 20, test);
  return out;
}

}  // namespace excite
