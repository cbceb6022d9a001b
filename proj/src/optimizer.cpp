#include "excite/optimizer.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <numbers>
#include <numeric>
#include <thread>

#include "excite/error.hpp"
#include "excite/fitness.hpp"
#include "excite/regressor_stack.hpp"
#include "excite/rng.hpp"

namespace excite {

void OptimizerConfig::validate() const {
  if (population < 2) throw ContractError("optimizer: population must be >= 2");
  if (generations < 0) throw ContractError("optimizer: generations must be >= 0");
  if (!(mutation_scale > 0.0) || !(compass_step > 0.0) || !(compass_min_step > 0.0)) {
    throw ContractError("optimizer: step sizes must be > 0");
  }
  if (!(compass_shrink > 0.0 && compass_shrink < 1.0)) {
    throw ContractError("optimizer: compass shrink factor must lie in (0, 1)");
  }
  if (!(penalty_weight > 0.0)) throw ContractError("optimizer: penalty weight must be > 0");
  if (coefficient_bound < 0.0) throw ContractError("optimizer: coefficient bound must be >= 0");
  if (!(offset_fraction >= 0.0 && offset_fraction <= 1.0)) {
    throw ContractError("optimizer: offset fraction must lie in [0, 1]");
  }
  if (!(safety >= 0.0 && safety < 0.5)) throw ContractError("optimizer: safety must lie in [0, 0.5)");
  if (!(duration > 0.0) || harmonics < 1 || !(rate_hz > 0.0)) {
    throw ContractError("optimizer: duration, harmonics and rate must be positive");
  }
  if (max_evaluations < 0 || time_budget_seconds < 0.0) {
    throw ContractError("optimizer: budgets must be >= 0");
  }
}

SearchBox search_box(const RobotModel& model, const OptimizerConfig& cfg) {
  const int joints = model.joint_count();
  const int h = cfg.harmonics;
  const double omega = 2.0 * std::numbers::pi / cfg.duration;
  const Eigen::Index n_coef = static_cast<Eigen::Index>(joints) * h * 2;
  SearchBox box{Eigen::VectorXd(n_coef + joints), Eigen::VectorXd(n_coef + joints)};
  for (int j = 0; j < joints; ++j) {
    const JointSpec& js = model.joints[j];
    // |qd| <= 2 H c and |qdd| <= omega H (H + 1) c for coefficients bounded by c.
    double bound = cfg.coefficient_bound;
    if (bound == 0.0) {
      bound = std::min(0.8 * js.qd_max / (2.0 * h), 0.8 * js.qdd_max / (omega * h * (h + 1)));
    }
    box.lower.segment(j * h * 2, h * 2).setConstant(-bound);
    box.upper.segment(j * h * 2, h * 2).setConstant(bound);
    const double centre = 0.5 * (js.q_min + js.q_max);
    const double half = 0.5 * cfg.offset_fraction * (js.q_max - js.q_min);
    box.lower[n_coef + j] = centre - half;
    box.upper[n_coef + j] = centre + half;
  }
  return box;
}

namespace {

struct Tightened {
  RobotModel model;
  ConstraintSet cs;
};

Tightened tighten(const RobotModel& model, const ConstraintSet& cs, double safety) {
  Tightened t{model, cs};
  for (auto& js : t.model.joints) {
    const double centre = 0.5 * (js.q_min + js.q_max);
    const double half = 0.5 * (js.q_max - js.q_min) * (1.0 - safety);
    js.q_min = centre - half;
    js.q_max = centre + half;
    js.qd_max *= 1.0 - safety;
    js.qdd_max *= 1.0 - safety;
  }
  // Geometric clearances gain safety/4 metres (5 mm at the default).
  const double extra = 0.25 * safety;
  t.cs.collision_margin += extra;
  for (auto& h : t.cs.halfspaces) h.offset += extra;
  return t;
}

double objective_of(const FitnessValue& f, double penalty, double weight) {
  const double fit = f.ok() ? std::log10(f.value) : kUndefinedFitnessLog;
  return fit + weight * penalty;
}

FitnessValue fitness_of(Objective kind, const Eigen::MatrixXd& gram) {
  return kind == Objective::eigenvalue ? eigenvalue_fitness_from_gram(gram)
                                       : diagonal_fitness_from_gram(gram);
}

FourierTrajectory to_trajectory(const Eigen::VectorXd& x, int joints, const OptimizerConfig& cfg) {
  const Eigen::Index n_coef = x.size() - joints;
  return build_trajectory(x.head(n_coef), x.tail(joints), cfg.harmonics, cfg.duration);
}

class Search {
 public:
  Search(const RobotModel& model, const BaseProjection& projection, const ConstraintSet& cs,
         const OptimizerConfig& cfg)
      : model_(model),
        projection_(projection),
        cfg_(cfg),
        tight_(tighten(model, cs, cfg.safety)),
        box_(search_box(model, cfg)),
        scale_(0.5 * (box_.upper - box_.lower)),
        start_(std::chrono::steady_clock::now()) {}

  double evaluate(const Eigen::VectorXd& x) {
    ++evaluations_;
    const SampledTrajectory s = sample(to_trajectory(x, model_.joint_count(), cfg_), cfg_.rate_hz);
    const double penalty = excite::scan(s, tight_.model, tight_.cs).penalty;
    const FitnessValue f = fitness_of(cfg_.objective, excitation_gram(model_, projection_, s));
    return objective_of(f, penalty, cfg_.penalty_weight);
  }

  bool exhausted() const {
    if (cfg_.max_evaluations > 0 && evaluations_ >= cfg_.max_evaluations) return true;
    return cfg_.time_budget_seconds > 0.0 && elapsed() >= cfg_.time_budget_seconds;
  }

  double elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

  Eigen::VectorXd clamp(Eigen::VectorXd x) const { return x.cwiseMax(box_.lower).cwiseMin(box_.upper); }

  const SearchBox& box() const { return box_; }
  const Eigen::VectorXd& scale() const { return scale_; }
  long evaluations() const { return evaluations_; }

 private:
  const RobotModel& model_;
  const BaseProjection& projection_;
  const OptimizerConfig& cfg_;
  Tightened tight_;
  SearchBox box_;
  Eigen::VectorXd scale_;
  std::chrono::steady_clock::time_point start_;
  long evaluations_ = 0;
};

struct Individual {
  Eigen::VectorXd x;
  double objective;
};

Eigen::VectorXd uniform_in(const SearchBox& box, Rng& rng) {
  Eigen::VectorXd x(box.lower.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = rng.uniform(box.lower[i], box.upper[i]);
  return x;
}

}  // namespace

CandidateScore score_candidate(const RobotModel& model, const BaseProjection& projection,
                               const ConstraintSet& cs, const OptimizerConfig& cfg,
                               const FourierTrajectory& trajectory) {
  const Tightened tight = tighten(model, cs, cfg.safety);
  const SampledTrajectory s = sample(trajectory, cfg.rate_hz);
  CandidateScore score;
  score.penalty = excite::scan(s, tight.model, tight.cs).penalty;
  score.fitness = fitness_of(cfg.objective, excitation_gram(model, projection, s));
  score.objective = objective_of(score.fitness, score.penalty, cfg.penalty_weight);
  return score;
}

FourierTrajectory random_trajectory(const RobotModel& model, const OptimizerConfig& cfg, Rng& rng) {
  return to_trajectory(uniform_in(search_box(model, cfg), rng), model.joint_count(), cfg);
}

OptimizedTrajectory optimize_one(const RobotModel& model, const BaseProjection& projection,
                                 const ConstraintSet& cs, const OptimizerConfig& cfg,
                                 std::uint64_t seed) {
  cfg.validate();
  Search search(model, projection, cs, cfg);
  Rng rng(seed);
  OptimizedTrajectory out;
  out.seed = seed;

  // Global phase.
  const int mu = cfg.population;
  std::vector<Individual> parents;
  parents.reserve(2 * mu);
  for (int i = 0; i < mu; ++i) {
    Eigen::VectorXd x = uniform_in(search.box(), rng);
    const double f = search.evaluate(x);
    parents.push_back({std::move(x), f});
  }
  const auto by_objective = [](const Individual& a, const Individual& b) {
    return a.objective < b.objective;
  };
  std::stable_sort(parents.begin(), parents.end(), by_objective);
  out.evolution_trace.push_back(parents.front().objective);

  double sigma = cfg.mutation_scale;
  for (int g = 0; g < cfg.generations && !search.exhausted(); ++g) {
    std::vector<Individual> pool = parents;
    int successes = 0;
    for (int k = 0; k < mu; ++k) {
      const Individual& parent = parents[rng.below(static_cast<std::uint64_t>(mu))];
      Eigen::VectorXd child = parent.x;
      for (Eigen::Index i = 0; i < child.size(); ++i) child[i] += sigma * search.scale()[i] * rng.normal();
      child = search.clamp(std::move(child));
      const double f = search.evaluate(child);
      if (f < parent.objective) ++successes;
      pool.push_back({std::move(child), f});
    }
    // One-fifth success rule on the global mutation strength.
    sigma *= successes * 5 > mu ? 1.22 : 0.82;
    sigma = std::clamp(sigma, 1e-3, 1.0);
    std::stable_sort(pool.begin(), pool.end(), by_objective);
    pool.resize(mu);
    parents = std::move(pool);
    out.evolution_trace.push_back(parents.front().objective);
  }

  // Local phase.
  Eigen::VectorXd x = parents.front().x;
  double fx = parents.front().objective;
  out.compass_trace.push_back(fx);
  for (double step = cfg.compass_step; step >= cfg.compass_min_step && !search.exhausted();) {
    bool improved = false;
    for (Eigen::Index i = 0; i < x.size() && !search.exhausted(); ++i) {
      for (const double direction : {1.0, -1.0}) {
        Eigen::VectorXd y = x;
        y[i] = std::clamp(x[i] + direction * step * search.scale()[i], search.box().lower[i],
                          search.box().upper[i]);
        if (y[i] == x[i]) continue;
        const double fy = search.evaluate(y);
        if (fy < fx) {
          x = std::move(y);
          fx = fy;
          out.compass_trace.push_back(fx);
          improved = true;
          break;
        }
      }
    }
    if (!improved) step *= cfg.compass_shrink;
  }

  out.trajectory = to_trajectory(x, model.joint_count(), cfg);
  out.objective = fx;
  const SampledTrajectory s = sample(out.trajectory, cfg.rate_hz);
  out.report = check(s, model, cs);
  out.fitness = fitness_of(cfg.objective, excitation_gram(model, projection, s));
  out.evaluations = search.evaluations();
  out.wall_seconds = search.elapsed();
  return out;
}

TrajectoryDataset generate_seed_set(const RobotModel& model, const BaseProjection& projection,
                                    const ConstraintSet& cs, const OptimizerConfig& cfg, int count,
                                    int parallelism) {
  if (count < 1) throw ContractError("generate_seed_set: count must be >= 1");
  cfg.validate();
  TrajectoryDataset ds;
  ds.header = make_header(model, projection, cfg.harmonics, cfg.duration, cfg.rate_hz);
  ds.records.resize(static_cast<std::size_t>(count));

  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < count; i = next++) {
      TrajectoryRecord& r = ds.records[static_cast<std::size_t>(i)];
      r.index = i;
      r.provenance = Provenance::optimizer;
      r.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(i));
      try {
        const OptimizedTrajectory opt = optimize_one(model, projection, cs, cfg, r.seed);
        r.coeffs = opt.trajectory.coefficients();
        r.offsets = opt.trajectory.offsets();
        r.annotation = annotate(model, projection, cs, ds.header, r);
      } catch (const std::exception& e) {
        r.coeffs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(model.joint_count()) * cfg.harmonics * 2);
        r.offsets = Eigen::VectorXd::Zero(model.joint_count());
        r.annotation.reset();
        r.error = e.what();
      }
    }
  };
  const int threads = std::clamp(parallelism, 1, count);
  {
    std::vector<std::jthread> pool;
    for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
  }
  return ds;
}

}  // namespace excite
