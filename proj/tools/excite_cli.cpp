// Command-line front end: dataset generation, annotation, selection,
// simulation, identification and reporting.

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <map>
#include <sstream>

#include "excite/dataset.hpp"
#include "excite/error.hpp"
#include "excite/experiments.hpp"
#include "excite/identify.hpp"
#include "excite/model_io.hpp"
#include "excite/optimizer.hpp"
#include "excite/regressor_stack.hpp"
#include "excite/run_io.hpp"
#include "excite/selection.hpp"
#include "excite/simrobot.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace excite;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

// Loaded once per command: model, constraint set and base projection.
struct Context {
  RobotModel model;
  ConstraintSet cs;
  BaseProjection projection;
};

struct CommonOptions {
  std::string model;
  std::uint64_t seed = 1;
  std::uint64_t projection_seed = 1;
  std::string out;
  int parallel = 1;
};

Context load_context(const CommonOptions& o) {
  Context c{load_model(o.model), {}, {}};
  c.cs = ConstraintSet::from_model(c.model);
  c.projection = compute_base_projection(c.model, o.projection_seed);
  return c;
}

void emit(const json& j) { std::cout << j.dump(2) << '\n'; }

json fitness_json(const FitnessValue& f) {
  if (f.ok()) return f.value;
  return f.describe();
}

struct OptimizerOptions {
  std::string objective = "eig";
  double duration = kDefaultDuration;
  int harmonics = kDefaultHarmonics;
  double rate = kDefaultRateHz;
  int population = 16;
  int generations = 30;
  long max_evaluations = 0;
  double penalty_weight = 1e3;
  double time_budget = 0.0;
};

void add_optimizer_options(CLI::App* app, OptimizerOptions& o) {
  app->add_option("--objective", o.objective, "Fitness to minimize")
      ->check(CLI::IsMember({"eig", "diag"}))
      ->capture_default_str();
  app->add_option("--duration", o.duration, "Trajectory period T [s]")->capture_default_str();
  app->add_option("--harmonics", o.harmonics, "Harmonics per joint")->capture_default_str();
  app->add_option("--rate", o.rate, "Sampling rate [Hz]")->capture_default_str();
  app->add_option("--population", o.population, "Evolution strategy population")->capture_default_str();
  app->add_option("--generations", o.generations, "Evolution strategy generations")->capture_default_str();
  app->add_option("--max-evaluations", o.max_evaluations, "Objective evaluation cap (0: none)")
      ->capture_default_str();
  app->add_option("--penalty-weight", o.penalty_weight, "Constraint penalty weight")->capture_default_str();
  app->add_option("--time-budget", o.time_budget, "Wall-clock cap per trajectory [s] (0: none)")
      ->capture_default_str();
}

OptimizerConfig make_config(const OptimizerOptions& o, std::uint64_t seed) {
  OptimizerConfig c;
  c.objective = o.objective == "diag" ? Objective::diagonal : Objective::eigenvalue;
  c.duration = o.duration;
  c.harmonics = o.harmonics;
  c.rate_hz = o.rate;
  c.population = o.population;
  c.generations = o.generations;
  c.max_evaluations = o.max_evaluations;
  c.penalty_weight = o.penalty_weight;
  c.time_budget_seconds = o.time_budget;
  c.seed = seed;
  c.validate();
  return c;
}

json dataset_summary(const TrajectoryDataset& ds) {
  std::size_t valid = 0, annotated = 0, errors = 0;
  for (const auto& r : ds.records) {
    annotated += r.annotation.has_value();
    valid += r.usable();
    errors += !r.error.empty();
  }
  return {{"records", ds.records.size()}, {"annotated", annotated}, {"valid", valid},
          {"errors", errors},             {"model_hash", ds.header.model_hash},
          {"base_count", ds.header.base_count}};
}

void require_matching_hash(const std::string& found, const RobotModel& model, const std::string& what) {
  const std::string hash = model_hash(model);
  if (!found.empty() && found != hash) {
    throw FormatError(what + " was produced for model " + found + ", not " + hash);
  }
}

// ---- report -------------------------------------------------------------

struct MetricRow {
  std::string variant;
  int epoch = 0;
  std::map<std::string, double> values;
};

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    cell.erase(0, cell.find_first_not_of(" \t\r"));
    cell.erase(cell.find_last_not_of(" \t\r") + 1);
    out.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

const std::vector<std::string> kMetricColumns = {"success_rate", "fitness", "spatial_diversity",
                                                 "inertial_diversity"};

std::vector<MetricRow> read_metrics(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw FormatError(path.string() + ": empty metrics file");
  const auto header = split_csv(line);
  auto column = [&](const std::string& name) -> int {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw FormatError(path.string() + ": missing column '" + name + "'");
    return static_cast<int>(it - header.begin());
  };
  const int c_variant = column("variant");
  const int c_epoch = column("epoch");
  std::vector<int> c_values;
  for (const auto& name : kMetricColumns) c_values.push_back(column(name));

  std::vector<MetricRow> rows;
  for (std::size_t n = 2; std::getline(in, line); ++n) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split_csv(line);
    if (cells.size() != header.size()) {
      throw FormatError(path.string() + ": line " + std::to_string(n) + " has " +
                        std::to_string(cells.size()) + " fields, expected " +
                        std::to_string(header.size()));
    }
    MetricRow row;
    row.variant = cells[c_variant];
    try {
      row.epoch = std::stoi(cells[c_epoch]);
      for (std::size_t k = 0; k < kMetricColumns.size(); ++k) {
        const std::string& cell = cells[c_values[k]];
        row.values[kMetricColumns[k]] =
            cell.empty() ? std::numeric_limits<double>::quiet_NaN() : std::stod(cell);
      }
    } catch (const std::logic_error&) {
      throw FormatError(path.string() + ": line " + std::to_string(n) + " has a non-numeric field");
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

// Per variant and epoch: run count, mean and standard deviation of each metric.
json write_metric_report(const std::vector<MetricRow>& rows, const fs::path& dir) {
  std::map<std::string, std::map<int, std::vector<const MetricRow*>>> groups;
  for (const auto& r : rows) groups[r.variant][r.epoch].push_back(&r);
  fs::create_directories(dir);
  json files = json::array();
  for (const auto& [variant, epochs] : groups) {
    const fs::path file = dir / (variant + ".csv");
    std::ofstream out(file);
    if (!out) throw FormatError("cannot write " + file.string());
    out << "epoch,runs";
    for (const auto& m : kMetricColumns) out << ',' << m << "_mean," << m << "_std";
    out << '\n';
    out.precision(17);
    for (const auto& [epoch, members] : epochs) {
      out << epoch << ',' << members.size();
      for (const auto& m : kMetricColumns) {
        double sum = 0.0, sq = 0.0;
        int n = 0;
        for (const auto* r : members) {
          const double v = r->values.at(m);
          if (std::isnan(v)) continue;
          sum += v;
          sq += v * v;
          ++n;
        }
        if (n == 0) {
          out << ",,";
          continue;
        }
        const double mean = sum / n;
        const double var = n > 1 ? std::max(0.0, (sq - n * mean * mean) / (n - 1)) : 0.0;
        out << ',' << mean << ',' << std::sqrt(var);
      }
      out << '\n';
    }
    files.push_back({{"variant", variant}, {"file", file.string()}, {"epochs", epochs.size()}});
  }
  return files;
}

void write_dataset_report(const TrajectoryDataset& ds, const fs::path& file) {
  std::ofstream out(file);
  if (!out) throw FormatError("cannot write " + file.string());
  out.precision(17);
  out << "index,provenance,valid,violation,eig_fitness,diag_fitness,psi_sum\n";
  for (const auto& r : ds.records) {
    out << r.index << ',' << to_string(r.provenance) << ',';
    if (!r.annotation) {
      out << ",,,,\n";
      continue;
    }
    const Annotation& a = *r.annotation;
    out << (a.valid ? 1 : 0) << ',' << to_string(a.violation) << ',';
    if (a.eig_fitness.ok()) out << a.eig_fitness.value;
    out << ',';
    if (a.diag_fitness.ok()) out << a.diag_fitness.value;
    out << ',' << a.psi.sum() << '\n';
  }
}

std::vector<std::size_t> positions_of(const TrajectoryDataset& ds, const std::vector<std::int64_t>& indices) {
  std::vector<std::size_t> pos;
  for (auto idx : indices) {
    const auto it = std::find_if(ds.records.begin(), ds.records.end(),
                                 [idx](const TrajectoryRecord& r) { return r.index == idx; });
    if (it == ds.records.end()) throw ContractError("no record with index " + std::to_string(idx));
    pos.push_back(static_cast<std::size_t>(it - ds.records.begin()));
  }
  return pos;
}

SampledTrajectory concat_records(const Context& ctx, const TrajectoryDataset& ds,
                                 const std::vector<std::size_t>& positions) {
  if (positions.empty()) throw ContractError("nothing to concatenate");
  std::vector<FourierTrajectory> trajs;
  for (auto p : positions) trajs.push_back(trajectory_of(ds.header, ds.records[p]));
  return concatenate(trajs, ds.header.rate_hz, ctx.model);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Excitation trajectory design and identification toolkit"};
  app.require_subcommand(1);
  CommonOptions common;
  OptimizerOptions opt;

  auto add_model = [&](CLI::App* sub) {
    sub->add_option("--model", common.model, "Robot model file")->required()->check(CLI::ExistingFile);
    sub->add_option("--projection-seed", common.projection_seed, "Seed of the base-parameter analysis")
        ->capture_default_str();
  };
  auto add_seed = [&](CLI::App* sub) {
    sub->add_option("--seed", common.seed, "Random seed")->capture_default_str();
  };
  auto add_out = [&](CLI::App* sub, bool required = true) {
    auto* o = sub->add_option("--out", common.out, "Output file");
    if (required) o->required();
  };
  auto add_parallel = [&](CLI::App* sub) {
    sub->add_option("--parallel", common.parallel, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  };

  // seed-set
  int count = 64;
  auto* seed_set = app.add_subcommand("seed-set", "Generate a dataset of optimized trajectories");
  add_model(seed_set);
  add_seed(seed_set);
  add_out(seed_set);
  add_parallel(seed_set);
  add_optimizer_options(seed_set, opt);
  seed_set->add_option("--count", count, "Number of trajectories")->check(CLI::PositiveNumber)->capture_default_str();

  // optimize
  auto* optimize = app.add_subcommand("optimize", "Optimize a single trajectory");
  add_model(optimize);
  add_seed(optimize);
  add_out(optimize);
  add_optimizer_options(optimize, opt);

  // annotate
  std::string in_path;
  auto* annotate_cmd = app.add_subcommand("annotate", "Recompute validity and excitation of every record");
  add_model(annotate_cmd);
  add_out(annotate_cmd);
  add_parallel(annotate_cmd);
  annotate_cmd->add_option("--in", in_path, "Input dataset")->required()->check(CLI::ExistingFile);

  // select
  std::size_t k = 8;
  bool distance_to_all = false;
  std::string indices_out;
  auto* select = app.add_subcommand("select", "Greedy selection of diverse, exciting trajectories");
  add_model(select);
  add_out(select);
  select->add_option("--in", in_path, "Annotated dataset")->required()->check(CLI::ExistingFile);
  select->add_option("-k,--k", k, "Number of trajectories to pick")->capture_default_str();
  select->add_flag("--distance-to-all", distance_to_all, "Distance to all picks instead of the last one");
  select->add_option("--indices-out", indices_out, "Write the picked record indices as JSON");

  // concat
  std::vector<std::int64_t> indices;
  auto* concat = app.add_subcommand("concat", "Concatenate dataset records into one sampled trajectory");
  add_model(concat);
  add_out(concat);
  concat->add_option("--in", in_path, "Dataset")->required()->check(CLI::ExistingFile);
  concat->add_option("--indices", indices, "Record indices in order (default: all valid)")->delimiter(',');

  // simulate
  double noise = 0.0;
  bool additive = false;
  auto* simulate = app.add_subcommand("simulate", "Execute a sampled trajectory on the ground-truth model");
  add_model(simulate);
  add_seed(simulate);
  add_out(simulate);
  simulate->add_option("--in", in_path, "Sampled trajectory file")->required()->check(CLI::ExistingFile);
  simulate->add_option("--noise", noise, "Uniform noise level in [0, 1)")->capture_default_str();
  simulate->add_flag("--additive", additive, "Additive noise scaled by channel RMS");

  // identify
  std::vector<std::string> runs;
  std::string method = "rls";
  double delta = 1e4;
  auto* identify = app.add_subcommand("identify", "Estimate base parameters from measured runs");
  add_model(identify);
  add_out(identify);
  identify->add_option("--in", runs, "Measured run files (stacked in order)")->required()->check(CLI::ExistingFile);
  identify->add_option("--method", method, "Estimator")->check(CLI::IsMember({"rls", "batch"}))->capture_default_str();
  identify->add_option("--delta", delta, "Initial RLS covariance scale")->capture_default_str();

  // evaluate
  std::string estimate_path;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Torque prediction error on a held-out run");
  add_model(evaluate_cmd);
  add_out(evaluate_cmd, false);
  evaluate_cmd->add_option("--estimate", estimate_path, "Estimate file")->required()->check(CLI::ExistingFile);
  evaluate_cmd->add_option("--in", in_path, "Held-out measured run")->required()->check(CLI::ExistingFile);

  // report
  std::string metrics_path, dataset_path;
  auto* report = app.add_subcommand("report", "Plot-ready columnar files from metrics or a dataset");
  add_out(report);
  auto* metrics_opt = report->add_option("--metrics", metrics_path, "Training metrics CSV")->check(CLI::ExistingFile);
  auto* dataset_opt = report->add_option("--dataset", dataset_path, "Annotated dataset")->check(CLI::ExistingFile);
  metrics_opt->excludes(dataset_opt);

  // compare-long-vs-multi
  LongVsMultiConfig lvm;
  auto* compare = app.add_subcommand("compare-long-vs-multi",
                                     "One long trajectory against several short ones under one budget");
  add_model(compare);
  add_seed(compare);
  add_out(compare, false);
  compare->add_option("--budget-seconds", lvm.budget_seconds, "Optimizer wall clock per variant [s]")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  compare->add_option("--noise", lvm.noise_level, "Uniform noise level")->capture_default_str();
  compare->add_option("--segments", lvm.segments, "Short trajectories")->capture_default_str();
  compare->add_option("--segment-duration", lvm.segment_duration, "Short trajectory period [s]")->capture_default_str();
  compare->add_option("--long-duration", lvm.long_duration, "Long trajectory period [s]")->capture_default_str();
  compare->add_option("--objective", opt.objective, "Fitness to minimize")
      ->check(CLI::IsMember({"eig", "diag"}))
      ->capture_default_str();

  try {
    app.parse(argc, argv);
    if (*report && metrics_path.empty() && dataset_path.empty()) {
      throw CLI::RequiredError("report: --metrics or --dataset");
    }
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << json{{"error", "usage"}, {"message", e.what()}}.dump() << '\n';
    return kExitUsage;
  }

  try {
    if (*seed_set || *optimize) {
      const Context ctx = load_context(common);
      const OptimizerConfig cfg = make_config(opt, common.seed);
      if (*seed_set) {
        const TrajectoryDataset ds = generate_seed_set(ctx.model, ctx.projection, ctx.cs, cfg, count, common.parallel);
        save_dataset(ds, common.out);
        json summary = dataset_summary(ds);
        summary["command"] = "seed-set";
        summary["seed"] = common.seed;
        emit(summary);
      } else {
        const OptimizedTrajectory r = optimize_one(ctx.model, ctx.projection, ctx.cs, cfg, common.seed);
        TrajectoryDataset ds;
        ds.header = make_header(ctx.model, ctx.projection, cfg.harmonics, cfg.duration, cfg.rate_hz);
        TrajectoryRecord rec;
        rec.coeffs = r.trajectory.coefficients();
        rec.offsets = r.trajectory.offsets();
        rec.seed = common.seed;
        rec.annotation = annotate(ctx.model, ctx.projection, ctx.cs, ds.header, rec);
        ds.records.push_back(std::move(rec));
        save_dataset(ds, common.out);
        emit({{"command", "optimize"},
              {"seed", common.seed},
              {"objective", r.objective},
              {"fitness", fitness_json(r.fitness)},
              {"valid", r.report.valid},
              {"violation", to_string(r.report.kind)},
              {"evaluations", r.evaluations},
              {"wall_seconds", r.wall_seconds},
              {"model_hash", ds.header.model_hash}});
      }
    } else if (*annotate_cmd) {
      const Context ctx = load_context(common);
      TrajectoryDataset ds = load_dataset(in_path);
      annotate_dataset(ctx.model, ctx.projection, ctx.cs, ds, common.parallel);
      save_dataset(ds, common.out);
      json summary = dataset_summary(ds);
      summary["command"] = "annotate";
      emit(summary);
    } else if (*select) {
      const Context ctx = load_context(common);
      const TrajectoryDataset ds = load_dataset(in_path);
      require_matching_hash(ds.header.model_hash, ctx.model, "dataset");
      const auto picks = greedy_select(ds, k, {distance_to_all});
      std::vector<std::int64_t> picked;
      for (auto p : picks) picked.push_back(ds.records[p].index);
      save_sampled(concat_records(ctx, ds, picks), common.out);
      if (!indices_out.empty()) {
        std::ofstream f(indices_out);
        if (!f) throw FormatError("cannot write " + indices_out);
        f << json{{"indices", picked}, {"distance_to_all", distance_to_all}}.dump() << '\n';
      }
      emit({{"command", "select"}, {"indices", picked}});
    } else if (*concat) {
      const Context ctx = load_context(common);
      const TrajectoryDataset ds = load_dataset(in_path);
      std::vector<std::size_t> positions;
      if (indices.empty()) {
        for (std::size_t p = 0; p < ds.records.size(); ++p) {
          if (ds.records[p].usable()) positions.push_back(p);
        }
      } else {
        positions = positions_of(ds, indices);
      }
      const SampledTrajectory s = concat_records(ctx, ds, positions);
      save_sampled(s, common.out);
      std::size_t bridges = 0;
      for (const auto& seg : s.segments) bridges += seg.kind == Segment::Kind::bridge;
      emit({{"command", "concat"}, {"trajectories", positions.size()}, {"bridges", bridges},
            {"samples", s.size()}, {"duration", s.dt * static_cast<double>(s.size() - 1)}});
    } else if (*simulate) {
      const RobotModel model = load_model(common.model);
      const SampledTrajectory s = load_sampled(in_path);
      const MeasuredRun run = execute(model, model.truth, s, noise, common.seed,
                                      additive ? NoiseMode::additive : NoiseMode::multiplicative);
      save_run(run, common.out);
      emit({{"command", "simulate"}, {"samples", run.size()}, {"noise", noise}, {"seed", common.seed},
            {"warnings", run.warnings}});
    } else if (*identify) {
      const Context ctx = load_context(common);
      RegressorStack stack;
      for (const auto& path : runs) {
        const MeasuredRun run = load_run(path);
        append(stack, stack_samples(ctx.model, ctx.projection, run.q, run.qd, run.qdd, run.tau));
      }
      EstimateFile est;
      est.model_hash = model_hash(ctx.model);
      est.method = method;
      est.samples = stack.samples();
      if (method == "batch") {
        est.estimate = batch_identify(stack);
      } else {
        IdentState state = IdentState::initial(ctx.projection.base_count(), delta);
        rls_update(state, stack);
        est.estimate = state.estimate;
        est.covariance_diagonal = state.covariance.diagonal();
        est.delta = delta;
      }
      save_estimate(est, common.out);
      emit({{"command", "identify"}, {"method", method}, {"samples", est.samples},
            {"base_count", est.estimate.size()}, {"covariance_norm", est.covariance_diagonal.norm()}});
    } else if (*evaluate_cmd) {
      const Context ctx = load_context(common);
      const EstimateFile est = load_estimate(estimate_path);
      require_matching_hash(est.model_hash, ctx.model, "estimate");
      const MeasuredRun test = load_run(in_path);
      EvalReport rep = evaluate(ctx.model, ctx.projection, est.estimate, test);
      if (est.covariance_diagonal.size() > 0) rep.covariance_norm = est.covariance_diagonal.norm();
      const json result = {{"command", "evaluate"},
                           {"nmse", rep.nmse},
                           {"average_nmse", rep.average_nmse},
                           {"covariance_norm", rep.covariance_norm},
                           {"warnings", rep.warnings}};
      if (!common.out.empty()) {
        std::ofstream f(common.out);
        if (!f) throw FormatError("cannot write " + common.out);
        f << result.dump(2) << '\n';
      }
      emit(result);
    } else if (*report) {
      if (!metrics_path.empty()) {
        emit({{"command", "report"}, {"files", write_metric_report(read_metrics(metrics_path), common.out)}});
      } else {
        const TrajectoryDataset ds = load_dataset(dataset_path);
        write_dataset_report(ds, common.out);
        json summary = dataset_summary(ds);
        summary["command"] = "report";
        summary["file"] = common.out;
        emit(summary);
      }
    } else if (*compare) {
      const Context ctx = load_context(common);
      lvm.seed = common.seed;
      lvm.optimizer = make_config(opt, common.seed);
      const LongVsMultiResult r = compare_long_vs_multi(ctx.model, ctx.projection, ctx.cs, lvm);
      std::ostringstream table;
      table.precision(17);
      table << "variant,trajectories,duration_s,valid,eig_fitness,average_nmse,covariance_norm\n";
      json rows = json::array();
      for (const VariantResult* v : {&r.single, &r.multi}) {
        table << v->name << ',' << v->trajectories << ',' << v->duration << ',' << v->valid << ','
              << (v->stacked_fitness.ok() ? std::to_string(v->stacked_fitness.value) : "") << ','
              << v->evaluation.average_nmse << ',' << v->evaluation.covariance_norm << '\n';
        rows.push_back({{"variant", v->name},
                        {"trajectories", v->trajectories},
                        {"duration_s", v->duration},
                        {"valid", v->valid},
                        {"eig_fitness", fitness_json(v->stacked_fitness)},
                        {"average_nmse", v->evaluation.average_nmse},
                        {"nmse", v->evaluation.nmse},
                        {"covariance_norm", v->evaluation.covariance_norm},
                        {"evaluations", v->evaluations}});
      }
      if (!common.out.empty()) {
        std::ofstream f(common.out);
        if (!f) throw FormatError("cannot write " + common.out);
        f << table.str();
      }
      std::cerr << table.str();
      emit({{"command", "compare-long-vs-multi"}, {"seed", common.seed},
            {"budget_seconds", lvm.budget_seconds}, {"noise", lvm.noise_level}, {"rows", rows}});
    }
  } catch (const ContractError& e) {
    std::cerr << json{{"error", "contract"}, {"message", e.what()}}.dump() << '\n';
    return kExitFailure;
  } catch (const FormatError& e) {
    std::cerr << json{{"error", "format"}, {"message", e.what()}}.dump() << '\n';
    return kExitFailure;
  } catch (const NumericalError& e) {
    std::cerr << json{{"error", "numerical"}, {"message", e.what()}}.dump() << '\n';
    return kExitFailure;
  } catch (const std::exception& e) {
    std::cerr << json{{"error", "internal"}, {"message", e.what()}}.dump() << '\n';
    return kExitFailure;
  }
  return 0;
}
