#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "excite/dataset.hpp"
#include "excite/error.hpp"
#include "excite/experiments.hpp"
#include "excite/model_io.hpp"
#include "excite/rng.hpp"
#include "excite/run_io.hpp"
#include "support.hpp"

using namespace excite;
namespace ts = testing_support;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "excite_io_tests";
  fs::create_directories(dir);
  return dir / name;
}

struct Env {
  RobotModel model = ts::arm3();
  BaseProjection proj = compute_base_projection(model, 1);
  ConstraintSet cs = ConstraintSet::from_model(model);
};

const Env& env() {
  static const Env e;
  return e;
}

TrajectoryDataset small_dataset(std::size_t n, Provenance p = Provenance::gan) {
  const Env& e = env();
  TrajectoryDataset ds;
  ds.header = make_header(e.model, e.proj, 3, 4.0, 50.0);
  Rng rng(5);
  for (std::size_t i = 0; i < n; ++i) {
    TrajectoryRecord r;
    r.index = static_cast<std::int64_t>(i);
    r.provenance = i % 2 == 0 ? p : Provenance::optimizer;
    r.seed = rng.next();
    r.coeffs.resize(3 * 3 * 2);
    for (auto& v : r.coeffs) v = rng.uniform(-0.1, 0.1);
    r.offsets = Eigen::VectorXd::Zero(3);
    r.offsets[1] = 1.0 / 3.0;
    ds.records.push_back(r);
  }
  return ds;
}

}  // namespace

TEST(ModelIo, RoundTripPreservesEverything) {
  const RobotModel model = ts::lwr7();
  const std::string text = model_to_json_text(model);
  const RobotModel again = model_from_json_text(text);
  EXPECT_EQ(model_to_json_text(again), text);
  EXPECT_EQ(again.truth.vector(), model.truth.vector());
  EXPECT_EQ(model_hash(again), model_hash(model));
  RobotModel changed = again;
  changed.joints[3].qd_max += 1e-12;
  EXPECT_NE(model_hash(changed), model_hash(model));
}

TEST(ModelIo, RejectsBadDocuments) {
  EXPECT_THROW(model_from_json_text("{}"), FormatError);
  EXPECT_THROW(model_from_json_text("not json"), FormatError);
  std::string text = model_to_json_text(ts::arm3());
  const auto pos = text.find("\"version\": 1");
  ASSERT_NE(pos, std::string::npos);
  text.replace(pos, 12, "\"version\": 9");
  EXPECT_THROW(model_from_json_text(text), FormatError);
  EXPECT_THROW(load_model("/nonexistent/model.json"), FormatError);
}

TEST(Dataset, RoundTripIsExact) {
  const Env& e = env();
  TrajectoryDataset ds = small_dataset(6);
  annotate_dataset(e.model, e.proj, e.cs, ds, 2);
  ds.records[3].error = "optimizer diverged";
  ds.records[4].annotation.reset();
  const fs::path path = scratch("roundtrip.jsonl");
  save_dataset(ds, path);
  const TrajectoryDataset back = load_dataset(path);
  EXPECT_EQ(back.header, ds.header);
  ASSERT_EQ(back.records.size(), ds.records.size());
  for (std::size_t i = 0; i < ds.records.size(); ++i) {
    const auto& a = ds.records[i];
    const auto& b = back.records[i];
    EXPECT_EQ(a.coeffs, b.coeffs);
    EXPECT_EQ(a.offsets, b.offsets);
    EXPECT_EQ(a.seed, b.seed);
    EXPECT_EQ(a.provenance, b.provenance);
    EXPECT_EQ(a.error, b.error);
    ASSERT_EQ(a.annotation.has_value(), b.annotation.has_value());
    if (!a.annotation) continue;
    EXPECT_EQ(a.annotation->psi, b.annotation->psi);
    EXPECT_EQ(a.annotation->eigenvalues, b.annotation->eigenvalues);
    EXPECT_EQ(a.annotation->eig_fitness.value, b.annotation->eig_fitness.value);
    EXPECT_EQ(a.annotation->valid, b.annotation->valid);
    EXPECT_EQ(a.annotation->violation, b.annotation->violation);
    EXPECT_EQ(content_hash(a), content_hash(b));
  }
}

TEST(Dataset, AnnotationMatchesDirectComputation) {
  const Env& e = env();
  TrajectoryDataset ds = small_dataset(1);
  const Annotation a = annotate(e.model, e.proj, e.cs, ds.header, ds.records[0]);
  const SampledTrajectory s = sample(trajectory_of(ds.header, ds.records[0]), 50.0);
  const ExcitationSummary sum = summarize(stack_regressors(e.model, e.proj, s));
  EXPECT_LT((a.psi - sum.psi).norm(), 1e-9 * sum.psi.norm());
  EXPECT_NEAR(a.eig_fitness.value, sum.eigenvalue_fitness.value, 1e-6 * sum.eigenvalue_fitness.value);
  EXPECT_EQ(a.valid, check(s, e.model, e.cs).valid);
}

TEST(Dataset, ProvenanceFilter) {
  const TrajectoryDataset ds = small_dataset(7, Provenance::gan);
  const TrajectoryDataset gan = ds.filter(Provenance::gan);
  EXPECT_EQ(gan.records.size(), 4u);
  for (const auto& r : gan.records) EXPECT_EQ(r.provenance, Provenance::gan);
  EXPECT_EQ(ds.filter(Provenance::external).records.size(), 0u);
  EXPECT_EQ(gan.header, ds.header);
}

TEST(Dataset, CorruptRecordIsNamed) {
  TrajectoryDataset ds = small_dataset(4);
  std::stringstream buf;
  write_dataset(ds, buf);
  std::string text = buf.str();
  // Damage the third record (position 2).
  std::size_t line_start = 0;
  for (int i = 0; i < 3; ++i) line_start = text.find('\n', line_start) + 1;
  text.insert(line_start, "{\"index\":2,");
  std::istringstream in(text);
  try {
    read_dataset(in);
    FAIL() << "expected FormatError";
  } catch (const FormatError& err) {
    EXPECT_NE(std::string(err.what()).find("dataset record 2"), std::string::npos) << err.what();
  }
}

TEST(Dataset, WrongVersionOrShapeIsRejected) {
  TrajectoryDataset ds = small_dataset(1);
  std::string header = header_to_line(ds.header);
  const auto pos = header.find("\"version\":1");
  ASSERT_NE(pos, std::string::npos);
  header.replace(pos, 11, "\"version\":2");
  EXPECT_THROW(header_from_line(header), FormatError);
  EXPECT_THROW(header_from_line("{\"format\":\"other\"}"), FormatError);

  std::string line = record_to_line(ds.records[0]);
  ds.header.harmonics = 4;
  EXPECT_THROW(record_from_line(line, ds.header, 0), FormatError);
}

TEST(Dataset, HashMismatchRefusesAnnotation) {
  const Env& e = env();
  TrajectoryDataset ds = small_dataset(1);
  ds.header.model_hash = "0000000000000000";
  EXPECT_THROW(annotate_dataset(e.model, e.proj, e.cs, ds), FormatError);
}

TEST(Dataset, StreamingVisitsInOrder) {
  const TrajectoryDataset ds = small_dataset(5);
  std::stringstream buf;
  write_dataset(ds, buf);
  std::vector<std::int64_t> seen;
  const DatasetHeader h = for_each_record(buf, [&](const TrajectoryRecord& r) { seen.push_back(r.index); });
  EXPECT_EQ(h, ds.header);
  EXPECT_EQ(seen, (std::vector<std::int64_t>{0, 1, 2, 3, 4}));
}

TEST(RunIo, SampledAndMeasuredRoundTrip) {
  const Env& e = env();
  OptimizerConfig cfg;
  cfg.duration = 2.0;
  Rng rng(8);
  const FourierTrajectory a = random_valid_trajectory(e.model, e.cs, cfg, rng);
  const FourierTrajectory b = random_valid_trajectory(e.model, e.cs, cfg, rng);
  const std::vector<FourierTrajectory> both{a, b};
  const SampledTrajectory s = concatenate(both, 100.0, e.model);
  save_sampled(s, scratch("sampled.jsonl"));
  const SampledTrajectory s2 = load_sampled(scratch("sampled.jsonl"));
  EXPECT_EQ(s2.q, s.q);
  EXPECT_EQ(s2.qdd, s.qdd);
  EXPECT_EQ(s2.dt, s.dt);
  ASSERT_EQ(s2.segments.size(), s.segments.size());
  EXPECT_EQ(s2.segments[1].kind, s.segments[1].kind);
  EXPECT_EQ(s2.segments[1].count, s.segments[1].count);

  const MeasuredRun run = execute(e.model, e.model.truth, s, 0.1, 4, NoiseMode::additive);
  save_run(run, scratch("run.jsonl"));
  const MeasuredRun run2 = load_run(scratch("run.jsonl"));
  EXPECT_EQ(run2.tau, run.tau);
  EXPECT_EQ(run2.qd, run.qd);
  EXPECT_EQ(run2.seed, 4u);
  EXPECT_EQ(run2.mode, NoiseMode::additive);
  EXPECT_EQ(run2.noise_level, 0.1);
}

TEST(RunIo, EstimateRoundTrip) {
  EstimateFile est;
  est.model_hash = "abc";
  est.method = "rls";
  est.estimate = Eigen::VectorXd::LinSpaced(5, -1.0 / 3.0, 7.1e-300);
  est.covariance_diagonal = Eigen::VectorXd::Constant(5, 0.1);
  est.samples = 42;
  est.delta = 1e4;
  save_estimate(est, scratch("est.json"));
  const EstimateFile back = load_estimate(scratch("est.json"));
  EXPECT_EQ(back.estimate, est.estimate);
  EXPECT_EQ(back.covariance_diagonal, est.covariance_diagonal);
  EXPECT_EQ(back.method, "rls");
  EXPECT_EQ(back.samples, 42u);
  std::ofstream(scratch("bad.json")) << "{\"format\":\"nope\"}";
  EXPECT_THROW(load_estimate(scratch("bad.json")), FormatError);
}
