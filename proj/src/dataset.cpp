#include "excite/dataset.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <json.hpp>
#include <mutex>
#include <thread>

#include "excite/error.hpp"
#include "excite/model_io.hpp"
#include "excite/regressor_stack.hpp"

namespace excite {

using nlohmann::json;

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::optimizer:
      return "optimizer";
    case Provenance::gan:
      return "gan";
    case Provenance::external:
      return "external";
  }
  return "external";
}

Provenance provenance_from_string(std::string_view text) {
  if (text == "optimizer") return Provenance::optimizer;
  if (text == "gan") return Provenance::gan;
  if (text == "external") return Provenance::external;
  throw FormatError("unknown provenance '" + std::string(text) + "'");
}

TrajectoryDataset TrajectoryDataset::filter(Provenance p) const {
  TrajectoryDataset out{header, {}};
  std::copy_if(records.begin(), records.end(), std::back_inserter(out.records),
               [p](const TrajectoryRecord& r) { return r.provenance == p; });
  return out;
}

DatasetHeader make_header(const RobotModel& model, const BaseProjection& projection, int harmonics,
                          double duration, double rate_hz) {
  DatasetHeader h;
  h.joints = model.joint_count();
  h.harmonics = harmonics;
  h.duration = duration;
  h.rate_hz = rate_hz;
  h.model_hash = model_hash(model);
  h.base_count = projection.base_count();
  return h;
}

FourierTrajectory trajectory_of(const DatasetHeader& header, const TrajectoryRecord& record) {
  return build_trajectory(record.coeffs, record.offsets, header.harmonics, header.duration);
}

Annotation annotate(const RobotModel& model, const BaseProjection& projection,
                    const ConstraintSet& cs, const DatasetHeader& header,
                    const TrajectoryRecord& record) {
  const SampledTrajectory sampled = sample(trajectory_of(header, record), header.rate_hz);
  const ValidityReport report = check(sampled, model, cs);
  const ExcitationSummary summary = summarize_gram(excitation_gram(model, projection, sampled));
  Annotation a;
  a.valid = report.valid;
  a.violation = report.kind;
  a.violation_sample = report.sample;
  a.worst_margin = report.worst_margin;
  a.eig_fitness = summary.eigenvalue_fitness;
  a.diag_fitness = summary.diagonal_fitness;
  a.psi = summary.psi;
  a.eigenvalues = summary.eigenvalues;
  return a;
}

void annotate_dataset(const RobotModel& model, const BaseProjection& projection,
                      const ConstraintSet& cs, TrajectoryDataset& dataset, int parallelism) {
  DatasetHeader& h = dataset.header;
  const std::string hash = model_hash(model);
  if (h.model_hash.empty()) h.model_hash = hash;
  if (h.model_hash != hash) {
    throw FormatError("dataset model hash " + h.model_hash + " does not match model " + hash);
  }
  if (h.base_count == 0) h.base_count = projection.base_count();
  if (h.base_count != projection.base_count() || h.joints != model.joint_count()) {
    throw FormatError("dataset dimensions do not match the model");
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < dataset.records.size(); i = next++) {
      try {
        dataset.records[i].annotation = annotate(model, projection, cs, h, dataset.records[i]);
        dataset.records[i].error.clear();
      } catch (const std::exception&) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const int threads = std::clamp(parallelism, 1, std::max(1, static_cast<int>(dataset.records.size())));
  {
    std::vector<std::jthread> pool;
    for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
  }
  if (failure) std::rethrow_exception(failure);
}

std::uint64_t content_hash(const TrajectoryRecord& record) {
  std::uint64_t h = fnv1a64(record.coeffs.data(), sizeof(double) * record.coeffs.size());
  return fnv1a64(record.offsets.data(), sizeof(double) * record.offsets.size(), h);
}

namespace {

json vector_json(const Eigen::VectorXd& v) { return std::vector<double>(v.begin(), v.end()); }

Eigen::VectorXd vector_from(const json& j, const char* what, Eigen::Index expected) {
  if (!j.is_array()) throw FormatError(std::string("'") + what + "' must be an array");
  if (expected >= 0 && static_cast<Eigen::Index>(j.size()) != expected) {
    throw FormatError(std::string("'") + what + "' has " + std::to_string(j.size()) +
                      " entries, expected " + std::to_string(expected));
  }
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  return v;
}

std::string_view status_name(FitnessValue::Status s) {
  switch (s) {
    case FitnessValue::Status::ok:
      return "ok";
    case FitnessValue::Status::unidentifiable:
      return "unidentifiable";
    case FitnessValue::Status::unexcited:
      return "unexcited";
  }
  return "ok";
}

json fitness_json(const FitnessValue& f) {
  json j = {{"status", status_name(f.status)}, {"value", nullptr}, {"index", nullptr}};
  if (f.ok()) j["value"] = f.value;
  if (f.status == FitnessValue::Status::unexcited) j["index"] = f.index;
  return j;
}

FitnessValue fitness_from(const json& j) {
  FitnessValue f;
  const auto status = j.at("status").get<std::string>();
  if (status == "ok") {
    f.status = FitnessValue::Status::ok;
    f.value = j.at("value").get<double>();
  } else if (status == "unidentifiable") {
    f.status = FitnessValue::Status::unidentifiable;
  } else if (status == "unexcited") {
    f.status = FitnessValue::Status::unexcited;
    f.index = j.at("index").get<int>();
  } else {
    throw FormatError("unknown fitness status '" + status + "'");
  }
  return f;
}

}  // namespace

std::string header_to_line(const DatasetHeader& h) {
  const json j = {{"format", kDatasetFormatName}, {"version", h.version},   {"joints", h.joints},
                  {"harmonics", h.harmonics},     {"duration", h.duration}, {"rate_hz", h.rate_hz},
                  {"model_hash", h.model_hash},   {"base_count", h.base_count}};
  return j.dump();
}

DatasetHeader header_from_line(const std::string& line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    throw FormatError(std::string("dataset header: ") + e.what());
  }
  try {
    if (j.value("format", std::string()) != kDatasetFormatName) {
      throw FormatError("dataset header: not an " + std::string(kDatasetFormatName) + " file");
    }
    DatasetHeader h;
    h.version = j.at("version").get<int>();
    if (h.version != kDatasetFormatVersion) {
      throw FormatError("dataset header: unsupported version " + std::to_string(h.version) +
                        " (expected " + std::to_string(kDatasetFormatVersion) + ")");
    }
    h.joints = j.at("joints").get<int>();
    h.harmonics = j.at("harmonics").get<int>();
    h.duration = j.at("duration").get<double>();
    h.rate_hz = j.at("rate_hz").get<double>();
    h.model_hash = j.value("model_hash", std::string());
    h.base_count = j.value("base_count", 0);
    if (h.joints < 1 || h.harmonics < 1 || !(h.duration > 0.0) || !(h.rate_hz > 0.0) ||
        h.base_count < 0) {
      throw FormatError("dataset header: dimensions must be positive");
    }
    return h;
  } catch (const json::exception& e) {
    throw FormatError(std::string("dataset header: ") + e.what());
  }
}

std::string record_to_line(const TrajectoryRecord& r) {
  json j = {{"index", r.index},
            {"provenance", to_string(r.provenance)},
            {"seed", r.seed},
            {"coeffs", vector_json(r.coeffs)},
            {"offsets", vector_json(r.offsets)},
            {"annotation", nullptr},
            {"error", nullptr}};
  if (r.annotation) {
    const Annotation& a = *r.annotation;
    j["annotation"] = {{"valid", a.valid},
                       {"violation", to_string(a.violation)},
                       {"violation_sample", a.violation_sample},
                       {"worst_margin", a.worst_margin},
                       {"eig_fitness", fitness_json(a.eig_fitness)},
                       {"diag_fitness", fitness_json(a.diag_fitness)},
                       {"psi", vector_json(a.psi)},
                       {"eigenvalues", vector_json(a.eigenvalues)}};
  }
  if (!r.error.empty()) j["error"] = r.error;
  return j.dump();
}

TrajectoryRecord record_from_line(const std::string& line, const DatasetHeader& h,
                                  std::size_t position) {
  const std::string where = "dataset record " + std::to_string(position) + ": ";
  try {
    const json j = json::parse(line);
    TrajectoryRecord r;
    r.index = j.at("index").get<std::int64_t>();
    r.provenance = provenance_from_string(j.at("provenance").get<std::string>());
    r.seed = j.value("seed", std::uint64_t{0});
    r.coeffs = vector_from(j.at("coeffs"), "coeffs", static_cast<Eigen::Index>(h.joints) * h.harmonics * 2);
    r.offsets = vector_from(j.at("offsets"), "offsets", h.joints);
    if (!r.coeffs.allFinite() || !r.offsets.allFinite()) throw FormatError("non-finite coefficients");
    const json& a = j.value("annotation", json());
    if (!a.is_null()) {
      Annotation ann;
      ann.valid = a.at("valid").get<bool>();
      ann.violation = violation_from_string(a.at("violation").get<std::string>());
      ann.violation_sample = a.value("violation_sample", std::int64_t{-1});
      ann.worst_margin = a.value("worst_margin", 0.0);
      ann.eig_fitness = fitness_from(a.at("eig_fitness"));
      ann.diag_fitness = fitness_from(a.at("diag_fitness"));
      const Eigen::Index b = h.base_count > 0 ? h.base_count : -1;
      ann.psi = vector_from(a.at("psi"), "psi", b);
      ann.eigenvalues = vector_from(a.at("eigenvalues"), "eigenvalues", b);
      r.annotation = std::move(ann);
    }
    const json& err = j.value("error", json());
    if (err.is_string()) r.error = err.get<std::string>();
    return r;
  } catch (const json::exception& e) {
    throw FormatError(where + e.what());
  } catch (const FormatError& e) {
    throw FormatError(where + e.what());
  }
}

void write_dataset(const TrajectoryDataset& dataset, std::ostream& out) {
  out << header_to_line(dataset.header) << '\n';
  for (const auto& r : dataset.records) out << record_to_line(r) << '\n';
}

void save_dataset(const TrajectoryDataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write dataset " + path.string());
  write_dataset(dataset, out);
  if (!out) throw FormatError("error while writing dataset " + path.string());
}

DatasetHeader for_each_record(std::istream& in,
                              const std::function<void(const TrajectoryRecord&)>& visit) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("dataset: empty input, header missing");
  const DatasetHeader header = header_from_line(line);
  std::size_t position = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    visit(record_from_line(line, header, position++));
  }
  return header;
}

TrajectoryDataset read_dataset(std::istream& in) {
  TrajectoryDataset ds;
  ds.header = for_each_record(in, [&ds](const TrajectoryRecord& r) { ds.records.push_back(r); });
  return ds;
}

TrajectoryDataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open dataset " + path.string());
  return read_dataset(in);
}

}  // namespace excite
