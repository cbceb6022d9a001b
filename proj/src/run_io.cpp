#include "excite/run_io.hpp"

#include <fstream>
#include <json.hpp>

#include "excite/error.hpp"

namespace excite {

using nlohmann::json;

namespace {

constexpr int kVersion = 1;

json row_json(const Eigen::MatrixXd& m, Eigen::Index k) {
  std::vector<double> v(static_cast<std::size_t>(m.cols()));
  for (Eigen::Index j = 0; j < m.cols(); ++j) v[static_cast<std::size_t>(j)] = m(k, j);
  return v;
}

void read_row(const json& j, const char* key, Eigen::MatrixXd& m, Eigen::Index k) {
  const json& v = j.at(key);
  if (!v.is_array() || static_cast<Eigen::Index>(v.size()) != m.cols()) {
    throw FormatError(std::string("'") + key + "' has the wrong length");
  }
  for (Eigen::Index c = 0; c < m.cols(); ++c) m(k, c) = v[static_cast<std::size_t>(c)].get<double>();
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path.string());
  return out;
}

// Reads the header line and all sample lines of a line-delimited file.
std::pair<json, std::vector<json>> read_lines(const std::filesystem::path& path, const char* format) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw FormatError(path.string() + ": empty file");
  json header;
  std::vector<json> rows;
  try {
    header = json::parse(line);
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": header: " + e.what());
  }
  if (header.value("format", std::string()) != format) {
    throw FormatError(path.string() + ": not an " + std::string(format) + " file");
  }
  if (header.value("version", 0) != kVersion) {
    throw FormatError(path.string() + ": unsupported version");
  }
  std::size_t k = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      rows.push_back(json::parse(line));
    } catch (const json::exception& e) {
      throw FormatError(path.string() + ": sample " + std::to_string(k) + ": " + e.what());
    }
    ++k;
  }
  return {std::move(header), std::move(rows)};
}

void resize_all(Eigen::Index n, int joints, std::initializer_list<Eigen::MatrixXd*> ms) {
  for (auto* m : ms) m->resize(n, joints);
}

}  // namespace

void save_sampled(const SampledTrajectory& traj, const std::filesystem::path& path) {
  auto out = open_out(path);
  json segments = json::array();
  for (const auto& s : traj.segments) {
    segments.push_back({{"kind", s.kind == Segment::Kind::bridge ? "bridge" : "trajectory"},
                        {"first", s.first},
                        {"count", s.count},
                        {"source", s.source}});
  }
  out << json{{"format", "excite-sampled-trajectory"}, {"version", kVersion},
              {"joints", traj.joints()},                {"samples", traj.size()},
              {"dt", traj.dt},                          {"source", traj.source},
              {"segments", segments}}
             .dump()
      << '\n';
  for (Eigen::Index k = 0; k < traj.q.rows(); ++k) {
    out << json{{"q", row_json(traj.q, k)}, {"qd", row_json(traj.qd, k)}, {"qdd", row_json(traj.qdd, k)}}.dump()
        << '\n';
  }
}

SampledTrajectory load_sampled(const std::filesystem::path& path) {
  auto [header, rows] = read_lines(path, "excite-sampled-trajectory");
  SampledTrajectory t;
  try {
    const int joints = header.at("joints").get<int>();
    t.dt = header.at("dt").get<double>();
    t.source = header.value("source", std::string());
    for (const auto& s : header.value("segments", json::array())) {
      t.segments.push_back({s.at("kind").get<std::string>() == "bridge" ? Segment::Kind::bridge
                                                                         : Segment::Kind::trajectory,
                            s.at("first").get<std::size_t>(), s.at("count").get<std::size_t>(),
                            s.at("source").get<int>()});
    }
    const auto n = static_cast<Eigen::Index>(rows.size());
    resize_all(n, joints, {&t.q, &t.qd, &t.qdd});
    for (Eigen::Index k = 0; k < n; ++k) {
      const json& r = rows[static_cast<std::size_t>(k)];
      read_row(r, "q", t.q, k);
      read_row(r, "qd", t.qd, k);
      read_row(r, "qdd", t.qdd, k);
    }
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  return t;
}

void save_run(const MeasuredRun& run, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << json{{"format", "excite-measured-run"},
              {"version", kVersion},
              {"joints", run.joints()},
              {"samples", run.size()},
              {"dt", run.dt},
              {"seed", run.seed},
              {"noise_level", run.noise_level},
              {"noise_mode", run.mode == NoiseMode::additive ? "additive" : "multiplicative"},
              {"source", run.source},
              {"warnings", run.warnings}}
             .dump()
      << '\n';
  for (Eigen::Index k = 0; k < run.q.rows(); ++k) {
    out << json{{"q", row_json(run.q, k)},
                {"qd", row_json(run.qd, k)},
                {"qdd", row_json(run.qdd, k)},
                {"tau", row_json(run.tau, k)}}
               .dump()
        << '\n';
  }
}

MeasuredRun load_run(const std::filesystem::path& path) {
  auto [header, rows] = read_lines(path, "excite-measured-run");
  MeasuredRun run;
  try {
    const int joints = header.at("joints").get<int>();
    run.dt = header.at("dt").get<double>();
    run.seed = header.value("seed", std::uint64_t{0});
    run.noise_level = header.value("noise_level", 0.0);
    run.mode = header.value("noise_mode", std::string("multiplicative")) == "additive"
                   ? NoiseMode::additive
                   : NoiseMode::multiplicative;
    run.source = header.value("source", std::string());
    run.warnings = header.value("warnings", std::vector<std::string>{});
    const auto n = static_cast<Eigen::Index>(rows.size());
    resize_all(n, joints, {&run.q, &run.qd, &run.qdd, &run.tau});
    for (Eigen::Index k = 0; k < n; ++k) {
      const json& r = rows[static_cast<std::size_t>(k)];
      read_row(r, "q", run.q, k);
      read_row(r, "qd", run.qd, k);
      read_row(r, "qdd", run.qdd, k);
      read_row(r, "tau", run.tau, k);
    }
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  return run;
}

void save_estimate(const EstimateFile& est, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << json{{"format", "excite-estimate"},
              {"version", kVersion},
              {"model_hash", est.model_hash},
              {"method", est.method},
              {"base_count", est.estimate.size()},
              {"estimate", std::vector<double>(est.estimate.begin(), est.estimate.end())},
              {"covariance_diagonal",
               std::vector<double>(est.covariance_diagonal.begin(), est.covariance_diagonal.end())},
              {"covariance_norm", est.covariance_diagonal.norm()},
              {"samples", est.samples},
              {"delta", est.delta}}
             .dump(2)
      << '\n';
}

EstimateFile load_estimate(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  try {
    const json j = json::parse(in);
    if (j.value("format", std::string()) != "excite-estimate") {
      throw FormatError(path.string() + ": not an excite-estimate file");
    }
    EstimateFile e;
    e.model_hash = j.value("model_hash", std::string());
    e.method = j.value("method", std::string());
    const auto est = j.at("estimate").get<std::vector<double>>();
    const auto cov = j.value("covariance_diagonal", std::vector<double>{});
    e.estimate = Eigen::Map<const Eigen::VectorXd>(est.data(), static_cast<Eigen::Index>(est.size()));
    e.covariance_diagonal = Eigen::Map<const Eigen::VectorXd>(cov.data(), static_cast<Eigen::Index>(cov.size()));
    e.samples = j.value("samples", std::size_t{0});
    e.delta = j.value("delta", 0.0);
    return e;
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace excite
