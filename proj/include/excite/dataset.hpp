#pragma once

// Line-delimited JSON trajectory datasets: one header document on the first
// line, then one record per line. Schema in docs/dataset-format.md.

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "excite/base_params.hpp"
#include "excite/constraints.hpp"
#include "excite/fitness.hpp"
#include "excite/trajectory.hpp"

namespace excite {

inline constexpr int kDatasetFormatVersion = 1;
inline constexpr std::string_view kDatasetFormatName = "excite-trajectory-dataset";

enum class Provenance { optimizer, gan, external };

std::string_view to_string(Provenance p);
Provenance provenance_from_string(std::string_view text);

struct DatasetHeader {
  int version = kDatasetFormatVersion;
  int joints = 0;
  int harmonics = kDefaultHarmonics;
  double duration = kDefaultDuration;
  double rate_hz = kDefaultRateHz;
  std::string model_hash;
  int base_count = 0;

  bool operator==(const DatasetHeader&) const = default;
};

/// Validity and excitation of one record, recomputed by annotate().
struct Annotation {
  bool valid = false;
  ViolationKind violation = ViolationKind::none;
  std::int64_t violation_sample = -1;
  double worst_margin = 0.0;
  FitnessValue eig_fitness;
  FitnessValue diag_fitness;
  Eigen::VectorXd psi;          // diag(Y^T Y), b values
  Eigen::VectorXd eigenvalues;  // of Y^T Y, descending
};

struct TrajectoryRecord {
  std::int64_t index = 0;
  Eigen::VectorXd coeffs;   // J x H x 2, flat
  Eigen::VectorXd offsets;  // J
  Provenance provenance = Provenance::optimizer;
  std::uint64_t seed = 0;
  std::optional<Annotation> annotation;  // absent until annotated
  std::string error;                     // non-empty when producing the record failed

  bool usable() const { return annotation.has_value() && annotation->valid; }
};

struct TrajectoryDataset {
  DatasetHeader header;
  std::vector<TrajectoryRecord> records;

  /// Records with the given provenance, in order.
  TrajectoryDataset filter(Provenance p) const;
};

/// Header for a model/projection/trajectory grid.
DatasetHeader make_header(const RobotModel& model, const BaseProjection& projection, int harmonics,
                          double duration, double rate_hz);

FourierTrajectory trajectory_of(const DatasetHeader& header, const TrajectoryRecord& record);

/// Recomputes validity, psi, eigenvalues and both fitness values from the
/// coefficients.
Annotation annotate(const RobotModel& model, const BaseProjection& projection,
                    const ConstraintSet& cs, const DatasetHeader& header,
                    const TrajectoryRecord& record);

/// Annotates every record (in parallel up to `parallelism` threads). Fills an
/// empty header hash/base count; throws FormatError if they disagree with the
/// model.
void annotate_dataset(const RobotModel& model, const BaseProjection& projection,
                      const ConstraintSet& cs, TrajectoryDataset& dataset, int parallelism = 1);

/// Canonical content hash of a record's coefficients and offsets.
std::uint64_t content_hash(const TrajectoryRecord& record);

std::string header_to_line(const DatasetHeader& header);
std::string record_to_line(const TrajectoryRecord& record);
DatasetHeader header_from_line(const std::string& line);
/// `position` is the 0-based record position, used in error messages.
TrajectoryRecord record_from_line(const std::string& line, const DatasetHeader& header,
                                  std::size_t position);

void save_dataset(const TrajectoryDataset& dataset, const std::filesystem::path& path);
void write_dataset(const TrajectoryDataset& dataset, std::ostream& out);
TrajectoryDataset load_dataset(const std::filesystem::path& path);
TrajectoryDataset read_dataset(std::istream& in);

/// Streams records one at a time; returns the header. Errors name the record.
DatasetHeader for_each_record(std::istream& in,
                              const std::function<void(const TrajectoryRecord&)>& visit);

}  // namespace excite
