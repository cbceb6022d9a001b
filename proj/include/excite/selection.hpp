#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <vector>

#include "excite/dataset.hpp"

namespace excite {

struct SelectionOptions {
  /// Measure g_i to the nearest of all picks instead of the most recent one.
  bool distance_to_all = false;
};

/// Score of one candidate in one greedy round.
struct SelectionScore {
  std::size_t record = 0;  // position in dataset.records
  double g = 0.0;          // distance of psi_i to the reference pick
  double f = 0.0;          // sum of psi_i
  double d = 0.0;          // g / max g + f / max f over the remaining pool
};

/// Scores of every candidate against reference vector `previous`
/// (normalized over `candidates`).
std::vector<SelectionScore> score_candidates(const std::vector<Eigen::VectorXd>& psi,
                                             const std::vector<std::size_t>& candidates,
                                             const std::vector<Eigen::VectorXd>& references);

/// Greedy pick of k valid records maximizing d each round; the reference
/// starts at psi = 0. Ties go to the smaller content hash, then the smaller
/// position. Returns positions into dataset.records in pick order. Throws
/// ContractError when k exceeds the number of valid annotated records.
std::vector<std::size_t> greedy_select(const TrajectoryDataset& dataset, std::size_t k,
                                       const SelectionOptions& options = {});

struct Diversity {
  double spatial = 0.0;   // mean pairwise distance of coefficient tensors
  double inertial = 0.0;  // mean pairwise distance of psi vectors
};

/// Mean pairwise Euclidean distance between rows of `points` (n x dim, n >= 2).
double mean_pairwise_distance(const std::vector<Eigen::VectorXd>& points);

/// Diversity of annotated records (at least two required).
Diversity batch_diversity(const std::vector<TrajectoryRecord>& records);

}  // namespace excite
