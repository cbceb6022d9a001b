#include "excite/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "excite/error.hpp"
#include "excite/kernels.hpp"

namespace excite {

std::vector<SelectionScore> score_candidates(const std::vector<Eigen::VectorXd>& psi,
                                             const std::vector<std::size_t>& candidates,
                                             const std::vector<Eigen::VectorXd>& references) {
  std::vector<SelectionScore> scores;
  scores.reserve(candidates.size());
  double g_max = 0.0, f_max = 0.0;
  for (std::size_t c : candidates) {
    double g = std::numeric_limits<double>::infinity();
    for (const auto& ref : references) g = std::min(g, (psi[c] - ref).norm());
    const double f = psi[c].sum();
    g_max = std::max(g_max, g);
    f_max = std::max(f_max, f);
    scores.push_back({c, g, f, 0.0});
  }
  for (auto& s : scores) {
    s.d = (g_max > 0.0 ? s.g / g_max : 0.0) + (f_max > 0.0 ? s.f / f_max : 0.0);
  }
  return scores;
}

std::vector<std::size_t> greedy_select(const TrajectoryDataset& dataset, std::size_t k,
                                       const SelectionOptions& options) {
  const auto& records = dataset.records;
  std::vector<std::size_t> pool;
  std::vector<Eigen::VectorXd> psi(records.size());
  std::vector<std::uint64_t> hash(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!records[i].usable()) continue;
    pool.push_back(i);
    psi[i] = records[i].annotation->psi;
    hash[i] = content_hash(records[i]);
  }
  if (k > pool.size()) {
    throw ContractError("greedy_select: k = " + std::to_string(k) + " exceeds the " +
                        std::to_string(pool.size()) + " valid trajectories");
  }

  const Eigen::Index b = pool.empty() ? 0 : psi[pool.front()].size();
  std::vector<Eigen::VectorXd> references{Eigen::VectorXd::Zero(b)};
  std::vector<std::size_t> picked;
  picked.reserve(k);
  while (picked.size() < k) {
    const auto scores = score_candidates(psi, pool, references);
    const auto best = std::max_element(scores.begin(), scores.end(), [&](const auto& a, const auto& c) {
      if (a.d != c.d) return a.d < c.d;
      if (hash[a.record] != hash[c.record]) return hash[a.record] > hash[c.record];
      return a.record > c.record;
    });
    const std::size_t choice = best->record;
    picked.push_back(choice);
    pool.erase(std::find(pool.begin(), pool.end(), choice));
    if (options.distance_to_all) {
      if (picked.size() == 1) references.clear();
      references.push_back(psi[choice]);
    } else {
      references.assign(1, psi[choice]);
    }
  }
  return picked;
}

double mean_pairwise_distance(const std::vector<Eigen::VectorXd>& points) {
  const std::size_t n = points.size();
  if (n < 2) throw ContractError("diversity is undefined for fewer than two trajectories");
  const auto dim = static_cast<std::size_t>(points.front().size());
  std::vector<double> flat(n * dim);
  for (std::size_t i = 0; i < n; ++i) {
    if (static_cast<std::size_t>(points[i].size()) != dim) {
      throw ContractError("diversity: vectors differ in length");
    }
    std::copy(points[i].begin(), points[i].end(), flat.begin() + static_cast<std::ptrdiff_t>(i * dim));
  }
  std::vector<double> d2(n);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const std::size_t rest = n - i - 1;
    kernels::squared_distances({flat.data() + i * dim, dim},
                               {flat.data() + (i + 1) * dim, rest * dim}, rest, dim,
                               {d2.data(), rest});
    for (std::size_t j = 0; j < rest; ++j) total += std::sqrt(d2[j]);
  }
  return total / (0.5 * static_cast<double>(n) * static_cast<double>(n - 1));
}

Diversity batch_diversity(const std::vector<TrajectoryRecord>& records) {
  std::vector<Eigen::VectorXd> coeffs, psi;
  for (const auto& r : records) {
    if (!r.annotation) throw ContractError("batch_diversity: record " + std::to_string(r.index) + " is not annotated");
    coeffs.push_back(r.coeffs);
    psi.push_back(r.annotation->psi);
  }
  return {mean_pairwise_distance(coeffs), mean_pairwise_distance(psi)};
}

}  // namespace excite
