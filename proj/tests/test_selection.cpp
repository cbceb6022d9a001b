#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "excite/error.hpp"
#include "excite/rng.hpp"
#include "excite/selection.hpp"

using namespace excite;

namespace {

TrajectoryRecord record(std::int64_t index, Eigen::VectorXd psi, double coeff = 0.0, bool valid = true) {
  TrajectoryRecord r;
  r.index = index;
  r.coeffs = Eigen::VectorXd::Constant(4, coeff == 0.0 ? static_cast<double>(index) : coeff);
  r.offsets = Eigen::VectorXd::Zero(1);
  Annotation a;
  a.valid = valid;
  a.psi = std::move(psi);
  r.annotation = a;
  return r;
}

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd x(static_cast<Eigen::Index>(v.size()));
  std::copy(v.begin(), v.end(), x.begin());
  return x;
}

TrajectoryDataset random_dataset(std::size_t n, Rng& rng) {
  TrajectoryDataset ds;
  for (std::size_t i = 0; i < n; ++i) {
    Eigen::VectorXd psi(6);
    for (auto& v : psi) v = std::pow(10.0, rng.uniform(0.0, 3.0));
    ds.records.push_back(record(static_cast<std::int64_t>(i), psi, rng.uniform(-1.0, 1.0)));
  }
  return ds;
}

}  // namespace

TEST(Selection, PicksLargerExcitationFirst) {
  TrajectoryDataset ds;
  ds.records = {record(0, vec({1, 0})), record(1, vec({0, 2}))};
  EXPECT_EQ(greedy_select(ds, 1), (std::vector<std::size_t>{1}));
  EXPECT_EQ(greedy_select(ds, 2), (std::vector<std::size_t>{1, 0}));
}

TEST(Selection, ScoresNormalizeOverRemainingPool) {
  const std::vector<Eigen::VectorXd> psi{vec({1, 0}), vec({0, 2}), vec({3, 3})};
  const auto s = score_candidates(psi, {0, 1}, {vec({0, 0})});
  ASSERT_EQ(s.size(), 2u);
  EXPECT_DOUBLE_EQ(s[0].g, 1.0);
  EXPECT_DOUBLE_EQ(s[0].f, 1.0);
  EXPECT_DOUBLE_EQ(s[0].d, 1.0);
  EXPECT_DOUBLE_EQ(s[1].d, 2.0);
  const auto near_all = score_candidates(psi, {2}, {vec({3, 0}), vec({3, 2})});
  EXPECT_DOUBLE_EQ(near_all[0].g, 1.0);
}

TEST(Selection, SkipsInvalidAndUnannotated) {
  TrajectoryDataset ds;
  ds.records = {record(0, vec({9, 9}), 0, false), record(1, vec({1, 1})), record(2, vec({2, 1}))};
  ds.records.push_back(record(3, vec({5, 5})));
  ds.records.back().annotation.reset();
  EXPECT_EQ(greedy_select(ds, 2), (std::vector<std::size_t>{2, 1}));
  EXPECT_THROW(greedy_select(ds, 3), ContractError);
}

TEST(Selection, CovariantUnderPermutation) {
  Rng rng(1);
  const TrajectoryDataset ds = random_dataset(40, rng);
  const auto picks = greedy_select(ds, 8);
  std::vector<std::size_t> order(ds.records.size());
  std::iota(order.begin(), order.end(), 0);
  for (int trial = 0; trial < 5; ++trial) {
    for (std::size_t i = order.size() - 1; i > 0; --i) std::swap(order[i], order[rng.below(i + 1)]);
    TrajectoryDataset shuffled;
    for (std::size_t i : order) shuffled.records.push_back(ds.records[i]);
    const auto again = greedy_select(shuffled, 8);
    ASSERT_EQ(again.size(), picks.size());
    for (std::size_t i = 0; i < picks.size(); ++i) {
      EXPECT_EQ(shuffled.records[again[i]].index, ds.records[picks[i]].index);
    }
  }
}

TEST(Selection, TiesGoToSmallerContentHash) {
  TrajectoryDataset ds;
  ds.records = {record(0, vec({1, 1}), 0.25), record(1, vec({1, 1}), 0.75)};
  const std::size_t expected = content_hash(ds.records[0]) < content_hash(ds.records[1]) ? 0 : 1;
  EXPECT_EQ(greedy_select(ds, 1).front(), expected);
  std::swap(ds.records[0], ds.records[1]);
  EXPECT_EQ(greedy_select(ds, 1).front(), 1 - expected);
}

TEST(Selection, DistanceToAllChangesReference) {
  // Third round: (1, 5) is far from the latest pick but close to the first one.
  TrajectoryDataset ds;
  ds.records = {record(0, vec({9, 0})), record(1, vec({7, 4})), record(2, vec({3, 9})),
                record(3, vec({1, 5}))};
  EXPECT_EQ(greedy_select(ds, 3), (std::vector<std::size_t>{2, 0, 3}));
  SelectionOptions all;
  all.distance_to_all = true;
  EXPECT_EQ(greedy_select(ds, 3, all), (std::vector<std::size_t>{2, 0, 1}));
}

TEST(Diversity, MeanPairwiseDistance) {
  EXPECT_DOUBLE_EQ(mean_pairwise_distance({vec({0, 0}), vec({3, 4})}), 5.0);
  // Unit square corners: four sides of 1, two diagonals of sqrt 2.
  EXPECT_DOUBLE_EQ(mean_pairwise_distance({vec({0, 0}), vec({1, 0}), vec({0, 1}), vec({1, 1})}),
                   (4.0 + 2.0 * std::sqrt(2.0)) / 6.0);
  EXPECT_THROW(mean_pairwise_distance({vec({1})}), ContractError);
  EXPECT_THROW(mean_pairwise_distance({vec({1}), vec({1, 2})}), ContractError);
}

TEST(Diversity, BatchUsesCoefficientsAndPsi) {
  const std::vector<TrajectoryRecord> recs{record(1, vec({0, 0}), 1.0), record(2, vec({6, 8}), 2.0)};
  const Diversity d = batch_diversity(recs);
  EXPECT_DOUBLE_EQ(d.spatial, 2.0);  // four coefficients differing by 1
  EXPECT_DOUBLE_EQ(d.inertial, 10.0);
}
