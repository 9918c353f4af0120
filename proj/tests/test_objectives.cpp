/*
 * Copyright 2026 The ltrec Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <gtest/gtest.h>

#include "ltrec/objectives.hpp"

namespace ltrec {
namespace {

GenreMask bit(const char* name) { return GenreMask{1} << *genre_index(name); }

TEST(LongTailParticipation, SumsPopularity) {
  auto part = PopularityPartition::from_counts({100, 50, 25, 1}, 0.25);
  const std::vector<ItemIndex> list{0, 1, 2};
  EXPECT_DOUBLE_EQ(obj_long_tail_participation(list, part), 175.0);
  EXPECT_DOUBLE_EQ(obj_long_tail_participation({}, part), 0.0);
}

TEST(Accuracy, InverseOfPredictedSum) {
  std::vector<double> fives(10, 5.0), ones(10, 1.0);
  std::vector<ItemIndex> list(10);
  for (ItemIndex i = 0; i < 10; ++i) list[i] = i;
  EXPECT_DOUBLE_EQ(obj_accuracy(list, fives), 0.02);
  EXPECT_DOUBLE_EQ(obj_accuracy(list, ones), 0.1);
}

TEST(DynamicQuota, DistanceToTarget) {
  // Item 0 is the only short-head item.
  auto part = PopularityPartition::from_counts({9, 1, 1, 1, 1}, 0.2);
  const std::vector<ItemIndex> list{0, 1, 2, 3};  // three long-tail items
  EXPECT_EQ(obj_dynamic_quota(list, part, 3), 0u);
  EXPECT_EQ(obj_dynamic_quota(list, part, 0), 3u);
  EXPECT_EQ(obj_dynamic_quota(list, part, 4), 1u);
}

TEST(GenreDistance, ZeroAndTwo) {
  std::vector<GenreMask> g{bit("Comedy"), bit("Drama"), bit("Comedy") | bit("Drama")};
  GenreVector comedy{};
  comedy[*genre_index("Comedy")] = 1.0;
  const std::vector<ItemIndex> same{0}, other{1}, mixed{2};
  EXPECT_DOUBLE_EQ(obj_genre_distance(same, g, comedy), 0.0);
  EXPECT_DOUBLE_EQ(obj_genre_distance(other, g, comedy), 2.0);
  EXPECT_DOUBLE_EQ(obj_genre_distance(mixed, g, comedy), 1.0);
}

TEST(Context, EvaluateMatchesParts) {
  auto part = PopularityPartition::from_counts({9, 4, 1, 1}, 0.25);
  std::vector<GenreMask> g{bit("Action"), bit("Action"), bit("War"), bit("War")};
  std::vector<double> pred{5, 4, 3, 2};
  ObjectiveContext ctx{&part, g, pred, {}, 1};
  ctx.pgu[*genre_index("War")] = 1.0;
  const std::vector<ItemIndex> list{0, 2};
  auto v = ctx.evaluate(list);
  EXPECT_DOUBLE_EQ(v.long_tail_participation, 10.0);
  EXPECT_DOUBLE_EQ(v.accuracy, 1.0 / 8.0);
  EXPECT_EQ(v.dynamic_quota, 0u);
  EXPECT_DOUBLE_EQ(v.genre_distance, 1.0);
}

TEST(Scalarize, BestIsZeroWorstIsOne) {
  ObjectiveVector best{10, 0.02, 0, 0.0}, worst{500, 0.1, 10, 2.0};
  std::vector<ObjectiveVector> pop{best, worst, {100, 0.05, 3, 1.0}};
  auto stats = PopulationStats::of(pop);
  ObjectiveWeights w;
  EXPECT_DOUBLE_EQ(scalarize(best, stats, w), 0.0);
  EXPECT_DOUBLE_EQ(scalarize(worst, stats, w), 1.0);
  // A constant component contributes nothing.
  std::vector<ObjectiveVector> flat{best, best};
  EXPECT_DOUBLE_EQ(scalarize(best, PopulationStats::of(flat), w), 0.0);
}

TEST(Weights, NormalizedAndValidated) {
  ObjectiveWeights w(2, 2, 0, 0);
  EXPECT_DOUBLE_EQ(w[0], 0.5);
  EXPECT_DOUBLE_EQ(w[3], 0.0);
  EXPECT_THROW(ObjectiveWeights(-1, 1, 1, 1), InvalidArgument);
  EXPECT_THROW(ObjectiveWeights(0, 0, 0, 0), InvalidArgument);
}

TEST(Dominance, StrictSomewhere) {
  ObjectiveVector a{1, 0.1, 1, 0.5}, b{2, 0.1, 1, 0.5};
  EXPECT_TRUE(dominates(a, b));
  EXPECT_FALSE(dominates(b, a));
  EXPECT_FALSE(dominates(a, a));
}

}  // namespace
}  // namespace ltrec
