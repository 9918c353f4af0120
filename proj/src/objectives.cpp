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

#include "ltrec/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ltrec/profiles.hpp"

namespace ltrec {

ObjectiveWeights::ObjectiveWeights(double long_tail, double accuracy,
                                   double dynamic_quota, double genre_distance)
    : w_{long_tail, accuracy, dynamic_quota, genre_distance} {
  double total = 0.0;
  for (double w : w_) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw InvalidArgument("objective weights must be >= 0");
    total += w;
  }
  if (total <= 0.0) throw InvalidArgument("objective weights must not all be zero");
  for (double& w : w_) w /= total;
}

PopulationStats PopulationStats::of(std::span<const ObjectiveVector> population) {
  PopulationStats s;
  s.min.fill(std::numeric_limits<double>::infinity());
  s.max.fill(-std::numeric_limits<double>::infinity());
  for (const auto& v : population) {
    auto a = v.as_array();
    for (std::size_t c = 0; c < kNumObjectives; ++c) {
      s.min[c] = std::min(s.min[c], a[c]);
      s.max[c] = std::max(s.max[c], a[c]);
    }
  }
  if (population.empty()) {
    s.min.fill(0.0);
    s.max.fill(0.0);
  }
  return s;
}

double scalarize(const ObjectiveVector& v, const PopulationStats& stats,
                 const ObjectiveWeights& weights) {
  auto a = v.as_array();
  double fitness = 0.0;
  for (std::size_t c = 0; c < kNumObjectives; ++c) {
    const double range = stats.max[c] - stats.min[c];
    if (range > 0.0) fitness += weights[c] * (a[c] - stats.min[c]) / range;
  }
  return fitness;
}

bool dominates(const ObjectiveVector& a, const ObjectiveVector& b) {
  auto x = a.as_array();
  auto y = b.as_array();
  bool strictly = false;
  for (std::size_t c = 0; c < kNumObjectives; ++c) {
    if (x[c] > y[c]) return false;
    if (x[c] < y[c]) strictly = true;
  }
  return strictly;
}

double obj_long_tail_participation(std::span<const ItemIndex> list,
                                   const PopularityPartition& partition) {
  double sum = 0.0;
  for (ItemIndex i : list) sum += static_cast<double>(partition.popularity(i));
  return sum;
}

double obj_accuracy(std::span<const ItemIndex> list, std::span<const double> predictions) {
  double sum = 0.0;
  for (ItemIndex i : list) sum += predictions[i];
  return 1.0 / sum;
}

std::size_t obj_dynamic_quota(std::span<const ItemIndex> list,
                              const PopularityPartition& partition,
                              std::size_t target_count) {
  std::size_t lt = 0;
  for (ItemIndex i : list) lt += partition.is_long_tail(i) ? 1 : 0;
  return lt > target_count ? lt - target_count : target_count - lt;
}

double obj_genre_distance(std::span<const ItemIndex> list,
                          std::span<const GenreMask> item_genres, const GenreVector& pgu) {
  GenreVector counts{};
  for (ItemIndex i : list) add_genre_incidences(item_genres[i], counts);
  const GenreVector pgl = normalize_genres(counts);
  double d = 0.0;
  for (std::size_t g = 0; g < kNumGenres; ++g) d += std::abs(pgu[g] - pgl[g]);
  return d;
}

std::vector<GenreMask> item_genre_masks(const Dataset& dataset) {
  std::vector<GenreMask> out;
  out.reserve(dataset.num_items());
  for (const Item& item : dataset.items()) out.push_back(item.genres);
  return out;
}

ObjectiveVector ObjectiveContext::evaluate(std::span<const ItemIndex> list) const {
  return ObjectiveVector{
      obj_long_tail_participation(list, *partition),
      obj_accuracy(list, predictions),
      obj_dynamic_quota(list, *partition, target_long_tail),
      obj_genre_distance(list, item_genres, pgu),
  };
}

}  // namespace ltrec
