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

#ifndef LTREC_OBJECTIVES_HPP_
#define LTREC_OBJECTIVES_HPP_

#include <array>
#include <span>
#include <vector>

#include "ltrec/dataset.hpp"

namespace ltrec {

inline constexpr std::size_t kNumObjectives = 4;

// All four components are minimized.
struct ObjectiveVector {
  double long_tail_participation = 0.0;  // summed train popularity
  double accuracy = 0.0;                 // 1 / summed predicted rating
  std::size_t dynamic_quota = 0;         // |#long tail - target|
  double genre_distance = 0.0;           // L1(PGU, PGL), in [0, 2]

  std::array<double, kNumObjectives> as_array() const {
    return {long_tail_participation, accuracy, static_cast<double>(dynamic_quota),
            genre_distance};
  }
  friend bool operator==(const ObjectiveVector&, const ObjectiveVector&) = default;
};

// Non-negative weights normalized to sum 1.
class ObjectiveWeights {
 public:
  ObjectiveWeights() : w_{0.25, 0.25, 0.25, 0.25} {}
  // Throws InvalidArgument on a negative weight or an all-zero vector.
  ObjectiveWeights(double long_tail, double accuracy, double dynamic_quota,
                   double genre_distance);

  const std::array<double, kNumObjectives>& values() const { return w_; }
  double operator[](std::size_t i) const { return w_[i]; }

 private:
  std::array<double, kNumObjectives> w_;
};

// Per-component bounds used by scalarize().
struct PopulationStats {
  std::array<double, kNumObjectives> min{};
  std::array<double, kNumObjectives> max{};

  static PopulationStats of(std::span<const ObjectiveVector> population);
};

// Weighted sum of min-max normalized components; 0 is best. A component
// whose max equals its min contributes 0.
double scalarize(const ObjectiveVector& v, const PopulationStats& stats,
                 const ObjectiveWeights& weights);

// True iff `a` is no worse than `b` everywhere and better somewhere.
bool dominates(const ObjectiveVector& a, const ObjectiveVector& b);

double obj_long_tail_participation(std::span<const ItemIndex> list,
                                   const PopularityPartition& partition);

// `predictions` is indexed by item and already clamped to [1, 5].
double obj_accuracy(std::span<const ItemIndex> list, std::span<const double> predictions);

std::size_t obj_dynamic_quota(std::span<const ItemIndex> list,
                              const PopularityPartition& partition,
                              std::size_t target_count);

// `item_genres` is indexed by item.
double obj_genre_distance(std::span<const ItemIndex> list,
                          std::span<const GenreMask> item_genres, const GenreVector& pgu);

std::vector<GenreMask> item_genre_masks(const Dataset& dataset);

// Everything needed to score lists for one user.
struct ObjectiveContext {
  const PopularityPartition* partition = nullptr;
  std::span<const GenreMask> item_genres;
  std::span<const double> predictions;
  GenreVector pgu{};
  std::size_t target_long_tail = 0;

  ObjectiveVector evaluate(std::span<const ItemIndex> list) const;
};

}  // namespace ltrec

#endif  // LTREC_OBJECTIVES_HPP_
