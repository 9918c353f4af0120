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

#ifndef LTREC_PROFILES_HPP_
#define LTREC_PROFILES_HPP_

#include <array>
#include <iosfwd>
#include <limits>
#include <span>
#include <vector>

#include "ltrec/dataset.hpp"

namespace ltrec {

// Adds one incidence per genre in `mask`.
inline void add_genre_incidences(GenreMask mask, GenreVector& counts) {
  for (std::size_t g = 0; g < kNumGenres; ++g) {
    if (mask & (GenreMask{1} << g)) counts[g] += 1.0;
  }
}

// Scales counts to sum 1; all-zero counts become the uniform vector.
GenreVector normalize_genres(const GenreVector& counts);

struct AgeGenreProfile {
  AgeGroup age = AgeGroup::k25;
  GenreVector pgu{};
  std::size_t incidences = 0;
  bool synthesized = false;  // no ratings in the group; pgu is uniform
};

using AgeGenreProfiles = std::array<AgeGenreProfile, kNumAgeGroups>;

// Genre-incidence share of every age group's train ratings. A movie with
// three genres contributes three incidences.
AgeGenreProfiles build_age_genre_profiles(const Dataset& dataset,
                                          std::span<const Rating> train);

inline const AgeGenreProfile& profile_for(const AgeGenreProfiles& p, AgeGroup g) {
  return p[age_slot(g)];
}

inline constexpr std::size_t kUnboundedActivity = std::numeric_limits<std::size_t>::max();

// Ratings whose activity index (1 = a user's first rating) lies in [lo, hi].
struct ActivityBin {
  std::size_t lo = 1;
  std::size_t hi = kUnboundedActivity;
  std::size_t population = 0;
  std::size_t long_tail = 0;
  double share = 0.0;  // long_tail / population
};

struct DynamicsCurve {
  AgeGroup age = AgeGroup::k25;
  std::vector<ActivityBin> bins;  // contiguous, covering [1, inf)
  bool synthesized = false;       // no ratings; a single 0.5 bin
};

using DynamicsCurves = std::array<DynamicsCurve, kNumAgeGroups>;

// One (activity index, is long tail) observation.
struct ActivityEvent {
  std::size_t activity = 1;
  bool long_tail = false;
};

// Bins events into at most `n_bins` equal-population activity ranges.
// Bins whose boundaries coincide are merged, so fewer bins can result.
DynamicsCurve build_curve(std::vector<ActivityEvent> events, std::size_t n_bins);

// Activity events of every user, in timestamp order per user.
std::vector<std::vector<ActivityEvent>> activity_events_by_age(
    const Dataset& dataset, std::span<const Rating> train,
    const PopularityPartition& partition);

DynamicsCurves build_dynamics_curves(const Dataset& dataset,
                                     std::span<const Rating> train,
                                     const PopularityPartition& partition,
                                     std::size_t n_bins = 10);

// All users pooled regardless of age.
DynamicsCurve build_overall_curve(const Dataset& dataset,
                                  std::span<const Rating> train,
                                  const PopularityPartition& partition,
                                  std::size_t n_bins = 10);

// round(share * k) for the bin holding `ratings_registered`, in [0, k].
std::size_t target_long_tail_count(const DynamicsCurve& curve,
                                   std::size_t ratings_registered, std::size_t k);

// `age_group,genre,pgu,synthesized`
void write_age_genre_csv(std::ostream& out, const AgeGenreProfiles& profiles);
// `age_group,bin_lo,bin_hi,share,population,synthesized`; an open upper
// bound is written as `inf`.
void write_dynamics_csv(std::ostream& out, const DynamicsCurves& curves);
// `bin_lo,bin_hi,long_tail_share,short_head_share,population`
void write_lt_sh_csv(std::ostream& out, const DynamicsCurve& overall);

AgeGenreProfiles read_age_genre_csv(std::istream& in);
DynamicsCurves read_dynamics_csv(std::istream& in);

}  // namespace ltrec

#endif  // LTREC_PROFILES_HPP_
