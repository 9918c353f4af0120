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

#include "ltrec/age_model.hpp"

#include <algorithm>
#include <istream>
#include <ostream>

#include "csv_util.hpp"
#include "ltrec/profiles.hpp"

namespace ltrec {

GenreVector featurize_user(const Dataset& dataset, const RatingMatrix& train,
                           UserIndex u) {
  auto row = train.user_row(u);
  if (row.empty()) throw ColdUserError(u);
  GenreVector counts{};
  for (const auto& e : row) add_genre_incidences(dataset.item(e.index).genres, counts);
  return normalize_genres(counts);
}

NearestCentroidClassifier NearestCentroidClassifier::train(
    std::span<const LabeledFeatures> examples) {
  // Summing in a canonical order keeps the centroids bit-identical under any
  // permutation of the input.
  std::vector<LabeledFeatures> sorted(examples.begin(), examples.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const LabeledFeatures& a, const LabeledFeatures& b) {
              if (a.label != b.label) return a.label < b.label;
              return a.features < b.features;
            });
  Centroids sums{};
  std::array<std::size_t, kNumAgeGroups> counts{};
  for (const auto& ex : sorted) {
    const std::size_t s = age_slot(ex.label);
    for (std::size_t g = 0; g < kNumGenres; ++g) sums[s][g] += ex.features[g];
    ++counts[s];
  }
  std::string missing;
  for (std::size_t s = 0; s < kNumAgeGroups; ++s) {
    if (counts[s] == 0) {
      if (!missing.empty()) missing += ", ";
      missing += std::to_string(age_value(kAgeGroups[s]));
    }
  }
  if (!missing.empty()) {
    throw InvalidArgument("no training users for age group(s): " + missing);
  }
  for (std::size_t s = 0; s < kNumAgeGroups; ++s) {
    for (double& v : sums[s]) v /= static_cast<double>(counts[s]);
  }
  return NearestCentroidClassifier(sums);
}

AgeGroup NearestCentroidClassifier::predict(const GenreVector& features) const {
  std::size_t best = 0;
  double best_dist = 0.0;
  for (std::size_t s = 0; s < kNumAgeGroups; ++s) {
    double d = 0.0;
    for (std::size_t g = 0; g < kNumGenres; ++g) {
      const double diff = features[g] - centroids_[s][g];
      d += diff * diff;
    }
    if (s == 0 || d < best_dist) {
      best = s;
      best_dist = d;
    }
  }
  return kAgeGroups[best];
}

void NearestCentroidClassifier::write_csv(std::ostream& out) const {
  out << "age_group,genre,weight\n";
  for (std::size_t s = 0; s < kNumAgeGroups; ++s) {
    for (std::size_t g = 0; g < kNumGenres; ++g) {
      out << age_value(kAgeGroups[s]) << ',' << kGenreNames[g] << ','
          << csv::format_double(centroids_[s][g]) << '\n';
    }
  }
}

NearestCentroidClassifier NearestCentroidClassifier::read_csv(std::istream& in) {
  Centroids c{};
  csv::for_each_row(in, 3, [&](const auto& f, std::size_t n) {
    auto age = age_group_from_value(static_cast<int>(csv::to_int(f[0], n)));
    auto g = genre_index(f[1]);
    if (!age || !g) throw ParseError("<csv>", n, "bad age group or genre");
    c[age_slot(*age)][*g] = csv::to_double(f[2], n);
  });
  return NearestCentroidClassifier(c);
}

}  // namespace ltrec
