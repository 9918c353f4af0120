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

#ifndef LTREC_AGE_MODEL_HPP_
#define LTREC_AGE_MODEL_HPP_

#include <array>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "ltrec/dataset.hpp"

namespace ltrec {

// Normalized genre-incidence vector of u's train ratings. Throws
// ColdUserError when u has none.
GenreVector featurize_user(const Dataset& dataset, const RatingMatrix& train,
                           UserIndex u);

struct LabeledFeatures {
  GenreVector features{};
  AgeGroup label = AgeGroup::k25;
};

class AgeClassifier {
 public:
  virtual ~AgeClassifier() = default;
  virtual AgeGroup predict(const GenreVector& features) const = 0;
};

// One centroid per age group; prediction is the nearest centroid in
// Euclidean distance, ties going to the younger group.
class NearestCentroidClassifier final : public AgeClassifier {
 public:
  using Centroids = std::array<GenreVector, kNumAgeGroups>;

  explicit NearestCentroidClassifier(const Centroids& centroids)
      : centroids_(centroids) {}

  // Throws InvalidArgument naming every group without training users. The
  // result does not depend on the order of `examples`.
  static NearestCentroidClassifier train(std::span<const LabeledFeatures> examples);

  AgeGroup predict(const GenreVector& features) const override;

  const GenreVector& centroid(AgeGroup g) const { return centroids_[age_slot(g)]; }
  const Centroids& centroids() const { return centroids_; }

  // `age_group,genre,weight`
  void write_csv(std::ostream& out) const;
  static NearestCentroidClassifier read_csv(std::istream& in);

 private:
  Centroids centroids_;
};

}  // namespace ltrec

#endif  // LTREC_AGE_MODEL_HPP_
