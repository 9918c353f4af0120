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

#ifndef LTREC_CF_HPP_
#define LTREC_CF_HPP_

#include <iosfwd>
#include <span>
#include <vector>

#include "ltrec/dataset.hpp"

namespace ltrec {

struct CfConfig {
  std::size_t k_neighbors = 40;
  std::size_t min_overlap = 2;
};

// Mean of u's train ratings; ColdUserError if there are none.
double user_mean(const RatingMatrix& train, UserIndex u);

// Pearson correlation of u and v over co-rated items, deviations taken from
// each user's overall train mean. Zero when the overlap is smaller than
// `min_overlap` or either side has no variation on it.
double user_similarity(const RatingMatrix& train, UserIndex u, UserIndex v,
                       std::size_t min_overlap = 2);

struct SimilarityRecord {
  UserIndex other = 0;
  double similarity = 0.0;
};

// User-based neighborhood predictor.
class UserKnn {
 public:
  explicit UserKnn(const RatingMatrix& train, CfConfig config = {});

  const RatingMatrix& train() const { return *train_; }
  const CfConfig& config() const { return config_; }

  // Similarity of u to every user, indexed by user; the self entry is 0.
  // Equal to user_similarity() for each pair.
  std::vector<double> similarities(UserIndex u) const;

  // The `top` most similar other users, similarity descending.
  std::vector<SimilarityRecord> neighbors(UserIndex u, std::size_t top) const;

  // Mean-centered weighted prediction over the k most similar raters of j,
  // clamped to [1, 5]. Falls back to the user mean when no neighbor carries
  // weight.
  double predict(UserIndex u, ItemIndex j) const;
  double predict(UserIndex u, ItemIndex j, std::span<const double> sims) const;

  // Predictions for every item, indexed by item. Similarities are computed
  // once for the call.
  std::vector<double> predict_all(UserIndex u) const;

 private:
  const RatingMatrix* train_;
  CfConfig config_;
};

// Item-based adjusted-cosine predictor. The item-item similarity matrix is
// computed once at construction.
class ItemKnn {
 public:
  explicit ItemKnn(const RatingMatrix& train, CfConfig config = {});

  double similarity(ItemIndex a, ItemIndex b) const {
    return sims_[static_cast<std::size_t>(a) * n_items_ + b];
  }

  // Similarity-weighted average of u's ratings over the k most similar items
  // u rated (positive similarity only); user mean when there are none.
  double predict(UserIndex u, ItemIndex j) const;
  std::vector<double> predict_all(UserIndex u) const;

 private:
  const RatingMatrix* train_;
  CfConfig config_;
  std::size_t n_items_;
  std::vector<double> sims_;
};

// Orders `candidates` by score descending, then popularity descending, then
// item index, and returns the first n.
std::vector<ItemIndex> rank_candidates(std::span<const ItemIndex> candidates,
                                       std::span<const double> scores,
                                       const PopularityPartition& popularity,
                                       std::size_t n);

// Items without a train rating from u.
std::vector<ItemIndex> unrated_items(const RatingMatrix& train, UserIndex u);

std::vector<ItemIndex> top_n_user_based(const UserKnn& knn,
                                        const PopularityPartition& popularity,
                                        UserIndex u, std::size_t n);
std::vector<ItemIndex> top_n_item_based(const ItemKnn& knn,
                                        const RatingMatrix& train,
                                        const PopularityPartition& popularity,
                                        UserIndex u, std::size_t n);

// Neighbor cache, CSV with header `user_id,neighbor_id,similarity`.
struct NeighborRow {
  UserId user = 0;
  UserId neighbor = 0;
  double similarity = 0.0;
};

void write_neighbor_csv(std::ostream& out, const Dataset& dataset,
                        const UserKnn& knn, std::span<const UserIndex> users,
                        std::size_t top);
std::vector<NeighborRow> read_neighbor_csv(std::istream& in);

}  // namespace ltrec

#endif  // LTREC_CF_HPP_
