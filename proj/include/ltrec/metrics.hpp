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

#ifndef LTREC_METRICS_HPP_
#define LTREC_METRICS_HPP_

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "ltrec/dataset.hpp"

namespace ltrec {

struct RecommendationList {
  UserIndex user = 0;
  std::vector<ItemIndex> items;
  friend bool operator==(const RecommendationList&, const RecommendationList&) = default;
};

// Train mean per user; NaN for users without train ratings.
std::vector<double> user_means(const RatingMatrix& train);

// Share of recommended items the user rated in test strictly above their
// train mean. Items missing from the test set are not relevant. Throws
// InvalidArgument when nothing was recommended.
double precision(std::span<const RecommendationList> lists, const RatingMatrix& test,
                 std::span<const double> train_user_means);

// 1 / sum of train popularity over every recommended item occurrence;
// +infinity when that sum is zero.
double novelty(std::span<const RecommendationList> lists,
               const PopularityPartition& partition);

// Number of distinct items recommended to anyone.
std::size_t aggregate_diversity(std::span<const RecommendationList> lists);

struct UserBreakdown {
  UserId user = 0;
  std::size_t recommended = 0;
  std::size_t relevant = 0;
  std::size_t long_tail = 0;
  std::size_t popularity_sum = 0;
};

struct EvalReport {
  std::string method;
  double precision = 0.0;
  double novelty = 0.0;
  bool novelty_infinite = false;
  std::size_t aggregate_diversity = 0;
  std::size_t num_users = 0;
  double long_tail_share = 0.0;  // long-tail fraction of recommended items
  std::vector<UserBreakdown> per_user;
  nlohmann::json config;
};

EvalReport evaluate_lists(std::string method, std::span<const RecommendationList> lists,
                          const Dataset& dataset, const RatingMatrix& test,
                          std::span<const double> train_user_means,
                          const PopularityPartition& partition);

nlohmann::json to_json(const EvalReport& report, bool include_per_user = false);

// One row per (method, metric): `method,metric,value`.
void write_summary_csv(std::ostream& out, std::span<const EvalReport> reports);
// `method,user_id,recommended,relevant,long_tail,popularity_sum`
void write_per_user_csv(std::ostream& out, const EvalReport& report);

}  // namespace ltrec

#endif  // LTREC_METRICS_HPP_
