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

#ifndef LTREC_HARNESS_HPP_
#define LTREC_HARNESS_HPP_

#include <array>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "ltrec/age_model.hpp"
#include "ltrec/cf.hpp"
#include "ltrec/dataset.hpp"
#include "ltrec/memetic.hpp"
#include "ltrec/metrics.hpp"
#include "ltrec/profiles.hpp"

namespace ltrec {

// Version string baked in at configure time (`git describe`).
std::string_view version();

enum class Method { kProposed, kUserCf, kItemCf, kPlainGenetic };

inline constexpr std::array<Method, 4> kAllMethods = {Method::kProposed, Method::kUserCf,
                                                      Method::kItemCf, Method::kPlainGenetic};

std::string_view method_name(Method m);
std::optional<Method> parse_method(std::string_view name);

// Which items a user's list may draw from.
enum class CandidateUniverse {
  kCatalog,    // every item the user has not rated in train
  kTestItems,  // the user's held-out items
};

struct ExperimentConfig {
  MovieLensPaths paths;
  std::size_t k = 10;
  double head_item_fraction = 0.2;
  double split_fraction = 0.2;
  std::size_t min_train_ratings = 5;
  std::size_t dynamics_bins = 10;
  CfConfig cf;
  std::size_t top_pool_size = 500;
  ObjectiveWeights weights;
  MemeticConfig memetic;
  InjectionParams injection;
  AgeSource age_source = AgeSource::kPredicted;
  CandidateUniverse candidates = CandidateUniverse::kCatalog;
  std::size_t rounds = 1;
  std::uint64_t seed = 42;
  std::size_t max_users = 0;  // 0 keeps every eligible user
  std::size_t threads = 1;
  std::vector<Method> methods{kAllMethods.begin(), kAllMethods.end()};
  std::filesystem::path output_dir;

  void validate() const;
  nlohmann::json to_json() const;
  static ExperimentConfig from_json(const nlohmann::json& j);
};

struct AgeAccuracy {
  double accuracy = 0.0;
  double majority_rate = 0.0;  // accuracy of always answering the commonest training label
  std::size_t train_users = 0;
  std::size_t test_users = 0;
};

// Everything derived from the dataset once per experiment: split, rating
// stores, popularity partition, profiles, curves, age classifier and CF
// models. Immutable after construction.
class Experiment {
 public:
  static Experiment load(const ExperimentConfig& config);
  static Experiment from_dataset(const ExperimentConfig& config, Dataset dataset);

  Experiment(Experiment&&) noexcept;
  Experiment& operator=(Experiment&&) noexcept;
  ~Experiment();

  const ExperimentConfig& config() const;
  const Dataset& dataset() const;
  const SplitDataset& split() const;
  const RatingMatrix& train() const;
  const RatingMatrix& test() const;
  const PopularityPartition& partition() const;
  const AgeGenreProfiles& profiles() const;
  const DynamicsCurves& curves() const;
  const DynamicsCurve& overall_curve() const;
  const NearestCentroidClassifier* classifier() const;
  const UserKnn& user_knn() const;
  const std::vector<double>& train_means() const;

  // Warm users (>= min_train_ratings train, >= 1 test rating, >= k test
  // ratings in test-item mode), subsampled to max_users when set.
  const std::vector<UserIndex>& eligible_users() const;
  std::size_t eligible_before_subsample() const;

  std::vector<ItemIndex> universe(UserIndex u) const;

  RecommenderModel model() const;
  OptimizeOptions optimize_options(Method m) const;

  // Lists for every eligible user, in eligible_users() order.
  std::vector<RecommendationList> recommend(Method m, const ServingHistory& history,
                                            std::vector<UserRecommendation>* details = nullptr) const;
  std::vector<ItemIndex> recommend_user(Method m, UserIndex u,
                                        const ServingHistory& history) const;

  EvalReport evaluate(Method m, std::span<const RecommendationList> lists) const;

  // Nearest-centroid accuracy on a seeded user split.
  AgeAccuracy age_accuracy(double holdout_fraction = 0.2) const;

 private:
  struct State;
  explicit Experiment(std::unique_ptr<State> state);
  const ItemKnn& item_knn() const;
  std::unique_ptr<State> state_;
};

struct ExperimentResult {
  std::vector<EvalReport> reports;
  std::map<Method, std::vector<RecommendationList>> lists;
  nlohmann::json summary;  // config, version, eligibility, reports
};

// Runs every configured method on every eligible user and, when
// output_dir is set, writes summary.csv, report.json, per-method
// recommendation and per-user CSVs and the figure data. Nothing is left in
// output_dir if the run fails.
ExperimentResult run_experiment(const ExperimentConfig& config);
ExperimentResult run_experiment(const Experiment& experiment);

// age_genre_profile.csv, dynamics_by_age.csv, lt_sh_over_time.csv.
void emit_figure_data(const AgeGenreProfiles& profiles, const DynamicsCurves& curves,
                      const DynamicsCurve& overall, const std::filesystem::path& outdir);

struct RoundReport {
  std::size_t round = 1;
  EvalReport report;
  std::vector<RecommendationList> lists;
};

// R rounds of the proposed method; the serving history absorbs each
// round's lists before the next round starts.
std::vector<RoundReport> multi_round_serve(const Experiment& experiment, std::size_t rounds,
                                           ServingHistory* history_out = nullptr);

// Applies fn(i) for i in [0, n) on `threads` workers.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn);

}  // namespace ltrec

#endif  // LTREC_HARNESS_HPP_
