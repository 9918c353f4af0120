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

#ifndef LTREC_MEMETIC_HPP_
#define LTREC_MEMETIC_HPP_

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "ltrec/age_model.hpp"
#include "ltrec/cf.hpp"
#include "ltrec/dataset.hpp"
#include "ltrec/objectives.hpp"
#include "ltrec/profiles.hpp"

namespace ltrec {

using Rng = std::mt19937_64;

// Stable per-user stream derived from a run seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

// N_i: how often item i appeared in previously served lists.
class ServingHistory {
 public:
  explicit ServingHistory(std::size_t num_items = 0) : counts_(num_items, 0) {}

  std::size_t num_items() const { return counts_.size(); }
  std::uint32_t count(ItemIndex i) const { return i < counts_.size() ? counts_[i] : 0; }
  void record_served(std::span<const ItemIndex> list);
  void reset() { std::fill(counts_.begin(), counts_.end(), 0); }

  // `item_id,count`, nonzero counts only.
  void write_csv(std::ostream& out, const Dataset& dataset) const;
  static ServingHistory read_csv(std::istream& in, const Dataset& dataset);

 private:
  std::vector<std::uint32_t> counts_;
};

// Increments N_i for every item of `list`.
ServingHistory& record_served(ServingHistory& history, std::span<const ItemIndex> list);

struct InjectionParams {
  double decay = 0.1;           // a
  std::size_t pool_size = 50;   // P
  std::size_t attempts_per_slot = 50;
};

// M_i * exp(-a * N_i) / 5.
double injection_probability(double same_age_mean, std::uint32_t served_count, double decay);

struct InjectionCandidate {
  ItemIndex item = 0;
  double same_age_mean = 0.0;  // M_i, 0 when the age group never rated i
};

// Rejection-samples up to `pool_size` distinct items from `bag`: draw a
// uniform item, accept it with its injection probability, remove accepted
// items. Gives up after attempts_per_slot * pool_size draws.
std::vector<ItemIndex> inject_items(std::span<const InjectionCandidate> bag,
                                    const InjectionParams& params,
                                    const ServingHistory& history, Rng& rng);

// Mean train rating of each item among users of each age group (0 when the
// group has no rating for it), indexed [age slot][item].
using SameAgeMeans = std::array<std::vector<double>, kNumAgeGroups>;
SameAgeMeans same_age_item_means(const Dataset& dataset, const RatingMatrix& train);

enum class NormalizationMode {
  kInitialPopulation,  // bounds of generation 0, fixed for the run
  kCurrentPopulation,  // bounds of each generation
};

enum class SelectionMode {
  kWeightedSum,
  kNondominated,  // nondominated rank first, weighted sum within a rank
};

struct MemeticConfig {
  std::size_t population_size = 100;
  std::size_t generations = 50;
  double crossover_rate = 0.9;
  double mutation_rate = 0.05;
  std::size_t tournament_size = 3;
  std::optional<std::size_t> local_search_trials;  // unset: 2k
  std::size_t elitism_count = 2;
  std::uint64_t rng_seed = 42;
  NormalizationMode normalization = NormalizationMode::kInitialPopulation;
  SelectionMode selection = SelectionMode::kWeightedSum;

  std::size_t trials_for(std::size_t k) const { return local_search_trials.value_or(2 * k); }
  void validate() const;
};

using Chromosome = std::vector<ItemIndex>;

bool has_duplicates(std::span<const ItemIndex> list);

// k distinct pool items per individual; a fraction drawn uniformly per
// individual comes from `injected`, the rest from `top_predicted`, each
// side topping up the other when it runs short.
std::vector<Chromosome> initialize_population(std::span<const ItemIndex> top_predicted,
                                              std::span<const ItemIndex> injected,
                                              std::size_t k, std::size_t population_size,
                                              Rng& rng);

// Uniform position-wise crossover. Slots whose gene is already present are
// refilled from the parents' unused genes, then from `pool`.
Chromosome crossover(const Chromosome& a, const Chromosome& b,
                     std::span<const ItemIndex> pool, Rng& rng);

// Each slot is replaced with probability `rate` by a pool item not in the
// list, when one exists.
Chromosome mutate(Chromosome individual, std::span<const ItemIndex> pool, double rate,
                  Rng& rng);

// Objective evaluation plus scalarization under fixed bounds.
struct FitnessFunction {
  const ObjectiveContext* context = nullptr;
  PopulationStats stats;
  ObjectiveWeights weights;

  double operator()(std::span<const ItemIndex> list) const {
    return scalarize(context->evaluate(list), stats, weights);
  }
};

// `trials` random single-slot swaps against pool items, each kept only if it
// strictly lowers the fitness.
Chromosome local_search(Chromosome individual, std::span<const ItemIndex> pool,
                        const FitnessFunction& fitness, std::size_t trials, Rng& rng);

struct GenerationStats {
  std::size_t generation = 0;
  double best_fitness = 0.0;
  double mean_fitness = 0.0;
};

struct CandidatePool {
  std::vector<ItemIndex> top_predicted;
  std::vector<ItemIndex> injected;
  std::vector<ItemIndex> all;  // union of the two
};

struct MemeticResult {
  Chromosome best;
  ObjectiveVector objectives;
  double fitness = 0.0;
  std::vector<GenerationStats> trace;
};

// The generational loop: tournament selection, crossover, mutation, local
// search and elitism over a fixed candidate pool.
MemeticResult run_memetic(const ObjectiveContext& context, const CandidatePool& pool,
                          std::size_t k, const MemeticConfig& config,
                          const ObjectiveWeights& weights, Rng& rng);

// `generation,best_fitness,mean_fitness`
void write_trace_csv(std::ostream& out, std::span<const GenerationStats> trace);

enum class AgeSource { kPredicted, kLabel };

// Read-only inputs shared by every user's optimization.
struct RecommenderModel {
  const Dataset* dataset = nullptr;
  const RatingMatrix* train = nullptr;
  const PopularityPartition* partition = nullptr;
  const AgeGenreProfiles* profiles = nullptr;
  const DynamicsCurves* curves = nullptr;
  const AgeClassifier* classifier = nullptr;
  const UserKnn* knn = nullptr;
  const SameAgeMeans* same_age_means = nullptr;
  std::span<const GenreMask> item_genres;
};

struct OptimizeOptions {
  std::size_t k = 10;
  std::size_t top_pool_size = 500;
  std::size_t min_train_ratings = 5;
  bool use_injection = true;
  InjectionParams injection;
  MemeticConfig memetic;
  ObjectiveWeights weights;
  AgeSource age_source = AgeSource::kPredicted;
};

struct UserRecommendation {
  UserIndex user = 0;
  std::vector<ItemIndex> items;  // predicted rating descending
  ObjectiveVector objectives;
  double fitness = 0.0;
  AgeGroup age_used = AgeGroup::k25;
  std::size_t target_long_tail = 0;
  std::size_t pool_size = 0;
  std::size_t injected = 0;
  std::vector<GenerationStats> trace;
};

// Predict age, build the candidate pool from `universe` (items u may be
// recommended), seed, evolve and return the elite list. `predictions` are
// the user's CF predictions indexed by item; when empty they are computed.
// Throws ColdUserError below `min_train_ratings` and InvalidArgument when
// the pool holds fewer than k items.
UserRecommendation optimize_user(const RecommenderModel& model, UserIndex u,
                                 std::span<const ItemIndex> universe,
                                 const ServingHistory& history,
                                 const OptimizeOptions& options,
                                 std::span<const double> predictions = {});

}  // namespace ltrec

#endif  // LTREC_MEMETIC_HPP_
