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

#include "ltrec/memetic.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <unordered_set>

#include "csv_util.hpp"

namespace ltrec {
namespace {

std::size_t uniform_index(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

bool contains(std::span<const ItemIndex> list, ItemIndex item) {
  return std::find(list.begin(), list.end(), item) != list.end();
}

// Moves `count` uniformly chosen elements of `from` to its front.
void partial_shuffle(std::vector<ItemIndex>& from, std::size_t count, Rng& rng) {
  count = std::min(count, from.size());
  for (std::size_t i = 0; i < count; ++i) {
    std::size_t j = i + uniform_index(rng, from.size() - i);
    std::swap(from[i], from[j]);
  }
}

struct Scored {
  Chromosome items;
  ObjectiveVector objectives;
  double fitness = 0.0;
  std::size_t rank = 0;  // nondominated front, 0 is best
};

void assign_ranks(std::vector<Scored>& pop) {
  const std::size_t n = pop.size();
  std::vector<std::size_t> dominated_by(n, 0);
  std::vector<std::vector<std::size_t>> dominates_list(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j && dominates(pop[i].objectives, pop[j].objectives)) {
        dominates_list[i].push_back(j);
        ++dominated_by[j];
      }
    }
  }
  std::vector<std::size_t> front;
  for (std::size_t i = 0; i < n; ++i) {
    if (dominated_by[i] == 0) front.push_back(i);
  }
  std::size_t rank = 0;
  while (!front.empty()) {
    std::vector<std::size_t> next;
    for (std::size_t i : front) {
      pop[i].rank = rank;
      for (std::size_t j : dominates_list[i]) {
        if (--dominated_by[j] == 0) next.push_back(j);
      }
    }
    front = std::move(next);
    ++rank;
  }
}

bool better(const Scored& a, const Scored& b, SelectionMode mode) {
  if (mode == SelectionMode::kNondominated && a.rank != b.rank) return a.rank < b.rank;
  return a.fitness < b.fitness;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(seed ^ mix(stream));
}

void ServingHistory::record_served(std::span<const ItemIndex> list) {
  for (ItemIndex i : list) {
    if (i >= counts_.size()) counts_.resize(i + 1, 0);
    ++counts_[i];
  }
}

void ServingHistory::write_csv(std::ostream& out, const Dataset& dataset) const {
  out << "item_id,count\n";
  for (ItemIndex i = 0; i < counts_.size(); ++i) {
    if (counts_[i] > 0) out << dataset.item(i).id << ',' << counts_[i] << '\n';
  }
}

ServingHistory ServingHistory::read_csv(std::istream& in, const Dataset& dataset) {
  ServingHistory h(dataset.num_items());
  csv::for_each_row(in, 2, [&](const auto& f, std::size_t n) {
    auto item = dataset.item_index(csv::to_int(f[0], n));
    if (!item) throw ParseError("<csv>", n, "unknown item id");
    auto count = csv::to_int(f[1], n);
    if (count < 0) throw ParseError("<csv>", n, "negative count");
    h.counts_[*item] = static_cast<std::uint32_t>(count);
  });
  return h;
}

ServingHistory& record_served(ServingHistory& history, std::span<const ItemIndex> list) {
  history.record_served(list);
  return history;
}

double injection_probability(double same_age_mean, std::uint32_t served_count, double decay) {
  return same_age_mean * std::exp(-decay * static_cast<double>(served_count)) / 5.0;
}

std::vector<ItemIndex> inject_items(std::span<const InjectionCandidate> bag,
                                    const InjectionParams& params,
                                    const ServingHistory& history, Rng& rng) {
  if (!(params.decay > 0.0)) throw InvalidArgument("injection decay must be positive");
  std::vector<InjectionCandidate> remaining(bag.begin(), bag.end());
  std::vector<ItemIndex> out;
  const std::size_t budget = params.attempts_per_slot * params.pool_size;
  for (std::size_t attempt = 0;
       attempt < budget && out.size() < params.pool_size && !remaining.empty(); ++attempt) {
    const std::size_t pick = uniform_index(rng, remaining.size());
    const double r = uniform01(rng);
    const auto& c = remaining[pick];
    if (r < injection_probability(c.same_age_mean, history.count(c.item), params.decay)) {
      out.push_back(c.item);
      remaining[pick] = remaining.back();
      remaining.pop_back();
    }
  }
  return out;
}

SameAgeMeans same_age_item_means(const Dataset& dataset, const RatingMatrix& train) {
  SameAgeMeans means;
  for (auto& m : means) m.assign(train.num_items(), 0.0);
  for (ItemIndex i = 0; i < train.num_items(); ++i) {
    std::array<double, kNumAgeGroups> sum{};
    std::array<std::size_t, kNumAgeGroups> count{};
    for (const auto& e : train.item_column(i)) {
      const std::size_t s = age_slot(dataset.user(e.index).age);
      sum[s] += e.value;
      ++count[s];
    }
    for (std::size_t s = 0; s < kNumAgeGroups; ++s) {
      if (count[s] > 0) means[s][i] = sum[s] / static_cast<double>(count[s]);
    }
  }
  return means;
}

void MemeticConfig::validate() const {
  if (population_size < 2) throw InvalidArgument("population_size must be >= 2");
  if (elitism_count >= population_size) {
    throw InvalidArgument("elitism_count must be smaller than population_size");
  }
  if (tournament_size < 1) throw InvalidArgument("tournament_size must be >= 1");
  if (!(crossover_rate >= 0.0 && crossover_rate <= 1.0)) {
    throw InvalidArgument("crossover_rate must lie in [0, 1]");
  }
  if (!(mutation_rate >= 0.0 && mutation_rate <= 1.0)) {
    throw InvalidArgument("mutation_rate must lie in [0, 1]");
  }
}

bool has_duplicates(std::span<const ItemIndex> list) {
  std::vector<ItemIndex> sorted(list.begin(), list.end());
  std::sort(sorted.begin(), sorted.end());
  return std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end();
}

std::vector<Chromosome> initialize_population(std::span<const ItemIndex> top_predicted,
                                              std::span<const ItemIndex> injected,
                                              std::size_t k, std::size_t population_size,
                                              Rng& rng) {
  std::unordered_set<ItemIndex> distinct(top_predicted.begin(), top_predicted.end());
  distinct.insert(injected.begin(), injected.end());
  if (distinct.size() < k) {
    throw InvalidArgument("candidate pool has " + std::to_string(distinct.size()) +
                          " distinct items, fewer than k = " + std::to_string(k));
  }
  std::vector<Chromosome> population;
  population.reserve(population_size);
  std::vector<ItemIndex> top(top_predicted.begin(), top_predicted.end());
  std::vector<ItemIndex> inj(injected.begin(), injected.end());
  for (std::size_t n = 0; n < population_size; ++n) {
    const double mix = uniform01(rng);
    const std::size_t want_injected =
        std::min<std::size_t>(static_cast<std::size_t>(std::lround(mix * static_cast<double>(k))),
                              inj.size());
    Chromosome c;
    c.reserve(k);
    partial_shuffle(inj, inj.size(), rng);
    partial_shuffle(top, top.size(), rng);
    std::size_t ti = 0, ii = 0;
    while (c.size() < want_injected && ii < inj.size()) {
      ItemIndex item = inj[ii++];
      if (!contains(c, item)) c.push_back(item);
    }
    auto take = [&](std::vector<ItemIndex>& from, std::size_t& at) {
      while (c.size() < k && at < from.size()) {
        ItemIndex item = from[at++];
        if (!contains(c, item)) c.push_back(item);
      }
    };
    take(top, ti);
    take(inj, ii);
    population.push_back(std::move(c));
  }
  return population;
}

Chromosome crossover(const Chromosome& a, const Chromosome& b,
                     std::span<const ItemIndex> pool, Rng& rng) {
  const std::size_t k = a.size();
  Chromosome child(k);
  std::vector<bool> hole(k, false);
  std::vector<ItemIndex> placed;
  for (std::size_t p = 0; p < k; ++p) {
    const ItemIndex gene = (p < b.size() && uniform01(rng) < 0.5) ? b[p] : a[p];
    if (contains(placed, gene)) {
      hole[p] = true;
    } else {
      child[p] = gene;
      placed.push_back(gene);
    }
  }
  std::vector<ItemIndex> spare;
  for (const Chromosome* parent : {&a, &b}) {
    for (ItemIndex item : *parent) {
      if (!contains(placed, item) && !contains(spare, item)) spare.push_back(item);
    }
  }
  partial_shuffle(spare, spare.size(), rng);
  std::size_t next_spare = 0;
  std::vector<ItemIndex> pool_order;
  std::size_t next_pool = 0;
  for (std::size_t p = 0; p < k; ++p) {
    if (!hole[p]) continue;
    if (next_spare < spare.size()) {
      child[p] = spare[next_spare++];
    } else {
      if (pool_order.empty()) {
        pool_order.assign(pool.begin(), pool.end());
        partial_shuffle(pool_order, pool_order.size(), rng);
      }
      while (next_pool < pool_order.size() && contains(placed, pool_order[next_pool])) {
        ++next_pool;
      }
      if (next_pool == pool_order.size()) {
        throw InvalidArgument("pool too small to repair crossover child");
      }
      child[p] = pool_order[next_pool++];
    }
    placed.push_back(child[p]);
  }
  return child;
}

Chromosome mutate(Chromosome individual, std::span<const ItemIndex> pool, double rate,
                  Rng& rng) {
  if (rate <= 0.0 || pool.empty()) return individual;
  for (std::size_t p = 0; p < individual.size(); ++p) {
    if (uniform01(rng) >= rate) continue;
    // Rejection sampling first; fall back to an explicit scan when the pool
    // is mostly occupied by the list.
    bool replaced = false;
    for (int attempt = 0; attempt < 8 && !replaced; ++attempt) {
      ItemIndex cand = pool[uniform_index(rng, pool.size())];
      if (!contains(individual, cand)) {
        individual[p] = cand;
        replaced = true;
      }
    }
    if (replaced) continue;
    std::vector<ItemIndex> free;
    for (ItemIndex cand : pool) {
      if (!contains(individual, cand) && !contains(free, cand)) free.push_back(cand);
    }
    if (!free.empty()) individual[p] = free[uniform_index(rng, free.size())];
  }
  return individual;
}

Chromosome local_search(Chromosome individual, std::span<const ItemIndex> pool,
                        const FitnessFunction& fitness, std::size_t trials, Rng& rng) {
  if (trials == 0 || pool.empty() || individual.empty()) return individual;
  double current = fitness(individual);
  for (std::size_t t = 0; t < trials; ++t) {
    const std::size_t pos = uniform_index(rng, individual.size());
    const ItemIndex cand = pool[uniform_index(rng, pool.size())];
    if (contains(individual, cand)) continue;
    const ItemIndex old = individual[pos];
    individual[pos] = cand;
    const double f = fitness(individual);
    if (f < current) {
      current = f;
    } else {
      individual[pos] = old;
    }
  }
  return individual;
}

MemeticResult run_memetic(const ObjectiveContext& context, const CandidatePool& pool,
                          std::size_t k, const MemeticConfig& config,
                          const ObjectiveWeights& weights, Rng& rng) {
  config.validate();
  const std::size_t n = config.population_size;
  const std::size_t trials = config.trials_for(k);

  std::vector<Scored> pop;
  for (auto& c : initialize_population(pool.top_predicted, pool.injected, k, n, rng)) {
    Scored s;
    s.objectives = context.evaluate(c);
    s.items = std::move(c);
    pop.push_back(std::move(s));
  }

  FitnessFunction fitness{&context, {}, weights};
  auto rescore = [&]() {
    std::vector<ObjectiveVector> objs;
    objs.reserve(pop.size());
    for (const auto& s : pop) objs.push_back(s.objectives);
    fitness.stats = PopulationStats::of(objs);
  };
  auto refit = [&]() {
    for (auto& s : pop) s.fitness = scalarize(s.objectives, fitness.stats, weights);
    if (config.selection == SelectionMode::kNondominated) assign_ranks(pop);
  };
  auto record = [&](std::size_t generation, std::vector<GenerationStats>& trace) {
    double best = pop.front().fitness, sum = 0.0;
    for (const auto& s : pop) {
      best = std::min(best, s.fitness);
      sum += s.fitness;
    }
    trace.push_back({generation, best, sum / static_cast<double>(pop.size())});
  };
  auto order = [&]() {
    std::vector<std::size_t> idx(pop.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      return better(pop[a], pop[b], config.selection);
    });
    return idx;
  };
  auto tournament = [&]() -> const Scored& {
    std::size_t best = uniform_index(rng, pop.size());
    for (std::size_t t = 1; t < config.tournament_size; ++t) {
      std::size_t cand = uniform_index(rng, pop.size());
      if (better(pop[cand], pop[best], config.selection)) best = cand;
    }
    return pop[best];
  };

  rescore();
  refit();
  MemeticResult result;
  record(0, result.trace);

  for (std::size_t g = 1; g <= config.generations; ++g) {
    std::vector<Scored> next;
    next.reserve(n);
    auto ranked = order();
    for (std::size_t e = 0; e < config.elitism_count; ++e) next.push_back(pop[ranked[e]]);
    while (next.size() < n) {
      const Scored& pa = tournament();
      const Scored& pb = tournament();
      Chromosome child = uniform01(rng) < config.crossover_rate
                             ? crossover(pa.items, pb.items, pool.all, rng)
                             : pa.items;
      child = mutate(std::move(child), pool.all, config.mutation_rate, rng);
      child = local_search(std::move(child), pool.all, fitness, trials, rng);
      Scored s;
      s.objectives = context.evaluate(child);
      s.items = std::move(child);
      next.push_back(std::move(s));
    }
    pop = std::move(next);
    if (config.normalization == NormalizationMode::kCurrentPopulation) rescore();
    refit();
    record(g, result.trace);
  }

  const Scored& best = pop[order().front()];
  result.best = best.items;
  result.objectives = best.objectives;
  result.fitness = best.fitness;
  return result;
}

void write_trace_csv(std::ostream& out, std::span<const GenerationStats> trace) {
  out << "generation,best_fitness,mean_fitness\n";
  for (const auto& t : trace) {
    out << t.generation << ',' << csv::format_double(t.best_fitness) << ','
        << csv::format_double(t.mean_fitness) << '\n';
  }
}

UserRecommendation optimize_user(const RecommenderModel& model, UserIndex u,
                                 std::span<const ItemIndex> universe,
                                 const ServingHistory& history,
                                 const OptimizeOptions& options,
                                 std::span<const double> predictions) {
  const RatingMatrix& train = *model.train;
  if (train.user_count(u) < std::max<std::size_t>(options.min_train_ratings, 1)) {
    throw ColdUserError(u);
  }
  std::vector<double> computed;
  if (predictions.empty()) {
    computed = model.knn->predict_all(u);
    predictions = computed;
  }

  UserRecommendation rec;
  rec.user = u;
  if (options.age_source == AgeSource::kPredicted && model.classifier != nullptr) {
    rec.age_used = model.classifier->predict(featurize_user(*model.dataset, train, u));
  } else {
    rec.age_used = model.dataset->user(u).age;
  }
  const std::size_t slot = age_slot(rec.age_used);
  rec.target_long_tail =
      target_long_tail_count((*model.curves)[slot], train.user_count(u), options.k);

  Rng rng(derive_seed(options.memetic.rng_seed, model.dataset->user(u).id));

  CandidatePool pool;
  pool.top_predicted =
      rank_candidates(universe, predictions, *model.partition, options.top_pool_size);
  if (options.use_injection) {
    std::vector<InjectionCandidate> bag;
    const auto& means = (*model.same_age_means)[slot];
    for (ItemIndex i : universe) {
      if (model.partition->is_long_tail(i)) bag.push_back({i, means[i]});
    }
    pool.injected = inject_items(bag, options.injection, history, rng);
  }
  pool.all = pool.top_predicted;
  {
    std::unordered_set<ItemIndex> in_top(pool.top_predicted.begin(), pool.top_predicted.end());
    for (ItemIndex i : pool.injected) {
      if (!in_top.contains(i)) pool.all.push_back(i);
    }
  }
  rec.pool_size = pool.all.size();
  rec.injected = pool.injected.size();
  if (pool.all.size() < options.k) {
    throw InvalidArgument("candidate pool for user " + std::to_string(model.dataset->user(u).id) +
                          " has fewer than k items");
  }

  ObjectiveContext context;
  context.partition = model.partition;
  context.item_genres = model.item_genres;
  context.predictions = predictions;
  context.pgu = (*model.profiles)[slot].pgu;
  context.target_long_tail = rec.target_long_tail;

  MemeticResult result =
      run_memetic(context, pool, options.k, options.memetic, options.weights, rng);
  rec.items = std::move(result.best);
  std::stable_sort(rec.items.begin(), rec.items.end(), [&](ItemIndex a, ItemIndex b) {
    return predictions[a] != predictions[b] ? predictions[a] > predictions[b] : a < b;
  });
  rec.objectives = result.objectives;
  rec.fitness = result.fitness;
  rec.trace = std::move(result.trace);
  return rec;
}

}  // namespace ltrec
