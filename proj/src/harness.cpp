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

#include "ltrec/harness.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <mutex>
#include <numeric>
#include <thread>
#include <unistd.h>

#ifndef LTREC_VERSION
#define LTREC_VERSION "unknown"
#endif

namespace ltrec {
namespace {

std::string_view universe_name(CandidateUniverse c) {
  return c == CandidateUniverse::kCatalog ? "catalog" : "test";
}

CandidateUniverse parse_universe(std::string_view s) {
  if (s == "catalog") return CandidateUniverse::kCatalog;
  if (s == "test") return CandidateUniverse::kTestItems;
  throw InvalidArgument("unknown candidate universe '" + std::string(s) + "'");
}

std::string_view age_source_name(AgeSource a) {
  return a == AgeSource::kPredicted ? "predicted" : "label";
}

AgeSource parse_age_source(std::string_view s) {
  if (s == "predicted") return AgeSource::kPredicted;
  if (s == "label") return AgeSource::kLabel;
  throw InvalidArgument("unknown age source '" + std::string(s) + "'");
}

std::string_view normalization_name(NormalizationMode m) {
  return m == NormalizationMode::kInitialPopulation ? "initial" : "current";
}

NormalizationMode parse_normalization(std::string_view s) {
  if (s == "initial") return NormalizationMode::kInitialPopulation;
  if (s == "current") return NormalizationMode::kCurrentPopulation;
  throw InvalidArgument("unknown normalization mode '" + std::string(s) + "'");
}

std::string_view selection_name(SelectionMode m) {
  return m == SelectionMode::kWeightedSum ? "weighted" : "nondominated";
}

SelectionMode parse_selection(std::string_view s) {
  if (s == "weighted") return SelectionMode::kWeightedSum;
  if (s == "nondominated") return SelectionMode::kNondominated;
  throw InvalidArgument("unknown selection mode '" + std::string(s) + "'");
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

}  // namespace

std::string_view version() { return LTREC_VERSION; }

std::string_view method_name(Method m) {
  switch (m) {
    case Method::kProposed: return "proposed";
    case Method::kUserCf: return "user-cf";
    case Method::kItemCf: return "item-cf";
    case Method::kPlainGenetic: return "plain-genetic";
  }
  return "unknown";
}

std::optional<Method> parse_method(std::string_view name) {
  for (Method m : kAllMethods) {
    if (method_name(m) == name) return m;
  }
  return std::nullopt;
}

void ExperimentConfig::validate() const {
  if (k == 0) throw InvalidArgument("k must be positive");
  if (!(head_item_fraction > 0.0 && head_item_fraction < 1.0)) {
    throw InvalidArgument("head_item_fraction must lie in (0, 1)");
  }
  if (!(split_fraction > 0.0 && split_fraction < 1.0)) {
    throw InvalidArgument("split_fraction must lie in (0, 1)");
  }
  if (dynamics_bins < 2) throw InvalidArgument("dynamics_bins must be >= 2");
  if (top_pool_size < k) throw InvalidArgument("top_pool_size must be >= k");
  if (injection.pool_size < k) throw InvalidArgument("injection pool size must be >= k");
  if (!(injection.decay > 0.0)) throw InvalidArgument("injection decay must be positive");
  if (rounds == 0) throw InvalidArgument("rounds must be >= 1");
  if (methods.empty()) throw InvalidArgument("no methods selected");
  memetic.validate();
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json j;
  j["ratings_path"] = paths.ratings.string();
  j["users_path"] = paths.users.string();
  j["movies_path"] = paths.movies.string();
  j["k"] = k;
  j["head_item_fraction"] = head_item_fraction;
  j["split_fraction"] = split_fraction;
  j["min_train_ratings"] = min_train_ratings;
  j["dynamics_bins"] = dynamics_bins;
  j["k_neighbors"] = cf.k_neighbors;
  j["min_overlap"] = cf.min_overlap;
  j["top_pool_size"] = top_pool_size;
  j["weights"] = weights.values();
  j["memetic"] = {
      {"population_size", memetic.population_size},
      {"generations", memetic.generations},
      {"crossover_rate", memetic.crossover_rate},
      {"mutation_rate", memetic.mutation_rate},
      {"tournament_size", memetic.tournament_size},
      {"local_search_trials", memetic.trials_for(k)},
      {"elitism_count", memetic.elitism_count},
      {"normalization", normalization_name(memetic.normalization)},
      {"selection", selection_name(memetic.selection)},
  };
  j["injection"] = {{"decay", injection.decay},
                    {"pool_size", injection.pool_size},
                    {"attempts_per_slot", injection.attempts_per_slot}};
  j["age_source"] = age_source_name(age_source);
  j["candidates"] = universe_name(candidates);
  j["rounds"] = rounds;
  j["seed"] = seed;
  j["max_users"] = max_users;
  j["threads"] = threads;
  auto& ms = j["methods"] = nlohmann::json::array();
  for (Method m : methods) ms.push_back(method_name(m));
  j["output_dir"] = output_dir.string();
  return j;
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
  };
  std::string s;
  if (j.contains("ratings_path")) c.paths.ratings = j.at("ratings_path").get<std::string>();
  if (j.contains("users_path")) c.paths.users = j.at("users_path").get<std::string>();
  if (j.contains("movies_path")) c.paths.movies = j.at("movies_path").get<std::string>();
  get("k", c.k);
  get("head_item_fraction", c.head_item_fraction);
  get("split_fraction", c.split_fraction);
  get("min_train_ratings", c.min_train_ratings);
  get("dynamics_bins", c.dynamics_bins);
  get("k_neighbors", c.cf.k_neighbors);
  get("min_overlap", c.cf.min_overlap);
  get("top_pool_size", c.top_pool_size);
  if (j.contains("weights")) {
    auto w = j.at("weights").get<std::array<double, kNumObjectives>>();
    c.weights = ObjectiveWeights(w[0], w[1], w[2], w[3]);
  }
  if (j.contains("memetic")) {
    const auto& m = j.at("memetic");
    auto mget = [&](const char* key, auto& field) {
      if (m.contains(key)) field = m.at(key).get<std::decay_t<decltype(field)>>();
    };
    mget("population_size", c.memetic.population_size);
    mget("generations", c.memetic.generations);
    mget("crossover_rate", c.memetic.crossover_rate);
    mget("mutation_rate", c.memetic.mutation_rate);
    mget("tournament_size", c.memetic.tournament_size);
    mget("elitism_count", c.memetic.elitism_count);
    if (m.contains("local_search_trials")) {
      c.memetic.local_search_trials = m.at("local_search_trials").get<std::size_t>();
    }
    if (m.contains("normalization")) {
      c.memetic.normalization = parse_normalization(m.at("normalization").get<std::string>());
    }
    if (m.contains("selection")) {
      c.memetic.selection = parse_selection(m.at("selection").get<std::string>());
    }
  }
  if (j.contains("injection")) {
    const auto& in = j.at("injection");
    if (in.contains("decay")) c.injection.decay = in.at("decay").get<double>();
    if (in.contains("pool_size")) c.injection.pool_size = in.at("pool_size").get<std::size_t>();
    if (in.contains("attempts_per_slot")) {
      c.injection.attempts_per_slot = in.at("attempts_per_slot").get<std::size_t>();
    }
  }
  if (j.contains("age_source")) c.age_source = parse_age_source(j.at("age_source").get<std::string>());
  if (j.contains("candidates")) c.candidates = parse_universe(j.at("candidates").get<std::string>());
  get("rounds", c.rounds);
  get("seed", c.seed);
  get("max_users", c.max_users);
  get("threads", c.threads);
  if (j.contains("methods")) {
    c.methods.clear();
    for (const auto& m : j.at("methods")) {
      auto parsed = parse_method(m.get<std::string>());
      if (!parsed) throw InvalidArgument("unknown method '" + m.get<std::string>() + "'");
      c.methods.push_back(*parsed);
    }
  }
  if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
  return c;
}

void parallel_for(std::size_t n, std::size_t threads,
                  const std::function<void(std::size_t)>& fn) {
  threads = std::max<std::size_t>(1, std::min(threads, n));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> workers;
  for (std::size_t t = 0; t < threads; ++t) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = n;
        }
      }
    });
  }
  for (auto& w : workers) w.join();
  if (failure) std::rethrow_exception(failure);
}

struct Experiment::State {
  ExperimentConfig config;
  Dataset dataset;
  SplitDataset split;
  RatingMatrix train;
  RatingMatrix test;
  PopularityPartition partition;
  AgeGenreProfiles profiles;
  DynamicsCurves curves;
  DynamicsCurve overall;
  std::optional<NearestCentroidClassifier> classifier;
  std::unique_ptr<UserKnn> knn;
  SameAgeMeans same_age_means;
  std::vector<GenreMask> item_genres;
  std::vector<double> means;
  std::vector<UserIndex> eligible;
  std::size_t eligible_total = 0;
  mutable std::once_flag item_knn_once;
  mutable std::unique_ptr<ItemKnn> item_knn;
};

Experiment::Experiment(std::unique_ptr<State> state) : state_(std::move(state)) {}
Experiment::Experiment(Experiment&&) noexcept = default;
Experiment& Experiment::operator=(Experiment&&) noexcept = default;
Experiment::~Experiment() = default;

Experiment Experiment::load(const ExperimentConfig& config) {
  return from_dataset(config, parse_movielens(config.paths));
}

Experiment Experiment::from_dataset(const ExperimentConfig& config, Dataset dataset) {
  config.validate();
  auto s = std::make_unique<State>();
  s->config = config;
  s->config.memetic.rng_seed = config.seed;
  s->dataset = std::move(dataset);
  const Dataset& ds = s->dataset;
  s->split = temporal_split(ds, config.split_fraction, config.min_train_ratings);
  s->train = RatingMatrix(ds.num_users(), ds.num_items(), s->split.train);
  s->test = RatingMatrix(ds.num_users(), ds.num_items(), s->split.test);
  s->partition = popularity_partition(s->train, config.head_item_fraction);
  s->profiles = build_age_genre_profiles(ds, s->split.train);
  s->curves = build_dynamics_curves(ds, s->split.train, s->partition, config.dynamics_bins);
  s->overall = build_overall_curve(ds, s->split.train, s->partition, config.dynamics_bins);
  s->knn = std::make_unique<UserKnn>(s->train, config.cf);
  s->same_age_means = same_age_item_means(ds, s->train);
  s->item_genres = item_genre_masks(ds);
  s->means = user_means(s->train);

  std::vector<LabeledFeatures> examples;
  for (UserIndex u = 0; u < ds.num_users(); ++u) {
    if (s->train.user_count(u) > 0) {
      examples.push_back({featurize_user(ds, s->train, u), ds.user(u).age});
    }
  }
  if (config.age_source == AgeSource::kPredicted) {
    s->classifier = NearestCentroidClassifier::train(examples);
  }

  const std::size_t min_test = config.candidates == CandidateUniverse::kTestItems ? config.k : 1;
  for (UserIndex u = 0; u < ds.num_users(); ++u) {
    if (s->train.user_count(u) >= config.min_train_ratings && s->test.user_count(u) >= min_test) {
      s->eligible.push_back(u);
    }
  }
  s->eligible_total = s->eligible.size();
  if (config.max_users > 0 && s->eligible.size() > config.max_users) {
    Rng rng(derive_seed(config.seed, 0x5eed5eedULL));
    std::shuffle(s->eligible.begin(), s->eligible.end(), rng);
    s->eligible.resize(config.max_users);
    std::sort(s->eligible.begin(), s->eligible.end());
  }
  return Experiment(std::move(s));
}

const ExperimentConfig& Experiment::config() const { return state_->config; }
const Dataset& Experiment::dataset() const { return state_->dataset; }
const SplitDataset& Experiment::split() const { return state_->split; }
const RatingMatrix& Experiment::train() const { return state_->train; }
const RatingMatrix& Experiment::test() const { return state_->test; }
const PopularityPartition& Experiment::partition() const { return state_->partition; }
const AgeGenreProfiles& Experiment::profiles() const { return state_->profiles; }
const DynamicsCurves& Experiment::curves() const { return state_->curves; }
const DynamicsCurve& Experiment::overall_curve() const { return state_->overall; }
const UserKnn& Experiment::user_knn() const { return *state_->knn; }
const std::vector<double>& Experiment::train_means() const { return state_->means; }
const std::vector<UserIndex>& Experiment::eligible_users() const { return state_->eligible; }
std::size_t Experiment::eligible_before_subsample() const { return state_->eligible_total; }

const NearestCentroidClassifier* Experiment::classifier() const {
  return state_->classifier ? &*state_->classifier : nullptr;
}

const ItemKnn& Experiment::item_knn() const {
  std::call_once(state_->item_knn_once, [this] {
    state_->item_knn = std::make_unique<ItemKnn>(state_->train, state_->config.cf);
  });
  return *state_->item_knn;
}

std::vector<ItemIndex> Experiment::universe(UserIndex u) const {
  if (state_->config.candidates == CandidateUniverse::kCatalog) {
    return unrated_items(state_->train, u);
  }
  std::vector<ItemIndex> out;
  for (const auto& e : state_->test.user_row(u)) out.push_back(e.index);
  return out;
}

RecommenderModel Experiment::model() const {
  RecommenderModel m;
  m.dataset = &state_->dataset;
  m.train = &state_->train;
  m.partition = &state_->partition;
  m.profiles = &state_->profiles;
  m.curves = &state_->curves;
  m.classifier = classifier();
  m.knn = state_->knn.get();
  m.same_age_means = &state_->same_age_means;
  m.item_genres = state_->item_genres;
  return m;
}

OptimizeOptions Experiment::optimize_options(Method m) const {
  const ExperimentConfig& c = state_->config;
  OptimizeOptions o;
  o.k = c.k;
  o.top_pool_size = c.top_pool_size;
  o.min_train_ratings = c.min_train_ratings;
  o.injection = c.injection;
  o.memetic = c.memetic;
  o.weights = c.weights;
  o.age_source = c.age_source;
  if (m == Method::kPlainGenetic) {
    o.use_injection = false;
    o.memetic.local_search_trials = 0;
  }
  return o;
}

std::vector<ItemIndex> Experiment::recommend_user(Method m, UserIndex u,
                                                  const ServingHistory& history) const {
  const auto uni = universe(u);
  const std::size_t k = state_->config.k;
  switch (m) {
    case Method::kUserCf:
    case Method::kProposed:
    case Method::kPlainGenetic: {
      const UserKnn& knn = *state_->knn;
      auto sims = knn.similarities(u);
      std::vector<double> preds(state_->dataset.num_items(), 0.0);
      for (ItemIndex i : uni) preds[i] = knn.predict(u, i, sims);
      if (m == Method::kUserCf) return rank_candidates(uni, preds, state_->partition, k);
      return optimize_user(model(), u, uni, history, optimize_options(m), preds).items;
    }
    case Method::kItemCf: {
      const ItemKnn& knn = item_knn();
      std::vector<double> preds(state_->dataset.num_items(), 0.0);
      for (ItemIndex i : uni) preds[i] = knn.predict(u, i);
      return rank_candidates(uni, preds, state_->partition, k);
    }
  }
  return {};
}

std::vector<RecommendationList> Experiment::recommend(
    Method m, const ServingHistory& history, std::vector<UserRecommendation>* details) const {
  const auto& users = state_->eligible;
  std::vector<RecommendationList> lists(users.size());
  if (details != nullptr) details->assign(users.size(), {});
  if (m == Method::kItemCf) item_knn();
  parallel_for(users.size(), state_->config.threads, [&](std::size_t n) {
    const UserIndex u = users[n];
    lists[n].user = u;
    if (details != nullptr && (m == Method::kProposed || m == Method::kPlainGenetic)) {
      const UserKnn& knn = *state_->knn;
      const auto uni = universe(u);
      auto sims = knn.similarities(u);
      std::vector<double> preds(state_->dataset.num_items(), 0.0);
      for (ItemIndex i : uni) preds[i] = knn.predict(u, i, sims);
      (*details)[n] = optimize_user(model(), u, uni, history, optimize_options(m), preds);
      lists[n].items = (*details)[n].items;
    } else {
      lists[n].items = recommend_user(m, u, history);
    }
  });
  return lists;
}

EvalReport Experiment::evaluate(Method m, std::span<const RecommendationList> lists) const {
  EvalReport r = evaluate_lists(std::string(method_name(m)), lists, state_->dataset,
                                state_->test, state_->means, state_->partition);
  r.config = state_->config.to_json();
  r.config["version"] = version();
  return r;
}

AgeAccuracy Experiment::age_accuracy(double holdout_fraction) const {
  std::vector<UserIndex> users;
  for (UserIndex u = 0; u < state_->dataset.num_users(); ++u) {
    if (state_->train.user_count(u) > 0) users.push_back(u);
  }
  Rng rng(derive_seed(state_->config.seed, 0xa9eULL));
  std::shuffle(users.begin(), users.end(), rng);
  const std::size_t n_test = ceil_fraction(holdout_fraction, users.size());
  std::vector<LabeledFeatures> train_examples;
  std::array<std::size_t, kNumAgeGroups> label_counts{};
  for (std::size_t n = n_test; n < users.size(); ++n) {
    const UserIndex u = users[n];
    train_examples.push_back({featurize_user(state_->dataset, state_->train, u),
                              state_->dataset.user(u).age});
    ++label_counts[age_slot(state_->dataset.user(u).age)];
  }
  auto clf = NearestCentroidClassifier::train(train_examples);
  const AgeGroup majority =
      kAgeGroups[std::max_element(label_counts.begin(), label_counts.end()) - label_counts.begin()];
  std::size_t correct = 0, majority_correct = 0;
  for (std::size_t n = 0; n < n_test; ++n) {
    const UserIndex u = users[n];
    const AgeGroup truth = state_->dataset.user(u).age;
    if (clf.predict(featurize_user(state_->dataset, state_->train, u)) == truth) ++correct;
    if (majority == truth) ++majority_correct;
  }
  AgeAccuracy acc;
  acc.train_users = users.size() - n_test;
  acc.test_users = n_test;
  if (n_test > 0) {
    acc.accuracy = static_cast<double>(correct) / static_cast<double>(n_test);
    acc.majority_rate = static_cast<double>(majority_correct) / static_cast<double>(n_test);
  }
  return acc;
}

void emit_figure_data(const AgeGenreProfiles& profiles, const DynamicsCurves& curves,
                      const DynamicsCurve& overall, const std::filesystem::path& outdir) {
  std::filesystem::create_directories(outdir);
  {
    auto out = open_out(outdir / "age_genre_profile.csv");
    write_age_genre_csv(out, profiles);
  }
  {
    auto out = open_out(outdir / "dynamics_by_age.csv");
    write_dynamics_csv(out, curves);
  }
  {
    auto out = open_out(outdir / "lt_sh_over_time.csv");
    write_lt_sh_csv(out, overall);
  }
}

namespace {

void write_lists_csv(std::ostream& out, const Dataset& ds,
                     std::span<const RecommendationList> lists) {
  out << "user_id,rank,item_id\n";
  for (const auto& l : lists) {
    for (std::size_t r = 0; r < l.items.size(); ++r) {
      out << ds.user(l.user).id << ',' << r + 1 << ',' << ds.item(l.items[r]).id << '\n';
    }
  }
}

// Writes into a staging directory and moves the files into `outdir` only
// once every write succeeded.
void publish(const std::filesystem::path& outdir,
             const std::function<void(const std::filesystem::path&)>& write) {
  namespace fs = std::filesystem;
  fs::create_directories(outdir);
  const fs::path staging = outdir / (".staging-" + std::to_string(::getpid()));
  fs::remove_all(staging);
  fs::create_directories(staging);
  try {
    write(staging);
    for (const auto& entry : fs::directory_iterator(staging)) {
      const fs::path target = outdir / entry.path().filename();
      fs::remove_all(target);
      fs::rename(entry.path(), target);
    }
    fs::remove_all(staging);
  } catch (...) {
    std::error_code ec;
    fs::remove_all(staging, ec);
    throw;
  }
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
  return run_experiment(Experiment::load(config));
}

ExperimentResult run_experiment(const Experiment& experiment) {
  const ExperimentConfig& config = experiment.config();
  ExperimentResult result;
  ServingHistory fresh(experiment.dataset().num_items());
  for (Method m : config.methods) {
    auto lists = experiment.recommend(m, fresh);
    result.reports.push_back(experiment.evaluate(m, lists));
    result.lists.emplace(m, std::move(lists));
  }

  nlohmann::json& s = result.summary;
  s["version"] = version();
  s["config"] = config.to_json();
  s["dataset"] = {{"users", experiment.dataset().num_users()},
                  {"items", experiment.dataset().num_items()},
                  {"ratings", experiment.dataset().ratings().size()},
                  {"train_ratings", experiment.split().train.size()},
                  {"test_ratings", experiment.split().test.size()},
                  {"short_head_items", experiment.partition().head_size()}};
  s["eligibility"] = {
      {"rule", config.candidates == CandidateUniverse::kTestItems
                   ? "train >= min_train_ratings and test >= k"
                   : "train >= min_train_ratings and test >= 1"},
      {"eligible_users", experiment.eligible_before_subsample()},
      {"evaluated_users", experiment.eligible_users().size()}};
  auto& reports = s["reports"] = nlohmann::json::array();
  for (const auto& r : result.reports) reports.push_back(to_json(r));

  if (!config.output_dir.empty()) {
    publish(config.output_dir, [&](const std::filesystem::path& dir) {
      {
        auto out = open_out(dir / "summary.csv");
        write_summary_csv(out, result.reports);
      }
      {
        auto out = open_out(dir / "report.json");
        out << s.dump(2) << '\n';
      }
      for (const auto& r : result.reports) {
        auto out = open_out(dir / ("per_user_" + r.method + ".csv"));
        write_per_user_csv(out, r);
      }
      for (const auto& [m, lists] : result.lists) {
        auto out = open_out(dir / ("recommendations_" + std::string(method_name(m)) + ".csv"));
        write_lists_csv(out, experiment.dataset(), lists);
      }
      emit_figure_data(experiment.profiles(), experiment.curves(), experiment.overall_curve(), dir);
      if (const auto* clf = experiment.classifier()) {
        auto out = open_out(dir / "age_classifier.csv");
        clf->write_csv(out);
      }
    });
  }
  return result;
}

std::vector<RoundReport> multi_round_serve(const Experiment& experiment, std::size_t rounds,
                                           ServingHistory* history_out) {
  if (rounds == 0) throw InvalidArgument("rounds must be >= 1");
  ServingHistory history(experiment.dataset().num_items());
  std::vector<RoundReport> out;
  for (std::size_t r = 1; r <= rounds; ++r) {
    RoundReport rr;
    rr.round = r;
    rr.lists = experiment.recommend(Method::kProposed, history);
    rr.report = experiment.evaluate(Method::kProposed, rr.lists);
    for (const auto& l : rr.lists) record_served(history, l.items);
    out.push_back(std::move(rr));
  }
  if (history_out != nullptr) *history_out = std::move(history);
  return out;
}

}  // namespace ltrec
