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

// Command-line front end: ingest, profile, recommend, evaluate, compare,
// serve-rounds. Errors go to stderr as one JSON object per failure.

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "ltrec/harness.hpp"

namespace {

using ltrec::ExperimentConfig;
using nlohmann::json;

// Every flag is optional so that only what the user typed overrides the
// --config file (or the built-in defaults).
struct Overrides {
  std::optional<std::string> config_file;
  std::optional<std::string> data_dir;
  std::optional<std::string> ratings, users, movies;
  std::optional<std::size_t> k, min_train, bins, neighbors, min_overlap, top_pool;
  std::optional<double> head_fraction, split_fraction;
  std::vector<double> weights;
  std::optional<std::size_t> population, generations, tournament, elitism, local_search;
  std::optional<double> crossover_rate, mutation_rate;
  std::optional<std::string> normalization, selection;
  std::optional<double> decay;
  std::optional<std::size_t> injection_pool, attempts;
  std::optional<std::string> age_source, candidates;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> max_users, threads;
  std::vector<std::string> methods;
  std::optional<std::string> out;

  void attach(CLI::App& app) {
    app.add_option("--config", config_file, "JSON config; flags override it");
    app.add_option("--data", data_dir, "directory with ratings.dat, users.dat, movies.dat");
    app.add_option("--ratings", ratings);
    app.add_option("--users", users);
    app.add_option("--movies", movies);
    app.add_option("--k", k, "list length");
    app.add_option("--head-fraction", head_fraction, "share of items in the short head");
    app.add_option("--split-fraction", split_fraction, "per-user test share");
    app.add_option("--min-train", min_train, "minimum train ratings for a warm user");
    app.add_option("--bins", bins, "activity bins per dynamics curve");
    app.add_option("--neighbors", neighbors, "user-CF neighborhood size");
    app.add_option("--min-overlap", min_overlap, "co-ratings needed for a similarity");
    app.add_option("--top-pool", top_pool, "top-predicted candidates per user");
    app.add_option("--weights", weights, "four objective weights")->expected(4);
    app.add_option("--population", population);
    app.add_option("--generations", generations);
    app.add_option("--crossover-rate", crossover_rate);
    app.add_option("--mutation-rate", mutation_rate);
    app.add_option("--tournament", tournament);
    app.add_option("--elitism", elitism);
    app.add_option("--local-search-trials", local_search);
    app.add_option("--normalization", normalization)
        ->check(CLI::IsMember({"initial", "current"}));
    app.add_option("--selection", selection)->check(CLI::IsMember({"weighted", "nondominated"}));
    app.add_option("--decay", decay, "injection decay a");
    app.add_option("--injection-pool", injection_pool, "injected items per user");
    app.add_option("--injection-attempts", attempts, "draw attempts per injected slot");
    app.add_option("--age-source", age_source)->check(CLI::IsMember({"predicted", "label"}));
    app.add_option("--candidates", candidates)->check(CLI::IsMember({"catalog", "test"}));
    app.add_option("--seed", seed);
    app.add_option("--max-users", max_users, "seeded user subsample, 0 = all");
    app.add_option("--threads", threads);
    app.add_option("--methods", methods, "proposed, user-cf, item-cf, plain-genetic")
        ->delimiter(',');
    app.add_option("--out", out, "output directory");
  }

  ExperimentConfig resolve() const {
    json j = json::object();
    if (config_file) {
      std::ifstream in(*config_file);
      if (!in) throw ltrec::Error("cannot read config " + *config_file);
      j = json::parse(in);
    }
    auto set = [&](const char* key, const auto& v) {
      if (v) j[key] = *v;
    };
    auto mset = [&](const char* key, const auto& v) {
      if (v) j["memetic"][key] = *v;
    };
    auto iset = [&](const char* key, const auto& v) {
      if (v) j["injection"][key] = *v;
    };
    if (data_dir) {
      const std::filesystem::path d(*data_dir);
      j["ratings_path"] = (d / "ratings.dat").string();
      j["users_path"] = (d / "users.dat").string();
      j["movies_path"] = (d / "movies.dat").string();
    }
    set("ratings_path", ratings);
    set("users_path", users);
    set("movies_path", movies);
    set("k", k);
    set("head_item_fraction", head_fraction);
    set("split_fraction", split_fraction);
    set("min_train_ratings", min_train);
    set("dynamics_bins", bins);
    set("k_neighbors", neighbors);
    set("min_overlap", min_overlap);
    set("top_pool_size", top_pool);
    if (!weights.empty()) j["weights"] = weights;
    mset("population_size", population);
    mset("generations", generations);
    mset("crossover_rate", crossover_rate);
    mset("mutation_rate", mutation_rate);
    mset("tournament_size", tournament);
    mset("elitism_count", elitism);
    mset("local_search_trials", local_search);
    mset("normalization", normalization);
    mset("selection", selection);
    iset("decay", decay);
    iset("pool_size", injection_pool);
    iset("attempts_per_slot", attempts);
    set("age_source", age_source);
    set("candidates", candidates);
    set("seed", seed);
    set("max_users", max_users);
    set("threads", threads);
    if (!methods.empty()) j["methods"] = methods;
    set("output_dir", out);
    ExperimentConfig c = ExperimentConfig::from_json(j);
    if (c.paths.ratings.empty()) c.paths = ltrec::MovieLensPaths::in_directory("data/ml-1m");
    c.validate();
    return c;
  }
};

json dataset_stats(const ltrec::Experiment& e) {
  std::array<std::size_t, ltrec::kNumAgeGroups> per_group{};
  for (const auto& u : e.dataset().users()) ++per_group[ltrec::age_slot(u.age)];
  json groups = json::object();
  for (std::size_t g = 0; g < per_group.size(); ++g) {
    groups[std::to_string(ltrec::age_value(ltrec::kAgeGroups[g]))] = per_group[g];
  }
  return {{"users", e.dataset().num_users()},
          {"items", e.dataset().num_items()},
          {"ratings", e.dataset().ratings().size()},
          {"train_ratings", e.split().train.size()},
          {"test_ratings", e.split().test.size()},
          {"short_head_items", e.partition().head_size()},
          {"users_per_age_group", groups},
          {"eligible_users", e.eligible_before_subsample()},
          {"evaluated_users", e.eligible_users().size()}};
}

void write_json(const std::filesystem::path& path, const json& j) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw ltrec::Error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

json report_row(const ltrec::EvalReport& r) { return ltrec::to_json(r); }

int cmd_ingest(const ExperimentConfig& c) {
  auto e = ltrec::Experiment::load(c);
  json j = dataset_stats(e);
  j["version"] = ltrec::version();
  j["config"] = c.to_json();
  if (!c.output_dir.empty()) write_json(c.output_dir / "ingest.json", j);
  std::cout << j.dump(2) << '\n';
  return 0;
}

int cmd_profile(const ExperimentConfig& c) {
  auto e = ltrec::Experiment::load(c);
  auto acc = e.age_accuracy(0.2);
  json j;
  j["version"] = ltrec::version();
  j["config"] = c.to_json();
  j["age_accuracy"] = {{"accuracy", acc.accuracy},
                       {"majority_rate", acc.majority_rate},
                       {"train_users", acc.train_users},
                       {"test_users", acc.test_users}};
  if (!c.output_dir.empty()) {
    ltrec::emit_figure_data(e.profiles(), e.curves(), e.overall_curve(), c.output_dir);
    if (const auto* clf = e.classifier()) {
      std::ofstream out(c.output_dir / "age_classifier.csv");
      clf->write_csv(out);
    }
    write_json(c.output_dir / "profile.json", j);
  }
  std::cout << j.dump(2) << '\n';
  return 0;
}

int cmd_recommend(const ExperimentConfig& c, ltrec::UserId user_id, const std::string& method) {
  auto m = ltrec::parse_method(method);
  if (!m) throw ltrec::InvalidArgument("unknown method '" + method + "'");
  auto e = ltrec::Experiment::load(c);
  auto u = e.dataset().user_index(user_id);
  if (!u) throw ltrec::InvalidArgument("unknown user id " + std::to_string(user_id));
  ltrec::ServingHistory history(e.dataset().num_items());
  auto items = e.recommend_user(*m, *u, history);
  json j;
  j["user_id"] = user_id;
  j["method"] = method;
  auto& rows = j["items"] = json::array();
  for (auto i : items) {
    const auto& item = e.dataset().item(i);
    rows.push_back({{"item_id", item.id},
                    {"title", item.title},
                    {"popularity", e.partition().popularity(i)},
                    {"long_tail", e.partition().is_long_tail(i)}});
  }
  std::cout << j.dump(2) << '\n';
  return 0;
}

int cmd_evaluate(const ExperimentConfig& c) {
  auto result = ltrec::run_experiment(c);
  std::cout << result.summary.dump(2) << '\n';
  return 0;
}

int cmd_compare(ExperimentConfig c) {
  c.methods.assign(ltrec::kAllMethods.begin(), ltrec::kAllMethods.end());
  auto result = ltrec::run_experiment(c);
  std::printf("%-14s %10s %14s %10s %10s\n", "method", "precision", "novelty", "aggr_div",
              "lt_share");
  for (const auto& r : result.reports) {
    std::printf("%-14s %10.4f %14.6g %10zu %10.4f\n", r.method.c_str(), r.precision,
                r.novelty_infinite ? INFINITY : r.novelty, r.aggregate_diversity,
                r.long_tail_share);
  }
  return 0;
}

int cmd_serve_rounds(const ExperimentConfig& c, std::size_t rounds) {
  auto e = ltrec::Experiment::load(c);
  ltrec::ServingHistory history(e.dataset().num_items());
  auto reports = ltrec::multi_round_serve(e, rounds, &history);
  json j;
  j["version"] = ltrec::version();
  j["config"] = c.to_json();
  auto& rows = j["rounds"] = json::array();
  for (const auto& r : reports) {
    json row = report_row(r.report);
    row.erase("config");
    row["round"] = r.round;
    rows.push_back(row);
  }
  if (!c.output_dir.empty()) {
    std::filesystem::create_directories(c.output_dir);
    write_json(c.output_dir / "rounds.json", j);
    std::ofstream csv(c.output_dir / "rounds.csv");
    csv << "round,precision,novelty,aggregate_diversity,long_tail_share\n";
    for (const auto& r : reports) {
      csv << r.round << ',' << r.report.precision << ','
          << (r.report.novelty_infinite ? std::string("inf") : std::to_string(r.report.novelty))
          << ',' << r.report.aggregate_diversity << ',' << r.report.long_tail_share << '\n';
    }
    std::ofstream hist(c.output_dir / "serving_history.csv");
    history.write_csv(hist, e.dataset());
  }
  std::cout << j.dump(2) << '\n';
  return 0;
}

void print_error(std::string_view kind, const std::string& message, const json& extra = {}) {
  json j = {{"error", kind}, {"message", message}};
  if (extra.is_object()) j.update(extra);
  std::cerr << j.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ltrec: long-tail aware recommendation lists"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(ltrec::version()));

  Overrides ov;
  auto* ingest = app.add_subcommand("ingest", "parse and split the dataset, print statistics");
  auto* profile = app.add_subcommand("profile", "age-genre profiles, dynamics curves, age model");
  auto* recommend = app.add_subcommand("recommend", "one user's list");
  auto* evaluate = app.add_subcommand("evaluate", "run the selected methods and write reports");
  auto* compare = app.add_subcommand("compare", "all methods side by side");
  auto* serve = app.add_subcommand("serve-rounds", "repeated serving with history updates");
  for (auto* sub : {ingest, profile, recommend, evaluate, compare, serve}) ov.attach(*sub);

  ltrec::UserId user_id = 0;
  std::string method = "proposed";
  recommend->add_option("--user", user_id, "external user id")->required();
  recommend->add_option("--method", method);
  std::size_t rounds = 5;
  serve->add_option("--rounds", rounds, "number of serving rounds");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error("usage", e.what());
    return 2;
  }

  try {
    const ExperimentConfig c = ov.resolve();
    if (*ingest) return cmd_ingest(c);
    if (*profile) return cmd_profile(c);
    if (*recommend) return cmd_recommend(c, user_id, method);
    if (*evaluate) return cmd_evaluate(c);
    if (*compare) return cmd_compare(c);
    if (*serve) return cmd_serve_rounds(c, rounds);
  } catch (const ltrec::ParseError& e) {
    print_error(e.kind(), e.what(), {{"file", e.file()}, {"line", e.line()}});
  } catch (const ltrec::Error& e) {
    print_error(e.kind(), e.what());
  } catch (const json::exception& e) {
    print_error("config", e.what());
  } catch (const std::exception& e) {
    print_error("internal", e.what());
  }
  return 1;
}
