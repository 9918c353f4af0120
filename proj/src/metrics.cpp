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

#include "ltrec/metrics.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <unordered_set>

#include "csv_util.hpp"

namespace ltrec {
namespace {

bool relevant(const RatingMatrix& test, std::span<const double> means, UserIndex u,
              ItemIndex i) {
  auto r = test.rating(u, i);
  return r.has_value() && static_cast<double>(*r) > means[u];
}

}  // namespace

std::vector<double> user_means(const RatingMatrix& train) {
  std::vector<double> out(train.num_users(), std::numeric_limits<double>::quiet_NaN());
  for (UserIndex u = 0; u < out.size(); ++u) {
    if (train.user_count(u) > 0) out[u] = train.user_mean(u);
  }
  return out;
}

double precision(std::span<const RecommendationList> lists, const RatingMatrix& test,
                 std::span<const double> train_user_means) {
  std::size_t recommended = 0, hits = 0;
  for (const auto& list : lists) {
    recommended += list.items.size();
    for (ItemIndex i : list.items) {
      if (relevant(test, train_user_means, list.user, i)) ++hits;
    }
  }
  if (recommended == 0) throw InvalidArgument("precision of an empty recommendation set");
  return static_cast<double>(hits) / static_cast<double>(recommended);
}

double novelty(std::span<const RecommendationList> lists,
               const PopularityPartition& partition) {
  double total = 0.0;
  for (const auto& list : lists) {
    for (ItemIndex i : list.items) total += static_cast<double>(partition.popularity(i));
  }
  if (total == 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 / total;
}

std::size_t aggregate_diversity(std::span<const RecommendationList> lists) {
  std::unordered_set<ItemIndex> items;
  for (const auto& list : lists) items.insert(list.items.begin(), list.items.end());
  return items.size();
}

EvalReport evaluate_lists(std::string method, std::span<const RecommendationList> lists,
                          const Dataset& dataset, const RatingMatrix& test,
                          std::span<const double> train_user_means,
                          const PopularityPartition& partition) {
  EvalReport report;
  report.method = std::move(method);
  report.precision = precision(lists, test, train_user_means);
  report.novelty = novelty(lists, partition);
  report.novelty_infinite = std::isinf(report.novelty);
  report.aggregate_diversity = aggregate_diversity(lists);
  report.num_users = lists.size();
  std::size_t total = 0, long_tail = 0;
  for (const auto& list : lists) {
    UserBreakdown b;
    b.user = dataset.user(list.user).id;
    b.recommended = list.items.size();
    for (ItemIndex i : list.items) {
      if (relevant(test, train_user_means, list.user, i)) ++b.relevant;
      if (partition.is_long_tail(i)) ++b.long_tail;
      b.popularity_sum += partition.popularity(i);
    }
    total += b.recommended;
    long_tail += b.long_tail;
    report.per_user.push_back(b);
  }
  report.long_tail_share =
      total == 0 ? 0.0 : static_cast<double>(long_tail) / static_cast<double>(total);
  return report;
}

nlohmann::json to_json(const EvalReport& report, bool include_per_user) {
  nlohmann::json j;
  j["method"] = report.method;
  j["precision"] = report.precision;
  // JSON has no infinity; the flag carries it.
  j["novelty"] = report.novelty_infinite ? nlohmann::json(nullptr) : nlohmann::json(report.novelty);
  j["novelty_infinite"] = report.novelty_infinite;
  j["aggregate_diversity"] = report.aggregate_diversity;
  j["num_users"] = report.num_users;
  j["long_tail_share"] = report.long_tail_share;
  if (!report.config.is_null()) j["config"] = report.config;
  if (include_per_user) {
    auto& rows = j["per_user"] = nlohmann::json::array();
    for (const auto& b : report.per_user) {
      rows.push_back({{"user_id", b.user},
                      {"recommended", b.recommended},
                      {"relevant", b.relevant},
                      {"long_tail", b.long_tail},
                      {"popularity_sum", b.popularity_sum}});
    }
  }
  return j;
}

void write_summary_csv(std::ostream& out, std::span<const EvalReport> reports) {
  out << "method,metric,value\n";
  for (const auto& r : reports) {
    out << r.method << ",precision," << csv::format_double(r.precision) << '\n';
    out << r.method << ",novelty,"
        << (r.novelty_infinite ? std::string("inf") : csv::format_double(r.novelty)) << '\n';
    out << r.method << ",aggregate_diversity," << r.aggregate_diversity << '\n';
    out << r.method << ",long_tail_share," << csv::format_double(r.long_tail_share) << '\n';
    out << r.method << ",users," << r.num_users << '\n';
  }
}

void write_per_user_csv(std::ostream& out, const EvalReport& report) {
  out << "method,user_id,recommended,relevant,long_tail,popularity_sum\n";
  for (const auto& b : report.per_user) {
    out << report.method << ',' << b.user << ',' << b.recommended << ',' << b.relevant << ','
        << b.long_tail << ',' << b.popularity_sum << '\n';
  }
}

}  // namespace ltrec
