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

#include "ltrec/cf.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "csv_util.hpp"

namespace ltrec {
namespace {

double clamp_rating(double r) { return std::clamp(r, 1.0, 5.0); }

// Correlations this close to zero are rounding noise from non-representable
// means; left in place they would carry full weight after normalization.
constexpr double kZeroSimilarity = 1e-12;

double correlation(double num, double su, double sv, std::size_t overlap,
                   std::size_t min_overlap) {
  if (overlap < min_overlap || overlap == 0 || su <= 0.0 || sv <= 0.0) return 0.0;
  const double r = num / (std::sqrt(su) * std::sqrt(sv));
  if (std::abs(r) < kZeroSimilarity) return 0.0;
  return std::clamp(r, -1.0, 1.0);
}

}  // namespace

double user_mean(const RatingMatrix& train, UserIndex u) { return train.user_mean(u); }

double user_similarity(const RatingMatrix& train, UserIndex u, UserIndex v,
                       std::size_t min_overlap) {
  if (u == v) return 0.0;
  auto ru = train.user_row(u);
  auto rv = train.user_row(v);
  if (ru.empty() || rv.empty()) return 0.0;
  const double mu = train.user_mean(u);
  const double mv = train.user_mean(v);
  double num = 0.0, su = 0.0, sv = 0.0;
  std::size_t overlap = 0;
  auto a = ru.begin();
  auto b = rv.begin();
  while (a != ru.end() && b != rv.end()) {
    if (a->index < b->index) {
      ++a;
    } else if (b->index < a->index) {
      ++b;
    } else {
      const double du = a->value - mu;
      const double dv = b->value - mv;
      num += du * dv;
      su += du * du;
      sv += dv * dv;
      ++overlap;
      ++a;
      ++b;
    }
  }
  return correlation(num, su, sv, overlap, min_overlap);
}

UserKnn::UserKnn(const RatingMatrix& train, CfConfig config)
    : train_(&train), config_(config) {}

std::vector<double> UserKnn::similarities(UserIndex u) const {
  const RatingMatrix& m = *train_;
  const std::size_t n = m.num_users();
  std::vector<double> sims(n, 0.0);
  auto row = m.user_row(u);
  if (row.empty()) return sims;
  std::vector<double> num(n, 0.0), su(n, 0.0), sv(n, 0.0);
  std::vector<std::uint32_t> overlap(n, 0);
  std::vector<UserIndex> touched;
  const double mu = m.user_mean(u);
  for (const auto& e : row) {
    const double du = e.value - mu;
    for (const auto& rater : m.item_column(e.index)) {
      const UserIndex v = rater.index;
      if (v == u) continue;
      if (overlap[v] == 0) touched.push_back(v);
      const double dv = rater.value - m.user_mean(v);
      num[v] += du * dv;
      su[v] += du * du;
      sv[v] += dv * dv;
      ++overlap[v];
    }
  }
  for (UserIndex v : touched) {
    sims[v] = correlation(num[v], su[v], sv[v], overlap[v], config_.min_overlap);
  }
  return sims;
}

std::vector<SimilarityRecord> UserKnn::neighbors(UserIndex u, std::size_t top) const {
  auto sims = similarities(u);
  std::vector<SimilarityRecord> out;
  for (UserIndex v = 0; v < sims.size(); ++v) {
    if (v != u && sims[v] != 0.0) out.push_back({v, sims[v]});
  }
  auto cmp = [](const SimilarityRecord& a, const SimilarityRecord& b) {
    return a.similarity != b.similarity ? a.similarity > b.similarity : a.other < b.other;
  };
  top = std::min(top, out.size());
  std::partial_sort(out.begin(), out.begin() + top, out.end(), cmp);
  out.resize(top);
  return out;
}

double UserKnn::predict(UserIndex u, ItemIndex j) const {
  return predict(u, j, similarities(u));
}

double UserKnn::predict(UserIndex u, ItemIndex j, std::span<const double> sims) const {
  const RatingMatrix& m = *train_;
  const double mu = m.user_mean(u);
  struct Candidate {
    double sim;
    UserIndex v;
    std::uint8_t value;
  };
  std::vector<Candidate> raters;
  for (const auto& e : m.item_column(j)) {
    if (e.index != u) raters.push_back({sims[e.index], e.index, e.value});
  }
  const std::size_t k = std::min(config_.k_neighbors, raters.size());
  std::partial_sort(raters.begin(), raters.begin() + k, raters.end(),
                    [](const Candidate& a, const Candidate& b) {
                      return a.sim != b.sim ? a.sim > b.sim : a.v < b.v;
                    });
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    num += raters[i].sim * (raters[i].value - m.user_mean(raters[i].v));
    den += std::abs(raters[i].sim);
  }
  if (den == 0.0) return clamp_rating(mu);
  return clamp_rating(mu + num / den);
}

std::vector<double> UserKnn::predict_all(UserIndex u) const {
  train_->user_mean(u);
  auto sims = similarities(u);
  std::vector<double> out(train_->num_items());
  for (ItemIndex j = 0; j < out.size(); ++j) out[j] = predict(u, j, sims);
  return out;
}

ItemKnn::ItemKnn(const RatingMatrix& train, CfConfig config)
    : train_(&train), config_(config), n_items_(train.num_items()),
      sims_(n_items_ * n_items_, 0.0) {
  const RatingMatrix& m = train;
  std::vector<double> num(n_items_), sa(n_items_), sb(n_items_);
  std::vector<std::uint32_t> overlap(n_items_);
  std::vector<ItemIndex> touched;
  for (ItemIndex a = 0; a < n_items_; ++a) {
    touched.clear();
    for (const auto& rater : m.item_column(a)) {
      const UserIndex w = rater.index;
      const double mw = m.user_mean(w);
      const double da = rater.value - mw;
      for (const auto& e : m.user_row(w)) {
        const ItemIndex b = e.index;
        if (b == a) continue;
        if (overlap[b] == 0) touched.push_back(b);
        const double db = e.value - mw;
        num[b] += da * db;
        sa[b] += da * da;
        sb[b] += db * db;
        ++overlap[b];
      }
    }
    double* row = sims_.data() + static_cast<std::size_t>(a) * n_items_;
    for (ItemIndex b : touched) {
      row[b] = correlation(num[b], sa[b], sb[b], overlap[b], config_.min_overlap);
      num[b] = sa[b] = sb[b] = 0.0;
      overlap[b] = 0;
    }
  }
}

double ItemKnn::predict(UserIndex u, ItemIndex j) const {
  const RatingMatrix& m = *train_;
  const double mu = m.user_mean(u);
  struct Candidate {
    double sim;
    ItemIndex item;
    std::uint8_t value;
  };
  std::vector<Candidate> rated;
  for (const auto& e : m.user_row(u)) {
    if (e.index == j) continue;
    const double s = similarity(j, e.index);
    if (s > 0.0) rated.push_back({s, e.index, e.value});
  }
  if (rated.empty()) return clamp_rating(mu);
  const std::size_t k = std::min(config_.k_neighbors, rated.size());
  std::partial_sort(rated.begin(), rated.begin() + k, rated.end(),
                    [](const Candidate& a, const Candidate& b) {
                      return a.sim != b.sim ? a.sim > b.sim : a.item < b.item;
                    });
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    num += rated[i].sim * rated[i].value;
    den += rated[i].sim;
  }
  return clamp_rating(num / den);
}

std::vector<double> ItemKnn::predict_all(UserIndex u) const {
  train_->user_mean(u);
  std::vector<double> out(n_items_);
  for (ItemIndex j = 0; j < n_items_; ++j) out[j] = predict(u, j);
  return out;
}

std::vector<ItemIndex> rank_candidates(std::span<const ItemIndex> candidates,
                                       std::span<const double> scores,
                                       const PopularityPartition& popularity,
                                       std::size_t n) {
  std::vector<ItemIndex> ranked(candidates.begin(), candidates.end());
  n = std::min(n, ranked.size());
  std::partial_sort(ranked.begin(), ranked.begin() + n, ranked.end(),
                    [&](ItemIndex a, ItemIndex b) {
                      if (scores[a] != scores[b]) return scores[a] > scores[b];
                      if (popularity.popularity(a) != popularity.popularity(b)) {
                        return popularity.popularity(a) > popularity.popularity(b);
                      }
                      return a < b;
                    });
  ranked.resize(n);
  return ranked;
}

std::vector<ItemIndex> unrated_items(const RatingMatrix& train, UserIndex u) {
  std::vector<ItemIndex> out;
  auto row = train.user_row(u);
  auto it = row.begin();
  for (ItemIndex i = 0; i < train.num_items(); ++i) {
    while (it != row.end() && it->index < i) ++it;
    if (it != row.end() && it->index == i) continue;
    out.push_back(i);
  }
  return out;
}

std::vector<ItemIndex> top_n_user_based(const UserKnn& knn,
                                        const PopularityPartition& popularity,
                                        UserIndex u, std::size_t n) {
  auto scores = knn.predict_all(u);
  auto candidates = unrated_items(knn.train(), u);
  return rank_candidates(candidates, scores, popularity, n);
}

std::vector<ItemIndex> top_n_item_based(const ItemKnn& knn,
                                        const RatingMatrix& train,
                                        const PopularityPartition& popularity,
                                        UserIndex u, std::size_t n) {
  auto scores = knn.predict_all(u);
  auto candidates = unrated_items(train, u);
  return rank_candidates(candidates, scores, popularity, n);
}

void write_neighbor_csv(std::ostream& out, const Dataset& dataset,
                        const UserKnn& knn, std::span<const UserIndex> users,
                        std::size_t top) {
  out << "user_id,neighbor_id,similarity\n";
  for (UserIndex u : users) {
    for (const auto& rec : knn.neighbors(u, top)) {
      out << dataset.user(u).id << ',' << dataset.user(rec.other).id << ','
          << csv::format_double(rec.similarity) << '\n';
    }
  }
}

std::vector<NeighborRow> read_neighbor_csv(std::istream& in) {
  std::vector<NeighborRow> rows;
  csv::for_each_row(in, 3, [&](const auto& f, std::size_t n) {
    rows.push_back({csv::to_int(f[0], n), csv::to_int(f[1], n), csv::to_double(f[2], n)});
  });
  return rows;
}

}  // namespace ltrec
