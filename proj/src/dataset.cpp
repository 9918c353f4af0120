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

#include "ltrec/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <unordered_set>

namespace ltrec {
namespace {

std::uint64_t pair_key(std::uint64_t a, std::uint64_t b) {
  return (a << 32) ^ b;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find("::", start);
    if (pos == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 2;
  }
}

template <typename T>
std::optional<T> parse_int(std::string_view text) {
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    return std::nullopt;
  }
  return value;
}

// Calls `fn(line, line_number)` for every non-empty line.
template <typename Fn>
void for_each_line(const std::filesystem::path& path, Fn&& fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string(), 0, "cannot open file");
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    fn(std::string_view(line), number);
  }
}

}  // namespace

Dataset Dataset::build(std::vector<User> users, std::vector<Item> items,
                       std::span<const RatingRecord> ratings) {
  Dataset ds;
  std::sort(users.begin(), users.end(),
            [](const User& a, const User& b) { return a.id < b.id; });
  std::sort(items.begin(), items.end(),
            [](const Item& a, const Item& b) { return a.id < b.id; });

  for (std::size_t u = 0; u < users.size(); ++u) {
    if (u > 0 && users[u].id == users[u - 1].id) {
      throw InvalidArgument("duplicate user id " + std::to_string(users[u].id));
    }
    age_slot(users[u].age);
    ds.user_lookup_.emplace(users[u].id, static_cast<UserIndex>(u));
  }
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0 && items[i].id == items[i - 1].id) {
      throw InvalidArgument("duplicate item id " + std::to_string(items[i].id));
    }
    if (items[i].genres == 0 || (items[i].genres >> kNumGenres) != 0) {
      throw InvalidArgument("item " + std::to_string(items[i].id) +
                            " has an invalid genre set");
    }
    ds.item_lookup_.emplace(items[i].id, static_cast<ItemIndex>(i));
  }
  ds.users_ = std::move(users);
  ds.items_ = std::move(items);

  std::unordered_set<std::uint64_t> seen;
  seen.reserve(ratings.size());
  ds.ratings_.reserve(ratings.size());
  for (const RatingRecord& r : ratings) {
    auto u = ds.user_index(r.user);
    auto i = ds.item_index(r.item);
    if (!u) throw InvalidArgument("rating references unknown user " + std::to_string(r.user));
    if (!i) throw InvalidArgument("rating references unknown item " + std::to_string(r.item));
    if (r.value < 1 || r.value > 5) {
      throw InvalidArgument("rating value out of range: " + std::to_string(r.value));
    }
    if (!seen.insert(pair_key(*u, *i)).second) {
      throw InvalidArgument("duplicate rating for user " + std::to_string(r.user) +
                            ", item " + std::to_string(r.item));
    }
    ds.ratings_.push_back(
        Rating{*u, *i, static_cast<std::uint8_t>(r.value), r.timestamp});
  }
  std::sort(ds.ratings_.begin(), ds.ratings_.end(),
            [](const Rating& a, const Rating& b) {
              return std::tie(a.user, a.timestamp, a.item) <
                     std::tie(b.user, b.timestamp, b.item);
            });
  return ds;
}

std::optional<UserIndex> Dataset::user_index(UserId id) const {
  auto it = user_lookup_.find(id);
  if (it == user_lookup_.end()) return std::nullopt;
  return it->second;
}

std::optional<ItemIndex> Dataset::item_index(ItemId id) const {
  auto it = item_lookup_.find(id);
  if (it == item_lookup_.end()) return std::nullopt;
  return it->second;
}

bool operator==(const Dataset& a, const Dataset& b) {
  return a.users_ == b.users_ && a.items_ == b.items_ && a.ratings_ == b.ratings_;
}

MovieLensPaths MovieLensPaths::in_directory(const std::filesystem::path& dir) {
  return {dir / "ratings.dat", dir / "users.dat", dir / "movies.dat"};
}

Dataset parse_movielens(const MovieLensPaths& paths) {
  std::vector<User> users;
  std::unordered_set<UserId> user_ids;
  const std::string users_name = paths.users.string();
  for_each_line(paths.users, [&](std::string_view line, std::size_t n) {
    auto f = split_fields(line);
    if (f.size() != 5) throw ParseError(users_name, n, "expected 5 fields");
    auto id = parse_int<UserId>(f[0]);
    auto age = parse_int<int>(f[2]);
    if (!id || *id <= 0) throw ParseError(users_name, n, "bad user id");
    if (!age) throw ParseError(users_name, n, "bad age");
    auto group = age_group_from_value(*age);
    if (!group) throw ParseError(users_name, n, "age not in {1,18,25,35,45,50,56}");
    if (!user_ids.insert(*id).second) throw ParseError(users_name, n, "duplicate user id");
    User user{*id, *group, std::nullopt};
    if (f[1].size() == 1) user.gender = f[1][0];
    users.push_back(std::move(user));
  });

  std::vector<Item> items;
  std::unordered_set<ItemId> item_ids;
  const std::string movies_name = paths.movies.string();
  for_each_line(paths.movies, [&](std::string_view line, std::size_t n) {
    auto first = line.find("::");
    auto last = line.rfind("::");
    if (first == std::string_view::npos || last == first) {
      throw ParseError(movies_name, n, "expected 3 fields");
    }
    auto id = parse_int<ItemId>(line.substr(0, first));
    if (!id || *id <= 0) throw ParseError(movies_name, n, "bad movie id");
    if (!item_ids.insert(*id).second) throw ParseError(movies_name, n, "duplicate movie id");
    Item item{*id, std::string(line.substr(first + 2, last - first - 2)), 0};
    std::string_view genres = line.substr(last + 2);
    std::size_t start = 0;
    while (start <= genres.size()) {
      std::size_t bar = genres.find('|', start);
      if (bar == std::string_view::npos) bar = genres.size();
      std::string_view token = genres.substr(start, bar - start);
      auto g = genre_index(token);
      if (!g) throw ParseError(movies_name, n, "unknown genre '" + std::string(token) + "'");
      item.genres |= GenreMask{1} << *g;
      start = bar + 1;
    }
    items.push_back(std::move(item));
  });

  std::vector<RatingRecord> ratings;
  std::unordered_set<std::uint64_t> pairs;
  const std::string ratings_name = paths.ratings.string();
  for_each_line(paths.ratings, [&](std::string_view line, std::size_t n) {
    auto f = split_fields(line);
    if (f.size() != 4) throw ParseError(ratings_name, n, "expected 4 fields");
    auto user = parse_int<UserId>(f[0]);
    auto item = parse_int<ItemId>(f[1]);
    auto value = parse_int<int>(f[2]);
    auto ts = parse_int<std::int64_t>(f[3]);
    if (!user || !item || !value || !ts) throw ParseError(ratings_name, n, "bad numeric field");
    if (*value < 1 || *value > 5) throw ParseError(ratings_name, n, "rating outside 1..5");
    if (!user_ids.contains(*user)) throw ParseError(ratings_name, n, "unknown user id");
    if (!item_ids.contains(*item)) throw ParseError(ratings_name, n, "unknown movie id");
    if (!pairs.insert(pair_key(static_cast<std::uint64_t>(*user),
                               static_cast<std::uint64_t>(*item)))
             .second) {
      throw ParseError(ratings_name, n, "duplicate (user, movie) rating");
    }
    ratings.push_back(RatingRecord{*user, *item, *value, *ts});
  });

  return Dataset::build(std::move(users), std::move(items), ratings);
}

std::size_t ceil_fraction(double fraction, std::size_t n) {
  return static_cast<std::size_t>(
      std::ceil(fraction * static_cast<double>(n) - 1e-9));
}

SplitDataset temporal_split(const Dataset& dataset, double fraction,
                            std::size_t min_train_ratings) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw InvalidArgument("split fraction must lie in (0, 1)");
  }
  SplitDataset split;
  split.split_fraction = fraction;
  // Dataset ratings are grouped by user and ordered by (timestamp, item).
  std::span<const Rating> all = dataset.ratings();
  std::size_t begin = 0;
  while (begin < all.size()) {
    std::size_t end = begin;
    while (end < all.size() && all[end].user == all[begin].user) ++end;
    std::size_t n = end - begin;
    std::size_t n_test = ceil_fraction(fraction, n);
    if (n - n_test < min_train_ratings) n_test = 0;
    split.train.insert(split.train.end(), all.begin() + begin,
                       all.begin() + (end - n_test));
    split.test.insert(split.test.end(), all.begin() + (end - n_test),
                      all.begin() + end);
    begin = end;
  }
  return split;
}

RatingMatrix::RatingMatrix(std::size_t num_users, std::size_t num_items,
                           std::span<const Rating> ratings)
    : user_offsets_(num_users + 1, 0),
      item_offsets_(num_items + 1, 0),
      by_user_(ratings.size()),
      by_item_(ratings.size()),
      user_means_(num_users, 0.0) {
  for (const Rating& r : ratings) {
    if (r.user >= num_users || r.item >= num_items) {
      throw InvalidArgument("rating index outside matrix bounds");
    }
    ++user_offsets_[r.user + 1];
    ++item_offsets_[r.item + 1];
  }
  std::partial_sum(user_offsets_.begin(), user_offsets_.end(), user_offsets_.begin());
  std::partial_sum(item_offsets_.begin(), item_offsets_.end(), item_offsets_.begin());

  std::vector<std::size_t> ucur(user_offsets_.begin(), user_offsets_.end() - 1);
  std::vector<std::size_t> icur(item_offsets_.begin(), item_offsets_.end() - 1);
  for (const Rating& r : ratings) {
    by_user_[ucur[r.user]++] = Entry{r.item, r.value};
    by_item_[icur[r.item]++] = Entry{r.user, r.value};
  }
  auto by_index = [](const Entry& a, const Entry& b) { return a.index < b.index; };
  for (std::size_t u = 0; u < num_users; ++u) {
    auto first = by_user_.begin() + user_offsets_[u];
    auto last = by_user_.begin() + user_offsets_[u + 1];
    std::sort(first, last, by_index);
    if (first != last) {
      double sum = 0.0;
      for (auto it = first; it != last; ++it) sum += it->value;
      user_means_[u] = sum / static_cast<double>(last - first);
    }
  }
  for (std::size_t i = 0; i < num_items; ++i) {
    std::sort(by_item_.begin() + item_offsets_[i],
              by_item_.begin() + item_offsets_[i + 1], by_index);
  }
}

std::span<const RatingMatrix::Entry> RatingMatrix::user_row(UserIndex u) const {
  return {by_user_.data() + user_offsets_[u], user_offsets_[u + 1] - user_offsets_[u]};
}

std::span<const RatingMatrix::Entry> RatingMatrix::item_column(ItemIndex i) const {
  return {by_item_.data() + item_offsets_[i], item_offsets_[i + 1] - item_offsets_[i]};
}

std::optional<int> RatingMatrix::rating(UserIndex u, ItemIndex i) const {
  auto row = user_row(u);
  auto it = std::lower_bound(row.begin(), row.end(), i,
                             [](const Entry& e, ItemIndex x) { return e.index < x; });
  if (it == row.end() || it->index != i) return std::nullopt;
  return it->value;
}

double RatingMatrix::user_mean(UserIndex u) const {
  if (u >= num_users() || user_count(u) == 0) throw ColdUserError(u);
  return user_means_[u];
}

PopularityPartition PopularityPartition::from_counts(std::vector<std::size_t> counts,
                                                     double head_item_fraction) {
  if (!(head_item_fraction > 0.0 && head_item_fraction < 1.0)) {
    throw InvalidArgument("head item fraction must lie in (0, 1)");
  }
  PopularityPartition p;
  p.head_fraction_ = head_item_fraction;
  p.counts_ = std::move(counts);
  p.ranking_.resize(p.counts_.size());
  std::iota(p.ranking_.begin(), p.ranking_.end(), ItemIndex{0});
  std::stable_sort(p.ranking_.begin(), p.ranking_.end(),
                   [&](ItemIndex a, ItemIndex b) { return p.counts_[a] > p.counts_[b]; });
  p.head_size_ = std::min(p.counts_.size(),
                          ceil_fraction(head_item_fraction, p.counts_.size()));
  p.long_tail_.assign(p.counts_.size(), 1);
  for (std::size_t r = 0; r < p.head_size_; ++r) p.long_tail_[p.ranking_[r]] = 0;
  return p;
}

PopularityPartition popularity_partition(const RatingMatrix& train,
                                         double head_item_fraction) {
  if (train.empty()) throw InvalidArgument("popularity partition needs training ratings");
  std::vector<std::size_t> counts(train.num_items());
  for (ItemIndex i = 0; i < counts.size(); ++i) counts[i] = train.item_count(i);
  return PopularityPartition::from_counts(std::move(counts), head_item_fraction);
}

}  // namespace ltrec
