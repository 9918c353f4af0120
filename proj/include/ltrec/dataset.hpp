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

#ifndef LTREC_DATASET_HPP_
#define LTREC_DATASET_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "ltrec/types.hpp"

namespace ltrec {

struct User {
  UserId id = 0;
  AgeGroup age = AgeGroup::k25;
  std::optional<char> gender;

  friend bool operator==(const User&, const User&) = default;
};

struct Item {
  ItemId id = 0;
  std::string title;
  GenreMask genres = 0;

  friend bool operator==(const Item&, const Item&) = default;
};

// A rating as it appears on disk, keyed by external ids.
struct RatingRecord {
  UserId user = 0;
  ItemId item = 0;
  int value = 0;
  std::int64_t timestamp = 0;
};

// A rating keyed by dense indices.
struct Rating {
  UserIndex user = 0;
  ItemIndex item = 0;
  std::uint8_t value = 0;
  std::int64_t timestamp = 0;

  friend bool operator==(const Rating&, const Rating&) = default;
};

// Immutable users/items/ratings. Users and items are stored sorted by id;
// ratings are sorted by (user, timestamp, item).
class Dataset {
 public:
  Dataset() = default;

  // Validates ids, genres, rating values, references and (user, item)
  // uniqueness. Throws InvalidArgument on the first violation.
  static Dataset build(std::vector<User> users, std::vector<Item> items,
                       std::span<const RatingRecord> ratings);

  std::span<const User> users() const { return users_; }
  std::span<const Item> items() const { return items_; }
  std::span<const Rating> ratings() const { return ratings_; }

  std::size_t num_users() const { return users_.size(); }
  std::size_t num_items() const { return items_.size(); }

  const User& user(UserIndex u) const { return users_[u]; }
  const Item& item(ItemIndex i) const { return items_[i]; }

  std::optional<UserIndex> user_index(UserId id) const;
  std::optional<ItemIndex> item_index(ItemId id) const;

  friend bool operator==(const Dataset& a, const Dataset& b);

 private:
  std::vector<User> users_;
  std::vector<Item> items_;
  std::vector<Rating> ratings_;
  std::unordered_map<UserId, UserIndex> user_lookup_;
  std::unordered_map<ItemId, ItemIndex> item_lookup_;
};

struct MovieLensPaths {
  std::filesystem::path ratings;
  std::filesystem::path users;
  std::filesystem::path movies;

  // ratings.dat, users.dat and movies.dat inside `dir`.
  static MovieLensPaths in_directory(const std::filesystem::path& dir);
};

// Reads the `::`-delimited MovieLens 1M files. Malformed lines, unknown
// genres, dangling ids and duplicate (user, item) pairs raise ParseError
// naming the file and 1-based line number.
Dataset parse_movielens(const MovieLensPaths& paths);

struct SplitDataset {
  std::vector<Rating> train;
  std::vector<Rating> test;
  double split_fraction = 0.2;
};

// Per user, the latest ceil(fraction * n_u) ratings (by timestamp, ties by
// item id) are held out, unless that would leave fewer than
// `min_train_ratings` in train; such users keep everything in train.
SplitDataset temporal_split(const Dataset& dataset, double fraction,
                            std::size_t min_train_ratings = 5);

// ceil(fraction * n) that does not round 0.2 * 15 up to 4.
std::size_t ceil_fraction(double fraction, std::size_t n);

// Sparse rating store with both user-major and item-major views.
class RatingMatrix {
 public:
  struct Entry {
    std::uint32_t index;  // item in a user row, user in an item column
    std::uint8_t value;
  };

  RatingMatrix() = default;
  RatingMatrix(std::size_t num_users, std::size_t num_items,
               std::span<const Rating> ratings);

  std::size_t num_users() const { return user_offsets_.size() - 1; }
  std::size_t num_items() const { return item_offsets_.size() - 1; }
  std::size_t num_ratings() const { return by_user_.size(); }
  bool empty() const { return by_user_.empty(); }

  // Sorted by item index.
  std::span<const Entry> user_row(UserIndex u) const;
  // Sorted by user index.
  std::span<const Entry> item_column(ItemIndex i) const;

  std::size_t user_count(UserIndex u) const { return user_row(u).size(); }
  std::size_t item_count(ItemIndex i) const { return item_column(i).size(); }

  std::optional<int> rating(UserIndex u, ItemIndex i) const;
  bool has_rating(UserIndex u, ItemIndex i) const {
    return rating(u, i).has_value();
  }

  // Mean of u's ratings; throws ColdUserError when u has none.
  double user_mean(UserIndex u) const;

 private:
  std::vector<std::size_t> user_offsets_{0};
  std::vector<std::size_t> item_offsets_{0};
  std::vector<Entry> by_user_;
  std::vector<Entry> by_item_;
  std::vector<double> user_means_;
};

// Per-item train rating counts split into short head / long tail.
class PopularityPartition {
 public:
  PopularityPartition() = default;

  // Partition from explicit per-item counts.
  static PopularityPartition from_counts(std::vector<std::size_t> counts,
                                         double head_item_fraction);

  std::size_t num_items() const { return counts_.size(); }
  std::size_t popularity(ItemIndex i) const { return counts_[i]; }
  bool is_long_tail(ItemIndex i) const { return long_tail_[i] != 0; }
  std::size_t head_size() const { return head_size_; }
  double head_fraction() const { return head_fraction_; }

  // Items in descending popularity order (ties by ascending id).
  std::span<const ItemIndex> ranking() const { return ranking_; }

 private:
  std::vector<std::size_t> counts_;
  std::vector<std::uint8_t> long_tail_;
  std::vector<ItemIndex> ranking_;
  std::size_t head_size_ = 0;
  double head_fraction_ = 0.2;
};

// The first ceil(fraction * |items|) items by train count form the short
// head. Throws InvalidArgument on an empty training set or a fraction
// outside (0, 1).
PopularityPartition popularity_partition(const RatingMatrix& train,
                                         double head_item_fraction = 0.2);

}  // namespace ltrec

#endif  // LTREC_DATASET_HPP_
