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

#ifndef LTREC_TYPES_HPP_
#define LTREC_TYPES_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ltrec {

using UserId = std::int64_t;
using ItemId = std::int64_t;

// Dense indices into Dataset::users() / Dataset::items(). Indices follow
// ascending external id order, so ordering by index is ordering by id.
using UserIndex = std::uint32_t;
using ItemIndex = std::uint32_t;

inline constexpr std::size_t kNumGenres = 18;

inline constexpr std::array<std::string_view, kNumGenres> kGenreNames = {
    "Action",  "Adventure", "Animation", "Children's", "Comedy",  "Crime",
    "Documentary", "Drama", "Fantasy",   "Film-Noir",  "Horror",  "Musical",
    "Mystery", "Romance",   "Sci-Fi",    "Thriller",   "War",     "Western"};

std::optional<std::size_t> genre_index(std::string_view name);

// Bit g set <=> genre kGenreNames[g].
using GenreMask = std::uint32_t;

// Distribution over the 18 genres (PGU, PGL, per-user features).
using GenreVector = std::array<double, kNumGenres>;

// MovieLens age buckets, valued by their lower bound in years.
enum class AgeGroup : std::uint8_t {
  kUnder18 = 1,
  k18 = 18,
  k25 = 25,
  k35 = 35,
  k45 = 45,
  k50 = 50,
  k56 = 56,
};

inline constexpr std::size_t kNumAgeGroups = 7;

inline constexpr std::array<AgeGroup, kNumAgeGroups> kAgeGroups = {
    AgeGroup::kUnder18, AgeGroup::k18, AgeGroup::k25, AgeGroup::k35,
    AgeGroup::k45,      AgeGroup::k50, AgeGroup::k56};

constexpr int age_value(AgeGroup g) { return static_cast<int>(g); }

// Position of `g` in kAgeGroups.
std::size_t age_slot(AgeGroup g);

std::optional<AgeGroup> age_group_from_value(int years);

// Base class for every error this library raises.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual std::string_view kind() const { return "error"; }
};

class ParseError : public Error {
 public:
  ParseError(std::string file, std::size_t line, const std::string& what);
  const std::string& file() const { return file_; }
  std::size_t line() const { return line_; }
  std::string_view kind() const override { return "parse_error"; }

 private:
  std::string file_;
  std::size_t line_;
};

// Raised when an operation needs training ratings the user does not have.
// Carries the dense user index.
class ColdUserError : public Error {
 public:
  explicit ColdUserError(UserIndex user);
  UserIndex user() const { return user_; }
  std::string_view kind() const override { return "cold_user"; }

 private:
  UserIndex user_;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
  std::string_view kind() const override { return "invalid_argument"; }
};

}  // namespace ltrec

#endif  // LTREC_TYPES_HPP_
