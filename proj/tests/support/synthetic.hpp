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

#ifndef LTREC_TESTS_SYNTHETIC_HPP_
#define LTREC_TESTS_SYNTHETIC_HPP_

#include <cstdint>
#include <filesystem>
#include <random>

#include "ltrec/dataset.hpp"

namespace ltrec::testing {

using TestRng = std::mt19937_64;

// Random instance: 2..max_users users, 2..max_items items, up to
// max_ratings distinct (user, item) pairs. Ages, genres, values and
// timestamps are uniform.
Dataset random_dataset(TestRng& rng, std::size_t max_users, std::size_t max_items,
                       std::size_t max_ratings);

// Larger instance with structure: skewed item popularity, age-dependent genre
// taste, every age group populated and every user rating at least
// `min_per_user` items.
struct StructuredShape {
  std::size_t users = 70;
  std::size_t items = 120;
  std::size_t min_per_user = 12;
  std::size_t max_per_user = 40;
};
Dataset structured_dataset(std::uint64_t seed, const StructuredShape& shape = {});

// Writes the dataset as ratings.dat / users.dat / movies.dat.
void write_movielens(const Dataset& ds, const std::filesystem::path& dir);

// Fresh empty directory under the system temp dir.
std::filesystem::path scratch_dir(const std::string& tag);

}  // namespace ltrec::testing

#endif  // LTREC_TESTS_SYNTHETIC_HPP_
