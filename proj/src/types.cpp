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

#include "ltrec/types.hpp"

#include <algorithm>

namespace ltrec {

std::optional<std::size_t> genre_index(std::string_view name) {
  auto it = std::find(kGenreNames.begin(), kGenreNames.end(), name);
  if (it == kGenreNames.end()) return std::nullopt;
  return static_cast<std::size_t>(it - kGenreNames.begin());
}

std::size_t age_slot(AgeGroup g) {
  auto it = std::find(kAgeGroups.begin(), kAgeGroups.end(), g);
  if (it == kAgeGroups.end()) {
    throw InvalidArgument("invalid age group " + std::to_string(age_value(g)));
  }
  return static_cast<std::size_t>(it - kAgeGroups.begin());
}

std::optional<AgeGroup> age_group_from_value(int years) {
  for (AgeGroup g : kAgeGroups) {
    if (age_value(g) == years) return g;
  }
  return std::nullopt;
}

ParseError::ParseError(std::string file, std::size_t line,
                       const std::string& what)
    : Error(file + ":" + std::to_string(line) + ": " + what),
      file_(std::move(file)),
      line_(line) {}

ColdUserError::ColdUserError(UserIndex user)
    : Error("user #" + std::to_string(user) + " has no training ratings"),
      user_(user) {}

}  // namespace ltrec
