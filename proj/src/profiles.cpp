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

#include "ltrec/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

#include "csv_util.hpp"

namespace ltrec {
namespace {

std::string bound_text(std::size_t hi) {
  return hi == kUnboundedActivity ? "inf" : std::to_string(hi);
}

AgeGroup parse_age(std::string_view s, std::size_t line) {
  auto g = age_group_from_value(static_cast<int>(csv::to_int(s, line)));
  if (!g) throw ParseError("<csv>", line, "invalid age group");
  return *g;
}

bool parse_bool(std::string_view s, std::size_t line) {
  if (s == "true") return true;
  if (s == "false") return false;
  throw ParseError("<csv>", line, "expected true/false");
}

}  // namespace

GenreVector normalize_genres(const GenreVector& counts) {
  double total = 0.0;
  for (double c : counts) total += c;
  GenreVector out;
  if (total <= 0.0) {
    out.fill(1.0 / kNumGenres);
    return out;
  }
  for (std::size_t g = 0; g < kNumGenres; ++g) out[g] = counts[g] / total;
  return out;
}

AgeGenreProfiles build_age_genre_profiles(const Dataset& dataset,
                                          std::span<const Rating> train) {
  std::array<GenreVector, kNumAgeGroups> counts{};
  for (const Rating& r : train) {
    add_genre_incidences(dataset.item(r.item).genres,
                         counts[age_slot(dataset.user(r.user).age)]);
  }
  AgeGenreProfiles profiles;
  for (std::size_t s = 0; s < kNumAgeGroups; ++s) {
    double total = 0.0;
    for (double c : counts[s]) total += c;
    profiles[s].age = kAgeGroups[s];
    profiles[s].incidences = static_cast<std::size_t>(total);
    profiles[s].synthesized = total == 0.0;
    profiles[s].pgu = normalize_genres(counts[s]);
  }
  return profiles;
}

DynamicsCurve build_curve(std::vector<ActivityEvent> events, std::size_t n_bins) {
  if (n_bins < 2) throw InvalidArgument("dynamics curves need at least 2 bins");
  DynamicsCurve curve;
  if (events.empty()) {
    curve.synthesized = true;
    curve.bins.push_back(ActivityBin{1, kUnboundedActivity, 0, 0, 0.5});
    return curve;
  }
  std::sort(events.begin(), events.end(),
            [](const ActivityEvent& a, const ActivityEvent& b) { return a.activity < b.activity; });
  const std::size_t total = events.size();
  std::vector<std::size_t> lows;
  for (std::size_t b = 0; b < n_bins; ++b) {
    std::size_t lo = b == 0 ? 1 : events[b * total / n_bins].activity;
    if (lows.empty() || lo > lows.back()) lows.push_back(lo);
  }
  for (std::size_t b = 0; b < lows.size(); ++b) {
    ActivityBin bin;
    bin.lo = lows[b];
    bin.hi = b + 1 < lows.size() ? lows[b + 1] - 1 : kUnboundedActivity;
    curve.bins.push_back(bin);
  }
  std::size_t b = 0;
  for (const ActivityEvent& e : events) {
    while (e.activity > curve.bins[b].hi) ++b;
    ++curve.bins[b].population;
    if (e.long_tail) ++curve.bins[b].long_tail;
  }
  for (ActivityBin& bin : curve.bins) {
    bin.share = bin.population == 0
                    ? 0.0
                    : static_cast<double>(bin.long_tail) / static_cast<double>(bin.population);
  }
  return curve;
}

std::vector<std::vector<ActivityEvent>> activity_events_by_age(
    const Dataset& dataset, std::span<const Rating> train,
    const PopularityPartition& partition) {
  std::vector<Rating> ordered(train.begin(), train.end());
  std::sort(ordered.begin(), ordered.end(), [](const Rating& a, const Rating& b) {
    return std::tie(a.user, a.timestamp, a.item) < std::tie(b.user, b.timestamp, b.item);
  });
  std::vector<std::vector<ActivityEvent>> events(kNumAgeGroups);
  std::size_t activity = 0;
  for (std::size_t i = 0; i < ordered.size(); ++i) {
    activity = (i > 0 && ordered[i].user == ordered[i - 1].user) ? activity + 1 : 1;
    events[age_slot(dataset.user(ordered[i].user).age)].push_back(
        {activity, partition.is_long_tail(ordered[i].item)});
  }
  return events;
}

DynamicsCurves build_dynamics_curves(const Dataset& dataset,
                                     std::span<const Rating> train,
                                     const PopularityPartition& partition,
                                     std::size_t n_bins) {
  auto events = activity_events_by_age(dataset, train, partition);
  DynamicsCurves curves;
  for (std::size_t s = 0; s < kNumAgeGroups; ++s) {
    curves[s] = build_curve(std::move(events[s]), n_bins);
    curves[s].age = kAgeGroups[s];
  }
  return curves;
}

DynamicsCurve build_overall_curve(const Dataset& dataset,
                                  std::span<const Rating> train,
                                  const PopularityPartition& partition,
                                  std::size_t n_bins) {
  auto events = activity_events_by_age(dataset, train, partition);
  std::vector<ActivityEvent> all;
  for (auto& group : events) all.insert(all.end(), group.begin(), group.end());
  return build_curve(std::move(all), n_bins);
}

std::size_t target_long_tail_count(const DynamicsCurve& curve,
                                   std::size_t ratings_registered, std::size_t k) {
  if (k == 0) throw InvalidArgument("list length must be positive");
  if (curve.bins.empty()) throw InvalidArgument("empty dynamics curve");
  const ActivityBin* bin = &curve.bins.front();
  for (const ActivityBin& b : curve.bins) {
    if (b.lo <= ratings_registered) bin = &b;
  }
  const long target = std::lround(bin->share * static_cast<double>(k));
  return static_cast<std::size_t>(std::clamp<long>(target, 0, static_cast<long>(k)));
}

void write_age_genre_csv(std::ostream& out, const AgeGenreProfiles& profiles) {
  out << "age_group,genre,pgu,synthesized\n";
  for (const auto& p : profiles) {
    for (std::size_t g = 0; g < kNumGenres; ++g) {
      out << age_value(p.age) << ',' << kGenreNames[g] << ','
          << csv::format_double(p.pgu[g]) << ',' << (p.synthesized ? "true" : "false")
          << '\n';
    }
  }
}

void write_dynamics_csv(std::ostream& out, const DynamicsCurves& curves) {
  out << "age_group,bin_lo,bin_hi,share,population,synthesized\n";
  for (const auto& c : curves) {
    for (const auto& b : c.bins) {
      out << age_value(c.age) << ',' << b.lo << ',' << bound_text(b.hi) << ','
          << csv::format_double(b.share) << ',' << b.population << ','
          << (c.synthesized ? "true" : "false") << '\n';
    }
  }
}

void write_lt_sh_csv(std::ostream& out, const DynamicsCurve& overall) {
  out << "bin_lo,bin_hi,long_tail_share,short_head_share,population\n";
  for (const auto& b : overall.bins) {
    out << b.lo << ',' << bound_text(b.hi) << ',' << csv::format_double(b.share) << ','
        << csv::format_double(overall.synthesized ? 0.5 : 1.0 - b.share) << ','
        << b.population << '\n';
  }
}

AgeGenreProfiles read_age_genre_csv(std::istream& in) {
  AgeGenreProfiles profiles;
  for (std::size_t s = 0; s < kNumAgeGroups; ++s) profiles[s].age = kAgeGroups[s];
  csv::for_each_row(in, 4, [&](const auto& f, std::size_t n) {
    auto& p = profiles[age_slot(parse_age(f[0], n))];
    auto g = genre_index(f[1]);
    if (!g) throw ParseError("<csv>", n, "unknown genre");
    p.pgu[*g] = csv::to_double(f[2], n);
    p.synthesized = parse_bool(f[3], n);
  });
  return profiles;
}

DynamicsCurves read_dynamics_csv(std::istream& in) {
  DynamicsCurves curves;
  for (std::size_t s = 0; s < kNumAgeGroups; ++s) curves[s].age = kAgeGroups[s];
  csv::for_each_row(in, 6, [&](const auto& f, std::size_t n) {
    auto& c = curves[age_slot(parse_age(f[0], n))];
    ActivityBin b;
    b.lo = static_cast<std::size_t>(csv::to_int(f[1], n));
    b.hi = f[2] == "inf" ? kUnboundedActivity : static_cast<std::size_t>(csv::to_int(f[2], n));
    b.share = csv::to_double(f[3], n);
    b.population = static_cast<std::size_t>(csv::to_int(f[4], n));
    b.long_tail = static_cast<std::size_t>(std::llround(b.share * static_cast<double>(b.population)));
    c.synthesized = parse_bool(f[5], n);
    c.bins.push_back(b);
  });
  return curves;
}

}  // namespace ltrec
