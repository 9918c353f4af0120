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

#include <gtest/gtest.h>

#include <fstream>

#include "ltrec/dataset.hpp"
#include "oracles.hpp"
#include "synthetic.hpp"

namespace ltrec {
namespace {

using testing::scratch_dir;

void write(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

MovieLensPaths tiny_files(const std::filesystem::path& dir, const std::string& ratings) {
  write(dir / "users.dat", "1::F::1::10::48067\n2::M::56::16::70072\n");
  write(dir / "movies.dat",
        "1193::One Flew Over the Cuckoo's Nest (1975)::Drama\n"
        "661::James and the Giant Peach (1996)::Animation|Children's|Musical\n"
        "914::My Fair Lady (1964)::Musical|Romance\n");
  write(dir / "ratings.dat", ratings);
  return MovieLensPaths::in_directory(dir);
}

TEST(Parse, MapsFieldsDirectly) {
  auto dir = scratch_dir("parse");
  auto ds = parse_movielens(tiny_files(dir, "1::1193::5::978300760\n2::661::3::978302109\n"));
  ASSERT_EQ(ds.num_users(), 2u);
  ASSERT_EQ(ds.num_items(), 3u);
  ASSERT_EQ(ds.ratings().size(), 2u);
  const Rating& r = ds.ratings()[0];
  EXPECT_EQ(ds.user(r.user).id, 1);
  EXPECT_EQ(ds.item(r.item).id, 1193);
  EXPECT_EQ(r.value, 5);
  EXPECT_EQ(r.timestamp, 978300760);
  EXPECT_EQ(ds.user(*ds.user_index(2)).age, AgeGroup::k56);
  EXPECT_EQ(ds.user(*ds.user_index(1)).gender, 'F');
  const Item& peach = ds.item(*ds.item_index(661));
  EXPECT_EQ(peach.title, "James and the Giant Peach (1996)");
  EXPECT_EQ(std::popcount(peach.genres), 3);
}

TEST(Parse, EmptyRatingsFileIsFine) {
  auto dir = scratch_dir("parse");
  auto ds = parse_movielens(tiny_files(dir, ""));
  EXPECT_EQ(ds.ratings().size(), 0u);
  EXPECT_EQ(ds.num_users(), 2u);
}

TEST(Parse, TitleMayContainColons) {
  auto dir = scratch_dir("parse");
  auto paths = tiny_files(dir, "");
  write(paths.movies, "5::Star Wars: Episode IV (1977)::Action|Sci-Fi\n");
  auto ds = parse_movielens(paths);
  EXPECT_EQ(ds.item(0).title, "Star Wars: Episode IV (1977)");
}

struct BadCase {
  std::string ratings;
  std::size_t line;
  std::string fragment;
};

class ParseErrors : public ::testing::TestWithParam<BadCase> {};

TEST_P(ParseErrors, CarryFileAndLine) {
  auto dir = scratch_dir("parse");
  auto paths = tiny_files(dir, GetParam().ratings);
  try {
    parse_movielens(paths);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), GetParam().line);
    EXPECT_EQ(e.file(), paths.ratings.string());
    EXPECT_NE(std::string(e.what()).find(GetParam().fragment), std::string::npos) << e.what();
  }
}

INSTANTIATE_TEST_SUITE_P(
    Ratings, ParseErrors,
    ::testing::Values(BadCase{"1::1193::5\n", 1, "expected 4 fields"},
                      BadCase{"1::1193::5::1\n1::x::5::2\n", 2, "bad numeric"},
                      BadCase{"1::1193::6::1\n", 1, "1..5"},
                      BadCase{"1::1193::5::1\n1::1193::4::2\n", 2, "duplicate"},
                      BadCase{"3::1193::5::1\n", 1, "unknown user"},
                      BadCase{"1::42::5::1\n", 1, "unknown movie"}));

TEST(Parse, UnknownGenreIsAnError) {
  auto dir = scratch_dir("parse");
  auto paths = tiny_files(dir, "");
  write(paths.movies, "1::A::Drama\n2::B::Drama|Cyberpunk\n");
  try {
    parse_movielens(paths);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_NE(std::string(e.what()).find("Cyberpunk"), std::string::npos);
  }
}

TEST(Parse, BadAgeBucketIsAnError) {
  auto dir = scratch_dir("parse");
  auto paths = tiny_files(dir, "");
  write(paths.users, "1::F::17::10::48067\n");
  EXPECT_THROW(parse_movielens(paths), ParseError);
}

TEST(Parse, MissingFileIsAnError) {
  auto paths = MovieLensPaths::in_directory(scratch_dir("missing"));
  EXPECT_THROW(parse_movielens(paths), ParseError);
}

TEST(Parse, ReparseIsIdentical) {
  auto ds = testing::structured_dataset(3);
  auto dir = scratch_dir("reparse");
  testing::write_movielens(ds, dir);
  auto a = parse_movielens(MovieLensPaths::in_directory(dir));
  auto b = parse_movielens(MovieLensPaths::in_directory(dir));
  EXPECT_TRUE(a == b);
  EXPECT_TRUE(a == ds);
}

TEST(Build, RejectsInvalidInput) {
  std::vector<User> users{{1, AgeGroup::k25, std::nullopt}};
  std::vector<Item> items{{1, "a", 1}};
  std::vector<RatingRecord> dup{{1, 1, 3, 0}, {1, 1, 4, 1}};
  EXPECT_THROW(Dataset::build(users, items, dup), InvalidArgument);
  std::vector<Item> no_genre{{1, "a", 0}};
  EXPECT_THROW(Dataset::build(users, no_genre, {}), InvalidArgument);
  std::vector<RatingRecord> bad_value{{1, 1, 0, 0}};
  EXPECT_THROW(Dataset::build(users, items, bad_value), InvalidArgument);
  std::vector<User> dup_users{{1, AgeGroup::k25, {}}, {1, AgeGroup::k18, {}}};
  EXPECT_THROW(Dataset::build(dup_users, items, {}), InvalidArgument);
}

Dataset one_user(const std::vector<std::pair<ItemId, std::int64_t>>& events) {
  std::vector<User> users{{1, AgeGroup::k25, std::nullopt}};
  std::vector<Item> items;
  std::vector<RatingRecord> ratings;
  for (auto [item, ts] : events) {
    items.push_back({item, "m", 1});
    ratings.push_back({1, item, 3, ts});
  }
  return Dataset::build(users, items, ratings);
}

TEST(Split, LatestFractionGoesToTest) {
  auto ds = one_user({{1, 10}, {2, 20}, {3, 30}, {4, 40}, {5, 50}, {6, 60}});
  auto s = temporal_split(ds, 0.2, 5);
  ASSERT_EQ(s.test.size(), 0u);  // 6 - ceil(1.2) = 4 < 5 train
  auto five = one_user({{1, 10}, {2, 20}, {3, 30}, {4, 40}, {5, 50}});
  auto t = temporal_split(five, 0.2, 4);
  ASSERT_EQ(t.test.size(), 1u);
  EXPECT_EQ(t.test[0].timestamp, 50);
}

TEST(Split, TiesBrokenByItemId) {
  std::vector<std::pair<ItemId, std::int64_t>> ev;
  for (ItemId i = 1; i <= 8; ++i) ev.push_back({i, i * 10});
  ev.push_back({20, 100});
  ev.push_back({9, 100});
  auto ds = one_user(ev);
  auto s = temporal_split(ds, 0.2, 5);
  ASSERT_EQ(s.test.size(), 2u);
  // Both tied ratings are held out; the larger id ranks later.
  EXPECT_EQ(ds.item(s.test[0].item).id, 9);
  EXPECT_EQ(ds.item(s.test[1].item).id, 20);
  auto t = temporal_split(ds, 0.1, 5);
  ASSERT_EQ(t.test.size(), 1u);
  EXPECT_EQ(ds.item(t.test[0].item).id, 20);
}

TEST(Split, TestSizeMatchesRecount) {
  auto ds = testing::structured_dataset(11);
  auto s = temporal_split(ds, 0.2, 5);
  std::map<UserIndex, std::size_t> per_user;
  for (const auto& r : ds.ratings()) ++per_user[r.user];
  std::size_t expect = 0;
  for (auto [u, n] : per_user) {
    const auto t = static_cast<std::size_t>(std::ceil(0.2 * n - 1e-9));
    if (n - t >= 5) expect += t;
  }
  EXPECT_EQ(s.test.size(), expect);
}

TEST(Split, RejectsBadFraction) {
  auto ds = one_user({{1, 1}});
  EXPECT_THROW(temporal_split(ds, 0.0), InvalidArgument);
  EXPECT_THROW(temporal_split(ds, 1.0), InvalidArgument);
}

TEST(CeilFraction, AvoidsRoundingUp) {
  EXPECT_EQ(ceil_fraction(0.2, 15), 3u);
  EXPECT_EQ(ceil_fraction(0.2, 10), 2u);
  EXPECT_EQ(ceil_fraction(0.2, 11), 3u);
  EXPECT_EQ(ceil_fraction(0.2, 3883), 777u);
}

TEST(RatingMatrix, RowsColumnsAndMeans) {
  std::vector<Rating> r{{0, 2, 5, 0}, {0, 0, 3, 0}, {1, 2, 1, 0}, {0, 1, 4, 0}};
  RatingMatrix m(3, 3, r);
  ASSERT_EQ(m.user_count(0), 3u);
  EXPECT_EQ(m.user_row(0)[0].index, 0u);
  EXPECT_EQ(m.user_row(0)[2].index, 2u);
  EXPECT_EQ(m.item_count(2), 2u);
  EXPECT_EQ(m.rating(1, 2), 1);
  EXPECT_FALSE(m.has_rating(1, 0));
  EXPECT_DOUBLE_EQ(m.user_mean(0), 4.0);
  EXPECT_THROW(m.user_mean(2), ColdUserError);
  EXPECT_THROW(RatingMatrix(1, 1, r), InvalidArgument);
}

TEST(Partition, TopFractionIsShortHead) {
  std::vector<std::size_t> counts{100, 90, 80, 70, 60, 50, 40, 30, 20, 10};
  auto p = PopularityPartition::from_counts(counts, 0.2);
  EXPECT_EQ(p.head_size(), 2u);
  EXPECT_FALSE(p.is_long_tail(0));
  EXPECT_FALSE(p.is_long_tail(1));
  for (ItemIndex i = 2; i < 10; ++i) EXPECT_TRUE(p.is_long_tail(i));
}

TEST(Partition, ZeroCountItemsAreLongTailAndTiesGoToLowerId) {
  auto p = PopularityPartition::from_counts({0, 5, 5, 5, 0}, 0.4);
  EXPECT_EQ(p.head_size(), 2u);
  EXPECT_FALSE(p.is_long_tail(1));
  EXPECT_FALSE(p.is_long_tail(2));
  EXPECT_TRUE(p.is_long_tail(3));
  EXPECT_TRUE(p.is_long_tail(0));
  EXPECT_EQ(p.popularity(0), 0u);
  EXPECT_EQ(p.ranking()[0], 1u);
}

TEST(Partition, MatchesRecountAndRejectsEmptyTrain) {
  auto ds = testing::structured_dataset(5);
  RatingMatrix m(ds.num_users(), ds.num_items(), ds.ratings());
  auto p = popularity_partition(m, 0.2);
  testing::DenseRatings dense(ds.num_users(), ds.num_items(), ds.ratings());
  auto pop = testing::naive_popularity(dense);
  auto lt = testing::naive_long_tail(dense, 0.2);
  for (ItemIndex i = 0; i < ds.num_items(); ++i) {
    EXPECT_EQ(p.popularity(i), pop[i]);
    EXPECT_EQ(p.is_long_tail(i), lt[i] == 1);
  }
  RatingMatrix empty(2, 2, {});
  EXPECT_THROW(popularity_partition(empty), InvalidArgument);
  EXPECT_THROW(PopularityPartition::from_counts({1, 2}, 1.0), InvalidArgument);
}

}  // namespace
}  // namespace ltrec
