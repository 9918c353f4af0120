#!/usr/bin/env python3
# Copyright 2026 The ltrec Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Convert MovieLens 100K into the ML-1M `::` layout that ltrec reads.

Accepts either the original distribution (u.data, u.item, u.user) or the
RecBole atomic files (ml-100k.inter, ml-100k.item, ml-100k.user).

Exact ages are bucketed into the ML-1M groups. The "unknown" genre is
dropped; movies left without a genre are removed with their ratings.
"""

import argparse
import csv
import os
import sys

GENRES = [
    "Action", "Adventure", "Animation", "Children's", "Comedy", "Crime",
    "Documentary", "Drama", "Fantasy", "Film-Noir", "Horror", "Musical",
    "Mystery", "Romance", "Sci-Fi", "Thriller", "War", "Western",
]


def age_group(age):
    for lo, group in ((56, 56), (50, 50), (45, 45), (35, 35), (25, 25), (18, 18)):
        if age >= lo:
            return group
    return 1


def read_original(src):
    ratings, users, movies = [], {}, {}
    with open(os.path.join(src, "u.data"), encoding="latin-1") as f:
        for line in f:
            u, i, r, ts = line.split("\t")
            ratings.append((int(u), int(i), int(r), int(ts)))
    with open(os.path.join(src, "u.user"), encoding="latin-1") as f:
        for line in f:
            uid, age, gender, _occ, _zip = line.rstrip("\n").split("|")
            users[int(uid)] = (int(age), gender)
    # u.item: id|title|release|video release|url|19 genre flags (unknown first)
    with open(os.path.join(src, "u.item"), encoding="latin-1") as f:
        for line in f:
            fields = line.rstrip("\n").split("|")
            flags = fields[-19:]
            genres = [g for g, flag in zip(["unknown"] + GENRES, flags) if flag == "1"]
            movies[int(fields[0])] = (fields[1], genres)
    return ratings, users, movies


def read_atomic(src):
    def rows(name):
        with open(os.path.join(src, name), encoding="utf-8", newline="") as f:
            reader = csv.reader(f, delimiter="\t", quoting=csv.QUOTE_NONE)
            next(reader)
            yield from reader

    ratings = [(int(u), int(i), int(float(r)), int(float(ts)))
               for u, i, r, ts in rows("ml-100k.inter")]
    users = {int(r[0]): (int(r[1]), r[2]) for r in rows("ml-100k.user")}
    movies = {}
    for r in rows("ml-100k.item"):
        title = r[1] if not r[2] else "%s (%s)" % (r[1], r[2])
        movies[int(r[0])] = (title, r[3].split())
    return ratings, users, movies


def convert(src, dst):
    if os.path.exists(os.path.join(src, "u.data")):
        ratings, users, movies = read_original(src)
    elif os.path.exists(os.path.join(src, "ml-100k.inter")):
        ratings, users, movies = read_atomic(src)
    else:
        raise SystemExit("no MovieLens 100K files in %s" % src)

    kept = {}
    for mid, (title, genres) in movies.items():
        known = [g for g in GENRES if g in genres]
        if known:
            kept[mid] = (title.replace("::", ":"), known)
    ratings = [r for r in ratings if r[1] in kept and r[0] in users]

    os.makedirs(dst, exist_ok=True)
    with open(os.path.join(dst, "users.dat"), "w", encoding="utf-8") as f:
        for uid in sorted(users):
            age, gender = users[uid]
            f.write("%d::%s::%d::0::00000\n" % (uid, gender, age_group(age)))
    with open(os.path.join(dst, "movies.dat"), "w", encoding="utf-8") as f:
        for mid in sorted(kept):
            title, genres = kept[mid]
            f.write("%d::%s::%s\n" % (mid, title, "|".join(genres)))
    with open(os.path.join(dst, "ratings.dat"), "w", encoding="utf-8") as f:
        for u, i, r, ts in sorted(ratings, key=lambda x: (x[0], x[3], x[1])):
            f.write("%d::%d::%d::%d\n" % (u, i, r, ts))
    dropped = len(movies) - len(kept)
    print("users=%d movies=%d (dropped %d) ratings=%d"
          % (len(users), len(kept), dropped, len(ratings)), file=sys.stderr)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("src", help="directory with the 100K files")
    ap.add_argument("dst", help="output directory for *.dat files")
    args = ap.parse_args()
    convert(args.src, args.dst)


if __name__ == "__main__":
    main()
