/* Copyright 2026 The KGPL Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include <cstdlib>
#include <fstream>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "kgpl/pipeline.hpp"

namespace kgpl {
namespace {

TEST(ConvertRaw, LastFmSkipsHeaderAndNumbersDensely) {
  const auto dir = testing::scratch_dir("conv_lastfm");
  std::ofstream(dir / "ua.dat") << "userID\tartistID\tweight\n"
                                << "2\t51\t13883\n2\t9\t100\n7\t51\t5\n";
  const auto r = convert_raw(DatasetKind::kLastFm, dir / "ua.dat");
  EXPECT_EQ(r.num_users, 2u);
  EXPECT_EQ(r.num_items, 2u);
  // numeric raw ids sort numerically: artist 9 -> 0, 51 -> 1
  EXPECT_EQ(r.pairs, (std::vector<Interaction>{{0, 0}, {0, 1}, {1, 1}}));
}

TEST(ConvertRaw, ItemMapDropsUnmappedItems) {
  const auto dir = testing::scratch_dir("conv_map");
  std::ofstream(dir / "ua.dat") << "userID\tartistID\tweight\n1\t51\t3\n1\t9\t4\n";
  std::ofstream(dir / "map.txt") << "51\t4\n";
  const auto r = convert_raw(DatasetKind::kLastFm, dir / "ua.dat", dir / "map.txt");
  EXPECT_EQ(r.pairs, (std::vector<Interaction>{{0, 4}}));
}

TEST(ConvertRaw, MovieLensAndBookCrossing) {
  const auto dir = testing::scratch_dir("conv_other");
  std::ofstream(dir / "ratings.dat") << "1::1193::5::978300760\n1::661::3::978302109\n";
  const auto ml = convert_raw(DatasetKind::kMovieLens1M, dir / "ratings.dat");
  EXPECT_EQ(ml.pairs.size(), 2u);
  std::ofstream(dir / "bx.csv") << "\"User-ID\";\"ISBN\";\"Book-Rating\"\n"
                                << "\"276725\";\"034545104X\";\"0\"\n\"276726\";\"0155061224\";\"5\"\n";
  const auto bx = convert_raw(DatasetKind::kBookCrossing, dir / "bx.csv");
  EXPECT_EQ(bx.num_users, 2u);
  EXPECT_EQ(bx.num_items, 2u);
  std::ofstream(dir / "bad.dat") << "1::2\n";
  EXPECT_THROW(convert_raw(DatasetKind::kMovieLens1M, dir / "bad.dat"), ParseError);
  EXPECT_THROW(parse_dataset_kind("netflix"), UsageError);
  EXPECT_EQ(parse_dataset_kind(dataset_kind_name(DatasetKind::kLastFm)), DatasetKind::kLastFm);
}

void write_generic(const std::filesystem::path& dir) {
  std::ofstream raw(dir / "raw.tsv");
  for (int k = 0; k < 10; ++k) raw << k % 3 << '\t' << (k * 2) % 7 << '\n';
  std::ofstream(dir / "kg.txt") << "0 0 7\n1 0 7\n2 1 8\n";
}

TEST(Prepare, GenericTenLineFile) {
  const auto dir = testing::scratch_dir("prep_generic");
  write_generic(dir);
  PrepareOptions o;
  o.raw = dir / "raw.tsv";
  o.kg = dir / "kg.txt";
  o.out_dir = dir / "ds";
  const auto ds = prepare_dataset(o);
  const auto s = ds.stats();
  EXPECT_EQ(s.interactions, 10u);
  EXPECT_EQ(s.train + s.valid + s.test, 10u);
  EXPECT_EQ(s.train, 6u);
  EXPECT_GE(s.entities, s.items);
  for (const char* f : {"interactions.tsv", "train.tsv", "valid.tsv", "test.tsv", "valid_neg.tsv",
                        "test_neg.tsv", "kg.txt", "manifest.json"})
    EXPECT_TRUE(std::filesystem::exists(dir / "ds" / f)) << f;
}

TEST(Prepare, RerunIsByteIdenticalAndLoadsBack) {
  const auto dir = testing::scratch_dir("prep_rerun");
  write_generic(dir);
  ::setenv("SOURCE_DATE_EPOCH", "1700000000", 1);
  PrepareOptions o;
  o.raw = dir / "raw.tsv";
  o.kg = dir / "kg.txt";
  o.seed = 5;
  o.out_dir = dir / "a";
  const auto a = prepare_dataset(o);
  o.out_dir = dir / "b";
  prepare_dataset(o);
  ::unsetenv("SOURCE_DATE_EPOCH");
  for (const char* f : {"train.tsv", "valid.tsv", "test.tsv", "test_neg.tsv", "manifest.json"})
    EXPECT_EQ(testing::read_file(dir / "a" / f), testing::read_file(dir / "b" / f)) << f;
  EXPECT_NE(testing::read_file(dir / "a" / "manifest.json").find("2023-11-14T22:13:20Z"),
            std::string::npos);

  const auto back = load_dataset(dir / "a");
  EXPECT_EQ(back.data.train_pos, a.data.train_pos);
  EXPECT_EQ(back.data.valid_pos, a.data.valid_pos);
  EXPECT_EQ(back.data.test_pos, a.data.test_pos);
  EXPECT_EQ(back.data.test_neg, a.data.test_neg);
  EXPECT_EQ(back.data.item_freq, a.data.item_freq);
  EXPECT_EQ(back.kg.triples(), a.kg.triples());
  EXPECT_EQ(back.seed, 5u);
}

TEST(Prepare, MissingInputsAreDataErrors) {
  const auto dir = testing::scratch_dir("prep_missing");
  PrepareOptions o;
  o.raw = dir / "nope.tsv";
  o.kg = dir / "kg.txt";
  o.out_dir = dir / "out";
  EXPECT_THROW(prepare_dataset(o), DataError);
  EXPECT_THROW(load_dataset(dir / "absent"), DataError);
}

}  // namespace
}  // namespace kgpl
