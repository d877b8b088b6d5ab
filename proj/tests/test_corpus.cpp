// Copyright 2026 The CWSD Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "cwsd/corpus.hpp"
#include "support/table_fixture.hpp"
#include "support/tempdir.hpp"

namespace cwsd {
namespace {

using testing::TempDir;

// H = log N - (1/N) sum c log c, normalized by log n.
double entropy_oracle(const std::vector<long long>& c) {
  double n = 0.0, s = 0.0;
  for (auto x : c) {
    n += static_cast<double>(x);
    if (x > 0) s += static_cast<double>(x) * std::log(static_cast<double>(x));
  }
  return (std::log(n) - s / n) / std::log(static_cast<double>(c.size()));
}

void write(const std::filesystem::path& p, const std::string& text) {
  std::filesystem::create_directories(p.parent_path());
  std::ofstream(p, std::ios::binary) << text;
}

TEST(Entropy, MatchesClosedForm) {
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<long long> c(2 + rng.index(5));
    for (auto& x : c) x = 1 + static_cast<long long>(rng.index(500));
    EXPECT_NEAR(normalized_entropy(c), entropy_oracle(c), 1e-12);
  }
}

TEST(Entropy, UniformIsOneAndSingletonIsZero) {
  EXPECT_NEAR(normalized_entropy(std::vector<long long>{7, 7, 7}), 1.0, 1e-15);
  EXPECT_EQ(normalized_entropy(std::vector<long long>{0, 9}), 0.0);
  EXPECT_EQ(normalized_entropy(std::vector<long long>{5}), 0.0);
}

TEST(Entropy, RejectsBadCounts) {
  EXPECT_THROW(normalized_entropy(std::vector<long long>{0, 0}), Error);
  EXPECT_THROW(normalized_entropy(std::vector<long long>{3, -1}), Error);
}

TEST(Entropy, BoundedAndPermutationInvariant) {
  Rng rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<long long> c(2 + rng.index(5));
    for (auto& x : c) x = static_cast<long long>(rng.index(100));
    c[0] += 1;
    double h = normalized_entropy(c);
    EXPECT_GE(h, 0.0);
    EXPECT_LE(h, 1.0 + 1e-12);
    auto p = c;
    rng.shuffle(p);
    EXPECT_NEAR(normalized_entropy(p), h, 1e-12);
  }
}

TEST(WordStats, CraneCounts) {
  auto st = word_stats(testing::benchmark_word("crane"));
  EXPECT_EQ(st.train_total(), 372);
  EXPECT_EQ(st.test_total(), 157);
  EXPECT_EQ(format_fixed(st.f2r(), 1), "1.3");
  EXPECT_EQ(stats_csv_row(st), "crane,2,1.3,0.99,1.00,372,157\n");
}

TEST(WordStats, F2RUsesTrainCounts) {
  EXPECT_EQ(format_fixed(word_stats(testing::benchmark_word("pitcher")).f2r(), 1), "355.7");
  EXPECT_EQ(format_fixed(word_stats(testing::benchmark_word("bank")).f2r(), 1), "23.1");
}

TEST(Loader, MinimalParse) {
  TempDir tmp;
  write(tmp / "crane/classes_map.txt", R"J({"0": "crane_(machine)", "1": "crane_(bird)"})J");
  write(tmp / "crane/train.data.txt", "0\tcrane flies\n");
  write(tmp / "crane/train.gold.txt", "1\n");
  write(tmp / "crane/test.data.txt", "1\tthe crane\n");
  write(tmp / "crane/test.gold.txt", "0\n");
  auto ds = load_word_dataset(tmp.path(), "crane");
  ASSERT_EQ(ds.train.size(), 1u);
  EXPECT_EQ(ds.train[0].instance_id, "train.1");
  EXPECT_EQ(ds.train[0].target_index, 0u);
  EXPECT_EQ(ds.train[0].gold, 1);
  EXPECT_EQ(ds.train[0].target(), "crane");
  EXPECT_EQ(ds.test[0].instance_id, "test.1");
  EXPECT_TRUE(ds.ood_test.empty());
  // class 0 has no train instance
  ASSERT_EQ(ds.warnings.size(), 1u);
  EXPECT_NE(ds.warnings[0].find("crane_(machine)"), std::string::npos);
}

class LoaderErrors : public ::testing::Test {
 protected:
  void SetUp() override {
    write(tmp / "w/classes_map.txt", R"J({"0": "a", "1": "b"})J");
    write(tmp / "w/train.data.txt", "0\tw x\n1\tx w\n");
    write(tmp / "w/train.gold.txt", "0\n1\n");
    write(tmp / "w/test.data.txt", "0\tw\n");
    write(tmp / "w/test.gold.txt", "1\n");
  }
  std::string error() {
    try {
      load_word_dataset(tmp.path(), "w");
    } catch (const Error& e) {
      return e.what();
    }
    return "";
  }
  TempDir tmp;
};

TEST_F(LoaderErrors, Valid) { EXPECT_EQ(error(), ""); }

TEST_F(LoaderErrors, GoldLongerThanDataNamesExtraLine) {
  write(tmp / "w/train.gold.txt", "0\n1\n1\n");
  EXPECT_NE(error().find("train.gold.txt:3"), std::string::npos) << error();
}

TEST_F(LoaderErrors, MalformedLineReportsFileAndLine) {
  write(tmp / "w/train.data.txt", "0\tw x\nnot-a-number w\n");
  EXPECT_NE(error().find("train.data.txt:2"), std::string::npos) << error();
}

TEST_F(LoaderErrors, TargetIndexOutOfRange) {
  write(tmp / "w/test.data.txt", "5\tw\n");
  EXPECT_NE(error().find("test.data.txt:1"), std::string::npos) << error();
}

TEST_F(LoaderErrors, GoldNotInClassesMap) {
  write(tmp / "w/test.gold.txt", "2\n");
  EXPECT_NE(error().find("not in classes map"), std::string::npos) << error();
}

TEST_F(LoaderErrors, MissingFile) {
  std::filesystem::remove(tmp / "w/test.gold.txt");
  EXPECT_NE(error().find("missing file"), std::string::npos) << error();
}

TEST_F(LoaderErrors, NonContiguousClasses) {
  write(tmp / "w/classes_map.txt", R"J({"0": "a", "2": "b"})J");
  EXPECT_NE(error().find("contiguous"), std::string::npos) << error();
}

TEST_F(LoaderErrors, DuplicateSenseIds) {
  write(tmp / "w/classes_map.txt", R"J({"0": "a", "1": "a"})J");
  EXPECT_NE(error().find("duplicate"), std::string::npos) << error();
}

TEST(Loader, GroupsAndDefinitions) {
  TempDir tmp;
  auto ds = testing::synth_word("w", {"a", "b"}, {3, 2}, {2, 2});
  ds.test[0].group = "rare";
  ds.test[2].group = "common";
  ds.senses[1].definition = "the second sense";
  ds.ood_test = testing::synth_split("w", {1, 1}, "ood_test", 1);
  write_word_dataset(ds, tmp.path());
  EXPECT_FALSE(std::filesystem::exists(tmp / "w/train.group.txt"));
  auto back = load_word_dataset(tmp.path(), "w");
  back.warnings.clear();
  EXPECT_EQ(back.senses, ds.senses);
  EXPECT_EQ(back.test, ds.test);
  EXPECT_EQ(back.ood_test, ds.ood_test);
}

TEST(RoundTrip, DirectoryIsByteIdentical) {
  TempDir a, b;
  testing::materialize_benchmark(a.path());
  auto words = list_words(a.path());
  ASSERT_EQ(words.size(), 20u);
  for (const auto& w : words) write_word_dataset(load_word_dataset(a.path(), w), b.path());
  for (const auto& entry : std::filesystem::recursive_directory_iterator(a.path())) {
    if (!entry.is_regular_file()) continue;
    auto rel = std::filesystem::relative(entry.path(), a.path());
    ASSERT_TRUE(std::filesystem::exists(b.path() / rel)) << rel;
    EXPECT_EQ(read_file(entry.path()), read_file(b.path() / rel)) << rel;
  }
}

TEST(RoundTrip, ClassesMapEncoding) {
  std::vector<SenseLabel> s{{0, "crane_(machine)", {}}, {1, "crane_(bird)", {}}};
  EXPECT_EQ(encode_classes_map(s), "{\"0\": \"crane_(machine)\", \"1\": \"crane_(bird)\"}\n");
}

TEST(Dataset, MfsAndLfsTieBreakLow) {
  auto ds = testing::synth_word("w", {"a", "b", "c"}, {4, 9, 9}, {1, 1, 1});
  EXPECT_EQ(ds.mfs(), 1);
  EXPECT_EQ(ds.lfs(), 0);
  auto tie = testing::synth_word("w", {"a", "b"}, {5, 5}, {1, 1});
  EXPECT_EQ(tie.mfs(), 0);
  EXPECT_EQ(tie.lfs(), 0);
}

TEST(Split, NameRoundTrip) {
  for (Split s : {Split::train, Split::test, Split::ood_test}) EXPECT_EQ(parse_split(split_name(s)), s);
  EXPECT_THROW(parse_split("dev"), Error);
}

}  // namespace
}  // namespace cwsd
