#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <set>

#include "dsts/data.hpp"
#include "dsts/error.hpp"
#include "dsts/io.hpp"
#include "dsts/rng.hpp"
#include "oracles.hpp"

namespace dsts {
namespace {

using testing::TempDir;

Dataset make_dataset(std::size_t n_td, std::size_t n_asd, std::size_t T = 3, std::size_t d = 2) {
  Dataset ds;
  ds.d = d;
  Rng rng(1);
  for (std::size_t i = 0; i < n_td + n_asd; ++i) {
    Sample s{"id" + std::to_string(i), testing::random_tensor({T, d}, rng), i < n_td ? kLabelTD : kLabelASD};
    ds.samples.push_back(std::move(s));
  }
  return ds;
}

void write(const std::filesystem::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

std::string load_error(const std::filesystem::path& dir) {
  try {
    load_dataset(dir);
  } catch (const DataError& e) {
    return e.what();
  }
  return "";
}

TEST(Io, DoubleRoundTripIsExact) {
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    const double v = rng.normal() * std::pow(10.0, rng.uniform(-30, 30));
    EXPECT_EQ(io::parse_double(io::format_double(v), "test"), v);
  }
  EXPECT_THROW(io::parse_double("1.5x", "test"), DataError);
  EXPECT_THROW(io::parse_double("", "test"), DataError);
  EXPECT_THROW(io::parse_int("3.0", "test"), DataError);
}

TEST(LoadDataset, SaveLoadRoundTripIsBitExact) {
  TempDir dir("data_rt");
  const Dataset ds = make_dataset(2, 3);
  save_dataset(ds, dir.path());
  const Dataset back = load_dataset(dir.path());
  ASSERT_EQ(back.size(), ds.size());
  EXPECT_EQ(back.d, ds.d);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    EXPECT_EQ(back.samples[i].id, ds.samples[i].id);
    EXPECT_EQ(back.samples[i].label, ds.samples[i].label);
    EXPECT_EQ(back.samples[i].seq, ds.samples[i].seq);
  }
}

TEST(LoadDataset, OrderFollowsLabelsFileAndLengthsMayDiffer) {
  TempDir dir("data_order");
  write(dir / "data.csv", "sample_id,t,f0\na,0,1\na,1,2\nb,0,5\n");
  write(dir / "labels.csv", "sample_id,label\nb,1\na,0\n");
  const Dataset ds = load_dataset(dir.path());
  ASSERT_EQ(ds.size(), 2u);
  EXPECT_EQ(ds.samples[0].id, "b");
  EXPECT_EQ(ds.samples[0].length(), 1u);
  EXPECT_EQ(ds.samples[1].length(), 2u);
  EXPECT_EQ(ds.samples[1].seq.at({1, 0}), 2.0);
  EXPECT_EQ(ds.class_counts(), (std::vector<std::size_t>{1, 1}));
}

TEST(LoadDataset, DistinctDiagnostics) {
  TempDir dir("data_err");
  EXPECT_NE(load_error(dir.path()).find("missing file"), std::string::npos);

  write(dir / "labels.csv", "sample_id,label\na,0\n");
  write(dir / "data.csv", "id,t,f0\na,0,1\n");
  EXPECT_NE(load_error(dir.path()).find("header"), std::string::npos);

  write(dir / "data.csv", "sample_id,t,f0\na,0,1\na,2,1\n");
  EXPECT_NE(load_error(dir.path()).find("non-contiguous t"), std::string::npos);

  write(dir / "data.csv", "sample_id,t,f0\na,0,1,2\n");
  EXPECT_NE(load_error(dir.path()).find("inconsistent feature count"), std::string::npos);

  write(dir / "data.csv", "sample_id,t,f0\na,0,1\n");
  write(dir / "labels.csv", "sample_id,label\na,2\n");
  EXPECT_NE(load_error(dir.path()).find("not 0 (TD) or 1 (ASD)"), std::string::npos);

  write(dir / "labels.csv", "sample_id,label\na,0\nzz,1\n");
  EXPECT_NE(load_error(dir.path()).find("absent from data.csv"), std::string::npos);

  write(dir / "labels.csv", "sample_id,label\nlabel\n");
  EXPECT_NE(load_error(dir.path()).find("expected 2 fields"), std::string::npos);
}

TEST(Resample, Examples) {
  const Tensor same = Tensor::matrix({{1, 2}, {3, 4}});
  EXPECT_EQ(resample_to_length(same, 2), same);
  EXPECT_EQ(resample_to_length(Tensor::matrix({{0}, {2}}), 3), Tensor::matrix({{0}, {1}, {2}}));
  EXPECT_EQ(resample_to_length(Tensor::matrix({{7.5}}), 4), Tensor::matrix({{7.5}, {7.5}, {7.5}, {7.5}}));
  const Tensor r = resample_to_length(Tensor::matrix({{0}, {1}, {4}}), 5);
  EXPECT_EQ(r, Tensor::matrix({{0}, {0.5}, {1}, {2.5}, {4}}));
}

TEST(ClassWeights, Examples) {
  EXPECT_EQ(class_weights(Labels{0, 1, 0, 1}).w, (std::vector<double>{1.0, 1.0}));
  Labels y(1388, kLabelASD);
  std::fill(y.begin(), y.begin() + 422, kLabelTD);
  const ClassWeights w = class_weights(y);
  EXPECT_NEAR(w.w[kLabelASD], 0.71843, 1e-5);
  EXPECT_NEAR(w.w[kLabelTD], 1.64455, 1e-5);
  EXPECT_NEAR(w.w[0] * 422 + w.w[1] * 966, 1388.0, 1e-9);
  EXPECT_THROW(class_weights(Labels{1, 1}), DegenerateInputError);
}

TEST(ClassWeights, MinorityOutweighsMajority) {
  Rng rng(2);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t a = 1 + rng.index(100), b = 1 + rng.index(100);
    Labels y(a, 0);
    y.insert(y.end(), b, 1);
    const ClassWeights w = class_weights(y);
    if (a < b) EXPECT_GT(w.w[0], w.w[1]);
    if (a > b) EXPECT_LT(w.w[0], w.w[1]);
    EXPECT_NEAR(w.w[0] * a + w.w[1] * b, static_cast<double>(a + b), 1e-9);
  }
}

TEST(StratifiedSplit, PerClassRounding) {
  const Dataset ds = make_dataset(30, 70);
  const Split s = stratified_split(ds, 0.2, 9);
  EXPECT_EQ(s.test.class_counts(), (std::vector<std::size_t>{6, 14}));
  EXPECT_EQ(s.train.class_counts(), (std::vector<std::size_t>{24, 56}));
}

TEST(StratifiedSplit, PartitionAndDeterminism) {
  const Dataset ds = make_dataset(13, 29);
  const Split a = stratified_split(ds, 0.3, 4);
  const Split b = stratified_split(ds, 0.3, 4);
  std::set<std::string> train_ids, test_ids;
  for (const auto& s : a.train.samples) train_ids.insert(s.id);
  for (const auto& s : a.test.samples) test_ids.insert(s.id);
  EXPECT_EQ(train_ids.size() + test_ids.size(), ds.size());
  for (const auto& id : test_ids) EXPECT_EQ(train_ids.count(id), 0u);
  ASSERT_EQ(a.test.size(), b.test.size());
  for (std::size_t i = 0; i < a.test.size(); ++i) EXPECT_EQ(a.test.samples[i].id, b.test.samples[i].id);
  const Split c = stratified_split(ds, 0.3, 5);
  bool differs = false;
  for (std::size_t i = 0; i < c.test.size(); ++i) differs |= c.test.samples[i].id != a.test.samples[i].id;
  EXPECT_TRUE(differs);
}

TEST(StratifiedSplit, ZeroFractionAndErrors) {
  const Dataset ds = make_dataset(3, 4);
  EXPECT_TRUE(stratified_split(ds, 0.0, 1).test.empty());
  EXPECT_THROW(stratified_split(ds, 1.0, 1), ConfigError);
}

TEST(BalancedBatches, EveryBatchHasKOfEachClass) {
  const Dataset ds = make_dataset(5, 17);
  const auto batches = balanced_batches(ds, 2, 4, 3);
  EXPECT_EQ(batches.size(), 5u);  // ceil(17 / 4)
  std::set<std::size_t> majority_seen;
  for (const auto& b : batches) {
    ASSERT_EQ(b.size(), 8u);
    std::size_t td = 0;
    for (std::size_t i : b) {
      if (ds.samples[i].label == kLabelTD) {
        ++td;
      } else {
        majority_seen.insert(i);
      }
    }
    EXPECT_EQ(td, 4u);
  }
  EXPECT_EQ(majority_seen.size(), 17u);
}

TEST(BalancedBatches, BatchCountFollowsLargestClass) {
  Dataset ds = make_dataset(422, 966, 1, 1);
  EXPECT_EQ(balanced_batches(ds, 2, 8, 1).size(), 121u);
}

TEST(BalancedBatches, EveryMemberHasPositives) {
  const Dataset ds = make_dataset(3, 11);
  for (const auto& b : balanced_batches(ds, 2, 5, 8)) {
    for (std::size_t i : b) {
      std::size_t same = 0;
      for (std::size_t k : b) same += (ds.samples[k].label == ds.samples[i].label) ? 1 : 0;
      EXPECT_GE(same - 1, 4u);
    }
  }
}

TEST(BalancedBatches, DeterministicAndValidated) {
  const Dataset ds = make_dataset(6, 9);
  EXPECT_EQ(balanced_batches(ds, 2, 3, 11), balanced_batches(ds, 2, 3, 11));
  EXPECT_NE(balanced_batches(ds, 2, 3, 11), balanced_batches(ds, 2, 3, 12));
  EXPECT_THROW(balanced_batches(ds, 2, 1, 1), ConfigError);
  EXPECT_THROW(balanced_batches(ds, 3, 2, 1), ConfigError);
}

TEST(Standardizer, FitsTrainingStatistics) {
  Dataset ds;
  ds.d = 2;
  ds.samples.push_back({"a", Tensor::matrix({{1, 5}, {3, 5}}), 0});
  ds.samples.push_back({"b", Tensor::matrix({{5, 5}, {7, 5}}), 1});
  const Standardizer st = Standardizer::fit(ds);
  EXPECT_EQ(st.mean, (std::vector<double>{4, 5}));
  EXPECT_NEAR(st.stddev[0], std::sqrt(5.0), 1e-15);
  EXPECT_EQ(st.stddev[1], 1.0);
  const Dataset z = st.apply(ds);
  EXPECT_NEAR(z.samples[0].seq.at({0, 0}), -3.0 / std::sqrt(5.0), 1e-15);
  EXPECT_EQ(z.samples[1].seq.at({1, 1}), 0.0);
}

}  // namespace
}  // namespace dsts
