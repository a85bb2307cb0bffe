#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <set>
#include <string>

#include "mixbag/bag.hpp"

using mixbag::Bag;
using mixbag::BagGenConfig;
using mixbag::Dataset;
using mixbag::largest_remainder_counts;
using mixbag::make_bags;
using mixbag::ProportionVector;
using mixbag::realized_histogram;
using mixbag::Rng;
using mixbag::sample_proportion;

namespace {

Dataset blobs(int classes, int per_class, std::uint64_t seed = 3) {
  Rng rng(seed);
  return mixbag::make_blobs(classes, per_class, 4, 0.5, rng);
}

}  // namespace

TEST(SampleProportion, SumsToOne) {
  Rng rng(17);
  for (int i = 0; i < 10000; ++i) {
    ProportionVector p = sample_proportion(4, 0.15, rng);
    double sum = 0.0;
    for (std::size_t c = 0; c < p.size(); ++c) sum += p[c];
    ASSERT_NEAR(sum, 1.0, 1e-9);
  }
}

TEST(SampleProportion, TinyStdApproachesUniform) {
  Rng rng(18);
  ProportionVector p = sample_proportion(5, 1e-8, rng);
  for (std::size_t c = 0; c < p.size(); ++c) EXPECT_NEAR(p[c], 0.2, 1e-6);
}

// Monte-Carlo oracle: coordinates of the renormalized draw average 1/C.
TEST(SampleProportion, MeanNearUniformOverManyDraws) {
  Rng rng(19);
  double mean[3] = {0.0, 0.0, 0.0};
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    ProportionVector p = sample_proportion(3, 0.15, rng);
    for (int c = 0; c < 3; ++c) mean[c] += p[c];
  }
  for (int c = 0; c < 3; ++c) EXPECT_NEAR(mean[c] / n, 1.0 / 3.0, 0.01);
}

TEST(LargestRemainder, CanonicalThreeClassExample) {
  std::vector<int> counts =
      largest_remainder_counts(ProportionVector({0.3, 0.5, 0.2}), 10);
  EXPECT_EQ(counts, (std::vector<int>{3, 5, 2}));
}

TEST(LargestRemainder, QuarterQuarterHalf) {
  std::vector<int> counts =
      largest_remainder_counts(ProportionVector({0.25, 0.25, 0.5}), 10);
  EXPECT_EQ(counts[0] + counts[1] + counts[2], 10);
  EXPECT_EQ(counts[2], 5);
  EXPECT_TRUE(counts[0] == 2 || counts[0] == 3);
  EXPECT_TRUE(counts[1] == 2 || counts[1] == 3);
}

TEST(LargestRemainder, TieGoesToLowerClass) {
  EXPECT_EQ(largest_remainder_counts(ProportionVector({0.5, 0.5}), 1),
            (std::vector<int>{1, 0}));
  EXPECT_EQ(largest_remainder_counts(ProportionVector({0.5, 0.5}), 3),
            (std::vector<int>{2, 1}));
}

TEST(LargestRemainder, CountsWithinOneOfQuota) {
  Rng rng(23);
  for (int rep = 0; rep < 200; ++rep) {
    const int C = 2 + static_cast<int>(rng.uniform_int(9));
    const int total = 1 + static_cast<int>(rng.uniform_int(50));
    ProportionVector p = sample_proportion(C, 0.2, rng);
    std::vector<int> counts = largest_remainder_counts(p, total);
    int sum = 0;
    for (int c = 0; c < C; ++c) {
      sum += counts[c];
      ASSERT_LT(std::fabs(counts[c] - p[c] * total), 1.0);
    }
    ASSERT_EQ(sum, total);
  }
}

TEST(MakeBags, LabelsEqualRealizedHistogramsExactly) {
  Dataset ds = blobs(3, 300);
  BagGenConfig cfg;
  cfg.num_bags = 40;
  cfg.bag_size = 10;
  cfg.rng_seed = 31;
  std::vector<Bag> bags = make_bags(ds, cfg);
  ASSERT_EQ(bags.size(), 40u);
  for (const Bag& b : bags) {
    ASSERT_EQ(b.size(), 10u);
    ProportionVector hist = realized_histogram(ds, b.instance_ids);
    for (std::size_t c = 0; c < hist.size(); ++c) ASSERT_EQ(b.label[c], hist[c]);
  }
}

TEST(MakeBags, NonOverlapIsAPartition) {
  Dataset ds = blobs(2, 2900, 5);  // headroom over the 512*10/2 mean demand
  BagGenConfig cfg;
  cfg.num_bags = 512;
  cfg.bag_size = 10;
  cfg.allow_overlap = false;
  cfg.rng_seed = 33;
  std::vector<Bag> bags = make_bags(ds, cfg);
  std::set<int> seen;
  std::size_t total = 0;
  for (const Bag& b : bags) {
    total += b.size();
    seen.insert(b.instance_ids.begin(), b.instance_ids.end());
  }
  EXPECT_EQ(seen.size(), total);  // no index in more than one bag
}

TEST(MakeBags, OverlapModeReusesInstances) {
  Dataset ds = blobs(2, 30, 6);
  BagGenConfig cfg;
  cfg.num_bags = 64;
  cfg.bag_size = 10;
  cfg.allow_overlap = true;
  cfg.rng_seed = 34;
  std::vector<Bag> bags = make_bags(ds, cfg);  // 640 draws from 60 instances
  EXPECT_EQ(bags.size(), 64u);
  for (const Bag& b : bags) {
    std::set<int> ids(b.instance_ids.begin(), b.instance_ids.end());
    ASSERT_EQ(ids.size(), b.size());  // still distinct within a bag
  }
}

TEST(MakeBags, CapacityErrorNamesClass) {
  Dataset ds = blobs(2, 10, 7);
  BagGenConfig cfg;
  cfg.num_bags = 10;
  cfg.bag_size = 10;
  cfg.allow_overlap = false;
  cfg.rng_seed = 35;
  try {
    make_bags(ds, cfg);
    FAIL() << "expected capacity error";
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("class"), std::string::npos);
  }
}

TEST(MakeBags, DeterministicForSameSeed) {
  Dataset ds = blobs(3, 200, 8);
  BagGenConfig cfg;
  cfg.num_bags = 20;
  cfg.bag_size = 8;
  cfg.rng_seed = 36;
  std::vector<Bag> a = make_bags(ds, cfg);
  std::vector<Bag> b = make_bags(ds, cfg);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].instance_ids, b[i].instance_ids);
    for (std::size_t c = 0; c < a[i].label.size(); ++c)
      EXPECT_EQ(a[i].label[c], b[i].label[c]);
  }
}

TEST(UnionBags, SymmetricPureBags) {
  Dataset ds = blobs(2, 40, 9);
  std::vector<int> zeros = ds.indices_of_class(0);
  std::vector<int> ones = ds.indices_of_class(1);
  Bag a(std::vector<int>(zeros.begin(), zeros.begin() + 10), ProportionVector({1.0, 0.0}));
  Bag b(std::vector<int>(ones.begin(), ones.begin() + 10), ProportionVector({0.0, 1.0}));
  Bag u = mixbag::union_bags(a, b);
  EXPECT_EQ(u.size(), 20u);
  EXPECT_DOUBLE_EQ(u.label[0], 0.5);
  EXPECT_DOUBLE_EQ(u.label[1], 0.5);
}

TEST(UnionBags, IdenticalLabelsKeepProportion) {
  Dataset ds = blobs(2, 40, 10);
  std::vector<int> zeros = ds.indices_of_class(0);
  std::vector<int> ones = ds.indices_of_class(1);
  auto make = [&](int offset) {
    std::vector<int> ids(zeros.begin() + offset, zeros.begin() + offset + 3);
    ids.insert(ids.end(), ones.begin() + offset, ones.begin() + offset + 7);
    return Bag(ids, ProportionVector({0.3, 0.7}));
  };
  Bag u = mixbag::union_bags(make(0), make(10));
  EXPECT_DOUBLE_EQ(u.label[0], 0.3);
  EXPECT_DOUBLE_EQ(u.label[1], 0.7);
}

TEST(UnionBags, WeightedMeanOfDifferentSizes) {
  Dataset ds = blobs(2, 60, 11);
  std::vector<int> zeros = ds.indices_of_class(0);
  std::vector<int> ones = ds.indices_of_class(1);
  std::vector<int> ids_a(zeros.begin(), zeros.begin() + 3);
  ids_a.insert(ids_a.end(), ones.begin(), ones.begin() + 7);
  Bag a(ids_a, ProportionVector({0.3, 0.7}));  // size 10
  std::vector<int> ids_b(zeros.begin() + 3, zeros.begin() + 18);
  ids_b.insert(ids_b.end(), ones.begin() + 7, ones.begin() + 22);
  Bag b(ids_b, ProportionVector({0.5, 0.5}));  // size 30
  Bag u = mixbag::union_bags(a, b);
  EXPECT_DOUBLE_EQ(u.label[0], 0.45);
  EXPECT_DOUBLE_EQ(u.label[1], 0.55);
}

// The union label must be the exact histogram of the union.
TEST(UnionBags, LabelEqualsExactHistogram) {
  Dataset ds = blobs(3, 400, 12);
  BagGenConfig cfg;
  cfg.num_bags = 30;
  cfg.bag_size = 12;
  cfg.rng_seed = 37;
  std::vector<Bag> bags = make_bags(ds, cfg);
  for (std::size_t i = 0; i + 1 < bags.size(); i += 2) {
    Bag u = mixbag::union_bags(bags[i], bags[i + 1]);
    ProportionVector hist = realized_histogram(ds, u.instance_ids);
    for (std::size_t c = 0; c < hist.size(); ++c) ASSERT_EQ(u.label[c], hist[c]);
  }
}

TEST(SubBag, FullSizeSubBagKeepsBinomialSigma) {
  Dataset ds = blobs(2, 40, 13);
  std::vector<int> zeros = ds.indices_of_class(0);
  std::vector<int> ones = ds.indices_of_class(1);
  std::vector<int> ids(zeros.begin(), zeros.begin() + 5);
  ids.insert(ids.end(), ones.begin(), ones.begin() + 5);
  Bag a(ids, ProportionVector({0.5, 0.5}));
  Rng rng(41);
  auto [sb, label] = mixbag::sub_bag(a, static_cast<int>(a.size()), rng, 1.96);
  EXPECT_EQ(sb.size(), a.size());
  // the binomial sigma does not vanish at full sampling
  EXPECT_NEAR(label.sigma[0], std::sqrt(0.25 / 10.0), 1e-12);
  EXPECT_EQ(label.gamma, 1.0);
  EXPECT_EQ(label.alpha, 1.96);
}

TEST(SubBag, SigmaTenthAtQuarterVarianceN25) {
  Dataset ds = blobs(2, 60, 14);
  std::vector<int> zeros = ds.indices_of_class(0);
  std::vector<int> ones = ds.indices_of_class(1);
  std::vector<int> ids(zeros.begin(), zeros.begin() + 25);
  ids.insert(ids.end(), ones.begin(), ones.begin() + 25);
  Bag a(ids, ProportionVector({0.5, 0.5}));
  Rng rng(42);
  auto [sb, label] = mixbag::sub_bag(a, 25, rng);
  EXPECT_EQ(sb.size(), 25u);
  EXPECT_NEAR(label.sigma[0], 0.1, 1e-12);
  EXPECT_NEAR(label.sigma[1], 0.1, 1e-12);
}

TEST(SubBag, ZeroProbabilityClassStaysEmpty) {
  Dataset ds = blobs(3, 40, 15);
  std::vector<int> zeros = ds.indices_of_class(0);
  std::vector<int> ones = ds.indices_of_class(1);
  std::vector<int> ids(zeros.begin(), zeros.begin() + 6);
  ids.insert(ids.end(), ones.begin(), ones.begin() + 6);
  Bag a(ids, ProportionVector({0.5, 0.5, 0.0}));
  Rng rng(43);
  auto [sb, label] = mixbag::sub_bag(a, 5, rng);
  EXPECT_EQ(label.sigma[2], 0.0);
  for (int id : sb.instance_ids) ASSERT_NE(ds.instances[id].true_class, 2);
}

TEST(SubBag, RejectsBadSize) {
  Dataset ds = blobs(2, 10, 16);
  Bag a(std::vector<int>{0, 1}, ProportionVector({1.0, 0.0}));
  Rng rng(44);
  EXPECT_THROW(mixbag::sub_bag(a, 0, rng), std::invalid_argument);
  EXPECT_THROW(mixbag::sub_bag(a, 3, rng), std::invalid_argument);
}

TEST(Bag, RejectsEmptyAndDuplicates) {
  EXPECT_THROW(Bag({}, ProportionVector({1.0, 0.0})), std::invalid_argument);
  EXPECT_THROW(Bag({1, 2, 1}, ProportionVector({1.0, 0.0})), std::invalid_argument);
}

TEST(BagGenConfig, Validation) {
  BagGenConfig cfg;
  cfg.num_bags = 0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = BagGenConfig{};
  cfg.bag_size = 0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = BagGenConfig{};
  cfg.proportion_std = 0.0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}
