#include <gtest/gtest.h>

#include <cmath>

#include "dsts/error.hpp"
#include "dsts/synthgaze.hpp"

namespace dsts {
namespace {

GenConfig config(std::size_t n, double s, std::uint64_t seed) {
  GenConfig g;
  g.n_samples = n;
  g.separation = s;
  g.seed = seed;
  return g;
}

TEST(Synth, ExactClassCounts) {
  const Dataset ds = generate(config(100, 0.8, 1));
  EXPECT_EQ(ds.class_counts(), (std::vector<std::size_t>{30, 70}));
  EXPECT_EQ(ds.d, kGazeFeatures);
  GenConfig g = config(7, 0.5, 1);
  g.imbalance = 0.5;
  EXPECT_EQ(generate(g).class_counts()[kLabelASD], 4u);  // round half away from zero
}

TEST(Synth, FeatureRanges) {
  const Dataset ds = generate(config(60, 1.0, 2));
  for (const auto& s : ds.samples) {
    ASSERT_EQ(s.seq.shape(), (Shape{128, 4}));
    for (std::size_t t = 0; t < 128; ++t) {
      EXPECT_GE(s.seq.at({t, 0}), 0.0);
      EXPECT_LE(s.seq.at({t, 0}), 1.0);
      EXPECT_GE(s.seq.at({t, 1}), 0.0);
      EXPECT_LE(s.seq.at({t, 1}), 1.0);
      EXPECT_GE(s.seq.at({t, 2}), 0.0);
      const double flag = s.seq.at({t, 3});
      EXPECT_TRUE(flag == 0.0 || flag == 1.0);
    }
    EXPECT_EQ(s.seq.at({0, 2}), 0.0);
  }
}

TEST(Synth, SpeedIsDisplacement) {
  const Dataset ds = generate(config(5, 0.5, 3));
  for (const auto& s : ds.samples) {
    for (std::size_t t = 1; t < s.length(); ++t) {
      const double dx = s.seq.at({t, 0}) - s.seq.at({t - 1, 0});
      const double dy = s.seq.at({t, 1}) - s.seq.at({t - 1, 1});
      EXPECT_NEAR(s.seq.at({t, 2}), std::hypot(dx, dy), 1e-15);
    }
  }
}

TEST(Synth, DeterministicAndThreadIndependent) {
  const GenConfig g = config(50, 0.6, 4);
  const Dataset a = generate(g);
  const Dataset b = generate(g);
  const Dataset c = generate(g, 4);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a.samples[i].id, b.samples[i].id);
    EXPECT_EQ(a.samples[i].seq, b.samples[i].seq);
    EXPECT_EQ(a.samples[i].seq, c.samples[i].seq);
    EXPECT_EQ(a.samples[i].label, c.samples[i].label);
  }
  const Dataset other = generate(config(50, 0.6, 5));
  EXPECT_NE(a.samples[0].seq, other.samples[0].seq);
}

TEST(Synth, SocialDwellGapAtFullSeparation) {
  const GenConfig g = config(300, 1.0, 6);
  const Dataset ds = generate(g);
  double td = 0.0, asd = 0.0;
  std::size_t n_td = 0, n_asd = 0;
  for (const auto& s : ds.samples) {
    const double f = social_dwell_fraction(s, g);
    if (s.label == kLabelTD) {
      td += f;
      ++n_td;
    } else {
      asd += f;
      ++n_asd;
    }
  }
  EXPECT_GE(td / n_td - asd / n_asd, 0.3);
}

TEST(Synth, FixationsDominate) {
  const Dataset ds = generate(config(100, 0.5, 7));
  for (const auto& s : ds.samples) {
    double flag = 0.0;
    for (std::size_t t = 0; t < s.length(); ++t) flag += s.seq.at({t, 3});
    flag /= static_cast<double>(s.length());
    EXPECT_GT(flag, 0.5);
    EXPECT_LE(flag, 1.0);
  }
}

TEST(Synth, ZeroSeparationMakesClassesIdentical) {
  const GenConfig g = config(10, 0.0, 1);
  EXPECT_EQ(social_probability(g, kLabelTD), social_probability(g, kLabelASD));
  EXPECT_EQ(duration_mean(g, kLabelTD), duration_mean(g, kLabelASD));
  const GenConfig full = config(10, 1.0, 1);
  EXPECT_NEAR(social_probability(full, kLabelTD), 0.8, 1e-15);
  EXPECT_NEAR(social_probability(full, kLabelASD), 0.2, 1e-15);
  EXPECT_EQ(duration_mean(full, kLabelTD), 12.0);
  EXPECT_EQ(duration_mean(full, kLabelASD), 18.0);
}

TEST(Synth, InvalidConfig) {
  GenConfig g = config(10, 1.5, 1);
  EXPECT_THROW(generate(g), ConfigError);
  g = config(10, 0.5, 1);
  g.social_roi.radius = 0.5;
  EXPECT_THROW(generate(g), ConfigError);
  g = config(10, 0.5, 1);
  g.imbalance = -0.1;
  EXPECT_THROW(generate(g), ConfigError);
}

TEST(Disc, Contains) {
  const Disc d{0.3, 0.3, 0.12};
  EXPECT_TRUE(d.contains(0.3, 0.3));
  EXPECT_TRUE(d.contains(0.42, 0.3));
  EXPECT_FALSE(d.contains(0.43, 0.3));
}

}  // namespace
}  // namespace dsts
