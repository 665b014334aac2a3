#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "peerlex/stats.hpp"

using namespace peerlex;
using stats::StatsError;

TEST(Descriptives, MeanAndVariance) {
  const std::vector<double> xs{2, 4, 4, 4, 5, 5, 7, 9};
  EXPECT_DOUBLE_EQ(stats::mean(xs), 5.0);
  EXPECT_DOUBLE_EQ(stats::variance(xs), 32.0 / 7.0);
  EXPECT_THROW(stats::mean(std::vector<double>{}), StatsError);
  EXPECT_THROW(stats::variance(std::vector<double>{1.0}), StatsError);
}

TEST(PairedT, DiffsOneTwoThree) {
  const std::vector<double> d{1, 2, 3};
  const auto r = stats::paired_t(d);
  EXPECT_NEAR(r.statistic, 2.0 * std::sqrt(3.0), 1e-12);
  EXPECT_EQ(r.df, 2.0);
  EXPECT_EQ(r.n, 3u);
  EXPECT_NEAR(r.p_value, oracle::t_two_sided_by_quadrature(r.statistic, 2), 1e-9);
}

TEST(PairedT, ZeroAndConstantDiffs) {
  const auto r = stats::paired_t(std::vector<double>{0, 0, 0, 0});
  EXPECT_EQ(r.statistic, 0.0);
  EXPECT_EQ(r.p_value, 1.0);
  try {
    stats::paired_t(std::vector<double>{1, 1, 1});
    FAIL() << "constant non-zero diffs must throw";
  } catch (const StatsError& e) {
    EXPECT_EQ(e.kind(), StatsError::Kind::zero_variance);
  }
  EXPECT_THROW(stats::paired_t(std::vector<double>{1.0}), StatsError);
}

TEST(PairedT, SignFollowsMeanDifference) {
  EXPECT_LT(stats::paired_t(std::vector<double>{-1, -2, -0.5}).statistic, 0.0);
}

TEST(CohensD, PooledFormula) {
  const std::vector<double> a{2, 4, 6};
  const std::vector<double> b{1, 2, 3};
  // var a = 4, var b = 1, pooled = (2*4 + 2*1) / 4 = 2.5
  EXPECT_NEAR(stats::cohens_d(a, b), 2.0 / std::sqrt(2.5), 1e-15);
  EXPECT_DOUBLE_EQ(stats::cohens_d(a, a), 0.0);
  EXPECT_THROW(stats::cohens_d(std::vector<double>{1, 1}, std::vector<double>{1, 1}), StatsError);
}

TEST(CohensD, PairedVariant) {
  const std::vector<double> a{3, 5, 8};
  const std::vector<double> b{1, 2, 4};
  // diffs 2, 3, 4: mean 3, sd 1
  EXPECT_NEAR(stats::cohens_dz(a, b), 3.0, 1e-15);
}

TEST(KolmogorovSmirnov, SimpleStatistic) {
  EXPECT_DOUBLE_EQ(stats::ks_statistic(std::vector<double>{1, 2, 3}, std::vector<double>{4, 5, 6}), 1.0);
  EXPECT_DOUBLE_EQ(stats::ks_statistic(std::vector<double>{1, 2}, std::vector<double>{1, 2}), 0.0);
  EXPECT_DOUBLE_EQ(stats::ks_statistic(std::vector<double>{1, 2, 3, 4}, std::vector<double>{3, 4, 5, 6}), 0.5);
}

// Every pair of multisets over {1..8} with total size <= 8.
TEST(KolmogorovSmirnov, ExhaustiveAgainstEcdfEnumeration) {
  std::size_t cases = 0;
  for (int na = 1; na <= 7; ++na)
    for (int nb = 1; na + nb <= 8; ++nb)
      oracle::multisets(na, 1, 8, [&](const std::vector<double>& a) {
        oracle::multisets(nb, 1, 8, [&](const std::vector<double>& b) {
          ASSERT_EQ(stats::ks_statistic(a, b), oracle::ks_by_enumeration(a, b));
          ++cases;
        });
      });
  EXPECT_GT(cases, 100000u);
}

TEST(KolmogorovSmirnov, AsymptoticPValue) {
  const std::vector<double> a{1, 2, 3, 4, 5};
  const std::vector<double> b{3, 4, 5, 6, 7, 8};
  const auto r = stats::ks_two_sample(a, b);
  const double ne = 5.0 * 6.0 / 11.0;
  EXPECT_DOUBLE_EQ(r.p_value, stats::special::kolmogorov_sf(std::sqrt(ne) * r.statistic));
  EXPECT_THROW(stats::ks_two_sample(std::vector<double>{}, b), StatsError);
}

TEST(Bonferroni, MultipliesAndCaps) {
  const auto adj = stats::bonferroni(std::vector<double>{0.01, 0.6, 0.0}, 2);
  EXPECT_DOUBLE_EQ(adj[0], 0.02);
  EXPECT_DOUBLE_EQ(adj[1], 1.0);
  EXPECT_DOUBLE_EQ(adj[2], 0.0);
  EXPECT_THROW(stats::bonferroni(std::vector<double>{0.1}, 0), StatsError);
  EXPECT_THROW(stats::bonferroni(std::vector<double>{1.2}, 1), StatsError);
}

TEST(MidRanks, TiesShareAverage) {
  const auto r = stats::mid_ranks(std::vector<double>{10, 20, 20, 5, 20});
  EXPECT_EQ(r, (std::vector<double>{2, 4, 4, 1, 4}));
}

TEST(KruskalWallis, UntiedTextbookCase) {
  const auto r = stats::kruskal_wallis({{1, 2, 3}, {4, 5, 6}, {7, 8, 9}});
  EXPECT_EQ(r.statistic, 7.2);
  EXPECT_EQ(r.df, 2.0);
  EXPECT_NEAR(r.p_value, 0.027323722447292555, 1e-12);
}

TEST(KruskalWallis, TiedCasesMatchRankEnumeration) {
  const std::vector<std::vector<std::vector<double>>> cases = {
      {{1, 2, 2}, {2, 3, 4}, {4, 4, 5}},
      {{1, 1, 1, 2}, {2, 2, 3, 3, 3}},
      {{5, 5}, {5, 6}, {6, 6, 7}, {1, 5}},
      {{0.5, 0.5, 1.5}, {1.5, 2.5}, {0.5, 2.5, 2.5, 9}},
  };
  for (const auto& g : cases)
    EXPECT_NEAR(stats::kruskal_wallis(g).statistic, oracle::kruskal_wallis_by_ranks(g), 1e-9);
}

TEST(KruskalWallis, RandomSmallGroups) {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> value(1, 4);
  std::uniform_int_distribution<int> size(1, 3);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<std::vector<double>> groups(3);
    for (auto& g : groups) {
      const int n = size(rng);
      for (int i = 0; i < n; ++i) g.push_back(value(rng));
    }
    bool all_tied = true;
    for (const auto& g : groups)
      for (double v : g) all_tied = all_tied && v == groups[0][0];
    if (all_tied) {
      EXPECT_THROW(stats::kruskal_wallis(groups), StatsError);
      continue;
    }
    EXPECT_NEAR(stats::kruskal_wallis(groups).statistic, oracle::kruskal_wallis_by_ranks(groups), 1e-9);
  }
}

TEST(KruskalWallis, Degenerate) {
  EXPECT_THROW(stats::kruskal_wallis({{1, 2}}), StatsError);
  EXPECT_THROW(stats::kruskal_wallis({{1, 2}, {}}), StatsError);
  try {
    stats::kruskal_wallis({{3, 3}, {3}});
    FAIL();
  } catch (const StatsError& e) {
    EXPECT_EQ(e.kind(), StatsError::Kind::degenerate);
  }
}

TEST(CompareMetric, SelfComparisonIsNull) {
  std::vector<PairedObservation> obs;
  for (int i = 0; i < 6; ++i) obs.push_back({"p" + std::to_string(i), "m", 1.0 + i, 1.0 + i});
  const auto c = stats::compare_metric(obs);
  ASSERT_TRUE(c.cohens_d && c.t && c.ks);
  EXPECT_EQ(*c.cohens_d, 0.0);
  EXPECT_EQ(c.t->statistic, 0.0);
  EXPECT_EQ(c.t->p_value, 1.0);
  EXPECT_EQ(c.ks->statistic, 0.0);
}

TEST(CompareMetric, TooFewPairs) {
  const auto c = stats::compare_metric({{"p", "m", 1.0, 2.0}});
  EXPECT_FALSE(c.cohens_d || c.t || c.ks);
  EXPECT_FALSE(c.notes.empty());
}
