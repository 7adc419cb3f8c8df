#include <atomic>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

#include "surpmark/parallel.hpp"
#include "surpmark/rng.hpp"

using namespace surpmark;

TEST(SplitMix, MatchesReferenceOutputsForSeedZero) {
  // Published reference values of SplitMix64 started from state 0.
  std::uint64_t state = 0;
  EXPECT_EQ(splitmix64(state), 0xE220A8397B1DCDAFULL);
  EXPECT_EQ(splitmix64(state), 0x6E789E6AA1B965F4ULL);
  EXPECT_EQ(splitmix64(state), 0x06C45D188009454FULL);
}

TEST(Xoshiro, SameSeedSameStream) {
  Xoshiro256 a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a();
    EXPECT_EQ(x, b());
    differs = differs || x != c();
  }
  EXPECT_TRUE(differs);
}

TEST(Xoshiro, StreamsAreDistinctPerIndex) {
  Xoshiro256 s0 = Xoshiro256::stream(7, 0);
  Xoshiro256 s1 = Xoshiro256::stream(7, 1);
  Xoshiro256 s0_again = Xoshiro256::stream(7, 0);
  const auto first = s0();
  EXPECT_NE(first, s1());
  EXPECT_EQ(first, s0_again());
}

TEST(Xoshiro, UniformMomentsAndRange) {
  Xoshiro256 rng(1);
  const int n = 200000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
    sum2 += u * u;
  }
  const double mean = sum / n;
  // Uniform(0,1): mean 1/2, variance 1/12; 5 standard errors.
  EXPECT_NEAR(mean, 0.5, 5.0 * std::sqrt(1.0 / 12.0 / n));
  EXPECT_NEAR(sum2 / n - mean * mean, 1.0 / 12.0, 2e-3);
}

TEST(Xoshiro, NormalMoments) {
  Xoshiro256 rng(2);
  const int n = 200000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    sum += z;
    sum2 += z * z;
  }
  EXPECT_NEAR(sum / n, 0.0, 5.0 / std::sqrt(n));
  EXPECT_NEAR(sum2 / n, 1.0, 5.0 * std::sqrt(2.0 / n));
}

TEST(Xoshiro, BelowIsInRangeAndRoughlyUniform) {
  Xoshiro256 rng(3);
  std::vector<int> hist(7, 0);
  const int n = 70000;
  for (int i = 0; i < n; ++i) {
    const auto v = rng.below(7);
    ASSERT_LT(v, 7u);
    ++hist[v];
  }
  double chi2 = 0.0;
  for (int h : hist) chi2 += (h - n / 7.0) * (h - n / 7.0) / (n / 7.0);
  EXPECT_LT(chi2, 22.46);  // chi-square(6) 0.999 quantile
}

TEST(ParallelFor, VisitsEveryIndexOnce) {
  for (std::size_t threads : {1u, 2u, 5u}) {
    std::vector<std::atomic<int>> visits(103);
    parallel_for(visits.size(), threads, [&](std::size_t i) { ++visits[i]; });
    for (const auto& v : visits) EXPECT_EQ(v.load(), 1);
  }
}

TEST(ParallelFor, RethrowsWorkerException) {
  EXPECT_THROW(parallel_for(10, 3, [](std::size_t i) {
                 if (i == 4) throw std::runtime_error("boom");
               }),
               std::runtime_error);
}

TEST(ThreadCount, HonoursRequestAndEnvironmentCap) {
  ::unsetenv("SURPMARK_THREADS");
  EXPECT_EQ(thread_count(3), 3u);
  EXPECT_GE(thread_count(0), 1u);
  ::setenv("SURPMARK_THREADS", "2", 1);
  EXPECT_EQ(thread_count(8), 2u);
  EXPECT_LE(thread_count(0), 2u);
  ::unsetenv("SURPMARK_THREADS");
}
