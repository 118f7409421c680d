#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <vector>

#include "progeny/numerics/summation.hpp"
#include "progeny/rng.hpp"

using namespace progeny::random;

TEST(Rng, SplitMixReferenceVector) {
  SplitMix64 sm(1234567);
  const std::uint64_t expected[] = {6457827717110365317ULL, 3203168211198807973ULL, 9817491932198370423ULL,
                                    4593380528125082431ULL, 16408922859458223821ULL};
  for (auto e : expected) EXPECT_EQ(sm(), e);
}

TEST(Rng, XoshiroReferenceVector) {
  auto g = Xoshiro256::from_state({1, 2, 3, 4});
  const std::uint64_t expected[] = {11520ULL, 0ULL, 1509978240ULL, 1215971899390074240ULL};
  for (auto e : expected) EXPECT_EQ(g(), e);
}

TEST(Rng, StreamsAreReproducibleAndDistinct) {
  auto a = Xoshiro256::for_stream(42, 7);
  auto b = Xoshiro256::for_stream(42, 7);
  for (int i = 0; i < 100; ++i) ASSERT_EQ(a(), b());
  std::set<std::uint64_t> firsts;
  for (std::uint64_t i = 0; i < 1000; ++i) firsts.insert(Xoshiro256::for_stream(42, i)());
  for (std::uint64_t m = 0; m < 1000; ++m) firsts.insert(Xoshiro256::for_stream(m, 0)());
  EXPECT_GE(firsts.size(), 1999u);
}

TEST(Rng, UniformRanges) {
  auto g = Xoshiro256::for_stream(1, 0);
  for (int i = 0; i < 100000; ++i) {
    const double u = g.uniform();
    const double v = g.uniform_pos();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    ASSERT_GT(v, 0.0);
    ASSERT_LE(v, 1.0);
  }
}

TEST(Rng, ExponentialMoments) {
  auto g = Xoshiro256::for_stream(99, 3);
  const double rate = 2.5;
  std::vector<double> xs(200000);
  for (auto& x : xs) x = g.exponential(rate);
  const auto ms = progeny::numerics::mean_and_se(xs);
  EXPECT_NEAR(ms.mean, 1.0 / rate, 4.0 * ms.se);
  // Standard error of an exponential sample mean is mean / sqrt(n).
  EXPECT_NEAR(ms.se, (1.0 / rate) / std::sqrt(static_cast<double>(xs.size())), 0.02 * ms.se);
}

TEST(Rng, BernoulliFrequency) {
  auto g = Xoshiro256::for_stream(5, 5);
  const int n = 100000;
  int hits = 0;
  for (int i = 0; i < n; ++i) hits += g.bernoulli(0.3) ? 1 : 0;
  const double se = std::sqrt(0.3 * 0.7 / n);
  EXPECT_NEAR(hits / static_cast<double>(n), 0.3, 4.0 * se);
}
