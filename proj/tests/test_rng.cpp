#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "mincam/rng.hpp"

using namespace mincam;

TEST(Rng, KeyedStreamsAreDeterministic) {
    Rng a = Rng::keyed(42, "data", 7);
    Rng b = Rng::keyed(42, "data", 7);
    for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
}

TEST(Rng, DistinctKeysDecorrelate) {
    EXPECT_NE(Rng::keyed(42, "data", 0).next_u64(), Rng::keyed(42, "data", 1).next_u64());
    EXPECT_NE(Rng::keyed(42, "data", 0).next_u64(), Rng::keyed(42, "noise", 0).next_u64());
    EXPECT_NE(Rng::keyed(42, "data", 0).next_u64(), Rng::keyed(43, "data", 0).next_u64());
}

TEST(Rng, UnitRange) {
    Rng r = Rng::keyed(1, "unit");
    for (int i = 0; i < 10000; ++i) {
        double u = r.next_unit();
        EXPECT_GE(u, 0.0);
        EXPECT_LT(u, 1.0);
    }
}

TEST(Rng, BelowIsInRangeAndRoughlyUniform) {
    Rng r = Rng::keyed(3, "below");
    std::vector<int> counts(11, 0);
    const int n = 110000;
    for (int i = 0; i < n; ++i) counts[r.below(11)]++;
    for (int c : counts) {
        EXPECT_GT(c, 9000);
        EXPECT_LT(c, 11000);
    }
}

TEST(Rng, NormalMoments) {
    Rng r = Rng::keyed(5, "normal");
    const int n = 100000;
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < n; ++i) {
        double x = r.normal(2.0, 3.0);
        sum += x;
        sq += x * x;
    }
    const double mean = sum / n;
    const double var = sq / n - mean * mean;
    EXPECT_NEAR(mean, 2.0, 5.0 * 3.0 / std::sqrt(n));
    EXPECT_NEAR(var, 9.0, 5.0 * 9.0 * std::sqrt(2.0 / n));
}

TEST(Rng, DeriveSeedStable) {
    EXPECT_EQ(Rng::derive_seed(9, "train-noise"), Rng::derive_seed(9, "train-noise"));
    EXPECT_NE(Rng::derive_seed(9, "train-noise"), Rng::derive_seed(9, "eval-noise"));
}
