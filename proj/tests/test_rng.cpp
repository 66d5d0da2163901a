#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "clustergibbs/rng.hpp"

using namespace clustergibbs;

// Known-answer vectors for Philox4x32-10 from the Random123 distribution.
TEST(Rng, PhiloxKnownAnswers) {
    using C = Philox4x32::Counter;
    EXPECT_EQ(Philox4x32::block({0, 0, 0, 0}, {0, 0}), (C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
    EXPECT_EQ(Philox4x32::block({~0u, ~0u, ~0u, ~0u}, {~0u, ~0u}), (C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
    EXPECT_EQ(Philox4x32::block({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}),
              (C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(Rng, StreamIsAPureFunction) {
    const SampleStream a(42, 7), b(42, 7), c(42, 8), d(43, 7);
    for (std::uint64_t s = 0; s < 50; ++s) {
        EXPECT_EQ(a.uniform(s), b.uniform(s));
        EXPECT_NE(a.uniform(s), c.uniform(s));
        EXPECT_NE(a.uniform(s), d.uniform(s));
    }
    // High words of index and step reach the counter too.
    EXPECT_NE(SampleStream(1, 1).uniform(0), SampleStream(1, 1 + (1ull << 32)).uniform(0));
    EXPECT_NE(SampleStream(1, 0).uniform(1), SampleStream(1, 0).uniform(1 + (1ull << 32)));
}

TEST(Rng, UniformMoments) {
    const SampleStream s(2024, 0);
    constexpr int n = 200000;
    double sum = 0.0, sq = 0.0;
    for (int k = 0; k < n; ++k) {
        const double u = s.uniform(static_cast<std::uint64_t>(k));
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        sum += u;
        sq += u * u;
    }
    // Five standard errors.
    EXPECT_NEAR(sum / n, 0.5, 5.0 * std::sqrt(1.0 / 12.0 / n));
    EXPECT_NEAR(sq / n, 1.0 / 3.0, 5.0 * std::sqrt(4.0 / 45.0 / n));
}

TEST(Rng, Helpers) {
    Random r(5);
    std::set<int> seen;
    for (int k = 0; k < 500; ++k) {
        const int v = r.below(7);
        ASSERT_GE(v, 0);
        ASSERT_LT(v, 7);
        seen.insert(v);
        const auto u = r.unit_vector();
        ASSERT_NEAR(u[0] * u[0] + u[1] * u[1] + u[2] * u[2], 1.0, 1e-12);
    }
    EXPECT_EQ(seen.size(), 7u);
    std::vector<int> v{0, 1, 2, 3, 4, 5};
    r.shuffle(v);
    std::sort(v.begin(), v.end());
    EXPECT_EQ(v, (std::vector<int>{0, 1, 2, 3, 4, 5}));
}
