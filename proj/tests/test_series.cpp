#include <gtest/gtest.h>

#include <cmath>

#include "clustergibbs/rng.hpp"
#include "clustergibbs/series.hpp"

using namespace clustergibbs;

TEST(Series, ExponentBoxIndexing) {
    const ExponentBox box({2, 1, 3}, 4);
    EXPECT_EQ(box.size(), 3u * 2u * 4u);
    const int u[] = {1, 1, 2};
    const std::size_t idx = box.index_of(u);
    EXPECT_EQ(box.digit(idx, 0), 1);
    EXPECT_EQ(box.digit(idx, 2), 2);
    EXPECT_EQ(box.degree(idx), 4);
    EXPECT_TRUE(box.kept(idx));
    const int v[] = {2, 1, 3};
    EXPECT_FALSE(box.kept(box.index_of(v)));
    std::size_t divisors = 0;
    box.for_each_divisor(idx, [&](std::size_t a, std::size_t b) {
        for (std::size_t k = 0; k < 3; ++k) EXPECT_EQ(box.digit(a, k) + box.digit(b, k), box.digit(idx, k));
        ++divisors;
    });
    EXPECT_EQ(divisors, 2u * 2u * 3u);
    EXPECT_THROW(ExponentBox(std::vector<int>(17, 1), 3), PreconditionError);
}

TEST(Series, UnivariateLogOfExp) {
    // log(e^{x}) = x, truncated: start from the exponential series.
    const ExponentBox box({8}, 8);
    BoxSeries<double> s(box);
    double f = 1.0;
    for (int n = 0; n <= 8; ++n) {
        if (n) f *= n;
        s[static_cast<std::size_t>(n)] = 1.0 / f;
    }
    const auto l = log(s);
    EXPECT_NEAR(l[0], 0.0, 1e-15);
    EXPECT_NEAR(l[1], 1.0, 1e-15);
    for (std::size_t n = 2; n <= 8; ++n) EXPECT_NEAR(l[n], 0.0, 1e-14);
}

TEST(Series, LogOfOnePlusX) {
    const ExponentBox box({7}, 7);
    BoxSeries<double> s(box);
    s[0] = 1.0;
    s[1] = 1.0;
    const auto l = log(s);
    for (int n = 1; n <= 7; ++n) EXPECT_NEAR(l[static_cast<std::size_t>(n)], (n % 2 ? 1.0 : -1.0) / n, 1e-15);
}

TEST(Series, ExpInvertsLogMultivariate) {
    Random rng(31);
    const ExponentBox box({3, 2, 2, 1}, 5);
    BoxSeries<double> s(box);
    for (std::size_t u = 0; u < box.size(); ++u)
        if (box.kept(u)) s[u] = rng.between(-1.0, 1.0);
    s[0] = 1.7;
    const auto back = exp(log(s));
    for (std::size_t u = 0; u < box.size(); ++u)
        if (box.kept(u)) {
            ASSERT_NEAR(back[u], s[u], 1e-12);
        }
}

TEST(Series, LogOfProductIsSum) {
    Random rng(32);
    const ExponentBox box({2, 2, 2}, 4);
    BoxSeries<double> a(box), b(box);
    for (std::size_t u = 0; u < box.size(); ++u)
        if (box.kept(u)) {
            a[u] = rng.between(-0.5, 0.5);
            b[u] = rng.between(-0.5, 0.5);
        }
    a[0] = 1.0;
    b[0] = 2.0;
    const auto lab = log(a * b), la = log(a), lb = log(b);
    for (std::size_t u = 0; u < box.size(); ++u)
        if (box.kept(u)) {
            ASSERT_NEAR(lab[u], la[u] + lb[u], 1e-12);
        }
}

TEST(Series, JetLogCarriesFirstDerivative) {
    // f(k) = 2 + 3k + O(k^2) constant term; d/dk log f at 0 is 3/2.
    const ExponentBox box({2}, 2);
    BoxSeries<KappaJet> s(box);
    s[0] = {2.0, 3.0};
    s[1] = {1.0, 0.5};
    s[2] = {0.25, -1.0};
    const auto l = log(s);
    EXPECT_NEAR(l[0].c0, std::log(2.0), 1e-15);
    EXPECT_NEAR(l[0].c1, 1.5, 1e-15);
    // First-order coefficient s1/s0 = (1 + 0.5k)/(2 + 3k) -> derivative (0.5*2 - 3)/4 = -0.5.
    EXPECT_NEAR(l[1].c0, 0.5, 1e-15);
    EXPECT_NEAR(l[1].c1, -0.5, 1e-15);
}

TEST(Series, PairJetMixedDerivative) {
    // log(1 + a + b + c ab) has mixed derivative c - 1 at zero.
    PairJet x{1.0, 1.0, 1.0, 0.3};
    const ExponentBox box({0}, 0);
    BoxSeries<PairJet> s(box);
    s[0] = x;
    const auto l = log(s);
    EXPECT_NEAR(l[0].ci, 1.0, 1e-15);
    EXPECT_NEAR(l[0].cj, 1.0, 1e-15);
    EXPECT_NEAR(l[0].cij, 0.3 - 1.0, 1e-15);
}
