#include <gtest/gtest.h>

#include <random>

#include "bloq/stats.hpp"
#include "../support/oracles.hpp"

using namespace bloq;
using namespace bloq::stats;

TEST(F1, Examples) {
    EXPECT_NEAR(f1({2, 1, 0, 1}), 2.0 / 3.0, 1e-15);
    EXPECT_EQ(f1({0, 0, 5, 0}), 0.0);
    EXPECT_EQ(f1({3, 0, 1, 0}), 1.0);
    EXPECT_EQ(f1({0, 2, 0, 1}), 0.0);
}

TEST(ConfusionCounts, Accumulates) {
    ConfusionCounts c{1, 2, 3, 4};
    c += {1, 1, 1, 1};
    EXPECT_EQ(c, (ConfusionCounts{2, 3, 4, 5}));
    EXPECT_EQ(c.total(), 14U);
}

TEST(Quantile, LinearInterpolation) {
    const std::vector<double> v{4, 1, 3, 2};
    EXPECT_DOUBLE_EQ(quantile(v, 0.25), 1.75);
    EXPECT_DOUBLE_EQ(quantile(v, 0.5), 2.5);
    EXPECT_DOUBLE_EQ(quantile(v, 0.75), 3.25);
    EXPECT_DOUBLE_EQ(quantile(v, 0.0), 1.0);
    EXPECT_DOUBLE_EQ(quantile(v, 1.0), 4.0);
    EXPECT_THROW(quantile({}, 0.5), ValidationError);
    EXPECT_THROW(quantile(v, 1.5), ValidationError);
}

TEST(Summarize, Fields) {
    const auto s = summarize({1, 2, 3, 4});
    EXPECT_EQ(s.count, 4U);
    EXPECT_DOUBLE_EQ(s.mean, 2.5);
    EXPECT_DOUBLE_EQ(s.median, 2.5);
    EXPECT_DOUBLE_EQ(s.iqr, 1.5);
    EXPECT_EQ(mean({0.1, 0.1, 0.1}), 0.1);
}

TEST(MannWhitney, ExactSeparatedSamples) {
    const auto r = mann_whitney_u({1, 2, 3, 4, 5, 6}, {7, 8, 9, 10, 11});
    EXPECT_TRUE(r.exact);
    EXPECT_EQ(r.u, 0.0);
    EXPECT_NEAR(r.p, 0.004329004329004329, 1e-12);
}

TEST(MannWhitney, ExactMatchesEnumerationWithTies) {
    const std::vector<std::pair<std::vector<double>, std::vector<double>>> cases{
        {{1, 2, 2, 3}, {2, 3, 4, 4, 5}},
        {{0.5, 0.5, 0.5}, {0.5, 1.0}},
        {{1, 1, 1, 1}, {1, 1, 1}},
        {{3, 1, 4, 1, 5, 9, 2}, {6, 5, 3, 5, 8}},
    };
    for (const auto& [a, b] : cases) {
        const auto r = mann_whitney_u(a, b);
        EXPECT_TRUE(r.exact);
        EXPECT_NEAR(r.p, oracle::mwu_enumerated_p(a, b), 1e-12);
    }
}

TEST(MannWhitney, AsymptoticReferenceValues) {
    // reference values from an independent implementation (normal
    // approximation with tie and continuity corrections)
    const std::vector<double> a{0.1, 0.4, 0.4, 0.9, 0.3, 0.7, 0.7, 0.2, 0.5, 0.6, 0.8, 0.35, 0.4, 0.95, 0.05};
    const std::vector<double> b{0.3, 0.5, 0.5, 0.55, 0.65, 0.75, 0.85, 0.9, 0.9, 0.99, 0.45, 0.6, 0.7, 0.8, 1.0};
    const auto r = mann_whitney_u(a, b);
    EXPECT_FALSE(r.exact);
    EXPECT_DOUBLE_EQ(r.u, 62.5);
    EXPECT_NEAR(r.p, 0.03963647909401271, 1e-12);

    std::vector<double> c;
    for (int i = 1; i <= 16; ++i) c.push_back(i);
    const std::vector<double> d{3.5, 6.5, 9.5, 12.5, 15.5, 18.5, 21.5, 24.5, 27.5, 30.5};
    const auto s = mann_whitney_u(c, d);
    EXPECT_DOUBLE_EQ(s.u, 35.0);
    EXPECT_NEAR(s.p, 0.019008923318541638, 1e-12);
}

TEST(MannWhitney, ConstantPoolHasUnitP) {
    const auto r = mann_whitney_u(std::vector<double>(20, 1.0), std::vector<double>(20, 1.0));
    EXPECT_EQ(r.p, 1.0);
    EXPECT_THROW(mann_whitney_u({}, {1.0}), ValidationError);
}

TEST(VarghaDelaney, TrivialCases) {
    EXPECT_EQ(vargha_delaney({1, 2, 3}, {1, 2, 3}).a12, 0.5);
    EXPECT_EQ(vargha_delaney({4, 5}, {1, 2, 3}).a12, 1.0);
    EXPECT_EQ(vargha_delaney({1, 2}, {4, 5}).a12, 0.0);
    EXPECT_EQ(vargha_delaney({4, 5}, {1, 2, 3}).magnitude, Magnitude::L);
    EXPECT_EQ(vargha_delaney({1}, {1}).magnitude, Magnitude::N);
    EXPECT_THROW(vargha_delaney({}, {1}), ValidationError);
}

TEST(VarghaDelaney, MagnitudeBoundaries) {
    EXPECT_EQ(magnitude_of_scaled(0.1469), Magnitude::N);
    EXPECT_EQ(magnitude_of_scaled(0.147), Magnitude::S);
    EXPECT_EQ(magnitude_of_scaled(0.33), Magnitude::S);
    EXPECT_EQ(magnitude_of_scaled(0.3301), Magnitude::M);
    EXPECT_EQ(magnitude_of_scaled(0.4739), Magnitude::M);
    EXPECT_EQ(magnitude_of_scaled(0.474), Magnitude::L);
    EXPECT_EQ(magnitude_of_scaled(-0.5), Magnitude::L);
    EXPECT_EQ(to_string(Magnitude::M), "M");
}

TEST(Bootstrap, ConstantVectorIsDegenerate) {
    const auto ci = bootstrap_ci(std::vector<double>(50, 0.7), 0.99, 2000, 3);
    EXPECT_EQ(ci.lo, 0.7);
    EXPECT_EQ(ci.hi, 0.7);
    EXPECT_EQ(ci.half_width(), 0.0);
}

TEST(Bootstrap, CoversMeanAndIsSeeded) {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0, 1);
    std::vector<double> v(200);
    for (auto& x : v) x = u(rng);
    const auto ci = bootstrap_ci(v, 0.99, 4000, 1);
    EXPECT_LT(ci.lo, mean(v));
    EXPECT_GT(ci.hi, mean(v));
    EXPECT_LT(ci.half_width(), 0.1);
    const auto again = bootstrap_ci(v, 0.99, 4000, 1);
    EXPECT_EQ(ci.lo, again.lo);
    EXPECT_EQ(ci.hi, again.hi);
    EXPECT_THROW(bootstrap_ci({}, 0.99), ValidationError);
    EXPECT_THROW(bootstrap_ci(v, 1.0), ValidationError);
}

TEST(Compare, Significance) {
    const std::vector<double> hi(30, 1.0), lo(30, 0.0);
    const auto c = compare(hi, lo);
    EXPECT_TRUE(c.significant);
    EXPECT_EQ(c.effect.magnitude, Magnitude::L);
    EXPECT_FALSE(compare(hi, hi).significant);
}
