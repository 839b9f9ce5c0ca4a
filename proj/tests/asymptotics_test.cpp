#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "bootgrid/asymptotics.hpp"

using namespace bootgrid;

namespace {
// Term-by-term log of the stage product, compensated summation.
long double loop_log_product(double p, double first, double last) {
    const long double factor = std::log(8.0L * p / (3.0L * std::numbers::e_v<long double>));
    long double sum = 0, carry = 0;
    for (double n = first; n <= last; n += 1.0) {
        const long double y = factor + 3.0L * n * p - carry;
        const long double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    return sum;
}
}  // namespace

TEST(AnisotropicConstant, KnownValues) {
    EXPECT_EQ(anisotropic_constant_exact(2), (Fraction{1, 6}));
    EXPECT_EQ(anisotropic_constant_exact(3), (Fraction{1, 2}));
    EXPECT_EQ(anisotropic_constant_exact(1), (Fraction{0, 1}));
    EXPECT_EQ(anisotropic_constant_exact(5), (Fraction{4, 3}));
    EXPECT_EQ(anisotropic_constant(2), 1.0 / 6.0);
    EXPECT_THROW(anisotropic_constant(0), std::domain_error);
}

TEST(StrategyRange, EmptyAndNonempty) {
    const auto coarse = strategy_range(0.1);
    EXPECT_TRUE(coarse.empty());
    EXPECT_NEAR(coarse.n0, 20 * std::log(std::log(10.0)), 1e-12);
    EXPECT_NEAR(coarse.nf, std::log(10.0) / 0.3, 1e-12);
    EXPECT_EQ(coarse.stage_count(), 0);
    const auto fine = strategy_range(1e-10);
    EXPECT_FALSE(fine.empty());
    EXPECT_GT(fine.stage_count(), 1e9);
}

TEST(StrategyRange, DomainEdges) {
    EXPECT_THROW(strategy_range(std::exp(-1.0)), std::domain_error);
    EXPECT_THROW(strategy_range(0.5), std::domain_error);
    EXPECT_THROW(strategy_range(0.0), std::domain_error);
    EXPECT_GT(strategy_range(0.36).n0, 0.0);
}

TEST(NucleationSum, SingleStage) {
    for (double p : {1e-2, 1e-5, 1e-9})
        for (double n : {1.0, 17.0, 12345.0}) {
            const double expected = std::log(8 * p / (3 * std::numbers::e)) + 3 * n * p;
            EXPECT_NEAR(stage_log_product(p, n, n), expected, 1e-12 * std::max(1.0, std::abs(expected)));
        }
    EXPECT_THROW(stage_log_product(1e-3, 5, 4), std::domain_error);
}

TEST(NucleationSum, SeriesMatchesLoop) {
    // Largest p with a nonempty range is about 4e-8; this range has ~2e6 stages.
    const double p = 3e-8;
    const auto r = strategy_range(p);
    ASSERT_FALSE(r.empty());
    ASSERT_LT(r.stage_count(), 1e7);
    const long double loop = loop_log_product(p, r.first, r.last);
    EXPECT_NEAR(nucleation_log_prob_sum(p), static_cast<double>(loop), 1e-9 * std::abs(static_cast<double>(loop)));
    for (double q : {1e-3, 1e-5}) {
        const double first = 10, last = 1000 + std::floor(1 / q);
        const long double l = loop_log_product(q, first, last);
        EXPECT_NEAR(stage_log_product(q, first, last), static_cast<double>(l), 1e-9 * std::abs(static_cast<double>(l)));
    }
}

TEST(NucleationSum, EmptyRangeIsAnError) {
    EXPECT_THROW(nucleation_log_prob_sum(1e-6), std::domain_error);
    EXPECT_THROW(nucleation_log_prob_sum(1e-4), std::domain_error);
}

TEST(NucleationClosed, TermsAtOneInMillion) {
    const double p = 1e-6, L = 6 * std::log(10.0);
    const auto t = nucleation_log_prob_closed(p);
    EXPECT_NEAR(t.leading, -1e6 * L * L / 6, 1e-6);
    EXPECT_NEAR(t.second, std::log(8 / (3 * std::numbers::e)) / 3 * 1e6 * L, 1e-6);
    EXPECT_DOUBLE_EQ(t.total(), t.leading + t.second);
}

TEST(NucleationClosed, NegativeBelowOnePercent) {
    for (double p = 1e-2; p > 1e-300; p /= 7) EXPECT_LT(nucleation_log_prob_closed(p).total(), 0.0) << p;
}

TEST(CriticalVolume, Arithmetic) {
    const auto unit = ScalingModel::custom(1.0, 0.0);
    EXPECT_NEAR(critical_log_volume(unit, std::exp(-10.0)), 100 * std::exp(10.0), 1e-8);
    const auto one_two = ScalingModel::for_family(RuleFamily::one_two());
    for (double p : {1e-3, 1e-7}) {
        const double v = critical_log_volume(one_two, p);
        EXPECT_NEAR(v, -nucleation_log_prob_closed(p).total(), 1e-12 * v);
    }
    EXPECT_THROW(critical_log_volume(unit, 0.2), std::domain_error);
    EXPECT_THROW(critical_log_volume(unit, 0.0), std::domain_error);
}

TEST(ScalingModel, FamilyConstants) {
    const auto m12 = ScalingModel::for_family(RuleFamily::one_two());
    EXPECT_EQ(m12.C, 1.0 / 6.0);
    EXPECT_NEAR(m12.Cprime, std::log(3 * std::numbers::e / 8) / 3, 1e-15);
    const auto b2 = ScalingModel::for_family(RuleFamily::one_b(2));
    EXPECT_EQ(b2.C, m12.C);
    EXPECT_EQ(b2.Cprime, m12.Cprime);
    EXPECT_EQ(ScalingModel::for_family(RuleFamily::one_b(4)).C, 0.9);
    EXPECT_EQ(ScalingModel::for_family(RuleFamily::standard(2), 0.3).C, 0.3);
    EXPECT_THROW(ScalingModel::for_family(RuleFamily::duarte()), unsupported_error);
    EXPECT_THROW(ScalingModel::for_family(RuleFamily::abc(1, 1, 2)), unsupported_error);
    EXPECT_THROW(ScalingModel::for_family(RuleFamily::one_b(1)), std::domain_error);
    EXPECT_THROW(ScalingModel::custom(-1.0, 0.0), std::domain_error);
}

TEST(LeadingPc, Laws) {
    const double lnV = std::exp(10.0);
    const auto m12 = ScalingModel::for_family(RuleFamily::one_two());
    EXPECT_NEAR(leading_pc(m12, lnV), 100.0 / 6.0 / lnV, 1e-15);
    const auto m13 = ScalingModel::for_family(RuleFamily::one_b(3));
    EXPECT_NEAR(leading_pc(m13, lnV) / leading_pc(m12, lnV), 3.0, 1e-12);
    EXPECT_NEAR(leading_pc(ScalingModel::for_family(RuleFamily::standard(2)), 1e6), 1e-6, 1e-20);
    EXPECT_NEAR(leading_pc(ScalingModel::for_family(RuleFamily::standard(3)), lnV), 0.1, 1e-15);
    EXPECT_THROW(leading_pc(m12, 2.0), std::domain_error);
}

TEST(EpsilonWindow, Forms) {
    const double lnV = std::exp(10.0);
    EXPECT_NEAR(epsilon_window(RuleFamily::standard(2), lnV), 10 / std::exp(20.0), 1e-20);
    EXPECT_NEAR(epsilon_window(RuleFamily::one_two(), lnV) / epsilon_window(RuleFamily::standard(2), lnV), 100.0, 1e-9);
    EXPECT_EQ(epsilon_window(RuleFamily::standard(2), lnV, 3.0), 3.0 * epsilon_window(RuleFamily::standard(2), lnV));
    EXPECT_THROW(epsilon_window(RuleFamily::duarte(), lnV), unsupported_error);
    EXPECT_THROW(epsilon_window(RuleFamily::standard(3), lnV), unsupported_error);
}

TEST(EpsilonWindow, SmallRelativeToThreshold) {
    const auto m12 = ScalingModel::for_family(RuleFamily::one_two());
    double previous = INFINITY;
    for (double lnV = 1e3; lnV < 1e30; lnV *= 100) {
        const double ratio = epsilon_window(RuleFamily::one_two(), lnV) / leading_pc(m12, lnV);
        EXPECT_LT(ratio, previous);
        previous = ratio;
    }
    EXPECT_LT(previous, 1e-20);
}
