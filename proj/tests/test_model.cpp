#include <gtest/gtest.h>

#include <random>

#include "fraclap/model.hpp"

using namespace fraclap;

TEST(Catalog, LinearSaturation) {
    const auto f = model_catalog("linear-saturation", {{"lambda", 4.0}});
    EXPECT_DOUBLE_EQ(f(0.25), 3.0);
    EXPECT_DOUBLE_EQ(f.primitive(1.0), 2.0);
    EXPECT_DOUBLE_EQ(f.derivative(0.3), -4.0);
    EXPECT_THROW(model_catalog("linear-saturation", {{"lambda", -1.0}}), DomainError);
}

TEST(Catalog, AllenCahnAndPolynomial) {
    const auto ac = model_catalog("allen-cahn");
    EXPECT_DOUBLE_EQ(ac(0.5), 0.375);
    EXPECT_DOUBLE_EQ(ac.primitive(1.0), 0.25);
    const auto p = model_catalog("custom-polynomial", {{"c0", -0.1}, {"c1", 1.1}, {"c2", -1.0}});
    EXPECT_NEAR(p(1.0), 0.0, 1e-15);
    EXPECT_THROW(model_catalog("custom-polynomial", {{"c0", 1.0}, {"c5", 1.0}}), DomainError);
    EXPECT_THROW(model_catalog("custom-polynomial", {}), DomainError);
    EXPECT_THROW(model_catalog("no-such-model"), DomainError);
}

TEST(ConditionF, AllenCahnHolds) {
    const auto r = check_condition_F(model_catalog("allen-cahn"), 1.0);
    EXPECT_TRUE(r.holds);
    EXPECT_GT(r.margin, 0.0);
    EXPECT_EQ(r.failure, ConditionFReport::Failure::none);
}

TEST(ConditionF, Failures) {
    const auto ls = model_catalog("linear-saturation", {{"lambda", 2.0}});
    auto r = check_condition_F(ls, 0.5);
    EXPECT_FALSE(r.holds);
    EXPECT_EQ(r.failure, ConditionFReport::Failure::not_a_zero);
    r = check_condition_F(model_catalog("zero"), 1.0);
    EXPECT_FALSE(r.holds);
    EXPECT_EQ(r.failure, ConditionFReport::Failure::primitive_not_below);
    // f = -u(u-1/2)(u-1): F(1) = 0 = F(0)
    const auto bistable = make_polynomial_nonlinearity("b", {0.0, -0.5, 1.5, -1.0});
    r = check_condition_F(bistable, 1.0);
    EXPECT_FALSE(r.holds);
    ASSERT_TRUE(r.witness.has_value());
}

TEST(ConditionF, NegativeAtZeroStillHolds) {
    const auto p = model_catalog("custom-polynomial", {{"c0", -0.1}, {"c1", 1.1}, {"c2", -1.0}});
    EXPECT_TRUE(check_condition_F(p, 1.0).holds);
}

TEST(Regularize, LinearExtension) {
    const auto p = model_catalog("custom-polynomial", {{"c0", -0.1}, {"c1", 1.1}, {"c2", -1.0}});
    const double d = 0.01;
    const auto g = regularize_delta(p, d);
    EXPECT_NEAR(g(-d), 0.0, 1e-15);
    EXPECT_NEAR(g(-0.5 * d), 0.5 * p(0.0), 1e-15);
    EXPECT_DOUBLE_EQ(g(0.3), p(0.3));
    EXPECT_TRUE(delta_admissible(p, 1.0, d));
}

TEST(Lipschitz, BoundsDifferenceQuotients) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(-0.5, 1.5);
    const Nonlinearity fs[] = {model_catalog("allen-cahn"), model_catalog("linear-saturation", {{"lambda", 3.0}}),
                               model_catalog("custom-polynomial", {{"c0", -0.1}, {"c1", 1.1}, {"c2", -1.0}})};
    for (const auto& f : fs)
        for (int i = 0; i < 300; ++i) {
            double a = U(rng), b = U(rng);
            if (a > b) std::swap(a, b);
            const double L = f.lipschitz(a, b);
            for (int k = 0; k < 5; ++k) {
                const double x = a + (b - a) * k / 4.0, y = a + (b - a) * (4 - k) / 7.0;
                EXPECT_LE(std::abs(f(x) - f(y)), L * std::abs(x - y) * (1 + 1e-12) + 1e-14);
            }
        }
}

TEST(Primitive, DerivativeMatchesF) {
    const auto f = model_catalog("allen-cahn");
    for (double t = -0.5; t <= 1.5; t += 0.125) {
        const double h = 1e-5;
        EXPECT_NEAR((f.primitive(t + h) - f.primitive(t - h)) / (2 * h), f(t), 1e-9);
        EXPECT_NEAR(f.primitive(0.0), 0.0, 0.0);
    }
}
