#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fraclap/flap.hpp"

using namespace fraclap;

// References from tests/oracles/operator_oracle.py (mpmath, 30 digits).

namespace {

AnalyticProfile gaussian(double s) {
    return AnalyticProfile(FracOrder(s), [](double y) { return std::exp(-y * y); }, -12.0, 12.0, 0.0,
                           PowerTail{0.0, 0.0, 0.0}, false, false);
}

AnalyticProfile bump(double s) {
    return AnalyticProfile(FracOrder(s), [s](double y) { return std::pow(1.0 - y * y, s); }, -1.0, 1.0, 0.0,
                           PowerTail{0.0, 0.0, 0.0}, true, true);
}

AnalyticProfile half_power(double s) {
    return AnalyticProfile(FracOrder(s), [s](double y) { return std::pow(y, s); }, 0.0, 4.0, 0.0,
                           PowerTail{0.0, 1.0, s}, true, false);
}

}  // namespace

TEST(Flap, ConstantIsAnnihilated) {
    for (double s : {0.2, 0.5, 0.9}) {
        AnalyticProfile p(FracOrder(s), [](double) { return 3.0; }, -1.0, 1.0, 3.0, PowerTail{3.0, 0.0, 0.0}, false,
                          false);
        for (double x : {-0.5, 0.0, 0.3}) EXPECT_LE(std::abs(flap_at(p, x, {})), 1e-8);
    }
}

TEST(Flap, GaussianMatchesOracle) {
    const std::tuple<double, double, double> cases[] = {
        {0.3, 0.0, 0.99559278421583461}, {0.3, 0.7, 0.40759507455527425}, {0.5, 0.0, 1.1283791670955126},
        {0.5, 0.7, 0.32192016652092078}, {0.8, 0.0, 1.5349468214973125}, {0.8, 0.7, 0.17698811802091803},
    };
    for (auto [s, x, ref] : cases) EXPECT_NEAR(flap_at(gaussian(s), x, {}), ref, 1e-7) << s << " " << x;
}

TEST(Flap, HalfPowerIsHarmonic) {
    for (double s : {0.25, 0.5, 0.75})
        for (double x : {0.5, 1.0, 2.0}) EXPECT_LE(std::abs(flap_at(half_power(s), x, {})), 1e-4) << s << " " << x;
}

TEST(Flap, BumpHasConstantImage) {
    // image of (1-x^2)_+^s inside (-1,1) is Gamma(1+2s)
    const std::pair<double, double> cases[] = {
        {0.25, 0.88622692545275801}, {0.5, 1.0}, {0.75, 1.329340388179137}};
    for (auto [s, ref] : cases) {
        const auto p = bump(s);
        double lo = 1e300, hi = -1e300;
        for (double x : {-0.5, 0.0, 0.5}) {
            const double v = flap_at(p, x, {});
            lo = std::min(lo, v);
            hi = std::max(hi, v);
            EXPECT_NEAR(v, ref, 1e-6 * ref);
        }
        EXPECT_LE((hi - lo) / std::abs(hi), 1e-4);
    }
}

TEST(Flap, LinearityProperty) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(-2.0, 2.0);
    for (int i = 0; i < 20; ++i) {
        const double a = U(rng), b = U(rng), x = 0.5 * U(rng), s = 0.3 + 0.02 * i;
        AnalyticProfile p(FracOrder(s), [=](double y) { return a * std::exp(-y * y) + b; }, -12.0, 12.0, b,
                          PowerTail{b, 0.0, 0.0}, false, false);
        EXPECT_NEAR(flap_at(p, x, {}), a * flap_at(gaussian(s), x, {}), 1e-7 * (1.0 + std::abs(a)));
    }
}

TEST(Flap, ResidualOfExactSolution) {
    // (1-x^2)_+^s solves (-Delta)^s u = Gamma(1+2s) on (-1,1)
    const double s = 0.5;
    const auto f = make_polynomial_nonlinearity("c", {std::tgamma(1.0 + 2.0 * s)});
    EXPECT_LE(residual(bump(s), f, {}, {-0.5, 0.0, 0.5}), 1e-6);
}

TEST(Moments, PowerMomentMatchesOracle) {
    EXPECT_NEAR(power_moment(0.5, 10.0, -1.5, 0.75), 0.0003669160938724935, 1e-15);
    EXPECT_NEAR(power_moment(-3.0, 5.0, -1.0, 0.5), 0.010555958805081728, 1e-14);
    EXPECT_NEAR(power_moment(2.0, 3.0, 0.0, 0.3), 1.6666666666666667, 1e-12);
}

TEST(Discrete, ZMatrixAndConstants) {
    for (double s : {0.2, 0.5, 0.8}) {
        const int n = 200;
        const auto p = IntervalProfile::uniform(FracOrder(s), 0.0, 1.0, n, 0.0, 0.0);
        const auto op = flap_matrix(p);
        const Eigen::VectorXd one = Eigen::VectorXd::Ones(n);
        EXPECT_LE((op.A * one + op.unit_load).cwiseAbs().maxCoeff(), 1e-8 * op.A.diagonal().maxCoeff());
        for (int i = 0; i < n; ++i) {
            EXPECT_GT(op.A(i, i), 0.0);
            for (int j = 0; j < n; ++j) {
                if (i == j) continue;
                ASSERT_LE(op.A(i, j), 0.0);
            }
        }
        EXPECT_GE((op.A * one).minCoeff(), 0.0);  // weak diagonal dominance
    }
}

TEST(Discrete, ConvergesToContinuousOperator) {
    for (double s : {0.25, 0.5, 0.75}) {
        double prev = 1e300;
        for (int n : {255, 511, 1023}) {
            const auto p = IntervalProfile::uniform(FracOrder(s), -1.0, 1.0, n, 0.0, 0.0);
            const auto op = flap_matrix(p);
            Eigen::VectorXd u(n);
            for (int j = 0; j < n; ++j) u(j) = std::pow(1.0 - p.nodes()[j] * p.nodes()[j], s);
            const Eigen::VectorXd r = op.A * u + op.load;
            const double g = std::tgamma(1.0 + 2.0 * s);
            double err = 0.0;
            for (int j = 0; j < n; ++j)
                if (std::abs(p.nodes()[j]) <= 0.5) err = std::max(err, std::abs(r(j) - g) / g);
            EXPECT_LE(err, 1e-2) << s << " " << n;
            EXPECT_LT(err, prev) << s << " " << n;
            prev = err;
        }
    }
}

TEST(Discrete, RejectsBadGrid) {
    DiscreteGrid g;
    g.n = 0;
    EXPECT_THROW(assemble_operator(g), DomainError);
}
