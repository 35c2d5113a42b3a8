#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fraclap/specfun.hpp"

using namespace fraclap;

// References from tests/oracles/constants_oracle.py (mpmath, 40 digits).

TEST(Gamma, MatchesOracle) {
    const std::pair<double, double> cases[] = {
        {0.1, 9.5135076986687318363},  {0.5, 1.7724538509055160273},  {1.5, 0.88622692545275801365},
        {2.5, 1.3293403881791370205},  {3.7, 4.1706517837966031654},  {10.25, 639232.59877957679428},
        {19.5, 27724322986333718.178},
    };
    for (auto [x, ref] : cases) EXPECT_NEAR(gamma_fn(x) / ref, 1.0, 2e-14) << "x = " << x;
}

TEST(Gamma, RejectsNonPositive) {
    EXPECT_THROW(gamma_fn(0.0), DomainError);
    EXPECT_THROW(gamma_fn(-1.5), DomainError);
}

TEST(Gamma, RecurrenceProperty) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(0.05, 15.0);
    for (int i = 0; i < 500; ++i) {
        const double x = U(rng);
        EXPECT_NEAR(gamma_fn(x + 1.0) / (x * gamma_fn(x)), 1.0, 1e-13) << x;
    }
}

TEST(FracOrder, Domain) {
    EXPECT_THROW(FracOrder(0.0), DomainError);
    EXPECT_THROW(FracOrder(1.0), DomainError);
    EXPECT_THROW(FracOrder(-0.2), DomainError);
    EXPECT_THROW(FracOrder(std::nan("")), DomainError);
    EXPECT_DOUBLE_EQ(FracOrder(0.3).value(), 0.3);
}

TEST(NormConstant, MatchesOracle) {
    EXPECT_NEAR(norm_constant(1, FracOrder(0.5)), 1.0 / std::numbers::pi, 1e-15);
    const std::tuple<int, double, double> cases[] = {
        {1, 0.5, 0.31830988618379067154},  {3, 0.5, 0.10132118364233777144}, {2, 0.25, 0.083241983875425065489},
        {5, 0.75, 0.085263688241535731804}, {1, 0.9, 0.1649049388183027249},
    };
    for (auto [N, s, ref] : cases) EXPECT_NEAR(norm_constant(N, FracOrder(s)) / ref, 1.0, 2e-14);
    EXPECT_THROW(norm_constant(0, FracOrder(0.5)), DomainError);
}

TEST(Reduction, ClosedFormValues) {
    EXPECT_NEAR(reduction_integral(2, FracOrder(0.5)).closed, 2.0, 1e-14);
    const auto r = reduction_integral(3, FracOrder(0.25));
    EXPECT_NEAR(r.quad, r.closed, 1e-8 * r.closed);
    EXPECT_THROW(reduction_integral(1, FracOrder(0.5)), DomainError);
}

TEST(Reduction, IdentityProperty) {
    for (int N = 2; N <= 6; ++N)
        for (double s = 0.05; s < 1.0; s += 0.1) {
            const FracOrder so(s);
            const auto r = reduction_integral(N, so);
            EXPECT_NEAR(norm_constant(N, so) * r.quad / norm_constant(1, so), 1.0, 1e-8) << N << " " << s;
            EXPECT_NEAR(norm_constant(N, so) * r.closed / norm_constant(1, so), 1.0, 1e-12) << N << " " << s;
        }
}

TEST(Kappa, ClosedForm) {
    EXPECT_NEAR(kappa_closed(FracOrder(0.5)), std::numbers::pi / 8.0, 1e-15);
    EXPECT_NEAR(kappa_closed(FracOrder(0.9)), 0.46249675771225449638, 1e-14);
}

TEST(Kappa, PiecesMatchOracle) {
    struct Row { double s, f1, f2, f3, K; };
    const Row rows[] = {
        {0.25, 0.1318785319363517, 5.887176824339238, 0.2422800549713129, 0.4107827252061523},
        {0.5, 0.5911742987852761, 2.591174298785276, 0.7337005501361698, 0.3926990816987242},
        {0.75, 2.327307402594131, 1.13275372121778, 1.873708707041913, 0.4223379641289271},
    };
    QuadratureParams qp;
    qp.tol = 1e-10;
    for (const auto& r : rows) {
        const auto rep = kappa_quadrature(FracOrder(r.s), qp);
        EXPECT_NEAR(rep.f1, r.f1, 1e-8 * r.f1);
        EXPECT_NEAR(rep.f2, r.f2, 1e-8 * r.f2);
        EXPECT_NEAR(rep.f3, r.f3, 1e-8 * r.f3);
        EXPECT_NEAR(rep.kappa_quad, r.K, 1e-8);
    }
}

TEST(Kappa, QuadratureAgreesAcrossOrders) {
    for (int k = 1; k <= 9; ++k) {
        const auto rep = kappa_quadrature(FracOrder(0.1 * k));
        EXPECT_LE(rep.abs_error, 1e-6) << "s = " << 0.1 * k;
    }
}

TEST(Kappa, InvalidQuadratureParams) {
    QuadratureParams qp;
    qp.tol = 0.0;
    EXPECT_THROW(kappa_quadrature(FracOrder(0.5), qp), ConfigError);
}
