#include <gtest/gtest.h>

#include <cmath>

#include "fraclap/energy.hpp"
#include "fraclap/solver.hpp"

using namespace fraclap;

namespace {

SolveParams params() {
    SolveParams sp;
    sp.grid_n = 1024;
    sp.L = 40.0;
    return sp;
}

QuadratureParams energy_qp(const SolveParams& sp) {
    auto qp = QuadratureParams::for_grid(sp.h(), sp.L);
    qp.tol = 1e-10;
    return qp;
}

const HalfLineProfile& linear_profile() {
    static const auto rep =
        maximal_halfline(model_catalog("linear-saturation", {{"lambda", 4.0}}), 1.0, params(), FracOrder(0.75));
    return rep.profile;
}

}  // namespace

// References from tests/oracles/operator_oracle.py (mpmath, 30 digits).
TEST(KernelMoment, MatchesOracle) {
    EXPECT_NEAR(detail::kernel_moment(1.0, 10.0, -1.0, 2.5), 0.0015258001513090782, 1e-15);
    EXPECT_NEAR(detail::kernel_moment(3.0, 5.0, -1.5, 2.5), 0.014040678977884162, 1e-14);
    EXPECT_NEAR(detail::kernel_moment(0.0, 4.0, 0.0, 2.0), 0.25, 1e-15);
    EXPECT_NEAR(detail::kernel_moment(7.0, 8.0, -1.0, 3.0), 0.057082919946588443, 1e-12);
}

TEST(Energy, DefaultSampleGeometry) {
    const auto a = default_a_values(80.0);
    ASSERT_EQ(a.size(), 8u);
    EXPECT_DOUBLE_EQ(a.front(), 8.0);
    EXPECT_NEAR(a.back(), 64.0, 1e-12);
    for (std::size_t i = 1; i < a.size(); ++i) EXPECT_NEAR(a[i] / a[i - 1], std::pow(8.0, 1.0 / 7.0), 1e-12);
}

TEST(Energy, ConstantAlongSolvedProfile) {
    const auto& p = linear_profile();
    const auto f = model_catalog("linear-saturation", {{"lambda", 4.0}});
    for (double a : {0.5, 1.0, 2.0, 5.0}) EXPECT_NEAR(energy_at(p, f, a, energy_qp(params())), 2.0, 2e-2) << a;
}

TEST(Energy, ReportPassesAndMatchesEll0Law) {
    const auto& p = linear_profile();
    const auto f = model_catalog("linear-saturation", {{"lambda", 4.0}});
    const auto rep = energy_report(p, f, default_a_values(p.L()), energy_qp(params()));
    EXPECT_TRUE(rep.pass);
    EXPECT_LE(rep.max_rel_dev, 1e-2);
    EXPECT_NEAR(rep.ell0_predicted, 2.0 / std::tgamma(1.75), 1e-12);
    EXPECT_LE(rep.ell0_rel_err, 2e-2);
}

TEST(Energy, AllenCahnReportPasses) {
    const auto f = model_catalog("allen-cahn");
    const auto sol = maximal_halfline(f, 1.0, params(), FracOrder(0.5));
    const auto rep = energy_report(sol.profile, f, default_a_values(sol.profile.L()), energy_qp(params()));
    EXPECT_NEAR(rep.f_rho, 0.25, 1e-15);
    EXPECT_TRUE(rep.pass) << rep.max_rel_dev << " " << rep.ell0_rel_err;
}

TEST(Energy, CorruptedProfileFails) {
    const auto& p = linear_profile();
    const double k = 1.1;
    std::vector<double> v = p.values();
    for (double& x : v) x *= k;
    HalfLineProfile bad(p.s(), p.nodes(), v, k * p.ell0(), k * p.rho_tail(), k * p.c_tail(), false);
    const auto f = model_catalog("linear-saturation", {{"lambda", 4.0}});
    const auto rep = energy_report(bad, f, {0.5, 1.0, 2.0, 5.0}, energy_qp(params()));
    EXPECT_FALSE(rep.pass);
    EXPECT_GT(rep.max_rel_dev, 1e-2);
}

TEST(Energy, Errors) {
    const auto& p = linear_profile();
    const auto f = model_catalog("linear-saturation", {{"lambda", 4.0}});
    EXPECT_THROW(energy_report(p, f, {}, energy_qp(params())), ConfigError);
    EXPECT_THROW(ell0_verify(p, model_catalog("zero")), ProfileError);
}
