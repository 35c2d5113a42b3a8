#include <gtest/gtest.h>

#include <random>

#include "fraclap/io.hpp"

using namespace fraclap;
using io::RunConfig;

namespace {

HalfLineProfile synthetic(double s) {
    std::vector<double> x, u;
    for (int j = 1; j <= 300; ++j) {
        x.push_back(0.1 * j + 1e-3 / 3.0);
        u.push_back(1.0 - 1.0 / (1.0 + x.back() * std::sqrt(2.0)));
    }
    const double ell0 = u.front() / std::pow(x.front(), s);
    const double c = (1.0 - u.back()) * std::pow(x.back(), 2.0 * s);
    return HalfLineProfile(FracOrder(s), x, u, ell0, 1.0, c, true);
}

}  // namespace

TEST(Format, SeventeenDigitsRoundTrip) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> U(-50.0, 50.0);
    for (int i = 0; i < 2000; ++i) {
        const double v = std::exp(U(rng)) * (i % 2 ? -1.0 : 1.0);
        EXPECT_EQ(std::stod(io::num(v)), v);
    }
}

TEST(Lists, ParseAndReject) {
    EXPECT_EQ(io::parse_list("0.25, 0.5,0.75"), (std::vector<double>{0.25, 0.5, 0.75}));
    EXPECT_TRUE(io::parse_list("").empty());
    EXPECT_THROW(io::parse_list("1,abc"), ConfigError);
    EXPECT_THROW(io::parse_list("1.5x"), ConfigError);
}

TEST(RunConfig, RoundTripProperty) {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        RunConfig c;
        c.command = trial % 2 ? "sweep" : "solve";
        for (int k = 0; k < 1 + trial % 4; ++k) c.s.push_back(0.01 + 0.98 * U(rng));
        c.nonlinearity = trial % 3 ? "linear-saturation" : "custom-polynomial";
        c.params["lambda"] = {U(rng) * 100.0, 1.0 / 3.0};
        if (trial % 5 == 0) c.params["c0"] = {-U(rng)};
        c.rho = 0.5 + U(rng);
        c.grid_n = 64 + trial;
        c.L = 10.0 + 100.0 * U(rng);
        if (trial % 2) c.R_schedule = {c.L / 8, c.L / 4, c.L};
        if (trial % 3) c.delta_schedule = {1e-1, 1e-3, 1e-7};
        if (trial % 4) c.a_values = {0.1 * c.L, 0.3 * c.L};
        c.newton_tol = std::pow(10.0, -6.0 - 6.0 * U(rng));
        c.max_iter = 100 + trial;
        c.damping = 0.5 + 0.5 * U(rng);
        if (trial % 7 == 0) c.monotone_L = 10.0 * U(rng);
        c.quad_tol = 1e-9;
        c.energy_tol = 1e-11;
        c.profile = trial % 2 ? "run/profile_s0.5.csv" : "";
        c.output_dir = "out dir/" + std::to_string(trial);
        c.format = trial % 2 ? "json" : "csv";
        const auto text = c.to_text();
        const auto back = RunConfig::parse(text);
        ASSERT_EQ(back, c) << text;
        ASSERT_EQ(back.to_text(), text);
    }
}

TEST(RunConfig, CommentsOverridesAndErrors) {
    auto c = RunConfig::parse("# recipe\ncommand = sweep\ns=0.25,0.5\nparam.lambda=1,4,16  # three values\n\n");
    EXPECT_EQ(c.command, "sweep");
    EXPECT_EQ(c.s.size(), 2u);
    EXPECT_EQ(c.params.at("lambda").size(), 3u);
    c.apply("s=0.75\n");
    EXPECT_EQ(c.s, std::vector<double>{0.75});
    EXPECT_THROW(RunConfig::parse("bogus=1\n"), ConfigError);
    EXPECT_THROW(RunConfig::parse("no equals sign\n"), ConfigError);
    EXPECT_THROW(RunConfig::parse("grid_n=1.5\n"), ConfigError);
    EXPECT_THROW(RunConfig::parse("format=xml\n"), ConfigError);
    EXPECT_THROW(RunConfig::parse("L=1,2\n"), ConfigError);
}

TEST(RunConfig, SolveParamsValidated) {
    auto c = RunConfig::parse("grid_n=16\n");
    EXPECT_THROW(c.solve_params(), ConfigError);
    c = RunConfig::parse("grid_n=128\nL=20\nR_schedule=5,10,20\n");
    const auto sp = c.solve_params();
    EXPECT_EQ(sp.grid_n, 128);
    EXPECT_EQ(sp.R_schedule.size(), 3u);
}

TEST(Profile, RoundTripIsExact) {
    const auto p = synthetic(0.6);
    const auto q = io::parse_profile(io::profile_csv(p), io::profile_sidecar(p).dump());
    EXPECT_EQ(q.nodes(), p.nodes());
    EXPECT_EQ(q.values(), p.values());
    EXPECT_EQ(q.ell0(), p.ell0());
    EXPECT_EQ(q.c_tail(), p.c_tail());
    EXPECT_EQ(q.rho_tail(), p.rho_tail());
    EXPECT_EQ(q.s().value(), 0.6);
    EXPECT_TRUE(q.is_solution());
    for (double x : {-1.0, 1e-5, 3.3, 29.0, 100.0}) EXPECT_EQ(q.eval(x), p.eval(x));
}

TEST(Profile, CorruptInputsAreRejected) {
    const auto p = synthetic(0.5);
    const auto csv = io::profile_csv(p);
    const auto side = io::profile_sidecar(p).dump();
    EXPECT_THROW(io::parse_profile("", side), ProfileError);
    EXPECT_THROW(io::parse_profile("a,b\n1,2\n", side), ProfileError);
    EXPECT_THROW(io::parse_profile("x,u\n0.1,zz\n", side), ProfileError);
    EXPECT_THROW(io::parse_profile("x,u\n0.1,0.2,0.3\n", side), ProfileError);
    EXPECT_THROW(io::parse_profile(csv, "{\"s\":0.5}"), ProfileError);
    EXPECT_THROW(io::parse_profile(csv, "not json"), ProfileError);
    auto j = io::profile_sidecar(p);
    j["L"] = 12.0;
    EXPECT_THROW(io::parse_profile(csv, j.dump()), ProfileError);
    j = io::profile_sidecar(p);
    j["s"] = 1.5;
    EXPECT_THROW(io::parse_profile(csv, j.dump()), ProfileError);
    // truncated file: tail closure no longer continuous
    EXPECT_THROW(io::parse_profile(csv.substr(0, csv.size() / 2), side), ProfileError);
}

TEST(Reports, JsonAndCsvShapes) {
    ConstantsReport c{0.5, 1.0, 1.0 + 1e-12, 1e-12, 0.1, 0.2, 0.3, 0.4};
    EXPECT_EQ(io::to_json(c, 1e-15)["reduction_rel_error"].get<double>(), 1e-15);
    EXPECT_EQ(io::constants_csv_row(c, 0.0).substr(0, 4), "0.5,");

    EnergyReport e;
    e.a_values = {1.0, 2.0};
    e.energies = {2.0, 2.02};
    e.f_rho = 2.0;
    const auto csv = io::energy_csv(e);
    EXPECT_EQ(csv, "a,E,F_rho,rel_dev\n1,2,2,0\n2,2.02,2,0.010000000000000009\n");

    ConditionFReport r;
    r.failure = ConditionFReport::Failure::not_a_zero;
    EXPECT_EQ(io::to_json(r)["failure"], "not_a_zero");
    EXPECT_TRUE(io::to_json(r)["witness"].is_null());
}
