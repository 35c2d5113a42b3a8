#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "fraclap/error.hpp"
#include "fraclap/model.hpp"
#include "fraclap/params.hpp"
#include "fraclap/profiles.hpp"
#include "fraclap/quadrature.hpp"
#include "fraclap/specfun.hpp"

namespace fraclap {

struct EnergyTerms {
    double t1 = 0.0;
    double t2 = 0.0;
    double tail_part = 0.0;  // share of (c/2)(T1 + (1+2s)T2) that depends on the tail model beyond L
    double energy = 0.0;
};

struct EnergyReport {
    std::vector<double> a_values;
    std::vector<double> energies;
    double f_rho = 0.0;
    double max_rel_dev = 0.0;
    double ell0_measured = 0.0;
    double ell0_predicted = 0.0;
    double ell0_rel_err = 0.0;
    double tail_uncertainty = 0.0;  // max over a of the tail-model share
    bool pass = false;
};

struct Ell0Check {
    double measured = 0.0;
    double predicted = 0.0;
    double rel_err = 0.0;
};

namespace detail {

// int_X^inf x^gamma (x - y)^{-p} dx for 0 <= y < X, gamma < p - 1.
inline double kernel_moment(double y, double X, double gamma, double p) {
    double sum = 0.0, coef = 1.0, yk = 1.0;
    const double Xg = std::pow(X, gamma - p + 1.0);
    for (int k = 0; k < 4000; ++k) {
        const double term = coef * yk * Xg / (p - 1.0 + k - gamma);
        sum += term;
        if (std::abs(term) <= 1e-17 * std::abs(sum)) break;
        coef *= (p + k) / (k + 1.0);
        yk *= y / X;
    }
    return sum;
}

inline std::vector<double> merge_breaks(std::vector<double> b, double lo, double hi) {
    b.erase(std::remove_if(b.begin(), b.end(), [&](double v) { return !(v > lo && v < hi); }), b.end());
    std::sort(b.begin(), b.end());
    b.erase(std::unique(b.begin(), b.end()), b.end());
    return b;
}

inline double checked(const quad::QuadResult& r, const std::string& label, double target) {
    if (!r.converged) throw QuadratureError(label, r.abs_error, target);
    return r.value;
}

}  // namespace detail

// T1, T2 and E(a) = F(u(a)) - (c/2)(T1 - (1+2s) T2).
inline EnergyTerms energy_terms(const HalfLineProfile& p, const Nonlinearity& f, double a,
                                const QuadratureParams& qp) {
    qp.validate();
    const double L = p.L();
    if (!(a > 0.0 && a < L)) throw DomainError("energy_at: a must lie in (0, L)");
    const double s = p.s().value();
    const double c = norm_constant(1, p.s());
    const double rho = p.rho_tail(), C = p.c_tail();
    const double X = std::max({qp.far_cutoff, 2.0 * L, 4.0 * a});
    const double ua = p.eval(a);
    const double tol_abs = qp.tol;
    const quad::Tolerance tol{tol_abs, 0.0, 40000};
    const int graded = qp.panels_near;

    std::vector<double> near0 = quad::graded_toward(0.0, std::min(a, p.nodes().front() * 4.0 + 1e-300), graded);
    const double h0 = p.nodes().size() > 1 ? p.nodes()[p.nodes().size() - 1] - p.nodes()[p.nodes().size() - 2] : a;

    // T1 ------------------------------------------------------------
    const double t1_left = ua * ua * std::pow(a, -2.0 * s) / (2.0 * s);
    auto g1 = [&](double y) {
        const double d = ua - p.eval(y);
        return d * d * std::pow(std::abs(a - y), -1.0 - 2.0 * s);
    };
    // |y - a| < eps uses u(y) - u(a) ~ u'(a)(y - a)
    const double eps = 1e-6 * a;
    const double du = (p.eval(a + eps) - p.eval(a - eps)) / (2.0 * eps);
    const double t1_core = 2.0 * du * du * std::pow(eps, 2.0 - 2.0 * s) / (2.0 - 2.0 * s);
    std::vector<double> b1 = quad::graded_toward(a - eps, 0.0, graded);
    {
        auto z = quad::graded_toward(0.0, a - eps, graded);
        b1.insert(b1.end(), z.begin(), z.end());
        for (double y = a - h0; y > 0.0 && y > a - 64.0 * h0; y -= h0) b1.push_back(y);
    }
    b1 = detail::merge_breaks(b1, 0.0, a - eps);
    std::vector<double> b1r = quad::graded_toward(a + eps, L, graded);
    for (double y = a + h0; y < L && y < a + 64.0 * h0; y += h0) b1r.push_back(y);
    b1r = detail::merge_breaks(b1r, a + eps, L);
    const double t1_mid = t1_core + detail::checked(quad::integrate(g1, 0.0, a - eps, tol, b1), "energy T1", tol_abs)
                          + detail::checked(quad::integrate(g1, a + eps, L, tol, b1r), "energy T1", tol_abs);
    const double t1_far = detail::checked(quad::integrate(g1, L, X, tol, quad::geometric_breaks(L, X, qp.panels_far)),
                                          "energy T1", tol_abs);
    // beyond X: (ua - rho + C y^{-2s})^2
    const double dd = ua - rho;
    const double p1 = 1.0 + 2.0 * s;
    const double t1_inf = dd * dd * detail::kernel_moment(a, X, 0.0, p1)
                          + 2.0 * dd * C * detail::kernel_moment(a, X, -2.0 * s, p1)
                          + C * C * detail::kernel_moment(a, X, -4.0 * s, p1);
    const double t1 = t1_left + t1_mid + t1_far + t1_inf;

    // T2 ------------------------------------------------------------
    const double p2 = 2.0 + 2.0 * s;
    // y < 0 leg: int_a^inf u(x)^2 x^{-1-2s} / (1+2s) dx
    auto g2l = [&](double x) {
        const double u = p.eval(x);
        return u * u * std::pow(x, -1.0 - 2.0 * s) / (1.0 + 2.0 * s);
    };
    const double t2_left_mid = detail::checked(
        quad::integrate(g2l, a, L, tol, quad::geometric_breaks(a, L, qp.panels_far)), "energy T2", tol_abs);
    const double t2_left_far = detail::checked(
        quad::integrate(g2l, L, X, tol, quad::geometric_breaks(L, X, qp.panels_far)), "energy T2", tol_abs);
    const double t2_left_inf = (rho * rho * std::pow(X, -2.0 * s) / (2.0 * s)
                                - 2.0 * rho * C * std::pow(X, -4.0 * s) / (4.0 * s)
                                + C * C * std::pow(X, -6.0 * s) / (6.0 * s))
                               / (1.0 + 2.0 * s);

    // 0 < y < a < x < X, corner at (a, a)
    const quad::Tolerance tol_in{1e-3 * tol_abs, 1e-7, 40000};
    auto inner = [&](double x) {
        const double ux = p.eval(x);
        auto g = [&](double y) {
            const double d = ux - p.eval(y);
            return d * d * std::pow(x - y, -p2);
        };
        const double w = x - a;
        std::vector<double> br;
        if (w > 0.0)
            for (double t = w; t < a; t *= 2.0) br.push_back(a - t);
        br.insert(br.end(), near0.begin(), near0.end());
        br = detail::merge_breaks(br, 0.0, a);
        return detail::checked(quad::integrate(g, 0.0, a, tol_in, br), "energy T2 (inner)", tol_in.abs);
    };
    // the strip a < x < a + eps is below the rounding floor of u(x) - u(y); g ~ (x - a)^{1-2s} there
    std::vector<double> bo = quad::graded_toward(a + eps, std::min(L, 1.5 * a), graded);
    {
        auto gb = quad::geometric_breaks(std::min(L, 1.5 * a), L, qp.panels_far);
        bo.insert(bo.end(), gb.begin(), gb.end());
        bo.push_back(std::min(L, 1.5 * a));
    }
    bo = detail::merge_breaks(bo, a + eps, L);
    const double t2_corner = eps * inner(a + eps) / (2.0 - 2.0 * s)
                             + detail::checked(quad::integrate(inner, a + eps, L, tol, bo), "energy T2", tol_abs);
    const double t2_corner_far =
        detail::checked(quad::integrate(inner, L, X, tol, quad::geometric_breaks(L, X, qp.panels_far)),
                        "energy T2", tol_abs);
    // x > X strip with u(x) = rho - C x^{-2s}
    auto strip = [&](double y) {
        const double e = rho - p.eval(y);
        return e * e * detail::kernel_moment(y, X, 0.0, p2) - 2.0 * e * C * detail::kernel_moment(y, X, -2.0 * s, p2)
               + C * C * detail::kernel_moment(y, X, -4.0 * s, p2);
    };
    const double t2_strip = detail::checked(quad::integrate(strip, 0.0, a, tol, near0), "energy T2", tol_abs);
    const double t2 = t2_left_mid + t2_left_far + t2_left_inf + t2_corner + t2_corner_far + t2_strip;

    EnergyTerms out;
    out.t1 = t1;
    out.t2 = t2;
    out.tail_part = 0.5 * c * (t1_far + t1_inf + (1.0 + 2.0 * s) * (t2_left_far + t2_left_inf + t2_corner_far + t2_strip));
    out.energy = f.primitive(ua) - 0.5 * c * (t1 - (1.0 + 2.0 * s) * t2);
    return out;
}

inline double energy_at(const HalfLineProfile& p, const Nonlinearity& f, double a, const QuadratureParams& qp) {
    return energy_terms(p, f, a, qp).energy;
}

// ell0 against (2 F(rho))^{1/2} / Gamma(1+s)
inline Ell0Check ell0_verify(const HalfLineProfile& p, const Nonlinearity& f) {
    const double Fr = f.primitive(p.rho_tail());
    if (!(Fr > 0.0)) throw ProfileError("F(rho) <= 0: profile is inconsistent with condition (F)");
    Ell0Check r;
    r.measured = p.ell0();
    r.predicted = std::sqrt(2.0 * Fr) / gamma_fn(1.0 + p.s().value());
    r.rel_err = std::abs(r.measured - r.predicted) / r.predicted;
    return r;
}

// 8 geometric points from 0.1 L to 0.8 L
inline std::vector<double> default_a_values(double L) {
    std::vector<double> a;
    for (int k = 0; k < 8; ++k) a.push_back(0.1 * L * std::pow(8.0, k / 7.0));
    return a;
}

inline EnergyReport energy_report(const HalfLineProfile& p, const Nonlinearity& f, const std::vector<double>& a_values,
                                  const QuadratureParams& qp) {
    if (a_values.empty()) throw ConfigError("energy_report: a_values is empty");
    EnergyReport rep;
    rep.a_values = a_values;
    rep.f_rho = f.primitive(p.rho_tail());
    const double denom = std::max(std::abs(rep.f_rho), 1e-12);
    for (double a : a_values) {
        const auto t = energy_terms(p, f, a, qp);
        rep.energies.push_back(t.energy);
        rep.max_rel_dev = std::max(rep.max_rel_dev, std::abs(t.energy - rep.f_rho) / denom);
        rep.tail_uncertainty = std::max(rep.tail_uncertainty, std::abs(t.tail_part));
    }
    const auto e = ell0_verify(p, f);
    rep.ell0_measured = e.measured;
    rep.ell0_predicted = e.predicted;
    rep.ell0_rel_err = e.rel_err;
    rep.pass = rep.max_rel_dev <= 1e-2 && rep.ell0_rel_err <= 2e-2;
    return rep;
}

}  // namespace fraclap
