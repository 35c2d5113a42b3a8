#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "fraclap/error.hpp"
#include "fraclap/params.hpp"
#include "fraclap/quadrature.hpp"

namespace fraclap {

// Fractional order s in the open interval (0,1).
class FracOrder {
public:
    explicit FracOrder(double s) : s_(s) {
        if (!(s > 0.0 && s < 1.0)) throw DomainError("fractional order must lie in (0,1), got " + std::to_string(s));
    }
    double value() const noexcept { return s_; }
    operator double() const noexcept { return s_; }

private:
    double s_;
};

// Lanczos approximation (g = 7, 9 terms) with reflection for x < 1/2.
inline double gamma_fn(double x) {
    if (!(x > 0.0)) throw DomainError("gamma_fn requires x > 0, got " + std::to_string(x));
    static constexpr std::array<double, 9> p = {
        0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
        771.32342877765313,      -176.61502916214059,   12.507343278686905,
        -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};
    constexpr double pi = std::numbers::pi;
    if (x < 0.5) return pi / (std::sin(pi * x) * gamma_fn(1.0 - x));
    const double z = x - 1.0;
    double a = p[0];
    const double t = z + 7.5;
    for (int i = 1; i < 9; ++i) a += p[static_cast<std::size_t>(i)] / (z + i);
    return std::sqrt(2.0 * pi) * std::pow(t, z + 0.5) * std::exp(-t) * a;
}

inline double beta_fn(double a, double b) { return gamma_fn(a) * gamma_fn(b) / gamma_fn(a + b); }

// c(N,s) = 4^s s(1-s) pi^{-N/2} Gamma(s+N/2) / Gamma(2-s)
inline double norm_constant(int N, FracOrder s) {
    if (N < 1) throw DomainError("dimension must be >= 1");
    const double sv = s.value();
    return std::pow(4.0, sv) * sv * (1.0 - sv) * std::pow(std::numbers::pi, -0.5 * N) * gamma_fn(sv + 0.5 * N)
           / gamma_fn(2.0 - sv);
}

struct ReductionIntegral {
    double closed = 0.0;
    double quad = 0.0;
    double quad_error = 0.0;
};

// Integral of (|z'|^2+1)^{-(N+2s)/2} over R^{N-1}: closed form and radial quadrature.
inline ReductionIntegral reduction_integral(int N, FracOrder s, double tol = 1e-13) {
    if (N < 2) throw DomainError("reduction_integral requires N >= 2");
    const double sv = s.value();
    const double pi = std::numbers::pi;
    ReductionIntegral r;
    r.closed = std::pow(pi, 0.5 * (N - 1)) * gamma_fn(sv + 0.5) / gamma_fn(sv + 0.5 * N);
    const double sphere = 2.0 * std::pow(pi, 0.5 * (N - 1)) / gamma_fn(0.5 * (N - 1));
    const double e = 0.5 * (N + 2.0 * sv);
    quad::Tolerance t{0.0, tol, 2000};
    auto inner = quad::integrate([&](double x) { return std::pow(x, N - 2) * std::pow(x * x + 1.0, -e); }, 0.0, 1.0, t);
    // outer half via x = 1/u
    auto outer = quad::integrate([&](double u) { return std::pow(u, 2.0 * sv) * std::pow(1.0 + u * u, -e); }, 0.0, 1.0,
                                 t, quad::graded_toward(0.0, 1.0, 12));
    inner += outer;
    r.quad = sphere * inner.value;
    r.quad_error = sphere * inner.abs_error;
    if (!inner.converged) throw QuadratureError("reduction integral", r.quad_error, tol * r.closed);
    return r;
}

inline double kappa_closed(FracOrder s) {
    const double g = gamma_fn(1.0 + s.value());
    return 0.5 * g * g;
}

struct ConstantsReport {
    double s = 0.0;
    double kappa_closed = 0.0;
    double kappa_quad = 0.0;
    double abs_error = 0.0;
    double f1 = 0.0;
    double f2 = 0.0;
    double f3 = 0.0;
    double c1s = 0.0;
};

namespace detail {

// F1 = int_{-1}^{1} ((t+1)^s - 1)^2 / |t|^{1+2s} dt
inline quad::QuadResult kappa_f1(double s, const QuadratureParams& qp) {
    auto g = [s](double t) {
        const double d = std::expm1(s * std::log1p(t));
        return d * d * std::pow(std::abs(t), -1.0 - 2.0 * s);
    };
    const quad::Tolerance tol{0.02 * qp.tol, 1e-13, 4000};
    constexpr double split = 1e-3;
    const double w = split * std::ldexp(1.0, -qp.panels_near);
    quad::QuadResult r = quad::integrate(g, -1.0, -split, tol, quad::graded_toward(-1.0, -split, 20));
    auto toward0 = [&](double lo, double hi, double sign) {
        std::vector<double> br;
        for (int k = 1; k < qp.panels_near; ++k) br.push_back(sign * split * std::ldexp(1.0, -k));
        return quad::integrate(g, lo, hi, tol, br);
    };
    r += toward0(-split, -w, -1.0);
    r += toward0(w, split, 1.0);
    r += quad::integrate(g, split, 1.0, tol, quad::geometric_breaks(split, 1.0, 8));
    // two-term expansion s^2|t|^{1-2s}(1 + (s-1)t) on the innermost panels
    const double lead = s * s * std::pow(w, 2.0 - 2.0 * s) / (2.0 - 2.0 * s);
    r.value += 2.0 * lead;
    return r;
}

// F2 = int_1^inf (t^{2s} - ((t+1)^s - 1)^2) / t^{1+2s} dt
inline quad::QuadResult kappa_f2(double s, const QuadratureParams& qp) {
    auto g = [s](double t) {
        const double ts = std::pow(t, s);
        const double d = ts * std::expm1(s * std::log1p(1.0 / t));  // (t+1)^s - t^s
        return (1.0 - d) * (2.0 * ts + d - 1.0) * std::pow(t, -1.0 - 2.0 * s);
    };
    constexpr double T = 1e6;
    const quad::Tolerance tol{0.02 * qp.tol, 1e-13, 4000};
    quad::QuadResult r = quad::integrate(g, 1.0, T, tol, quad::geometric_breaks(1.0, T, qp.panels_far));
    // exact tail: -sum gamma_k T^{-k}/k + 2 sum beta_k T^{-s-k}/(s+k) - T^{-2s}/(2s)
    double tail = -std::pow(T, -2.0 * s) / (2.0 * s);
    double beta = 1.0, gam = 1.0;
    for (int k = 0; k < 8; ++k) {
        if (k > 0) {
            gam *= (2.0 * s - (k - 1)) / k;
            tail -= gam * std::pow(T, -static_cast<double>(k)) / k;
            beta *= (s - (k - 1)) / k;
        }
        tail += 2.0 * beta * std::pow(T, -s - k) / (s + k);
    }
    r.value += tail;
    return r;
}

// F3 = int_1^inf int_0^1 (t^s - tau^s)^2 / (t - tau)^{2+2s} dtau dt
inline quad::QuadResult kappa_f3(double s, const QuadratureParams& qp) {
    // integrand in r = t-1 and q = 1-tau
    auto h = [s](double r, double q) {
        const double t = 1.0 + r;
        const double d = r + q;
        const double diff = std::pow(t, s) * std::expm1(s * std::log1p(-d / t));
        return diff * diff * std::pow(d, -2.0 - 2.0 * s);
    };
    const quad::Tolerance inner_tol{1e-4 * qp.tol, 1e-13, 4000};
    const quad::Tolerance outer_tol{0.02 * qp.tol, 1e-13, 4000};
    bool inner_ok = true;
    double inner_err = 0.0;
    auto inner = [&](double r) {
        std::vector<double> br;
        for (double q = r; q < 1.0; q *= 2.0) br.push_back(q);
        for (int k = 1; k <= 10; ++k) br.push_back(1.0 - std::ldexp(1.0, -k));
        auto res = quad::integrate([&](double q) { return h(r, q); }, 0.0, 1.0, inner_tol, br);
        inner_ok = inner_ok && res.converged;
        inner_err = std::max(inner_err, res.abs_error);
        return res.value;
    };
    const double rmin = std::ldexp(1.0, -qp.panels_near);
    std::vector<double> br;
    for (int k = 1; k < qp.panels_near; ++k) br.push_back(std::ldexp(1.0, -k));
    quad::QuadResult r = quad::integrate(inner, rmin, 1.0, outer_tol, br);
    // innermost strip: exact integral of the corner model s^2 (r+q)^{-2s}, plus the regular remainder
    const double model_at = [&] {
        if (std::abs(s - 0.5) < 1e-12) return s * s * (std::log1p(rmin) - std::log(rmin));
        return s * s * (std::pow(1.0 + rmin, 1.0 - 2.0 * s) - std::pow(rmin, 1.0 - 2.0 * s)) / (1.0 - 2.0 * s);
    }();
    const double model_int = [&] {
        if (std::abs(s - 0.5) < 1e-12)
            return s * s * ((1.0 + rmin) * std::log1p(rmin) - rmin - (rmin * std::log(rmin) - rmin));
        const double e = 2.0 - 2.0 * s;
        return s * s / (1.0 - 2.0 * s) * ((std::pow(1.0 + rmin, e) - 1.0) / e - std::pow(rmin, e) / e);
    }();
    r.value += model_int + (inner(rmin) - model_at) * rmin;
    // t in [2, inf)
    auto far_inner = [&](double t) {
        auto g = [&](double q) { return h(t - 1.0, q); };
        std::vector<double> b2;
        for (int k = 1; k <= 10; ++k) b2.push_back(1.0 - std::ldexp(1.0, -k));
        auto res = quad::integrate(g, 0.0, 1.0, inner_tol, b2);
        inner_ok = inner_ok && res.converged;
        inner_err = std::max(inner_err, res.abs_error);
        return res.value;
    };
    r += quad::integrate_to_infinity(far_inner, 2.0, outer_tol, 2.0);
    if (!inner_ok) {
        r.converged = false;
        r.abs_error += inner_err;
    }
    return r;
}

}  // namespace detail

// K(s) = (c(1,s)/2)(-1/(2s) - F1 + F2 + (1+2s) F3) by quadrature, compared with Gamma(1+s)^2/2.
inline ConstantsReport kappa_quadrature(FracOrder s, const QuadratureParams& qp = {}) {
    qp.validate();
    const double sv = s.value();
    ConstantsReport rep;
    rep.s = sv;
    rep.c1s = norm_constant(1, s);
    const auto f1 = detail::kappa_f1(sv, qp);
    rep.f1 = quad::require(f1, "F1", qp.tol);
    const auto f2 = detail::kappa_f2(sv, qp);
    rep.f2 = quad::require(f2, "F2", qp.tol);
    const auto f3 = detail::kappa_f3(sv, qp);
    rep.f3 = quad::require(f3, "F3", qp.tol);
    rep.kappa_quad = 0.5 * rep.c1s * (-0.5 / sv - rep.f1 + rep.f2 + (1.0 + 2.0 * sv) * rep.f3);
    rep.kappa_closed = kappa_closed(s);
    rep.abs_error = std::abs(rep.kappa_closed - rep.kappa_quad);
    return rep;
}

}  // namespace fraclap
