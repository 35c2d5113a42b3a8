#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fraclap/error.hpp"

namespace fraclap {

// Nonlinearity f with primitive F(t) = int_0^t f and Lipschitz bounds.
class Nonlinearity {
public:
    using Fn = std::function<double(double)>;
    using LipFn = std::function<double(double, double)>;

    Nonlinearity(std::string name, Fn f, Fn primitive, LipFn lipschitz, Fn derivative = {})
        : name_(std::move(name)), f_(std::move(f)), F_(std::move(primitive)), lip_(std::move(lipschitz)),
          df_(std::move(derivative)) {}

    double operator()(double t) const { return f_(t); }
    double eval(double t) const { return f_(t); }
    double primitive(double t) const { return F_(t); }
    // Lipschitz bound on [a, b]
    double lipschitz(double a, double b) const { return lip_(std::min(a, b), std::max(a, b)); }
    bool has_derivative() const { return static_cast<bool>(df_); }
    double derivative(double t) const {
        if (df_) return df_(t);
        const double h = 1e-6 * std::max(1.0, std::abs(t));
        return (f_(t + h) - f_(t - h)) / (2.0 * h);
    }
    const std::string& name() const { return name_; }

private:
    std::string name_;
    Fn f_;
    Fn F_;
    LipFn lip_;
    Fn df_;
};

// Polynomial sum c_k t^k.
class Polynomial {
public:
    explicit Polynomial(std::vector<double> coeffs) : c_(std::move(coeffs)) {
        if (c_.empty()) c_.push_back(0.0);
    }
    double operator()(double t) const {
        double r = 0.0;
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) r = r * t + *it;
        return r;
    }
    Polynomial derivative() const {
        std::vector<double> d;
        for (std::size_t k = 1; k < c_.size(); ++k) d.push_back(static_cast<double>(k) * c_[k]);
        return Polynomial(d);
    }
    Polynomial antiderivative() const {
        std::vector<double> d{0.0};
        for (std::size_t k = 0; k < c_.size(); ++k) d.push_back(c_[k] / static_cast<double>(k + 1));
        return Polynomial(d);
    }
    // Upper bound for max |p| on [a,b]: dense sample plus a derivative-based gap bound.
    double max_abs(double a, double b) const {
        if (a == b) return std::abs((*this)(a));
        constexpr int n = 2048;
        const double dx = (b - a) / n;
        const Polynomial d = derivative();
        double m = 0.0, md = 0.0;
        for (int i = 0; i <= n; ++i) {
            const double t = a + dx * i;
            m = std::max(m, std::abs((*this)(t)));
            md = std::max(md, std::abs(d(t)));
        }
        // crude bound on |p''| through the coefficient magnitudes
        const Polynomial dd = d.derivative();
        double bound2 = 0.0;
        const double r = std::max(std::abs(a), std::abs(b));
        for (std::size_t k = 0; k < dd.c_.size(); ++k) bound2 += std::abs(dd.c_[k]) * std::pow(r, static_cast<double>(k));
        return m + 0.5 * dx * md + 0.125 * dx * dx * bound2;
    }
    const std::vector<double>& coefficients() const { return c_; }

private:
    std::vector<double> c_;
};

inline Nonlinearity make_polynomial_nonlinearity(std::string name, const std::vector<double>& coeffs) {
    Polynomial p(coeffs);
    Polynomial P = p.antiderivative();
    Polynomial dp = p.derivative();
    return Nonlinearity(std::move(name), p, P, [dp](double a, double b) { return dp.max_abs(a, b); }, dp);
}

struct ConditionFReport {
    enum class Failure { none, not_a_zero, primitive_not_below };
    double rho = 0.0;
    bool holds = false;
    std::optional<double> witness;
    double margin = 0.0;
    Failure failure = Failure::none;
    double f_at_rho = 0.0;
};

inline double zero_tolerance(const Nonlinearity& f, double rho) {
    return 1e-10 * std::max(1.0, f.lipschitz(0.0, rho)) * rho;
}

// Checks F(t) < F(rho) on [0, rho) by dense sampling with local refinement, and f(rho) = 0.
inline ConditionFReport check_condition_F(const Nonlinearity& f, double rho, int samples = 10000) {
    if (!(rho > 0.0)) throw DomainError("rho must be positive");
    ConditionFReport rep;
    rep.rho = rho;
    rep.f_at_rho = f(rho);
    const double Frho = f.primitive(rho);
    const double dt = rho / samples;
    double margin = std::numeric_limits<double>::infinity();
    std::vector<std::pair<double, double>> candidates;  // (F(t), t) local maxima of the sample
    double prev2 = -std::numeric_limits<double>::infinity(), prev1 = f.primitive(0.0);
    auto consider = [&](double t, double Ft) {
        const double gap = Frho - Ft;
        if (gap < margin) margin = gap;
        if (!(gap > 0.0) && !rep.witness) rep.witness = t;
    };
    consider(0.0, prev1);
    for (int i = 1; i < samples; ++i) {
        const double t = dt * i;
        const double Ft = f.primitive(t);
        consider(t, Ft);
        if (prev1 >= prev2 && prev1 >= Ft) candidates.emplace_back(prev1, t - dt);
        prev2 = prev1;
        prev1 = Ft;
    }
    std::sort(candidates.begin(), candidates.end(), std::greater<>());
    if (candidates.size() > 16) candidates.resize(16);
    for (const auto& [Fc, tc] : candidates) {
        const double lo = std::max(0.0, tc - dt), hi = std::min(rho, tc + dt);
        constexpr int m = 200;
        for (int j = 0; j <= m; ++j) {
            const double t = lo + (hi - lo) * j / m;
            if (t < rho) consider(t, f.primitive(t));
        }
    }
    rep.margin = margin;
    if (std::abs(rep.f_at_rho) > zero_tolerance(f, rho)) {
        rep.failure = ConditionFReport::Failure::not_a_zero;
        rep.holds = false;
        if (!rep.witness) rep.witness = rho;
        return rep;
    }
    rep.holds = !rep.witness.has_value();
    if (!rep.holds) rep.failure = ConditionFReport::Failure::primitive_not_below;
    return rep;
}

// f_delta: linear on [-delta, 0) vanishing at -delta, zero below, f on [0, inf).
inline Nonlinearity regularize_delta(const Nonlinearity& f, double delta) {
    if (delta < 0.0) throw DomainError("delta must be >= 0");
    const double f0 = f(0.0);
    if (f0 >= 0.0 && delta > 0.0) throw DomainError("delta > 0 requires f(0) < 0");
    if (f0 < 0.0 && delta == 0.0) throw DomainError("f(0) < 0 requires delta > 0");
    if (delta == 0.0) return f;
    auto base = std::make_shared<Nonlinearity>(f);
    auto fd = [base, f0, delta](double t) {
        if (t >= 0.0) return (*base)(t);
        if (t <= -delta) return 0.0;
        return f0 * (t + delta) / delta;
    };
    auto Fd = [base, f0, delta](double t) {
        if (t >= 0.0) return base->primitive(t);
        const double u = std::max(t, -delta) + delta;
        return f0 * u * u / (2.0 * delta) - 0.5 * f0 * delta;
    };
    auto lip = [base, f0, delta](double a, double b) {
        double L = 0.0;
        if (b > 0.0) L = std::max(L, base->lipschitz(std::max(a, 0.0), b));
        if (a < 0.0 && b > -delta) L = std::max(L, std::abs(f0) / delta);
        return L;
    };
    auto dfd = [base, f0, delta](double t) {
        if (t >= 0.0) return base->derivative(t);
        if (t <= -delta) return 0.0;
        return f0 / delta;
    };
    return Nonlinearity(f.name() + "+delta", fd, Fd, lip, dfd);
}

// f(0) delta / 2 + F(rho) > 0
inline bool delta_admissible(const Nonlinearity& f, double rho, double delta) {
    const double f0 = f(0.0);
    if (!(f0 < 0.0)) throw DomainError("delta_admissible requires f(0) < 0");
    if (!(rho > 0.0) || !(delta > 0.0)) throw DomainError("rho and delta must be positive");
    return 0.5 * f0 * delta + f.primitive(rho) > 0.0;
}

using ParamMap = std::map<std::string, double>;

// Catalog: "linear-saturation" (lambda), "allen-cahn", "custom-polynomial" (c0, c1, ...), "zero".
inline Nonlinearity model_catalog(const std::string& name, const ParamMap& params = {}) {
    auto get = [&](const std::string& k, double dflt) {
        auto it = params.find(k);
        return it == params.end() ? dflt : it->second;
    };
    if (name == "linear-saturation") {
        const double lam = get("lambda", 1.0);
        if (!(lam > 0.0)) throw DomainError("linear-saturation requires lambda > 0");
        return Nonlinearity(
            "linear-saturation", [lam](double t) { return lam * (1.0 - t); },
            [lam](double t) { return lam * (t - 0.5 * t * t); }, [lam](double, double) { return lam; },
            [lam](double) { return -lam; });
    }
    if (name == "allen-cahn") return make_polynomial_nonlinearity("allen-cahn", {0.0, 1.0, 0.0, -1.0});
    if (name == "custom-polynomial") {
        std::vector<double> c;
        for (int k = 0;; ++k) {
            auto it = params.find("c" + std::to_string(k));
            if (it == params.end()) break;
            c.push_back(it->second);
        }
        if (c.empty()) throw DomainError("custom-polynomial requires coefficients c0, c1, ...");
        for (const auto& [k, v] : params) {
            (void)v;
            if (k.size() < 2 || k[0] != 'c' || k.find_first_not_of("0123456789", 1) != std::string::npos
                || std::stoul(k.substr(1)) >= c.size())
                throw DomainError("custom-polynomial: unexpected parameter '" + k + "'");
        }
        return make_polynomial_nonlinearity("custom-polynomial", c);
    }
    if (name == "zero") return make_polynomial_nonlinearity("zero", {0.0});
    throw DomainError("unknown nonlinearity '" + name + "'");
}

}  // namespace fraclap
