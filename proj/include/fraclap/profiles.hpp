#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "fraclap/error.hpp"
#include "fraclap/specfun.hpp"

namespace fraclap {

// Shape-preserving piecewise cubic Hermite interpolant (Fritsch-Carlson slopes).
class MonotoneCubic {
public:
    MonotoneCubic() = default;
    MonotoneCubic(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
        const std::size_t n = x_.size();
        if (n != y_.size() || n < 2) throw ProfileError("monotone cubic needs >= 2 matching points");
        std::vector<double> h(n - 1), del(n - 1);
        for (std::size_t k = 0; k + 1 < n; ++k) {
            h[k] = x_[k + 1] - x_[k];
            if (!(h[k] > 0.0)) throw ProfileError("interpolation nodes must be strictly increasing");
            del[k] = (y_[k + 1] - y_[k]) / h[k];
        }
        d_.assign(n, 0.0);
        if (n == 2) {
            d_[0] = d_[1] = del[0];
            return;
        }
        for (std::size_t k = 1; k + 1 < n; ++k) {
            if (del[k - 1] * del[k] <= 0.0) continue;
            const double w1 = 2.0 * h[k] + h[k - 1], w2 = h[k] + 2.0 * h[k - 1];
            d_[k] = (w1 + w2) / (w1 / del[k - 1] + w2 / del[k]);
        }
        d_[0] = end_slope(h[0], h[1], del[0], del[1]);
        d_[n - 1] = end_slope(h[n - 2], h[n - 3], del[n - 2], del[n - 3]);
    }

    double operator()(double t) const {
        const std::size_t n = x_.size();
        std::size_t k;
        if (t <= x_.front()) k = 0;
        else if (t >= x_.back()) k = n - 2;
        else k = static_cast<std::size_t>(std::upper_bound(x_.begin(), x_.end(), t) - x_.begin()) - 1;
        const double h = x_[k + 1] - x_[k];
        const double u = (t - x_[k]) / h;
        const double u2 = u * u, u3 = u2 * u;
        return (2.0 * u3 - 3.0 * u2 + 1.0) * y_[k] + (u3 - 2.0 * u2 + u) * h * d_[k] + (-2.0 * u3 + 3.0 * u2) * y_[k + 1]
               + (u3 - u2) * h * d_[k + 1];
    }

    const std::vector<double>& x() const { return x_; }
    const std::vector<double>& y() const { return y_; }

private:
    static double end_slope(double h0, double h1, double del0, double del1) {
        double d = ((2.0 * h0 + h1) * del0 - h0 * del1) / (h0 + h1);
        if (d * del0 <= 0.0) d = 0.0;
        else if (del0 * del1 <= 0.0 && std::abs(d) > std::abs(3.0 * del0)) d = 3.0 * del0;
        return d;
    }

    std::vector<double> x_, y_, d_;
};

// alpha + beta * y^gamma for y > 0
struct PowerTail {
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.0;
    double operator()(double y) const { return beta == 0.0 ? alpha : alpha + beta * std::pow(y, gamma); }
};

// Sampled solution on (0, L] with closures ell0 x^s near 0 and rho - C x^{-2s} beyond L.
class HalfLineProfile {
public:
    HalfLineProfile(FracOrder s, std::vector<double> nodes, std::vector<double> values, double ell0, double rho_tail,
                    double c_tail, bool solution = false)
        : s_(s), nodes_(std::move(nodes)), values_(std::move(values)), ell0_(ell0), rho_(rho_tail), c_(c_tail),
          solution_(solution) {
        validate();
        interp_ = MonotoneCubic(nodes_, values_);
    }

    double operator()(double x) const { return eval(x); }
    double eval(double x) const {
        if (x <= 0.0) return 0.0;
        if (x < nodes_.front()) return ell0_ * std::pow(x, s_.value());
        if (x > L()) return rho_ - c_ * std::pow(x, -2.0 * s_.value());
        return interp_(x);
    }

    FracOrder s() const { return s_; }
    const std::vector<double>& nodes() const { return nodes_; }
    const std::vector<double>& values() const { return values_; }
    double ell0() const { return ell0_; }
    double rho_tail() const { return rho_; }
    double c_tail() const { return c_; }
    double L() const { return nodes_.back(); }
    bool is_solution() const { return solution_; }

    // Interface shared with the other profile kinds (used by the operator evaluator).
    double left_edge() const { return 0.0; }
    double left_value() const { return 0.0; }
    double right_edge() const { return L(); }
    bool singular_left() const { return true; }
    bool singular_right() const { return false; }
    PowerTail right_tail() const { return {rho_, -c_, -2.0 * s_.value()}; }
    const std::vector<double>& knots() const { return nodes_; }

private:
    void validate() const {
        if (nodes_.empty() || nodes_.size() != values_.size()) throw ProfileError("nodes and values must match and be non-empty");
        if (nodes_.size() < 2) throw ProfileError("profile needs at least two nodes");
        if (!(nodes_.front() > 0.0)) throw ProfileError("nodes must lie in (0, L]");
        for (std::size_t i = 1; i < nodes_.size(); ++i)
            if (!(nodes_[i] > nodes_[i - 1])) throw ProfileError("nodes must be strictly increasing");
        if (ell0_ < 0.0) throw ProfileError("ell0 must be >= 0");
        if (c_ < 0.0) throw ProfileError("c_tail must be >= 0");
        const double sv = s_.value();
        const double tail_at_L = rho_ - c_ * std::pow(L(), -2.0 * sv);
        if (std::abs(values_.back() - tail_at_L) > 1e-8)
            throw ProfileError("tail closure is discontinuous at L");
        const double near = ell0_ * std::pow(nodes_.front(), sv);
        if (std::abs(values_.front() - near) > 1e-6 * std::max(std::abs(rho_), 1e-300))
            throw ProfileError("near-zero closure is discontinuous at the first node");
        if (solution_) {
            for (std::size_t i = 0; i < values_.size(); ++i) {
                if (values_[i] < 0.0 || values_[i] > rho_) throw ProfileError("solution values must lie in [0, rho_tail]");
                if (i > 0 && values_[i] < values_[i - 1]) throw ProfileError("solution values must be nondecreasing");
            }
        }
    }

    FracOrder s_;
    std::vector<double> nodes_;
    std::vector<double> values_;
    double ell0_;
    double rho_;
    double c_;
    bool solution_;
    MonotoneCubic interp_;
};

// Sampled function on a uniform grid inside (a, b), constant data outside.
class IntervalProfile {
public:
    IntervalProfile(FracOrder s, double a, double b, std::vector<double> nodes, std::vector<double> values,
                    double exterior)
        : IntervalProfile(s, a, b, std::move(nodes), std::move(values), exterior, exterior) {}

    IntervalProfile(FracOrder s, double a, double b, std::vector<double> nodes, std::vector<double> values,
                    double exterior_left, double exterior_right)
        : s_(s), a_(a), b_(b), nodes_(std::move(nodes)), values_(std::move(values)), ext_l_(exterior_left),
          ext_r_(exterior_right) {
        validate();
        std::vector<double> x{a_}, y{ext_l_};
        x.insert(x.end(), nodes_.begin(), nodes_.end());
        y.insert(y.end(), values_.begin(), values_.end());
        x.push_back(b_);
        y.push_back(ext_r_);
        interp_ = MonotoneCubic(std::move(x), std::move(y));
    }

    // n nodes at a + j h, h = (b-a)/(n+1), all set to value.
    static IntervalProfile uniform(FracOrder s, double a, double b, int n, double value, double exterior) {
        return uniform(s, a, b, n, value, exterior, exterior);
    }
    static IntervalProfile uniform(FracOrder s, double a, double b, int n, double value, double ext_left,
                                   double ext_right) {
        if (n < 1) throw ProfileError("interval grid needs at least one node");
        const double h = (b - a) / (n + 1);
        std::vector<double> x(static_cast<std::size_t>(n)), v(static_cast<std::size_t>(n), value);
        for (int j = 0; j < n; ++j) x[static_cast<std::size_t>(j)] = a + h * (j + 1);
        return IntervalProfile(s, a, b, std::move(x), std::move(v), ext_left, ext_right);
    }

    IntervalProfile with_values(std::vector<double> values) const {
        return IntervalProfile(s_, a_, b_, nodes_, std::move(values), ext_l_, ext_r_);
    }

    double operator()(double x) const { return eval(x); }
    double eval(double x) const {
        if (x <= a_) return ext_l_;
        if (x >= b_) return ext_r_;
        return interp_(x);
    }

    FracOrder s() const { return s_; }
    double a() const { return a_; }
    double b() const { return b_; }
    const std::vector<double>& nodes() const { return nodes_; }
    const std::vector<double>& values() const { return values_; }
    double exterior() const { return ext_l_; }
    double exterior_left() const { return ext_l_; }
    double exterior_right() const { return ext_r_; }
    double spacing() const { return nodes_.size() > 1 ? nodes_[1] - nodes_[0] : (b_ - a_) / 2.0; }

    double left_edge() const { return a_; }
    double left_value() const { return ext_l_; }
    double right_edge() const { return b_; }
    bool singular_left() const { return true; }
    bool singular_right() const { return true; }
    PowerTail right_tail() const { return {ext_r_, 0.0, 0.0}; }
    const std::vector<double>& knots() const { return nodes_; }

private:
    void validate() const {
        if (!(a_ < b_)) throw ProfileError("interval requires a < b");
        if (nodes_.empty() || nodes_.size() != values_.size()) throw ProfileError("nodes and values must match and be non-empty");
        if (!(nodes_.front() > a_) || !(nodes_.back() < b_)) throw ProfileError("nodes must lie in (a, b)");
        if (nodes_.size() > 1) {
            const double h = nodes_[1] - nodes_[0];
            for (std::size_t i = 1; i < nodes_.size(); ++i) {
                const double hi = nodes_[i] - nodes_[i - 1];
                if (!(hi > 0.0)) throw ProfileError("nodes must be strictly increasing");
                if (std::abs(hi - h) > 1e-12 * std::max(1.0, std::abs(nodes_[i]))) throw ProfileError("node spacing must be uniform");
            }
        }
    }

    FracOrder s_;
    double a_, b_;
    std::vector<double> nodes_;
    std::vector<double> values_;
    double ext_l_, ext_r_;
    MonotoneCubic interp_;
};

// Closed-form function on [lo, hi] with constant data left of lo and a power tail right of hi.
class AnalyticProfile {
public:
    AnalyticProfile(FracOrder s, std::function<double(double)> fn, double lo, double hi, double left_value,
                    PowerTail tail, bool singular_left = true, bool singular_right = false,
                    std::vector<double> knots = {})
        : s_(s), fn_(std::move(fn)), lo_(lo), hi_(hi), left_(left_value), tail_(tail), sing_l_(singular_left),
          sing_r_(singular_right), knots_(std::move(knots)) {
        if (!(lo < hi)) throw ProfileError("analytic profile requires lo < hi");
    }

    double operator()(double x) const { return eval(x); }
    double eval(double x) const {
        if (x <= lo_) return left_;
        if (x >= hi_) return tail_(x);
        return fn_(x);
    }

    FracOrder s() const { return s_; }
    double left_edge() const { return lo_; }
    double left_value() const { return left_; }
    double right_edge() const { return hi_; }
    bool singular_left() const { return sing_l_; }
    bool singular_right() const { return sing_r_; }
    PowerTail right_tail() const { return tail_; }
    const std::vector<double>& knots() const { return knots_; }

private:
    FracOrder s_;
    std::function<double(double)> fn_;
    double lo_, hi_, left_;
    PowerTail tail_;
    bool sing_l_, sing_r_;
    std::vector<double> knots_;
};

inline double eval_profile(const HalfLineProfile& p, double x) { return p.eval(x); }
inline double eval_profile(const IntervalProfile& p, double x) { return p.eval(x); }

// Strictly increasing nodal values and eval(x - lam) <= eval(x) for lam in {0.1, 1, 10}.
inline bool monotonicity_check(const HalfLineProfile& p) {
    const auto& v = p.values();
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i] > v[i - 1])) return false;
    const double slack = 1e-12 * std::max(1.0, std::abs(p.rho_tail()));
    const double L = p.L();
    constexpr int m = 4000;
    for (double lam : {0.1, 1.0, 10.0}) {
        for (int i = 0; i <= m; ++i) {
            const double x = -1.0 + (2.0 * L + 1.0) * i / m;
            if (p.eval(x - lam) > p.eval(x) + slack) return false;
        }
        for (double x : p.nodes())
            if (p.eval(x - lam) > p.eval(x) + slack) return false;
    }
    return true;
}

}  // namespace fraclap
