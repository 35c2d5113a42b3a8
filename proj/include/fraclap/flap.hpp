#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <concepts>
#include <limits>
#include <vector>

#include "fraclap/error.hpp"
#include "fraclap/model.hpp"
#include "fraclap/params.hpp"
#include "fraclap/profiles.hpp"
#include "fraclap/quadrature.hpp"
#include "fraclap/specfun.hpp"

namespace fraclap {

// A function on the line given by samples on [left_edge, right_edge], a constant to the left
// and a power tail to the right.
template <class P>
concept LineProfile = requires(const P& p, double x) {
    { p.eval(x) } -> std::convertible_to<double>;
    { p.left_edge() } -> std::convertible_to<double>;
    { p.left_value() } -> std::convertible_to<double>;
    { p.right_edge() } -> std::convertible_to<double>;
    { p.right_tail() } -> std::convertible_to<PowerTail>;
    { p.singular_left() } -> std::convertible_to<bool>;
    { p.singular_right() } -> std::convertible_to<bool>;
    { p.knots() } -> std::convertible_to<const std::vector<double>&>;
    { p.s() } -> std::convertible_to<FracOrder>;
};

// int_X^inf y^gamma (y - x)^{-1-2s} dy for |x| < X, gamma < 2s.
inline double power_moment(double x, double X, double gamma, double s) {
    double sum = 0.0, coef = 1.0, xk = 1.0;
    const double Xg = std::pow(X, gamma - 2.0 * s);
    for (int k = 0; k < 2000; ++k) {
        const double term = coef * xk * Xg / (2.0 * s + k - gamma);
        sum += term;
        if (std::abs(term) <= 1e-17 * std::abs(sum)) break;
        coef *= (1.0 + 2.0 * s + k) / (k + 1.0);
        xk *= x / X;
    }
    return sum;
}

// int_X^inf (u0 - tail(y)) (y - x)^{-1-2s} dy
inline double tail_contribution(double u0, const PowerTail& tail, double x, double X, double s) {
    double r = (u0 - tail.alpha) * std::pow(X - x, -2.0 * s) / (2.0 * s);
    if (tail.beta != 0.0) r -= tail.beta * power_moment(x, X, tail.gamma, s);
    return r;
}

struct FlapValue {
    double value = 0.0;
    double abs_error = 0.0;
};

// (-Delta)^s p at x: symmetric-difference near field, adaptive far field, closed-form exterior and tail.
template <LineProfile P>
FlapValue flap_at_detailed(const P& p, double x, const QuadratureParams& qp) {
    qp.validate();
    const FracOrder so = p.s();
    const double s = so.value();
    const double c = norm_constant(1, so);
    const double lo = p.left_edge(), hi = p.right_edge();
    if (!(x > lo)) throw DomainError("flap_at: point must lie right of the left edge");
    if (p.singular_right() && !(x < hi)) throw DomainError("flap_at: point must lie left of the right edge");
    const double u0 = p.eval(x);

    double r0 = std::min(qp.split_radius, 0.5 * (x - lo));
    if (p.singular_right()) r0 = std::min(r0, 0.5 * (hi - x));
    double X = std::max({qp.far_cutoff, hi, x + 2.0 * r0});
    X = std::max(X, 2.0 * std::abs(x));
    const auto& knots = p.knots();
    const double piece_tol = qp.tol / (4.0 * c);
    const quad::Tolerance tol{piece_tol, 0.0, 20000 + 2 * static_cast<int>(knots.size())};

    // near field; the innermost strip uses the quadratic model D(z) ~ z^2, which is exact for a
    // piecewise cubic inside the piece containing x
    double dknot = 0.0;
    if (!knots.empty()) {
        dknot = std::numeric_limits<double>::infinity();
        for (double k : knots) dknot = std::min(dknot, std::abs(k - x));
    }
    const double z1 = std::max(1e-4 * r0, std::min(0.5 * dknot, 0.1 * r0));
    auto D = [&](double z) { return 2.0 * u0 - p.eval(x + z) - p.eval(x - z); };
    double near = D(z1) * std::pow(z1, -2.0 * s) / (2.0 - 2.0 * s);
    std::vector<double> br;
    for (double z = 2.0 * z1; z < r0; z *= 2.0) br.push_back(z);
    for (double k : knots) {
        const double d = std::abs(k - x);
        if (d > z1 && d < r0) br.push_back(d);
    }
    auto nres = quad::integrate([&](double z) { return D(z) * std::pow(z, -1.0 - 2.0 * s); }, z1, r0, tol, br);
    near += nres.value;

    // far field on [lo, x - r0] and [x + r0, X]
    auto kernel_term = [&](double y) { return (u0 - p.eval(y)) * std::pow(std::abs(x - y), -1.0 - 2.0 * s); };
    std::vector<double> bl, brr;
    for (double d = 2.0 * r0; x - d > lo; d *= 2.0) bl.push_back(x - d);
    for (double d = 2.0 * r0; x + d < X; d *= 2.0) brr.push_back(x + d);
    if (p.singular_left()) {
        const double w = x - r0 - lo;
        for (int k = 1; k <= qp.panels_near; ++k) bl.push_back(lo + w * std::ldexp(1.0, -k));
    }
    if (p.singular_right()) {
        const double w = hi - x - r0;
        for (int k = 1; k <= qp.panels_near; ++k) brr.push_back(hi - w * std::ldexp(1.0, -k));
    }
    brr.push_back(hi);
    if (X > 2.0 * hi && hi > 0.0) {
        auto g = quad::geometric_breaks(std::max(hi, x + r0), X, qp.panels_far);
        brr.insert(brr.end(), g.begin(), g.end());
    }
    for (double k : knots) {
        if (k > lo && k < x - r0) bl.push_back(k);
        else if (k > x + r0 && k < X) brr.push_back(k);
    }
    auto lres = quad::integrate(kernel_term, lo, x - r0, tol, bl);
    auto rres = quad::integrate(kernel_term, x + r0, X, tol, brr);

    const double left_ext = (u0 - p.left_value()) * std::pow(x - lo, -2.0 * s) / (2.0 * s);
    const double right_ext = tail_contribution(u0, p.right_tail(), x, X, s);

    FlapValue out;
    out.value = c * (near + lres.value + rres.value + left_ext + right_ext);
    out.abs_error = c * (nres.abs_error + lres.abs_error + rres.abs_error);
    if (!nres.converged || !lres.converged || !rres.converged)
        throw QuadratureError("flap_at", out.abs_error, qp.tol);
    return out;
}

template <LineProfile P>
double flap_at(const P& p, double x, const QuadratureParams& qp) {
    return flap_at_detailed(p, x, qp).value;
}

// max over sample of |(-Delta)^s p(x) - f(p(x))|
template <LineProfile P>
double residual(const P& p, const Nonlinearity& f, const QuadratureParams& qp, const std::vector<double>& sample) {
    double r = 0.0;
    for (double x : sample) r = std::max(r, std::abs(flap_at(p, x, qp) - f(p.eval(x))));
    return r;
}

// ---------------------------------------------------------------------------
// Discrete operator on a uniform grid

namespace detail {

// phi(x) = expm1(x)/x
inline double expm1_ratio(double x) { return std::abs(x) < 1e-12 ? 1.0 + 0.5 * x : std::expm1(x) / x; }

// D(M) = G(M-1) - G(M) where G'' = t^{-1-2s}; equals sum_{m>=M} w_m for M >= 2.
inline double tail_weight(double M, double s) {
    const double l = std::log1p(-1.0 / M);
    return -std::pow(M, 1.0 - 2.0 * s) * l * expm1_ratio((1.0 - 2.0 * s) * l) / (2.0 * s);
}

// Far-field hat weights w_m (dimensionless, scaled by h^{-2s}).
inline std::vector<double> hat_weights(int count, double s) {
    std::vector<double> w(static_cast<std::size_t>(std::max(count, 2)), 0.0);
    w[1] = 1.0 / (2.0 * s) - tail_weight(2.0, s);
    for (int m = 2; m < count; ++m) {
        if (m < 24) {
            w[static_cast<std::size_t>(m)] = tail_weight(m, s) - tail_weight(m + 1.0, s);
        } else {
            const double a = 1.0 + 2.0 * s;
            const double t = m;
            const double k0 = std::pow(t, -a);
            const double k2 = a * (a + 1.0) * k0 / (t * t);
            const double k4 = k2 * (a + 2.0) * (a + 3.0) / (t * t);
            const double k6 = k4 * (a + 4.0) * (a + 5.0) / (t * t);
            w[static_cast<std::size_t>(m)] = k0 + k2 / 12.0 + k4 / 360.0 + k6 / 20160.0;
        }
    }
    return w;
}

// sum_{m >= M} w_m
inline double hat_tail(int M, double s) { return M <= 1 ? 1.0 / (2.0 * s) : tail_weight(M, s); }

struct Correction {
    int row;  // 1-based distance index from the boundary (node k sits at a + k h)
    int col;  // 1-based, 0 denotes the exterior datum
    double delta;
};

// Changes to the dimensionless operator when cells 0..J0-1 next to a boundary at a use
// u = e + (y-a)^s v with v piecewise linear, and rows 1..J0-1 use the matching second derivative.
inline std::vector<Correction> boundary_corrections(int n, int J0, double s) {
    std::vector<Correction> out;
    if (J0 < 2) return out;
    static const quad::GaussRule gl = quad::gauss_legendre(16);
    const double a = 1.0 + 2.0 * s;
    auto K = [a](double d) { return std::pow(std::abs(d), -a); };
    for (int i = 1; i <= n; ++i) {
        std::vector<double> row(static_cast<std::size_t>(J0 + 2), 0.0);
        const double xi = i;
        for (int k = 0; k < J0; ++k) {
            if (k == i - 1 || k == i) continue;
            if (k == 0) {
                // y = t^4 removes the y^s endpoint singularity
                double W = 0.0, P = 0.0;
                for (std::size_t g = 0; g < gl.nodes.size(); ++g) {
                    const double t = 0.5 * (gl.nodes[g] + 1.0);
                    const double y = t * t * t * t;
                    const double jac = 4.0 * t * t * t * 0.5 * gl.weights[g];
                    W += jac * std::pow(y, s) * K(y - xi);
                    P += jac * y * K(y - xi);
                }
                row[1] += -(W - P);
                continue;
            }
            double WL = 0.0, WR = 0.0, PL = 0.0, PR = 0.0;
            for (std::size_t g = 0; g < gl.nodes.size(); ++g) {
                const double th = 0.5 * (gl.nodes[g] + 1.0);
                const double y = k + th;
                const double w = 0.5 * gl.weights[g] * K(y - xi);
                const double ys = std::pow(y, s);
                WL += w * ys * (1.0 - th);
                WR += w * ys * th;
                PL += w * (1.0 - th);
                PR += w * th;
            }
            row[static_cast<std::size_t>(k)] += -(WL * std::pow(k, -s) - PL);
            row[static_cast<std::size_t>(k + 1)] += -(WR * std::pow(k + 1.0, -s) - PR);
        }
        if (i <= J0 - 1) {
            // second derivative of e + x^s v, v by central differences; v_0 extrapolated linearly at i = 1
            const double f = -1.0 / (2.0 - 2.0 * s);
            if (i == 1) {
                row[1] += f * (s * s - 3.0 * s) - 2.0 / (2.0 - 2.0 * s);
                row[2] += f * std::pow(2.0, 1.0 - s) * s + 1.0 / (2.0 - 2.0 * s);
            } else {
                const double cp = (s / xi + 1.0) * std::pow(xi / (xi + 1.0), s);
                const double cm = (1.0 - s / xi) * std::pow(xi / (xi - 1.0), s);
                const double c0 = s * (s - 1.0) / (xi * xi) - 2.0;
                row[static_cast<std::size_t>(i + 1)] += f * cp + 1.0 / (2.0 - 2.0 * s);
                row[static_cast<std::size_t>(i - 1)] += f * cm + 1.0 / (2.0 - 2.0 * s);
                row[static_cast<std::size_t>(i)] += f * c0 - 2.0 / (2.0 - 2.0 * s);
            }
        }
        double sum = 0.0;
        for (int j = 1; j <= std::min(J0 + 1, n); ++j) {
            const double d = row[static_cast<std::size_t>(j)];
            if (d != 0.0) {
                out.push_back({i, j, d});
                sum += d;
            }
        }
        // near-model terms may reference node J0+1 > n only when the grid is tiny; those belong to nothing
        out.push_back({i, 0, -sum});
    }
    return out;
}

}  // namespace detail

// Grid a + j h, j = 1..n. Left datum constant for y <= a; right datum tail(y) at nodes j > n
// (constant tails describe an interval (a, a + (n+1) h) with constant exterior).
struct DiscreteGrid {
    FracOrder s{0.5};
    double a = 0.0;
    double h = 1.0;
    int n = 1;
    double left_value = 0.0;
    PowerTail right{};
    int boundary_cells = -1;  // weighted cells next to constant data; -1 = automatic, 0 = off
    bool weight_left = true;
    bool weight_right = true;  // only meaningful for a constant right datum

    double node(int j) const { return a + h * j; }
    double b() const { return a + h * (n + 1); }
    bool right_constant() const { return right.beta == 0.0; }
    int weighted_cells() const {
        const int cap = right_constant() ? n / 2 : n;
        const int J = boundary_cells < 0 ? 64 : boundary_cells;
        return std::max(0, std::min(J, cap));
    }
};

struct DiscreteOperator {
    Eigen::MatrixXd A;
    Eigen::VectorXd load;        // contribution of the grid's exterior data
    Eigen::VectorXd unit_load;   // contribution of exterior data identically 1 on both sides
    Eigen::VectorXd left_unit;   // contribution of left datum 1 (right datum 0)
};

inline DiscreteOperator assemble_operator(const DiscreteGrid& g) {
    const double s = g.s.value();
    const int n = g.n;
    if (n < 1 || !(g.h > 0.0)) throw DomainError("grid needs n >= 1 and h > 0");
    const double scale = norm_constant(1, g.s) * std::pow(g.h, -2.0 * s);
    const int far_nodes = g.right_constant() ? 0 : std::max(4 * n, 1024);
    const auto w = detail::hat_weights(n + far_nodes + 2, s);
    const double nearc = 1.0 / (2.0 - 2.0 * s);

    DiscreteOperator op;
    op.A.resize(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const int m = std::abs(i - j);
            double v;
            if (m == 0) v = 1.0 / s + 2.0 * nearc;
            else if (m == 1) v = -(nearc + w[1]);
            else v = -w[static_cast<std::size_t>(m)];
            op.A(i, j) = v;
        }
    }
    Eigen::VectorXd bl(n), br(n);
    for (int i = 1; i <= n; ++i) {
        bl(i - 1) = -(detail::hat_tail(i, s) + (i == 1 ? nearc : 0.0));
        const int M = n + 1 - i;
        br(i - 1) = -(detail::hat_tail(M, s) + (M == 1 ? nearc : 0.0));
    }
    Eigen::VectorXd tail_part = Eigen::VectorXd::Zero(n);
    if (!g.right_constant()) {
        // direct sum over exterior nodes, then the continuum remainder
        const double X = g.node(n + far_nodes) + 0.5 * g.h;
        std::vector<double> pw(static_cast<std::size_t>(far_nodes));
        for (int j = 0; j < far_nodes; ++j) pw[static_cast<std::size_t>(j)] = std::pow(g.node(n + 1 + j), g.right.gamma);
        for (int i = 1; i <= n; ++i) {
            double acc = 0.0;
            for (int j = n + 1; j <= n + far_nodes; ++j) {
                const int m = j - i;
                const double a = -(w[static_cast<std::size_t>(m)] + (m == 1 ? nearc : 0.0));
                acc += a * pw[static_cast<std::size_t>(j - n - 1)];
            }
            const double rem = -power_moment(g.node(i), X, g.right.gamma, s) * std::pow(g.h, 2.0 * s);
            tail_part(i - 1) = acc + rem;
        }
    }

    const int J0 = g.weighted_cells();
    if (J0 >= 2) {
        const auto corr = detail::boundary_corrections(n, J0, s);
        if (g.weight_left) {
            for (const auto& c : corr) {
                if (c.col == 0) bl(c.row - 1) += c.delta;
                else op.A(c.row - 1, c.col - 1) += c.delta;
            }
        }
        if (g.right_constant() && g.weight_right) {
            for (const auto& c : corr) {
                const int r = n + 1 - c.row;
                if (c.col == 0) br(r - 1) += c.delta;
                else op.A(r - 1, n - c.col) += c.delta;
            }
        }
    }
    op.A *= scale;
    bl *= scale;
    br *= scale;
    tail_part *= scale;
    op.left_unit = bl;
    op.unit_load = bl + br;
    op.load = g.left_value * bl + g.right.alpha * br + g.right.beta * tail_part;
    return op;
}

// Operator for an interval profile skeleton (uniform grid, constant exterior on each side).
inline DiscreteOperator flap_matrix(const IntervalProfile& p, int boundary_cells = -1) {
    const auto& x = p.nodes();
    const int n = static_cast<int>(x.size());
    const double h = (p.b() - p.a()) / (n + 1);
    if (std::abs(x.front() - (p.a() + h)) > 1e-9 * h || std::abs(x.back() - (p.b() - h)) > 1e-9 * h)
        throw DomainError("flap_matrix requires nodes a + j h with h = (b - a)/(n + 1)");
    DiscreteGrid g;
    g.s = p.s();
    g.a = p.a();
    g.h = h;
    g.n = n;
    g.left_value = p.exterior_left();
    g.right = {p.exterior_right(), 0.0, 0.0};
    g.boundary_cells = boundary_cells;
    return assemble_operator(g);
}

}  // namespace fraclap
