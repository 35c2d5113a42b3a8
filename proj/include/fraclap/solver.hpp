#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "fraclap/error.hpp"
#include "fraclap/flap.hpp"
#include "fraclap/model.hpp"
#include "fraclap/params.hpp"
#include "fraclap/profiles.hpp"
#include "fraclap/quadrature.hpp"
#include "fraclap/specfun.hpp"

namespace fraclap {

struct SolveParams {
    int grid_n = 2048;
    double L = 80.0;                     // truncation radius of the half-line grid
    double newton_tol = 1e-9;            // sup-norm target for each fixed-point solve
    int max_iter = 20000;
    double damping = 1.0;                // relaxation of the monotone update
    std::vector<double> R_schedule;      // empty: {L/8, L/4, L/2, L}
    std::vector<double> delta_schedule;  // empty: {0} if f(0) >= 0, else 1e-1 ... 1e-8
    std::optional<double> monotone_L;    // empty: Lipschitz bound on the working range
    int boundary_cells = 64;             // weighted cells next to a boundary
    int tail_sweeps = 12;
    double stabilization_tol = 1e-6;

    double h() const { return L / grid_n; }

    void validate() const {
        if (grid_n < 64) throw ConfigError("grid_n must be >= 64");
        if (!(L > 0.0)) throw ConfigError("L must be positive");
        if (!(newton_tol > 0.0)) throw ConfigError("newton_tol must be positive");
        if (max_iter < 1) throw ConfigError("max_iter must be >= 1");
        if (!(damping > 0.0 && damping <= 1.0)) throw ConfigError("damping must lie in (0, 1]");
        for (std::size_t i = 1; i < R_schedule.size(); ++i)
            if (!(R_schedule[i] > R_schedule[i - 1])) throw ConfigError("R_schedule must be increasing");
        for (std::size_t i = 0; i < delta_schedule.size(); ++i) {
            if (delta_schedule[i] < 0.0) throw ConfigError("delta_schedule entries must be >= 0");
            if (i > 0 && !(delta_schedule[i] < delta_schedule[i - 1]))
                throw ConfigError("delta_schedule must be decreasing");
        }
        if (monotone_L && *monotone_L < 0.0) throw ConfigError("monotone_L must be >= 0");
        if (boundary_cells < 0) throw ConfigError("boundary_cells must be >= 0");
        if (tail_sweeps < 1) throw ConfigError("tail_sweeps must be >= 1");
        if (!(stabilization_tol > 0.0)) throw ConfigError("stabilization_tol must be positive");
    }
};

struct IntervalRun {
    double delta = 0.0;
    double R = 0.0;
    double sup_norm = 0.0;
    int iterations = 0;
};

struct HalfLineDiagnostics {
    double condition_margin = 0.0;
    double delta = 0.0;                  // regularization of the final stage
    double tail_c_exterior = 0.0;        // amplitude used in the exterior datum
    double rho_fit = 0.0;                // free two-parameter fit of rho - C x^{-2s} on [0.4L, 0.8L]
    double c_fit = 0.0;
    double tail_fit_rms = 0.0;           // rms misfit of that fit
    int tail_sweeps = 0;
    double tail_change = 0.0;            // last sup-norm change of the tail loop
    std::vector<double> delta_changes;   // sup-norm change between successive delta stages
    std::vector<IntervalRun> interval_runs;
    int violations_R = 0;
    int violations_delta = 0;
    int violations_comparison = 0;
    double max_node_value = 0.0;
    bool tail_conjectural = false;       // tail exponent 2s is an extrapolation for s <= 1/2
};

template <class Profile>
struct SolveReport {
    Profile profile;
    int iterations = 0;
    double final_residual = 0.0;
    double discrete_residual = 0.0;
    bool ordered_chain_ok = true;
    double sup_norm = 0.0;
    std::optional<HalfLineDiagnostics> diagnostics;
};

namespace detail {

enum class Direction { down, up, any };

struct Iterated {
    Eigen::VectorXd w;
    int iterations = 0;
    double increment = 0.0;
};

inline double working_lipschitz(const Nonlinearity& f, double lo, double hi, const SolveParams& sp) {
    const double lip = f.lipschitz(lo, hi);
    if (sp.monotone_L) {
        if (*sp.monotone_L + 1e-12 * std::max(1.0, lip) < lip)
            throw ConfigError("monotone_L = " + std::to_string(*sp.monotone_L)
                              + " is below the Lipschitz bound " + std::to_string(lip) + " on the working range");
        return *sp.monotone_L;
    }
    return lip;
}

// Newton steps on A w + load = f(w) once the monotone contraction has slowed down. Returns nothing
// if a step leaves the ordered band [lower, previous iterate] (or [lower, upper] when not descending).
inline std::optional<Iterated> newton_polish(const DiscreteOperator& op, const Nonlinearity& f, Eigen::VectorXd w,
                                             const SolveParams& sp, bool descending, double upper,
                                             const Eigen::VectorXd* lower, double slack) {
    const Eigen::Index n = w.size();
    Eigen::VectorXd F(n);
    for (int it = 1; it <= 30; ++it) {
        Eigen::MatrixXd J = op.A;
        F = op.A * w + op.load;
        for (Eigen::Index i = 0; i < n; ++i) {
            F(i) -= f(w(i));
            J(i, i) -= f.derivative(w(i));
        }
        const Eigen::VectorXd dw = J.partialPivLu().solve(-F);
        if (!dw.allFinite()) return std::nullopt;
        if (descending && dw.maxCoeff() > slack) return std::nullopt;
        w += dw;
        if (w.maxCoeff() > upper + slack) return std::nullopt;
        if (lower && (w - *lower).minCoeff() < -slack) return std::nullopt;
        const double inc = dw.cwiseAbs().maxCoeff();
        if (inc <= 0.1 * sp.newton_tol) return Iterated{w, it, inc};
    }
    return std::nullopt;
}

// Fixed point of (A + M) w' = f(w) + M w - load. The shift M is re-checked against the range
// the iterates actually visit.
inline Iterated monotone_iterate(const DiscreteOperator& op, const Nonlinearity& f, Eigen::VectorXd w,
                                 const SolveParams& sp, Direction dir, double upper,
                                 const Eigen::VectorXd* lower = nullptr) {
    const Eigen::Index n = w.size();
    const bool bounded = std::isfinite(upper);
    const double scale = std::max({1.0, bounded ? std::abs(upper) : 0.0, w.cwiseAbs().maxCoeff()});
    const double slack = 1e-11 * scale;
    double lo = w.minCoeff();
    double hi = bounded ? std::max(upper, w.maxCoeff()) : w.maxCoeff();
    double M = working_lipschitz(f, lo, hi, sp);
    auto factor = [&](double shift) {
        Eigen::MatrixXd K = op.A;
        K.diagonal().array() += shift;
        return Eigen::PartialPivLU<Eigen::MatrixXd>(K);
    };
    auto lu = factor(M);
    Eigen::VectorXd rhs(n), next(n);
    double prev_inc = std::numeric_limits<double>::infinity();
    int newton_tried = 0;  // iteration of the last Newton attempt
    for (int it = 1; it <= sp.max_iter; ++it) {
        for (Eigen::Index i = 0; i < n; ++i) rhs(i) = f(w(i)) + M * w(i) - op.load(i);
        next = lu.solve(rhs);
        if (sp.damping < 1.0) next = w + sp.damping * (next - w);
        const Eigen::VectorXd step = next - w;
        if (dir == Direction::down && step.maxCoeff() > slack) {
            Eigen::Index k;
            step.maxCoeff(&k);
            throw OrderingError("iterate increased while descending from the supersolution", static_cast<int>(k),
                                step(k));
        }
        if (dir == Direction::up && step.minCoeff() < -slack) {
            Eigen::Index k;
            step.minCoeff(&k);
            throw OrderingError("iterate decreased while ascending from the subsolution", static_cast<int>(k),
                                -step(k));
        }
        if (next.maxCoeff() > upper + slack) {
            Eigen::Index k;
            next.maxCoeff(&k);
            throw OrderingError("iterate exceeded the supersolution", static_cast<int>(k), next(k) - upper);
        }
        if (lower) {
            const Eigen::VectorXd gap = next - *lower;
            if (gap.minCoeff() < -slack) {
                Eigen::Index k;
                gap.minCoeff(&k);
                throw OrderingError("iterate fell below the subsolution", static_cast<int>(k), -gap(k));
            }
        }
        const double inc = step.cwiseAbs().maxCoeff();
        w = next;
        if (w.minCoeff() < lo || w.maxCoeff() > hi) {
            const double span = std::max(hi - lo, 1e-3 * scale);
            if (w.minCoeff() < lo) lo = w.minCoeff() - 0.1 * span;
            if (w.maxCoeff() > hi) hi = w.maxCoeff() + 0.1 * span;
            const double M2 = working_lipschitz(f, lo, hi, sp);
            if (M2 > M) {
                M = M2;
                lu = factor(M);
            }
        }
        const double rate = std::min(inc / prev_inc, 0.9999);
        prev_inc = inc;
        const double est = rate * inc / (1.0 - rate);
        if ((inc <= sp.newton_tol && est <= sp.newton_tol) || inc <= 1e-15 * scale) return {w, it, inc};
        if (it - newton_tried >= 20 && rate > 0.95) {
            newton_tried = it;
            if (auto r = newton_polish(op, f, w, sp, dir == Direction::down, upper, lower, slack)) {
                r->iterations += it;
                return *r;
            }
        }
    }
    throw ConvergenceError("monotone iteration did not converge within max_iter", sp.max_iter, prev_inc);
}

inline double discrete_residual(const DiscreteOperator& op, const Nonlinearity& f, const Eigen::VectorXd& w) {
    Eigen::VectorXd r = op.A * w + op.load;
    for (Eigen::Index i = 0; i < w.size(); ++i) r(i) -= f(w(i));
    return r.cwiseAbs().maxCoeff();
}

inline std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

inline int multiple_of(double R, double h) {
    const double q = R / h;
    const long r = std::lround(q);
    if (std::abs(q - static_cast<double>(r)) > 1e-8 * std::max(1.0, q))
        throw ConfigError("R = " + std::to_string(R) + " is not a multiple of the grid spacing");
    return static_cast<int>(r);
}

}  // namespace detail

// Interval problem on the grid of `start` with its exterior data (left and right may differ).
inline SolveReport<IntervalProfile> solve_interval(const Nonlinearity& f, const IntervalProfile& start,
                                                   const SolveParams& sp, int boundary_cells = -1,
                                                   bool weight_right = true) {
    sp.validate();
    const auto& x = start.nodes();
    const int n = static_cast<int>(x.size());
    DiscreteGrid g;
    g.s = start.s();
    g.a = start.a();
    g.h = (start.b() - start.a()) / (n + 1);
    g.n = n;
    g.left_value = start.exterior_left();
    g.right = {start.exterior_right(), 0.0, 0.0};
    g.boundary_cells = boundary_cells < 0 ? sp.boundary_cells : boundary_cells;
    g.weight_right = weight_right;
    if (std::abs(x.front() - g.node(1)) > 1e-9 * g.h || std::abs(x.back() - g.node(n)) > 1e-9 * g.h)
        throw DomainError("solve_interval requires nodes a + j h with h = (b - a)/(n + 1)");
    const auto op = assemble_operator(g);
    Eigen::VectorXd w0 = Eigen::Map<const Eigen::VectorXd>(start.values().data(), n);

    // classify the start by the direction of its first step
    detail::Direction dir = detail::Direction::any;
    const double ext_hi = std::max(start.exterior_left(), start.exterior_right());
    const bool constant_start = (w0.maxCoeff() - w0.minCoeff()) == 0.0;
    double upper = std::numeric_limits<double>::infinity();
    if (constant_start) {
        // a constant c >= the exterior data with f(c) <= 0 is a supersolution
        const double c = w0(0);
        if (c >= ext_hi && f(c) <= 0.0) {
            dir = detail::Direction::down;
            upper = c;
        }
    }
    auto it = detail::monotone_iterate(op, f, w0, sp, dir, upper);
    SolveReport<IntervalProfile> rep{start.with_values(detail::to_std(it.w)), 0, 0.0, 0.0, true, 0.0, std::nullopt};
    rep.iterations = it.iterations;
    rep.discrete_residual = detail::discrete_residual(op, f, it.w);
    rep.sup_norm = it.w.maxCoeff();
    // quadrature residual at 20 points of the middle 80% of the interval
    std::vector<double> sample;
    const double a = start.a(), b = start.b();
    for (int k = 0; k < 20; ++k) sample.push_back(a + (b - a) * (0.1 + 0.8 * (k + 0.5) / 20.0));
    QuadratureParams qp = QuadratureParams::for_grid(g.h, b - a);
    qp.far_cutoff = std::max(qp.far_cutoff, 10.0 * std::max(std::abs(a), std::abs(b)));
    rep.final_residual = residual(rep.profile, f, qp, sample);
    return rep;
}

// Same, with the argument layout (a, b, exterior) checked against the start.
inline SolveReport<IntervalProfile> solve_interval(const Nonlinearity& f, double a, double b, double exterior,
                                                   const IntervalProfile& start, const SolveParams& sp) {
    if (std::abs(start.a() - a) > 1e-12 * std::max(1.0, std::abs(a)) || std::abs(start.b() - b) > 1e-12 * std::max(1.0, std::abs(b)))
        throw DomainError("start profile does not live on (a, b)");
    if (start.exterior_left() != exterior || start.exterior_right() != exterior)
        throw DomainError("start profile exterior differs from the requested exterior");
    return solve_interval(f, start, sp);
}

// (-Delta)^s phi = 1 on (0,1), phi = 0 left of 0 and 1 right of 1.
inline IntervalProfile barrier_phi(FracOrder s, int n = 512) {
    auto one = make_polynomial_nonlinearity("one", {1.0});
    auto start = IntervalProfile::uniform(s, 0.0, 1.0, n, 0.0, 0.0, 1.0);
    SolveParams sp;
    sp.max_iter = 10;
    return solve_interval(one, start, sp).profile;
}

namespace detail {

struct TailFit {
    double rho = 0.0;
    double c = 0.0;
    double rms = 0.0;
};

// rho and C jointly on [lo, hi]
inline TailFit fit_tail(const std::vector<double>& x, const Eigen::VectorXd& u, double s, double lo, double hi) {
    double S1 = 0, Sd = 0, Sdd = 0, Su = 0, Sdu = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] < lo || x[i] > hi) continue;
        const double d = std::pow(x[i], -2.0 * s);
        const double ui = u(static_cast<Eigen::Index>(i));
        S1 += 1;
        Sd += d;
        Sdd += d * d;
        Su += ui;
        Sdu += d * ui;
    }
    TailFit t;
    const double det = S1 * Sdd - Sd * Sd;
    if (S1 < 2 || det <= 0.0) return t;
    t.rho = (Sdd * Su - Sd * Sdu) / det;
    t.c = -(S1 * Sdu - Sd * Su) / det;
    double ss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] < lo || x[i] > hi) continue;
        const double r = u(static_cast<Eigen::Index>(i)) - (t.rho - t.c * std::pow(x[i], -2.0 * s));
        ss += r * r;
    }
    t.rms = std::sqrt(ss / S1);
    return t;
}

// ell0 = (1/(Gamma(s)Gamma(1+s))) int_0^inf y^{s-1} f(u(y)) dy with the grid interpolant
// (weighted near the boundary) and the tail model beyond L.
inline double green_ell0(const Nonlinearity& f, double s, double h, const Eigen::VectorXd& u, double e, int J0,
                         double rho, double C, double L) {
    static const quad::GaussRule gl = quad::gauss_legendre(12);
    const Eigen::Index n = u.size();
    auto v = [&](Eigen::Index k) { return (u(k - 1) - e) / std::pow(h * static_cast<double>(k), s); };
    double I = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
        for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
            const double t = 0.5 * (gl.nodes[q] + 1.0);
            const double w = 0.5 * gl.weights[q];
            double y, jac;
            if (k == 0) {
                y = h * t * t;
                jac = 2.0 * h * t;
            } else {
                y = h * (static_cast<double>(k) + t);
                jac = h;
            }
            double uy;
            if (k < J0) {
                const double vk = k == 0 ? v(1) : v(k);
                uy = e + std::pow(y, s) * ((1.0 - (y / h - static_cast<double>(k))) * vk + (y / h - static_cast<double>(k)) * v(k + 1));
            } else {
                const double th = y / h - static_cast<double>(k);
                uy = (1.0 - th) * u(k - 1) + th * u(k);
            }
            I += w * jac * std::pow(y, s - 1.0) * f(uy);
        }
    }
    auto tail = quad::integrate_to_infinity(
        [&](double y) { return std::pow(y, s - 1.0) * f(rho - C * std::pow(y, -2.0 * s)); }, L,
        quad::Tolerance{1e-12, 1e-10, 2000}, L);
    I += tail.value;
    return I / (gamma_fn(s) * gamma_fn(1.0 + s));
}

struct HalfLineStage {
    Eigen::VectorXd u;
    double c_exterior = 0.0;
    int iterations = 0;
    int sweeps = 0;
    double change = 0.0;
    DiscreteOperator op;
};

// Half-line grid (0, L] with left datum e and right datum rho - C y^{-2s}; C updated until stable.
inline HalfLineStage halfline_stage(const Nonlinearity& f, double rho, double e, FracOrder s,
                                    const SolveParams& sp, double c0) {
    const int n = sp.grid_n;
    const double h = sp.h();
    const double sv = s.value();
    HalfLineStage st;
    double C = c0;
    double c_last = 0.0, g_last = 0.0;
    Eigen::VectorXd prev;
    for (int sweep = 1; sweep <= sp.tail_sweeps; ++sweep) {
        DiscreteGrid g;
        g.s = s;
        g.a = 0.0;
        g.h = h;
        g.n = n;
        g.left_value = e;
        g.right = {rho, -C, -2.0 * sv};
        g.boundary_cells = sp.boundary_cells;
        st.op = assemble_operator(g);
        auto it = monotone_iterate(st.op, f, Eigen::VectorXd::Constant(n, rho), sp, Direction::down, rho);
        st.iterations += it.iterations;
        st.u = it.w;
        st.c_exterior = C;
        st.sweeps = sweep;
        st.change = prev.size() ? (st.u - prev).cwiseAbs().maxCoeff() : std::numeric_limits<double>::infinity();
        if (st.change <= sp.stabilization_tol) return st;
        prev = st.u;
        // exterior continues the last node value; secant on C = g(C)
        const double gC = (rho - st.u(n - 1)) * std::pow(sp.L, 2.0 * sv);
        double next = gC;
        if (sweep > 1) {
            const double den = (gC - C) - (g_last - c_last);
            if (std::abs(den) > 1e-14 * std::max(1.0, std::abs(C))) next = C - (gC - C) * (C - c_last) / den;
        }
        c_last = C;
        g_last = gC;
        C = std::max(0.0, next);
    }
    throw ConvergenceError("tail closure did not stabilize", st.sweeps, st.change);
}

}  // namespace detail

// Maximal solution of (-Delta)^s u = f(u) on the half-line, u = 0 left of 0, u -> rho.
inline SolveReport<HalfLineProfile> maximal_halfline(const Nonlinearity& f, double rho, const SolveParams& sp_in,
                                                     FracOrder s) {
    SolveParams sp = sp_in;
    sp.validate();
    const auto cf = check_condition_F(f, rho);
    if (!cf.holds) {
        if (cf.failure == ConditionFReport::Failure::not_a_zero)
            throw ConditionFError("rho = " + std::to_string(rho) + " is not a zero of f");
        throw ConditionFError("condition (F) fails: F(t) >= F(rho) at t = " + std::to_string(*cf.witness));
    }
    const double f0 = f(0.0);
    std::vector<double> deltas;
    if (f0 >= 0.0) {
        deltas = {0.0};
    } else {
        deltas = sp.delta_schedule;
        if (deltas.empty())
            for (int k = 1; k <= 8; ++k) deltas.push_back(std::pow(10.0, -k));
        for (double d : deltas)
            if (!(d > 0.0) || !delta_admissible(f, rho, d))
                throw ConfigError("delta = " + std::to_string(d) + " is not admissible for f(0) < 0");
    }
    const double h = sp.h();
    std::vector<double> Rs = sp.R_schedule;
    if (Rs.empty()) Rs = {sp.L / 8.0, sp.L / 4.0, sp.L / 2.0, sp.L};
    std::vector<int> Rn;
    for (double R : Rs) {
        const int m = detail::multiple_of(R, h);
        if (m < 3 || m > sp.grid_n) throw ConfigError("R_schedule entries must lie in [3h, L]");
        Rn.push_back(m);
    }

    HalfLineDiagnostics diag;
    diag.condition_margin = cf.margin;
    diag.tail_conjectural = s.value() <= 0.5;
    int total_iter = 0;
    const double slack = sp.newton_tol;

    // interval family on (0, R) with exterior -delta, for the leading (largest) deltas
    const std::size_t n_family = std::min<std::size_t>(deltas.size(), 3);
    std::vector<std::vector<Eigen::VectorXd>> fam(n_family);
    for (std::size_t di = 0; di < n_family; ++di) {
        const double d = deltas[di];
        const Nonlinearity fd = d > 0.0 ? regularize_delta(f, d) : f;
        for (std::size_t ri = 0; ri < Rs.size(); ++ri) {
            const int m = Rn[ri];
            DiscreteGrid g;
            g.s = s;
            g.h = h;
            g.n = m - 1;
            g.left_value = -d;
            g.right = {-d, 0.0, 0.0};
            g.boundary_cells = sp.boundary_cells;
            g.weight_right = false;
            const auto op = assemble_operator(g);
            auto it = detail::monotone_iterate(op, fd, Eigen::VectorXd::Constant(m - 1, rho), sp,
                                               detail::Direction::down, rho);
            total_iter += it.iterations;
            diag.interval_runs.push_back({d, Rs[ri], it.w.maxCoeff(), it.iterations});
            fam[di].push_back(it.w);
        }
    }
    for (std::size_t di = 0; di < n_family; ++di)
        for (std::size_t ri = 1; ri < Rs.size(); ++ri) {
            const auto& a = fam[di][ri - 1];
            const auto& b = fam[di][ri];
            for (Eigen::Index j = 0; j < a.size(); ++j)
                if (a(j) > b(j) + slack) ++diag.violations_R;
        }
    for (std::size_t di = 1; di < n_family; ++di)
        for (std::size_t ri = 0; ri < Rs.size(); ++ri) {
            const auto& big = fam[di - 1][ri];  // larger delta
            const auto& small = fam[di][ri];
            for (Eigen::Index j = 0; j < big.size(); ++j)
                if (big(j) > small(j) + slack) ++diag.violations_delta;
        }

    // half-line stages, delta decreasing
    const double sv = s.value();
    const double fp = f.derivative(rho);
    const double c1 = norm_constant(1, s);
    double c0 = fp < 0.0 ? rho * c1 / (2.0 * sv * (-fp)) : 0.0;
    detail::HalfLineStage st;
    Eigen::VectorXd prev;
    double used_delta = deltas.front();
    bool stabilized = deltas.size() == 1;
    for (std::size_t di = 0; di < deltas.size(); ++di) {
        const double d = deltas[di];
        const Nonlinearity fd = d > 0.0 ? regularize_delta(f, d) : f;
        st = detail::halfline_stage(fd, rho, -d, s, sp, c0);
        c0 = st.c_exterior;
        total_iter += st.iterations;
        used_delta = d;
        // comparison with the interval solutions of the same delta
        if (di < n_family)
            for (const auto& w : fam[di])
                for (Eigen::Index j = 0; j < w.size(); ++j)
                    if (w(j) > st.u(j) + slack) ++diag.violations_comparison;
        if (prev.size()) {
            const double ch = (st.u - prev).cwiseAbs().maxCoeff();
            diag.delta_changes.push_back(ch);
            if (ch <= sp.stabilization_tol) {
                stabilized = true;
                break;
            }
        }
        prev = st.u;
    }
    if (!stabilized)
        throw ConvergenceError("delta schedule exhausted without stabilization", static_cast<int>(deltas.size()),
                               diag.delta_changes.empty() ? 0.0 : diag.delta_changes.back());

    const int n = sp.grid_n;
    std::vector<double> x(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) x[static_cast<std::size_t>(j)] = h * (j + 1);
    const Eigen::VectorXd& u = st.u;
    const double e = -used_delta;
    const int J0 = std::min(sp.boundary_cells, n);
    const Nonlinearity f_used = used_delta > 0.0 ? regularize_delta(f, used_delta) : f;
    const double ell0 = detail::green_ell0(f_used, sv, h, u, e, J0, rho, st.c_exterior, sp.L);

    // closure = the exterior datum of the discrete problem; the free fit is a diagnostic
    auto tf = detail::fit_tail(x, u, sv, 0.4 * sp.L, 0.8 * sp.L);
    const double uL = u(n - 1);
    const double rho_tail = rho;
    const double c_tail = std::max(0.0, (rho - uL) * std::pow(sp.L, 2.0 * sv));
    diag.rho_fit = tf.rho;
    diag.c_fit = tf.c;
    diag.tail_fit_rms = tf.rms;
    diag.tail_c_exterior = st.c_exterior;
    diag.tail_sweeps = st.sweeps;
    diag.tail_change = st.change;
    diag.delta = used_delta;
    diag.max_node_value = u.maxCoeff();

    // sub-grid closure nodes x = h 2^{-k}: u = x^s (ell0 + (v1 - ell0)(x/h)^s); the -delta offset is dropped
    std::vector<double> nodes, values;
    const double v1 = (u(0) - e) / std::pow(h, sv);
    constexpr int K = 40;
    for (int k = K; k >= 1; --k) {
        const double xk = h * std::ldexp(1.0, -k);
        nodes.push_back(xk);
        values.push_back(std::pow(xk, sv) * (ell0 + (v1 - ell0) * std::pow(xk / h, sv)));
    }
    nodes.insert(nodes.end(), x.begin(), x.end());
    for (Eigen::Index j = 0; j < u.size(); ++j) values.push_back(u(j));

    SolveReport<HalfLineProfile> rep{HalfLineProfile(s, nodes, values, ell0, rho_tail, c_tail, true), 0, 0.0, 0.0, true, 0.0, std::nullopt};
    rep.iterations = total_iter;
    rep.discrete_residual = detail::discrete_residual(st.op, f_used, u);
    rep.ordered_chain_ok = diag.violations_R == 0 && diag.violations_delta == 0 && diag.violations_comparison == 0;
    rep.sup_norm = std::max(tf.rho, diag.max_node_value);
    std::vector<double> sample;
    for (int k = 0; k < 20; ++k) sample.push_back(sp.L * (k + 1) / 21.0);
    rep.final_residual = residual(rep.profile, f, QuadratureParams::for_grid(h, sp.L), sample);
    rep.diagnostics = diag;
    return rep;
}

// Subsolution catalog: "powertail" (scale, width, shift) and "bubble" (x0, R, amp).
// powertail(x) = scale * P((x - shift)/width), P = 0 on (-inf, 1], smooth step on [1, 2] times 1 - y^{-2s}.
inline AnalyticProfile make_subsolution(const std::string& kind, FracOrder s, const ParamMap& params = {}) {
    auto get = [&](const std::string& k, double dflt) {
        auto it = params.find(k);
        return it == params.end() ? dflt : it->second;
    };
    const double sv = s.value();
    if (kind == "powertail") {
        const double scale = get("scale", 1.0);
        const double width = get("width", 1.0);
        const double shift = get("shift", 0.0);
        if (!(scale > 0.0)) throw DomainError("powertail scale must be positive");
        if (!(width > 0.0)) throw DomainError("powertail width must be positive");
        if (shift < 0.0) throw DomainError("powertail shift must be >= 0");
        auto step = [](double t) {
            if (t <= 0.0) return 0.0;
            if (t >= 1.0) return 1.0;
            const double a = std::exp(-1.0 / t), b = std::exp(-1.0 / (1.0 - t));
            return a / (a + b);
        };
        auto fn = [=](double x) {
            const double y = (x - shift) / width;
            if (y <= 1.0) return 0.0;
            return scale * step(y - 1.0) * (1.0 - std::pow(y, -2.0 * sv));
        };
        const double x1 = shift + width, x2 = shift + 2.0 * width;
        if (shift == 0.0)
            return AnalyticProfile(s, fn, 0.0, x2, 0.0, PowerTail{scale, -scale * std::pow(width, 2.0 * sv), -2.0 * sv},
                                   false, false, {x1, shift + 1.5 * width});
        // shifted tails are not of the form alpha + beta x^gamma: evaluate directly up to a far edge
        const double far = std::max(1e6, 1e3 * x2);
        return AnalyticProfile(s, fn, 0.0, far, 0.0, PowerTail{scale, -scale * std::pow(width, 2.0 * sv), -2.0 * sv},
                               false, false, {x1, shift + 1.5 * width, x2});
    }
    if (kind == "bubble") {
        const double x0 = get("x0", 5.0), R = get("R", 1.0), amp = get("amp", 0.3);
        if (!(R > 0.0)) throw DomainError("bubble radius must be positive");
        auto fn = [=](double x) {
            const double q = (R * R - (x - x0) * (x - x0)) / (R * R);
            return q > 0.0 ? amp * std::pow(q, sv) : 0.0;
        };
        return AnalyticProfile(s, fn, x0 - R, x0 + R, 0.0, PowerTail{0.0, 0.0, 0.0}, true, true, {x0});
    }
    throw DomainError("unknown subsolution kind '" + kind + "'");
}

struct SubsolutionCheck {
    bool ok = true;
    double margin = std::numeric_limits<double>::infinity();
};

template <LineProfile P>
SubsolutionCheck verify_subsolution(const P& p, const Nonlinearity& f, const QuadratureParams& qp,
                                    const std::vector<double>& sample) {
    SubsolutionCheck r;
    for (double x : sample) {
        const double slack = f(p.eval(x)) - flap_at(p, x, qp);
        r.margin = std::min(r.margin, slack);
        if (slack < -qp.tol) r.ok = false;
    }
    return r;
}

struct UniquenessReport {
    bool agree = true;
    std::vector<double> differences;  // sup-norm distance of each start's limit to the reference limit
    std::vector<double> min_gap;      // min over nodes of (limit - start); >= 0 when the limit dominates the start
    double tolerance = 0.0;
};

// Iterates the half-line problem from rho and from each start; all limits must agree within 5 newton_tol.
template <LineProfile P>
UniquenessReport uniqueness_probe(const Nonlinearity& f, double rho, const SolveParams& sp_in,
                                  const std::vector<P>& starts, FracOrder s) {
    SolveParams sp = sp_in;
    sp.validate();
    const int n = sp.grid_n;
    const double h = sp.h();
    const double sv = s.value();
    const bool tail = check_condition_F(f, rho).holds && f(0.0) >= 0.0;
    DiscreteGrid g;
    g.s = s;
    g.h = h;
    g.n = n;
    g.boundary_cells = sp.boundary_cells;
    Eigen::VectorXd ref;
    if (tail) {
        const double fp = f.derivative(rho);
        const double c0 = fp < 0.0 ? rho * norm_constant(1, s) / (2.0 * sv * (-fp)) : 0.0;
        auto st = detail::halfline_stage(f, rho, 0.0, s, sp, c0);
        g.right = {rho, -st.c_exterior, -2.0 * sv};
        ref = st.u;
    } else {
        g.right = {0.0, 0.0, 0.0};
        g.weight_right = false;
    }
    const auto op = assemble_operator(g);
    if (!tail)
        ref = detail::monotone_iterate(op, f, Eigen::VectorXd::Constant(n, rho), sp, detail::Direction::any, rho).w;
    UniquenessReport rep;
    rep.tolerance = 5.0 * sp.newton_tol;
    for (const auto& p : starts) {
        Eigen::VectorXd w0(n);
        for (int j = 0; j < n; ++j) w0(j) = p.eval(h * (j + 1));
        if (w0.maxCoeff() > rho) throw DomainError("uniqueness_probe: start exceeds rho");
        auto it = detail::monotone_iterate(op, f, w0, sp, detail::Direction::any, rho);
        const double d = (it.w - ref).cwiseAbs().maxCoeff();
        rep.differences.push_back(d);
        rep.min_gap.push_back((it.w - w0).minCoeff());
        if (!(d <= rep.tolerance)) rep.agree = false;
    }
    return rep;
}

}  // namespace fraclap
