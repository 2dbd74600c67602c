#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "percas/plan.hpp"
#include "percas/problem.hpp"

namespace percas {

struct MolConfig {
    int n_x = 201;
    real rtol = 1e-8;
    real atol = 1e-8;
    GridSpec output;
};

struct ErrorReport {
    real relative_l2 = 0.0;
    real max_abs = 0.0;
    GridSpec grid;
};

namespace detail {

// Dormand-Prince 5(4) with PI step control. Accepted states are sampled onto
// the requested output times by linear interpolation.
inline void integrate_rk45(const std::function<void(real, const Eigen::VectorXd&, Eigen::VectorXd&)>& rhs,
                           Eigen::VectorXd y, real t0, real t_end,
                           const std::vector<real>& out_times, real rtol, real atol,
                           std::vector<Eigen::VectorXd>& out_states) {
    static const real c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static const real a21 = 1.0 / 5;
    static const real a31 = 3.0 / 40, a32 = 9.0 / 40;
    static const real a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static const real a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                      a54 = -212.0 / 729;
    static const real a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                      a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static const real b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                      b6 = 11.0 / 84;
    static const real e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                      e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    const Eigen::Index n = y.size();
    Eigen::VectorXd k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ynew(n), yerr(n);
    real t = t0;
    real h = (t_end - t0) / 100.0;
    const real h_min = 1e-14 * (t_end - t0);
    real err_prev = 1.0;
    std::size_t out_idx = 0;
    out_states.clear();
    out_states.reserve(out_times.size());
    while (out_idx < out_times.size() && out_times[out_idx] <= t0) {
        out_states.push_back(y);
        ++out_idx;
    }

    rhs(t, y, k1);
    while (t < t_end) {
        if (t + h > t_end) h = t_end - t;
        rhs(t + c2 * h, y + h * (a21 * k1), k2);
        rhs(t + c3 * h, y + h * (a31 * k1 + a32 * k2), k3);
        rhs(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3), k4);
        rhs(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4), k5);
        rhs(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5), k6);
        ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        rhs(t + h, ynew, k7);
        yerr = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

        real err = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const real sc = atol + rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            const real r = yerr[i] / sc;
            err += r * r;
        }
        err = std::sqrt(err / real(n));

        if (err <= 1.0 || h <= h_min) {
            // sample output times inside (t, t+h] by linear interpolation
            const real t_new = t + h;
            while (out_idx < out_times.size() && out_times[out_idx] <= t_new + 1e-14) {
                const real w = h > 0.0 ? (out_times[out_idx] - t) / h : 1.0;
                out_states.push_back((1.0 - w) * y + w * ynew);
                ++out_idx;
            }
            t = t_new;
            y.swap(ynew);
            k1.swap(k7);  // FSAL
            const real grow =
                0.9 * std::pow(std::max(err, 1e-10), -0.7 / 5.0) * std::pow(err_prev, 0.4 / 5.0);
            h *= std::min(5.0, std::max(0.2, grow));
            err_prev = std::max(err, 1e-10);
        } else {
            h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
            if (h < h_min)
                throw std::runtime_error(
                    "integrator step-size underflow (stiff system or inconsistent data)");
        }
    }
    while (out_idx < out_times.size()) {
        out_states.push_back(y);
        ++out_idx;
    }
}

inline std::vector<real> output_times(const GridSpec& g) {
    std::vector<real> out(std::size_t(g.n_t));
    for (int j = 0; j < g.n_t; ++j) out[std::size_t(j)] = g.t(j);
    return out;
}

}  // namespace detail

// Method of lines for first-order-in-time problems: second-order central
// differences in space, Dirichlet nodes pinned to the boundary data, adaptive
// RK of the full nonlinear system du/dt = (f - eps P(u) - spatial terms)/a_t.
inline GridField solve_parabolic_mol(const PdeProblem& problem, const MolConfig& cfg,
                                     std::vector<std::string>* warnings = nullptr) {
    if (problem.op.max_dt_order() != 1)
        throw std::invalid_argument("parabolic solver needs a first-order-in-time operator");
    if (cfg.n_x < 16) throw std::invalid_argument("n_x too small");
    const real a_t = problem.op.coeff(0, 1);
    const real a_xx = problem.op.coeff(2, 0);
    const real a_x = problem.op.coeff(1, 0);
    const real a_0 = problem.op.coeff(0, 0);
    if (a_t == 0.0) throw std::invalid_argument("zero time-derivative coefficient");

    const ConditionSpec* ic = problem.find(ConditionKind::initial, 0);
    const ConditionSpec* bl = problem.find(ConditionKind::boundary_left, 0);
    const ConditionSpec* br = problem.find(ConditionKind::boundary_right, 0);
    if (!ic || !bl || !br) throw std::invalid_argument("parabolic solver needs Dirichlet IC/BC data");

    const int nx = cfg.n_x;
    const real dx = problem.domain.width() / real(nx - 1);
    auto node_x = [&](int i) { return problem.domain.x_min + dx * real(i); };

    if (warnings) {
        if (std::abs(ic->eval(problem.domain.x_min) - bl->eval(0.0)) > 1e-3)
            warnings->push_back("IC/BC mismatch at left boundary");
        if (std::abs(ic->eval(problem.domain.x_max) - br->eval(0.0)) > 1e-3)
            warnings->push_back("IC/BC mismatch at right boundary");
    }

    // unknowns: interior nodes 1..nx-2
    Eigen::VectorXd y0(nx - 2);
    for (int i = 1; i < nx - 1; ++i) y0[i - 1] = ic->eval(node_x(i));

    auto rhs = [&](real t, const Eigen::VectorXd& u, Eigen::VectorXd& dudt) {
        const real u_left = bl->eval(t);
        const real u_right = br->eval(t);
        for (int i = 1; i < nx - 1; ++i) {
            const real uc = u[i - 1];
            const real um = i == 1 ? u_left : u[i - 2];
            const real up = i == nx - 2 ? u_right : u[i];
            const real uxx = (up - 2.0 * uc + um) / (dx * dx);
            const real ux = (up - um) / (2.0 * dx);
            const real x = node_x(i);
            const real f = problem.forcing(x, t);
            dudt[i - 1] = (f - problem.epsilon * polynomial_eval(problem.perturbation, uc) -
                           a_xx * uxx - a_x * ux - a_0 * uc) /
                          a_t;
        }
    };

    std::vector<Eigen::VectorXd> states;
    detail::integrate_rk45(rhs, y0, 0.0, problem.domain.t_max, detail::output_times(cfg.output),
                           cfg.rtol, cfg.atol, states);

    // sample onto the output grid (linear interpolation in x from solver nodes)
    GridField out(cfg.output);
    for (int j = 0; j < cfg.output.n_t; ++j) {
        const real t = cfg.output.t(j);
        const Eigen::VectorXd& u = states[std::size_t(j)];
        auto value_at_node = [&](int i) {
            if (i <= 0) return bl->eval(t);
            if (i >= nx - 1) return br->eval(t);
            return u[i - 1];
        };
        for (int gi = 0; gi < cfg.output.n_x; ++gi) {
            const real x = cfg.output.x(gi);
            const real s = (x - problem.domain.x_min) / dx;
            const int i0 = std::min(nx - 2, std::max(0, int(std::floor(s))));
            const real w = s - real(i0);
            out.values(gi, j) = (1.0 - w) * value_at_node(i0) + w * value_at_node(i0 + 1);
        }
    }
    return out;
}

// Second-order-in-time problems as a first-order system in (u, u_t).
inline GridField solve_hyperbolic_fd(const PdeProblem& problem, const MolConfig& cfg,
                                     std::vector<std::string>* warnings = nullptr) {
    if (problem.op.max_dt_order() != 2)
        throw std::invalid_argument("hyperbolic solver needs a second-order-in-time operator");
    if (cfg.n_x < 16) throw std::invalid_argument("n_x too small");
    const real a_tt = problem.op.coeff(0, 2);
    const real a_xx = problem.op.coeff(2, 0);
    const real a_t = problem.op.coeff(0, 1);
    const real a_0 = problem.op.coeff(0, 0);
    if (a_tt == 0.0) throw std::invalid_argument("zero second-time-derivative coefficient");

    const ConditionSpec* ic0 = problem.find(ConditionKind::initial, 0);
    const ConditionSpec* ic1 = problem.find(ConditionKind::initial, 1);
    const ConditionSpec* bl = problem.find(ConditionKind::boundary_left, 0);
    const ConditionSpec* br = problem.find(ConditionKind::boundary_right, 0);
    if (!ic0 || !ic1 || !bl || !br)
        throw std::invalid_argument("hyperbolic solver needs u, u_t initial data and Dirichlet BCs");

    const int nx = cfg.n_x;
    const real dx = problem.domain.width() / real(nx - 1);
    auto node_x = [&](int i) { return problem.domain.x_min + dx * real(i); };

    if (warnings) {
        const real wave_speed = std::sqrt(std::abs(a_xx / a_tt));
        const real dx_out = problem.domain.width() / real(cfg.output.n_x - 1);
        if (wave_speed > 0.0 && dx_out > 0.25 * problem.domain.width() / wave_speed)
            warnings->push_back("output grid coarser than the wave crossing scale");
        if (std::abs(ic0->eval(problem.domain.x_min) - bl->eval(0.0)) > 1e-3)
            warnings->push_back("IC/BC mismatch at left boundary");
        if (std::abs(ic0->eval(problem.domain.x_max) - br->eval(0.0)) > 1e-3)
            warnings->push_back("IC/BC mismatch at right boundary");
    }

    const int m = nx - 2;  // interior unknowns
    Eigen::VectorXd y0(2 * m);
    for (int i = 1; i < nx - 1; ++i) {
        y0[i - 1] = ic0->eval(node_x(i));
        y0[m + i - 1] = ic1->eval(node_x(i));
    }

    const real dt_bc = 1e-6;
    auto rhs = [&](real t, const Eigen::VectorXd& y, Eigen::VectorXd& dydt) {
        const real u_left = bl->eval(t);
        const real u_right = br->eval(t);
        for (int i = 1; i < nx - 1; ++i) {
            const real uc = y[i - 1];
            const real um = i == 1 ? u_left : y[i - 2];
            const real up = i == nx - 2 ? u_right : y[i];
            const real uxx = (up - 2.0 * uc + um) / (dx * dx);
            const real x = node_x(i);
            const real v = y[m + i - 1];
            dydt[i - 1] = v;
            dydt[m + i - 1] = (problem.forcing(x, t) -
                               problem.epsilon * polynomial_eval(problem.perturbation, uc) -
                               a_xx * uxx - a_t * v - a_0 * uc) /
                              a_tt;
        }
        (void)dt_bc;
    };

    std::vector<Eigen::VectorXd> states;
    detail::integrate_rk45(rhs, y0, 0.0, problem.domain.t_max, detail::output_times(cfg.output),
                           cfg.rtol, cfg.atol, states);

    GridField out(cfg.output);
    for (int j = 0; j < cfg.output.n_t; ++j) {
        const real t = cfg.output.t(j);
        const Eigen::VectorXd& y = states[std::size_t(j)];
        auto value_at_node = [&](int i) {
            if (i <= 0) return bl->eval(t);
            if (i >= nx - 1) return br->eval(t);
            return y[i - 1];
        };
        for (int gi = 0; gi < cfg.output.n_x; ++gi) {
            const real x = cfg.output.x(gi);
            const real s = (x - problem.domain.x_min) / dx;
            const int i0 = std::min(nx - 2, std::max(0, int(std::floor(s))));
            const real w = s - real(i0);
            out.values(gi, j) = (1.0 - w) * value_at_node(i0) + w * value_at_node(i0 + 1);
        }
    }
    return out;
}

// Dispatch on the operator's time order.
inline GridField solve_reference(const PdeProblem& problem, const MolConfig& cfg,
                                 std::vector<std::string>* warnings = nullptr) {
    return problem.op.max_dt_order() >= 2 ? solve_hyperbolic_fd(problem, cfg, warnings)
                                          : solve_parabolic_mol(problem, cfg, warnings);
}

inline ErrorReport relative_error(const GridField& candidate, const GridField& reference) {
    require_same_grid(candidate, reference);
    const real ref_norm = reference.values.norm();
    if (ref_norm == 0.0) throw std::invalid_argument("relative error undefined for zero reference");
    ErrorReport r;
    r.grid = reference.spec;
    Eigen::MatrixXd diff = candidate.values - reference.values;
    r.relative_l2 = diff.norm() / ref_norm;
    r.max_abs = diff.cwiseAbs().maxCoeff();
    return r;
}

}  // namespace percas
