#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "percas/domain.hpp"
#include "percas/expression.hpp"
#include "percas/operator.hpp"
#include "percas/presets.hpp"

namespace percas {

// Data of one linear problem D u = f with its IC/BC targets. Initial targets
// carry the time-derivative order they constrain (wave problems have two).
struct LinearTask {
    ScalarField forcing;
    std::vector<std::pair<int, std::function<real(real)>>> initial;  // (dt order, g(x))
    std::function<real(real)> boundary_left;
    std::function<real(real)> boundary_right;
};

struct LossWeights {
    real pde = 1.0;
    real ic = 1.0;
    real bc = 1.0;

    bool valid() const { return pde > 0.0 && ic > 0.0 && bc > 0.0; }
};

struct BatchSizes {
    int interior = 100;
    int initial = 25;
    int boundary = 25;  // per side
};

struct CollocationBatch {
    Eigen::VectorXd x_interior, t_interior;
    Eigen::VectorXd x_initial;                 // at t = 0
    Eigen::VectorXd t_left, t_right;           // at x_min / x_max
    real x_left = 0.0, x_right = 1.0;          // edge coordinates
};

namespace detail {

inline Eigen::VectorXd jittered_line(real lo, real hi, int n, real jitter,
                                     std::mt19937_64& rng) {
    Eigen::VectorXd out(n);
    if (n == 1) {
        out[0] = 0.5 * (lo + hi);
        return out;
    }
    const real h = (hi - lo) / real(n - 1);
    std::uniform_real_distribution<real> noise(-0.5 * h * jitter, 0.5 * h * jitter);
    for (int i = 0; i < n; ++i) {
        real v = lo + h * real(i) + (jitter > 0.0 ? noise(rng) : 0.0);
        out[i] = std::min(hi, std::max(lo, v));
    }
    return out;
}

}  // namespace detail

// Equally spaced grids with uniform noise of half the spacing, clipped to the
// domain. jitter=0 gives the exact grid.
inline CollocationBatch sample_collocation(const SpaceTimeDomain& domain, const BatchSizes& sizes,
                                           std::mt19937_64& rng, real jitter = 1.0) {
    if (sizes.interior <= 0 || sizes.initial <= 0 || sizes.boundary <= 0)
        throw std::invalid_argument("batch sizes must be positive");
    CollocationBatch b;

    const int nx = std::max(1, int(std::lround(std::sqrt(real(sizes.interior)))));
    const int nt = (sizes.interior + nx - 1) / nx;
    Eigen::VectorXd gx = detail::jittered_line(domain.x_min, domain.x_max, nx, jitter, rng);
    Eigen::VectorXd gt = detail::jittered_line(0.0, domain.t_max, nt, jitter, rng);
    b.x_interior.resize(sizes.interior);
    b.t_interior.resize(sizes.interior);
    int idx = 0;
    for (int i = 0; i < nx && idx < sizes.interior; ++i)
        for (int j = 0; j < nt && idx < sizes.interior; ++j, ++idx) {
            b.x_interior[idx] = gx[i];
            b.t_interior[idx] = gt[j];
        }

    b.x_initial = detail::jittered_line(domain.x_min, domain.x_max, sizes.initial, jitter, rng);
    b.t_left = detail::jittered_line(0.0, domain.t_max, sizes.boundary, jitter, rng);
    b.t_right = detail::jittered_line(0.0, domain.t_max, sizes.boundary, jitter, rng);
    b.x_left = domain.x_min;
    b.x_right = domain.x_max;
    return b;
}

// Head-task family for training the shared body. Most heads use random
// low-order Fourier/polynomial data; a few mirror the benchmark condition
// sets so the latent basis covers their sharper profiles.
inline std::vector<LinearTask> make_task_family(const LinearOperator& op, int count,
                                                const SpaceTimeDomain& domain,
                                                std::uint64_t seed) {
    if (count < 1) throw std::invalid_argument("need at least one head task");
    std::vector<LinearTask> tasks;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<real> amp(-1.0, 1.0);
    std::uniform_real_distribution<real> freq(0.5, 3.5);
    const bool second_order_time = op.max_dt_order() >= 2;
    const real width = domain.width();

    const int n_bench = std::min(count, second_order_time ? 1 : 2);
    for (int k = 0; k < count; ++k) {
        LinearTask task;
        if (k >= count - n_bench) {
            if (second_order_time) {
                // linear part of the wave benchmark
                task.forcing = [](real, real) { return 0.0; };
                task.initial = {{0, [](real) { return 0.0; }}, {1, [](real) { return 1.0; }}};
                task.boundary_left = [](real) { return 0.0; };
                task.boundary_right = [](real) { return 0.0; };
            } else if (k == count - 1) {
                // linear part of the KPP benchmark: heat flow of the step-like profile
                task.forcing = [](real, real) { return 0.0; };
                task.initial = {{0, [](real x) { return kpp_initial_profile(x); }}};
                task.boundary_left = [](real) { return 1.0; };
                task.boundary_right = [](real) { return 0.0; };
            } else {
                PdeProblem p4 = make_preset("kpp-4", 0.1, domain.t_max);
                Expression ic = p4.find(ConditionKind::initial, 0)->target;
                Expression bl = p4.find(ConditionKind::boundary_left, 0)->target;
                Expression br = p4.find(ConditionKind::boundary_right, 0)->target;
                Expression f = p4.forcing;
                task.forcing = [f](real x, real t) { return f(x, t); };
                task.initial = {{0, [ic](real x) { return ic(x, 0.0); }}};
                task.boundary_left = [bl](real t) { return bl(0.0, t); };
                task.boundary_right = [br](real t) { return br(0.0, t); };
            }
        } else {
            // manufactured solution u* = c0 + c1 x + sum a sin(wx x + px) cos(wt t),
            // with forcing D u* so the task is exactly satisfiable
            struct Mode {
                real a, wx, px, wt;
            };
            std::vector<Mode> modes(3);
            for (auto& m : modes)
                m = {amp(rng), freq(rng) * real(M_PI) / width, real(M_PI) * amp(rng), freq(rng)};
            const real c0 = amp(rng), c1 = amp(rng);
            auto deriv = [modes, c0, c1](int dx_order, int dt_order, real x, real t) {
                real acc = 0.0;
                if (dx_order == 0 && dt_order == 0) acc = c0 + c1 * x;
                if (dx_order == 1 && dt_order == 0) acc = c1;
                for (const auto& m : modes) {
                    real sx = std::sin(m.wx * x + m.px), cx = std::cos(m.wx * x + m.px);
                    real st = std::sin(m.wt * t), ct = std::cos(m.wt * t);
                    real fx = dx_order == 0 ? sx : (dx_order == 1 ? m.wx * cx : -m.wx * m.wx * sx);
                    real ft = dt_order == 0 ? ct : (dt_order == 1 ? -m.wt * st : -m.wt * m.wt * ct);
                    acc += m.a * fx * ft;
                }
                return acc;
            };
            auto terms = op.terms;
            task.forcing = [deriv, terms](real x, real t) {
                real acc = 0.0;
                for (const auto& tm : terms) acc += tm.coefficient * deriv(tm.dx_order, tm.dt_order, x, t);
                return acc;
            };
            task.initial.emplace_back(0, [deriv](real x) { return deriv(0, 0, x, 0.0); });
            if (second_order_time)
                task.initial.emplace_back(1, [deriv](real x) { return deriv(0, 1, x, 0.0); });
            const real xl = domain.x_min, xr = domain.x_max;
            task.boundary_left = [deriv, xl](real t) { return deriv(0, 0, xl, t); };
            task.boundary_right = [deriv, xr](real t) { return deriv(0, 0, xr, t); };
        }
        tasks.push_back(std::move(task));
    }
    return tasks;
}

}  // namespace percas
