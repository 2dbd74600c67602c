#pragma once

#include <atomic>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Cholesky>

#include "percas/body.hpp"
#include "percas/checkpoint.hpp"
#include "percas/loss.hpp"
#include "percas/problem.hpp"

namespace percas {

// Fixed (unjittered) collocation registry used at transfer time, so the
// normal matrix is a deterministic function of the checkpoint.
struct TransferPoints {
    Eigen::VectorXd x_interior, t_interior;
    Eigen::VectorXd x_initial;
    Eigen::VectorXd t_left, t_right;
    real x_left = 0.0, x_right = 1.0;

    static TransferPoints regular(const SpaceTimeDomain& domain, int interior = 2048,
                                  int initial = 256, int boundary = 256) {
        BatchSizes sizes{interior, initial, boundary};
        std::mt19937_64 unused(0);
        CollocationBatch b = sample_collocation(domain, sizes, unused, 0.0);
        return {b.x_interior, b.t_interior, b.x_initial, b.t_left, b.t_right,
                b.x_left, b.x_right};
    }
};

// Default least-squares weights for transfer-time assembly. The IC/BC rows
// are far fewer than the interior rows, so upweighting them substantially
// improves the condition fit (and the end-to-end cascade error) without
// hurting the PDE residual.
inline LossWeights transfer_weights() { return {1.0, 40.0, 40.0}; }

// Forcing/initial/boundary data of one linear task sampled on the registry.
struct TaskData {
    Eigen::VectorXd forcing;                 // interior points
    std::vector<Eigen::VectorXd> initial;    // one vector per initial-condition block
    Eigen::VectorXd boundary_left, boundary_right;
};

inline std::atomic<long>& factorization_counter() {
    static std::atomic<long> count{0};
    return count;
}

// Sampled latent matrices and the factorized normal matrix
//   M = w_pde D_H^T D_H + w_ic sum H_0^T H_0 + w_bc sum H_mu^T H_mu + ridge I,
// reusable across every task that shares the operator and sampling.
struct LatentSystem {
    BodyParams body;                        // frozen network, kept for rendering
    LinearOperator op;
    TransferPoints points;
    LossWeights weights;
    real ridge = 0.0;                       // value actually applied (after retries)

    Eigen::MatrixXd d_h;                    // n_interior x latent
    Eigen::MatrixXd h_interior;             // latent values at interior points
    std::vector<int> initial_orders;        // dt order per initial block
    std::vector<Eigen::MatrixXd> h_initial; // one block per initial condition
    Eigen::MatrixXd h_left, h_right;
    Eigen::MatrixXd normal_matrix;
    Eigen::MatrixXd chol_lower;             // L with M = L L^T

    int latent_dim() const { return int(normal_matrix.rows()); }

    Eigen::VectorXd solve_normal(const Eigen::VectorXd& rhs) const {
        Eigen::VectorXd y = chol_lower.triangularView<Eigen::Lower>().solve(rhs);
        return chol_lower.transpose().triangularView<Eigen::Upper>().solve(y);
    }
};

// Default diagonal regularization: latent columns from a trained body are
// near-collinear, so M needs a small ridge before factorization.
inline real default_ridge(const Eigen::MatrixXd& m) {
    return 1e-10 * m.trace() / real(m.rows());
}

// Builds M from the stored blocks and factorizes it, retrying with a 10x
// larger ridge up to 3 times on failure.
inline void factorize_normal(LatentSystem& sys, real ridge = -1.0) {
    Eigen::MatrixXd m = sys.weights.pde * sys.d_h.transpose() * sys.d_h +
                        sys.weights.bc * (sys.h_left.transpose() * sys.h_left +
                                          sys.h_right.transpose() * sys.h_right);
    for (const auto& h0 : sys.h_initial) m += sys.weights.ic * h0.transpose() * h0;
    m = 0.5 * (m + m.transpose());  // enforce exact symmetry
    sys.normal_matrix = m;

    real r = ridge >= 0.0 ? ridge : default_ridge(m);
    const int n = int(m.rows());
    for (int attempt = 0;; ++attempt) {
        Eigen::LLT<Eigen::MatrixXd> llt(m + r * Eigen::MatrixXd::Identity(n, n));
        factorization_counter()++;
        if (llt.info() == Eigen::Success) {
            sys.chol_lower = llt.matrixL();
            sys.ridge = r;
            return;
        }
        if (attempt >= 3)
            throw std::runtime_error(
                "normal matrix factorization failed after ridge retries (trace " +
                std::to_string(m.trace()) + ", last ridge " + std::to_string(r) + ")");
        r = r > 0.0 ? 10.0 * r : default_ridge(m) + 1e-12;
    }
}

inline LatentSystem assemble_latent_system(const MultiHeadCheckpoint& checkpoint,
                                           const LinearOperator& op, const TransferPoints& points,
                                           const LossWeights& weights, real ridge = -1.0) {
    if (checkpoint.body.latent_dim() < 1) throw std::invalid_argument("empty checkpoint body");
    if (points.x_interior.size() == 0 || points.x_initial.size() == 0)
        throw std::invalid_argument("transfer point sets must be non-empty");

    LatentSystem sys;
    sys.body = checkpoint.body;
    sys.op = op;
    sys.points = points;
    sys.weights = weights;

    {
        JetBatch latent = forward_batch(sys.body, points.x_interior, points.t_interior);
        sys.h_interior = latent.v.transpose();
        sys.d_h = detail::operator_rows(op, latent).transpose();
    }
    {
        Eigen::VectorXd t0 = Eigen::VectorXd::Zero(points.x_initial.size());
        JetBatch latent = forward_batch(sys.body, points.x_initial, t0);
        for (int order = 0; order < std::max(1, op.max_dt_order()); ++order) {
            sys.initial_orders.push_back(order);
            sys.h_initial.push_back(
                latent.get(condition_component(ConditionKind::initial, order)).transpose());
        }
    }
    {
        Eigen::VectorXd xl = Eigen::VectorXd::Constant(points.t_left.size(), points.x_left);
        sys.h_left = forward_batch(sys.body, xl, points.t_left).v.transpose();
        Eigen::VectorXd xr = Eigen::VectorXd::Constant(points.t_right.size(), points.x_right);
        sys.h_right = forward_batch(sys.body, xr, points.t_right).v.transpose();
    }

    factorize_normal(sys, ridge);
    return sys;
}

// Closed-form head weights W* = M^{-1}(w_pde D_H^T f* + w_ic H_0^T g* + w_bc sum H_mu^T B*).
// Uses the stored factorization; never refactorizes.
inline Eigen::VectorXd solve_head(const LatentSystem& sys, const TaskData& task) {
    if (task.forcing.size() != sys.d_h.rows() ||
        task.initial.size() != sys.h_initial.size() ||
        task.boundary_left.size() != sys.h_left.rows() ||
        task.boundary_right.size() != sys.h_right.rows())
        throw std::invalid_argument("task data does not match the point registry");
    for (std::size_t i = 0; i < task.initial.size(); ++i)
        if (task.initial[i].size() != sys.h_initial[i].rows())
            throw std::invalid_argument("initial data block length mismatch");

    Eigen::VectorXd rhs = sys.weights.pde * (sys.d_h.transpose() * task.forcing) +
                          sys.weights.bc * (sys.h_left.transpose() * task.boundary_left +
                                            sys.h_right.transpose() * task.boundary_right);
    for (std::size_t i = 0; i < task.initial.size(); ++i)
        rhs += sys.weights.ic * (sys.h_initial[i].transpose() * task.initial[i]);
    return sys.solve_normal(rhs);
}

// Samples a problem's own forcing and condition data on the registry.
inline TaskData task_data_from_problem(const LatentSystem& sys, const PdeProblem& problem) {
    TaskData task;
    task.forcing = detail::sample_2d([&](real x, real t) { return problem.forcing(x, t); },
                                     sys.points.x_interior, sys.points.t_interior);
    for (int order : sys.initial_orders) {
        const ConditionSpec* c = problem.find(ConditionKind::initial, order);
        if (!c)
            throw std::invalid_argument("problem lacks initial condition of order " +
                                        std::to_string(order));
        Eigen::VectorXd g(sys.points.x_initial.size());
        for (Eigen::Index i = 0; i < g.size(); ++i) g[i] = c->eval(sys.points.x_initial[i]);
        task.initial.push_back(std::move(g));
    }
    auto edge = [&](ConditionKind kind, const Eigen::VectorXd& ts) {
        const ConditionSpec* c = problem.find(kind, 0);
        if (!c) throw std::invalid_argument("problem lacks " + to_string(kind) + " condition");
        Eigen::VectorXd b(ts.size());
        for (Eigen::Index i = 0; i < b.size(); ++i) b[i] = c->eval(ts[i]);
        return b;
    };
    task.boundary_left = edge(ConditionKind::boundary_left, sys.points.t_left);
    task.boundary_right = edge(ConditionKind::boundary_right, sys.points.t_right);
    return task;
}

inline TaskData zero_task_like(const LatentSystem& sys) {
    TaskData t;
    t.forcing = Eigen::VectorXd::Zero(sys.d_h.rows());
    for (const auto& h0 : sys.h_initial) t.initial.push_back(Eigen::VectorXd::Zero(h0.rows()));
    t.boundary_left = Eigen::VectorXd::Zero(sys.h_left.rows());
    t.boundary_right = Eigen::VectorXd::Zero(sys.h_right.rows());
    return t;
}

}  // namespace percas
