#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "percas/body.hpp"
#include "percas/task.hpp"

namespace percas {

struct LossBreakdown {
    real pde = 0.0;
    real ic = 0.0;
    real bc = 0.0;

    real total() const { return pde + ic + bc; }
};

// Jet component constrained by a condition of the given kind/order
// (derivative conditions substitute the matching derivative of u).
inline JetComponent condition_component(ConditionKind kind, int order) {
    if (order == 0) return JetComponent::value;
    if (kind == ConditionKind::initial) {
        if (order == 1) return JetComponent::dt;
        if (order == 2) return JetComponent::dtt;
    } else {
        if (order == 1) return JetComponent::dx;
        if (order == 2) return JetComponent::dxx;
    }
    throw std::invalid_argument("unsupported condition derivative order");
}

namespace detail {

inline Eigen::VectorXd sample_1d(const std::function<real(real)>& f, const Eigen::VectorXd& pts) {
    Eigen::VectorXd out(pts.size());
    for (Eigen::Index i = 0; i < pts.size(); ++i) out[i] = f(pts[i]);
    return out;
}

inline Eigen::VectorXd sample_2d(const ScalarField& f, const Eigen::VectorXd& x,
                                 const Eigen::VectorXd& t) {
    Eigen::VectorXd out(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) out[i] = f(x[i], t[i]);
    return out;
}

inline Eigen::MatrixXd operator_rows(const LinearOperator& op, const JetBatch& latent) {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(latent.rows(), latent.cols());
    for (const auto& t : op.terms)
        out += t.coefficient * latent.get(operator_term_component(t));
    return out;
}

}  // namespace detail

// Physics-informed loss of one head: weighted mean-square PDE residual plus
// IC and BC mismatch. Derivative conditions read the matching jet component.
inline LossBreakdown head_loss(const BodyParams& body, const Eigen::VectorXd& head,
                               const LinearTask& task, const CollocationBatch& batch,
                               const LossWeights& weights, const LinearOperator& op) {
    if (head.size() != body.latent_dim()) throw std::invalid_argument("head size != latent dim");
    LossBreakdown out;
    {
        JetBatch latent = forward_batch(body, batch.x_interior, batch.t_interior);
        Eigen::VectorXd residual =
            detail::operator_rows(op, latent).transpose() * head -
            detail::sample_2d(task.forcing, batch.x_interior, batch.t_interior);
        out.pde = weights.pde * residual.squaredNorm() / real(residual.size());
    }
    {
        Eigen::VectorXd t0 = Eigen::VectorXd::Zero(batch.x_initial.size());
        JetBatch latent = forward_batch(body, batch.x_initial, t0);
        for (const auto& [order, g] : task.initial) {
            Eigen::VectorXd residual =
                latent.get(condition_component(ConditionKind::initial, order)).transpose() * head -
                detail::sample_1d(g, batch.x_initial);
            out.ic += weights.ic * residual.squaredNorm() / real(residual.size());
        }
    }
    auto boundary_term = [&](const Eigen::VectorXd& ts, real x_edge,
                             const std::function<real(real)>& target) {
        Eigen::VectorXd xs = Eigen::VectorXd::Constant(ts.size(), x_edge);
        JetBatch latent = forward_batch(body, xs, ts);
        Eigen::VectorXd residual = latent.v.transpose() * head - detail::sample_1d(target, ts);
        return weights.bc * residual.squaredNorm() / real(residual.size());
    };
    out.bc = boundary_term(batch.t_left, batch.x_left, task.boundary_left) +
             boundary_term(batch.t_right, batch.x_right, task.boundary_right);

    if (!std::isfinite(out.total()))
        throw std::runtime_error("non-finite head loss (pde=" + std::to_string(out.pde) +
                                 " ic=" + std::to_string(out.ic) +
                                 " bc=" + std::to_string(out.bc) + ")");
    return out;
}

// Averaged multi-head loss with gradients w.r.t. the body and the head matrix
// (latent_dim x K). One shared forward pass serves every head and point group.
inline LossBreakdown multihead_loss_grad(const BodyParams& body, const Eigen::MatrixXd& heads,
                                         const std::vector<LinearTask>& tasks,
                                         const CollocationBatch& batch, const LossWeights& weights,
                                         const LinearOperator& op, BodyGradient& body_grad,
                                         Eigen::MatrixXd& head_grad) {
    const int K = int(tasks.size());
    if (heads.cols() != K || heads.rows() != body.latent_dim())
        throw std::invalid_argument("head matrix shape mismatch");

    const Eigen::Index n_int = batch.x_interior.size();
    const Eigen::Index n_ini = batch.x_initial.size();
    const Eigen::Index n_bl = batch.t_left.size();
    const Eigen::Index n_br = batch.t_right.size();
    const Eigen::Index n_all = n_int + n_ini + n_bl + n_br;

    Eigen::VectorXd xs(n_all), ts(n_all);
    xs << batch.x_interior, batch.x_initial, Eigen::VectorXd::Constant(n_bl, batch.x_left),
        Eigen::VectorXd::Constant(n_br, batch.x_right);
    ts << batch.t_interior, Eigen::VectorXd::Zero(n_ini), batch.t_left, batch.t_right;

    ForwardCache cache;
    JetBatch latent = forward_batch(body, xs, ts, &cache);
    JetBatch adj = JetBatch::zero(latent.rows(), latent.cols());
    head_grad = Eigen::MatrixXd::Zero(heads.rows(), heads.cols());
    LossBreakdown out;

    // interior PDE residual
    {
        Eigen::MatrixXd dh = Eigen::MatrixXd::Zero(latent.rows(), n_int);
        for (const auto& t : op.terms)
            dh += t.coefficient * latent.get(operator_term_component(t)).leftCols(n_int);
        Eigen::MatrixXd targets(n_int, K);
        for (int k = 0; k < K; ++k)
            targets.col(k) = detail::sample_2d(tasks[std::size_t(k)].forcing, batch.x_interior,
                                               batch.t_interior);
        Eigen::MatrixXd residual = dh.transpose() * heads - targets;  // n_int x K
        out.pde = weights.pde * residual.squaredNorm() / real(n_int) / real(K);
        const real scale = 2.0 * weights.pde / real(n_int) / real(K);
        head_grad += scale * (dh * residual);
        Eigen::MatrixXd dh_adj = scale * (heads * residual.transpose());  // latent x n_int
        for (const auto& t : op.terms)
            adj.get(operator_term_component(t)).leftCols(n_int) += t.coefficient * dh_adj;
    }
    // initial conditions (one block per constrained derivative order)
    {
        const std::size_t n_conds = tasks[0].initial.size();
        for (std::size_t ci = 0; ci < n_conds; ++ci) {
            const int order = tasks[0].initial[ci].first;
            const JetComponent comp = condition_component(ConditionKind::initial, order);
            Eigen::MatrixXd h0 = latent.get(comp).middleCols(n_int, n_ini);
            Eigen::MatrixXd targets(n_ini, K);
            for (int k = 0; k < K; ++k)
                targets.col(k) =
                    detail::sample_1d(tasks[std::size_t(k)].initial[ci].second, batch.x_initial);
            Eigen::MatrixXd residual = h0.transpose() * heads - targets;
            out.ic += weights.ic * residual.squaredNorm() / real(n_ini) / real(K);
            const real scale = 2.0 * weights.ic / real(n_ini) / real(K);
            head_grad += scale * (h0 * residual);
            adj.get(comp).middleCols(n_int, n_ini) += scale * (heads * residual.transpose());
        }
    }
    // boundaries (Dirichlet on the value component)
    auto boundary_block = [&](Eigen::Index offset, Eigen::Index n, const Eigen::VectorXd& ts_edge,
                              bool left) {
        Eigen::MatrixXd hb = latent.v.middleCols(offset, n);
        Eigen::MatrixXd targets(n, K);
        for (int k = 0; k < K; ++k)
            targets.col(k) = detail::sample_1d(
                left ? tasks[std::size_t(k)].boundary_left : tasks[std::size_t(k)].boundary_right,
                ts_edge);
        Eigen::MatrixXd residual = hb.transpose() * heads - targets;
        out.bc += weights.bc * residual.squaredNorm() / real(n) / real(K);
        const real scale = 2.0 * weights.bc / real(n) / real(K);
        head_grad += scale * (hb * residual);
        adj.v.middleCols(offset, n) += scale * (heads * residual.transpose());
    };
    boundary_block(n_int + n_ini, n_bl, batch.t_left, true);
    boundary_block(n_int + n_ini + n_bl, n_br, batch.t_right, false);

    body_grad = backward_batch(body, cache, std::move(adj));
    if (!std::isfinite(out.total())) throw std::runtime_error("non-finite multi-head loss");
    return out;
}

}  // namespace percas
