#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "percas/domain.hpp"

#include <Eigen/Dense>

namespace percas {

// Adam with bias correction and a stepwise learning-rate decay schedule.
struct OptimizerState {
    std::vector<Eigen::MatrixXd> m;  // first moments, one block per parameter matrix
    std::vector<Eigen::MatrixXd> v;  // second moments
    long step = 0;
    real learning_rate = 1e-4;
    real beta1 = 0.9;
    real beta2 = 0.999;
    real eps = 1e-8;
    real decay_factor = 0.975;
    long decay_every = 1000;

    static OptimizerState init(const std::vector<const Eigen::MatrixXd*>& params, real lr,
                               real decay_factor = 0.975, long decay_every = 1000) {
        if (lr <= 0.0) throw std::invalid_argument("learning rate must be positive");
        OptimizerState s;
        s.learning_rate = lr;
        s.decay_factor = decay_factor;
        s.decay_every = decay_every;
        for (const auto* p : params) {
            s.m.push_back(Eigen::MatrixXd::Zero(p->rows(), p->cols()));
            s.v.push_back(Eigen::MatrixXd::Zero(p->rows(), p->cols()));
        }
        return s;
    }
};

// One update over a block list; params and grads must mirror the init order.
inline void adam_step(OptimizerState& state, const std::vector<Eigen::MatrixXd*>& params,
                      const std::vector<const Eigen::MatrixXd*>& grads) {
    if (params.size() != state.m.size() || grads.size() != state.m.size())
        throw std::invalid_argument("parameter/gradient block count mismatch");
    state.step += 1;
    const real bc1 = 1.0 - std::pow(state.beta1, real(state.step));
    const real bc2 = 1.0 - std::pow(state.beta2, real(state.step));
    for (std::size_t i = 0; i < params.size(); ++i) {
        Eigen::MatrixXd& p = *params[i];
        const Eigen::MatrixXd& g = *grads[i];
        if (p.rows() != g.rows() || p.cols() != g.cols())
            throw std::invalid_argument("gradient shape mismatch");
        state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * g;
        state.v[i] = state.beta2 * state.v[i].array().matrix() +
                     (1.0 - state.beta2) * g.cwiseProduct(g);
        const Eigen::ArrayXXd mhat = state.m[i].array() / bc1;
        const Eigen::ArrayXXd vhat = state.v[i].array() / bc2;
        p.array() -= state.learning_rate * mhat / (vhat.sqrt() + state.eps);
    }
    if (state.decay_every > 0 && state.step % state.decay_every == 0)
        state.learning_rate *= state.decay_factor;
}

}  // namespace percas
