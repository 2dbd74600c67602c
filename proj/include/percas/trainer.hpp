#pragma once

#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "percas/adam.hpp"
#include "percas/checkpoint.hpp"
#include "percas/loss.hpp"

namespace percas {

struct TrainConfig {
    long iterations = 50000;
    real learning_rate = 1e-4;
    real decay_factor = 0.975;
    long decay_every = 1000;
    BatchSizes batch;
    LossWeights weights;
    int heads = 10;
    std::uint64_t seed = 1;
    int hidden_layers = 4;
    int width = 64;
    Activation activation = Activation::tanh_fn;
    real divergence_limit = 1e6;
};

inline TrainConfig train_config_from_json(const nlohmann::json& j) {
    TrainConfig c;
    if (j.contains("iterations")) c.iterations = j["iterations"].get<long>();
    if (j.contains("lr")) c.learning_rate = j["lr"].get<real>();
    if (j.contains("lr_decay")) {
        c.decay_factor = j["lr_decay"].value("factor", c.decay_factor);
        c.decay_every = j["lr_decay"].value("every", c.decay_every);
    }
    if (j.contains("batch")) {
        c.batch.interior = j["batch"].value("interior", c.batch.interior);
        c.batch.initial = j["batch"].value("initial", c.batch.initial);
        c.batch.boundary = j["batch"].value("boundary", c.batch.boundary);
    }
    if (j.contains("weights")) {
        c.weights.pde = j["weights"].value("pde", c.weights.pde);
        c.weights.ic = j["weights"].value("ic", c.weights.ic);
        c.weights.bc = j["weights"].value("bc", c.weights.bc);
    }
    if (j.contains("heads")) c.heads = j["heads"].get<int>();
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("architecture")) {
        c.hidden_layers = j["architecture"].value("layers", c.hidden_layers);
        c.width = j["architecture"].value("width", c.width);
        if (j["architecture"].contains("activation"))
            c.activation = activation_from_string(j["architecture"]["activation"].get<std::string>());
    }
    return c;
}

struct LossRecord {
    long iteration = 0;
    real total = 0.0, pde = 0.0, ic = 0.0, bc = 0.0;
};

struct TrainResult {
    MultiHeadCheckpoint checkpoint;
    std::vector<LossRecord> history;
};

struct DivergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Joint optimization of the shared body and all head vectors against the
// averaged physics-informed loss, one fresh collocation batch per step.
inline TrainResult train(const LinearOperator& op, const SpaceTimeDomain& domain,
                         const std::vector<LinearTask>& tasks, const TrainConfig& cfg,
                         std::ostream* progress = nullptr,
                         std::vector<LossRecord>* partial_history = nullptr) {
    if (tasks.empty()) throw std::invalid_argument("need at least one head task");
    if (!cfg.weights.valid()) throw std::invalid_argument("loss weights must be positive");

    std::vector<int> widths;
    widths.push_back(2);
    for (int i = 0; i < cfg.hidden_layers; ++i) widths.push_back(cfg.width);
    BodyParams body = make_body(widths, cfg.activation, cfg.seed);

    std::mt19937_64 head_rng(cfg.seed ^ 0x9e3779b97f4a7c15ull);
    std::uniform_real_distribution<real> unit(-1.0, 1.0);
    Eigen::MatrixXd heads(body.latent_dim(), tasks.size());
    const real head_scale = 1.0 / std::sqrt(real(body.latent_dim()));
    for (Eigen::Index r = 0; r < heads.rows(); ++r)
        for (Eigen::Index k = 0; k < heads.cols(); ++k) heads(r, k) = head_scale * unit(head_rng);

    std::vector<Eigen::MatrixXd*> params;
    for (auto& w : body.weights) params.push_back(&w);
    for (auto& b : body.biases) params.push_back(&b);
    params.push_back(&heads);
    OptimizerState opt = OptimizerState::init(
        {params.begin(), params.end()}, cfg.learning_rate, cfg.decay_factor, cfg.decay_every);

    std::mt19937_64 batch_rng(cfg.seed + 17);
    TrainResult result;
    result.history.reserve(std::size_t(cfg.iterations));
    BodyGradient body_grad;
    Eigen::MatrixXd head_grad;

    for (long it = 1; it <= cfg.iterations; ++it) {
        CollocationBatch batch = sample_collocation(domain, cfg.batch, batch_rng);
        LossBreakdown loss = multihead_loss_grad(body, heads, tasks, batch, cfg.weights, op,
                                                 body_grad, head_grad);
        if (!std::isfinite(loss.total()) || loss.total() > cfg.divergence_limit) {
            result.history.push_back({it, loss.total(), loss.pde, loss.ic, loss.bc});
            if (partial_history) *partial_history = result.history;
            throw DivergenceError("training diverged at iteration " + std::to_string(it) +
                                  " (loss " + std::to_string(loss.total()) + ")");
        }

        std::vector<const Eigen::MatrixXd*> grads;
        for (auto& w : body_grad.weights) grads.push_back(&w);
        for (auto& b : body_grad.biases) grads.push_back(&b);
        grads.push_back(&head_grad);
        adam_step(opt, params, grads);

        result.history.push_back({it, loss.total(), loss.pde, loss.ic, loss.bc});
        if (progress && it % 1000 == 0)
            (*progress) << "iter " << it << " loss " << loss.total() << " lr "
                        << opt.learning_rate << "\n";
    }

    result.checkpoint.body = std::move(body);
    result.checkpoint.heads = std::move(heads);
    result.checkpoint.op = op;
    result.checkpoint.seed = cfg.seed;
    result.checkpoint.training_steps = cfg.iterations;
    result.checkpoint.final_loss =
        result.history.empty() ? 0.0 : result.history.back().total;
    return result;
}

inline void write_loss_history_csv(const std::vector<LossRecord>& history,
                                   const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write loss history '" + path + "'");
    out << "iteration,total,pde,ic,bc\n";
    for (const auto& r : history)
        out << r.iteration << "," << r.total << "," << r.pde << "," << r.ic << "," << r.bc << "\n";
}

}  // namespace percas
