#pragma once

#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "percas/jet.hpp"
#include "percas/operator.hpp"

namespace percas {

// Activations must be C^2; third derivatives are needed by the backward pass
// through second-order jet components.
enum class Activation { tanh_fn, sin_fn, linear };

inline std::string to_string(Activation a) {
    switch (a) {
        case Activation::tanh_fn: return "tanh";
        case Activation::sin_fn: return "sin";
        case Activation::linear: return "linear";
    }
    return "?";
}
inline Activation activation_from_string(const std::string& s) {
    if (s == "tanh") return Activation::tanh_fn;
    if (s == "sin") return Activation::sin_fn;
    if (s == "linear") return Activation::linear;
    throw std::invalid_argument("unknown activation '" + s + "'");
}

namespace act {

// Fills s0..s3 with sigma and its first three derivatives, elementwise.
inline void derivatives(Activation a, const Eigen::MatrixXd& z, Eigen::MatrixXd& s0,
                        Eigen::MatrixXd& s1, Eigen::MatrixXd& s2, Eigen::MatrixXd& s3) {
    if (a == Activation::tanh_fn) {
        s0 = z.array().tanh();
        s1 = 1.0 - s0.array().square();                       // 1 - s^2
        s2 = -2.0 * s0.array() * s1.array();                  // -2 s (1 - s^2)
        s3 = -2.0 * s1.array() * (s1.array() - 2.0 * s0.array().square());
    } else if (a == Activation::sin_fn) {
        s0 = z.array().sin();
        s1 = z.array().cos();
        s2 = -s0;
        s3 = -s1;
    } else {
        s0 = z;
        s1 = Eigen::MatrixXd::Ones(z.rows(), z.cols());
        s2 = Eigen::MatrixXd::Zero(z.rows(), z.cols());
        s3 = s2;
    }
}

}  // namespace act

// Fully connected body; the activation of the last layer is the latent basis H.
struct BodyParams {
    std::vector<Eigen::MatrixXd> weights;  // weights[i]: width_{i+1} x width_i
    std::vector<Eigen::MatrixXd> biases;   // biases[i]: width_{i+1} x 1
    Activation activation = Activation::tanh_fn;

    int input_dim() const { return weights.empty() ? 0 : int(weights.front().cols()); }
    int latent_dim() const { return weights.empty() ? 0 : int(weights.back().rows()); }
    std::size_t layer_count() const { return weights.size(); }

    std::vector<int> widths() const {
        std::vector<int> w;
        if (weights.empty()) return w;
        w.push_back(input_dim());
        for (const auto& m : weights) w.push_back(int(m.rows()));
        return w;
    }
};

// Uniform init scaled by 1/sqrt(fan_in), deterministic in the seed.
inline BodyParams make_body(const std::vector<int>& widths, Activation activation,
                            std::uint64_t seed) {
    if (widths.size() < 2) throw std::invalid_argument("body needs at least input and one layer");
    BodyParams p;
    p.activation = activation;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<real> unit(-1.0, 1.0);
    for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
        const int fan_in = widths[i];
        const int fan_out = widths[i + 1];
        const real scale = 1.0 / std::sqrt(real(fan_in));
        Eigen::MatrixXd w(fan_out, fan_in);
        for (Eigen::Index r = 0; r < w.rows(); ++r)
            for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = scale * unit(rng);
        p.weights.push_back(std::move(w));
        p.biases.push_back(Eigen::MatrixXd::Zero(fan_out, 1));
    }
    return p;
}

// Batched jet state: one column per evaluation point, one row per unit.
struct JetBatch {
    Eigen::MatrixXd v, dx, dt, dxx, dtt;

    static JetBatch zero(Eigen::Index rows, Eigen::Index cols) {
        JetBatch b;
        b.v = Eigen::MatrixXd::Zero(rows, cols);
        b.dx = b.v;
        b.dt = b.v;
        b.dxx = b.v;
        b.dtt = b.v;
        return b;
    }
    Eigen::Index cols() const { return v.cols(); }
    Eigen::Index rows() const { return v.rows(); }
    bool all_finite() const {
        return v.allFinite() && dx.allFinite() && dt.allFinite() && dxx.allFinite() &&
               dtt.allFinite();
    }
    const Eigen::MatrixXd& get(JetComponent c) const {
        switch (c) {
            case JetComponent::value: return v;
            case JetComponent::dx: return dx;
            case JetComponent::dt: return dt;
            case JetComponent::dxx: return dxx;
            case JetComponent::dtt: return dtt;
        }
        return v;
    }
    Eigen::MatrixXd& get(JetComponent c) { return const_cast<Eigen::MatrixXd&>(std::as_const(*this).get(c)); }
};

// Per-layer state kept for the backward pass.
struct ForwardCache {
    std::vector<JetBatch> pre;   // pre-activation jets per layer
    std::vector<JetBatch> post;  // post[0] = input seed, post[i] = activation of layer i-1
};

inline JetBatch seed_inputs(const Eigen::VectorXd& x, const Eigen::VectorXd& t) {
    if (x.size() != t.size()) throw std::invalid_argument("x/t sample count mismatch");
    JetBatch in = JetBatch::zero(2, x.size());
    in.v.row(0) = x.transpose();
    in.v.row(1) = t.transpose();
    in.dx.row(0).setOnes();
    in.dt.row(1).setOnes();
    return in;
}

// Jet-propagating forward pass over a batch of points. Affine maps act
// linearly on every component; the activation follows the chain rule
//   a = s0,  a' = s1 z',  a'' = s2 z'^2 + s1 z''
// per input direction.
inline JetBatch forward_batch(const BodyParams& p, const Eigen::VectorXd& x,
                              const Eigen::VectorXd& t, ForwardCache* cache = nullptr) {
    JetBatch a = seed_inputs(x, t);
    if (cache) {
        cache->pre.clear();
        cache->post.clear();
        cache->post.push_back(a);
    }
    Eigen::MatrixXd s0, s1, s2, s3;
    for (std::size_t i = 0; i < p.layer_count(); ++i) {
        const Eigen::MatrixXd& w = p.weights[i];
        JetBatch z;
        z.v = (w * a.v).colwise() + Eigen::VectorXd(p.biases[i].col(0));
        z.dx = w * a.dx;
        z.dt = w * a.dt;
        z.dxx = w * a.dxx;
        z.dtt = w * a.dtt;
        if (!z.all_finite())
            throw std::runtime_error("non-finite value in layer " + std::to_string(i));
        act::derivatives(p.activation, z.v, s0, s1, s2, s3);
        JetBatch out;
        out.v = s0;
        out.dx = s1.cwiseProduct(z.dx);
        out.dt = s1.cwiseProduct(z.dt);
        out.dxx = s2.cwiseProduct(z.dx.cwiseProduct(z.dx)) + s1.cwiseProduct(z.dxx);
        out.dtt = s2.cwiseProduct(z.dt.cwiseProduct(z.dt)) + s1.cwiseProduct(z.dtt);
        if (cache) {
            cache->pre.push_back(std::move(z));
            cache->post.push_back(out);
        }
        a = std::move(out);
    }
    return a;
}

// Value and input derivatives of every latent unit at one point.
inline std::vector<Jet> forward_jet(const BodyParams& p, real x, real t) {
    Eigen::VectorXd xs(1), ts(1);
    xs[0] = x;
    ts[0] = t;
    JetBatch out = forward_batch(p, xs, ts);
    std::vector<Jet> jets(std::size_t(out.rows()));
    for (Eigen::Index n = 0; n < out.rows(); ++n)
        jets[std::size_t(n)] = {out.v(n, 0), out.dx(n, 0), out.dt(n, 0), out.dxx(n, 0),
                                out.dtt(n, 0)};
    return jets;
}

struct BodyGradient {
    std::vector<Eigen::MatrixXd> weights;
    std::vector<Eigen::MatrixXd> biases;

    static BodyGradient zero_like(const BodyParams& p) {
        BodyGradient g;
        for (const auto& w : p.weights) g.weights.push_back(Eigen::MatrixXd::Zero(w.rows(), w.cols()));
        for (const auto& b : p.biases) g.biases.push_back(Eigen::MatrixXd::Zero(b.rows(), 1));
        return g;
    }
    void accumulate(const BodyGradient& o) {
        for (std::size_t i = 0; i < weights.size(); ++i) weights[i] += o.weights[i];
        for (std::size_t i = 0; i < biases.size(); ++i) biases[i] += o.biases[i];
    }
};

// Reverse pass: adjoint of the latent jets -> gradient w.r.t. every weight
// and bias, including the paths through the derivative components.
inline BodyGradient backward_batch(const BodyParams& p, const ForwardCache& cache,
                                   JetBatch adj) {
    BodyGradient g = BodyGradient::zero_like(p);
    Eigen::MatrixXd s0, s1, s2, s3;
    for (std::size_t i = p.layer_count(); i-- > 0;) {
        const JetBatch& z = cache.pre[i];
        const JetBatch& a_prev = cache.post[i];
        act::derivatives(p.activation, z.v, s0, s1, s2, s3);

        JetBatch zbar;
        zbar.v = adj.v.cwiseProduct(s1) + adj.dx.cwiseProduct(s2.cwiseProduct(z.dx)) +
                 adj.dt.cwiseProduct(s2.cwiseProduct(z.dt)) +
                 adj.dxx.cwiseProduct(s3.cwiseProduct(z.dx.cwiseProduct(z.dx)) +
                                      s2.cwiseProduct(z.dxx)) +
                 adj.dtt.cwiseProduct(s3.cwiseProduct(z.dt.cwiseProduct(z.dt)) +
                                      s2.cwiseProduct(z.dtt));
        zbar.dx = adj.dx.cwiseProduct(s1) + 2.0 * adj.dxx.cwiseProduct(s2.cwiseProduct(z.dx));
        zbar.dt = adj.dt.cwiseProduct(s1) + 2.0 * adj.dtt.cwiseProduct(s2.cwiseProduct(z.dt));
        zbar.dxx = adj.dxx.cwiseProduct(s1);
        zbar.dtt = adj.dtt.cwiseProduct(s1);

        g.weights[i] = zbar.v * a_prev.v.transpose() + zbar.dx * a_prev.dx.transpose() +
                       zbar.dt * a_prev.dt.transpose() + zbar.dxx * a_prev.dxx.transpose() +
                       zbar.dtt * a_prev.dtt.transpose();
        g.biases[i] = zbar.v.rowwise().sum();

        if (i > 0) {
            const Eigen::MatrixXd& w = p.weights[i];
            JetBatch prev_adj;
            prev_adj.v = w.transpose() * zbar.v;
            prev_adj.dx = w.transpose() * zbar.dx;
            prev_adj.dt = w.transpose() * zbar.dt;
            prev_adj.dxx = w.transpose() * zbar.dxx;
            prev_adj.dtt = w.transpose() * zbar.dtt;
            adj = std::move(prev_adj);
        }
    }
    return g;
}

// Gradient of a scalar loss built from latent jets at a finite point set.
// The closure receives the latent jets and must return the loss while filling
// the adjoint (d loss / d jet component) it is given.
template <typename LossFn>
real param_gradient(const BodyParams& p, const Eigen::VectorXd& x, const Eigen::VectorXd& t,
                    LossFn&& loss_fn, BodyGradient& grad_out) {
    ForwardCache cache;
    JetBatch latent = forward_batch(p, x, t, &cache);
    JetBatch adj = JetBatch::zero(latent.rows(), latent.cols());
    const real loss = loss_fn(latent, adj);
    grad_out = backward_batch(p, cache, adj);
    for (const auto& w : grad_out.weights)
        if (!w.allFinite()) throw std::runtime_error("non-finite parameter gradient");
    return loss;
}

}  // namespace percas
