#include <catch_amalgamated.hpp>

#include <random>

#include "percas/adam.hpp"
#include "percas/body.hpp"

using namespace percas;

namespace {

BodyParams identity_linear_body() {
    BodyParams p;
    p.activation = Activation::linear;
    p.weights.push_back(Eigen::MatrixXd::Identity(2, 2));
    p.biases.push_back(Eigen::MatrixXd::Zero(2, 1));
    return p;
}

real plain_value(const BodyParams& p, int unit, real x, real t) {
    return forward_jet(p, x, t)[std::size_t(unit)].v;
}

}  // namespace

TEST_CASE("jets through an identity linear layer") {
    BodyParams p = identity_linear_body();
    auto jets = forward_jet(p, 0.3, 0.7);
    REQUIRE(jets.size() == 2);
    CHECK(jets[0].v == Catch::Approx(0.3));
    CHECK(jets[0].dx == Catch::Approx(1.0));
    CHECK(jets[0].dt == Catch::Approx(0.0));
    CHECK(jets[0].dxx == Catch::Approx(0.0));
    CHECK(jets[0].dtt == Catch::Approx(0.0));
    CHECK(jets[1].v == Catch::Approx(0.7));
    CHECK(jets[1].dt == Catch::Approx(1.0));
}

TEST_CASE("tanh layer at zero pre-activation") {
    BodyParams p;
    p.activation = Activation::tanh_fn;
    Eigen::MatrixXd w(1, 2);
    w << 2.0, -1.0;
    p.weights.push_back(w);
    p.biases.push_back(Eigen::MatrixXd::Zero(1, 1));
    // pre-activation 2x - t = 0 at (0.5, 1.0)
    auto jets = forward_jet(p, 0.5, 1.0);
    CHECK(jets[0].v == Catch::Approx(0.0).margin(1e-15));
    CHECK(jets[0].dx == Catch::Approx(2.0));   // sigma'(0) = 1
    CHECK(jets[0].dt == Catch::Approx(-1.0));
    CHECK(jets[0].dxx == Catch::Approx(0.0).margin(1e-15));  // sigma''(0) = 0
    CHECK(jets[0].dtt == Catch::Approx(0.0).margin(1e-15));
}

TEST_CASE("jets match central finite differences on random nets") {
    std::mt19937_64 seed_rng(123);
    for (int trial = 0; trial < 20; ++trial) {
        BodyParams p = make_body({2, 6, 5, 4}, Activation::tanh_fn, seed_rng());
        const real x = 0.3 + 0.05 * trial, t = 0.9 - 0.03 * trial;
        auto jets = forward_jet(p, x, t);
        const real h1 = 1e-5, h2 = 1e-3;
        for (int unit = 0; unit < 4; ++unit) {
            const real fd_dx =
                (plain_value(p, unit, x + h1, t) - plain_value(p, unit, x - h1, t)) / (2 * h1);
            const real fd_dt =
                (plain_value(p, unit, x, t + h1) - plain_value(p, unit, x, t - h1)) / (2 * h1);
            const real fd_dxx = (plain_value(p, unit, x + h2, t) - 2 * plain_value(p, unit, x, t) +
                                 plain_value(p, unit, x - h2, t)) /
                                (h2 * h2);
            const real fd_dtt = (plain_value(p, unit, x, t + h2) - 2 * plain_value(p, unit, x, t) +
                                 plain_value(p, unit, x, t - h2)) /
                                (h2 * h2);
            const Jet& j = jets[std::size_t(unit)];
            CHECK(j.dx == Catch::Approx(fd_dx).margin(1e-6).epsilon(1e-5));
            CHECK(j.dt == Catch::Approx(fd_dt).margin(1e-6).epsilon(1e-5));
            CHECK(j.dxx == Catch::Approx(fd_dxx).margin(1e-4).epsilon(1e-3));
            CHECK(j.dtt == Catch::Approx(fd_dtt).margin(1e-4).epsilon(1e-3));
        }
    }
}

TEST_CASE("forward_jet is deterministic") {
    BodyParams p = make_body({2, 8, 8}, Activation::tanh_fn, 99);
    auto a = forward_jet(p, 0.123, 0.456);
    auto b = forward_jet(p, 0.123, 0.456);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].v == b[i].v);
        CHECK(a[i].dxx == b[i].dxx);
    }
}

TEST_CASE("activation second derivative is numerically continuous") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<real> arg(-4.0, 4.0);
    Eigen::MatrixXd s0, s1, s2, s3;
    for (int i = 0; i < 1000; ++i) {
        const real z = arg(rng);
        const real h = 1e-6;
        Eigen::MatrixXd zm(1, 3);
        zm << z - h, z, z + h;
        act::derivatives(Activation::tanh_fn, zm, s0, s1, s2, s3);
        CHECK(std::abs(s2(0, 2) - s2(0, 0)) < 1e-4);  // no jump across h
        // s2 consistent with derivative of s1
        CHECK((s1(0, 2) - s1(0, 0)) / (2 * h) == Catch::Approx(s2(0, 1)).margin(1e-6));
    }
}

TEST_CASE("apply_operator on jets") {
    Jet j{0.5, 1.5, -0.25, 2.0, -3.0};
    CHECK(apply_operator(LinearOperator::heat(0.1), j) == Catch::Approx(-0.25 - 0.1 * 2.0));
    CHECK(apply_operator(LinearOperator::wave(2.0), j) == Catch::Approx(-3.0 - 4.0 * 2.0));
    LinearOperator zero{{{0, 0, 0.0}}};
    CHECK(apply_operator(zero, j) == 0.0);
    LinearOperator bad{{{1, 1, 1.0}}};
    CHECK_THROWS(apply_operator(bad, j));
}

TEST_CASE("param gradient: zero loss gives zero gradient") {
    BodyParams p = make_body({2, 4, 3}, Activation::tanh_fn, 11);
    Eigen::VectorXd x(2), t(2);
    x << 0.1, 0.2;
    t << 0.3, 0.4;
    BodyGradient g;
    const real loss = param_gradient(
        p, x, t, [](const JetBatch&, JetBatch&) { return 0.0; }, g);
    CHECK(loss == 0.0);
    for (const auto& w : g.weights) CHECK(w.isZero());
    for (const auto& b : g.biases) CHECK(b.isZero());
}

TEST_CASE("param gradient: closed form on a linear single layer") {
    // u(x,t) = w0 x + w1 t (unit 0), loss = u(x0,t0)^2
    BodyParams p = identity_linear_body();
    p.weights[0] << 0.8, -0.4, 0.0, 1.0;
    const real x0 = 0.3, t0 = 0.7;
    Eigen::VectorXd xs(1), ts(1);
    xs << x0;
    ts << t0;
    BodyGradient g;
    const real loss = param_gradient(
        p, xs, ts,
        [](const JetBatch& latent, JetBatch& adj) {
            const real u = latent.v(0, 0);
            adj.v(0, 0) = 2.0 * u;
            return u * u;
        },
        g);
    const real u = 0.8 * x0 - 0.4 * t0;
    CHECK(loss == Catch::Approx(u * u));
    CHECK(g.weights[0](0, 0) == Catch::Approx(2.0 * u * x0));
    CHECK(g.weights[0](0, 1) == Catch::Approx(2.0 * u * t0));
    CHECK(g.biases[0](0, 0) == Catch::Approx(2.0 * u));
    CHECK(g.weights[0].row(1).isZero());
}

TEST_CASE("param gradient matches finite differences for a PDE-residual loss") {
    BodyParams p = make_body({2, 8, 8, 6}, Activation::tanh_fn, 321);
    LinearOperator op = LinearOperator::heat(0.1);
    Eigen::VectorXd x = Eigen::VectorXd::Random(7).array() * 0.5 + 0.5;
    Eigen::VectorXd t = Eigen::VectorXd::Random(7).array() * 0.5 + 0.5;
    Eigen::VectorXd head = Eigen::VectorXd::Random(6);

    auto loss_fn = [&](const JetBatch& latent, JetBatch& adj) {
        Eigen::MatrixXd dh = Eigen::MatrixXd::Zero(latent.rows(), latent.cols());
        for (const auto& term : op.terms)
            dh += term.coefficient * latent.get(operator_term_component(term));
        Eigen::VectorXd residual = dh.transpose() * head;
        const real n = real(residual.size());
        Eigen::MatrixXd dh_adj = (2.0 / n) * head * residual.transpose();
        for (const auto& term : op.terms)
            adj.get(operator_term_component(term)) += term.coefficient * dh_adj;
        return residual.squaredNorm() / n;
    };

    BodyGradient g;
    param_gradient(p, x, t, loss_fn, g);

    auto loss_of = [&](const BodyParams& params) {
        JetBatch latent = forward_batch(params, x, t);
        Eigen::MatrixXd dh = Eigen::MatrixXd::Zero(latent.rows(), latent.cols());
        for (const auto& term : op.terms)
            dh += term.coefficient * latent.get(operator_term_component(term));
        Eigen::VectorXd residual = dh.transpose() * head;
        return residual.squaredNorm() / real(residual.size());
    };

    const real h = 1e-5;
    std::mt19937_64 pick(9);
    for (int sample = 0; sample < 40; ++sample) {
        const std::size_t layer = pick() % p.weights.size();
        const Eigen::Index r = Eigen::Index(pick() % std::uint64_t(p.weights[layer].rows()));
        const Eigen::Index c = Eigen::Index(pick() % std::uint64_t(p.weights[layer].cols()));
        BodyParams plus = p, minus = p;
        plus.weights[layer](r, c) += h;
        minus.weights[layer](r, c) -= h;
        const real fd = (loss_of(plus) - loss_of(minus)) / (2 * h);
        const real an = g.weights[layer](r, c);
        if (std::abs(an) > 1e-6)
            CHECK(an == Catch::Approx(fd).epsilon(1e-4));
        else
            CHECK(std::abs(fd) < 1e-5);
    }
}

TEST_CASE("adam step behavior") {
    Eigen::MatrixXd param = Eigen::MatrixXd::Constant(2, 2, 1.0);
    OptimizerState st = OptimizerState::init({&param}, 1e-4);

    Eigen::MatrixXd zero_grad = Eigen::MatrixXd::Zero(2, 2);
    adam_step(st, {&param}, {&zero_grad});
    CHECK(st.step == 1);
    CHECK(param.isApproxToConstant(1.0));

    // learning rate decays by 0.975 at the 1000-step boundary
    OptimizerState st2 = OptimizerState::init({&param}, 1e-4);
    for (int i = 0; i < 1000; ++i) adam_step(st2, {&param}, {&zero_grad});
    CHECK(st2.learning_rate == Catch::Approx(1e-4 * 0.975));

    // constant gradient drives updates toward -sign(g) * lr
    Eigen::MatrixXd scalar = Eigen::MatrixXd::Constant(1, 1, 0.0);
    OptimizerState st3 = OptimizerState::init({&scalar}, 1e-3, 1.0, 0);
    Eigen::MatrixXd grad = Eigen::MatrixXd::Constant(1, 1, 3.7);
    real prev = scalar(0, 0);
    for (int i = 0; i < 500; ++i) adam_step(st3, {&scalar}, {&grad});
    const real avg_step = (prev - scalar(0, 0)) / 500.0;
    CHECK(avg_step == Catch::Approx(1e-3).epsilon(0.05));  // unit step * lr toward -sign(g)
}

TEST_CASE("make_body is deterministic in the seed") {
    BodyParams a = make_body({2, 16, 16}, Activation::tanh_fn, 77);
    BodyParams b = make_body({2, 16, 16}, Activation::tanh_fn, 77);
    BodyParams c = make_body({2, 16, 16}, Activation::tanh_fn, 78);
    CHECK((a.weights[0].array() == b.weights[0].array()).all());
    CHECK((a.weights[1].array() == b.weights[1].array()).all());
    CHECK(!(a.weights[0].array() == c.weights[0].array()).all());
}
