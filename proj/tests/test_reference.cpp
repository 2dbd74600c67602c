#include <catch_amalgamated.hpp>

#include <cmath>

#include "percas/mol.hpp"
#include "percas/presets.hpp"

using namespace percas;

namespace {

PdeProblem heat_problem(real diffusion, const std::string& ic, const std::string& left,
                        const std::string& right, const std::string& forcing) {
    PdeProblem p;
    p.op = LinearOperator::heat(diffusion);
    p.perturbation = Polynomial({0.0});
    p.epsilon = 0.0;
    p.domain = {0.0, 2.0, 1.0};
    p.conditions = {{ConditionKind::initial, 0, Expression::parse(ic)},
                    {ConditionKind::boundary_left, 0, Expression::parse(left)},
                    {ConditionKind::boundary_right, 0, Expression::parse(right)}};
    p.forcing = Expression::parse(forcing);
    return p;
}

GridField exact_field(const GridSpec& g, const std::function<real(real, real)>& u) {
    GridField f(g);
    for (int j = 0; j < g.n_t; ++j)
        for (int i = 0; i < g.n_x; ++i) f.values(i, j) = u(g.x(i), g.t(j));
    return f;
}

}  // namespace

TEST_CASE("heat solver reproduces an analytic decay mode") {
    const real d = 0.1;
    PdeProblem p = heat_problem(d, "sin(pi*x/2)", "0", "0", "0");
    MolConfig cfg;
    cfg.output = GridSpec{41, 21, p.domain};
    GridField num = solve_reference(p, cfg);
    const real rate = d * (M_PI / 2.0) * (M_PI / 2.0);
    GridField exact = exact_field(cfg.output, [&](real x, real t) {
        return std::exp(-rate * t) * std::sin(M_PI * x / 2.0);
    });
    CHECK(relative_error(num, exact).relative_l2 < 1e-4);
}

TEST_CASE("kpp equilibrium state stays at one") {
    PdeProblem p = make_preset("kpp-1", 0.1);
    p.conditions = {{ConditionKind::initial, 0, Expression::parse("1")},
                    {ConditionKind::boundary_left, 0, Expression::parse("1")},
                    {ConditionKind::boundary_right, 0, Expression::parse("1")}};
    MolConfig cfg;
    cfg.output = GridSpec{31, 11, p.domain};
    GridField num = solve_reference(p, cfg);
    CHECK((num.values.array() - 1.0).abs().maxCoeff() < 1e-10);
}

TEST_CASE("heat solver matches a manufactured solution") {
    // u* = exp(-t) (1 + cos(pi x)), f = u*_t - d u*_xx
    const real d = 0.1;
    PdeProblem p = heat_problem(
        d, "1 + cos(pi*x)", "2*exp(-t)", "2*exp(-t)",
        "exp(-t)*(0.1*pi^2*cos(pi*x) - 1 - cos(pi*x))");
    MolConfig cfg;
    cfg.output = GridSpec{41, 21, p.domain};
    GridField num = solve_reference(p, cfg);
    GridField exact = exact_field(cfg.output, [](real x, real t) {
        return std::exp(-t) * (1.0 + std::cos(M_PI * x));
    });
    CHECK(relative_error(num, exact).relative_l2 < 1e-4);
}

TEST_CASE("wave solver reproduces a standing mode") {
    PdeProblem p;
    p.op = LinearOperator::wave(1.0);
    p.perturbation = Polynomial({0.0});
    p.epsilon = 0.0;
    p.domain = {0.0, 2.0, 1.0};
    p.conditions = {{ConditionKind::initial, 0, Expression::parse("sin(pi*x/2)")},
                    {ConditionKind::initial, 1, Expression::parse("0")},
                    {ConditionKind::boundary_left, 0, Expression::parse("0")},
                    {ConditionKind::boundary_right, 0, Expression::parse("0")}};
    p.forcing = Expression::parse("0");
    MolConfig cfg;
    cfg.output = GridSpec{41, 21, p.domain};
    GridField num = solve_reference(p, cfg);
    GridField exact = exact_field(cfg.output, [](real x, real t) {
        return std::cos(M_PI * t / 2.0) * std::sin(M_PI * x / 2.0);
    });
    CHECK(relative_error(num, exact).relative_l2 < 1e-4);
}

TEST_CASE("wave solver with zero data stays zero") {
    PdeProblem p;
    p.op = LinearOperator::wave(1.0);
    p.perturbation = kpp_polynomial(1, 1);
    p.epsilon = 0.5;  // P(0) = 0, so zero remains a solution
    p.domain = {0.0, 2.0, 1.0};
    p.conditions = {{ConditionKind::initial, 0, Expression::parse("0")},
                    {ConditionKind::initial, 1, Expression::parse("0")},
                    {ConditionKind::boundary_left, 0, Expression::parse("0")},
                    {ConditionKind::boundary_right, 0, Expression::parse("0")}};
    p.forcing = Expression::parse("0");
    MolConfig cfg;
    cfg.output = GridSpec{31, 11, p.domain};
    GridField num = solve_reference(p, cfg);
    CHECK(num.values.cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("benchmark presets integrate to bounded fields") {
    for (const auto& name : {"kpp-1", "kpp-2", "kpp-3", "kpp-4", "wave-1"}) {
        CAPTURE(name);
        PdeProblem p = make_preset(name, 0.1);
        MolConfig cfg;
        cfg.output = GridSpec{41, 21, p.domain};
        std::vector<std::string> warnings;
        GridField num = solve_reference(p, cfg, &warnings);
        CHECK(num.values.allFinite());
        CHECK(num.values.cwiseAbs().maxCoeff() < 10.0);
    }
}

TEST_CASE("relative_error on hand fields") {
    GridSpec g{3, 2, {0.0, 2.0, 1.0}};
    GridField ref(g), cand(g);
    ref.values.setConstant(2.0);
    cand.values = ref.values;
    cand.values(0, 0) = 2.5;
    ErrorReport r = relative_error(cand, ref);
    CHECK(r.max_abs == Catch::Approx(0.5));
    CHECK(r.relative_l2 == Catch::Approx(0.5 / std::sqrt(6 * 4.0)));

    GridField zero(g);
    zero.values.setZero();
    CHECK_THROWS(relative_error(cand, zero));
    GridSpec other{4, 2, {0.0, 2.0, 1.0}};
    GridField wrong(other);
    CHECK_THROWS(relative_error(wrong, ref));
}

TEST_CASE("spatial error shrinks at second order") {
    PdeProblem p = make_preset("kpp-1", 0.1);
    GridSpec out{51, 11, p.domain};

    auto run = [&](int nx) {
        MolConfig cfg;
        cfg.n_x = nx;
        cfg.rtol = 1e-11;
        cfg.atol = 1e-11;
        cfg.output = out;
        return solve_reference(p, cfg);
    };
    GridField fine = run(801);
    const real e_coarse = relative_error(run(51), fine).relative_l2;
    const real e_mid = relative_error(run(101), fine).relative_l2;
    const real ratio = e_coarse / e_mid;
    CHECK(ratio > 3.0);
    CHECK(ratio < 5.0);
}

TEST_CASE("tightening the time tolerance changes little") {
    PdeProblem p = make_preset("kpp-4", 0.1);
    GridSpec out{41, 11, p.domain};
    MolConfig loose;
    loose.output = out;
    loose.rtol = 1e-6;
    loose.atol = 1e-6;
    MolConfig tight = loose;
    tight.rtol = 1e-11;
    tight.atol = 1e-11;
    GridField a = solve_reference(p, loose);
    GridField b = solve_reference(p, tight);
    CHECK(relative_error(a, b).relative_l2 < 1e-5);
}
