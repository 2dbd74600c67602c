#include <catch_amalgamated.hpp>

#include <random>

#include "percas/expression.hpp"
#include "percas/polynomial.hpp"
#include "percas/presets.hpp"
#include "percas/problem.hpp"
#include "percas/problem_json.hpp"

using namespace percas;

TEST_CASE("polynomial evaluation") {
    Polynomial logistic = kpp_polynomial(1, 1);  // -u + u^2
    CHECK(polynomial_eval(logistic, 1.0) == Catch::Approx(0.0).margin(1e-15));
    CHECK(polynomial_eval(logistic, 0.0) == Catch::Approx(0.0).margin(1e-15));

    Polynomial p({0.3, -0.5, 0.25});
    CHECK(polynomial_eval(p, 0.0) == Catch::Approx(0.3));

    Polynomial wave({0.0, 1.0, 0.0, -1.0 / 6.0});  // u - u^3/6
    CHECK(polynomial_eval(wave, 0.5) == Catch::Approx(0.5 - 0.125 / 6.0).epsilon(1e-12));
}

TEST_CASE("horner matches naive power sum on random input") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<real> coeff(-1.0, 1.0);
    std::uniform_real_distribution<real> arg(-2.0, 2.0);
    for (int trial = 0; trial < 200; ++trial) {
        Polynomial p;
        const int deg = int(rng() % 6);
        for (int l = 0; l <= deg; ++l) p.coeffs.push_back(coeff(rng));
        const real u = arg(rng);
        real naive = 0.0;
        for (int l = 0; l <= deg; ++l) naive += p.coeffs[std::size_t(l)] * std::pow(u, l);
        const real h = polynomial_eval(p, u);
        CHECK(std::abs(h - naive) <= 1e-14 * std::max(1.0, std::abs(naive)));
    }
}

TEST_CASE("polynomial derivative") {
    Polynomial logistic = kpp_polynomial(1, 1);
    Polynomial d = polynomial_derivative(logistic);
    REQUIRE(d.coeffs == std::vector<real>({-1.0, 2.0}));

    CHECK(polynomial_derivative(Polynomial({3.0})).coeffs.empty());

    Polynomial wave({0.0, 1.0, 0.0, -1.0 / 6.0});
    Polynomial dw = polynomial_derivative(wave);
    REQUIRE(dw.coeffs.size() == 3);
    CHECK(dw.coeffs[0] == Catch::Approx(1.0));
    CHECK(dw.coeffs[1] == Catch::Approx(0.0));
    CHECK(dw.coeffs[2] == Catch::Approx(-0.5));
}

TEST_CASE("kpp initial profile") {
    CHECK(kpp_initial_profile(-10.0) == Catch::Approx(1.0).margin(1e-8));
    CHECK(kpp_initial_profile(1.25) == Catch::Approx(0.7).margin(1e-2));
    CHECK(kpp_initial_profile(2.0) == Catch::Approx(0.0).margin(1e-4));

    auto sigma = [](real z) { return 1.0 / (1.0 + std::exp(-z)); };
    CHECK(kpp_initial_profile(0.5) ==
          Catch::Approx(0.5 + 0.7 * (sigma(-10.0) - sigma(-20.0))).epsilon(1e-12));

    // monotone decreasing on [0, 0.75], bounded on [0, 2]
    real prev = kpp_initial_profile(0.0);
    for (int i = 1; i <= 75; ++i) {
        const real v = kpp_initial_profile(0.01 * i);
        CHECK(v <= prev + 1e-12);
        prev = v;
    }
    for (int i = 0; i <= 200; ++i) {
        const real v = kpp_initial_profile(0.01 * i);
        CHECK(v >= 0.0);
        CHECK(v <= 1.001);
    }
}

TEST_CASE("expression parser") {
    Expression e = Expression::parse("sin(2*t)*cos(3*x)");
    CHECK(e(0.5, 0.25) == Catch::Approx(std::sin(0.5) * std::cos(1.5)).epsilon(1e-14));
    CHECK(Expression::parse("1 + 0.5*x*sin(2*pi*x)")(0.25, 0.0) ==
          Catch::Approx(1.0 + 0.125 * std::sin(M_PI / 2)).epsilon(1e-14));
    CHECK(Expression::parse("sigmoid(0)")(0, 0) == Catch::Approx(0.5));
    CHECK(Expression::parse("2^3^2")(0, 0) == Catch::Approx(512.0));  // right assoc
    CHECK(Expression::parse("exp(-t)")(0.0, 2.0) == Catch::Approx(std::exp(-2.0)));
    CHECK_THROWS(Expression::parse("sin(x"));
    CHECK_THROWS(Expression::parse("foo(x)"));
}

TEST_CASE("validate accepts the benchmark presets") {
    for (const auto& name : {"kpp-1", "kpp-2", "kpp-3", "kpp-4", "wave-1"}) {
        PdeProblem p = make_preset(name, 0.1);
        CAPTURE(name);
        CHECK(validate_problem(p).empty());
    }
}

TEST_CASE("validate flags bad problems") {
    PdeProblem p = make_preset("kpp-1", 0.1);
    p.epsilon = 1.5;
    auto report = validate_problem(p);
    REQUIRE(report.size() == 1);
    CHECK(report[0].find("epsilon") != std::string::npos);

    PdeProblem w = make_preset("wave-1", 0.0);
    w.conditions.erase(w.conditions.begin() + 1);  // drop du/dt initial data
    report = validate_problem(w);
    REQUIRE_FALSE(report.empty());
    CHECK(report[0].find("initial") != std::string::npos);
}

TEST_CASE("problem json round trip") {
    PdeProblem p = make_preset("kpp-4", 0.1);
    nlohmann::json j = problem_to_json(p);
    PdeProblem q = problem_from_json(j);
    CHECK(validate_problem(q).empty());
    CHECK(q.epsilon == p.epsilon);
    CHECK(q.op.coeff(2, 0) == Catch::Approx(-0.1));
    CHECK(q.forcing(0.3, 0.7) == Catch::Approx(p.forcing(0.3, 0.7)));
    CHECK(q.find(ConditionKind::initial, 0)->eval(0.33) ==
          Catch::Approx(p.find(ConditionKind::initial, 0)->eval(0.33)));
}
