#include <catch_amalgamated.hpp>

#include <map>
#include <random>

#include "percas/composition.hpp"
#include "percas/plan.hpp"

using namespace percas;

namespace {

// Independent oracle: expand (u_0 + ... + u_p)^l term by term, counting each
// exponent vector with multiplicity.
std::map<std::vector<int>, long long> expand_power(int l, int p) {
    std::map<std::vector<int>, long long> terms;
    terms[std::vector<int>(std::size_t(p) + 1, 0)] = 1;
    for (int factor = 0; factor < l; ++factor) {
        std::map<std::vector<int>, long long> next;
        for (const auto& [k, count] : terms) {
            for (int i = 0; i <= p; ++i) {
                std::vector<int> k2 = k;
                k2[std::size_t(i)] += 1;
                next[k2] += count;
            }
        }
        terms = std::move(next);
    }
    return terms;
}

// Independent oracle: coefficients of eps powers in P(sum eps^i u_i) at
// numeric sample values, by dense polynomial arithmetic in eps.
std::vector<real> expand_perturbation(const Polynomial& poly, const std::vector<real>& u) {
    const int p = int(u.size()) - 1;
    std::vector<real> series(u.begin(), u.end());  // S(eps)
    std::vector<real> power{1.0};                  // S^l
    std::vector<real> result(std::size_t(poly.degree() * p) + 1, 0.0);
    for (int l = 0; l <= poly.degree(); ++l) {
        const real pl = poly.coeffs[std::size_t(l)];
        for (std::size_t d = 0; d < power.size(); ++d) result[d] += pl * power[d];
        // power *= series
        std::vector<real> next(power.size() + std::size_t(p), 0.0);
        for (std::size_t a = 0; a < power.size(); ++a)
            for (std::size_t b = 0; b < series.size(); ++b) next[a + b] += power[a] * series[b];
        power = std::move(next);
    }
    return result;  // [eps^d] P(S)
}

}  // namespace

TEST_CASE("composition base cases") {
    auto only = enumerate_compositions(3, 4, 0);
    REQUIRE(only.size() == 1);
    CHECK(only[0].k == std::vector<int>({3, 0, 0, 0, 0}));
    CHECK(only[0].coefficient == 1);

    auto cross = enumerate_compositions(2, 3, 1);
    REQUIRE(cross.size() == 1);
    CHECK(cross[0].k == std::vector<int>({1, 1, 0, 0}));
    CHECK(cross[0].coefficient == 2);  // 2 u_0 u_1

    auto order2 = enumerate_compositions(2, 2, 2);
    REQUIRE(order2.size() == 2);  // u_1^2 and 2 u_0 u_2, lexicographic in k
    CHECK(order2[0].k == std::vector<int>({0, 2, 0}));
    CHECK(order2[0].coefficient == 1);
    CHECK(order2[1].k == std::vector<int>({1, 0, 1}));
    CHECK(order2[1].coefficient == 2);

    CHECK(enumerate_compositions(1, 2, 5).empty());
}

TEST_CASE("compositions match brute-force multinomial expansion") {
    for (int l = 0; l <= 5; ++l) {
        for (int p = 0; p <= 4; ++p) {
            auto oracle = expand_power(l, p);
            for (int order = 0; order <= l * p; ++order) {
                std::map<std::vector<int>, long long> expected;
                for (const auto& [k, count] : oracle) {
                    int ord = 0;
                    for (int i = 0; i <= p; ++i) ord += i * k[std::size_t(i)];
                    if (ord == order) expected[k] = count;
                }
                auto got = enumerate_compositions(l, p, order);
                REQUIRE(got.size() == expected.size());
                for (const auto& comp : got) {
                    auto it = expected.find(comp.k);
                    REQUIRE(it != expected.end());
                    CHECK(comp.coefficient == it->second);
                    CHECK(comp.l == l);
                    CHECK(comp.order == order);
                }
            }
        }
    }
}

TEST_CASE("coefficient mass per power: stars and bars") {
    for (int l = 0; l <= 4; ++l)
        for (int p = 0; p <= 3; ++p) {
            long long total = 0;
            for (int order = 0; order <= l * p; ++order)
                for (const auto& c : enumerate_compositions(l, p, order)) total += c.coefficient;
            long long expected = 1;
            for (int i = 0; i < l; ++i) expected *= (p + 1);
            CHECK(total == expected);
        }
}

TEST_CASE("plan order 1 is -P(u0)") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<real> unit(-1.0, 1.0);
    Polynomial poly({unit(rng), unit(rng), unit(rng), unit(rng)});
    PerturbationPlan plan = build_plan(poly, 3);
    std::vector<Eigen::VectorXd> u0{Eigen::VectorXd::Random(11)};
    Eigen::VectorXd f1 = evaluate_source_flat(plan, 1, u0);
    for (Eigen::Index i = 0; i < f1.size(); ++i)
        CHECK(f1[i] == Catch::Approx(-polynomial_eval(poly, u0[0][i])).margin(1e-12));
}

TEST_CASE("plan order 2 is -P'(u0) u1") {
    Polynomial poly({0.25, -0.75, 0.5, 0.125, -0.3});
    Polynomial dpoly = polynomial_derivative(poly);
    PerturbationPlan plan = build_plan(poly, 4);
    std::vector<Eigen::VectorXd> prior{Eigen::VectorXd::Random(17), Eigen::VectorXd::Random(17)};
    Eigen::VectorXd f2 = evaluate_source_flat(plan, 2, prior);
    for (Eigen::Index i = 0; i < f2.size(); ++i)
        CHECK(f2[i] ==
              Catch::Approx(-polynomial_eval(dpoly, prior[0][i]) * prior[1][i]).margin(1e-12));
}

TEST_CASE("plan order 3 for P=u^2 is -(u1^2 + 2 u0 u2)") {
    Polynomial poly({0.0, 0.0, 1.0});
    PerturbationPlan plan = build_plan(poly, 3);
    std::vector<Eigen::VectorXd> prior{Eigen::VectorXd::Random(9), Eigen::VectorXd::Random(9),
                                       Eigen::VectorXd::Random(9)};
    Eigen::VectorXd f3 = evaluate_source_flat(plan, 3, prior);
    for (Eigen::Index i = 0; i < f3.size(); ++i) {
        const real expected = -(prior[1][i] * prior[1][i] + 2.0 * prior[0][i] * prior[2][i]);
        CHECK(f3[i] == Catch::Approx(expected).margin(1e-12));
    }
}

TEST_CASE("sources reproduce the brute-force epsilon expansion") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<real> unit(-1.0, 1.0);
    for (int trial = 0; trial < 25; ++trial) {
        const int degree = 1 + int(rng() % 5);
        const int p = 1 + int(rng() % 4);
        Polynomial poly;
        for (int l = 0; l <= degree; ++l) poly.coeffs.push_back(unit(rng));
        PerturbationPlan plan = build_plan(poly, p);

        std::vector<real> u(std::size_t(p) + 1);
        for (auto& v : u) v = unit(rng);
        std::vector<real> expansion = expand_perturbation(poly, u);

        std::vector<Eigen::VectorXd> prior;
        for (real v : u) prior.push_back(Eigen::VectorXd::Constant(1, v));
        for (int j = 1; j <= p; ++j) {
            const real fj = evaluate_source_flat(plan, j, prior)[0];
            const real oracle = -expansion[std::size_t(j) - 1];  // [eps^{j-1}] P(S)
            CHECK(fj == Catch::Approx(oracle).margin(1e-10 * std::max(1.0, std::abs(oracle))));
        }
    }
}

TEST_CASE("recipes only reference lower orders") {
    Polynomial poly({0.1, -0.2, 0.3, 0.4, -0.5, 0.6});
    PerturbationPlan plan = build_plan(poly, 6);
    for (int j = 1; j <= plan.p; ++j)
        for (const auto& term : plan.recipe(j))
            for (std::size_t i = 0; i < term.comp.k.size(); ++i)
                if (term.comp.k[i] > 0) CHECK(int(i) <= j - 1);
}

TEST_CASE("evaluate_source edge cases") {
    PerturbationPlan plan = build_plan(Polynomial({0.0}), 3);
    std::vector<Eigen::VectorXd> prior{Eigen::VectorXd::Random(5)};
    CHECK(evaluate_source_flat(plan, 1, prior).isZero());

    PerturbationPlan logistic = build_plan(kpp_polynomial(1, 1), 2);
    std::vector<Eigen::VectorXd> ones{Eigen::VectorXd::Ones(8)};
    CHECK(evaluate_source_flat(logistic, 1, ones).isZero(1e-14));

    CHECK_THROWS(evaluate_source_flat(plan, 0, prior));
    CHECK_THROWS(evaluate_source_flat(plan, 4, prior));
    GridSpec a{4, 4, {}};
    GridSpec b{5, 4, {}};
    std::vector<GridField> mismatched{GridField(a), GridField(b)};
    CHECK_THROWS(evaluate_source(build_plan(Polynomial({0.0, 1.0}), 2), 2, mismatched));
}

TEST_CASE("assemble_solution") {
    GridSpec g{3, 3, {}};
    GridField u0(g), u1(g), u2(g);
    u0.values.setConstant(1.0);
    u1.values.setConstant(2.0);
    u2.values.setConstant(4.0);

    GridField s = assemble_solution(0.5, {u0, u1, u2});
    CHECK(s.values.isApproxToConstant(3.0, 1e-14));

    GridField only = assemble_solution(0.9, {u0});
    CHECK((only.values.array() == u0.values.array()).all());

    // eps = 0 returns order zero bitwise
    GridField zero_eps = assemble_solution(0.0, {u0, u1, u2});
    CHECK((zero_eps.values.array() == u0.values.array()).all());
}

TEST_CASE("plan text dump is stable") {
    PerturbationPlan plan = build_plan(kpp_polynomial(1, 1), 2);
    const std::string text = plan_to_text(plan);
    CHECK(text.find("j=1") != std::string::npos);
    CHECK(text.find("coeff=") != std::string::npos);
}
