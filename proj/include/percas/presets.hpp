#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "percas/problem.hpp"

namespace percas {

// Smooth approximation of a step profile: 1 for x < 0.5, 0.7 on (1, 1.5),
// 0 elsewhere. The 0.7 plateau is a sigmoid rising at x=1 minus one rising at
// x=1.5, so the profile returns to 0 and is compatible with a zero right-hand
// boundary value. (A variant with "+" on the third sigmoid saturates at 1.4
// for large x; its degree-11 cascades diverge, so the bump form is used.)
inline real kpp_initial_profile(real x) {
    auto sigma = [](real z) { return 1.0 / (1.0 + std::exp(-z)); };
    return sigma(-20.0 * (x - 0.5)) + 0.7 * (sigma(20.0 * (x - 1.0)) - sigma(20.0 * (x - 1.5)));
}

inline const char* kpp_initial_profile_text() {
    return "sigmoid(-20*(x-0.5)) + 0.7*(sigmoid(20*(x-1)) - sigmoid(20*(x-1.5)))";
}

namespace detail {

inline PdeProblem kpp_base(real diffusion, real epsilon, int n1, int n2, real t_max) {
    PdeProblem p;
    p.op = LinearOperator::heat(diffusion);
    p.perturbation = kpp_polynomial(n1, n2);
    p.epsilon = epsilon;
    p.domain = {0.0, 2.0, t_max};
    p.conditions.push_back({ConditionKind::initial, 0, Expression::parse(kpp_initial_profile_text())});
    p.conditions.push_back({ConditionKind::boundary_left, 0, Expression::parse("1")});
    p.conditions.push_back({ConditionKind::boundary_right, 0, Expression::parse("0")});
    p.forcing = Expression::parse("0");
    return p;
}

}  // namespace detail

// Named benchmark problems. The diffusion coefficient has no canonical value
// and must be supplied by the caller (the acceptance suite uses 0.1).
inline PdeProblem make_preset(const std::string& name, real diffusion, real t_max = 1.0) {
    if (name == "kpp-1") return detail::kpp_base(diffusion, 0.5, 1, 1, t_max);
    if (name == "kpp-2") return detail::kpp_base(diffusion, 0.1, 10, 1, t_max);
    if (name == "kpp-3") return detail::kpp_base(diffusion, 0.1, 1, 10, t_max);
    if (name == "kpp-4") {
        PdeProblem p;
        p.op = LinearOperator::heat(diffusion);
        p.perturbation = kpp_polynomial(2, 1);
        p.epsilon = 0.3;
        p.domain = {0.0, 2.0, t_max};
        p.conditions.push_back(
            {ConditionKind::initial, 0, Expression::parse("1 + 0.5*x*sin(2*pi*x)")});
        p.conditions.push_back({ConditionKind::boundary_left, 0, Expression::parse("exp(-t)")});
        p.conditions.push_back({ConditionKind::boundary_right, 0, Expression::parse("1 + sin(t)")});
        p.forcing = Expression::parse("sin(2*t)*cos(3*x)");
        return p;
    }
    if (name == "wave-1") {
        PdeProblem p;
        p.op = LinearOperator::wave(1.0);
        p.perturbation = Polynomial({0.0, 1.0, 0.0, -1.0 / 6.0});  // u - u^3/6
        p.epsilon = 0.75;
        p.domain = {0.0, 2.0, t_max};
        p.conditions.push_back({ConditionKind::initial, 0, Expression::parse("0")});
        p.conditions.push_back({ConditionKind::initial, 1, Expression::parse("1")});
        p.conditions.push_back({ConditionKind::boundary_left, 0, Expression::parse("0")});
        p.conditions.push_back({ConditionKind::boundary_right, 0, Expression::parse("0")});
        p.forcing = Expression::parse("0");
        return p;
    }
    // Epsilon-sweep presets. eps-f0 doubles the step amplitude so the
    // perturbation series has a visible radius of convergence: the error is
    // flat for small epsilon and increases sharply beyond ~0.4. eps-f1 is the
    // forced variant (f = 1, amplitude-1 conditions).
    if (name == "eps-f0") {
        PdeProblem p = detail::kpp_base(diffusion, 0.3, 1, 2, t_max);
        p.conditions[0].target =
            Expression::parse(std::string("2*(") + kpp_initial_profile_text() + ")");
        p.conditions[1].target = Expression::parse("2");
        return p;
    }
    if (name == "eps-f1") {
        PdeProblem p = detail::kpp_base(diffusion, 0.3, 1, 2, t_max);
        p.forcing = Expression::parse("1");
        return p;
    }
    throw std::invalid_argument("unknown preset '" + name + "'");
}

inline std::vector<std::string> preset_names() {
    return {"kpp-1", "kpp-2", "kpp-3", "kpp-4", "wave-1", "eps-f0", "eps-f1"};
}

}  // namespace percas
