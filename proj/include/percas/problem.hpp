#pragma once

#include <string>
#include <vector>

#include "percas/domain.hpp"
#include "percas/expression.hpp"
#include "percas/operator.hpp"
#include "percas/polynomial.hpp"

namespace percas {

enum class ConditionKind { initial, boundary_left, boundary_right };

inline std::string to_string(ConditionKind k) {
    switch (k) {
        case ConditionKind::initial: return "initial";
        case ConditionKind::boundary_left: return "boundary_left";
        case ConditionKind::boundary_right: return "boundary_right";
    }
    return "?";
}

// One IC/BC: condition on u (derivative_order 0) or on a derivative of u
// (e.g. order 1 on an initial condition means du/dt at t=0).
struct ConditionSpec {
    ConditionKind kind = ConditionKind::initial;
    int derivative_order = 0;
    Expression target;  // function of x for initial, of t for boundary

    real eval(real coord) const {
        return kind == ConditionKind::initial ? target(coord, 0.0) : target(0.0, coord);
    }
};

// D u + epsilon P(u) = f on a space-time rectangle, with IC/BC data.
struct PdeProblem {
    LinearOperator op;
    Polynomial perturbation;
    real epsilon = 0.0;
    SpaceTimeDomain domain;
    std::vector<ConditionSpec> conditions;
    Expression forcing;

    const ConditionSpec* find(ConditionKind kind, int order) const {
        for (const auto& c : conditions)
            if (c.kind == kind && c.derivative_order == order) return &c;
        return nullptr;
    }
    std::vector<const ConditionSpec*> initial_conditions() const {
        std::vector<const ConditionSpec*> out;
        for (const auto& c : conditions)
            if (c.kind == ConditionKind::initial) out.push_back(&c);
        return out;
    }
};

// Invariant check as a report, not an exception: callers decide severity.
inline std::vector<std::string> validate_problem(const PdeProblem& p) {
    std::vector<std::string> violations;
    if (!p.domain.valid()) violations.push_back("domain bounds invalid (need x_min < x_max, t_max > 0)");
    if (!p.op.valid()) violations.push_back("operator has no usable terms or unsupported derivative orders");
    if (p.epsilon < 0.0 || p.epsilon >= 1.0) violations.push_back("epsilon out of perturbative range [0,1)");
    if (!p.perturbation.coeffs_bounded())
        violations.push_back("polynomial coefficient exceeds magnitude bound 1");

    // One initial spec per required time-derivative order 0..n_t-1.
    const int nt = p.op.max_dt_order();
    for (int order = 0; order < nt; ++order) {
        if (!p.find(ConditionKind::initial, order)) {
            violations.push_back(nt > 1
                ? "incomplete initial data for second-order-in-time operator (missing order " +
                      std::to_string(order) + ")"
                : "missing initial condition");
        }
    }
    for (const auto& c : p.conditions) {
        const int cap = c.kind == ConditionKind::initial ? p.op.max_dt_order() : p.op.max_dx_order();
        if (c.derivative_order >= cap && c.derivative_order != 0)
            violations.push_back("condition derivative order " + std::to_string(c.derivative_order) +
                                 " not below operator order for " + to_string(c.kind));
    }
    if (p.op.max_dx_order() > 0) {
        if (!p.find(ConditionKind::boundary_left, 0) && !p.find(ConditionKind::boundary_left, 1))
            violations.push_back("missing left boundary condition");
        if (!p.find(ConditionKind::boundary_right, 0) && !p.find(ConditionKind::boundary_right, 1))
            violations.push_back("missing right boundary condition");
    }
    return violations;
}

}  // namespace percas
