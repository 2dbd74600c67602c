#pragma once

#include <stdexcept>
#include <vector>

#include "percas/domain.hpp"
#include "percas/jet.hpp"

namespace percas {

// Constant-coefficient linear differential operator
//   D u = sum_k coeff_k * d^{dx_order_k}/dx d^{dt_order_k}/dt u
// with derivative orders in {0,1,2} and no mixed terms.
struct OperatorTerm {
    int dx_order = 0;
    int dt_order = 0;
    real coefficient = 0.0;
};

struct LinearOperator {
    std::vector<OperatorTerm> terms;

    static LinearOperator heat(real diffusion) {
        return LinearOperator{{{0, 1, 1.0}, {2, 0, -diffusion}}};
    }
    static LinearOperator wave(real speed) {
        return LinearOperator{{{0, 2, 1.0}, {2, 0, -speed * speed}}};
    }

    int max_dt_order() const {
        int m = 0;
        for (const auto& t : terms)
            if (t.coefficient != 0.0 && t.dt_order > m) m = t.dt_order;
        return m;
    }
    int max_dx_order() const {
        int m = 0;
        for (const auto& t : terms)
            if (t.coefficient != 0.0 && t.dx_order > m) m = t.dx_order;
        return m;
    }
    bool valid() const {
        bool any = false;
        for (const auto& t : terms) {
            if (t.dx_order < 0 || t.dx_order > 2 || t.dt_order < 0 || t.dt_order > 2) return false;
            if (t.dx_order > 0 && t.dt_order > 0) return false;  // mixed terms unsupported
            if (t.coefficient != 0.0) any = true;
        }
        return any;
    }
    // Coefficient of the pure time/space derivative of the given order (0 if absent).
    real coeff(int dx_order, int dt_order) const {
        real c = 0.0;
        for (const auto& t : terms)
            if (t.dx_order == dx_order && t.dt_order == dt_order) c += t.coefficient;
        return c;
    }
};

inline JetComponent operator_term_component(const OperatorTerm& t) {
    if (t.dx_order == 0 && t.dt_order == 0) return JetComponent::value;
    if (t.dx_order == 1 && t.dt_order == 0) return JetComponent::dx;
    if (t.dx_order == 0 && t.dt_order == 1) return JetComponent::dt;
    if (t.dx_order == 2 && t.dt_order == 0) return JetComponent::dxx;
    if (t.dx_order == 0 && t.dt_order == 2) return JetComponent::dtt;
    throw std::invalid_argument("unsupported derivative order in operator term");
}

// D applied to one jet: selects and combines derivative components.
inline real apply_operator(const LinearOperator& op, const Jet& jet) {
    real acc = 0.0;
    for (const auto& t : op.terms) acc += t.coefficient * jet_get(jet, operator_term_component(t));
    return acc;
}

inline std::vector<real> apply_operator(const LinearOperator& op, const std::vector<Jet>& jets) {
    std::vector<real> out(jets.size());
    for (std::size_t n = 0; n < jets.size(); ++n) out[n] = apply_operator(op, jets[n]);
    return out;
}

}  // namespace percas
