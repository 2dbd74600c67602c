#pragma once

#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "percas/composition.hpp"
#include "percas/domain.hpp"
#include "percas/polynomial.hpp"

namespace percas {

// Recipe for the order-j source f_j: sum over polynomial coefficients and
// compositions with epsilon-order j-1, negated.
struct SourceTerm {
    real poly_coeff = 0.0;  // P_l
    Composition comp;
};

struct PerturbationPlan {
    int p = 0;  // truncation order
    std::vector<std::vector<SourceTerm>> recipes;  // recipes[j-1] holds order j, j in 1..p

    const std::vector<SourceTerm>& recipe(int j) const {
        if (j < 1 || j > p) throw std::out_of_range("source order outside 1..p");
        return recipes[std::size_t(j) - 1];
    }
};

// f_j = - sum_l P_l sum_{comps: sum k = l, sum i k_i = j-1} coeff * prod u_i^{k_i}.
// Each recipe references only u_i with i <= j-1 (i*k_i <= j-1 forces it).
inline PerturbationPlan build_plan(const Polynomial& poly, int p) {
    if (p < 0) throw std::invalid_argument("truncation order must be >= 0");
    PerturbationPlan plan;
    plan.p = p;
    plan.recipes.resize(std::size_t(p));
    for (int j = 1; j <= p; ++j) {
        auto& recipe = plan.recipes[std::size_t(j) - 1];
        for (int l = 0; l <= poly.degree(); ++l) {
            const real pl = l < int(poly.coeffs.size()) ? poly.coeffs[std::size_t(l)] : 0.0;
            if (pl == 0.0) continue;
            for (auto& comp : enumerate_compositions(l, p, j - 1))
                recipe.push_back({pl, std::move(comp)});
        }
    }
    return plan;
}

// Pointwise source evaluation on flat sample vectors (one entry per point).
inline Eigen::VectorXd evaluate_source_flat(const PerturbationPlan& plan, int j,
                                            const std::vector<Eigen::VectorXd>& prior) {
    if (j < 1 || j > plan.p) throw std::out_of_range("source order outside 1..p");
    if (int(prior.size()) < j) throw std::invalid_argument("need u_0..u_{j-1} to evaluate f_j");
    const Eigen::Index n = prior[0].size();
    for (const auto& u : prior)
        if (u.size() != n) throw std::invalid_argument("sample vector length mismatch");

    Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
    for (const auto& term : plan.recipe(j)) {
        Eigen::VectorXd prod = Eigen::VectorXd::Constant(n, real(term.comp.coefficient));
        for (std::size_t i = 0; i < term.comp.k.size(); ++i) {
            for (int rep = 0; rep < term.comp.k[i]; ++rep)
                prod = prod.cwiseProduct(prior[i]);
        }
        out -= term.poly_coeff * prod;
    }
    return out;
}

inline GridField evaluate_source(const PerturbationPlan& plan, int j,
                                 const std::vector<GridField>& prior) {
    if (prior.empty()) throw std::invalid_argument("need u_0..u_{j-1} to evaluate f_j");
    std::vector<Eigen::VectorXd> flat;
    flat.reserve(prior.size());
    for (const auto& f : prior) {
        require_same_grid(prior[0], f);
        flat.emplace_back(Eigen::Map<const Eigen::VectorXd>(f.values.data(), f.values.size()));
    }
    Eigen::VectorXd v = evaluate_source_flat(plan, j, flat);
    GridField out(prior[0].spec);
    out.values = Eigen::Map<const Eigen::MatrixXd>(v.data(), out.values.rows(), out.values.cols());
    return out;
}

// u ~ sum_i eps^i u_i. At eps = 0 this returns orders[0] unchanged.
inline GridField assemble_solution(real epsilon, const std::vector<GridField>& orders) {
    if (orders.empty()) throw std::invalid_argument("no orders to assemble");
    if (epsilon == 0.0) return orders[0];
    GridField out = orders[0];
    real w = 1.0;
    for (std::size_t i = 1; i < orders.size(); ++i) {
        require_same_grid(out, orders[i]);
        w *= epsilon;
        out.values += w * orders[i].values;
    }
    return out;
}

inline Eigen::VectorXd assemble_solution_flat(real epsilon,
                                              const std::vector<Eigen::VectorXd>& orders) {
    if (orders.empty()) throw std::invalid_argument("no orders to assemble");
    if (epsilon == 0.0) return orders[0];
    Eigen::VectorXd out = orders[0];
    real w = 1.0;
    for (std::size_t i = 1; i < orders.size(); ++i) {
        w *= epsilon;
        out += w * orders[i];
    }
    return out;
}

// One line per composition: order, P_l, k-vector, multinomial coefficient.
inline std::string plan_to_text(const PerturbationPlan& plan) {
    std::ostringstream os;
    os << "p=" << plan.p << "\n";
    for (int j = 1; j <= plan.p; ++j) {
        for (const auto& term : plan.recipe(j)) {
            os << "j=" << j << " l=" << term.comp.l << " P_l=" << term.poly_coeff << " k=[";
            for (std::size_t i = 0; i < term.comp.k.size(); ++i)
                os << (i ? "," : "") << term.comp.k[i];
            os << "] coeff=" << term.comp.coefficient << "\n";
        }
    }
    return os.str();
}

}  // namespace percas
