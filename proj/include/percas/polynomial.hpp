#pragma once

#include <vector>
#include <cmath>
#include <cstddef>

#include "percas/domain.hpp"

namespace percas {

// Polynomial in u with coefficients indexed by power, P(u) = sum_l c[l] u^l.
struct Polynomial {
    std::vector<real> coeffs;  // coeffs[l] multiplies u^l

    Polynomial() = default;
    explicit Polynomial(std::vector<real> c) : coeffs(std::move(c)) {}

    int degree() const { return coeffs.empty() ? 0 : int(coeffs.size()) - 1; }
    bool is_zero() const {
        for (real c : coeffs)
            if (c != 0.0) return false;
        return true;
    }
    // |P_l| <= 1 keeps each nonlinear contribution dominated by the linear part.
    bool coeffs_bounded() const {
        for (real c : coeffs)
            if (std::abs(c) > 1.0) return false;
        return true;
    }
};

// Horner evaluation.
inline real polynomial_eval(const Polynomial& p, real u) {
    real acc = 0.0;
    for (std::size_t i = p.coeffs.size(); i-- > 0;) acc = acc * u + p.coeffs[i];
    return acc;
}

inline Polynomial polynomial_derivative(const Polynomial& p) {
    Polynomial d;
    if (p.coeffs.size() <= 1) return d;
    d.coeffs.resize(p.coeffs.size() - 1);
    for (std::size_t l = 1; l < p.coeffs.size(); ++l) d.coeffs[l - 1] = real(l) * p.coeffs[l];
    return d;
}

// KPP reaction term -u^{n1} + u^{n1+n2}, written so that u_t - D u_xx = eps u^{n1}(1-u^{n2}).
inline Polynomial kpp_polynomial(int n1, int n2) {
    Polynomial p;
    p.coeffs.assign(std::size_t(n1 + n2) + 1, 0.0);
    p.coeffs[std::size_t(n1)] = -1.0;
    p.coeffs[std::size_t(n1 + n2)] = 1.0;
    return p;
}

}  // namespace percas
