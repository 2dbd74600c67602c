#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace percas {

using real = double;

// Rectangular 1+1d domain: x in [x_min, x_max], t in [0, t_max].
struct SpaceTimeDomain {
    real x_min = 0.0;
    real x_max = 1.0;
    real t_max = 1.0;

    bool valid() const { return x_min < x_max && t_max > 0.0; }
    real width() const { return x_max - x_min; }
};

struct GridSpec {
    int n_x = 101;
    int n_t = 101;
    SpaceTimeDomain domain;

    real x(int i) const { return domain.x_min + domain.width() * real(i) / real(n_x - 1); }
    real t(int j) const { return domain.t_max * real(j) / real(n_t - 1); }
    bool operator==(const GridSpec& o) const {
        return n_x == o.n_x && n_t == o.n_t &&
               domain.x_min == o.domain.x_min && domain.x_max == o.domain.x_max &&
               domain.t_max == o.domain.t_max;
    }
};

// Dense field sampled on a uniform tensor grid, values(ix, it).
struct GridField {
    GridSpec spec;
    Eigen::MatrixXd values;  // n_x rows, n_t cols

    GridField() = default;
    explicit GridField(const GridSpec& s) : spec(s), values(Eigen::MatrixXd::Zero(s.n_x, s.n_t)) {}

    bool same_grid(const GridField& o) const { return spec == o.spec; }
    bool all_finite() const { return values.allFinite(); }
};

inline void require_same_grid(const GridField& a, const GridField& b) {
    if (!a.same_grid(b)) throw std::invalid_argument("grid spec mismatch");
}

}  // namespace percas
