#pragma once

#include <cmath>

#include "percas/domain.hpp"

namespace percas {

// Value plus input derivatives carried through the network forward pass.
// Mixed u_xt is not carried; no supported operator uses it.
struct Jet {
    real v = 0.0;
    real dx = 0.0;
    real dt = 0.0;
    real dxx = 0.0;
    real dtt = 0.0;

    bool finite() const {
        return std::isfinite(v) && std::isfinite(dx) && std::isfinite(dt) &&
               std::isfinite(dxx) && std::isfinite(dtt);
    }
};

enum class JetComponent { value, dx, dt, dxx, dtt };
inline constexpr int kJetComponents = 5;

inline real jet_get(const Jet& j, JetComponent c) {
    switch (c) {
        case JetComponent::value: return j.v;
        case JetComponent::dx: return j.dx;
        case JetComponent::dt: return j.dt;
        case JetComponent::dxx: return j.dxx;
        case JetComponent::dtt: return j.dtt;
    }
    return 0.0;
}

}  // namespace percas
