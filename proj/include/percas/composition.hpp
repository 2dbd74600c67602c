#pragma once

#include <cstdint>
#include <vector>

#include "percas/domain.hpp"

namespace percas {

// One way of drawing l factors from (u_0, ..., u_p) with epsilon-order
// sum(i * k_i): the term coeff * prod u_i^{k_i} in the expansion of P(sum eps^i u_i).
struct Composition {
    std::vector<int> k;      // k[i] = exponent of u_i, length p+1
    int l = 0;               // sum k_i
    int order = 0;           // sum i * k_i
    std::int64_t coefficient = 1;  // multinomial l! / prod k_i!
};

namespace detail {

inline std::int64_t multinomial(int l, const std::vector<int>& k) {
    // l! / prod k_i!, accumulated as binomials to stay in integer range
    std::int64_t result = 1;
    int remaining = l;
    for (int ki : k) {
        // multiply by C(remaining, ki)
        std::int64_t c = 1;
        for (int j = 1; j <= ki; ++j) c = c * (remaining - ki + j) / j;
        result *= c;
        remaining -= ki;
    }
    return result;
}

inline void enumerate_rec(int idx, int p, int l_rem, int order_rem, std::vector<int>& k,
                          std::vector<Composition>& out) {
    if (idx == p) {
        // last slot: need p * k_p == order_rem with k_p = l_rem
        if (std::int64_t(p) * l_rem == order_rem || (l_rem == 0 && order_rem == 0)) {
            k[std::size_t(idx)] = l_rem;
            Composition c;
            c.k = k;
            c.l = 0;
            for (int ki : k) c.l += ki;
            c.order = 0;
            for (int i = 0; i <= p; ++i) c.order += i * k[std::size_t(i)];
            c.coefficient = multinomial(c.l, c.k);
            out.push_back(std::move(c));
        }
        return;
    }
    for (int ki = 0; ki <= l_rem; ++ki) {
        const int used = idx * ki;
        if (used > order_rem) break;
        // remaining slots idx+1..p can contribute at most p * (l_rem - ki)
        if (std::int64_t(p) * (l_rem - ki) < order_rem - used) continue;
        k[std::size_t(idx)] = ki;
        enumerate_rec(idx + 1, p, l_rem - ki, order_rem - used, k, out);
    }
    k[std::size_t(idx)] = 0;
}

}  // namespace detail

// All length-(p+1) exponent vectors with sum k_i = l and sum i*k_i = order,
// in lexicographic order of k. Empty when no composition exists.
inline std::vector<Composition> enumerate_compositions(int l, int p, int order) {
    std::vector<Composition> out;
    if (l < 0 || p < 0 || order < 0) return out;
    std::vector<int> k(std::size_t(p) + 1, 0);
    detail::enumerate_rec(0, p, l, order, k, out);
    return out;
}

}  // namespace percas
