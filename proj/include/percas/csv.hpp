#pragma once

#include <fstream>
#include <iomanip>
#include <stdexcept>
#include <string>
#include <vector>

#include "percas/cascade_solver.hpp"
#include "percas/mol.hpp"

namespace percas {

// Columns: x, t, u, then one column per retained order u_j.
inline void write_solution_csv(const std::string& path, const GridField& assembled,
                               const std::vector<GridField>& orders = {}) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << std::setprecision(17);
    out << "x,t,u";
    for (std::size_t j = 0; j < orders.size(); ++j) out << ",u" << j;
    out << "\n";
    const GridSpec& g = assembled.spec;
    for (int it = 0; it < g.n_t; ++it)
        for (int ix = 0; ix < g.n_x; ++ix) {
            out << g.x(ix) << "," << g.t(it) << "," << assembled.values(ix, it);
            for (const auto& o : orders) out << "," << o.values(ix, it);
            out << "\n";
        }
}

struct SweepRecord {
    real variable = 0.0;  // p or epsilon
    real relative_l2 = 0.0;
    real max_abs = 0.0;
    real adapt_seconds = 0.0;
    real reference_seconds = 0.0;
};

inline void write_sweep_csv(const std::string& path, const std::string& variable_name,
                            const std::vector<SweepRecord>& records) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << variable_name << ",relative_l2,max_abs,adapt_seconds,reference_seconds\n";
    out << std::setprecision(17);
    for (const auto& r : records)
        out << r.variable << "," << r.relative_l2 << "," << r.max_abs << "," << r.adapt_seconds
            << "," << r.reference_seconds << "\n";
}

}  // namespace percas
