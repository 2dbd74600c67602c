#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include "percas/latent_system.hpp"

namespace percas {

namespace detail {

inline void hash_mix(std::uint64_t& h, const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
}

inline void hash_mix(std::uint64_t& h, real v) { hash_mix(h, &v, sizeof(v)); }
inline void hash_mix(std::uint64_t& h, const Eigen::VectorXd& v) {
    hash_mix(h, v.data(), std::size_t(v.size()) * sizeof(real));
}

inline void write_matrix(std::ofstream& out, const Eigen::MatrixXd& m) {
    const std::int64_t rows = m.rows(), cols = m.cols();
    out.write(reinterpret_cast<const char*>(&rows), sizeof(rows));
    out.write(reinterpret_cast<const char*>(&cols), sizeof(cols));
    out.write(reinterpret_cast<const char*>(m.data()), std::streamsize(sizeof(real)) * rows * cols);
}

inline Eigen::MatrixXd read_matrix(std::ifstream& in) {
    std::int64_t rows = 0, cols = 0;
    in.read(reinterpret_cast<char*>(&rows), sizeof(rows));
    in.read(reinterpret_cast<char*>(&cols), sizeof(cols));
    Eigen::MatrixXd m(rows, cols);
    in.read(reinterpret_cast<char*>(m.data()), std::streamsize(sizeof(real)) * rows * cols);
    return m;
}

}  // namespace detail

// Key over everything the latent matrices depend on.
inline std::uint64_t latent_cache_key(const MultiHeadCheckpoint& checkpoint,
                                      const LinearOperator& op, const TransferPoints& points,
                                      const LossWeights& weights, real ridge) {
    std::uint64_t h = checkpoint_hash(checkpoint);
    for (const auto& t : op.terms) {
        detail::hash_mix(h, &t.dx_order, sizeof(t.dx_order));
        detail::hash_mix(h, &t.dt_order, sizeof(t.dt_order));
        detail::hash_mix(h, t.coefficient);
    }
    detail::hash_mix(h, points.x_interior);
    detail::hash_mix(h, points.t_interior);
    detail::hash_mix(h, points.x_initial);
    detail::hash_mix(h, points.t_left);
    detail::hash_mix(h, points.t_right);
    detail::hash_mix(h, weights.pde);
    detail::hash_mix(h, weights.ic);
    detail::hash_mix(h, weights.bc);
    detail::hash_mix(h, ridge);
    return h;
}

inline std::string latent_cache_path(const std::string& dir, std::uint64_t key) {
    std::ostringstream os;
    os << dir << "/latent_" << std::hex << key << ".bin";
    return os.str();
}

inline constexpr std::uint32_t kLatentCacheMagic = 0x70634c53u;  // "pcLS"

inline void save_latent_cache(const LatentSystem& sys, const std::string& path) {
    std::filesystem::create_directories(std::filesystem::path(path).parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write cache file '" + path + "'");
    out.write(reinterpret_cast<const char*>(&kLatentCacheMagic), sizeof(kLatentCacheMagic));
    out.write(reinterpret_cast<const char*>(&sys.ridge), sizeof(sys.ridge));
    const std::int64_t blocks = std::int64_t(sys.h_initial.size());
    out.write(reinterpret_cast<const char*>(&blocks), sizeof(blocks));
    for (int order : sys.initial_orders) {
        const std::int64_t o = order;
        out.write(reinterpret_cast<const char*>(&o), sizeof(o));
    }
    detail::write_matrix(out, sys.d_h);
    detail::write_matrix(out, sys.h_interior);
    for (const auto& h0 : sys.h_initial) detail::write_matrix(out, h0);
    detail::write_matrix(out, sys.h_left);
    detail::write_matrix(out, sys.h_right);
    detail::write_matrix(out, sys.normal_matrix);
    detail::write_matrix(out, sys.chol_lower);
}

// Cache hit skips jet evaluation and factorization entirely.
inline std::optional<LatentSystem> load_latent_cache(const MultiHeadCheckpoint& checkpoint,
                                                     const LinearOperator& op,
                                                     const TransferPoints& points,
                                                     const LossWeights& weights,
                                                     const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::uint32_t magic = 0;
    in.read(reinterpret_cast<char*>(&magic), sizeof(magic));
    if (magic != kLatentCacheMagic) return std::nullopt;

    LatentSystem sys;
    sys.body = checkpoint.body;
    sys.op = op;
    sys.points = points;
    sys.weights = weights;
    in.read(reinterpret_cast<char*>(&sys.ridge), sizeof(sys.ridge));
    std::int64_t blocks = 0;
    in.read(reinterpret_cast<char*>(&blocks), sizeof(blocks));
    for (std::int64_t i = 0; i < blocks; ++i) {
        std::int64_t o = 0;
        in.read(reinterpret_cast<char*>(&o), sizeof(o));
        sys.initial_orders.push_back(int(o));
    }
    sys.d_h = detail::read_matrix(in);
    sys.h_interior = detail::read_matrix(in);
    for (std::int64_t i = 0; i < blocks; ++i) sys.h_initial.push_back(detail::read_matrix(in));
    sys.h_left = detail::read_matrix(in);
    sys.h_right = detail::read_matrix(in);
    sys.normal_matrix = detail::read_matrix(in);
    sys.chol_lower = detail::read_matrix(in);
    if (!in) return std::nullopt;
    return sys;
}

// Assemble through the cache: load on hit, build and store on miss.
inline LatentSystem assemble_or_load(const MultiHeadCheckpoint& checkpoint,
                                     const LinearOperator& op, const TransferPoints& points,
                                     const LossWeights& weights, real ridge,
                                     const std::string& cache_dir, bool* was_hit = nullptr) {
    const std::string path =
        latent_cache_path(cache_dir, latent_cache_key(checkpoint, op, points, weights, ridge));
    if (auto sys = load_latent_cache(checkpoint, op, points, weights, path)) {
        if (was_hit) *was_hit = true;
        return std::move(*sys);
    }
    LatentSystem sys = assemble_latent_system(checkpoint, op, points, weights, ridge);
    save_latent_cache(sys, path);
    if (was_hit) *was_hit = false;
    return sys;
}

}  // namespace percas
