#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "percas/body.hpp"

namespace percas {

inline constexpr int kCheckpointVersion = 1;

// Frozen shared body plus per-head weight vectors and training metadata.
struct MultiHeadCheckpoint {
    BodyParams body;
    Eigen::MatrixXd heads;  // latent_dim x K
    LinearOperator op;      // operator the latent basis was trained for
    std::uint64_t seed = 0;
    long training_steps = 0;
    real final_loss = 0.0;
};

namespace detail {

inline nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
    std::vector<real> flat(std::size_t(m.size()));
    Eigen::Map<Eigen::MatrixXd>(flat.data(), m.rows(), m.cols()) = m;
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", flat}};
}

inline Eigen::MatrixXd matrix_from_json(const nlohmann::json& j) {
    const auto rows = j.at("rows").get<Eigen::Index>();
    const auto cols = j.at("cols").get<Eigen::Index>();
    const auto flat = j.at("data").get<std::vector<real>>();
    if (Eigen::Index(flat.size()) != rows * cols)
        throw std::runtime_error("checkpoint matrix size mismatch");
    return Eigen::Map<const Eigen::MatrixXd>(flat.data(), rows, cols);
}

}  // namespace detail

inline nlohmann::json checkpoint_to_json(const MultiHeadCheckpoint& c) {
    nlohmann::json j;
    j["version"] = kCheckpointVersion;
    j["activation"] = to_string(c.body.activation);
    j["seed"] = c.seed;
    j["training_steps"] = c.training_steps;
    j["final_loss"] = c.final_loss;
    j["operator"] = nlohmann::json::array();
    for (const auto& t : c.op.terms) j["operator"].push_back({t.dx_order, t.dt_order, t.coefficient});
    j["weights"] = nlohmann::json::array();
    j["biases"] = nlohmann::json::array();
    for (const auto& w : c.body.weights) j["weights"].push_back(detail::matrix_to_json(w));
    for (const auto& b : c.body.biases) j["biases"].push_back(detail::matrix_to_json(b));
    j["heads"] = detail::matrix_to_json(c.heads);
    return j;
}

inline MultiHeadCheckpoint checkpoint_from_json(const nlohmann::json& j) {
    if (j.at("version").get<int>() != kCheckpointVersion)
        throw std::runtime_error("unsupported checkpoint version");
    MultiHeadCheckpoint c;
    c.body.activation = activation_from_string(j.at("activation").get<std::string>());
    c.seed = j.at("seed").get<std::uint64_t>();
    c.training_steps = j.at("training_steps").get<long>();
    c.final_loss = j.at("final_loss").get<real>();
    for (const auto& t : j.at("operator"))
        c.op.terms.push_back({t.at(0).get<int>(), t.at(1).get<int>(), t.at(2).get<real>()});
    for (const auto& w : j.at("weights")) c.body.weights.push_back(detail::matrix_from_json(w));
    for (const auto& b : j.at("biases")) c.body.biases.push_back(detail::matrix_from_json(b));
    c.heads = detail::matrix_from_json(j.at("heads"));
    return c;
}

inline void save_checkpoint(const MultiHeadCheckpoint& c, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write checkpoint '" + path + "'");
    out << checkpoint_to_json(c).dump() << "\n";
}

inline MultiHeadCheckpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open checkpoint '" + path + "'");
    nlohmann::json j;
    in >> j;
    return checkpoint_from_json(j);
}

// FNV-1a over the serialized checkpoint; used as a cache key component.
inline std::uint64_t checkpoint_hash(const MultiHeadCheckpoint& c) {
    const std::string s = checkpoint_to_json(c).dump();
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace percas
