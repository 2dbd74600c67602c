#pragma once

#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "percas/problem.hpp"

namespace percas {

inline nlohmann::json problem_to_json(const PdeProblem& p) {
    nlohmann::json j;
    j["operator"]["terms"] = nlohmann::json::array();
    for (const auto& t : p.op.terms)
        j["operator"]["terms"].push_back({t.dx_order, t.dt_order, t.coefficient});
    j["polynomial"] = p.perturbation.coeffs;
    j["epsilon"] = p.epsilon;
    j["domain"] = {{"x_min", p.domain.x_min}, {"x_max", p.domain.x_max}, {"t_max", p.domain.t_max}};
    j["conditions"] = nlohmann::json::array();
    for (const auto& c : p.conditions)
        j["conditions"].push_back({{"kind", to_string(c.kind)},
                                   {"derivative_order", c.derivative_order},
                                   {"target", c.target.text()}});
    j["forcing"] = p.forcing.text();
    return j;
}

inline ConditionKind condition_kind_from_string(const std::string& s) {
    if (s == "initial") return ConditionKind::initial;
    if (s == "boundary_left") return ConditionKind::boundary_left;
    if (s == "boundary_right") return ConditionKind::boundary_right;
    throw std::invalid_argument("unknown condition kind '" + s + "'");
}

inline PdeProblem problem_from_json(const nlohmann::json& j) {
    PdeProblem p;
    for (const auto& t : j.at("operator").at("terms"))
        p.op.terms.push_back({t.at(0).get<int>(), t.at(1).get<int>(), t.at(2).get<real>()});
    p.perturbation.coeffs = j.at("polynomial").get<std::vector<real>>();
    p.epsilon = j.at("epsilon").get<real>();
    p.domain.x_min = j.at("domain").at("x_min").get<real>();
    p.domain.x_max = j.at("domain").at("x_max").get<real>();
    p.domain.t_max = j.at("domain").at("t_max").get<real>();
    for (const auto& c : j.at("conditions"))
        p.conditions.push_back({condition_kind_from_string(c.at("kind").get<std::string>()),
                                c.at("derivative_order").get<int>(),
                                Expression::parse(c.at("target").get<std::string>())});
    p.forcing = Expression::parse(j.at("forcing").get<std::string>());
    return p;
}

inline PdeProblem load_problem(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open problem file '" + path + "'");
    nlohmann::json j;
    in >> j;
    return problem_from_json(j);
}

inline void save_problem(const PdeProblem& p, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write problem file '" + path + "'");
    out << problem_to_json(p).dump(2) << "\n";
}

}  // namespace percas
