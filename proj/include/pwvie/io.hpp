#pragma once

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pwvie/asymptotics.hpp"
#include "pwvie/characteristic.hpp"
#include "pwvie/error.hpp"
#include "pwvie/model.hpp"
#include "pwvie/refinement.hpp"
#include "pwvie/verifier.hpp"

namespace pwvie {

using Json = nlohmann::ordered_json;

inline std::string format17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Parse, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline ProblemSpec load_problem(const std::string& path) { return parse_problem(read_file(path)); }

inline Json to_json(const ValidationReport& r) {
    Json checks = Json::array();
    for (const auto& c : r.checks) {
        Json j{{"name", c.name}, {"passed", c.passed}};
        j["witness"] = c.witness ? Json(*c.witness) : Json(nullptr);
        if (!c.detail.empty()) j["detail"] = c.detail;
        checks.push_back(std::move(j));
    }
    return Json{{"ok", r.ok()}, {"checks", std::move(checks)}};
}

inline Json to_json(const SolverConstants& k) {
    return Json{{"target_q", k.target_q}, {"q", k.q},           {"A0", k.A0},
                {"supA", k.supA},         {"c", k.c},           {"h1", k.h1},
                {"h", k.h},               {"eps", k.eps},       {"epsBound", k.epsBound},
                {"Nstar", k.Nstar},       {"Tprime", k.Tprime}, {"supA_Tprime", k.supA_Tprime},
                {"theorem1", k.theorem1}, {"theorem2", k.theorem2}};
}

inline Json to_json(const CharacteristicReport& r) {
    Json roots = Json::array(), values = Json::array();
    for (const auto& root : r.roots) roots.push_back(Json::array({root.j, root.multiplicity}));
    for (const auto& v : r.values) values.push_back(v.str());
    Json j{{"N", r.N}, {"roots", roots}, {"values", values}, {"free_constants", r.total_free_constants}};
    if (!r.warnings.empty()) j["warnings"] = r.warnings;
    return j;
}

namespace detail {

template <class S>
Json affine_json(const AffineValue<S>& v) {
    Json j;
    if constexpr (is_rational_v<S>) {
        j["constant"] = v.constant().str();
    } else {
        j["constant"] = v.constant();
    }
    Json lin = Json::object();
    for (const auto& [id, c] : v.linear()) {
        if constexpr (is_rational_v<S>) {
            lin[parameter_name(id)] = c.str();
        } else {
            lin[parameter_name(id)] = c;
        }
    }
    j["linear"] = std::move(lin);
    return j;
}

template <class S>
Json expansion_terms(const AsymptoticExpansion<S>& e) {
    Json out = Json::array();
    for (std::size_t j = 0; j < e.coefficients.size(); ++j)
        for (int k = 0; k <= e.coefficients[j].degree(); ++k) {
            const auto c = e.coefficients[j].coeff(k);
            if (c.is_zero()) continue;
            Json term = affine_json(c);
            term["j"] = j;
            term["k"] = k;
            out.push_back(std::move(term));
        }
    return out;
}

}  // namespace detail

inline Json to_json(const AsymptoticSolution& a) {
    Json params = Json::array();
    for (int id : a.free_parameters()) params.push_back(parameter_name(id));
    Json j{{"order", a.order},
           {"pretty", pretty(a)},
           {"free_parameters", params},
           {"terms", detail::expansion_terms(a.numeric)}};
    if (a.exact) j["exact_terms"] = detail::expansion_terms(*a.exact);
    j["characteristic"] = to_json(a.characteristic);
    if (!a.warnings.empty()) j["warnings"] = a.warnings;
    return j;
}

inline Json to_json(const ResidualReport& r) {
    Json rows = Json::array();
    for (std::size_t i = 0; i < r.grid.size(); ++i)
        rows.push_back(Json{{"t", r.grid[i]}, {"eq3", r.eq3[i]}, {"eq6", r.eq6[i]}, {"representation", r.representation[i]}});
    return Json{{"max_abs", r.max_abs}, {"points", rows}};
}

inline Json to_json(const MeshFunction& f) {
    return Json{{"breaks", f.mesh().breaks()}, {"nodes_per_panel", f.mesh().nodes_per_panel()}, {"values", f.values()}};
}

inline MeshFunction mesh_function_from_json(const Json& j) {
    try {
        Mesh mesh(j.at("breaks").get<std::vector<double>>(), j.at("nodes_per_panel").get<int>());
        return MeshFunction(std::move(mesh), j.at("values").get<std::vector<double>>());
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::Parse, std::string("mesh: ") + e.what());
    }
}

inline std::vector<std::pair<double, double>> sample_solution(const GeneralizedSolution& sol, int points = 201) {
    std::vector<std::pair<double, double>> out;
    const double H = sol.horizon;
    for (int i = 0; i < points; ++i) {
        double t = H * i / (points - 1);
        if (sol.path == GeneralizedSolution::Path::Theorem2 && i == 0) t = H / (2.0 * (points - 1));
        out.emplace_back(t, sol.regular(t));
    }
    return out;
}

inline Json solution_to_json(const GeneralizedSolution& sol, const std::string& problem_path, const std::string& sha256,
                             const std::vector<std::pair<double, double>>& samples) {
    Json params = Json::object();
    for (const auto& [id, v] : sol.parameters) params[parameter_name(id)] = v;
    Json xhat = Json::array();
    for (const auto& [key, c] : sol.xhat.terms()) xhat.push_back(Json::array({key.first, key.second, c}));
    Json s = Json::array();
    for (const auto& [t, x] : samples) s.push_back(Json::array({t, x}));
    Json j{{"problem", problem_path},
           {"problem_sha256", sha256},
           {"path", sol.path_name()},
           {"a", sol.a.str()},
           {"a_value", sol.a.convert_to<double>()},
           {"parameters", params},
           {"Nstar", sol.Nstar},
           {"Tprime", sol.horizon},
           {"t_split", sol.t_split}};
    j["asymptotic"] = sol.asymptotic ? to_json(*sol.asymptotic) : Json(nullptr);
    j["xhat"] = std::move(xhat);
    j["xhat_order"] = sol.xhat.order();
    j["mesh"] = to_json(sol.part);
    j["samples"] = std::move(s);
    return j;
}

inline GeneralizedSolution solution_from_json(const Json& j) {
    try {
        GeneralizedSolution sol;
        const auto path = j.at("path").get<std::string>();
        if (path == "theorem-1") {
            sol.path = GeneralizedSolution::Path::Theorem1;
        } else if (path == "theorem-2") {
            sol.path = GeneralizedSolution::Path::Theorem2;
        } else {
            throw Error(ErrorCode::Parse, "unknown solution path '" + path + "'");
        }
        const auto a = try_parse_rational(j.at("a").get<std::string>());
        if (!a) throw Error(ErrorCode::Parse, "a: not a rational");
        sol.a = *a;
        for (const auto& [name, v] : j.at("parameters").items()) {
            const auto id = parameter_id(name);
            if (!id) throw Error(ErrorCode::Parse, "parameters: bad name '" + name + "'");
            sol.parameters[*id] = v.get<double>();
        }
        sol.Nstar = j.at("Nstar").get<int>();
        sol.t_split = j.at("t_split").get<double>();
        sol.xhat = LogPowerPolynomial<double>(j.at("xhat_order").get<int>());
        for (const auto& term : j.at("xhat"))
            sol.xhat.add_term(term.at(0).get<int>(), term.at(1).get<int>(), term.at(2).get<double>());
        sol.part = mesh_function_from_json(j.at("mesh"));
        sol.horizon = sol.part.mesh().end();
        return sol;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::Parse, std::string("solution file: ") + e.what());
    }
}

inline std::string samples_csv(const std::vector<std::pair<double, double>>& samples) {
    std::string out = "t,x\n";
    for (const auto& [t, x] : samples) out += format17(t) + "," + format17(x) + "\n";
    return out;
}

inline std::string residuals_csv(const ResidualReport& r) {
    std::string out = "t,eq3,eq6,representation\n";
    for (std::size_t i = 0; i < r.grid.size(); ++i)
        out += format17(r.grid[i]) + "," + format17(r.eq3[i]) + "," + format17(r.eq6[i]) + "," + r.representation[i] + "\n";
    return out;
}

}  // namespace pwvie
