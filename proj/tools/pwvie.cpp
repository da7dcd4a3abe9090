// Command-line front end: analyze, asympt, solve, verify.

#include <CLI11.hpp>
#include <openssl/evp.h>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "pwvie/pwvie.hpp"

using namespace pwvie;

namespace {

enum Exit {
    kOk = 0,
    kGeneric = 1,
    kValidation = 2,
    kNoConstants = 3,
    kContraction = 4,
    kMissingParam = 5,
    kHashMismatch = 6,
    kResidual = 7,
};

struct RunConfig {
    std::string input;
    double tol = 1e-10;
    int nodes = 17;
    int grid = 2048;
    int order = -1;
    std::vector<std::string> params;
    bool strict_params = false;
    std::string out;
    std::string solution;
    double threshold = 1e-6;
    bool json = false;
};

std::string sha256_hex(const std::string& data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw Error(ErrorCode::InternalConsistency, "sha256 failed");
    std::string hex;
    char buf[3];
    for (unsigned int i = 0; i < len; ++i) {
        std::snprintf(buf, sizeof buf, "%02x", digest[i]);
        hex += buf;
    }
    return hex;
}

int exit_code(const Error& e) {
    switch (e.code()) {
        case ErrorCode::Parse:
        case ErrorCode::UnsupportedInput:
        case ErrorCode::InvalidBoundary:
        case ErrorCode::SingularDiagonal:
        case ErrorCode::NotCovered:
        case ErrorCode::ParameterMismatch:
        case ErrorCode::ConditionViolated: return kValidation;
        case ErrorCode::NoValidConstants: return kNoConstants;
        case ErrorCode::ContractionFailure:
        case ErrorCode::WeightExhausted:
        case ErrorCode::StepOrdering: return kContraction;
        case ErrorCode::MissingParameter: return kMissingParam;
        default: return kGeneric;
    }
}

void print_validation(const ValidationReport& r) {
    for (const auto& c : r.checks) {
        std::cout << (c.passed ? "  ok    " : "  FAIL  ") << c.name;
        if (c.witness) std::cout << "  (t = " << c.witness.value() << ")";
        std::cout << "\n";
    }
}

/// Validation gate shared by every command; prints the failures and returns
/// false when the problem is not admissible.
bool validated(const ProblemSpec& spec, const RunConfig& cfg, Json* sink) {
    const auto report = validate(spec, cfg.grid);
    if (sink) (*sink)["validation"] = to_json(report);
    if (!report.ok() && !cfg.json) {
        std::cerr << "validation failed:\n";
        for (const auto& name : report.failures()) std::cerr << "  " << name << "\n";
    }
    return report.ok();
}

std::vector<std::string> recommended_paths(const SolverConstants& k) {
    std::vector<std::string> out;
    if (k.theorem1) out.push_back("theorem-1");
    if (k.theorem2) out.push_back("theorem-2");
    return out;
}

int cmd_analyze(const RunConfig& cfg) {
    const auto spec = load_problem(cfg.input);
    Json j;
    const bool ok = validated(spec, cfg, &j);
    if (!cfg.json) {
        std::cout << "validation:\n";
        print_validation(validate(spec, cfg.grid));
    }
    if (!ok) {
        if (cfg.json) std::cout << j.dump(2) << "\n";
        return kValidation;
    }
    j["A0"] = std::abs(A_of_t(spec, 0.0));
    SolverConstants k;
    try {
        k = estimate_constants(spec, 0.5, cfg.grid);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::NoValidConstants) throw;
        if (cfg.json) {
            j["path"] = "neither";
            std::cout << j.dump(2) << "\n";
        } else {
            std::cout << "|A(0)| = " << j["A0"].get<double>() << "\npath: neither (" << e.what() << ")\n";
        }
        return kNoConstants;
    }
    const int N = cfg.order >= 0 ? cfg.order : std::max(k.Nstar, 6);
    const auto report = find_integer_roots(spec, N);
    const auto paths = recommended_paths(k);
    j["constants"] = to_json(k);
    j["characteristic"] = to_json(report);
    j["path"] = paths.front();
    j["paths"] = paths;
    if (cfg.json) {
        std::cout << j.dump(2) << "\n";
        return kOk;
    }
    std::cout << "|A(0)| = " << k.A0 << "\n"
              << "constants: q = " << k.q << ", c = " << k.c << ", h1 = " << k.h1 << ", h = " << k.h
              << ", eps = " << k.eps << ", epsBound = " << k.epsBound << ", N* = " << k.Nstar << ", T' = " << k.Tprime
              << "\n";
    std::cout << "characteristic B(0.." << N << "):";
    for (const auto& v : report.values) std::cout << " " << v.str();
    std::cout << "\nroots:";
    if (report.roots.empty()) std::cout << " none";
    for (const auto& r : report.roots) std::cout << " (" << r.j << ", " << r.multiplicity << ")";
    std::cout << "\nfree constants: " << report.total_free_constants << "\npath:";
    for (const auto& p : paths) std::cout << " " << p;
    std::cout << "\n";
    for (const auto& w : report.warnings) std::cout << "warning: " << w << "\n";
    return kOk;
}

int cmd_asympt(const RunConfig& cfg) {
    const auto spec = load_problem(cfg.input);
    if (!validated(spec, cfg, nullptr)) return kValidation;
    const auto asym = compute_asymptotics(spec, std::max(cfg.order, 0));
    if (cfg.json) {
        std::cout << to_json(asym).dump(2) << "\n";
    } else {
        std::cout << pretty(asym) << "\n";
        for (const auto& w : asym.warnings) std::cout << "warning: " << w << "\n";
    }
    return kOk;
}

/// name=value bindings; "c" is accepted for c1 when there is exactly one
/// free parameter.
std::map<int, double> parse_bindings(const std::vector<std::string>& raw, const std::vector<int>& declared,
                                     bool strict, std::vector<std::string>& warnings) {
    std::map<int, double> out;
    for (const auto& item : raw) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw Error(ErrorCode::Parse, "--param expects name=value, got '" + item + "'");
        const std::string name = item.substr(0, eq);
        double value = 0;
        try {
            std::size_t used = 0;
            value = std::stod(item.substr(eq + 1), &used);
            if (used != item.size() - eq - 1) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw Error(ErrorCode::Parse, "--param " + name + ": value is not a number");
        }
        std::optional<int> id = parameter_id(name);
        if (name == "c" && declared.size() == 1) id = declared.front();
        if (!id || std::find(declared.begin(), declared.end(), *id) == declared.end())
            throw Error(ErrorCode::ParameterMismatch, "'" + name + "' is not a free parameter of this problem");
        out[*id] = value;
    }
    for (int id : declared) {
        if (out.count(id)) continue;
        if (strict) throw Error(ErrorCode::MissingParameter, "no binding for " + parameter_name(id));
        warnings.push_back(parameter_name(id) + " not bound; using 0");
        out[id] = 0;
    }
    return out;
}

int cmd_solve(const RunConfig& cfg) {
    const std::string text = read_file(cfg.input);
    const auto spec = parse_problem(text);
    if (!validated(spec, cfg, nullptr)) return kValidation;
    const auto k = estimate_constants(spec, 0.5, cfg.grid);
    std::vector<std::string> warnings;
    GeneralizedSolution sol;
    Json run;
    if (k.theorem1) {
        if (!cfg.params.empty()) warnings.push_back("theorem-1 solution is unique; --param ignored");
        StepOptions opt;
        opt.tol = cfg.tol;
        opt.nodes = cfg.nodes;
        const auto step = solve_regular(spec, k, opt);
        sol = assemble_step(spec, step);
        run = Json{{"h", k.h}, {"eps", k.eps}, {"iterations", step.iterations}, {"final_residual", step.max_residual},
                   {"contraction_bound", step.contraction_bound}};
    } else {
        const auto asym = compute_asymptotics(spec, std::max(k.Nstar, cfg.order));
        const auto params = parse_bindings(cfg.params, asym.free_parameters(), cfg.strict_params, warnings);
        RefinementOptions opt;
        opt.tol = cfg.tol;
        opt.nodes = cfg.nodes;
        const auto r = solve_theorem2(spec, k, params, cfg.order, opt);
        sol = r.solution;
        run = Json{{"l", r.refinement.l},         {"q_att", r.refinement.q_att}, {"q1_att", r.refinement.q1_att},
                   {"iterations", r.refinement.iterations}, {"gamma0", r.refinement.gamma0}};
    }
    const auto samples = sample_solution(sol);
    const auto check = verify_solution(spec, sol, uniform_grid(sol.horizon / 100, sol.horizon, 21));

    Json j = solution_to_json(sol, cfg.input, sha256_hex(text), samples);
    j["run"] = run;
    j["residual_max"] = check.max_abs;
    j["warnings"] = warnings;
    if (!cfg.out.empty()) {
        std::ofstream(cfg.out) << j.dump(2) << "\n";
        std::string csv = cfg.out;
        const auto dot = csv.rfind('.');
        csv = (dot == std::string::npos ? csv : csv.substr(0, dot)) + ".csv";
        std::ofstream(csv) << samples_csv(samples);
    }
    if (cfg.json) {
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "path: " << sol.path_name() << "\na = " << sol.a.str() << "\n";
        if (sol.asymptotic) std::cout << pretty(*sol.asymptotic) << "\n";
        std::cout << "free parameters: " << sol.parameters.size() << "\n";
        for (const auto& [id, v] : sol.parameters) std::cout << "  " << parameter_name(id) << " = " << v << "\n";
        std::cout << "max residual (eq3, eq6): " << check.max_abs << "\n";
    }
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
    return kOk;
}

int cmd_verify(const RunConfig& cfg) {
    const std::string text = read_file(cfg.input);
    const auto spec = parse_problem(text);
    Json doc;
    try {
        doc = Json::parse(read_file(cfg.solution));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::Parse, std::string("solution file: ") + e.what());
    }
    if (doc.value("problem_sha256", std::string()) != sha256_hex(text)) {
        std::cerr << "solution was computed for a different problem file\n";
        return kHashMismatch;
    }
    const auto sol = solution_from_json(doc);
    const auto report = verify_solution(spec, sol, uniform_grid(sol.horizon / 100, sol.horizon, 41));
    const bool pass = report.max_abs <= cfg.threshold;
    if (cfg.json) {
        Json j = to_json(report);
        j["threshold"] = cfg.threshold;
        j["pass"] = pass;
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "max residual " << report.max_abs << " (threshold " << cfg.threshold << "): "
                  << (pass ? "pass" : "FAIL") << "\n";
    }
    return pass ? kOk : kResidual;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Piecewise-kernel Volterra equations of the first kind"};
    app.require_subcommand(1);
    RunConfig cfg;

    auto common = [&](CLI::App* sub) {
        sub->add_option("file", cfg.input, "problem file (JSON)")->required()->check(CLI::ExistingFile);
        sub->add_flag("--json", cfg.json, "emit JSON");
        sub->add_option("--grid", cfg.grid, "validation / sampling grid points")->check(CLI::PositiveNumber);
    };
    auto* analyze = app.add_subcommand("analyze", "check hypotheses, constants and the characteristic function");
    common(analyze);
    analyze->add_option("--order", cfg.order, "characteristic scan bound")->check(CLI::NonNegativeNumber);

    auto* asympt = app.add_subcommand("asympt", "asymptotic expansion of the regular part near 0");
    common(asympt);
    asympt->add_option("--order", cfg.order, "expansion order N")->required()->check(CLI::NonNegativeNumber);

    auto* solve = app.add_subcommand("solve", "construct the generalized solution");
    common(solve);
    solve->add_option("--tol", cfg.tol, "iteration tolerance")->check(CLI::PositiveNumber);
    solve->add_option("--nodes", cfg.nodes, "nodes per subinterval")->check(CLI::Range(4, 1025));
    solve->add_option("--order", cfg.order, "asymptotic order (at least N*)")->check(CLI::NonNegativeNumber);
    solve->add_option("--param", cfg.params, "free parameter binding name=value")->take_all();
    solve->add_flag("--strict-params", cfg.strict_params, "fail when a free parameter is unbound");
    solve->add_option("--out", cfg.out, "solution JSON path (samples CSV written alongside)");

    auto* verify = app.add_subcommand("verify", "residuals of a stored solution");
    common(verify);
    verify->add_option("--solution", cfg.solution, "solution JSON")->required()->check(CLI::ExistingFile);
    verify->add_option("--threshold", cfg.threshold, "maximum admissible residual")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (*analyze) return cmd_analyze(cfg);
        if (*asympt) return cmd_asympt(cfg);
        if (*solve) return cmd_solve(cfg);
        if (*verify) return cmd_verify(cfg);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kGeneric;
    }
    return kGeneric;
}
