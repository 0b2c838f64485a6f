#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "robinlab/assembly.hpp"
#include "robinlab/boundary_ops.hpp"
#include "robinlab/geometry.hpp"

namespace robinlab {

inline constexpr const char* kToolVersion = "robinlab 0.1.0";

struct IntervalDomain {
    double a = -1.0;
    double b = 1.0;
    int n = 100;
};

struct DiskDomain {
    int n_r = 8;
    int n_theta = 32;
    std::string triangulation = "rotational";  // or "alternating"
};

/// Constant A = value * I, or a radial profile a(|x|) I chosen by id.
struct CoefficientConfig {
    std::string kind = "constant";  // "constant" | "radial"
    double value = 1.0;
    std::string id;  // "one_plus_r2" | "two_minus_r2"
};

/// Boundary function by id: constant, cos(k theta), sin(k theta), x, y; times `scale`.
struct FunctionConfig {
    std::string kind = "constant";
    int k = 1;
    double scale = 1.0;
};

/// Boundary kernel by id: "gaussian" scale*exp(-|x-y|^2/width^2), "constant" scale.
struct KernelConfig {
    std::string kind = "gaussian";
    double width = 1.0;
    double scale = 1.0;
};

struct BoundaryConfig {
    std::string type = "zero";
    FunctionConfig function;  // multiplication beta, rank_one v
    KernelConfig kernel;
    double angle = 0.0;
    std::map<int, double> q_hat;
    std::vector<std::vector<double>> entries;
};

struct ProblemConfig {
    std::variant<IntervalDomain, DiskDomain> domain;
    CoefficientConfig coefficient;
    BoundaryConfig boundary_operator;
    std::uint64_t seed = 0;
    std::string output_dir = ".";
};

/// Throws InvalidArgument on malformed input or unknown fields.
ProblemConfig parse_config(const nlohmann::json& j);
ProblemConfig load_config(const std::filesystem::path& path);
nlohmann::json config_to_json(const ProblemConfig& c);

/// FNV-1a of the canonical serialisation.
std::string config_hash(const ProblemConfig& c);

Mesh build_mesh(const ProblemConfig& c);
CoefficientField build_coefficient(const ProblemConfig& c);
BoundaryOperatorSpec build_boundary_spec(const ProblemConfig& c);
AssembledProblem build_problem(const ProblemConfig& c, AssemblyOptions options = {});

/// JSON text with every floating-point number printed as %.17g; keys sorted.
std::string dump_json(const nlohmann::json& j);

/// Writes to a sibling temp file, then renames over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace robinlab
