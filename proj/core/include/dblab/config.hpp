#pragma once

#include <map>
#include <string>

#include <nlohmann/json.hpp>

#include "dblab/coefficients.hpp"
#include "dblab/fd_oracle.hpp"

namespace dblab {

using ojson = nlohmann::ordered_json;

enum class Subcommand { verify, solve, rellich, convergence, norms };
std::string to_string(Subcommand s);
Subcommand subcommand_from_string(const std::string& s);

enum class ReportFormat { csv, json };

struct CoefficientConfig {
    std::string source = "family";  // family | expressions | file
    std::vector<std::string> kinds{"lower_triangular_random"};
    int count = 1;                   // members per kind
    double lambda_floor = 0.5;
    double Lambda_cap = 2.0;
    double amplitude = 0.3;
    int max_mode = 3;
    int dyadic_level = 3;
    bool piecewise = false;
    std::vector<std::vector<std::string>> expressions;  // (1+n) x (1+n)
    std::string file;
};

struct DataConfig {
    // neumann | regularity | dirichlet | energy_neumann | energy_regularity
    std::string problem = "neumann";
    std::vector<std::string> expressions;  // one scalar, or n components for regularity
    std::string file;                      // scalar field dump
    std::uint64_t seed = 0;                // random datum when no expression/file is given
};

struct SolveConfig {
    int t_levels = 200;
    bool oracle = false;
    int oracle_M_factor = 4;
    double T_over_L = 8.0;
    XScheme scheme = XScheme::collocation;
    bool dumps = true;
};

struct SweepConfig {
    std::vector<int> grids;
    int oracle_M_factor = 4;
    double T_over_L = 8.0;
    XScheme scheme = XScheme::collocation;
    int samples = 4;
    int t_levels = 200;
    double c0 = 2.0, c1 = 1.0;
};

struct ExperimentConfig {
    Subcommand subcommand = Subcommand::verify;
    int n = 1;
    int N = 64;
    double L = 2.0 * kPi;
    CoefficientConfig coefficients;
    DataConfig data;
    std::map<std::string, double> tolerances;
    std::string out_dir = "dblab-out";
    ReportFormat format = ReportFormat::csv;
    std::uint64_t seed = 1;
    int workers = 1;
    bool force = false;
    SolveConfig solve;
    SweepConfig sweep;

    GridSpec grid() const { return GridSpec{n, N, L}; }
    double tol(const std::string& key) const;
};

// Defaults for each subcommand (the configuration used when no file is given).
ExperimentConfig default_config(Subcommand s);
std::map<std::string, double> default_tolerances();

// Strict parsing: unknown keys and wrongly typed values raise InputError.
// Missing keys take the subcommand defaults.
ExperimentConfig parse_config(const ojson& j);
ExperimentConfig load_config(const std::string& path);
ojson to_json(const ExperimentConfig& c);
std::string serialize(const ExperimentConfig& c);

// Corpus member: a coefficient with a stable identifier.
struct CorpusMember {
    std::string id;
    std::string kind;
    std::uint64_t seed = 0;
    ContinuumCoefficient coeff;
};

// Members of the configured corpus. Family members use seeds derived from
// (master seed, member index).
std::vector<CorpusMember> build_corpus(const ExperimentConfig& c);

// Coefficient file: {"n": .., "expressions": [[..]]} or {"dump": "<field dump>"}.
ContinuumCoefficient load_coefficient_file(const std::string& path, int n, double L);
// Writes a coefficient field as a dump with (1+n)^2 physical components.
void write_coefficient_dump(const std::string& json_path, const CoefficientField& A);
CoefficientField read_coefficient_dump(const std::string& json_path);

}  // namespace dblab
