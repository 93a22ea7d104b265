#pragma once

#include "dblab/config.hpp"
#include "dblab/csv.hpp"

namespace dblab {

struct RunResult {
    ExitCode code = ExitCode::ok;
    Table table{{}};
    ojson summary = ojson::object();
    std::vector<std::string> written;  // files produced besides the report
};

// Tolerances actually applied by run_verify on the configured grid: grids with
// N < 16 use 100x looser identity bounds, 10x looser map bounds and a 10x
// lower key-lemma floor.
std::map<std::string, double> verify_tolerances(const ExperimentConfig& c);

RunResult run_verify(const ExperimentConfig& c);
RunResult run_solve(const ExperimentConfig& c);
RunResult run_rellich(const ExperimentConfig& c);
RunResult run_convergence(const ExperimentConfig& c);
RunResult run_norms(const ExperimentConfig& c);
RunResult run(const ExperimentConfig& c);

// Writes <out_dir>/<subcommand>.csv or .json. The JSON form carries the summary
// and the configuration (without worker count and output settings), so equal
// configurations give byte-identical files. Returns the report path.
std::string write_report(const ExperimentConfig& c, const RunResult& r);

// Relative strip L2 distance between gradient fields sampled at the same t
// levels with quadrature weights w.
double strip_relative_error(const GridSpec& g, const std::vector<std::vector<Vec>>& a,
                            const std::vector<std::vector<Vec>>& b, const std::vector<double>& w);

}  // namespace dblab
