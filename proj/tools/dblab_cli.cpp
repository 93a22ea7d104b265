// dblab: command-line driver for the experiment runner.
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "dblab/runner.hpp"

namespace {

struct Overrides {
    std::string config;
    std::optional<int> grid;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<std::string> format;
    std::optional<int> workers;
    bool force = false;
};

// Flags are merged into the JSON form of the configuration, which is then
// parsed again so that every value passes the same validation.
dblab::ExperimentConfig resolve(dblab::Subcommand sub, const Overrides& o) {
    using dblab::ojson;
    dblab::ExperimentConfig base = o.config.empty() ? dblab::default_config(sub) : dblab::load_config(o.config);
    if (!o.config.empty() && base.subcommand != sub)
        dblab::warn("config subcommand '" + to_string(base.subcommand) + "' overridden by '" + to_string(sub) + "'");
    ojson j = dblab::to_json(base);
    j["subcommand"] = to_string(sub);
    if (o.grid) {
        j["grid"]["N"] = *o.grid;
        if (!j["sweep"]["grids"].empty()) j["sweep"]["grids"] = ojson::array({*o.grid});
    }
    if (o.seed) j["seed"] = *o.seed;
    if (o.out) j["output"]["dir"] = *o.out;
    if (o.format) j["output"]["format"] = *o.format;
    if (o.workers) j["workers"] = *o.workers;
    if (o.force) j["force"] = true;
    return dblab::parse_config(j);
}

}  // namespace

int main(int argc, char** argv) {
    dblab::set_warning_handler([](const std::string& m) { std::cerr << "warning: " << m << "\n"; });

    CLI::App app{"Boundary value problems for divergence-form operators on the periodic half-space"};
    app.require_subcommand(1);
    Overrides o;
    bool print_config = false;

    const std::pair<dblab::Subcommand, const char*> subs[] = {
        {dblab::Subcommand::verify, "Run the identity and invariant suites over a coefficient corpus"},
        {dblab::Subcommand::solve, "Solve one boundary value problem and dump fields, traces and norms"},
        {dblab::Subcommand::rellich, "Tabulate Neumann-to-Dirichlet and Dirichlet-to-Neumann norms"},
        {dblab::Subcommand::convergence, "Compare variational and spectral Neumann-to-Dirichlet maps"},
        {dblab::Subcommand::norms, "Ratios between boundary traces and interior norms"},
    };
    for (const auto& [sub, help] : subs) {
        CLI::App* s = app.add_subcommand(to_string(sub), help);
        s->add_option("--config", o.config, "JSON configuration file")->check(CLI::ExistingFile);
        s->add_option("--grid", o.grid, "Grid size N (replaces sweep grids)");
        s->add_option("--seed", o.seed, "Master seed");
        s->add_option("--out", o.out, "Output directory");
        s->add_option("--format", o.format, "Report format")->check(CLI::IsMember({"csv", "json"}));
        s->add_option("--workers", o.workers, "Worker threads")->check(CLI::PositiveNumber);
        s->add_flag("--force", o.force, "Allow block classes outside the covered cases");
        s->add_flag("--print-config", print_config, "Print the resolved configuration and exit");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : int(dblab::ExitCode::config);
    }

    try {
        const dblab::Subcommand sub = dblab::subcommand_from_string(app.get_subcommands().front()->get_name());
        const dblab::ExperimentConfig cfg = resolve(sub, o);
        if (print_config) {
            std::cout << dblab::serialize(cfg);
            return 0;
        }
        dblab::RunResult r = dblab::run(cfg);
        const std::string path = dblab::write_report(cfg, r);
        std::cout << path << "\n";
        for (const auto& w : r.written) std::cout << w << "\n";
        std::cout << r.summary.dump() << "\n";
        return int(r.code);
    } catch (const dblab::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return int(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return int(dblab::ExitCode::numerical);
    }
}
