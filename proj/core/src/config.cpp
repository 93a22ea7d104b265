#include "dblab/config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "dblab/expression.hpp"
#include "dblab/field_io.hpp"
#include "dblab/field_norms.hpp"

namespace dblab {

std::string to_string(Subcommand s) {
    switch (s) {
        case Subcommand::verify: return "verify";
        case Subcommand::solve: return "solve";
        case Subcommand::rellich: return "rellich";
        case Subcommand::convergence: return "convergence";
        case Subcommand::norms: return "norms";
    }
    return "verify";
}

Subcommand subcommand_from_string(const std::string& s) {
    for (auto c : {Subcommand::verify, Subcommand::solve, Subcommand::rellich, Subcommand::convergence,
                   Subcommand::norms})
        if (to_string(c) == s) return c;
    throw InputError("unknown subcommand '" + s + "'");
}

std::map<std::string, double> default_tolerances() {
    return {
        {"hat", 1e-12},           {"identity", 1e-8},    {"newton", 1e-6},   {"factorization", 1e-6},
        {"inverse", 1e-6},        {"graph", 1e-6},       {"key_lemma_floor", 1e-6},
        {"dirichlet_trace", 1e-8}, {"oracle", 5e-2},     {"drift", 0.2},
    };
}

double ExperimentConfig::tol(const std::string& key) const {
    auto it = tolerances.find(key);
    if (it == tolerances.end()) throw InputError("unknown tolerance '" + key + "'");
    return it->second;
}

ExperimentConfig default_config(Subcommand s) {
    ExperimentConfig c;
    c.subcommand = s;
    c.tolerances = default_tolerances();
    switch (s) {
        case Subcommand::verify:
            c.N = 64;
            c.coefficients.kinds = {"lower_triangular_random", "upper_triangular_random", "block_diagonal_random",
                                    "smooth_trig", "piecewise_random"};
            c.coefficients.count = 2;
            break;
        case Subcommand::solve:
            c.N = 64;
            c.coefficients.kinds = {"lower_triangular_random"};
            c.coefficients.count = 1;
            c.solve.oracle = false;
            break;
        case Subcommand::rellich:
            c.coefficients.kinds = {"lower_triangular_random", "upper_triangular_random", "block_diagonal_random"};
            c.coefficients.count = 4;
            c.sweep.grids = {64, 128, 256};
            break;
        case Subcommand::convergence:
            c.coefficients.kinds = {"smooth_trig"};
            c.coefficients.count = 2;
            c.sweep.grids = {16, 32, 64};
            break;
        case Subcommand::norms:
            c.coefficients.kinds = {"lower_triangular_random"};
            c.coefficients.count = 3;
            c.sweep.grids = {64, 128};
            break;
    }
    return c;
}

namespace {

void check_keys(const ojson& j, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw InputError(where + ": expected an object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!ok.count(it.key())) throw InputError(where + ": unknown key '" + it.key() + "'");
}

template <class T>
void read(const ojson& j, const char* key, T& out, const std::string& where) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw InputError(where + "." + key + ": wrong type");
    }
}

void read_u64(const ojson& j, const char* key, std::uint64_t& out, const std::string& where) {
    if (!j.contains(key)) return;
    const auto& v = j.at(key);
    if (v.is_number_unsigned()) {
        out = v.get<std::uint64_t>();
    } else if (v.is_number_integer() && v.get<std::int64_t>() >= 0) {
        out = std::uint64_t(v.get<std::int64_t>());
    } else if (v.is_string()) {
        try {
            std::size_t pos = 0;
            out = std::stoull(v.get<std::string>(), &pos);
            if (pos != v.get<std::string>().size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw InputError(where + "." + key + ": not an unsigned 64-bit integer");
        }
    } else {
        throw InputError(where + "." + key + ": not an unsigned 64-bit integer");
    }
}

XScheme read_scheme(const ojson& j, const char* key, XScheme def, const std::string& where) {
    if (!j.contains(key)) return def;
    if (!j.at(key).is_string()) throw InputError(where + "." + key + ": wrong type");
    return xscheme_from_string(j.at(key).get<std::string>());
}

void validate(const ExperimentConfig& c) {
    if (c.n != 1 && c.n != 2) throw InputError("grid.n must be 1 or 2");
    c.grid().validate();
    if (c.workers < 1) throw InputError("workers must be at least 1");
    const auto& cc = c.coefficients;
    if (cc.source != "family" && cc.source != "expressions" && cc.source != "file")
        throw InputError("coefficients.source must be family, expressions or file");
    if (cc.source == "family") {
        if (cc.kinds.empty()) throw InputError("coefficients.kinds must not be empty");
        for (const auto& k : cc.kinds) family_kind_from_string(k);
        if (cc.count < 1) throw InputError("coefficients.count must be at least 1");
    }
    if (cc.source == "expressions") {
        const std::size_t dim = std::size_t(1 + c.n);
        if (cc.expressions.size() != dim) throw InputError("coefficients.expressions must be a (1+n)x(1+n) array");
        for (const auto& row : cc.expressions)
            if (row.size() != dim) throw InputError("coefficients.expressions must be a (1+n)x(1+n) array");
    }
    if (cc.source == "file" && cc.file.empty()) throw InputError("coefficients.file is empty");
    static const std::set<std::string> problems{"neumann", "regularity", "dirichlet", "energy_neumann",
                                                "energy_regularity"};
    if (!problems.count(c.data.problem)) throw InputError("data.problem '" + c.data.problem + "' is not known");
    for (const auto& [k, v] : c.tolerances)
        if (!(v > 0.0) || !std::isfinite(v)) throw InputError("tolerance '" + k + "' must be positive");
    for (int N : c.sweep.grids) GridSpec{c.n, N, c.L}.validate();
    if (c.solve.t_levels < 4 || c.sweep.t_levels < 4) throw InputError("t_levels must be at least 4");
    if (c.sweep.samples < 1) throw InputError("sweep.samples must be at least 1");
    if (c.solve.oracle_M_factor < 2 || c.sweep.oracle_M_factor < 2) throw InputError("oracle_M_factor must be >= 2");
    WhitneyParams{c.sweep.c0, c.sweep.c1}.validate();
}

}  // namespace

ExperimentConfig parse_config(const ojson& j) {
    check_keys(j, "config", {"subcommand", "grid", "coefficients", "data", "tolerances", "output", "seed", "workers",
                             "force", "solve", "sweep"});
    Subcommand sub = Subcommand::verify;
    if (j.contains("subcommand")) {
        if (!j.at("subcommand").is_string()) throw InputError("config.subcommand: wrong type");
        sub = subcommand_from_string(j.at("subcommand").get<std::string>());
    }
    ExperimentConfig c = default_config(sub);
    if (j.contains("grid")) {
        const auto& g = j.at("grid");
        check_keys(g, "grid", {"n", "N", "L"});
        read(g, "n", c.n, "grid");
        read(g, "N", c.N, "grid");
        read(g, "L", c.L, "grid");
    }
    if (j.contains("coefficients")) {
        const auto& k = j.at("coefficients");
        check_keys(k, "coefficients", {"source", "kinds", "count", "lambda_floor", "Lambda_cap", "amplitude",
                                       "max_mode", "dyadic_level", "piecewise", "expressions", "file"});
        auto& cc = c.coefficients;
        read(k, "source", cc.source, "coefficients");
        read(k, "kinds", cc.kinds, "coefficients");
        read(k, "count", cc.count, "coefficients");
        read(k, "lambda_floor", cc.lambda_floor, "coefficients");
        read(k, "Lambda_cap", cc.Lambda_cap, "coefficients");
        read(k, "amplitude", cc.amplitude, "coefficients");
        read(k, "max_mode", cc.max_mode, "coefficients");
        read(k, "dyadic_level", cc.dyadic_level, "coefficients");
        read(k, "piecewise", cc.piecewise, "coefficients");
        read(k, "expressions", cc.expressions, "coefficients");
        read(k, "file", cc.file, "coefficients");
    }
    if (j.contains("data")) {
        const auto& d = j.at("data");
        check_keys(d, "data", {"problem", "expressions", "file", "seed"});
        read(d, "problem", c.data.problem, "data");
        read(d, "expressions", c.data.expressions, "data");
        read(d, "file", c.data.file, "data");
        read_u64(d, "seed", c.data.seed, "data");
    }
    if (j.contains("tolerances")) {
        const auto& t = j.at("tolerances");
        if (!t.is_object()) throw InputError("tolerances: expected an object");
        for (auto it = t.begin(); it != t.end(); ++it) {
            if (!c.tolerances.count(it.key())) throw InputError("tolerances: unknown key '" + it.key() + "'");
            if (!it.value().is_number()) throw InputError("tolerances." + it.key() + ": wrong type");
            c.tolerances[it.key()] = it.value().get<double>();
        }
    }
    if (j.contains("output")) {
        const auto& o = j.at("output");
        check_keys(o, "output", {"dir", "format"});
        read(o, "dir", c.out_dir, "output");
        if (o.contains("format")) {
            const std::string f = o.at("format").is_string() ? o.at("format").get<std::string>() : "";
            if (f == "csv")
                c.format = ReportFormat::csv;
            else if (f == "json")
                c.format = ReportFormat::json;
            else
                throw InputError("output.format must be csv or json");
        }
    }
    read_u64(j, "seed", c.seed, "config");
    read(j, "workers", c.workers, "config");
    read(j, "force", c.force, "config");
    if (j.contains("solve")) {
        const auto& s = j.at("solve");
        check_keys(s, "solve", {"t_levels", "oracle", "oracle_M_factor", "T_over_L", "scheme", "dumps"});
        read(s, "t_levels", c.solve.t_levels, "solve");
        read(s, "oracle", c.solve.oracle, "solve");
        read(s, "oracle_M_factor", c.solve.oracle_M_factor, "solve");
        read(s, "T_over_L", c.solve.T_over_L, "solve");
        c.solve.scheme = read_scheme(s, "scheme", c.solve.scheme, "solve");
        read(s, "dumps", c.solve.dumps, "solve");
    }
    if (j.contains("sweep")) {
        const auto& s = j.at("sweep");
        check_keys(s, "sweep",
                   {"grids", "oracle_M_factor", "T_over_L", "scheme", "samples", "t_levels", "c0", "c1"});
        read(s, "grids", c.sweep.grids, "sweep");
        read(s, "oracle_M_factor", c.sweep.oracle_M_factor, "sweep");
        read(s, "T_over_L", c.sweep.T_over_L, "sweep");
        c.sweep.scheme = read_scheme(s, "scheme", c.sweep.scheme, "sweep");
        read(s, "samples", c.sweep.samples, "sweep");
        read(s, "t_levels", c.sweep.t_levels, "sweep");
        read(s, "c0", c.sweep.c0, "sweep");
        read(s, "c1", c.sweep.c1, "sweep");
    }
    validate(c);
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw InputError("cannot read config " + path);
    ojson j;
    try {
        j = ojson::parse(is);
    } catch (const std::exception& e) {
        throw InputError(path + ": " + e.what());
    }
    ExperimentConfig c = parse_config(j);
    // Relative file references resolve against the config's directory.
    const auto base = std::filesystem::path(path).parent_path();
    auto fix = [&](std::string& f) {
        if (!f.empty() && std::filesystem::path(f).is_relative()) f = (base / f).lexically_normal().string();
    };
    fix(c.coefficients.file);
    fix(c.data.file);
    return c;
}

ojson to_json(const ExperimentConfig& c) {
    ojson j;
    j["subcommand"] = to_string(c.subcommand);
    j["grid"] = {{"n", c.n}, {"N", c.N}, {"L", c.L}};
    const auto& cc = c.coefficients;
    ojson k;
    k["source"] = cc.source;
    k["kinds"] = cc.kinds;
    k["count"] = cc.count;
    k["lambda_floor"] = cc.lambda_floor;
    k["Lambda_cap"] = cc.Lambda_cap;
    k["amplitude"] = cc.amplitude;
    k["max_mode"] = cc.max_mode;
    k["dyadic_level"] = cc.dyadic_level;
    k["piecewise"] = cc.piecewise;
    k["expressions"] = cc.expressions;
    k["file"] = cc.file;
    j["coefficients"] = k;
    j["data"] = {{"problem", c.data.problem},
                 {"expressions", c.data.expressions},
                 {"file", c.data.file},
                 {"seed", c.data.seed}};
    ojson t = ojson::object();
    for (const auto& [key, v] : c.tolerances) t[key] = v;
    j["tolerances"] = t;
    j["output"] = {{"dir", c.out_dir}, {"format", c.format == ReportFormat::csv ? "csv" : "json"}};
    j["seed"] = c.seed;
    j["workers"] = c.workers;
    j["force"] = c.force;
    j["solve"] = {{"t_levels", c.solve.t_levels},   {"oracle", c.solve.oracle},
                  {"oracle_M_factor", c.solve.oracle_M_factor}, {"T_over_L", c.solve.T_over_L},
                  {"scheme", to_string(c.solve.scheme)}, {"dumps", c.solve.dumps}};
    j["sweep"] = {{"grids", c.sweep.grids},
                  {"oracle_M_factor", c.sweep.oracle_M_factor},
                  {"T_over_L", c.sweep.T_over_L},
                  {"scheme", to_string(c.sweep.scheme)},
                  {"samples", c.sweep.samples},
                  {"t_levels", c.sweep.t_levels},
                  {"c0", c.sweep.c0},
                  {"c1", c.sweep.c1}};
    return j;
}

std::string serialize(const ExperimentConfig& c) { return to_json(c).dump(2) + "\n"; }

namespace {

ContinuumCoefficient expression_coefficient(const std::vector<std::vector<std::string>>& ex, int n, double L) {
    const int dim = 1 + n;
    if (ex.size() != std::size_t(dim)) throw InputError("coefficient expressions must form a (1+n)x(1+n) array");
    std::vector<Expression> parsed;
    for (const auto& row : ex) {
        if (row.size() != std::size_t(dim))
            throw InputError("coefficient expressions must form a (1+n)x(1+n) array");
        for (const auto& s : row) parsed.push_back(Expression::parse(s, n));
    }
    return ContinuumCoefficient(n, L, [parsed, dim](double x1, double x2) {
        Mat m(dim, dim);
        for (int r = 0; r < dim; ++r)
            for (int c = 0; c < dim; ++c) m(r, c) = parsed[std::size_t(r * dim + c)].eval(x1, x2);
        return m;
    });
}

// Trigonometric interpolant of grid samples, usable on any grid.
ContinuumCoefficient interpolant_coefficient(const CoefficientField& A) {
    const GridSpec g = A.grid;
    std::vector<Vec> coeffs;
    for (const auto& e : A.entries) coeffs.push_back(interpolant_coeffs(g, e));
    const int dim = A.dim;
    return ContinuumCoefficient(g.n, g.L, [g, coeffs, dim](double x1, double x2) {
        Mat m = Mat::Zero(dim, dim);
        for (std::size_t k = 0; k < g.points(); ++k) {
            auto xi = frequency(g, k);
            const cplx e = std::exp(cplx(0.0, xi[0] * x1 + xi[1] * x2));
            for (int r = 0; r < dim; ++r)
                for (int c = 0; c < dim; ++c) m(r, c) += coeffs[std::size_t(r * dim + c)](Eigen::Index(k)) * e;
        }
        return m;
    });
}

}  // namespace

void write_coefficient_dump(const std::string& json_path, const CoefficientField& A) {
    DumpHeader h;
    h.kind = "coefficient";
    h.content = "A";
    h.grid = A.grid;
    h.components = A.dim * A.dim;
    h.shape = {std::size_t(h.components), A.grid.points()};
    std::vector<cplx> data;
    for (const auto& e : A.entries) data.insert(data.end(), e.data(), e.data() + e.size());
    write_dump(json_path, h, data);
}

CoefficientField read_coefficient_dump(const std::string& json_path) {
    auto [h, data] = read_dump(json_path);
    const int dim = 1 + h.grid.n;
    if (h.kind != "coefficient" || h.components != dim * dim || h.rep != Representation::physical)
        throw InputError(json_path + ": not a physical coefficient dump");
    CoefficientField A;
    A.grid = h.grid;
    A.dim = dim;
    const std::size_t P = h.grid.points();
    for (int c = 0; c < dim * dim; ++c)
        A.entries.push_back(Eigen::Map<const Vec>(data.data() + std::size_t(c) * P, Eigen::Index(P)));
    A.refresh(true);
    return A;
}

ContinuumCoefficient load_coefficient_file(const std::string& path, int n, double L) {
    std::ifstream is(path);
    if (!is) throw InputError("cannot read coefficient file " + path);
    ojson j;
    try {
        j = ojson::parse(is);
    } catch (const std::exception& e) {
        throw InputError(path + ": " + e.what());
    }
    check_keys(j, path, {"n", "expressions", "dump"});
    if (j.contains("n") && j.at("n") != n) throw InputError(path + ": dimension does not match the grid");
    if (j.contains("expressions")) {
        std::vector<std::vector<std::string>> ex;
        read(j, "expressions", ex, path);
        return expression_coefficient(ex, n, L);
    }
    if (j.contains("dump")) {
        std::string dump = j.at("dump").get<std::string>();
        if (std::filesystem::path(dump).is_relative())
            dump = (std::filesystem::path(path).parent_path() / dump).string();
        CoefficientField A = read_coefficient_dump(dump);
        if (A.grid.n != n || A.grid.L != L) throw InputError(path + ": dump grid does not match the configuration");
        return interpolant_coefficient(A);
    }
    throw InputError(path + ": needs 'expressions' or 'dump'");
}

std::vector<CorpusMember> build_corpus(const ExperimentConfig& c) {
    const auto& cc = c.coefficients;
    std::vector<CorpusMember> out;
    if (cc.source == "expressions") {
        out.push_back({"expr-0", "expressions", 0, expression_coefficient(cc.expressions, c.n, c.L)});
        return out;
    }
    if (cc.source == "file") {
        out.push_back({"file-0", "file", 0, load_coefficient_file(cc.file, c.n, c.L)});
        return out;
    }
    std::uint64_t index = 0;
    for (const auto& kind : cc.kinds) {
        for (int i = 0; i < cc.count; ++i, ++index) {
            FamilySpec spec;
            spec.kind = family_kind_from_string(kind);
            spec.lambda_floor = cc.lambda_floor;
            spec.Lambda_cap = cc.Lambda_cap;
            spec.amplitude = cc.amplitude;
            spec.max_mode = cc.max_mode;
            spec.dyadic_level = cc.dyadic_level;
            spec.piecewise = cc.piecewise;
            spec.seed = item_seed(c.seed, index);
            std::ostringstream id;
            id << kind << "-" << i;
            out.push_back({id.str(), kind, spec.seed, make_continuum(spec, c.n, c.L)});
        }
    }
    return out;
}

}  // namespace dblab
