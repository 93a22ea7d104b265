#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "dblab/field_io.hpp"
#include "dblab/parallel.hpp"
#include "dblab/runner.hpp"
#include "oracles.hpp"

using namespace dblab;
namespace fs = std::filesystem;

namespace {

std::string temp_dir(const std::string& name) {
    fs::path p = fs::temp_directory_path() / ("dblab-test-" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p.string();
}

std::string slurp(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

ExperimentConfig from_json(const char* text) { return parse_config(ojson::parse(text)); }

}  // namespace

TEST(Config, RoundTripIsIdempotent) {
    for (auto s : {Subcommand::verify, Subcommand::solve, Subcommand::rellich, Subcommand::convergence,
                   Subcommand::norms}) {
        ExperimentConfig c = default_config(s);
        const std::string once = serialize(c);
        EXPECT_EQ(serialize(parse_config(ojson::parse(once))), once) << to_string(s);
    }
    ExperimentConfig c = from_json(R"J({"subcommand": "solve", "seed": "18446744073709551615",
        "data": {"problem": "dirichlet", "expressions": ["cos(x1)"]}, "output": {"format": "json"}})J");
    EXPECT_EQ(c.seed, 18446744073709551615ull);
    EXPECT_EQ(serialize(parse_config(to_json(c))), serialize(c));
}

TEST(Config, StrictParsing) {
    EXPECT_THROW(from_json(R"J({"subcommand": "verify", "bogus": 1})J"), InputError);
    EXPECT_THROW(from_json(R"J({"grid": {"N": "64"}})J"), InputError);
    EXPECT_THROW(from_json(R"J({"grid": {"N": 48}})J"), InputError);
    EXPECT_THROW(from_json(R"J({"tolerances": {"made_up": 1.0}})J"), InputError);
    EXPECT_THROW(from_json(R"J({"coefficients": {"kinds": ["nonsense"]}})J"), InputError);
    EXPECT_THROW(from_json(R"J({"subcommand": "explode"})J"), InputError);
    EXPECT_THROW(from_json(R"J({"output": {"format": "xml"}})J"), InputError);
    EXPECT_THROW(from_json(R"J({"workers": 0})J"), InputError);
}

TEST(Csv, QuotingAndRoundTrip) {
    EXPECT_EQ(csv_quote("plain"), "plain");
    EXPECT_EQ(csv_quote("a,b"), "\"a,b\"");
    EXPECT_EQ(csv_quote("say \"hi\""), "\"say \"\"hi\"\"\"");
    EXPECT_EQ(format_double(0.1), "1.000000000e-01");
    EXPECT_EQ(format_double(-0.0), "0.000000000e+00");
    EXPECT_EQ(format_double(std::numeric_limits<double>::infinity()), "inf");
    EXPECT_EQ(format_double(std::nan("")), "nan");

    Table t({"key", "value", "note"});
    t.add_row({std::string("b"), 2.5, std::string("x,\"y\"\nz")});
    t.add_row({std::string("a"), std::int64_t(10), true});
    EXPECT_THROW(t.add_row({std::string("short")}), InputError);
    t.sort_by_key(1);
    std::ostringstream os;
    t.write_csv(os);
    auto rows = parse_csv(os.str());
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_EQ(rows[1][0], "a");
    EXPECT_EQ(rows[1][2], "true");
    EXPECT_EQ(rows[2][2], "x,\"y\"\nz");
    EXPECT_NE(os.str().find("\r\n"), std::string::npos);
    EXPECT_EQ(t.to_json()[0]["value"], 10);
}

TEST(Parallel, OrderAndErrors) {
    auto v = parallel_map<int>(50, 4, [](std::size_t i) { return int(i * i); });
    for (std::size_t i = 0; i < v.size(); ++i) EXPECT_EQ(v[i], int(i * i));
    EXPECT_THROW(parallel_map<int>(10, 3,
                                   [](std::size_t i) {
                                       if (i == 7) throw NumericalError("item 7");
                                       return 0;
                                   }),
                 NumericalError);
}

TEST(FieldIo, DumpRoundTrip) {
    const std::string dir = temp_dir("io");
    GridSpec g{2, 8};
    Vec f = oracle::sample(g, [](double a, double b) { return cplx(std::cos(a), std::sin(b)); });
    write_scalar_field(dir + "/f.json", g, f, "datum");
    EXPECT_EQ((read_scalar_field(dir + "/f.json", g) - f).norm(), 0.0);
    EXPECT_THROW(read_scalar_field(dir + "/f.json", GridSpec{2, 16}), InputError);
    BoundaryField F = BoundaryField::zeros(g);
    F.comp[1] = f;
    write_boundary_field(dir + "/F.json", F);
    BoundaryField G = read_boundary_field(dir + "/F.json");
    EXPECT_EQ((G.to_physical().comp[1] - f).norm(), 0.0);
}

TEST(Verify, DeterministicAcrossWorkers) {
    ExperimentConfig c = default_config(Subcommand::verify);
    c.N = 16;
    c.format = ReportFormat::json;
    std::string reports[2];
    for (int k = 0; k < 2; ++k) {
        c.workers = k == 0 ? 1 : 3;
        c.out_dir = temp_dir("verify-" + std::to_string(k));
        RunResult r = run_verify(c);
        EXPECT_EQ(r.code, ExitCode::ok);
        reports[k] = slurp(write_report(c, r));
    }
    EXPECT_EQ(reports[0], reports[1]);
}

TEST(Verify, MinimalGridUsesLooserTolerances) {
    ExperimentConfig c = default_config(Subcommand::verify);
    c.N = 8;
    c.out_dir = temp_dir("verify8");
    EXPECT_EQ(verify_tolerances(c).at("identity"), 1e-6);
    RunResult r = run_verify(c);
    EXPECT_EQ(r.code, ExitCode::ok);
    EXPECT_TRUE(r.summary["pass"].get<bool>());
}

TEST(Verify, NonAccretiveCoefficientIsAConfigError) {
    ExperimentConfig c = from_json(
        R"J({"subcommand": "verify", "grid": {"N": 16}, "coefficients": {"source": "expressions",
            "expressions": [["-1", "0"], ["0", "1"]]}})J");
    c.out_dir = temp_dir("verify-bad");
    try {
        run_verify(c);
        FAIL() << "expected rejection";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ExitCode::config);
    }
}

TEST(Solve, NeumannPoissonAgainstOracle) {
    ExperimentConfig c = from_json(
        R"J({"subcommand": "solve", "grid": {"N": 32}, "coefficients": {"source": "expressions",
            "expressions": [["1", "0"], ["0", "1"]]}, "data": {"problem": "neumann", "expressions": ["cos(x1)"]},
            "solve": {"oracle": true}})J");
    c.out_dir = temp_dir("solve");
    RunResult r = run_solve(c);
    EXPECT_EQ(r.code, ExitCode::ok);
    double delta = -1.0;
    for (const auto& row : r.table.rows())
        if (std::get<std::string>(row[0]) == "oracle_delta") delta = std::get<double>(row[1]);
    EXPECT_GE(delta, 0.0);
    EXPECT_LE(delta, 5e-2);
    EXPECT_EQ(r.written.size(), 4u);
    for (const auto& p : r.written) EXPECT_TRUE(fs::exists(p)) << p;
}

TEST(Solve, DirichletConstantDatum) {
    ExperimentConfig c = from_json(
        R"J({"subcommand": "solve", "grid": {"N": 16}, "data": {"problem": "dirichlet", "expressions": ["2"]},
            "solve": {"dumps": false}})J");
    c.out_dir = temp_dir("solve-const");
    RunResult r = run_solve(c);
    EXPECT_EQ(r.code, ExitCode::ok);
    for (const auto& row : r.table.rows()) {
        const auto& k = std::get<std::string>(row[0]);
        if (k == "trace_l2" || k == "square_function") EXPECT_EQ(std::get<double>(row[1]), 0.0) << k;
        if (k == "gauge_re") EXPECT_NEAR(std::get<double>(row[1]), 2.0, 1e-14);
    }
}

TEST(Solve, RegularityWithCurlIsRejected) {
    ExperimentConfig c = from_json(
        R"J({"subcommand": "solve", "grid": {"n": 2, "N": 8}, "coefficients": {"kinds": ["upper_triangular_random"]},
            "data": {"problem": "regularity", "expressions": ["sin(x2)", "0"]}, "solve": {"dumps": false}})J");
    EXPECT_THROW(run_solve(c), InputError);
}

TEST(Solve, BlockClassRefusalIsVerbatim) {
    ExperimentConfig c = from_json(
        R"J({"subcommand": "solve", "grid": {"N": 16}, "data": {"problem": "regularity"}, "solve": {"dumps": false}})J");
    try {
        run_solve(c);
        FAIL() << "expected refusal";
    } catch (const InputError& e) {
        EXPECT_NE(std::string(e.what()).find("lower_triangular"), std::string::npos);
    }
}

TEST(Rellich, IdentityCorpusIsIsometric) {
    ExperimentConfig c = from_json(
        R"J({"subcommand": "rellich", "coefficients": {"source": "expressions",
            "expressions": [["1", "0"], ["0", "1"]]}, "sweep": {"grids": [16, 32]}})J");
    RunResult r = run_rellich(c);
    ASSERT_EQ(r.table.rows().size(), 2u);
    for (const auto& row : r.table.rows()) {
        EXPECT_NEAR(std::get<double>(row[4]), 1.0, 1e-8);
        EXPECT_NEAR(std::get<double>(row[5]), 1.0, 1e-8);
        EXPECT_EQ(std::get<std::string>(row[12]), "ok");
    }
}

TEST(Rellich, RowsIndependentOfWorkers) {
    ExperimentConfig c = default_config(Subcommand::rellich);
    c.coefficients.count = 1;
    c.sweep.grids = {16, 32};
    std::ostringstream a, b;
    c.workers = 1;
    run_rellich(c).table.write_csv(a);
    c.workers = 4;
    run_rellich(c).table.write_csv(b);
    EXPECT_EQ(a.str(), b.str());
}

TEST(Convergence, ErrorsDecrease) {
    ExperimentConfig c = default_config(Subcommand::convergence);
    c.coefficients.count = 1;
    c.sweep.grids = {16, 32};
    RunResult r = run_convergence(c);
    EXPECT_EQ(r.code, ExitCode::ok);
    ASSERT_EQ(r.table.rows().size(), 2u);
    EXPECT_LT(std::get<double>(r.table.rows()[1][3]), std::get<double>(r.table.rows()[0][3]));
}
