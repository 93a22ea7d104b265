#include "dblab/runner.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dblab/boundary_maps.hpp"
#include "dblab/expression.hpp"
#include "dblab/fd_oracle.hpp"
#include "dblab/field_io.hpp"
#include "dblab/field_norms.hpp"
#include "dblab/linalg.hpp"
#include "dblab/parallel.hpp"
#include "dblab/random_fields.hpp"
#include "dblab/solvers.hpp"

namespace dblab {
namespace fs = std::filesystem;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::int64_t i64(long long v) { return std::int64_t(v); }

double median(std::vector<double> v) {
    if (v.empty()) return std::nan("");
    std::sort(v.begin(), v.end());
    const std::size_t k = v.size() / 2;
    return v.size() % 2 ? v[k] : 0.5 * (v[k - 1] + v[k]);
}

void ensure_dir(const std::string& d) {
    std::error_code ec;
    fs::create_directories(d, ec);
    if (ec) throw InputError("cannot create output directory " + d + ": " + ec.message());
}

// Boundary datum of the configured problem as a physical scalar field.
Vec scalar_datum(const ExperimentConfig& c, const GridSpec& g) {
    const auto& d = c.data;
    if (!d.file.empty()) return read_scalar_field(d.file, g);
    if (!d.expressions.empty()) {
        if (d.expressions.size() != 1) throw InputError("data.expressions: expected one scalar expression");
        return parse_coefficient_expr(d.expressions[0], g);
    }
    const std::uint64_t seed = d.seed ? d.seed : item_seed(c.seed, 0xda7a);
    return random_scalar_field(g, seed);
}

struct VerifyItem {
    std::vector<std::vector<Cell>> rows;
    std::vector<std::string> failed;
};

}  // namespace

double strip_relative_error(const GridSpec& g, const std::vector<std::vector<Vec>>& a,
                            const std::vector<std::vector<Vec>>& b, const std::vector<double>& w) {
    if (a.size() != b.size() || a.size() != w.size()) throw InputError("strip_relative_error: level mismatch");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].size() != b[i].size()) throw InputError("strip_relative_error: component mismatch");
        for (std::size_t k = 0; k < a[i].size(); ++k) {
            num += w[i] * std::pow(l2_norm(g, a[i][k] - b[i][k]), 2);
            den += w[i] * std::pow(l2_norm(g, b[i][k]), 2);
        }
    }
    return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

std::map<std::string, double> verify_tolerances(const ExperimentConfig& c) {
    auto t = c.tolerances;
    if (c.N < 16) {
        t["identity"] *= 100.0;
        t["newton"] *= 10.0;
        t["factorization"] *= 10.0;
        t["inverse"] *= 10.0;
        t["graph"] *= 10.0;
        t["key_lemma_floor"] /= 10.0;
    }
    return t;
}

RunResult run_verify(const ExperimentConfig& c) {
    const GridSpec g = c.grid();
    const auto tol = verify_tolerances(c);
    std::vector<CorpusMember> corpus = build_corpus(c);
    const Mat S = assemble_S(g).m;
    const double nS = linalg::norm2(S);

    auto items = parallel_map<VerifyItem>(corpus.size(), c.workers, [&](std::size_t i) {
        const CorpusMember& mem = corpus[i];
        VerifyItem it;
        auto add = [&](const std::string& suite, double measured, double bound, bool pass) {
            it.rows.push_back({mem.id, mem.kind, suite, measured, bound, pass});
            if (!pass) it.failed.push_back(suite);
        };
        CoefficientField A = mem.coeff.sample(g);
        add("accretivity", A.lambda, 0.0, A.lambda > 0.0);

        CoefficientField hh = hat_transform(hat_transform(A));
        const double dh = max_abs_difference(hh, A);
        const bool cls = classify(hat_transform(A)) == A.block_class && hh.block_class == A.block_class;
        add("hat_involution", dh, tol.at("hat"), dh <= tol.at("hat") && cls);

        OperatorSet ops = build_operators(A);
        FunctionalCalculus calc(ops.uT.m);
        const Mat& sg = calc.sign();
        const Eigen::Index d = sg.rows();
        const Mat I = Mat::Identity(d, d);
        const double e_sgn = linalg::norm2(sg * sg - I);
        add("sgn_involution", e_sgn, tol.at("identity"), e_sgn <= tol.at("identity"));

        const Mat pp = calc.p_plus(), pm = calc.p_minus();
        const double e_proj = std::max({linalg::norm2(pp + pm - I), linalg::norm2(pp * pp - pp),
                                        linalg::norm2(pm * pm - pm)});
        add("projectors", e_proj, tol.at("identity"), e_proj <= tol.at("identity"));

        const double nB = linalg::norm2(ops.calB.m), nuT = linalg::norm2(ops.uT.m);
        const double e_int = std::max(linalg::norm2(ops.uT.m * S - S * ops.T.m) / (nuT * nS),
                                      linalg::norm2(ops.calB.m * ops.uT.m - ops.T.m * ops.calB.m) / (nB * nuT));
        add("intertwining", e_int, tol.at("identity"), e_int <= tol.at("identity"));

        NewtonReport nr;
        const Mat sn = matrix_sign_newton(ops.uT.m, {}, &nr);
        const double e_newton = linalg::norm2(sn - sg);
        add("newton_vs_eigen", e_newton, tol.at("newton"), nr.converged && e_newton <= tol.at("newton"));

        SgnBlocks blocks = sgn_blocks(g, sg);
        MapResult nd = gamma_nd(blocks, -0.5), dn = gamma_dn(blocks, -0.5);
        const double e_fact = (nd.invertible && dn.invertible)
                                  ? std::max(nd.factorization_mismatch, dn.factorization_mismatch)
                                  : kInf;
        add("factorization", e_fact, tol.at("factorization"), e_fact <= tol.at("factorization"));

        const double e_inv = (nd.invertible && dn.invertible)
                                 ? weighted_norm(g, dn.map * nd.map - Mat::Identity(d / 2, d / 2), -0.5)
                                 : kInf;
        add("inverse_relation", e_inv, tol.at("inverse"), e_inv <= tol.at("inverse"));

        KeyLemmaReport kl = key_lemma_check(g, sg, -0.5, tol.at("key_lemma_floor"));
        add("key_lemma", kl.min_sv, tol.at("key_lemma_floor"), kl.ok);

        const double e_graph =
            nd.invertible ? graph_residual(g, sg, nd.map, 0.0, 8, item_seed(mem.seed, 17)) : kInf;
        add("graph", e_graph, tol.at("graph"), e_graph <= tol.at("graph"));

        KatoStats ks = kato_check(A, 16, item_seed(mem.seed, 23));
        add("kato_min_ratio", ks.min_ratio, 0.0, ks.min_ratio > 0.0 && std::isfinite(ks.max_ratio));
        add("kato_max_ratio", ks.max_ratio, 0.0, ks.min_ratio > 0.0 && std::isfinite(ks.max_ratio));

        if (!it.failed.empty()) {
            const std::string dir = (fs::path(c.out_dir) / "failures").string();
            ensure_dir(dir);
            ojson j;
            j["member"] = mem.id;
            j["kind"] = mem.kind;
            j["seed"] = mem.seed;
            j["grid"] = {{"n", g.n}, {"N", g.N}, {"L", g.L}};
            j["failed_suites"] = it.failed;
            j["coefficient_dump"] = mem.id + ".coef.json";
            std::ofstream(dir + "/" + mem.id + ".json") << j.dump(2) << "\n";
            write_coefficient_dump(dir + "/" + mem.id + ".coef.json", A);
        }
        return it;
    });

    RunResult r;
    r.table = Table({"coefficient", "kind", "suite", "measured", "tolerance", "pass"});
    std::int64_t failures = 0;
    for (auto& it : items) {
        for (auto& row : it.rows) r.table.add_row(std::move(row));
        failures += std::int64_t(it.failed.size());
    }
    r.table.sort_by_key(3);
    r.summary["members"] = corpus.size();
    r.summary["checks"] = r.table.rows().size();
    r.summary["failures"] = failures;
    ojson t = ojson::object();
    for (const auto& [k, v] : tol) t[k] = v;
    r.summary["applied_tolerances"] = t;
    r.summary["pass"] = failures == 0;
    if (failures) r.code = ExitCode::verification;
    return r;
}

RunResult run_solve(const ExperimentConfig& c) {
    const GridSpec g = c.grid();
    std::vector<CorpusMember> corpus = build_corpus(c);
    const CorpusMember& mem = corpus.front();
    CoefficientField A = mem.coeff.sample(g);
    auto ctx = make_context(A);
    SolveOptions so;
    so.force = c.force;
    so.cond_limit = 1e8;

    const std::string& prob = c.data.problem;
    Vec datum;  // scalar datum (potential for regularity problems when available)
    SolutionHandle h;
    if (prob == "regularity") {
        std::vector<Vec> gpar;
        if (c.data.expressions.size() == std::size_t(g.n) && g.n > 1) {
            for (const auto& e : c.data.expressions) gpar.push_back(parse_coefficient_expr(e, g));
        } else if (c.data.expressions.size() == 1 && g.n == 1 && c.data.file.empty()) {
            gpar.push_back(parse_coefficient_expr(c.data.expressions[0], g));
        } else {
            datum = scalar_datum(c, g);
            gpar = gradient(g, datum);
        }
        h = solve_regularity_l2(ctx, gpar, so);
    } else {
        datum = scalar_datum(c, g);
        if (prob == "neumann")
            h = solve_neumann_l2(ctx, datum, so);
        else if (prob == "dirichlet")
            h = solve_dirichlet_l2(ctx, datum, so);
        else if (prob == "energy_neumann")
            h = solve_energy(ctx, EnergyDatum::neumann, datum, so);
        else
            h = solve_energy(ctx, EnergyDatum::dirichlet, datum, so);
    }

    RunResult r;
    r.table = Table({"quantity", "value"});
    auto put = [&](const std::string& k, Cell v) { r.table.add_row({k, std::move(v)}); };
    put("coefficient", mem.id);
    put("problem", prob);
    put("block_class", to_string(A.block_class));
    put("lambda", A.lambda);
    put("Lambda", A.Lambda);
    put("exploratory", h.exploratory);
    put("trace_l2", h.trace.norm());
    put("trace_ratio", h.trace_ratio);
    put("p_minus_residual", h.p_minus_residual);
    put("system_cond", h.system_cond);
    bool ok = true;
    if (prob == "dirichlet") {
        put("datum_error", h.datum_error);
        put("gauge_re", h.gauge.real());
        put("gauge_im", h.gauge.imag());
        ok = ok && h.datum_error <= c.tol("dirichlet_trace");
    }

    // Rough data keep a visible share of the energy below h/4, so the strip
    // grid starts lower than the default one.
    const std::vector<double> tg = log_t_grid(g.h() / 64.0, 16.0 * g.L, c.solve.t_levels);
    StripField field = evaluate(h, tg);
    Residuals res = residual_check(field, A);
    put("residual_first_order", res.first_order);
    put("residual_curl", res.curl);
    auto try_norm = [&](const std::string& name, auto&& fn) {
        try {
            put(name, fn());
        } catch (const InputError& e) {
            warn(name + ": " + e.what());
            put(name, std::nan(""));
        }
    };
    const bool zero = h.trace.norm() == 0.0;
    if (zero) {
        put("square_function", 0.0);
        put("energy", 0.0);
        put("nontangential_grad", 0.0);
    } else {
        try_norm("square_function", [&] { return square_function_norm(field); });
        try_norm("energy", [&] { return energy_norm(field); });
        try_norm("nontangential_grad", [&] { return nontangential_norm(field, FieldPart::gradient); });
    }

    if (c.solve.oracle && !zero) {
        const StripMesh mesh = StripMesh::graded(g, c.solve.oracle_M_factor * g.N, c.solve.T_over_L);
        OracleOptions oo;
        oo.scheme = c.solve.scheme;
        OracleSolution sol;
        if (prob == "neumann" || prob == "energy_neumann") {
            Vec ell = -(datum.array() - mean(datum)).matrix();
            sol = energy_solve_neumann(A, ell, mesh, oo);
        } else {
            Vec f;
            const Eigen::Index m = Eigen::Index(g.modes());
            if (prob == "dirichlet") {
                f = datum.array() - mean(datum);
            } else {
                // Potential of the tangential trace: u_hat = -q / |xi|.
                RVec ax = mode_abs_xi(g);
                f = modes_to_scalar(g, Vec(-h.trace.tail(m).cwiseQuotient(ax.cast<cplx>())));
            }
            sol = energy_solve_regularity(A, f, mesh, oo);
        }
        StripField at_mid = evaluate(h, mesh.midpoints());
        const double delta = strip_relative_error(g, oracle_gradient(sol), at_mid.grad, mesh.widths());
        put("oracle_M", i64(mesh.M));
        put("oracle_scheme", to_string(oo.scheme));
        put("oracle_delta", delta);
        ok = ok && delta <= c.tol("oracle");
    }

    if (c.solve.dumps) {
        ensure_dir(c.out_dir);
        const std::string base = (fs::path(c.out_dir) / "solve").string();
        BoundaryField tr = from_vcoords(g, h.trace);
        write_boundary_field(base + "_trace.json", tr);
        r.written.push_back(base + "_trace.json");
        for (const char* part : {"u", "grad", "conormal"}) {
            const std::string p = base + "_" + part + ".json";
            write_strip_field(p, field, part);
            r.written.push_back(p);
        }
    }
    r.summary["coefficient"] = mem.id;
    r.summary["problem"] = prob;
    r.summary["pass"] = ok;
    if (!ok) r.code = ExitCode::verification;
    return r;
}

RunResult run_rellich(const ExperimentConfig& c) {
    std::vector<CorpusMember> corpus = build_corpus(c);
    std::vector<int> grids = c.sweep.grids.empty() ? std::vector<int>{c.N} : c.sweep.grids;
    struct Item {
        bool ok = false;
        std::string error;
        RellichResult res;
    };
    const std::size_t count = corpus.size() * grids.size();
    auto items = parallel_map<Item>(count, c.workers, [&](std::size_t k) {
        Item it;
        const CorpusMember& mem = corpus[k / grids.size()];
        const GridSpec g{c.n, grids[k % grids.size()], c.L};
        try {
            it.res = rellich_constant(mem.coeff.sample(g));
            it.ok = true;
        } catch (const Error& e) {
            it.error = e.what();
            warn("rellich " + mem.id + " N=" + std::to_string(g.N) + ": " + e.what());
        }
        return it;
    });
    RunResult r;
    r.table = Table({"coefficient", "N", "kind", "seed", "forward", "inverse", "forward_bounded", "inverse_bounded",
                     "graph_residual", "factorization_mismatch", "drift_forward", "drift_inverse", "status"});
    std::int64_t failed = 0;
    double worst_drift = 0.0;
    for (std::size_t mi = 0; mi < corpus.size(); ++mi) {
        const Item& first = items[mi * grids.size()];
        for (std::size_t gi = 0; gi < grids.size(); ++gi) {
            const Item& it = items[mi * grids.size() + gi];
            const auto& mem = corpus[mi];
            if (!it.ok) {
                ++failed;
                r.table.add_row({mem.id, i64(grids[gi]), mem.kind, std::to_string(mem.seed), std::nan(""),
                                 std::nan(""), false, false, std::nan(""), std::nan(""), std::nan(""), std::nan(""),
                                 "error: " + it.error});
                continue;
            }
            auto drift = [&](double v, double v0) {
                return (first.ok && std::isfinite(v) && std::isfinite(v0) && v0 > 0.0) ? std::abs(v - v0) / v0
                                                                                         : std::nan("");
            };
            const double df = drift(it.res.forward, first.res.forward);
            const double di = drift(it.res.inverse, first.res.inverse);
            if (std::isfinite(df)) worst_drift = std::max(worst_drift, df);
            r.table.add_row({mem.id, i64(grids[gi]), mem.kind, std::to_string(mem.seed), it.res.forward,
                             it.res.inverse, it.res.forward_bounded, it.res.inverse_bounded, it.res.graph_residual,
                             it.res.factorization_mismatch, df, di, "ok"});
        }
    }
    r.table.sort_by_key(2);
    r.summary["rows"] = r.table.rows().size();
    r.summary["failed_rows"] = failed;
    r.summary["max_forward_drift"] = worst_drift;
    return r;
}

RunResult run_convergence(const ExperimentConfig& c) {
    std::vector<CorpusMember> corpus = build_corpus(c);
    std::vector<int> grids = c.sweep.grids.empty() ? std::vector<int>{c.N} : c.sweep.grids;
    std::sort(grids.begin(), grids.end());
    struct Item {
        double err = std::nan("");
        int M = 0;
        std::string error;
    };
    const std::size_t count = corpus.size() * grids.size();
    auto items = parallel_map<Item>(count, c.workers, [&](std::size_t k) {
        Item it;
        const CorpusMember& mem = corpus[k / grids.size()];
        const GridSpec g{c.n, grids[k % grids.size()], c.L};
        try {
            CoefficientField A = mem.coeff.sample(g);
            OperatorSet ops = build_operators(A);
            FunctionalCalculus calc(ops.uT.m);
            MapResult nd = gamma_nd(sgn_blocks(g, calc.sign()), -0.5);
            if (!nd.invertible) throw NumericalError("spectral Gamma_ND not invertible at s = -1/2");
            const StripMesh mesh = StripMesh::graded(g, c.sweep.oracle_M_factor * g.N, c.sweep.T_over_L);
            OracleOptions oo;
            oo.scheme = c.sweep.scheme;
            Mat gv = gamma_nd_variational(A, mesh, oo);
            it.M = mesh.M;
            it.err = weighted_norm(g, gv - nd.map, -0.5) / weighted_norm(g, nd.map, -0.5);
        } catch (const Error& e) {
            it.error = e.what();
            warn("convergence " + mem.id + " N=" + std::to_string(g.N) + ": " + e.what());
        }
        return it;
    });
    RunResult r;
    r.table = Table({"coefficient", "N", "M", "rel_error", "order", "status"});
    bool pass = true;
    for (std::size_t mi = 0; mi < corpus.size(); ++mi) {
        for (std::size_t gi = 0; gi < grids.size(); ++gi) {
            const Item& it = items[mi * grids.size() + gi];
            double order = std::nan("");
            if (gi > 0) {
                const Item& prev = items[mi * grids.size() + gi - 1];
                order = std::log(prev.err / it.err) / std::log(double(grids[gi]) / grids[gi - 1]);
                if (!(order >= 1.0)) pass = false;
            }
            if (!it.error.empty()) pass = false;
            if (gi + 1 == grids.size() && !(it.err <= c.tol("oracle"))) pass = false;
            r.table.add_row({corpus[mi].id, i64(grids[gi]), i64(it.M), it.err, order,
                             it.error.empty() ? std::string("ok") : "error: " + it.error});
        }
    }
    r.table.sort_by_key(2);
    r.summary["pass"] = pass;
    r.summary["scheme"] = to_string(c.sweep.scheme);
    if (!pass) r.code = ExitCode::verification;
    return r;
}

RunResult run_norms(const ExperimentConfig& c) {
    std::vector<CorpusMember> corpus = build_corpus(c);
    std::vector<int> grids = c.sweep.grids.empty() ? std::vector<int>{c.N} : c.sweep.grids;
    std::sort(grids.begin(), grids.end());
    const WhitneyParams wp{c.sweep.c0, c.sweep.c1};
    struct Item {
        std::vector<double> nt, sq;  // per sample ratios
        std::string error;
    };
    const std::size_t count = corpus.size() * grids.size();
    auto items = parallel_map<Item>(count, c.workers, [&](std::size_t k) {
        Item it;
        const CorpusMember& mem = corpus[k / grids.size()];
        const GridSpec g{c.n, grids[k % grids.size()], c.L};
        try {
            auto ctx = make_context(mem.coeff.sample(g));
            SolveOptions so;
            so.force = c.force;
            const std::vector<double> tg = default_t_grid(g, c.sweep.t_levels);
            for (int s = 0; s < c.sweep.samples; ++s) {
                Vec f = random_scalar_field(g, item_seed(c.seed, 0x5a3e + std::uint64_t(s)));
                SolutionHandle hn = solve_neumann_l2(ctx, f, so);
                StripField fn = evaluate(hn, tg);
                it.nt.push_back(hn.trace.norm() / nontangential_norm(fn, FieldPart::gradient, wp));
                SolutionHandle hd = solve_dirichlet_l2(ctx, f, so);
                StripField fd = evaluate(hd, tg);
                it.sq.push_back(hd.trace.norm() / square_function_norm(fd));
            }
        } catch (const Error& e) {
            it.error = e.what();
            warn("norms " + mem.id + " N=" + std::to_string(g.N) + ": " + e.what());
        }
        return it;
    });
    RunResult r;
    r.table = Table({"coefficient", "pair", "N", "min", "median", "max", "drift", "status"});
    double worst = 0.0;
    for (std::size_t mi = 0; mi < corpus.size(); ++mi) {
        for (int pair = 0; pair < 2; ++pair) {
            double prev_med = std::nan("");
            for (std::size_t gi = 0; gi < grids.size(); ++gi) {
                const Item& it = items[mi * grids.size() + gi];
                const auto& v = pair == 0 ? it.nt : it.sq;
                const double med = median(v);
                const double drift = std::isfinite(prev_med) ? std::abs(med - prev_med) / prev_med : std::nan("");
                if (std::isfinite(drift)) worst = std::max(worst, drift);
                const double lo = v.empty() ? std::nan("") : *std::min_element(v.begin(), v.end());
                const double hi = v.empty() ? std::nan("") : *std::max_element(v.begin(), v.end());
                r.table.add_row({corpus[mi].id, std::string(pair == 0 ? "H0/Ntilde" : "H0tilde/square"),
                                 i64(grids[gi]), lo, med, hi, drift,
                                 it.error.empty() ? std::string("ok") : "error: " + it.error});
                prev_med = med;
            }
        }
    }
    r.table.sort_by_key(3);
    r.summary["max_drift"] = worst;
    r.summary["pass"] = worst <= c.tol("drift");
    if (!(worst <= c.tol("drift"))) r.code = ExitCode::verification;
    return r;
}

RunResult run(const ExperimentConfig& c) {
    switch (c.subcommand) {
        case Subcommand::verify: return run_verify(c);
        case Subcommand::solve: return run_solve(c);
        case Subcommand::rellich: return run_rellich(c);
        case Subcommand::convergence: return run_convergence(c);
        case Subcommand::norms: return run_norms(c);
    }
    throw InputError("unknown subcommand");
}

std::string write_report(const ExperimentConfig& c, const RunResult& r) {
    ensure_dir(c.out_dir);
    const std::string name = to_string(c.subcommand);
    const bool csv = c.format == ReportFormat::csv;
    const std::string path = (fs::path(c.out_dir) / (name + (csv ? ".csv" : ".json"))).string();
    std::ofstream os(path, std::ios::binary);
    if (!os) throw InputError("cannot write " + path);
    if (csv) {
        r.table.write_csv(os);
    } else {
        ojson cfg = to_json(c);
        cfg.erase("workers");
        cfg.erase("output");
        ojson j;
        j["subcommand"] = name;
        j["config"] = cfg;
        j["summary"] = r.summary;
        j["rows"] = r.table.to_json();
        os << j.dump(2) << "\n";
    }
    return path;
}

}  // namespace dblab
