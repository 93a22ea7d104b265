#include "dblab/solvers.hpp"

#include <cmath>
#include <sstream>

#include "dblab/field_io.hpp"
#include "dblab/linalg.hpp"

namespace dblab {
namespace {

Vec strip_mean(const Vec& f, const char* what) {
    const cplx mu = mean(f);
    if (std::abs(mu) > 1e-12 * std::max(1.0, f.cwiseAbs().maxCoeff())) {
        warn(std::string(what) + ": datum mean removed");
    }
    return f.array() - mu;
}

void require_class(const CoefficientField& A, bool ok, const char* what, const SolveOptions& o, bool& exploratory) {
    if (ok) return;
    if (!o.force) {
        throw InputError(std::string(what) + ": coefficient block class '" + to_string(A.block_class) +
                         "' is not covered; pass force to run anyway");
    }
    exploratory = true;
    warn(std::string(what) + ": forced run outside the covered block class; output is exploratory");
}

double p_minus_residual(const FunctionalCalculus& calc, const Vec& h) {
    const double nh = h.norm();
    if (nh == 0.0) return 0.0;
    return (0.5 * (h - calc.sign() * h)).norm() / nh;
}

}  // namespace

void StripField::validate() const {
    grid.validate();
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        if (!std::isfinite(t_grid[i]) || t_grid[i] < 0.0) throw InputError("strip field: invalid t level");
        if (i > 0 && !(t_grid[i] > t_grid[i - 1])) throw InputError("strip field: t grid must be increasing");
    }
    auto check = [&](const std::vector<std::vector<Vec>>& v) {
        if (v.size() != t_grid.size()) throw InputError("strip field: level count mismatch");
        for (const auto& lvl : v)
            for (const auto& c : lvl)
                if (!c.allFinite()) throw NumericalError("strip field: non-finite values");
    };
    if (has_grad) check(grad);
    if (has_conormal) check(conormal);
    if (has_u && u.size() != t_grid.size()) throw InputError("strip field: level count mismatch");
}

std::vector<double> log_t_grid(double t_min, double t_max, int levels) {
    if (!(t_min > 0.0) || !(t_max > t_min) || levels < 2) throw InputError("log_t_grid: invalid range");
    std::vector<double> t(static_cast<std::size_t>(levels));
    const double a = std::log(t_min), b = std::log(t_max);
    for (int i = 0; i < levels; ++i) t[std::size_t(i)] = std::exp(a + (b - a) * i / double(levels - 1));
    return t;
}

std::vector<double> default_t_grid(const GridSpec& g, int levels) {
    return log_t_grid(g.h() / 4.0, 16.0 * g.L, levels);
}

SolverContext::SolverContext(const CoefficientField& A, const CalculusOptions& opt) : opt_(opt) {
    accretivity_bound(A);
    ops_ = build_operators(A);
}

const FunctionalCalculus& SolverContext::uT() const {
    std::call_once(uT_once_, [this] { uT_ = std::make_unique<FunctionalCalculus>(ops_.uT.m, opt_); });
    return *uT_;
}

const FunctionalCalculus& SolverContext::T() const {
    std::call_once(T_once_, [this] { T_ = std::make_unique<FunctionalCalculus>(ops_.T.m, opt_); });
    return *T_;
}

const SgnBlocks& SolverContext::uT_blocks() const {
    std::call_once(blocks_once_,
                   [this] { blocks_ = std::make_unique<SgnBlocks>(sgn_blocks(ops_.grid, uT().sign())); });
    return *blocks_;
}

std::string to_string(SolutionKind k) {
    switch (k) {
        case SolutionKind::l2_neumann: return "l2_neumann";
        case SolutionKind::l2_regularity: return "l2_regularity";
        case SolutionKind::l2_dirichlet: return "l2_dirichlet";
        case SolutionKind::energy_neumann: return "energy_neumann";
        case SolutionKind::energy_regularity: return "energy_regularity";
    }
    return "l2_neumann";
}

namespace {

SolutionHandle neumann_like(std::shared_ptr<const SolverContext> ctx, const Vec& f, double s, SolutionKind kind,
                            bool exploratory, const SolveOptions& o) {
    const GridSpec& g = ctx->grid();
    const std::size_t m = g.modes();
    SolutionHandle h;
    h.kind = kind;
    h.ctx = ctx;
    h.exploratory = exploratory;
    Vec fm = scalar_to_modes(g, strip_mean(f, "neumann solve"));
    MapResult nd = gamma_nd(ctx->uT_blocks(), s);
    if (!nd.invertible) {
        std::ostringstream os;
        os << "Neumann-to-Dirichlet block not invertible in the s = " << s << " topology (min singular value "
           << nd.min_sv << ")";
        throw NumericalError(os.str());
    }
    h.system_cond = 1.0 / nd.min_sv;
    h.trace.resize(Eigen::Index(2 * m));
    h.trace.head(Eigen::Index(m)) = fm;
    h.trace.tail(Eigen::Index(m)) = nd.map * fm;
    h.trace_ratio = fm.norm() > 0.0 ? h.trace.norm() / fm.norm() : 0.0;
    h.p_minus_residual = p_minus_residual(ctx->uT(), h.trace);
    if (h.p_minus_residual > o.p_minus_tol) warn("neumann solve: trace has a large negative spectral component");
    return h;
}

SolutionHandle regularity_like(std::shared_ptr<const SolverContext> ctx, const Vec& q, double s, SolutionKind kind,
                               bool exploratory, const SolveOptions& o) {
    const std::size_t m = ctx->grid().modes();
    SolutionHandle h;
    h.kind = kind;
    h.ctx = ctx;
    h.exploratory = exploratory;
    MapResult dn = gamma_dn(ctx->uT_blocks(), s);
    if (!dn.invertible) {
        std::ostringstream os;
        os << "Dirichlet-to-Neumann block not invertible in the s = " << s << " topology (min singular value "
           << dn.min_sv << ")";
        throw NumericalError(os.str());
    }
    h.system_cond = 1.0 / dn.min_sv;
    h.trace.resize(Eigen::Index(2 * m));
    h.trace.head(Eigen::Index(m)) = dn.map * q;
    h.trace.tail(Eigen::Index(m)) = q;
    h.trace_ratio = q.norm() > 0.0 ? h.trace.norm() / q.norm() : 0.0;
    h.p_minus_residual = p_minus_residual(ctx->uT(), h.trace);
    if (h.p_minus_residual > o.p_minus_tol) warn("regularity solve: trace has a large negative spectral component");
    return h;
}

}  // namespace

SolutionHandle solve_neumann_l2(std::shared_ptr<const SolverContext> ctx, const Vec& f, const SolveOptions& o) {
    const auto& A = ctx->ops().A;
    bool exploratory = false;
    require_class(A, A.block_class == BlockClass::lower_triangular || A.block_class == BlockClass::block_diagonal,
                  "solve_neumann_l2", o, exploratory);
    return neumann_like(ctx, f, 0.0, SolutionKind::l2_neumann, exploratory, o);
}

SolutionHandle solve_regularity_l2(std::shared_ptr<const SolverContext> ctx, const std::vector<Vec>& gpar,
                                   const SolveOptions& o) {
    const GridSpec& g = ctx->grid();
    const auto& A = ctx->ops().A;
    bool exploratory = false;
    require_class(A, A.block_class == BlockClass::upper_triangular || A.block_class == BlockClass::block_diagonal,
                  "solve_regularity_l2", o, exploratory);
    if (static_cast<int>(gpar.size()) != g.n) throw InputError("solve_regularity_l2: g must have n components");
    BoundaryField F = BoundaryField::zeros(g);
    double gn = 0.0;
    for (int l = 0; l < g.n; ++l) {
        F.comp[std::size_t(1 + l)] = gpar[std::size_t(l)];
        gn += std::pow(l2_norm(g, gpar[std::size_t(l)]), 2);
    }
    gn = std::sqrt(gn);
    if (curl_defect(F) > 1e-10 * std::max(gn, 1e-300)) throw InputError("solve_regularity_l2: g is not curl-free");
    for (int l = 0; l < g.n; ++l)
        if (std::abs(mean(gpar[std::size_t(l)])) > 1e-10 * std::max(1.0, gn))
            throw InputError("solve_regularity_l2: g is not a gradient (nonzero mean)");
    Vec q = to_vcoords(F).tail(Eigen::Index(g.modes()));
    return regularity_like(ctx, q, 0.0, SolutionKind::l2_regularity, exploratory, o);
}

SolutionHandle solve_dirichlet_l2(std::shared_ptr<const SolverContext> ctx, const Vec& u0, const SolveOptions& o) {
    const GridSpec& g = ctx->grid();
    const auto& A = ctx->ops().A;
    const Eigen::Index m = Eigen::Index(g.modes());
    SolutionHandle h;
    h.kind = SolutionKind::l2_dirichlet;
    h.ctx = ctx;
    require_class(A, A.block_class == BlockClass::lower_triangular || A.block_class == BlockClass::block_diagonal,
                  "solve_dirichlet_l2", o, h.exploratory);
    if (!u0.allFinite()) throw InputError("solve_dirichlet_l2: non-finite datum");
    h.gauge = mean(u0);
    Vec um = scalar_to_modes(g, Vec(u0.array() - h.gauge));
    h.trace = Vec::Zero(2 * m);
    if (um.norm() == 0.0) return h;

    // H~0 = [-u0; y] must lie in ran P+(T): P-(T)[:, par] y = P-(T)[:, perp] u0.
    const FunctionalCalculus& Tc = ctx->T();
    Mat pm = Tc.p_minus();
    Mat lhs = pm.rightCols(m);
    Vec rhs = pm.leftCols(m) * um;
    RVec sv = linalg::singular_values(lhs);
    h.system_cond = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1) : std::numeric_limits<double>::infinity();
    if (!(h.system_cond <= o.cond_limit)) {
        std::ostringstream os;
        os << "solve_dirichlet_l2: restricted system ill-conditioned (cond " << h.system_cond << ")";
        throw NumericalError(os.str());
    }
    Vec y = lhs.colPivHouseholderQr().solve(rhs);
    h.trace.head(m) = -um;
    h.trace.tail(m) = y;
    h.p_minus_residual = p_minus_residual(Tc, h.trace);
    h.trace_ratio = h.trace.norm() / um.norm();
    // u(0) = -(H~0)_perp + c; the perp slot is set from the datum, so the
    // boundary error is the round-off of that reconstruction.
    Vec u_trace = modes_to_scalar(g, -h.trace.head(m)).array() + h.gauge;
    h.datum_error = l2_norm(g, u_trace - u0) / std::max(l2_norm(g, u0), 1e-300);
    if (h.p_minus_residual > o.p_minus_tol) warn("dirichlet solve: trace not in the positive spectral subspace");
    return h;
}

SolutionHandle solve_energy(std::shared_ptr<const SolverContext> ctx, EnergyDatum kind, const Vec& datum,
                            const SolveOptions& o) {
    const GridSpec& g = ctx->grid();
    if (kind == EnergyDatum::neumann) return neumann_like(ctx, datum, -0.5, SolutionKind::energy_neumann, false, o);
    Vec fm = scalar_to_modes(g, strip_mean(datum, "energy solve"));
    RVec ax = mode_abs_xi(g);
    Vec q = -(ax.cast<cplx>().cwiseProduct(fm));
    return regularity_like(ctx, q, -0.5, SolutionKind::energy_regularity, false, o);
}

Vec conormal_at(const SolutionHandle& h, double t) {
    if (h.kind == SolutionKind::l2_dirichlet) {
        Vec G = h.ctx->T().semigroup(t, h.trace, std::max(1e-6, 10.0 * h.p_minus_residual));
        return S_apply(h.ctx->grid(), G);
    }
    return h.ctx->uT().semigroup(t, h.trace, std::max(1e-6, 10.0 * h.p_minus_residual));
}

std::vector<Vec> gradient_from_conormal(const CoefficientField& B, const std::vector<Vec>& F) {
    const int n = B.grid.n;
    std::vector<Vec> out(std::size_t(1 + n));
    Vec dt = B.at(0, 0).cwiseProduct(F[0]);
    for (int l = 1; l <= n; ++l) dt += B.at(0, l).cwiseProduct(F[std::size_t(l)]);
    out[0] = dt;
    for (int l = 1; l <= n; ++l) out[std::size_t(l)] = F[std::size_t(l)];
    return out;
}

StripField evaluate(const SolutionHandle& h, const std::vector<double>& t_grid) {
    const GridSpec& g = h.ctx->grid();
    const Eigen::Index m = Eigen::Index(g.modes());
    StripField sf;
    sf.grid = g;
    sf.t_grid = t_grid;
    sf.has_u = sf.has_grad = sf.has_conormal = true;
    RVec ax = mode_abs_xi(g);
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        if (!(t_grid[i] >= 0.0) || (i > 0 && !(t_grid[i] > t_grid[i - 1])))
            throw InputError("evaluate: t grid must be nonnegative and increasing");
        const double t = t_grid[i];
        Vec F;
        Vec u;
        if (h.kind == SolutionKind::l2_dirichlet) {
            Vec G = t == 0.0 ? h.trace
                             : h.ctx->T().semigroup(t, h.trace, std::max(1e-6, 10.0 * h.p_minus_residual));
            F = S_apply(g, G);
            u = modes_to_scalar(g, Vec(-G.head(m))).array() + h.gauge;
        } else {
            F = conormal_at(h, t);
            u = modes_to_scalar(g, Vec(-F.tail(m).cwiseQuotient(ax.cast<cplx>())));
        }
        BoundaryField Fp = from_vcoords(g, F);
        sf.conormal.push_back(Fp.comp);
        sf.grad.push_back(gradient_from_conormal(h.ctx->ops().B, Fp.comp));
        sf.u.push_back(u);
    }
    return sf;
}

Residuals residual_check(const StripField& field, const CoefficientField& A) {
    if (!field.has_conormal || field.t_grid.size() < 3) throw InputError("residual_check: need >= 3 conormal levels");
    const GridSpec& g = field.grid;
    CoefficientField B = hat_transform(A);
    const int n = g.n;
    const std::size_t L = field.t_grid.size();
    auto norm_of = [&](const std::vector<Vec>& v) {
        double s = 0.0;
        for (const auto& c : v) s += std::pow(l2_norm(g, c), 2);
        return std::sqrt(s);
    };
    double fmax = 0.0;
    for (const auto& lvl : field.conormal) fmax = std::max(fmax, norm_of(lvl));
    Residuals r;
    if (fmax == 0.0) return r;
    for (std::size_t i = 0; i < L; ++i) {
        BoundaryField F = BoundaryField::zeros(g);
        F.comp = field.conormal[i];
        r.curl = std::max(r.curl, curl_defect(F));
    }
    // curl_defect is measured on orthonormal coefficients; normalize by the field size.
    r.curl /= fmax;
    for (std::size_t i = 1; i + 1 < L; ++i) {
        const double h1 = field.t_grid[i] - field.t_grid[i - 1];
        const double h2 = field.t_grid[i + 1] - field.t_grid[i];
        const double cm = -h2 / (h1 * (h1 + h2)), c0 = (h2 - h1) / (h1 * h2), cp = h1 / (h2 * (h1 + h2));
        const auto& F = field.conormal[i];
        std::vector<Vec> BF(std::size_t(1 + n), Vec::Zero(g.points()));
        for (int r0 = 0; r0 <= n; ++r0)
            for (int c = 0; c <= n; ++c) BF[std::size_t(r0)] += B.at(r0, c).cwiseProduct(F[std::size_t(c)]);
        std::vector<Vec> par(BF.begin() + 1, BF.end());
        Vec div = divergence(g, par);
        std::vector<Vec> grad = gradient(g, BF[0]);
        std::vector<Vec> res(std::size_t(1 + n));
        for (int c = 0; c <= n; ++c) {
            Vec dt = cm * field.conormal[i - 1][std::size_t(c)] + c0 * F[std::size_t(c)] +
                     cp * field.conormal[i + 1][std::size_t(c)];
            res[std::size_t(c)] = c == 0 ? Vec(dt + div) : Vec(dt - grad[std::size_t(c - 1)]);
        }
        r.first_order = std::max(r.first_order, norm_of(res) / fmax);
    }
    return r;
}

void write_strip_field(const std::string& json_path, const StripField& f, const std::string& content) {
    DumpHeader h;
    h.kind = "strip";
    h.content = content;
    h.grid = f.grid;
    h.t_grid = f.t_grid;
    std::vector<cplx> data;
    if (content == "u") {
        if (!f.has_u) throw InputError("strip field has no u values");
        h.components = 1;
        h.shape = {f.t_grid.size(), f.grid.points()};
        for (const auto& v : f.u) data.insert(data.end(), v.data(), v.data() + v.size());
    } else if (content == "grad" || content == "conormal") {
        const auto& src = content == "grad" ? f.grad : f.conormal;
        if ((content == "grad" && !f.has_grad) || (content == "conormal" && !f.has_conormal))
            throw InputError("strip field lacks " + content + " values");
        h.components = 1 + f.grid.n;
        h.shape = {f.t_grid.size(), std::size_t(h.components), f.grid.points()};
        for (const auto& lvl : src)
            for (const auto& v : lvl) data.insert(data.end(), v.data(), v.data() + v.size());
    } else {
        throw InputError("write_strip_field: unknown content '" + content + "'");
    }
    write_dump(json_path, h, data);
}

}  // namespace dblab
