#include "dblab/coefficients.hpp"

#include <cmath>
#include <sstream>

namespace dblab {
namespace {

double min_hermitian_eig(const Mat& a) {
    Mat h = 0.5 * (a + a.adjoint());
    Eigen::SelfAdjointEigenSolver<Mat> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

double spectral_norm_small(const Mat& a) {
    Eigen::JacobiSVD<Mat> svd(a);
    return svd.singularValues()(0);
}

bool entry_allowed(BlockClass s, int r, int c) {
    const bool b_entry = r == 0 && c > 0;
    const bool c_entry = c == 0 && r > 0;
    switch (s) {
        case BlockClass::lower_triangular: return !b_entry;
        case BlockClass::upper_triangular: return !c_entry;
        case BlockClass::block_diagonal: return !b_entry && !c_entry;
        case BlockClass::general: return true;
    }
    return true;
}

// Random scalar function on the torus: a trigonometric polynomial or a dyadic
// piecewise constant with complex values.
struct RandomScalar {
    bool piecewise = false;
    int level = 0;
    double L = 2.0 * kPi;
    std::vector<std::array<int, 2>> modes;
    std::vector<cplx> coef;  // trig coefficients or cell values

    cplx operator()(double x1, double x2, int n) const {
        if (piecewise) {
            const int cells = 1 << level;
            auto cell = [&](double x) {
                double u = x / L - std::floor(x / L);
                int c = static_cast<int>(std::floor(u * cells + 1e-12));
                return std::min(std::max(c, 0), cells - 1);
            };
            const int i1 = cell(x1);
            const int i2 = n == 2 ? cell(x2) : 0;
            return coef[std::size_t(i1 + cells * i2)];
        }
        const double w = 2.0 * kPi / L;
        cplx acc = 0.0;
        for (std::size_t j = 0; j < modes.size(); ++j) {
            const double ph = w * (modes[j][0] * x1 + modes[j][1] * x2);
            acc += coef[j] * cplx(std::cos(ph), std::sin(ph));
        }
        return acc;
    }
};

RandomScalar random_scalar(UniformStream& rng, int n, double L, bool piecewise, int max_mode, int level) {
    RandomScalar f;
    f.piecewise = piecewise;
    f.L = L;
    f.level = level;
    if (piecewise) {
        const int cells = 1 << level;
        const int count = n == 1 ? cells : cells * cells;
        for (int j = 0; j < count; ++j) {
            const double re = rng.symmetric();
            const double im = rng.symmetric();
            f.coef.emplace_back(re, im);
        }
        return f;
    }
    const int k2max = n == 2 ? max_mode : 0;
    for (int k2 = -k2max; k2 <= k2max; ++k2) {
        for (int k1 = -max_mode; k1 <= max_mode; ++k1) {
            const double decay = 1.0 / (1.0 + double(k1 * k1 + k2 * k2));
            const double re = rng.symmetric();
            const double im = rng.symmetric();
            f.modes.push_back({k1, k2});
            f.coef.push_back(decay * cplx(re, im));
        }
    }
    return f;
}

using MatrixFn = std::function<Mat(double, double)>;

MatrixFn random_matrix_fn(UniformStream& rng, int n, double L, BlockClass structure, bool piecewise, int max_mode,
                          int level) {
    const int dim = 1 + n;
    std::vector<std::pair<int, RandomScalar>> parts;
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c)
            if (entry_allowed(structure, r, c))
                parts.emplace_back(r * dim + c, random_scalar(rng, n, L, piecewise, max_mode, level));
    return [parts, dim, n](double x1, double x2) {
        Mat p = Mat::Zero(dim, dim);
        for (const auto& [idx, f] : parts) p(idx / dim, idx % dim) = f(x1, x2, n);
        return p;
    };
}

GridSpec reference_grid(int n, double L, int level) {
    GridSpec g;
    g.n = n;
    g.L = L;
    g.N = n == 1 ? 512 : 64;
    while (g.N < (1 << level) * 4) g.N *= 2;
    return g;
}

}  // namespace

std::string to_string(BlockClass c) {
    switch (c) {
        case BlockClass::general: return "general";
        case BlockClass::lower_triangular: return "lower_triangular";
        case BlockClass::upper_triangular: return "upper_triangular";
        case BlockClass::block_diagonal: return "block_diagonal";
    }
    return "general";
}

BlockClass block_class_from_string(const std::string& s) {
    if (s == "general") return BlockClass::general;
    if (s == "lower_triangular") return BlockClass::lower_triangular;
    if (s == "upper_triangular") return BlockClass::upper_triangular;
    if (s == "block_diagonal") return BlockClass::block_diagonal;
    throw InputError("unknown block class '" + s + "'");
}

std::string to_string(FamilyKind k) {
    switch (k) {
        case FamilyKind::constant: return "constant";
        case FamilyKind::smooth_trig: return "smooth_trig";
        case FamilyKind::piecewise_random: return "piecewise_random";
        case FamilyKind::lower_triangular_random: return "lower_triangular_random";
        case FamilyKind::upper_triangular_random: return "upper_triangular_random";
        case FamilyKind::block_diagonal_random: return "block_diagonal_random";
    }
    return "constant";
}

FamilyKind family_kind_from_string(const std::string& s) {
    for (auto k : {FamilyKind::constant, FamilyKind::smooth_trig, FamilyKind::piecewise_random,
                   FamilyKind::lower_triangular_random, FamilyKind::upper_triangular_random,
                   FamilyKind::block_diagonal_random})
        if (to_string(k) == s) return k;
    throw InputError("unknown coefficient family '" + s + "'");
}

Mat CoefficientField::matrix_at(std::size_t point) const {
    Mat m(dim, dim);
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c) m(r, c) = at(r, c)(Eigen::Index(point));
    return m;
}

CoefficientField CoefficientField::from_function(const GridSpec& g, const std::function<Mat(double, double)>& fn,
                                                 bool require_accretive) {
    g.validate();
    CoefficientField A;
    A.grid = g;
    A.dim = 1 + g.n;
    A.entries.assign(std::size_t(A.dim * A.dim), Vec(g.points()));
    for (std::size_t k = 0; k < g.points(); ++k) {
        auto x = grid_point(g, k);
        Mat m = fn(x[0], x[1]);
        if (m.rows() != A.dim || m.cols() != A.dim) throw InputError("coefficient function returned wrong size");
        for (int r = 0; r < A.dim; ++r)
            for (int c = 0; c < A.dim; ++c) A.at(r, c)(Eigen::Index(k)) = m(r, c);
    }
    A.refresh(require_accretive);
    return A;
}

CoefficientField CoefficientField::constant(const GridSpec& g, const Mat& a0) {
    return from_function(g, [a0](double, double) { return a0; });
}

void CoefficientField::refresh(bool require_accretive) {
    for (const auto& e : entries)
        if (!e.allFinite()) throw InputError("coefficient field has non-finite samples");
    lambda = accretivity_estimate(*this);
    Lambda = sup_norm(*this);
    block_class = classify(*this);
    if (require_accretive && !(lambda > 0.0)) {
        std::ostringstream os;
        os << "coefficient field is not strictly accretive (lambda = " << lambda << ")";
        throw InputError(os.str());
    }
}

double accretivity_estimate(const CoefficientField& A) {
    double lo = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < A.grid.points(); ++k) lo = std::min(lo, min_hermitian_eig(A.matrix_at(k)));
    return lo;
}

double accretivity_bound(const CoefficientField& A) {
    const double lam = accretivity_estimate(A);
    if (!(lam > 0.0)) {
        std::ostringstream os;
        os << "non-accretive coefficient field (min Hermitian eigenvalue " << lam << ")";
        throw InputError(os.str());
    }
    return lam;
}

double sup_norm(const CoefficientField& A) {
    double hi = 0.0;
    for (std::size_t k = 0; k < A.grid.points(); ++k) hi = std::max(hi, spectral_norm_small(A.matrix_at(k)));
    return hi;
}

BlockClass classify(const CoefficientField& A) {
    bool b_zero = true, c_zero = true;
    for (int l = 1; l < A.dim; ++l) {
        b_zero = b_zero && (A.at(0, l).array() == cplx(0.0)).all();
        c_zero = c_zero && (A.at(l, 0).array() == cplx(0.0)).all();
    }
    if (b_zero && c_zero) return BlockClass::block_diagonal;
    if (b_zero) return BlockClass::lower_triangular;
    if (c_zero) return BlockClass::upper_triangular;
    return BlockClass::general;
}

double max_abs_difference(const CoefficientField& A, const CoefficientField& B) {
    if (!(A.grid == B.grid)) throw InputError("coefficient fields live on different grids");
    double worst = 0.0;
    for (std::size_t k = 0; k < A.grid.points(); ++k)
        worst = std::max(worst, spectral_norm_small(A.matrix_at(k) - B.matrix_at(k)));
    return worst;
}

CoefficientField hat_transform(const CoefficientField& A) {
    const int n = A.grid.n;
    CoefficientField B = A;
    for (std::size_t k = 0; k < A.grid.points(); ++k) {
        const Eigen::Index p = Eigen::Index(k);
        const cplx a = A.at(0, 0)(p);
        if (std::abs(a) < 1e-10) throw NumericalError("hat_transform: singular coefficient a(x)");
        B.at(0, 0)(p) = 1.0 / a;
        for (int l = 1; l <= n; ++l) {
            B.at(0, l)(p) = -A.at(0, l)(p) / a;
            B.at(l, 0)(p) = A.at(l, 0)(p) / a;
            for (int q = 1; q <= n; ++q) B.at(l, q)(p) = A.at(l, q)(p) - A.at(l, 0)(p) * A.at(0, q)(p) / a;
        }
    }
    B.refresh(false);
    return B;
}

double divergence_defect(const GridSpec& g, const std::vector<Vec>& gamma) {
    if (static_cast<int>(gamma.size()) != g.n) throw InputError("gamma must have n components");
    std::vector<Vec> c;
    for (const auto& gl : gamma) c.push_back(fft(g, gl));
    double worst = 0.0;
    for (std::size_t k = 0; k < g.points(); ++k) {
        auto xi = frequency(g, k);
        cplx d = 0.0;
        for (int l = 0; l < g.n; ++l) d += xi[l] * c[l](Eigen::Index(k));
        worst = std::max(worst, std::abs(d));
    }
    return worst;
}

CoefficientField mgamma_perturb(const CoefficientField& A, const std::vector<Vec>& gamma) {
    const GridSpec& g = A.grid;
    double gnorm = 0.0;
    for (const auto& gl : gamma) {
        if (static_cast<std::size_t>(gl.size()) != g.points() || !gl.allFinite())
            throw InputError("mgamma_perturb: malformed gamma");
        gnorm += std::pow(l2_norm(g, gl), 2);
    }
    gnorm = std::sqrt(gnorm);
    if (divergence_defect(g, gamma) > 1e-10 * std::max(gnorm, 1e-300))
        throw InputError("mgamma_perturb: gamma is not divergence-free");
    CoefficientField B = A;
    for (int l = 1; l <= g.n; ++l) {
        B.at(0, l) += gamma[std::size_t(l - 1)];
        B.at(l, 0) -= gamma[std::size_t(l - 1)];
    }
    B.refresh(true);
    return B;
}

CoefficientField ContinuumCoefficient::sample(const GridSpec& g) const {
    if (g.n != n_ || g.L != L_) throw InputError("continuum coefficient sampled on an incompatible grid");
    return CoefficientField::from_function(g, fn_);
}

ContinuumCoefficient make_continuum(const FamilySpec& spec, int n, double L) {
    const int dim = 1 + n;
    const double lf = spec.lambda_floor, Lc = spec.Lambda_cap;
    if (!(lf > 0.0) || !(Lc > lf)) throw InputError("make_family: need 0 < lambda_floor < Lambda_cap");
    Mat base = spec.base.size() ? spec.base : Mat(Mat::Identity(dim, dim));
    if (base.rows() != dim || base.cols() != dim) throw InputError("make_family: base matrix has wrong size");

    if (spec.kind == FamilyKind::constant) {
        if (min_hermitian_eig(base) < lf) throw InputError("make_family: base matrix violates the lambda floor");
        return ContinuumCoefficient(n, L, [base](double, double) { return base; });
    }

    UniformStream rng(splitmix64(spec.seed));
    BlockClass structure = spec.structure;
    bool piecewise = spec.piecewise;
    switch (spec.kind) {
        case FamilyKind::lower_triangular_random: structure = BlockClass::lower_triangular; break;
        case FamilyKind::upper_triangular_random: structure = BlockClass::upper_triangular; break;
        case FamilyKind::block_diagonal_random: structure = BlockClass::block_diagonal; break;
        case FamilyKind::piecewise_random: piecewise = true; break;
        case FamilyKind::smooth_trig: piecewise = false; break;
        default: break;
    }
    if (!entry_allowed(structure, 0, 1) || !entry_allowed(structure, 1, 0)) {
        for (int l = 1; l < dim; ++l) {
            if (!entry_allowed(structure, 0, l) && base(0, l) != cplx(0.0))
                throw InputError("make_family: base matrix conflicts with block structure");
            if (!entry_allowed(structure, l, 0) && base(l, 0) != cplx(0.0))
                throw InputError("make_family: base matrix conflicts with block structure");
        }
    }
    MatrixFn P = random_matrix_fn(rng, n, L, structure, piecewise, spec.max_mode, spec.dyadic_level);

    // Constants are measured on a fixed reference grid so the continuum field
    // does not depend on the grid it is later sampled on.
    const GridSpec ref = reference_grid(n, L, spec.dyadic_level);
    double e = std::numeric_limits<double>::infinity(), p = 0.0;
    for (std::size_t k = 0; k < ref.points(); ++k) {
        auto x = grid_point(ref, k);
        Mat m = P(x[0], x[1]);
        e = std::min(e, min_hermitian_eig(m));
        p = std::max(p, spectral_norm_small(m));
    }

    if (spec.kind == FamilyKind::smooth_trig) {
        const double amp = spec.amplitude;
        if (amp < 0.0) throw InputError("make_family: amplitude must be nonnegative");
        const double scale = p > 0.0 ? amp / p : 0.0;
        if (min_hermitian_eig(base) - amp < lf || spectral_norm_small(base) + amp > Lc)
            throw InputError("make_family: accretivity target unreachable for this base and amplitude");
        return ContinuumCoefficient(n, L, [base, P, scale](double x1, double x2) -> Mat {
            if (scale == 0.0) return base;
            return base + scale * P(x1, x2);
        });
    }

    const double gap = Lc - lf;
    const double s = (p - e) > 0.0 ? 0.9 * gap / (p - e) : 0.0;
    const double alpha = lf - s * e + 0.05 * gap;
    return ContinuumCoefficient(n, L, [P, s, alpha, dim](double x1, double x2) -> Mat {
        return alpha * Mat::Identity(dim, dim) + s * P(x1, x2);
    });
}

CoefficientField make_family(const FamilySpec& spec, const GridSpec& g) {
    g.validate();
    CoefficientField A = make_continuum(spec, g.n, g.L).sample(g);
    if (A.lambda < spec.lambda_floor - 1e-12) {
        std::ostringstream os;
        os << "make_family: sampled field has lambda " << A.lambda << " below the floor " << spec.lambda_floor;
        throw InputError(os.str());
    }
    return A;
}

}  // namespace dblab
