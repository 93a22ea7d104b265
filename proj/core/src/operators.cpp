#include "dblab/operators.hpp"

#include <cmath>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

#include "dblab/linalg.hpp"
#include "dblab/random_fields.hpp"

namespace dblab {
namespace {

struct ModeTable {
    std::vector<int> i1, i2;  // unsigned per-axis indices of each nonzero mode
    RMat xi;                  // m x n
    RVec abs;                 // m
};

ModeTable mode_table(const GridSpec& g) {
    ModeTable t;
    const std::size_t m = g.modes();
    t.i1.resize(m);
    t.i2.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t k = i + 1;
        t.i1[i] = int(k % g.N);
        t.i2[i] = g.n == 2 ? int(k / g.N) : 0;
    }
    t.xi = mode_xi(g);
    t.abs = mode_abs_xi(g);
    return t;
}

inline std::size_t diff_index(const GridSpec& g, const ModeTable& t, std::size_t i, std::size_t j) {
    const int d1 = ((t.i1[i] - t.i1[j]) % g.N + g.N) % g.N;
    if (g.n == 1) return std::size_t(d1);
    const int d2 = ((t.i2[i] - t.i2[j]) % g.N + g.N) % g.N;
    return std::size_t(d1 + g.N * d2);
}

double min_hermitian(const Mat& m) { return linalg::hermitian_eigenvalues(0.5 * (m + m.adjoint()))(0); }

cplx sgn_re(cplx z) { return z.real() > 0.0 ? 1.0 : -1.0; }

}  // namespace

OperatorMatrix assemble_S(const GridSpec& g) {
    g.validate();
    const Eigen::Index m = Eigen::Index(g.modes());
    RVec ax = mode_abs_xi(g);
    OperatorMatrix S;
    S.grid = g;
    S.m = Mat::Zero(2 * m, 2 * m);
    for (Eigen::Index i = 0; i < m; ++i) {
        S.m(i, m + i) = ax(i);
        S.m(m + i, i) = ax(i);
    }
    return S;
}

Mat times_S(const GridSpec& g, const Mat& a) {
    const Eigen::Index m = Eigen::Index(g.modes());
    RVec ax = mode_abs_xi(g);
    Mat out(a.rows(), a.cols());
    out.leftCols(m) = a.rightCols(m) * ax.asDiagonal();
    out.rightCols(m) = a.leftCols(m) * ax.asDiagonal();
    return out;
}

Mat S_times(const GridSpec& g, const Mat& a) {
    const Eigen::Index m = Eigen::Index(g.modes());
    RVec ax = mode_abs_xi(g);
    Mat out(a.rows(), a.cols());
    out.topRows(m) = ax.asDiagonal() * a.bottomRows(m);
    out.bottomRows(m) = ax.asDiagonal() * a.topRows(m);
    return out;
}

Vec S_apply(const GridSpec& g, const Vec& v) {
    const Eigen::Index m = Eigen::Index(g.modes());
    RVec ax = mode_abs_xi(g);
    Vec out(v.size());
    out.head(m) = ax.cwiseProduct(v.tail(m));
    out.tail(m) = ax.cwiseProduct(v.head(m));
    return out;
}

OperatorMatrix assemble_calB(const CoefficientField& B, double accretivity_floor) {
    const GridSpec& g = B.grid;
    g.validate();
    const int n = g.n;
    const std::size_t m = g.modes();
    ModeTable t = mode_table(g);

    std::vector<Vec> hat(std::size_t((1 + n) * (1 + n)));
    for (int r = 0; r <= n; ++r)
        for (int c = 0; c <= n; ++c) hat[std::size_t(r * (1 + n) + c)] = interpolant_coeffs(g, B.at(r, c));
    auto coef = [&](int r, int c, std::size_t d) { return hat[std::size_t(r * (1 + n) + c)](Eigen::Index(d)); };

    OperatorMatrix calB;
    calB.grid = g;
    calB.m.resize(Eigen::Index(2 * m), Eigen::Index(2 * m));
    const Eigen::Index M = Eigen::Index(m);
    for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t i = 0; i < m; ++i) {
            const std::size_t d = diff_index(g, t, i, j);
            const Eigen::Index I = Eigen::Index(i), J = Eigen::Index(j);
            calB.m(I, J) = coef(0, 0, d);
            cplx pb = 0.0, pc = 0.0, pd = 0.0;
            for (int l = 0; l < n; ++l) {
                pb += coef(0, 1 + l, d) * cplx(0.0, -t.xi(J, l) / t.abs(J));
                pc += cplx(0.0, t.xi(I, l) / t.abs(I)) * coef(1 + l, 0, d);
                for (int p = 0; p < n; ++p) pd += t.xi(I, l) * coef(1 + l, 1 + p, d) * t.xi(J, p);
            }
            calB.m(I, M + J) = pb;
            calB.m(M + I, J) = pc;
            calB.m(M + I, M + J) = pd / (t.abs(I) * t.abs(J));
        }
    }
    const double lam = min_hermitian(calB.m);
    if (!(lam >= accretivity_floor)) {
        std::ostringstream os;
        os << "assemble_calB: operator not strictly accretive on the curl-free space (min Re eigenvalue " << lam
           << ")";
        throw NumericalError(os.str());
    }
    return calB;
}

OperatorMatrix assemble_T(const OperatorMatrix& calB) {
    OperatorMatrix T = calB;
    T.m = times_S(calB.grid, calB.m);
    return T;
}

OperatorMatrix assemble_uT(const OperatorMatrix& calB) {
    OperatorMatrix uT = calB;
    uT.m = S_times(calB.grid, calB.m);
    return uT;
}

LowerBlocks lower_blocks(const OperatorMatrix& calB) {
    const Eigen::Index m = calB.half();
    LowerBlocks lb;
    lb.upper_right_norm = calB.m.topRightCorner(m, m).norm();
    if (lb.upper_right_norm > 1e-12 * std::max(1.0, calB.m.norm()))
        throw InputError("lower_blocks: coefficient is not block lower-triangular");
    lb.alpha = calB.m.topLeftCorner(m, m);
    lb.gamma = calB.m.bottomLeftCorner(m, m);
    lb.delta = calB.m.bottomRightCorner(m, m);
    return lb;
}

RVec sobolev_weight(const GridSpec& g, double s) {
    RVec ax = mode_abs_xi(g);
    RVec w(2 * ax.size());
    for (Eigen::Index i = 0; i < ax.size(); ++i) w(i) = w(ax.size() + i) = std::pow(ax(i), s);
    return w;
}

Mat conjugate_weight(const Mat& a, const RVec& w_rows, const RVec& w_cols) {
    return w_rows.asDiagonal() * a * w_cols.cwiseInverse().asDiagonal();
}

SpectralDecomposition decompose(const Mat& op, const CalculusOptions& opt) {
    SpectralDecomposition d;
    linalg::EigResult e = linalg::eig(op);
    d.values = e.values;
    d.vectors = std::move(e.vectors);
    Eigen::PartialPivLU<Mat> lu(d.vectors);
    d.inverse = lu.inverse();
    d.cond = linalg::norm1(d.vectors) * linalg::norm1(d.inverse);
    d.margin = d.values.size() ? d.values.real().cwiseAbs().minCoeff() : 0.0;
    const double onorm = op.norm();
    Mat recon = d.vectors * d.values.asDiagonal() * d.inverse;
    d.recon_error = onorm > 0.0 ? (recon - op).norm() / onorm : (recon - op).norm();
    d.reliable = std::isfinite(d.cond) && d.cond <= opt.cond_limit && d.recon_error <= opt.recon_tol;
    return d;
}

FunctionalCalculus::FunctionalCalculus(Mat op, CalculusOptions opt) : op_(std::move(op)), opt_(opt) {
    if (op_.rows() != op_.cols()) throw InputError("functional calculus needs a square matrix");
    spec_ = decompose(op_, opt_);
    if (!(spec_.margin > opt_.margin_floor)) {
        std::ostringstream os;
        os << "spectrum within " << spec_.margin << " of the imaginary axis (bisectoriality failure)";
        throw NumericalError(os.str());
    }
    const Eigen::Index d = op_.rows();
    if (spec_.reliable) {
        std::vector<Eigen::Index> pos;
        for (Eigen::Index i = 0; i < d; ++i)
            if (spec_.values(i).real() > 0.0) pos.push_back(i);
        Mat wp(d, Eigen::Index(pos.size()));
        Mat vp(Eigen::Index(pos.size()), d);
        for (std::size_t k = 0; k < pos.size(); ++k) {
            wp.col(Eigen::Index(k)) = spec_.vectors.col(pos[k]);
            vp.row(Eigen::Index(k)) = spec_.inverse.row(pos[k]);
        }
        sign_ = 2.0 * (wp * vp);
        sign_.diagonal().array() -= 1.0;
    } else {
        std::ostringstream os;
        os << "eigenbasis unreliable (cond " << spec_.cond << ", reconstruction " << spec_.recon_error
           << "); using ordered Schur form";
        warn(os.str());
        linalg::SchurResult sr = linalg::schur_rhp_first(op_);
        const Eigen::Index k = sr.sdim;
        Mat u11 = sr.u.topLeftCorner(k, k);
        Mat u22 = sr.u.bottomRightCorner(d - k, d - k);
        Mat u12 = sr.u.topRightCorner(k, d - k);
        Mat z = linalg::sylvester_upper(u11, u22, 2.0 * u12);
        Mat x = Mat::Zero(d, d);
        x.topLeftCorner(k, k).setIdentity();
        x.bottomRightCorner(d - k, d - k) = -Mat::Identity(d - k, d - k);
        x.topRightCorner(k, d - k) = z;
        sign_ = sr.q * x * sr.q.adjoint();
        schur_ = SchurData{sr.q.leftCols(k), u11};
    }
}

Eigen::Index FunctionalCalculus::positive_count() const {
    Eigen::Index c = 0;
    for (Eigen::Index i = 0; i < spec_.values.size(); ++i) c += spec_.values(i).real() > 0.0;
    return c;
}

Mat FunctionalCalculus::p_plus() const {
    Mat p = 0.5 * sign_;
    p.diagonal().array() += 0.5;
    return p;
}

Mat FunctionalCalculus::p_minus() const {
    Mat p = -0.5 * sign_;
    p.diagonal().array() += 0.5;
    return p;
}

void FunctionalCalculus::require_eigen(const char* what) const {
    if (!spec_.reliable) throw NumericalError(std::string(what) + ": eigendecomposition unreliable");
}

Vec FunctionalCalculus::semigroup(double t, const Vec& F, double p_minus_tol) const {
    if (t < 0.0) throw InputError("semigroup: t must be nonnegative");
    const double fn = F.norm();
    const Vec pm = 0.5 * (F - sign_ * F);
    if (pm.norm() > p_minus_tol * std::max(fn, 1e-300) && fn > 0.0)
        throw InputError("semigroup: data has a significant negative spectral component");
    if (t == 0.0) return F;
    if (schur_) {
        Mat e = (-t * schur_->u11).exp();
        return schur_->q1 * (e * (schur_->q1.adjoint() * F));
    }
    Vec c = spec_.inverse * F;
    for (Eigen::Index i = 0; i < c.size(); ++i) {
        const cplx lam = spec_.values(i);
        c(i) = lam.real() > 0.0 ? c(i) * std::exp(-t * lam) : cplx(0.0);
    }
    return spec_.vectors * c;
}

Vec FunctionalCalculus::abs_semigroup(double t, const Vec& F) const {
    require_eigen("abs_semigroup");
    Vec c = spec_.inverse * F;
    for (Eigen::Index i = 0; i < c.size(); ++i) c(i) *= std::exp(-t * spec_.values(i) * sgn_re(spec_.values(i)));
    return spec_.vectors * c;
}

Vec FunctionalCalculus::psi_apply(double t, int k, const Vec& F) const {
    require_eigen("psi_apply");
    Vec c = spec_.inverse * F;
    for (Eigen::Index i = 0; i < c.size(); ++i) {
        const cplx z = t * spec_.values(i);
        c(i) *= std::pow(z, k) * std::exp(-z * sgn_re(z));
    }
    return spec_.vectors * c;
}

Mat FunctionalCalculus::fractional_power(double s) const {
    require_eigen("fractional_power");
    if (s == 0.0) return Mat::Identity(op_.rows(), op_.cols());
    Vec f(spec_.values.size());
    for (Eigen::Index i = 0; i < f.size(); ++i) {
        const cplx z = spec_.values(i) * sgn_re(spec_.values(i));
        f(i) = s == 1.0 ? z : std::pow(z, s);
    }
    return spec_.vectors * f.asDiagonal() * spec_.inverse;
}

double FunctionalCalculus::spectral_radius() const {
    return spec_.values.size() ? spec_.values.cwiseAbs().maxCoeff() : 0.0;
}

Mat matrix_sign_newton(const Mat& op, const CalculusOptions& opt, NewtonReport* report) {
    const Eigen::Index d = op.rows();
    Mat x = op;
    bool scaling = true;
    double prev_delta = std::numeric_limits<double>::infinity();
    NewtonReport rep;
    for (int it = 1; it <= opt.newton_max_iter; ++it) {
        Eigen::PartialPivLU<Mat> lu(x);
        double mu = 1.0;
        if (scaling) {
            const Mat& lum = lu.matrixLU();
            double logdet = 0.0;
            for (Eigen::Index i = 0; i < d; ++i) logdet += std::log(std::abs(lum(i, i)));
            mu = std::exp(-logdet / double(d));
        }
        Mat next = 0.5 * (mu * x + lu.inverse() / mu);
        if (!next.allFinite()) break;
        const double delta = linalg::norm1(next - x) / linalg::norm1(next);
        x = std::move(next);
        rep.iterations = it;
        if (delta < 1e-2) scaling = false;
        if (delta <= opt.newton_tol || (delta < 1e-8 && delta > 0.5 * prev_delta)) {
            rep.converged = true;
            break;
        }
        prev_delta = delta;
    }
    if (rep.converged) {
        const Mat resid = x * x - Mat::Identity(d, d);
        if (!(linalg::norm1(resid) <= 1e-6 * std::max(1.0, linalg::norm1(x) * linalg::norm1(x))))
            rep.converged = false;
    }
    if (report) *report = rep;
    return x;
}

OperatorMatrix matrix_sign(const OperatorMatrix& op, SignMethod method, const CalculusOptions& opt) {
    OperatorMatrix out = op;
    if (method == SignMethod::newton) {
        NewtonReport rep;
        out.m = matrix_sign_newton(op.m, opt, &rep);
        if (rep.converged) return out;
        warn("matrix_sign: Newton iteration did not converge; falling back to eigendecomposition");
    }
    out.m = FunctionalCalculus(op.m, opt).sign();
    return out;
}

std::pair<Mat, Mat> spectral_projectors(const Mat& sgn) {
    const Eigen::Index d = sgn.rows();
    Mat p = 0.5 * sgn;
    p.diagonal().array() += 0.5;
    Mat q = Mat::Identity(d, d) - p;
    return {p, q};
}

Vec semigroup_apply(const FunctionalCalculus& calc, double t, const Vec& F) { return calc.semigroup(t, F); }

OperatorMatrix fractional_power(const OperatorMatrix& op, double s, const CalculusOptions& opt) {
    if (!(s >= -1.0 && s <= 1.0)) throw InputError("fractional_power: s must lie in [-1, 1]");
    OperatorMatrix out = op;
    out.m = FunctionalCalculus(op.m, opt).fractional_power(s);
    return out;
}

OperatorSet build_operators(const CoefficientField& A) {
    OperatorSet set;
    set.grid = A.grid;
    set.A = A;
    set.B = hat_transform(A);
    set.calB = assemble_calB(set.B);
    set.T = assemble_T(set.calB);
    set.uT = assemble_uT(set.calB);
    return set;
}

void check_bisectorial(const FunctionalCalculus& calc, const std::string& label) {
    if (!(calc.spectrum().margin > calc.options().margin_floor)) {
        std::ostringstream os;
        os << label << ": bisectoriality failure, margin " << calc.spectrum().margin;
        throw NumericalError(os.str());
    }
}

KatoStats kato_check(const CoefficientField& coeff, int samples, std::uint64_t seed) {
    const GridSpec& g = coeff.grid;
    const int n = g.n;
    for (std::size_t k = 0; k < g.points(); ++k) {
        Mat d = coeff.matrix_at(k).bottomRightCorner(n, n);
        if (!(min_hermitian(d) > 0.0)) throw InputError("kato_check: tangential block is not accretive");
    }
    // The par-par block of calB for a coefficient with only the tangential block is R* d' R.
    CoefficientField only_d = coeff;
    only_d.at(0, 0).setOnes();
    for (int l = 1; l <= n; ++l) {
        only_d.at(0, l).setZero();
        only_d.at(l, 0).setZero();
    }
    only_d.refresh(false);
    OperatorMatrix cb = assemble_calB(only_d, -std::numeric_limits<double>::infinity());
    const Eigen::Index m = cb.half();
    RVec ax = mode_abs_xi(g);
    Mat Lpar = ax.asDiagonal() * cb.m.bottomRightCorner(m, m) * ax.asDiagonal();
    CalculusOptions opt;
    opt.cond_limit = std::numeric_limits<double>::infinity();
    FunctionalCalculus calc(Lpar, opt);
    Mat root = calc.fractional_power(0.5);
    KatoStats st;
    st.min_ratio = std::numeric_limits<double>::infinity();
    st.max_ratio = 0.0;
    for (int s = 0; s < samples; ++s) {
        Vec f = scalar_to_modes(g, random_scalar_field(g, item_seed(seed, std::uint64_t(s)), 1.0));
        const double den = ax.cwiseProduct(f).norm();
        if (den == 0.0) continue;
        const double r = (root * f).norm() / den;
        st.min_ratio = std::min(st.min_ratio, r);
        st.max_ratio = std::max(st.max_ratio, r);
        ++st.samples;
    }
    return st;
}

}  // namespace dblab
