#include "dblab/fd_oracle.hpp"

#include <cmath>
#include <mutex>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "dblab/linalg.hpp"

namespace dblab {

std::string to_string(XScheme s) { return s == XScheme::galerkin ? "galerkin" : "collocation"; }

XScheme xscheme_from_string(const std::string& s) {
    if (s == "galerkin") return XScheme::galerkin;
    if (s == "collocation") return XScheme::collocation;
    throw InputError("unknown x scheme '" + s + "' (expected galerkin or collocation)");
}

StripMesh StripMesh::graded(const GridSpec& g, int M, double T_max_over_L) {
    g.validate();
    if (M < 1 || !(T_max_over_L > 0.0)) throw InputError("StripMesh: invalid parameters");
    StripMesh mesh;
    mesh.grid = g;
    mesh.M = M;
    mesh.T_max = T_max_over_L * g.L;
    const double t0 = g.L / g.N;
    const double beta = std::log1p(mesh.T_max / t0);
    mesh.t.resize(std::size_t(M) + 1);
    for (int i = 0; i <= M; ++i) mesh.t[std::size_t(i)] = t0 * std::expm1(beta * i / double(M));
    mesh.t.front() = 0.0;
    mesh.t.back() = mesh.T_max;
    return mesh;
}

void StripMesh::validate() const {
    grid.validate();
    if (M < 1 || t.size() != std::size_t(M) + 1) throw InputError("StripMesh: node count mismatch");
    if (t.front() != 0.0) throw InputError("StripMesh: first node must be t = 0");
    for (std::size_t i = 1; i < t.size(); ++i)
        if (!(t[i] > t[i - 1])) throw InputError("StripMesh: nodes must increase");
}

std::vector<double> StripMesh::midpoints() const {
    std::vector<double> out(static_cast<std::size_t>(M));
    for (int e = 0; e < M; ++e) out[std::size_t(e)] = 0.5 * (t[std::size_t(e)] + t[std::size_t(e) + 1]);
    return out;
}

std::vector<double> StripMesh::widths() const {
    std::vector<double> out(static_cast<std::size_t>(M));
    for (int e = 0; e < M; ++e) out[std::size_t(e)] = t[std::size_t(e) + 1] - t[std::size_t(e)];
    return out;
}

namespace {

// Per-axis unsigned indices and frequencies of all N^n modes.
struct AllModes {
    std::vector<int> i1, i2;
    RMat xi;  // K x n
};

AllModes all_modes(const GridSpec& g) {
    AllModes a;
    const std::size_t K = g.points();
    a.i1.resize(K);
    a.i2.resize(K);
    a.xi.resize(Eigen::Index(K), g.n);
    for (std::size_t k = 0; k < K; ++k) {
        a.i1[k] = int(k % std::size_t(g.N));
        a.i2[k] = g.n == 2 ? int(k / std::size_t(g.N)) : 0;
        auto f = frequency(g, k);
        for (int l = 0; l < g.n; ++l) a.xi(Eigen::Index(k), l) = f[std::size_t(l)];
    }
    return a;
}

// Index of the interpolant coefficient coupling trial mode j to test mode k, or
// -1 when the product has no such component.
long coupling_index(const GridSpec& g, const AllModes& a, std::size_t k, std::size_t j, XScheme s) {
    const int N = g.N;
    auto axis = [&](int ik, int ij, int& out) {
        if (s == XScheme::collocation) {
            out = ((ik - ij) % N + N) % N;
            return true;
        }
        const int d = signed_index(ik, N) - signed_index(ij, N);
        if (d < -N / 2 || d > N / 2 - 1) return false;
        out = (d + N) % N;
        return true;
    };
    int d1 = 0, d2 = 0;
    if (!axis(a.i1[k], a.i1[j], d1)) return -1;
    if (g.n == 2 && !axis(a.i2[k], a.i2[j], d2)) return -1;
    return long(d1) + long(N) * d2;
}

Mat coupling_matrix(const GridSpec& g, const AllModes& a, const Vec& samples, XScheme s) {
    const Vec p = interpolant_coeffs(g, samples);
    const Eigen::Index K = Eigen::Index(g.points());
    Mat G = Mat::Zero(K, K);
    for (Eigen::Index k = 0; k < K; ++k)
        for (Eigen::Index j = 0; j < K; ++j) {
            const long idx = coupling_index(g, a, std::size_t(k), std::size_t(j), s);
            if (idx >= 0) G(k, j) = p(idx);
        }
    return G;
}

}  // namespace

// Mode matrices of the form and block-tridiagonal factorizations in t.
class StripSystem {
public:
    StripSystem(const CoefficientField& A, const StripMesh& mesh, XScheme scheme) : mesh_(mesh) {
        const GridSpec& g = mesh.grid;
        const int n = g.n;
        AllModes a = all_modes(g);
        K_ = Eigen::Index(g.points());
        Kaa_ = coupling_matrix(g, a, A.at(0, 0), scheme);
        Kb_ = Mat::Zero(K_, K_);
        Kc_ = Mat::Zero(K_, K_);
        Kd_ = Mat::Zero(K_, K_);
        xi2_ = RVec::Zero(K_);
        for (int l = 0; l < n; ++l) {
            Vec dl = (cplx(0.0, 1.0) * a.xi.col(l)).cast<cplx>();
            xi2_ += a.xi.col(l).cwiseAbs2();
            Kb_ += coupling_matrix(g, a, A.at(0, 1 + l), scheme) * dl.asDiagonal();
            Kc_ += dl.conjugate().asDiagonal() * coupling_matrix(g, a, A.at(1 + l, 0), scheme);
            for (int p = 0; p < n; ++p) {
                Vec dp = (cplx(0.0, 1.0) * a.xi.col(p)).cast<cplx>();
                Kd_ += dl.conjugate().asDiagonal() * coupling_matrix(g, a, A.at(1 + l, 1 + p), scheme) *
                       dp.asDiagonal();
            }
        }
        h_ = mesh.widths();
    }

    Eigen::Index K() const { return K_; }
    int M() const { return mesh_.M; }

    // Element block (test alpha, trial beta) of element e.
    Mat block(int e, int alpha, int beta) const {
        const double h = h_[std::size_t(e)];
        static constexpr double S[2][2] = {{1.0, -1.0}, {-1.0, 1.0}};
        static constexpr double Mm[2][2] = {{2.0 / 6.0, 1.0 / 6.0}, {1.0 / 6.0, 2.0 / 6.0}};
        static constexpr double C1[2][2] = {{-0.5, -0.5}, {0.5, 0.5}};
        static constexpr double C2[2][2] = {{-0.5, 0.5}, {-0.5, 0.5}};
        return (S[alpha][beta] / h) * Kaa_ + C1[alpha][beta] * Kb_ + C2[alpha][beta] * Kc_ +
               (Mm[alpha][beta] * h) * Kd_;
    }

    // K U for nodal coefficients U (K x (M+1)); all nodes.
    Mat apply(const Mat& U) const {
        const Mat Pa = Kaa_ * U, Pb = Kb_ * U, Pc = Kc_ * U, Pd = Kd_ * U;
        Mat R = Mat::Zero(K_, U.cols());
        static constexpr double C1[2][2] = {{-0.5, -0.5}, {0.5, 0.5}};
        static constexpr double C2[2][2] = {{-0.5, 0.5}, {-0.5, 0.5}};
        for (int e = 0; e < mesh_.M; ++e) {
            const double h = h_[std::size_t(e)];
            const double S[2][2] = {{1.0 / h, -1.0 / h}, {-1.0 / h, 1.0 / h}};
            const double Mm[2][2] = {{h / 3.0, h / 6.0}, {h / 6.0, h / 3.0}};
            for (int al = 0; al < 2; ++al)
                for (int be = 0; be < 2; ++be) {
                    const Eigen::Index c = e + be;
                    R.col(e + al) += S[al][be] * Pa.col(c) + C1[al][be] * Pb.col(c) + C2[al][be] * Pc.col(c) +
                                     Mm[al][be] * Pd.col(c);
                }
        }
        return R;
    }

    double energy(const Mat& U) const {
        double acc = 0.0;
        for (int e = 0; e < mesh_.M; ++e) {
            const double h = h_[std::size_t(e)];
            const Vec u0 = U.col(e), u1 = U.col(e + 1);
            acc += (u1 - u0).squaredNorm() / h;
            for (Eigen::Index k = 0; k < K_; ++k) {
                const cplx a = u0(k), b = u1(k);
                acc += xi2_(k) * h / 3.0 * (std::norm(a) + std::norm(b) + std::real(a * std::conj(b)));
            }
        }
        return acc;
    }

    // Solves the equations of nodes first..M-1 (node M fixed to zero, nodes
    // below `first` eliminated by the caller). rhs[i] holds node first + i.
    std::vector<Mat> solve(int first, const std::vector<Mat>& rhs) const {
        const Factor& f = factor(first);
        const int count = mesh_.M - first;
        std::vector<Mat> y(rhs);
        for (int i = 1; i < count; ++i) {
            const int node = first + i;
            y[std::size_t(i)] -= block(node - 1, 1, 0) * f.lu[std::size_t(i - 1)].solve(y[std::size_t(i - 1)]);
        }
        std::vector<Mat> x(static_cast<std::size_t>(count));
        x[std::size_t(count - 1)] = f.lu[std::size_t(count - 1)].solve(y[std::size_t(count - 1)]);
        for (int i = count - 2; i >= 0; --i) {
            const int node = first + i;
            x[std::size_t(i)] =
                f.lu[std::size_t(i)].solve(y[std::size_t(i)] - block(node, 0, 1) * x[std::size_t(i + 1)]);
        }
        return x;
    }

private:
    struct Factor {
        std::vector<Eigen::PartialPivLU<Mat>> lu;  // modified diagonal blocks
    };

    const Factor& factor(int first) const {
        auto& slot = first == 0 ? f0_ : f1_;
        auto& flag = first == 0 ? once0_ : once1_;
        std::call_once(flag, [&] {
            auto f = std::make_unique<Factor>();
            for (int node = first; node < mesh_.M; ++node) {
                Mat D = block(node, 0, 0);
                if (node > 0) D += block(node - 1, 1, 1);
                if (node > first) D -= block(node - 1, 1, 0) * f->lu.back().solve(block(node - 1, 0, 1));
                f->lu.emplace_back(D);
                const double rc = f->lu.back().rcond();
                if (!(rc > 1e-14)) {
                    std::ostringstream os;
                    os << "fd-oracle: singular block at t-node " << node << " (rcond " << rc << ")";
                    throw NumericalError(os.str());
                }
            }
            slot = std::move(f);
        });
        return *slot;
    }

    StripMesh mesh_;
    Eigen::Index K_ = 0;
    Mat Kaa_, Kb_, Kc_, Kd_;
    RVec xi2_;
    std::vector<double> h_;
    mutable std::once_flag once0_, once1_;
    mutable std::unique_ptr<Factor> f0_, f1_;
};

OracleProblem::OracleProblem(const CoefficientField& A, const StripMesh& mesh, const OracleOptions& opt)
    : mesh_(mesh), opt_(opt) {
    mesh.validate();
    if (!(A.grid == mesh.grid)) throw InputError("fd-oracle: coefficient grid differs from mesh grid");
    if (opt.enforce_mesh_invariants) {
        if (mesh.T_max < 4.0 * mesh.grid.L) throw InputError("fd-oracle: T_max must be at least 4 L");
        if (mesh.M < 2 * mesh.grid.N) throw InputError("fd-oracle: M must be at least 2 N");
    }
    sys_ = std::make_unique<StripSystem>(A, mesh, opt.scheme);
}

OracleProblem::~OracleProblem() = default;
OracleProblem::OracleProblem(OracleProblem&&) noexcept = default;
OracleProblem& OracleProblem::operator=(OracleProblem&&) noexcept = default;

Eigen::Index OracleProblem::K() const { return sys_->K(); }

std::vector<Mat> OracleProblem::solve_neumann_modes(const Mat& l_hat) const {
    const Eigen::Index K = sys_->K();
    if (l_hat.rows() != K) throw InputError("fd-oracle: datum size does not match the grid");
    const int M = mesh_.M;
    std::vector<Mat> rhs(std::size_t(M), Mat::Zero(K, l_hat.cols()));
    rhs[0] = l_hat;
    rhs[0].row(0).setZero();
    std::vector<Mat> x = sys_->solve(0, rhs);
    std::vector<Mat> out(std::size_t(l_hat.cols()), Mat::Zero(K, M + 1));
    for (Eigen::Index c = 0; c < l_hat.cols(); ++c)
        for (int i = 0; i < M; ++i) out[std::size_t(c)].col(i) = x[std::size_t(i)].col(c);
    return out;
}

Mat OracleProblem::solve_regularity_modes(const Mat& w) const {
    const Eigen::Index K = sys_->K();
    const int M = mesh_.M;
    if (w.rows() != K || w.cols() != M + 1) throw InputError("fd-oracle: lifting has the wrong shape");
    if (w.col(M).norm() != 0.0) throw InputError("fd-oracle: lifting must vanish at T_max");
    if (M < 2) throw InputError("fd-oracle: regularity solve needs M >= 2");
    Mat r = sys_->apply(w);
    std::vector<Mat> rhs(std::size_t(M - 1));
    for (int i = 1; i < M; ++i) rhs[std::size_t(i - 1)] = -r.col(i);
    std::vector<Mat> x = sys_->solve(1, rhs);
    Mat v = w;
    for (int i = 1; i < M; ++i) v.col(i) += x[std::size_t(i - 1)];
    return v;
}

Vec OracleProblem::conormal_functional(const Mat& U) const { return sys_->apply(U).col(0); }

cplx OracleProblem::form(const Mat& U, const Mat& V) const {
    const Mat R = sys_->apply(U);
    cplx acc = 0.0;
    for (Eigen::Index i = 0; i < R.cols(); ++i) acc += V.col(i).dot(R.col(i));
    return acc;
}

double OracleProblem::energy(const Mat& U) const { return sys_->energy(U); }

double OracleProblem::neumann_residual(const Mat& U, const Vec& l_hat) const {
    Mat R = sys_->apply(U);
    R.col(0) -= l_hat;
    R(0, 0) += l_hat(0);
    const double scale = std::max(l_hat.norm(), 1e-300);
    return R.leftCols(mesh_.M).norm() / scale;
}

namespace {

void require_mean_zero(const Vec& f, const char* what) {
    const double tol = 1e-10 * std::max(1.0, f.cwiseAbs().maxCoeff());
    if (std::abs(mean(f)) > tol) throw InputError(std::string(what) + ": datum must have zero mean");
}

}  // namespace

OracleSolution energy_solve_neumann(const CoefficientField& A, const Vec& ell, const StripMesh& mesh,
                                    const OracleOptions& opt) {
    accretivity_bound(A);
    if (static_cast<std::size_t>(ell.size()) != mesh.grid.points())
        throw InputError("energy_solve_neumann: datum size does not match the grid");
    require_mean_zero(ell, "energy_solve_neumann");
    OracleProblem prob(A, mesh, opt);
    Vec l_hat = fft(mesh.grid, ell);
    l_hat(0) = 0.0;
    OracleSolution s;
    s.mesh = mesh;
    s.U = prob.solve_neumann_modes(l_hat)[0];
    s.residual = l_hat.norm() > 0.0 ? prob.neumann_residual(s.U, l_hat) : 0.0;
    if (s.residual > 1e-10) {
        std::ostringstream os;
        os << "energy_solve_neumann: linear solve residual " << s.residual << " above 1e-10";
        throw NumericalError(os.str());
    }
    s.form_value = std::real(prob.form(s.U, s.U));
    s.energy = prob.energy(s.U);
    // Gauge: zero boundary mean.
    s.U.row(0).array() -= s.U(0, 0);
    return s;
}

OracleSolution energy_solve_regularity(const CoefficientField& A, const Vec& f, const StripMesh& mesh,
                                       const OracleOptions& opt, Lifting lifting) {
    accretivity_bound(A);
    if (static_cast<std::size_t>(f.size()) != mesh.grid.points())
        throw InputError("energy_solve_regularity: datum size does not match the grid");
    require_mean_zero(f, "energy_solve_regularity");
    OracleProblem prob(A, mesh, opt);
    Vec f_hat = fft(mesh.grid, f);
    f_hat(0) = 0.0;
    Mat w = Mat::Zero(prob.K(), mesh.M + 1);
    w.col(0) = f_hat;
    if (lifting == Lifting::two_node && mesh.M >= 2) w.col(1) = 0.5 * f_hat;
    OracleSolution s;
    s.mesh = mesh;
    s.U = prob.solve_regularity_modes(w);
    s.form_value = std::real(prob.form(s.U, s.U));
    s.energy = prob.energy(s.U);
    return s;
}

Vec extract_conormal(const OracleSolution& u, const CoefficientField& A, const OracleOptions& opt) {
    OracleProblem prob(A, u.mesh, opt);
    return ifft(u.mesh.grid, prob.conormal_functional(u.U));
}

Mat gamma_nd_variational(const CoefficientField& A, const StripMesh& mesh, const OracleOptions& opt) {
    accretivity_bound(A);
    OracleProblem prob(A, mesh, opt);
    const GridSpec& g = mesh.grid;
    const Eigen::Index m = Eigen::Index(g.modes());
    Mat l_hat = Mat::Zero(prob.K(), m);
    for (Eigen::Index i = 0; i < m; ++i) l_hat(i + 1, i) = -1.0;
    std::vector<Mat> cols = prob.solve_neumann_modes(l_hat);
    RVec ax = mode_abs_xi(g);
    Mat G(m, m);
    double worst = 0.0;
    for (Eigen::Index c = 0; c < m; ++c) {
        worst = std::max(worst, prob.neumann_residual(cols[std::size_t(c)], l_hat.col(c)));
        G.col(c) = -(ax.cast<cplx>().cwiseProduct(cols[std::size_t(c)].col(0).tail(m)));
    }
    if (worst > 1e-10) {
        std::ostringstream os;
        os << "gamma_nd_variational: column solve residual " << worst << " above 1e-10";
        throw NumericalError(os.str());
    }
    return G;
}

std::vector<std::vector<Vec>> oracle_gradient(const OracleSolution& u) {
    const GridSpec& g = u.mesh.grid;
    AllModes a = all_modes(g);
    std::vector<double> h = u.mesh.widths();
    std::vector<std::vector<Vec>> out;
    out.reserve(h.size());
    for (int e = 0; e < u.mesh.M; ++e) {
        std::vector<Vec> lvl;
        const Vec u0 = u.U.col(e), u1 = u.U.col(e + 1);
        lvl.push_back(ifft(g, Vec((u1 - u0) / h[std::size_t(e)])));
        const Vec avg = 0.5 * (u0 + u1);
        for (int l = 0; l < g.n; ++l)
            lvl.push_back(ifft(g, Vec(cplx(0.0, 1.0) * a.xi.col(l).cast<cplx>().cwiseProduct(avg))));
        out.push_back(std::move(lvl));
    }
    return out;
}

std::vector<Vec> oracle_values(const OracleSolution& u) {
    std::vector<Vec> out;
    for (Eigen::Index i = 0; i < u.U.cols(); ++i) out.push_back(ifft(u.mesh.grid, Vec(u.U.col(i))));
    return out;
}

UniquenessReport uniqueness_probe(const CoefficientField& A, int M, double T_over_L, const OracleOptions& opt) {
    if (M < 1 || !(T_over_L > 0.0)) throw InputError("uniqueness_probe: invalid mesh parameters");
    const GridSpec& g = A.grid;
    UniquenessReport r;
    r.accretivity = accretivity_estimate(A);

    // Uniform mesh on [-T, T]; node 0 is t = -T. All nodes are free.
    StripMesh mesh;
    mesh.grid = g;
    mesh.M = 2 * M;
    mesh.T_max = 2.0 * T_over_L * g.L;
    for (int i = 0; i <= mesh.M; ++i) mesh.t.push_back(mesh.T_max * i / double(mesh.M));
    StripSystem sys(A, mesh, opt.scheme);
    const Eigen::Index K = sys.K();
    const Eigen::Index nodes = mesh.M + 1, dim = nodes * K;
    Mat full = Mat::Zero(dim, dim);
    for (int e = 0; e < mesh.M; ++e)
        for (int al = 0; al < 2; ++al)
            for (int be = 0; be < 2; ++be) full.block((e + al) * K, (e + be) * K, K, K) += sys.block(e, al, be);

    // Energy form: same assembly with A = I.
    StripSystem lap(CoefficientField::identity(g), mesh, opt.scheme);
    Mat E = Mat::Zero(dim, dim);
    for (int e = 0; e < mesh.M; ++e)
        for (int al = 0; al < 2; ++al)
            for (int be = 0; be < 2; ++be) E.block((e + al) * K, (e + be) * K, K, K) += lap.block(e, al, be);

    RVec sv = linalg::singular_values(full);
    const double smax = sv(0);
    r.kernel_dim = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) < 1e-9 * smax) ++r.kernel_dim;
    r.smallest_sv = sv(sv.size() - 1) / smax;
    r.second_sv = sv.size() > 1 ? sv(sv.size() - 2) / smax : 0.0;

    // Coercivity on the complement of constants.
    Vec c = Vec::Zero(dim);
    for (Eigen::Index i = 0; i < nodes; ++i) c(i * K) = 1.0;
    c.normalize();
    Eigen::HouseholderQR<Mat> qr(c);
    Mat Q = qr.householderQ();
    Mat basis = Q.rightCols(dim - 1);
    Mat H = basis.adjoint() * (0.5 * (full + full.adjoint())) * basis;
    Mat Er = basis.adjoint() * E * basis;
    H = 0.5 * (H + H.adjoint()).eval();
    Er = 0.5 * (Er + Er.adjoint()).eval();
    Eigen::GeneralizedSelfAdjointEigenSolver<Mat> ges(H, Er, Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
    if (ges.info() != Eigen::Success) throw NumericalError("uniqueness_probe: generalized eigenproblem failed");
    r.coercivity = ges.eigenvalues()(0);
    r.ok = r.kernel_dim == 1 && r.coercivity > 0.0;
    return r;
}

}  // namespace dblab
