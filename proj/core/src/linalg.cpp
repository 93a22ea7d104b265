#include "dblab/linalg.hpp"

#include <algorithm>
#include <mutex>
#include <sstream>

#include <lapacke.h>

extern "C" void openblas_set_num_threads(int num_threads);

namespace dblab::linalg {
namespace {

lapack_complex_double* lp(cplx* p) { return reinterpret_cast<lapack_complex_double*>(p); }

void check_info(lapack_int info, const char* routine) {
    if (info != 0) {
        std::ostringstream os;
        os << routine << " failed with info = " << info;
        throw NumericalError(os.str());
    }
}

void check_finite(const Mat& a, const char* where) {
    if (!a.allFinite()) throw NumericalError(std::string(where) + ": non-finite matrix entries");
}

lapack_logical select_rhp(const lapack_complex_double* w) {
    const cplx* z = reinterpret_cast<const cplx*>(w);
    return z->real() > 0.0 ? 1 : 0;
}

struct BlasInit {
    BlasInit() { ensure_single_threaded_blas(); }
} blas_init;

}  // namespace

void ensure_single_threaded_blas() {
    static std::once_flag flag;
    std::call_once(flag, [] { openblas_set_num_threads(1); });
}

EigResult eig(const Mat& a) {
    ensure_single_threaded_blas();
    check_finite(a, "eig");
    const lapack_int n = static_cast<lapack_int>(a.rows());
    Mat work = a;
    EigResult r;
    r.values.resize(n);
    r.vectors.resize(n, n);
    cplx dummy;
    lapack_int info = LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'V', n, lp(work.data()), n, lp(r.values.data()),
                                    lp(&dummy), 1, lp(r.vectors.data()), n);
    check_info(info, "zgeev");
    return r;
}

SchurResult schur_rhp_first(const Mat& a) {
    ensure_single_threaded_blas();
    check_finite(a, "schur");
    const lapack_int n = static_cast<lapack_int>(a.rows());
    SchurResult r;
    r.u = a;
    r.q.resize(n, n);
    Vec w(n);
    lapack_int sdim = 0;
    lapack_int info = LAPACKE_zgees(LAPACK_COL_MAJOR, 'V', 'S', select_rhp, n, lp(r.u.data()), n, &sdim,
                                    lp(w.data()), lp(r.q.data()), n);
    check_info(info, "zgees");
    r.sdim = static_cast<int>(sdim);
    return r;
}

Mat sylvester_upper(const Mat& a, const Mat& b, const Mat& c) {
    ensure_single_threaded_blas();
    const lapack_int m = static_cast<lapack_int>(a.rows());
    const lapack_int n = static_cast<lapack_int>(b.rows());
    Mat x = c;
    if (m == 0 || n == 0) return x;
    double scale = 1.0;
    lapack_int info = LAPACKE_ztrsyl(LAPACK_COL_MAJOR, 'N', 'N', -1, m, n, lp(const_cast<cplx*>(a.data())), m,
                                     lp(const_cast<cplx*>(b.data())), n, lp(x.data()), m, &scale);
    if (info < 0) check_info(info, "ztrsyl");
    if (info == 1) warn("ztrsyl: spectra nearly overlap; perturbed values used");
    return x / scale;
}

RVec singular_values(const Mat& a) {
    ensure_single_threaded_blas();
    check_finite(a, "singular_values");
    const lapack_int m = static_cast<lapack_int>(a.rows());
    const lapack_int n = static_cast<lapack_int>(a.cols());
    if (m == 0 || n == 0) return RVec();
    Mat work = a;
    RVec s(std::min(m, n));
    cplx du, dvt;
    lapack_int info = LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'N', m, n, lp(work.data()), m, s.data(), lp(&du), 1,
                                     lp(&dvt), 1);
    check_info(info, "zgesdd");
    return s;
}

double norm2(const Mat& a) {
    RVec s = singular_values(a);
    return s.size() ? s(0) : 0.0;
}

double min_singular_value(const Mat& a) {
    RVec s = singular_values(a);
    return s.size() ? s(s.size() - 1) : 0.0;
}

double cond2(const Mat& a) {
    RVec s = singular_values(a);
    if (!s.size()) return 1.0;
    const double lo = s(s.size() - 1);
    return lo > 0.0 ? s(0) / lo : std::numeric_limits<double>::infinity();
}

double norm1(const Mat& a) {
    double best = 0.0;
    for (Eigen::Index j = 0; j < a.cols(); ++j) best = std::max(best, a.col(j).cwiseAbs().sum());
    return best;
}

Mat inverse(const Mat& a) {
    check_finite(a, "inverse");
    Eigen::PartialPivLU<Mat> lu(a);
    return lu.inverse();
}

RVec hermitian_eigenvalues(const Mat& a) {
    Eigen::SelfAdjointEigenSolver<Mat> es(a, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericalError("hermitian eigensolve failed");
    return es.eigenvalues();
}

}  // namespace dblab::linalg
