#pragma once

// Independent reference computations for the tests. Nothing here calls into the
// library's numerical kernels; each routine works from a direct formula.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "dblab/grid.hpp"

namespace oracle {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
constexpr double kPi = 3.14159265358979323846;

inline int signed_index(int k, int N) { return k < N / 2 ? k : k - N; }

// Orthonormal Fourier coefficients by the defining O(P^2) sum:
// c_k = (h^n / N^n)^(1/2) sum_x f(x) e^{-i xi_k . x}.
inline Vec naive_fft(const dblab::GridSpec& g, const Vec& f) {
    const int N = g.N;
    const double h = g.L / N, w = 2.0 * kPi / g.L;
    const std::size_t P = g.points();
    Vec c = Vec::Zero(Eigen::Index(P));
    for (std::size_t k = 0; k < P; ++k) {
        const int k1 = signed_index(int(k % N), N), k2 = g.n == 2 ? signed_index(int(k / N), N) : 0;
        cplx s = 0.0;
        for (std::size_t x = 0; x < P; ++x) {
            const double x1 = h * double(x % N), x2 = g.n == 2 ? h * double(x / N) : 0.0;
            s += f(Eigen::Index(x)) * std::exp(cplx(0.0, -w * (k1 * x1 + k2 * x2)));
        }
        c(Eigen::Index(k)) = s;
    }
    return c * std::sqrt(std::pow(h / N, g.n));
}

// Samples of x -> fn(x1, x2) on the grid.
inline Vec sample(const dblab::GridSpec& g, const std::function<cplx(double, double)>& fn) {
    const std::size_t P = g.points();
    Vec v(static_cast<Eigen::Index>(P));
    for (std::size_t x = 0; x < P; ++x)
        v(Eigen::Index(x)) =
            fn(g.h() * double(x % std::size_t(g.N)), g.n == 2 ? g.h() * double(x / std::size_t(g.N)) : 0.0);
    return v;
}

// Pointwise hat transform of a (1+n)x(1+n) matrix in block form [[a, b], [c, d]]:
// [[1/a, -b/a], [c/a, d - c b / a]].
inline Mat hat(const Mat& A) {
    const Eigen::Index n = A.rows() - 1;
    const cplx a = A(0, 0);
    Mat H(A.rows(), A.cols());
    H(0, 0) = 1.0 / a;
    H.block(0, 1, 1, n) = -A.block(0, 1, 1, n) / a;
    H.block(1, 0, n, 1) = A.block(1, 0, n, 1) / a;
    H.block(1, 1, n, n) = A.block(1, 1, n, n) - A.block(1, 0, n, 1) * A.block(0, 1, 1, n) / a;
    return H;
}

// Smallest eigenvalue of the Hermitian part of a 2x2 or 3x3 matrix from the
// characteristic polynomial (trigonometric form for the cubic).
inline double min_hermitian_eig(const Mat& A) {
    const Mat H = 0.5 * (A + A.adjoint());
    if (H.rows() == 2) {
        const double tr = H.trace().real(), det = H.determinant().real();
        return 0.5 * tr - std::sqrt(std::max(0.0, 0.25 * tr * tr - det));
    }
    const double q = H.trace().real() / 3.0;
    const Mat K = H - q * Mat::Identity(3, 3);
    const double p = std::sqrt((K * K).trace().real() / 6.0);
    if (p == 0.0) return q;
    const double r = std::clamp((K / p).determinant().real() / 2.0, -1.0, 1.0);
    const double phi = std::acos(r) / 3.0;
    return q + 2.0 * p * std::cos(phi + 2.0 * kPi / 3.0);
}

// Decaying exponent mu (Re mu < 0) of u = e^{i xi.x + mu t} for -div A grad u = 0
// with constant A: a mu^2 + i (b + c).xi mu - xi.d.xi = 0.
inline cplx decay_exponent(const Mat& A, const std::vector<double>& xi) {
    const int n = int(A.rows()) - 1;
    cplx bc = 0.0, dd = 0.0;
    for (int j = 0; j < n; ++j) {
        bc += (A(0, 1 + j) + A(1 + j, 0)) * xi[std::size_t(j)];
        for (int k = 0; k < n; ++k) dd += xi[std::size_t(j)] * A(1 + j, 1 + k) * xi[std::size_t(k)];
    }
    const cplx a = A(0, 0), B = cplx(0, 1) * bc;
    const cplx disc = std::sqrt(B * B + 4.0 * a * dd);
    const cplx m1 = (-B + disc) / (2.0 * a), m2 = (-B - disc) / (2.0 * a);
    return m1.real() < 0 ? m1 : m2;
}

// Conormal derivative (first entry of A grad u) of the decaying mode u = e^{i xi.x + mu t}.
inline cplx conormal_symbol(const Mat& A, const std::vector<double>& xi) {
    const cplx mu = decay_exponent(A, xi);
    cplx r = A(0, 0) * mu;
    for (std::size_t j = 0; j < xi.size(); ++j) r += A(0, Eigen::Index(1 + j)) * cplx(0, xi[j]);
    return r;
}

// Gamma_ND for constant A in V-coordinates: the par coordinate -|xi| u_hat of the
// tangential gradient per unit conormal coordinate.
inline cplx gamma_nd_symbol(const Mat& A, const std::vector<double>& xi) {
    double a = 0.0;
    for (double v : xi) a += v * v;
    return -std::sqrt(a) / conormal_symbol(A, xi);
}

// int_0^inf g(u) du by composite Simpson on u = e^y, y in [y0, y1].
inline double log_simpson(const std::function<double(double)>& g, double y0 = -40.0, double y1 = 5.0,
                          int panels = 20000) {
    const double hy = (y1 - y0) / panels;
    double acc = 0.0;
    for (int i = 0; i <= panels; ++i) {
        const double y = y0 + hy * i, u = std::exp(y);
        const double w = (i == 0 || i == panels) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        acc += w * g(u) * u;
    }
    return acc * hy / 3.0;
}

// c_{psi,s} for psi(z) = z^k e^{-|z|} by quadrature of int u^{2k-2s} e^{-2u} du/u.
inline double c_psi_quadrature(int k, double s) {
    return std::sqrt(log_simpson([&](double u) { return std::pow(u, 2.0 * k - 2.0 * s - 1.0) * std::exp(-2.0 * u); }));
}

// e^{-t X} by Pade scaling and squaring (Eigen unsupported module).
inline Mat expm_neg(const Mat& X, double t) { return Mat(-t * X).exp(); }

}  // namespace oracle
