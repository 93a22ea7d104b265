#pragma once

#include <array>
#include <utility>

#include "dblab/common.hpp"

namespace dblab {

// Discrete torus [0, L)^n with N points per axis. Flat index runs x1 fastest.
struct GridSpec {
    int n = 1;
    int N = 64;
    double L = 2.0 * kPi;

    void validate() const;
    std::size_t points() const { return n == 1 ? std::size_t(N) : std::size_t(N) * N; }
    // Nonzero Fourier modes; V-coordinates of the curl-free space have twice this size.
    std::size_t modes() const { return points() - 1; }
    double h() const { return L / N; }
    double cell_volume() const { return n == 1 ? h() : h() * h(); }
    bool operator==(const GridSpec& o) const { return n == o.n && N == o.N && L == o.L; }
};

// Signed frequency index: k in [0, N/2) maps to k, k >= N/2 maps to k - N.
inline int signed_index(int k, int N) { return k < N / 2 ? k : k - N; }

std::array<double, 2> grid_point(const GridSpec& g, std::size_t flat);
std::array<double, 2> frequency(const GridSpec& g, std::size_t flat);

// |xi| and xi for the nonzero modes; entry i corresponds to flat index i + 1.
RVec mode_abs_xi(const GridSpec& g);
RMat mode_xi(const GridSpec& g);

// Orthonormal Fourier coefficients: ||fft(f)||_2 equals the discrete L2 norm
// (h^n sum |f|^2)^(1/2). Index 0 is the zero mode.
Vec fft(const GridSpec& g, const Vec& physical);
Vec ifft(const GridSpec& g, const Vec& coeffs);

// Coefficients of the trigonometric interpolant, p(x_j) = sum_k p_k e^{i xi_k x_j}.
Vec interpolant_coeffs(const GridSpec& g, const Vec& physical);

double l2_norm(const GridSpec& g, const Vec& physical);
std::complex<double> mean(const Vec& physical);

// Nonzero-mode coefficients of a scalar field, and back (zero mode set to 0).
Vec scalar_to_modes(const GridSpec& g, const Vec& physical);
Vec modes_to_scalar(const GridSpec& g, const Vec& modes);

enum class Representation { physical, frequency };

// C^{1+n}-valued field: component 0 is the normal (perp) part, 1..n tangential.
struct BoundaryField {
    GridSpec grid;
    std::vector<Vec> comp;
    Representation rep = Representation::physical;
    bool h0 = false;

    static BoundaryField zeros(const GridSpec& g);
    int ncomp() const { return static_cast<int>(comp.size()); }
    BoundaryField to_physical() const;
    BoundaryField to_frequency() const;
    double l2_norm() const;
    void validate() const;
};

// Riesz transforms, symbol i xi_j / |xi|; the zero mode is dropped.
std::vector<Vec> riesz_apply(const GridSpec& g, const Vec& f);
// Adjoint, symbol -i xi_j^T / |xi|.
Vec riesz_adjoint(const GridSpec& g, const std::vector<Vec>& f);

std::vector<Vec> gradient(const GridSpec& g, const Vec& f);
Vec divergence(const GridSpec& g, const std::vector<Vec>& f);

// Orthogonal projection onto the curl-free, mean-zero subspace.
BoundaryField pi_project(const BoundaryField& F);

// Max over nonzero modes of |xi_j F_k - xi_k F_j| for the tangential part.
double curl_defect(const BoundaryField& F);

// V: (f, g) -> [f; -R g] and its adjoint [F_perp; F_par] -> (F_perp, -R* F_par).
BoundaryField v_apply(const GridSpec& g, const Vec& f, const Vec& gpar);
std::pair<Vec, Vec> v_adjoint(const BoundaryField& F);

// V-coordinates: [perp modes; par modes], length 2 * modes(). Euclidean norm of
// the coordinate vector equals the L2 norm of the projected field.
Vec to_vcoords(const BoundaryField& F);
BoundaryField from_vcoords(const GridSpec& g, const Vec& v);

// Homogeneous Sobolev semi-norm (sum |xi|^{2s} |f_xi|^2)^(1/2), s in [-1, 1].
double sobolev_norm(const GridSpec& g, const Vec& f, double s);

}  // namespace dblab
