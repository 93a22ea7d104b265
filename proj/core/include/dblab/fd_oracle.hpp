#pragma once

#include <memory>

#include "dblab/coefficients.hpp"

namespace dblab {

// Variational solver on the truncated strip [0, T_max] x torus. Trial and test
// spaces are P1 elements in t (graded mesh) times trigonometric polynomials of
// degree < N/2 in x; homogeneous Dirichlet condition at t = T_max.

enum class XScheme {
    galerkin,     // exact integrals of products with the trigonometric interpolant of A
    collocation,  // grid quadrature of the products (aliased, matches the grid operators)
};

std::string to_string(XScheme s);
XScheme xscheme_from_string(const std::string& s);

struct StripMesh {
    GridSpec grid;
    double T_max = 0.0;
    int M = 0;                  // t-cells
    std::vector<double> t;      // M + 1 nodes, t[0] = 0, t[M] = T_max

    // Graded nodes t_i = t0 (exp(beta i / M) - 1), t0 = L / N.
    static StripMesh graded(const GridSpec& g, int M, double T_max_over_L = 8.0);
    void validate() const;
    std::vector<double> midpoints() const;
    std::vector<double> widths() const;
};

struct OracleOptions {
    XScheme scheme = XScheme::galerkin;
    bool enforce_mesh_invariants = true;  // T_max >= 4L, M >= 2N
};

// Discrete solution: Fourier coefficients (orthonormal basis, all N^n modes,
// flat frequency order) of u at each t node. Column i is node i; the last
// column (t = T_max) is zero.
struct OracleSolution {
    StripMesh mesh;
    Mat U;                       // K x (M + 1)
    double energy = 0.0;         // iint |grad u|^2 of the discrete field
    double form_value = 0.0;     // Re iint A grad u . conj(grad u)
    double residual = 0.0;       // relative residual of the linear solve
};

class StripSystem;

// Assembled discrete form for one coefficient field and mesh. Immutable; the
// factorizations are computed on construction.
class OracleProblem {
public:
    OracleProblem(const CoefficientField& A, const StripMesh& mesh, const OracleOptions& opt = {});
    ~OracleProblem();
    OracleProblem(OracleProblem&&) noexcept;
    OracleProblem& operator=(OracleProblem&&) noexcept;

    const StripMesh& mesh() const { return mesh_; }
    const OracleOptions& options() const { return opt_; }
    Eigen::Index K() const;

    // Solves B(u, phi) = <l, phi(0)> for all test phi. `l_hat` holds the
    // orthonormal Fourier coefficients of l (K entries, zero mode ignored);
    // several right-hand sides may be given as columns. Returns K x (M+1)
    // blocks stacked per column: result[c] is the nodal matrix of column c.
    std::vector<Mat> solve_neumann_modes(const Mat& l_hat) const;
    // Solves with essential data u(0) = f given through a lifting `w` (K x (M+1),
    // w(:, 0) = f_hat, w(:, M) = 0). Returns v = u + w.
    Mat solve_regularity_modes(const Mat& w) const;

    // (K U)(node 0): the functional l recovered from the bilinear identity.
    Vec conormal_functional(const Mat& U) const;
    // B(U, V) and the plain Dirichlet energy of U.
    cplx form(const Mat& U, const Mat& V) const;
    double energy(const Mat& U) const;
    // Relative residual of the interior (and, for Neumann, node-0) equations.
    double neumann_residual(const Mat& U, const Vec& l_hat) const;

private:
    StripMesh mesh_;
    OracleOptions opt_;
    std::unique_ptr<StripSystem> sys_;
};

// ell is the physical boundary functional (mean-zero); the conormal derivative
// of the solution is -ell. The boundary mean of u is removed after the solve.
OracleSolution energy_solve_neumann(const CoefficientField& A, const Vec& ell, const StripMesh& mesh,
                                    const OracleOptions& opt = {});

enum class Lifting { first_node, two_node };

// Essential data u(0) = f (mean-zero) with homogeneous Dirichlet at T_max.
OracleSolution energy_solve_regularity(const CoefficientField& A, const Vec& f, const StripMesh& mesh,
                                       const OracleOptions& opt = {}, Lifting lifting = Lifting::first_node);

// Boundary functional l (physical values) with <l, phi> = B(u, phi) for the
// lifted test function of every boundary mode.
Vec extract_conormal(const OracleSolution& u, const CoefficientField& A, const OracleOptions& opt = {});

// m x m matrix acting on nonzero modes: Neumann datum f (perp V-coordinate) to
// the par V-coordinate -|xi| u_hat(0) of the tangential gradient trace.
Mat gamma_nd_variational(const CoefficientField& A, const StripMesh& mesh, const OracleOptions& opt = {});

// Physical [d_t u, grad_x u] at the element midpoints.
std::vector<std::vector<Vec>> oracle_gradient(const OracleSolution& u);
// Physical u at the nodes.
std::vector<Vec> oracle_values(const OracleSolution& u);

struct UniquenessReport {
    int kernel_dim = 0;
    double smallest_sv = 0.0;      // relative to the largest
    double second_sv = 0.0;        // relative to the largest
    double coercivity = 0.0;       // min Re form / energy on mean-zero functions
    double accretivity = 0.0;      // pointwise bound of the coefficients (no rejection)
    bool ok = false;
};

// Full form on the doubled strip [-T, T] with natural conditions at both ends;
// the kernel should consist of constants only.
UniquenessReport uniqueness_probe(const CoefficientField& A, int M = 16, double T_over_L = 1.0,
                                  const OracleOptions& opt = {});

}  // namespace dblab
