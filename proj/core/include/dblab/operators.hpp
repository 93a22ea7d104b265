#pragma once

#include <memory>
#include <optional>

#include "dblab/coefficients.hpp"
#include "dblab/grid.hpp"

namespace dblab {

enum class SpaceTag { h0, weighted };

// Dense operator on the curl-free subspace in V-coordinates:
// [perp modes (m); par modes (m)] with m = grid.modes().
struct OperatorMatrix {
    GridSpec grid;
    Mat m;
    SpaceTag space = SpaceTag::h0;
    double weight_s = 0.0;

    Eigen::Index dim() const { return m.rows(); }
    Eigen::Index half() const { return m.rows() / 2; }
};

OperatorMatrix assemble_S(const GridSpec& g);
// Pi (multiply by B) Pi in V-coordinates, using collocation products on the grid.
OperatorMatrix assemble_calB(const CoefficientField& B, double accretivity_floor = 1e-10);
OperatorMatrix assemble_T(const OperatorMatrix& calB);   // calB * S
OperatorMatrix assemble_uT(const OperatorMatrix& calB);  // S * calB

// Products with S without forming it.
Mat times_S(const GridSpec& g, const Mat& m);  // m * S
Mat S_times(const GridSpec& g, const Mat& m);  // S * m
Vec S_apply(const GridSpec& g, const Vec& v);

// For lower-triangular B the perp/par block of calB vanishes; returns
// alpha (perp-perp), gamma (par-perp), delta (par-par).
struct LowerBlocks {
    Mat alpha, gamma, delta;
    double upper_right_norm = 0.0;
};
LowerBlocks lower_blocks(const OperatorMatrix& calB);

// Weight diag(|xi|^s) on both halves of V-coordinates.
RVec sobolev_weight(const GridSpec& g, double s);
Mat conjugate_weight(const Mat& m, const RVec& w_rows, const RVec& w_cols);

struct CalculusOptions {
    double margin_floor = 1e-8;   // min |Re lambda| for sign/semigroup use
    double cond_limit = 1e8;      // eigenbasis condition above which Schur is used
    double recon_tol = 1e-8;      // relative reconstruction error for reliability
    double newton_tol = 1e-12;
    int newton_max_iter = 100;
};

struct SpectralDecomposition {
    Vec values;
    Mat vectors;
    Mat inverse;
    double cond = 0.0;        // |W|_1 |W^{-1}|_1
    double margin = 0.0;      // min |Re lambda|
    double recon_error = 0.0; // |W L W^{-1} - M|_F / |M|_F
    bool reliable = false;
};

SpectralDecomposition decompose(const Mat& op, const CalculusOptions& opt = {});

// Functional calculus of a bisectorial matrix: sign, projectors, semigroups,
// powers and psi functions. Eigendecomposition is the default route; an ordered
// Schur form is used for sign and semigroups when the eigenbasis is unreliable.
class FunctionalCalculus {
public:
    explicit FunctionalCalculus(Mat op, CalculusOptions opt = {});

    const Mat& op() const { return op_; }
    const SpectralDecomposition& spectrum() const { return spec_; }
    const CalculusOptions& options() const { return opt_; }
    bool uses_schur() const { return schur_.has_value(); }
    Eigen::Index positive_count() const;

    const Mat& sign() const { return sign_; }
    Mat p_plus() const;
    Mat p_minus() const;

    // e^{-t op} F for F in the positive spectral subspace.
    Vec semigroup(double t, const Vec& F, double p_minus_tol = 1e-6) const;
    // e^{-t |op|} F for any F.
    Vec abs_semigroup(double t, const Vec& F) const;
    // psi(t op) F with psi(z) = z^k e^{-z sgn z}.
    Vec psi_apply(double t, int k, const Vec& F) const;
    // |op|^s with eigenvalues (lambda sgn Re lambda)^s, principal branch.
    Mat fractional_power(double s) const;

    double spectral_radius() const;

private:
    struct SchurData {
        Mat q1;   // basis of the positive invariant subspace
        Mat u11;  // op restricted to it
    };

    void require_eigen(const char* what) const;

    Mat op_;
    CalculusOptions opt_;
    SpectralDecomposition spec_;
    std::optional<SchurData> schur_;
    Mat sign_;
};

enum class SignMethod { eigen, newton };

struct NewtonReport {
    int iterations = 0;
    bool converged = false;
};

Mat matrix_sign_newton(const Mat& op, const CalculusOptions& opt = {}, NewtonReport* report = nullptr);
OperatorMatrix matrix_sign(const OperatorMatrix& op, SignMethod method, const CalculusOptions& opt = {});
std::pair<Mat, Mat> spectral_projectors(const Mat& sgn);
Vec semigroup_apply(const FunctionalCalculus& calc, double t, const Vec& F);
OperatorMatrix fractional_power(const OperatorMatrix& op, double s, const CalculusOptions& opt = {});

// Bundle of the operators attached to a coefficient field A (with B = hat(A)).
struct OperatorSet {
    GridSpec grid;
    CoefficientField A;
    CoefficientField B;
    OperatorMatrix calB;
    OperatorMatrix T;
    OperatorMatrix uT;
};
OperatorSet build_operators(const CoefficientField& A);

// Throws NumericalError when the margin of the spectrum is below the floor.
void check_bisectorial(const FunctionalCalculus& calc, const std::string& label);

struct KatoStats {
    double min_ratio = 0.0;
    double max_ratio = 0.0;
    int samples = 0;
};

// Ratios |L^{1/2} f| / |(-Delta)^{1/2} f| for L = -div d' grad built from the
// tangential block of `coeff`, over `samples` random mean-zero f.
KatoStats kato_check(const CoefficientField& coeff, int samples = 32, std::uint64_t seed = 1);

}  // namespace dblab
