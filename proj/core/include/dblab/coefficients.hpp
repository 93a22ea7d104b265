#pragma once

#include <functional>
#include <random>
#include <string>

#include "dblab/grid.hpp"

namespace dblab {

enum class BlockClass { general, lower_triangular, upper_triangular, block_diagonal };

std::string to_string(BlockClass c);
BlockClass block_class_from_string(const std::string& s);

// Grid samples of a (1+n)x(1+n) complex matrix field. Block form
// [[a, b], [c, d]] with a scalar, b a row, c a column, d the tangential block.
struct CoefficientField {
    GridSpec grid;
    int dim = 2;
    std::vector<Vec> entries;  // row-major, entries[r * dim + c] holds samples of A_rc
    double lambda = 0.0;       // min over points of the smallest eigenvalue of Re A(x)
    double Lambda = 0.0;       // max over points of |A(x)|_2
    BlockClass block_class = BlockClass::general;

    const Vec& at(int r, int c) const { return entries[std::size_t(r * dim + c)]; }
    Vec& at(int r, int c) { return entries[std::size_t(r * dim + c)]; }
    Mat matrix_at(std::size_t point) const;

    // Builds a field from a pointwise function; metadata is computed and strict
    // accretivity enforced unless `require_accretive` is false.
    static CoefficientField from_function(const GridSpec& g, const std::function<Mat(double, double)>& fn,
                                          bool require_accretive = true);
    static CoefficientField constant(const GridSpec& g, const Mat& a0);
    static CoefficientField identity(const GridSpec& g) {
        return constant(g, Mat::Identity(1 + g.n, 1 + g.n));
    }

    // Recomputes lambda, Lambda and block_class from the samples.
    void refresh(bool require_accretive = true);
};

// min_x lambda_min((A + A*)/2) without rejection.
double accretivity_estimate(const CoefficientField& A);
// Same, rejecting non-accretive fields.
double accretivity_bound(const CoefficientField& A);
double sup_norm(const CoefficientField& A);
BlockClass classify(const CoefficientField& A);
double max_abs_difference(const CoefficientField& A, const CoefficientField& B);

// A -> [[1/a, -b/a], [c/a, d - c b/a]] pointwise.
CoefficientField hat_transform(const CoefficientField& A);

// A + M_gamma with M_gamma = [[0, gamma^t], [-gamma, 0]]; gamma must be
// discretely divergence-free.
CoefficientField mgamma_perturb(const CoefficientField& A, const std::vector<Vec>& gamma);
double divergence_defect(const GridSpec& g, const std::vector<Vec>& gamma);

enum class FamilyKind {
    constant,
    smooth_trig,
    piecewise_random,
    lower_triangular_random,
    upper_triangular_random,
    block_diagonal_random
};

std::string to_string(FamilyKind k);
FamilyKind family_kind_from_string(const std::string& s);

struct FamilySpec {
    FamilyKind kind = FamilyKind::constant;
    double lambda_floor = 0.5;
    double Lambda_cap = 2.0;
    double amplitude = 0.3;        // smooth_trig perturbation size
    int max_mode = 3;              // trigonometric degree of random entries
    int dyadic_level = 3;          // piecewise families: 2^level cells per axis
    bool piecewise = false;        // triangular/diagonal random kinds: piecewise instead of trig
    BlockClass structure = BlockClass::general;  // smooth_trig / piecewise_random
    Mat base;                      // constant / smooth_trig base matrix; identity if empty
    std::uint64_t seed = 0;
};

// A coefficient defined on the continuum torus; sampling it on different grids
// yields consistent fields for refinement studies.
class ContinuumCoefficient {
public:
    ContinuumCoefficient(int n, double L, std::function<Mat(double, double)> fn)
        : n_(n), L_(L), fn_(std::move(fn)) {}
    Mat operator()(double x1, double x2) const { return fn_(x1, x2); }
    CoefficientField sample(const GridSpec& g) const;
    int n() const { return n_; }
    double L() const { return L_; }

private:
    int n_;
    double L_;
    std::function<Mat(double, double)> fn_;
};

ContinuumCoefficient make_continuum(const FamilySpec& spec, int n, double L = 2.0 * kPi);
CoefficientField make_family(const FamilySpec& spec, const GridSpec& g);

// Portable uniform in [0, 1): 53 high bits of mt19937_64.
class UniformStream {
public:
    explicit UniformStream(std::uint64_t seed) : eng_(seed) {}
    double next() { return double(eng_() >> 11) * 0x1.0p-53; }
    double symmetric() { return 2.0 * next() - 1.0; }

private:
    std::mt19937_64 eng_;
};

}  // namespace dblab
