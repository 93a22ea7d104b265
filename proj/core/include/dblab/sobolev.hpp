#pragma once

#include "dblab/grid.hpp"
#include "dblab/operators.hpp"

namespace dblab {

// psi(z) = z^k e^{-z sgn z}.
struct PsiSpec {
    int k = 1;
};

// k = 1 for s < 1, k = 2 for s = 1.
PsiSpec default_psi(double s);
void validate_psi(const PsiSpec& psi, double s);

// sqrt(Gamma(2k - 2s) / 2^(2k - 2s)).
double c_psi(int k, double s);

struct QuadOptions {
    int points = 200;
    double lo_factor = 1e-4;  // t_min = lo_factor / spectral radius
    double hi_factor = 1e2;   // t_max = hi_factor / margin
};

struct QuadReport {
    double value = 0.0;
    double doubled = 0.0;      // same quantity with twice the density
    double rel_change = 0.0;
    double tail_lo = 0.0;      // power-law estimate of the integral below t_min (included)
    double tail_hi = 0.0;      // integrand mass estimate beyond t_max (not included)
};

// (int_0^inf t^{-2s} |psi_t(S) F|^2 dt/t)^{1/2} for F in V-coordinates, evaluated
// per mode by numerical quadrature in log t.
double quad_norm_S(const GridSpec& g, const Vec& F, double s, PsiSpec psi = {});

// Same quadratic norm with S replaced by a general bisectorial operator.
double quad_norm_adapted(const FunctionalCalculus& op, const Vec& F, double s, PsiSpec psi = {},
                         const QuadOptions& q = {}, QuadReport* report = nullptr);

// (int_0^inf t^{-2s} |e^{-t|uT|} F|^2 dt/t)^{1/2}, s in [-1, 0).
double semigroup_norm(const FunctionalCalculus& uT, const Vec& F, double s, const QuadOptions& q = {},
                      QuadReport* report = nullptr);

}  // namespace dblab
