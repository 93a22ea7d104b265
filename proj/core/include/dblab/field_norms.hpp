#pragma once

#include "dblab/solvers.hpp"

namespace dblab {

// W(t, x) = (t / c0, c0 t) x B(x; c1 t).
struct WhitneyParams {
    double c0 = 2.0;
    double c1 = 1.0;

    void validate() const;
};

enum class FieldPart { u, gradient, conormal };

// Modified nontangential maximal function over dyadic levels t = 2^j whose
// Whitney box fits inside the covered t range; returns its boundary L2 norm.
// At each level the value is (|W| avg_W |g|^2 / t^(1+n))^(1/2), with |W| the
// continuum volume and avg_W a discrete average: balls snap to grid points (at
// least the centre point is always included) and t averages use trapezoid
// weights on the levels inside the box. Sub-grid boxes reduce to point values
// instead of inflating.
double nontangential_norm(const StripField& f, FieldPart part = FieldPart::gradient, const WhitneyParams& p = {});

// Pointwise values of the same maximal function on the boundary grid.
RVec nontangential_function(const StripField& f, FieldPart part = FieldPart::gradient, const WhitneyParams& p = {});

// Measure of {y : |y - x| < r} on the torus.
double torus_ball_measure(const GridSpec& g, double r);

// Number of dyadic levels available for the given coverage.
int dyadic_levels(const std::vector<double>& t_grid, const WhitneyParams& p = {});

struct StripQuadReport {
    double value = 0.0;    // the norm (square root of the integral)
    double integral = 0.0;
    double tail_lo = 0.0;  // fitted contribution of (0, t_min), included
    double tail_hi = 0.0;  // estimated contribution beyond t_max, not included
};

// (int_0^inf t |grad u(t)|_2^2 dt)^(1/2).
double square_function_norm(const StripField& f, StripQuadReport* report = nullptr);
// (int_0^inf |grad u(t)|_2^2 dt)^(1/2).
double energy_norm(const StripField& f, StripQuadReport* report = nullptr);

}  // namespace dblab
