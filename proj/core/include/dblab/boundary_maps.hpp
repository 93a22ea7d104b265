#pragma once

#include "dblab/operators.hpp"

namespace dblab {

// Blocks of a sign operator along the perp/par split of V-coordinates.
struct SgnBlocks {
    GridSpec grid;
    Mat s11, s12, s21, s22;
    double weight_s = 0.0;

    Mat assemble() const;
};

SgnBlocks sgn_blocks(const GridSpec& g, const Mat& sgn, double weight_s = 0.0);

// W X W^{-1} with W = diag(|xi|^s) on a single half of V-coordinates.
Mat weighted_half(const GridSpec& g, const Mat& x, double s);
double weighted_norm(const GridSpec& g, const Mat& x, double s);

struct MapResult {
    Mat map;                        // unweighted V-coordinate matrix (empty if not invertible)
    bool invertible = false;
    double min_sv = 0.0;            // weighted min singular value of the inverted block
    double factorization_mismatch = 0.0;  // weighted, relative, between the two formulas
    double weighted_norm = 0.0;     // weighted operator norm of the map
};

struct MapOptions {
    double floor = 1e-8;  // minimal weighted singular value of the inverted block
};

// s12^{-1} (I - s11), cross-checked against (I - s22)^{-1} s21.
MapResult gamma_nd(const SgnBlocks& b, double s, const MapOptions& opt = {});
// s21^{-1} (I - s22), cross-checked against (I - s11)^{-1} s12.
MapResult gamma_dn(const SgnBlocks& b, double s, const MapOptions& opt = {});
// -s12^{-1} (I + s11), cross-checked against -(I + s22)^{-1} s21.
MapResult gamma_minus(const SgnBlocks& b, double s, const MapOptions& opt = {});

struct KeyLemmaReport {
    double weight_s = -0.5;
    double sv_s12 = 0.0, sv_s21 = 0.0;
    double sv_s11_plus = 0.0, sv_s11_minus = 0.0;
    double sv_s22_plus = 0.0, sv_s22_minus = 0.0;
    double min_sv = 0.0;
    // ratios |(P u)_par| / |(P u)_perp| over random u for P = P+ and P-
    double ratio_plus_min = 0.0, ratio_plus_max = 0.0;
    double ratio_minus_min = 0.0, ratio_minus_max = 0.0;
    double floor = 1e-6;
    bool ok = false;
};

KeyLemmaReport key_lemma_check(const GridSpec& g, const Mat& sgn, double s = -0.5, double floor = 1e-6,
                               int samples = 16, std::uint64_t seed = 7);

struct RellichResult {
    double forward = 0.0;   // |Gamma_ND| in L2
    double inverse = 0.0;   // |Gamma_DN| in L2
    bool forward_bounded = false;
    bool inverse_bounded = false;
    double graph_residual = 0.0;          // max |P-[f; Gamma_ND f]| / |f| over random f
    double factorization_mismatch = 0.0;  // Gamma_ND, s = 0
};

RellichResult rellich_constant(const CoefficientField& A, const CalculusOptions& opt = {});
RellichResult rellich_from_sign(const GridSpec& g, const Mat& sgn_uT);

// Max over `samples` random f of |P-[f; gamma f]| / |f| with P- = (I - sgn)/2, in
// the |xi|^s-weighted norm.
double graph_residual(const GridSpec& g, const Mat& sgn, const Mat& gamma, double s, int samples = 8,
                      std::uint64_t seed = 11);

}  // namespace dblab
