#pragma once

#include "dblab/common.hpp"

namespace dblab::linalg {

struct EigResult {
    Vec values;
    Mat vectors;  // right eigenvectors as columns
};

// General complex eigendecomposition (LAPACK zgeev).
EigResult eig(const Mat& a);

struct SchurResult {
    Mat q;      // unitary
    Mat u;      // upper triangular, q u q* = a
    int sdim;   // number of leading eigenvalues with positive real part
};

// Complex Schur form ordered so that eigenvalues with Re > 0 come first (zgees).
SchurResult schur_rhp_first(const Mat& a);

// Solves a x - x b = c for x with a, b upper triangular (ztrsyl).
Mat sylvester_upper(const Mat& a, const Mat& b, const Mat& c);

// Singular values, descending (zgesdd).
RVec singular_values(const Mat& a);

double norm2(const Mat& a);
double min_singular_value(const Mat& a);
double cond2(const Mat& a);

// 1-norm (max column sum).
double norm1(const Mat& a);

Mat inverse(const Mat& a);

// Hermitian eigenvalues, ascending.
RVec hermitian_eigenvalues(const Mat& a);

// Caps BLAS threading at one thread for reproducibility. Called automatically
// before any LAPACK routine.
void ensure_single_threaded_blas();

}  // namespace dblab::linalg
