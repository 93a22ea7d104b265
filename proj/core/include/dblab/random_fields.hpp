#pragma once

#include "dblab/grid.hpp"

namespace dblab {

// Random mean-zero scalar field whose Fourier coefficient at frequency xi depends
// only on (seed, xi), so the same seed yields consistent fields on refined grids.
// Coefficients decay like (1 + |xi|)^(-decay); Nyquist modes are left empty.
// max_freq > 0 restricts to |xi_l| <= max_freq.
Vec random_scalar_field(const GridSpec& g, std::uint64_t seed, double decay = 1.5, int max_freq = 0);

// Random vector in V-coordinates of the curl-free space built from two such fields.
Vec random_vcoords(const GridSpec& g, std::uint64_t seed, double decay = 1.5, int max_freq = 0);

// Real stream function psi of trigonometric degree <= degree and the
// divergence-free field gamma = amplitude * (d2 psi, -d1 psi). Requires n = 2.
std::vector<Vec> stream_function_gamma(const GridSpec& g, std::uint64_t seed, double amplitude, int degree = 3);

}  // namespace dblab
