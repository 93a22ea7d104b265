#include "dblab/random_fields.hpp"

#include <cmath>

namespace dblab {
namespace {

double unit_from_hash(std::uint64_t h) { return double(h >> 11) * 0x1.0p-53; }

cplx keyed_gaussianish(std::uint64_t seed, int k1, int k2) {
    const std::uint64_t key = splitmix64(seed ^ splitmix64(std::uint64_t(std::int64_t(k1)) * 0x9e3779b97f4a7c15ULL ^
                                                           std::uint64_t(std::int64_t(k2)) * 0xc2b2ae3d27d4eb4fULL));
    const double re = 2.0 * unit_from_hash(splitmix64(key)) - 1.0;
    const double im = 2.0 * unit_from_hash(splitmix64(key + 1)) - 1.0;
    return cplx(re, im);
}

}  // namespace

Vec random_scalar_field(const GridSpec& g, std::uint64_t seed, double decay, int max_freq) {
    g.validate();
    Vec c = Vec::Zero(g.points());
    const double scale = std::sqrt(std::pow(g.L, g.n));
    for (std::size_t k = 1; k < g.points(); ++k) {
        const int k1 = signed_index(int(k % g.N), g.N);
        const int k2 = g.n == 2 ? signed_index(int(k / g.N), g.N) : 0;
        if (k1 == -g.N / 2 || k2 == -g.N / 2) continue;
        if (max_freq > 0 && (std::abs(k1) > max_freq || std::abs(k2) > max_freq)) continue;
        auto xi = frequency(g, k);
        c(Eigen::Index(k)) = keyed_gaussianish(seed, k1, k2) * std::pow(1.0 + std::hypot(xi[0], xi[1]), -decay);
    }
    // Coefficients are per unit basis function e^{i xi x}; convert to orthonormal scaling.
    return ifft(g, c * scale);
}

Vec random_vcoords(const GridSpec& g, std::uint64_t seed, double decay, int max_freq) {
    const std::size_t m = g.modes();
    Vec v(2 * m);
    v.head(m) = scalar_to_modes(g, random_scalar_field(g, splitmix64(seed), decay, max_freq));
    v.tail(m) = scalar_to_modes(g, random_scalar_field(g, splitmix64(seed + 1), decay, max_freq));
    return v;
}

std::vector<Vec> stream_function_gamma(const GridSpec& g, std::uint64_t seed, double amplitude, int degree) {
    if (g.n != 2) throw InputError("stream_function_gamma requires n = 2");
    if (2 * degree >= g.N) throw InputError("stream function degree too high for this grid");
    Vec psi = random_scalar_field(g, seed, 1.0, degree).real().cast<cplx>();
    auto grad = gradient(g, psi);
    return {amplitude * grad[1].real().cast<cplx>(), -amplitude * grad[0].real().cast<cplx>()};
}

}  // namespace dblab
