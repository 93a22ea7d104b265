#include "dblab/grid.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <sstream>
#include <tuple>

#include <fftw3.h>

namespace dblab {
namespace {

// FFTW planning is not thread-safe; plans are created once per shape under a lock
// and executed with the new-array interface afterwards.
class PlanCache {
public:
    ~PlanCache() {
        for (auto& kv : plans_) fftw_destroy_plan(kv.second);
    }

    fftw_plan get(int n, int N, int sign) {
        std::lock_guard<std::mutex> lock(mu_);
        auto key = std::make_tuple(n, N, sign);
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;
        const int total = n == 1 ? N : N * N;
        fftw_complex* in = fftw_alloc_complex(total);
        fftw_complex* out = fftw_alloc_complex(total);
        int dims[2] = {N, N};
        fftw_plan p = fftw_plan_dft(n, dims, in, out, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
        fftw_free(in);
        fftw_free(out);
        plans_.emplace(key, p);
        return p;
    }

private:
    std::mutex mu_;
    std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

PlanCache& plans() {
    static PlanCache cache;
    return cache;
}

Vec raw_dft(const GridSpec& g, const Vec& in, int sign) {
    if (static_cast<std::size_t>(in.size()) != g.points()) throw InputError("field size does not match grid");
    Vec out(in.size());
    fftw_plan p = plans().get(g.n, g.N, sign);
    fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in.data())),
                     reinterpret_cast<fftw_complex*>(out.data()));
    return out;
}

void require_finite(const Vec& v, const char* what) {
    if (!v.allFinite()) throw InputError(std::string(what) + ": non-finite input");
}

}  // namespace

void GridSpec::validate() const {
    if (n != 1 && n != 2) throw InputError("grid: n must be 1 or 2");
    if (N < 8 || (N & (N - 1)) != 0) throw InputError("grid: N must be a power of two, N >= 8");
    if (!(L > 0.0) || !std::isfinite(L)) throw InputError("grid: L must be positive");
}

std::array<double, 2> grid_point(const GridSpec& g, std::size_t flat) {
    const double h = g.h();
    if (g.n == 1) return {h * double(flat), 0.0};
    return {h * double(flat % g.N), h * double(flat / g.N)};
}

std::array<double, 2> frequency(const GridSpec& g, std::size_t flat) {
    const double scale = 2.0 * kPi / g.L;
    if (g.n == 1) return {scale * signed_index(int(flat), g.N), 0.0};
    return {scale * signed_index(int(flat % g.N), g.N), scale * signed_index(int(flat / g.N), g.N)};
}

RVec mode_abs_xi(const GridSpec& g) {
    RVec out(g.modes());
    for (std::size_t i = 0; i < g.modes(); ++i) {
        auto xi = frequency(g, i + 1);
        out(i) = std::hypot(xi[0], xi[1]);
    }
    return out;
}

RMat mode_xi(const GridSpec& g) {
    RMat out(g.modes(), g.n);
    for (std::size_t i = 0; i < g.modes(); ++i) {
        auto xi = frequency(g, i + 1);
        for (int l = 0; l < g.n; ++l) out(i, l) = xi[l];
    }
    return out;
}

Vec fft(const GridSpec& g, const Vec& physical) {
    const double scale = std::sqrt(std::pow(g.h() / g.N, g.n));
    return raw_dft(g, physical, FFTW_FORWARD) * scale;
}

Vec ifft(const GridSpec& g, const Vec& coeffs) {
    const double scale = 1.0 / std::sqrt(std::pow(g.L, g.n));
    return raw_dft(g, coeffs, FFTW_BACKWARD) * scale;
}

Vec interpolant_coeffs(const GridSpec& g, const Vec& physical) {
    return raw_dft(g, physical, FFTW_FORWARD) / double(g.points());
}

double l2_norm(const GridSpec& g, const Vec& physical) {
    return std::sqrt(g.cell_volume()) * physical.norm();
}

std::complex<double> mean(const Vec& physical) {
    return physical.size() ? physical.mean() : cplx(0.0);
}

Vec scalar_to_modes(const GridSpec& g, const Vec& physical) {
    Vec c = fft(g, physical);
    return c.tail(g.modes());
}

Vec modes_to_scalar(const GridSpec& g, const Vec& modes) {
    if (static_cast<std::size_t>(modes.size()) != g.modes()) throw InputError("mode vector size mismatch");
    Vec c(g.points());
    c(0) = 0.0;
    c.tail(g.modes()) = modes;
    return ifft(g, c);
}

BoundaryField BoundaryField::zeros(const GridSpec& g) {
    BoundaryField F;
    F.grid = g;
    F.comp.assign(1 + g.n, Vec::Zero(g.points()));
    return F;
}

BoundaryField BoundaryField::to_physical() const {
    if (rep == Representation::physical) return *this;
    BoundaryField out = *this;
    for (auto& c : out.comp) c = ifft(grid, c);
    out.rep = Representation::physical;
    return out;
}

BoundaryField BoundaryField::to_frequency() const {
    if (rep == Representation::frequency) return *this;
    BoundaryField out = *this;
    for (auto& c : out.comp) c = fft(grid, c);
    out.rep = Representation::frequency;
    return out;
}

double BoundaryField::l2_norm() const {
    double s = 0.0;
    for (const auto& c : comp) s += c.squaredNorm();
    if (rep == Representation::physical) s *= grid.cell_volume();
    return std::sqrt(s);
}

void BoundaryField::validate() const {
    grid.validate();
    if (ncomp() != 1 + grid.n) throw InputError("boundary field must have 1+n components");
    for (const auto& c : comp) {
        if (static_cast<std::size_t>(c.size()) != grid.points()) throw InputError("boundary field size mismatch");
        require_finite(c, "boundary field");
    }
    if (h0) {
        BoundaryField f = to_frequency();
        const double tol = 1e-10 * std::max(1.0, l2_norm());
        for (const auto& c : f.comp)
            if (std::abs(c(0)) > tol) throw InputError("boundary field flagged h0 has nonzero mean");
        if (curl_defect(*this) > tol) throw InputError("boundary field flagged h0 is not curl-free");
    }
}

std::vector<Vec> riesz_apply(const GridSpec& g, const Vec& f) {
    require_finite(f, "riesz_apply");
    Vec c = fft(g, f);
    std::vector<Vec> out;
    for (int l = 0; l < g.n; ++l) {
        Vec r(g.points());
        r(0) = 0.0;
        for (std::size_t k = 1; k < g.points(); ++k) {
            auto xi = frequency(g, k);
            r(k) = cplx(0.0, xi[l] / std::hypot(xi[0], xi[1])) * c(k);
        }
        out.push_back(ifft(g, r));
    }
    return out;
}

Vec riesz_adjoint(const GridSpec& g, const std::vector<Vec>& f) {
    if (static_cast<int>(f.size()) != g.n) throw InputError("riesz_adjoint expects n components");
    Vec acc = Vec::Zero(g.points());
    for (int l = 0; l < g.n; ++l) {
        require_finite(f[l], "riesz_adjoint");
        Vec c = fft(g, f[l]);
        for (std::size_t k = 1; k < g.points(); ++k) {
            auto xi = frequency(g, k);
            acc(k) += cplx(0.0, -xi[l] / std::hypot(xi[0], xi[1])) * c(k);
        }
    }
    return ifft(g, acc);
}

std::vector<Vec> gradient(const GridSpec& g, const Vec& f) {
    Vec c = fft(g, f);
    std::vector<Vec> out;
    for (int l = 0; l < g.n; ++l) {
        Vec r(g.points());
        for (std::size_t k = 0; k < g.points(); ++k) r(k) = cplx(0.0, frequency(g, k)[l]) * c(k);
        out.push_back(ifft(g, r));
    }
    return out;
}

Vec divergence(const GridSpec& g, const std::vector<Vec>& f) {
    Vec acc = Vec::Zero(g.points());
    for (int l = 0; l < g.n; ++l) {
        Vec c = fft(g, f[l]);
        for (std::size_t k = 0; k < g.points(); ++k) acc(k) += cplx(0.0, frequency(g, k)[l]) * c(k);
    }
    return ifft(g, acc);
}

BoundaryField pi_project(const BoundaryField& F) {
    F.grid.validate();
    const GridSpec& g = F.grid;
    BoundaryField f = F.to_frequency();
    for (const auto& c : f.comp) require_finite(c, "pi_project");
    f.comp[0](0) = 0.0;
    for (int l = 1; l <= g.n; ++l) f.comp[l](0) = 0.0;
    if (g.n == 2) {
        for (std::size_t k = 1; k < g.points(); ++k) {
            auto xi = frequency(g, k);
            const double x2 = xi[0] * xi[0] + xi[1] * xi[1];
            const cplx dot = (xi[0] * f.comp[1](k) + xi[1] * f.comp[2](k)) / x2;
            f.comp[1](k) = xi[0] * dot;
            f.comp[2](k) = xi[1] * dot;
        }
    }
    f.h0 = true;
    return F.rep == Representation::physical ? f.to_physical() : f;
}

double curl_defect(const BoundaryField& F) {
    if (F.grid.n == 1) return 0.0;
    BoundaryField f = F.to_frequency();
    double worst = 0.0;
    for (std::size_t k = 1; k < F.grid.points(); ++k) {
        auto xi = frequency(F.grid, k);
        worst = std::max(worst, std::abs(xi[0] * f.comp[2](k) - xi[1] * f.comp[1](k)));
    }
    return worst;
}

BoundaryField v_apply(const GridSpec& g, const Vec& f, const Vec& gpar) {
    g.validate();
    require_finite(f, "v_apply");
    require_finite(gpar, "v_apply");
    Vec v(2 * g.modes());
    Vec cf = fft(g, f), cg = fft(g, gpar);
    const double tol = 1e-12 * std::max(1.0, std::max(cf.norm(), cg.norm()));
    if (std::abs(cf(0)) > tol || std::abs(cg(0)) > tol) warn("v_apply: zero-mode content stripped");
    v.head(g.modes()) = cf.tail(g.modes());
    v.tail(g.modes()) = cg.tail(g.modes());
    return from_vcoords(g, v);
}

std::pair<Vec, Vec> v_adjoint(const BoundaryField& F) {
    Vec v = to_vcoords(F);
    const std::size_t m = F.grid.modes();
    return {modes_to_scalar(F.grid, v.head(m)), modes_to_scalar(F.grid, v.tail(m))};
}

Vec to_vcoords(const BoundaryField& F) {
    const GridSpec& g = F.grid;
    if (F.ncomp() != 1 + g.n) throw InputError("to_vcoords: wrong component count");
    BoundaryField f = F.to_frequency();
    const std::size_t m = g.modes();
    Vec v(2 * m);
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t k = i + 1;
        auto xi = frequency(g, k);
        const double ax = std::hypot(xi[0], xi[1]);
        v(i) = f.comp[0](k);
        cplx q = 0.0;
        for (int l = 0; l < g.n; ++l) q += cplx(0.0, xi[l] / ax) * f.comp[1 + l](k);
        v(m + i) = q;
    }
    return v;
}

BoundaryField from_vcoords(const GridSpec& g, const Vec& v) {
    const std::size_t m = g.modes();
    if (static_cast<std::size_t>(v.size()) != 2 * m) throw InputError("from_vcoords: wrong vector length");
    BoundaryField f = BoundaryField::zeros(g);
    f.rep = Representation::frequency;
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t k = i + 1;
        auto xi = frequency(g, k);
        const double ax = std::hypot(xi[0], xi[1]);
        f.comp[0](k) = v(i);
        for (int l = 0; l < g.n; ++l) f.comp[1 + l](k) = cplx(0.0, -xi[l] / ax) * v(m + i);
    }
    f.h0 = true;
    return f.to_physical();
}

double sobolev_norm(const GridSpec& g, const Vec& f, double s) {
    if (!(s >= -1.0 && s <= 1.0)) throw InputError("sobolev_norm: s must lie in [-1, 1]");
    require_finite(f, "sobolev_norm");
    Vec c = fft(g, f);
    double acc = 0.0;
    for (std::size_t k = 1; k < g.points(); ++k) {
        auto xi = frequency(g, k);
        acc += std::pow(std::hypot(xi[0], xi[1]), 2.0 * s) * std::norm(c(k));
    }
    return std::sqrt(acc);
}

}  // namespace dblab
