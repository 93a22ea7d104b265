#include "dblab/sobolev.hpp"

#include <cmath>
#include <sstream>

namespace dblab {
namespace {

void check_s(double s) {
    if (!(s >= -1.0 && s <= 1.0)) throw InputError("Sobolev exponent must lie in [-1, 1]");
}

struct LogGrid {
    std::vector<double> t, w;  // nodes and trapezoid weights for dt/t
};

LogGrid log_grid(double t_lo, double t_hi, int points) {
    LogGrid g;
    const double a = std::log(t_lo), b = std::log(t_hi);
    const double h = (b - a) / double(points - 1);
    for (int i = 0; i < points; ++i) {
        g.t.push_back(std::exp(a + h * i));
        g.w.push_back((i == 0 || i == points - 1) ? 0.5 * h : h);
    }
    return g;
}

// Integrates integrand(t) dt/t over a log grid and adds a power-law tail below t_min.
template <class F>
double integrate(const LogGrid& g, double tail_power, F&& integrand, double* tail_lo, double* last) {
    double acc = 0.0, first = 0.0, end = 0.0;
    for (std::size_t i = 0; i < g.t.size(); ++i) {
        const double v = integrand(g.t[i]);
        if (i == 0) first = v;
        end = v;
        acc += g.w[i] * v;
    }
    const double tail = tail_power > 0.0 ? first / tail_power : 0.0;
    if (tail_lo) *tail_lo = tail;
    if (last) *last = end;
    return acc + tail;
}

}  // namespace

PsiSpec default_psi(double s) { return PsiSpec{s >= 1.0 ? 2 : 1}; }

void validate_psi(const PsiSpec& psi, double s) {
    if (psi.k < 1 || !(double(psi.k) > std::max(s, 0.0))) {
        std::ostringstream os;
        os << "psi order k = " << psi.k << " must exceed max(s, 0) for s = " << s;
        throw InputError(os.str());
    }
}

double c_psi(int k, double s) {
    const double a = 2.0 * k - 2.0 * s;
    return std::sqrt(std::tgamma(a) / std::pow(2.0, a));
}

double quad_norm_S(const GridSpec& g, const Vec& F, double s, PsiSpec psi) {
    check_s(s);
    validate_psi(psi, s);
    const std::size_t m = g.modes();
    if (static_cast<std::size_t>(F.size()) != 2 * m) throw InputError("quad_norm_S: wrong vector length");
    RVec ax = mode_abs_xi(g);
    RVec weight(m);
    for (std::size_t i = 0; i < m; ++i)
        weight(Eigen::Index(i)) = std::norm(F(Eigen::Index(i))) + std::norm(F(Eigen::Index(m + i)));
    if (weight.sum() == 0.0) return 0.0;
    const double lo = ax.minCoeff(), hi = ax.maxCoeff();
    // Fine shared grid; per-mode integrands are sampled on the same nodes.
    const double t_lo = 1e-12 / hi, t_hi = 60.0 / lo;
    const int points = int(std::ceil(25.0 * std::log(t_hi / t_lo))) + 1;
    LogGrid lg = log_grid(t_lo, t_hi, points);
    const double p = 2.0 * psi.k - 2.0 * s;
    double acc = 0.0;
    for (std::size_t j = 0; j < lg.t.size(); ++j) {
        const double t = lg.t[j];
        double sum = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double z = t * ax(Eigen::Index(i));
            const double psi_abs = std::pow(z, psi.k) * std::exp(-z);
            sum += psi_abs * psi_abs * weight(Eigen::Index(i));
        }
        const double v = std::pow(t, -2.0 * s) * sum;
        acc += lg.w[j] * v;
        if (j == 0) acc += v / p;
    }
    return std::sqrt(acc);
}

double quad_norm_adapted(const FunctionalCalculus& op, const Vec& F, double s, PsiSpec psi, const QuadOptions& q,
                         QuadReport* report) {
    check_s(s);
    validate_psi(psi, s);
    if (F.norm() == 0.0) {
        if (report) *report = QuadReport{};
        return 0.0;
    }
    const double rho = op.spectral_radius(), margin = op.spectrum().margin;
    const double t_lo = q.lo_factor / rho, t_hi = q.hi_factor / margin;
    const double p = 2.0 * psi.k - 2.0 * s;
    auto integrand = [&](double t) { return std::pow(t, -2.0 * s) * op.psi_apply(t, psi.k, F).squaredNorm(); };
    double tail = 0.0, last = 0.0;
    const double v1 = integrate(log_grid(t_lo, t_hi, q.points), p, integrand, &tail, &last);
    double result = v1;
    if (report) {
        const double v2 = integrate(log_grid(t_lo, t_hi, 2 * q.points - 1), p, integrand, nullptr, nullptr);
        report->value = std::sqrt(v1);
        report->doubled = std::sqrt(v2);
        report->rel_change = std::abs(report->doubled - report->value) / report->value;
        report->tail_lo = tail;
        report->tail_hi = last;
        if (report->rel_change > 1e-4)
            warn("quad_norm_adapted: quadrature not converged under density doubling");
    }
    return std::sqrt(result);
}

double semigroup_norm(const FunctionalCalculus& uT, const Vec& F, double s, const QuadOptions& q,
                      QuadReport* report) {
    if (!(s >= -1.0 && s < 0.0)) throw InputError("semigroup_norm: s must lie in [-1, 0)");
    if (F.norm() == 0.0) {
        if (report) *report = QuadReport{};
        return 0.0;
    }
    const double rho = uT.spectral_radius(), margin = uT.spectrum().margin;
    const double t_lo = q.lo_factor / rho, t_hi = q.hi_factor / margin;
    const double p = -2.0 * s;
    auto integrand = [&](double t) { return std::pow(t, -2.0 * s) * uT.abs_semigroup(t, F).squaredNorm(); };
    double tail = 0.0, last = 0.0;
    const double v1 = integrate(log_grid(t_lo, t_hi, q.points), p, integrand, &tail, &last);
    if (report) {
        const double v2 = integrate(log_grid(t_lo, t_hi, 2 * q.points - 1), p, integrand, nullptr, nullptr);
        report->value = std::sqrt(v1);
        report->doubled = std::sqrt(v2);
        report->rel_change = std::abs(report->doubled - report->value) / report->value;
        report->tail_lo = tail;
        report->tail_hi = last;
        if (report->rel_change > 1e-4) warn("semigroup_norm: quadrature not converged under density doubling");
    }
    return std::sqrt(v1);
}

}  // namespace dblab
