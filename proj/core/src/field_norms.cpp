#include "dblab/field_norms.hpp"

#include <cmath>
#include <sstream>

namespace dblab {

void WhitneyParams::validate() const {
    if (!(c0 > 1.0) || !(c1 > 0.0)) throw InputError("Whitney parameters need c0 > 1 and c1 > 0");
}

namespace {

const std::vector<Vec>& part_of(const StripField& f, FieldPart part, std::size_t i, std::vector<Vec>& scratch) {
    switch (part) {
        case FieldPart::u:
            if (!f.has_u) throw InputError("strip field has no u values");
            scratch.assign(1, f.u[i]);
            return scratch;
        case FieldPart::gradient:
            if (!f.has_grad) throw InputError("strip field has no gradient values");
            return f.grad[i];
        case FieldPart::conormal:
            if (!f.has_conormal) throw InputError("strip field has no conormal values");
            return f.conormal[i];
    }
    return scratch;
}

// |g(t_i, x)|^2 summed over components.
RVec pointwise_sq(const std::vector<Vec>& comps, std::size_t points) {
    RVec s = RVec::Zero(Eigen::Index(points));
    for (const auto& c : comps) s += c.cwiseAbs2();
    return s;
}

// Squared L2 norm per level.
std::vector<double> level_sq(const StripField& f) {
    if (!f.has_grad) throw InputError("strip quadrature needs gradient values");
    std::vector<double> out;
    const double dv = f.grid.cell_volume();
    for (const auto& lvl : f.grad) {
        double s = 0.0;
        for (const auto& c : lvl) s += c.squaredNorm();
        out.push_back(dv * s);
    }
    return out;
}

// C t0^p sum_k (-q t0)^k / (k! (p + k)) = int_0^t0 C t^{p-1} e^{-q t} dt.
double fitted_tail(double C, double p, double q, double t0) {
    double term = 1.0, acc = 0.0;
    const double x = -q * t0;
    for (int k = 0; k < 200; ++k) {
        const double add = term / (p + k);
        acc += add;
        if (std::abs(add) < 1e-17 * std::abs(acc)) break;
        term *= x / (k + 1);
    }
    return C * std::pow(t0, p) * acc;
}

// int_0^inf g(t) dt/t for samples g_i = g(t_i): trapezoid in log t, a fitted
// C t^p e^{-q t} model below t_min and an exponential tail estimate above t_max.
StripQuadReport log_quadrature(const std::vector<double>& t, const std::vector<double>& g, const char* what) {
    const std::size_t L = t.size();
    if (L < 4) throw InputError(std::string(what) + ": need at least 4 t levels");
    if (!(t.front() > 0.0)) throw InputError(std::string(what) + ": t levels must be positive");
    if (std::log10(t.back() / t.front()) < 3.0)
        throw InputError(std::string(what) + ": t levels must span at least 3 decades");
    StripQuadReport r;
    double acc = 0.0;
    for (std::size_t i = 1; i < L; ++i) acc += 0.5 * (g[i] + g[i - 1]) * std::log(t[i] / t[i - 1]);
    double gmax = 0.0;
    for (double v : g) gmax = std::max(gmax, v);
    if (gmax == 0.0) return r;

    // Lower tail.
    const double l0 = std::log(t[0]), l1 = std::log(t[1]), l2 = std::log(t[2]);
    double tail = 0.0;
    bool fitted = false;
    if (g[0] > 0.0 && g[1] > 0.0 && g[2] > 0.0) {
        Eigen::Matrix3d m;
        m << 1.0, l0, -t[0], 1.0, l1, -t[1], 1.0, l2, -t[2];
        Eigen::Vector3d rhs(std::log(g[0]), std::log(g[1]), std::log(g[2]));
        Eigen::Vector3d c = m.fullPivLu().solve(rhs);
        const double p = c(1), q = c(2);
        if (std::isfinite(p) && std::isfinite(q) && p > 0.2) {
            tail = fitted_tail(std::exp(c(0)), p, q, t[0]);
            fitted = std::isfinite(tail) && tail >= 0.0;
        }
        if (!fitted) {
            const double p2 = std::log(g[1] / g[0]) / (l1 - l0);
            if (p2 > 0.2) {
                tail = g[0] / p2;
                fitted = true;
            }
        }
    }
    if (!fitted) tail = g[0];
    r.tail_lo = tail;

    // Upper tail: exponential decay through the last two levels.
    const double ga = g[L - 2], gb = g[L - 1];
    if (gb == 0.0) {
        r.tail_hi = 0.0;
    } else if (ga > gb) {
        const double q = std::log(ga / gb) / (t[L - 1] - t[L - 2]);
        r.tail_hi = gb / (q * t[L - 1]);
    } else {
        r.tail_hi = std::numeric_limits<double>::infinity();
    }
    r.integral = acc + tail;
    r.value = std::sqrt(r.integral);
    if (!(r.tail_hi <= 1e-3 * r.integral) || r.tail_lo > 5e-2 * r.integral) {
        std::ostringstream os;
        os << what << ": insufficient t coverage (integral " << r.integral << ", lower tail " << r.tail_lo
           << ", upper tail " << r.tail_hi << ")";
        throw InputError(os.str());
    }
    return r;
}

}  // namespace

double torus_ball_measure(const GridSpec& g, double r) {
    const double L = g.L;
    if (g.n == 1) return std::min(2.0 * r, L);
    const double d = 0.5 * L;
    if (r >= d * std::sqrt(2.0)) return L * L;
    double area = kPi * r * r;
    // Remove the four caps beyond the sides of the fundamental square.
    if (r > d) area -= 4.0 * (r * r * std::acos(d / r) - d * std::sqrt(r * r - d * d));
    return area;
}

int dyadic_levels(const std::vector<double>& t, const WhitneyParams& p) {
    p.validate();
    if (t.empty() || !(t.front() > 0.0)) return 0;
    const int jlo = int(std::ceil(std::log2(t.front() * p.c0)));
    const int jhi = int(std::floor(std::log2(t.back() / p.c0)));
    return std::max(0, jhi - jlo + 1);
}

RVec nontangential_function(const StripField& f, FieldPart part, const WhitneyParams& p) {
    p.validate();
    const GridSpec& g = f.grid;
    const auto& t = f.t_grid;
    if (dyadic_levels(t, p) < 4) throw InputError("nontangential_norm: fewer than 4 dyadic levels covered");
    const int jlo = int(std::ceil(std::log2(t.front() * p.c0)));
    const int jhi = int(std::floor(std::log2(t.back() / p.c0)));
    const std::size_t P = g.points();
    const int N = g.N;
    const double h = g.h();

    std::vector<RVec> sq(t.size());
    std::vector<Vec> scratch;
    for (std::size_t i = 0; i < t.size(); ++i) sq[i] = pointwise_sq(part_of(f, part, i, scratch), P);

    RVec out = RVec::Zero(Eigen::Index(P));
    for (int j = jlo; j <= jhi; ++j) {
        const double tau = std::ldexp(1.0, j);
        const double a = tau / p.c0, b = tau * p.c0;
        // Trapezoid weights over the levels inside (a, b).
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < t.size(); ++i)
            if (t[i] > a && t[i] < b) idx.push_back(i);
        // t averages over the levels inside (a, b).
        RVec col = RVec::Zero(Eigen::Index(P));
        if (idx.size() == 1) {
            col = sq[idx[0]];
        } else {
            for (std::size_t k = 0; k + 1 < idx.size(); ++k) {
                const double w = 0.5 * (t[idx[k + 1]] - t[idx[k]]);
                col += w * (sq[idx[k]] + sq[idx[k + 1]]);
            }
            col /= t[idx.back()] - t[idx.front()];
        }
        const double r = p.c1 * tau;
        RVec box = RVec::Zero(Eigen::Index(P));
        double count = 0.0;  // grid points in the ball
        if (g.n == 1) {
            const int reach = std::min(int(std::floor(r / h + 1e-12)), (N - 1) / 2);
            // Circular window sums through a prefix sum over three periods.
            std::vector<double> pre(std::size_t(3 * N) + 1, 0.0);
            for (int k = 0; k < 3 * N; ++k) pre[std::size_t(k) + 1] = pre[std::size_t(k)] + col(k % N);
            for (int x = 0; x < N; ++x) {
                const int lo = N + x - reach, hi = N + x + reach;
                box(x) = pre[std::size_t(hi) + 1] - pre[std::size_t(lo)];
            }
            count = 2.0 * reach + 1.0;
            // The antipodal point of an even grid joins once the ball covers the torus.
            if (r >= g.L / 2.0) {
                box.setConstant(col.sum());
                count = N;
            }
        } else {
            std::vector<std::pair<int, int>> offsets;
            const int reach = std::min(int(std::floor(r / h + 1e-12)), N / 2);
            for (int d2 = -reach; d2 <= reach; ++d2)
                for (int d1 = -reach; d1 <= reach; ++d1) {
                    if (std::hypot(d1 * h, d2 * h) > r + 1e-12 * h) continue;
                    offsets.emplace_back(d1, d2);
                }
            // Distinct torus points only.
            std::vector<std::pair<int, int>> uniq;
            std::vector<char> seen(std::size_t(N) * N, 0);
            for (auto [d1, d2] : offsets) {
                const int a1 = ((d1 % N) + N) % N, a2 = ((d2 % N) + N) % N;
                if (seen[std::size_t(a1 + N * a2)]) continue;
                seen[std::size_t(a1 + N * a2)] = 1;
                uniq.emplace_back(a1, a2);
            }
            count = double(uniq.size());
            for (int x2 = 0; x2 < N; ++x2)
                for (int x1 = 0; x1 < N; ++x1) {
                    double s = 0.0;
                    for (auto [a1, a2] : uniq) s += col(((x1 + a1) % N) + N * ((x2 + a2) % N));
                    box(x1 + N * x2) = s;
                }
        }
        // Discrete averages scaled by the continuum volume of W(tau, x).
        const double scale = (b - a) * torus_ball_measure(g, r) / (count * std::pow(tau, 1.0 + g.n));
        for (Eigen::Index x = 0; x < Eigen::Index(P); ++x) out(x) = std::max(out(x), std::sqrt(scale * box(x)));
    }
    return out;
}

double nontangential_norm(const StripField& f, FieldPart part, const WhitneyParams& p) {
    RVec nt = nontangential_function(f, part, p);
    return std::sqrt(f.grid.cell_volume()) * nt.norm();
}

double square_function_norm(const StripField& f, StripQuadReport* report) {
    std::vector<double> sq = level_sq(f);
    std::vector<double> g(sq.size());
    for (std::size_t i = 0; i < sq.size(); ++i) g[i] = f.t_grid[i] * f.t_grid[i] * sq[i];
    StripQuadReport r = log_quadrature(f.t_grid, g, "square_function_norm");
    if (report) *report = r;
    return r.value;
}

double energy_norm(const StripField& f, StripQuadReport* report) {
    std::vector<double> sq = level_sq(f);
    std::vector<double> g(sq.size());
    for (std::size_t i = 0; i < sq.size(); ++i) g[i] = f.t_grid[i] * sq[i];
    StripQuadReport r = log_quadrature(f.t_grid, g, "energy_norm");
    if (report) *report = r;
    return r.value;
}

}  // namespace dblab
