#include "dblab/boundary_maps.hpp"

#include <cmath>

#include "dblab/linalg.hpp"
#include "dblab/random_fields.hpp"

namespace dblab {
namespace {

RVec half_weight(const GridSpec& g, double s) {
    RVec ax = mode_abs_xi(g);
    RVec w(ax.size());
    for (Eigen::Index i = 0; i < ax.size(); ++i) w(i) = std::pow(ax(i), s);
    return w;
}

// Solves x = inv(block) * rhs after checking the block in the weighted topology.
MapResult two_formula_map(const GridSpec& g, const Mat& left_block, const Mat& left_rhs, const Mat& right_block,
                          const Mat& right_lhs, double s, const MapOptions& opt, double sign) {
    MapResult r;
    r.min_sv = linalg::min_singular_value(weighted_half(g, left_block, s));
    const double alt_sv = linalg::min_singular_value(weighted_half(g, right_block, s));
    if (!(r.min_sv > opt.floor)) return r;
    Eigen::PartialPivLU<Mat> lu(left_block);
    r.map = sign * lu.solve(left_rhs);
    r.invertible = true;
    r.weighted_norm = weighted_norm(g, r.map, s);
    if (alt_sv > opt.floor) {
        Eigen::PartialPivLU<Mat> lu2(right_block);
        Mat alt = sign * lu2.solve(right_lhs);
        r.factorization_mismatch = weighted_norm(g, r.map - alt, s) / std::max(r.weighted_norm, 1e-300);
    } else {
        r.factorization_mismatch = std::numeric_limits<double>::infinity();
    }
    return r;
}

}  // namespace

Mat SgnBlocks::assemble() const {
    const Eigen::Index m = s11.rows();
    Mat out(2 * m, 2 * m);
    out << s11, s12, s21, s22;
    return out;
}

SgnBlocks sgn_blocks(const GridSpec& g, const Mat& sgn, double weight_s) {
    const Eigen::Index m = Eigen::Index(g.modes());
    if (sgn.rows() != 2 * m || sgn.cols() != 2 * m) throw InputError("sgn_blocks: size does not match grid");
    SgnBlocks b;
    b.grid = g;
    b.weight_s = weight_s;
    b.s11 = sgn.topLeftCorner(m, m);
    b.s12 = sgn.topRightCorner(m, m);
    b.s21 = sgn.bottomLeftCorner(m, m);
    b.s22 = sgn.bottomRightCorner(m, m);
    return b;
}

Mat weighted_half(const GridSpec& g, const Mat& x, double s) {
    if (s == 0.0) return x;
    RVec w = half_weight(g, s);
    return w.asDiagonal() * x * w.cwiseInverse().asDiagonal();
}

double weighted_norm(const GridSpec& g, const Mat& x, double s) { return linalg::norm2(weighted_half(g, x, s)); }

MapResult gamma_nd(const SgnBlocks& b, double s, const MapOptions& opt) {
    const Eigen::Index m = b.s11.rows();
    const Mat I = Mat::Identity(m, m);
    return two_formula_map(b.grid, b.s12, I - b.s11, I - b.s22, b.s21, s, opt, 1.0);
}

MapResult gamma_dn(const SgnBlocks& b, double s, const MapOptions& opt) {
    const Eigen::Index m = b.s11.rows();
    const Mat I = Mat::Identity(m, m);
    return two_formula_map(b.grid, b.s21, I - b.s22, I - b.s11, b.s12, s, opt, 1.0);
}

MapResult gamma_minus(const SgnBlocks& b, double s, const MapOptions& opt) {
    const Eigen::Index m = b.s11.rows();
    const Mat I = Mat::Identity(m, m);
    return two_formula_map(b.grid, b.s12, I + b.s11, I + b.s22, b.s21, s, opt, -1.0);
}

KeyLemmaReport key_lemma_check(const GridSpec& g, const Mat& sgn, double s, double floor, int samples,
                               std::uint64_t seed) {
    KeyLemmaReport r;
    r.weight_s = s;
    r.floor = floor;
    SgnBlocks b = sgn_blocks(g, sgn, s);
    const Eigen::Index m = b.s11.rows();
    const Mat I = Mat::Identity(m, m);
    auto sv = [&](const Mat& x) { return linalg::min_singular_value(weighted_half(g, x, s)); };
    r.sv_s12 = sv(b.s12);
    r.sv_s21 = sv(b.s21);
    r.sv_s11_plus = sv(b.s11 + I);
    r.sv_s11_minus = sv(b.s11 - I);
    r.sv_s22_plus = sv(b.s22 + I);
    r.sv_s22_minus = sv(b.s22 - I);
    r.min_sv = std::min({r.sv_s12, r.sv_s21, r.sv_s11_plus, r.sv_s11_minus, r.sv_s22_plus, r.sv_s22_minus});
    r.ok = r.min_sv > floor;

    RVec w = sobolev_weight(g, s);
    auto [pp, pm] = spectral_projectors(sgn);
    r.ratio_plus_min = r.ratio_minus_min = std::numeric_limits<double>::infinity();
    for (int k = 0; k < samples; ++k) {
        Vec u = random_vcoords(g, item_seed(seed, std::uint64_t(k)));
        for (int which = 0; which < 2; ++which) {
            Vec pu = w.cwiseProduct(which == 0 ? Vec(pp * u) : Vec(pm * u));
            const double perp = pu.head(m).norm(), par = pu.tail(m).norm();
            const double ratio = perp > 0.0 ? par / perp : std::numeric_limits<double>::infinity();
            if (which == 0) {
                r.ratio_plus_min = std::min(r.ratio_plus_min, ratio);
                r.ratio_plus_max = std::max(r.ratio_plus_max, ratio);
            } else {
                r.ratio_minus_min = std::min(r.ratio_minus_min, ratio);
                r.ratio_minus_max = std::max(r.ratio_minus_max, ratio);
            }
        }
    }
    return r;
}

double graph_residual(const GridSpec& g, const Mat& sgn, const Mat& gamma, double s, int samples,
                      std::uint64_t seed) {
    const Eigen::Index m = gamma.cols();
    RVec w = sobolev_weight(g, s);
    double worst = 0.0;
    for (int k = 0; k < samples; ++k) {
        Vec f = random_vcoords(g, item_seed(seed, std::uint64_t(k))).head(m);
        Vec h(2 * m);
        h.head(m) = f;
        h.tail(m) = gamma * f;
        Vec pm = 0.5 * (h - sgn * h);
        worst = std::max(worst, w.cwiseProduct(pm).norm() / w.head(m).cwiseProduct(f).norm());
    }
    return worst;
}

RellichResult rellich_from_sign(const GridSpec& g, const Mat& sgn_uT) {
    RellichResult r;
    SgnBlocks b = sgn_blocks(g, sgn_uT, 0.0);
    MapResult nd = gamma_nd(b, 0.0);
    MapResult dn = gamma_dn(b, 0.0);
    r.forward_bounded = nd.invertible;
    r.inverse_bounded = dn.invertible;
    r.forward = nd.invertible ? nd.weighted_norm : std::numeric_limits<double>::infinity();
    r.inverse = dn.invertible ? dn.weighted_norm : std::numeric_limits<double>::infinity();
    if (nd.invertible) {
        r.factorization_mismatch = nd.factorization_mismatch;
        r.graph_residual = graph_residual(g, sgn_uT, nd.map, 0.0, 4);
    } else {
        r.factorization_mismatch = std::numeric_limits<double>::infinity();
        r.graph_residual = std::numeric_limits<double>::infinity();
    }
    return r;
}

RellichResult rellich_constant(const CoefficientField& A, const CalculusOptions& opt) {
    accretivity_bound(A);
    OperatorSet ops = build_operators(A);
    FunctionalCalculus calc(ops.uT.m, opt);
    return rellich_from_sign(A.grid, calc.sign());
}

}  // namespace dblab
