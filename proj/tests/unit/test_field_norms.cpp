#include <gtest/gtest.h>

#include "dblab/field_norms.hpp"
#include "dblab/random_fields.hpp"
#include "oracles.hpp"

using namespace dblab;

namespace {

StripField constant_field(const GridSpec& g, const std::vector<double>& t, double value) {
    StripField f;
    f.grid = g;
    f.t_grid = t;
    f.has_grad = true;
    for (std::size_t i = 0; i < t.size(); ++i) {
        std::vector<Vec> comps(std::size_t(1 + g.n), Vec::Zero(Eigen::Index(g.points())));
        comps[0].setConstant(value);
        f.grad.push_back(comps);
    }
    return f;
}

Vec unit_mode(const GridSpec& g, int k) {
    Vec e = oracle::sample(g, [k](double x, double) { return std::exp(cplx(0.0, k * x)); });
    return e / l2_norm(g, e);
}

}  // namespace

TEST(Whitney, ParameterValidation) {
    EXPECT_THROW((WhitneyParams{1.0, 1.0}).validate(), InputError);
    EXPECT_THROW((WhitneyParams{2.0, 0.0}).validate(), InputError);
    EXPECT_NO_THROW((WhitneyParams{1.5, 0.5}).validate());
}

TEST(Nontangential, ZeroAndConstantFields) {
    GridSpec g{1, 64};
    const auto t = log_t_grid(g.h() / 4, 2.0, 120);
    EXPECT_EQ(nontangential_norm(constant_field(g, t, 0.0)), 0.0);
    // Constant 1: |W|^{1/2} / tau^{(1+n)/2} = (2 c1 (c0 - 1/c0))^{1/2} while the ball fits in the torus.
    RVec nt = nontangential_function(constant_field(g, t, 1.0));
    EXPECT_NEAR(nt.minCoeff(), std::sqrt(3.0), 1e-12);
    EXPECT_NEAR(nt.maxCoeff(), std::sqrt(3.0), 1e-12);
    EXPECT_NEAR(nontangential_norm(constant_field(g, t, 1.0)), std::sqrt(3.0 * g.L), 1e-10);

    GridSpec g2{2, 16};
    RVec n2 = nontangential_function(constant_field(g2, log_t_grid(g2.h() / 4, 6.0, 120), 1.0));
    EXPECT_NEAR(n2.maxCoeff(), std::sqrt(1.5 * kPi), 1e-12);
}

TEST(Nontangential, TorusBallMeasure) {
    GridSpec g{2, 8, 2.0};
    EXPECT_NEAR(torus_ball_measure(g, 0.5), kPi * 0.25, 1e-15);
    EXPECT_NEAR(torus_ball_measure(g, 2.0), 4.0, 1e-15);
    // Disk of radius 1.2 in the square [-1, 1]^2.
    const double r = 1.2, d = 1.0;
    const double ref = kPi * r * r - 4.0 * (r * r * std::acos(d / r) - d * std::sqrt(r * r - d * d));
    EXPECT_NEAR(torus_ball_measure(g, r), ref, 1e-14);
    EXPECT_NEAR(torus_ball_measure(GridSpec{1, 8, 2.0}, 0.3), 0.6, 1e-15);
    EXPECT_NEAR(torus_ball_measure(GridSpec{1, 8, 2.0}, 3.0), 2.0, 1e-15);
}

TEST(Nontangential, RequiresFourDyadicLevels) {
    GridSpec g{1, 32};
    EXPECT_THROW(nontangential_norm(constant_field(g, log_t_grid(0.5, 4.0, 20), 1.0)), InputError);
}

TEST(Nontangential, PoissonRatioStableUnderRefinement) {
    std::vector<double> ratio;
    for (int N : {32, 64}) {
        GridSpec g{1, N};
        SolutionHandle h = solve_neumann_l2(make_context(CoefficientField::identity(g)), random_scalar_field(g, 3));
        StripField f = evaluate(h, log_t_grid(g.h() / 64, 16 * g.L, 200));
        ratio.push_back(nontangential_norm(f) / h.trace.norm());
    }
    EXPECT_NEAR(ratio[1] / ratio[0], 1.0, 0.2);
}

TEST(SquareFunction, ZeroAndSingleModeClosedForm) {
    GridSpec g{1, 32};
    const auto t = log_t_grid(1e-4, 60.0, 400);
    EXPECT_EQ(square_function_norm(constant_field(g, t, 0.0)), 0.0);

    SolutionHandle h = solve_dirichlet_l2(make_context(CoefficientField::identity(g)), unit_mode(g, 1));
    const double c = h.trace.squaredNorm();
    EXPECT_NEAR(c, 2.0, 1e-12);
    StripQuadReport rep;
    const double sq = square_function_norm(evaluate(h, t), &rep);
    // int_0^inf t * c e^{-2t} dt = c / 4.
    EXPECT_NEAR(sq * sq, c / 4.0, 1e-6);
    EXPECT_LT(rep.tail_hi, 1e-12);
}

TEST(SquareFunction, RejectsShortCoverage) {
    GridSpec g{1, 32};
    SolutionHandle h = solve_dirichlet_l2(make_context(CoefficientField::identity(g)), unit_mode(g, 1));
    EXPECT_THROW(square_function_norm(evaluate(h, log_t_grid(0.01, 1.0, 50))), InputError);
    EXPECT_THROW(square_function_norm(evaluate(h, log_t_grid(1e-4, 2.0, 100))), InputError);
}

TEST(SquareFunction, CorpusRatiosBounded) {
    GridSpec g{1, 32};
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        FamilySpec s;
        s.kind = FamilyKind::lower_triangular_random;
        s.seed = seed;
        SolutionHandle h = solve_dirichlet_l2(make_context(make_family(s, g)), random_scalar_field(g, seed));
        const double r = h.trace.norm() / square_function_norm(evaluate(h, log_t_grid(g.h() / 64, 16 * g.L, 200)));
        EXPECT_GT(r, 0.5);
        EXPECT_LT(r, 5.0);
    }
}

TEST(EnergyNorm, ZeroAndSingleModeClosedForm) {
    GridSpec g{1, 32};
    const auto t = log_t_grid(1e-6, 40.0, 600);
    EXPECT_EQ(energy_norm(constant_field(g, t, 0.0)), 0.0);
    Vec u0 = unit_mode(g, 2);
    SolutionHandle h = solve_dirichlet_l2(make_context(CoefficientField::identity(g)), u0);
    // iint |grad u|^2 = 2 |xi|^2 |u_hat|^2 / (2 |xi|) = |xi| for a unit mode.
    const double e = energy_norm(evaluate(h, t));
    EXPECT_NEAR(e * e, 2.0, 1e-6);
}
