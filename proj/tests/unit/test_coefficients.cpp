#include <gtest/gtest.h>

#include "dblab/coefficients.hpp"
#include "dblab/expression.hpp"
#include "dblab/random_fields.hpp"
#include "oracles.hpp"

using namespace dblab;

namespace {

CoefficientField random_family(FamilyKind kind, const GridSpec& g, std::uint64_t seed, double lambda = 0.5,
                               double Lambda = 2.0) {
    FamilySpec s;
    s.kind = kind;
    s.seed = seed;
    s.lambda_floor = lambda;
    s.Lambda_cap = Lambda;
    return make_family(s, g);
}

}  // namespace

TEST(Hat, IdentityIsFixed) {
    GridSpec g{2, 8};
    CoefficientField I = CoefficientField::identity(g);
    EXPECT_EQ(max_abs_difference(hat_transform(I), I), 0.0);
}

TEST(Hat, DiagonalInvertsTheNormalEntry) {
    GridSpec g{1, 8};
    Mat A0 = Mat::Zero(2, 2);
    A0(0, 0) = 4.0;
    A0(1, 1) = 3.0;
    CoefficientField H = hat_transform(CoefficientField::constant(g, A0));
    EXPECT_DOUBLE_EQ(H.at(0, 0)(0).real(), 0.25);
    EXPECT_DOUBLE_EQ(H.at(1, 1)(3).real(), 3.0);
    EXPECT_EQ(H.block_class, BlockClass::block_diagonal);
}

TEST(Hat, MatchesPointwiseFormulaAndIsAnInvolution) {
    for (int n : {1, 2}) {
        GridSpec g{n, 8};
        for (std::uint64_t seed = 1; seed <= 40; ++seed) {
            CoefficientField A = random_family(FamilyKind::piecewise_random, g, seed, 0.3, 3.0);
            CoefficientField H = hat_transform(A);
            double err = 0.0;
            for (std::size_t p = 0; p < g.points(); ++p)
                err = std::max(err, (H.matrix_at(p) - oracle::hat(A.matrix_at(p))).cwiseAbs().maxCoeff());
            EXPECT_LT(err, 1e-14);
            EXPECT_LE(max_abs_difference(hat_transform(H), A), 1e-12);
        }
    }
}

TEST(Hat, PreservesBlockClasses) {
    GridSpec g{1, 16};
    for (auto kind : {FamilyKind::lower_triangular_random, FamilyKind::upper_triangular_random,
                      FamilyKind::block_diagonal_random}) {
        CoefficientField A = random_family(kind, g, 3);
        EXPECT_EQ(hat_transform(A).block_class, A.block_class);
        EXPECT_EQ(classify(A), A.block_class);
    }
}

TEST(Accretivity, ClosedFormValues) {
    GridSpec g{1, 8};
    EXPECT_DOUBLE_EQ(accretivity_bound(CoefficientField::identity(g)), 1.0);
    Mat A0 = Mat::Zero(2, 2);
    A0(0, 0) = 2.0;
    A0(1, 1) = 3.0;
    EXPECT_NEAR(accretivity_bound(CoefficientField::constant(g, A0)), 2.0, 1e-14);
}

TEST(Accretivity, MatchesPerPointEigenvalueOracle) {
    for (int n : {1, 2}) {
        GridSpec g{n, 8};
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            CoefficientField A = random_family(FamilyKind::smooth_trig, g, seed);
            double lam = 1e300;
            for (std::size_t p = 0; p < g.points(); ++p)
                lam = std::min(lam, oracle::min_hermitian_eig(A.matrix_at(p)));
            EXPECT_NEAR(accretivity_bound(A), lam, 1e-10);
        }
    }
}

TEST(Accretivity, NonAccretiveFieldsAreRejected) {
    GridSpec g{1, 8};
    Mat A0 = Mat::Identity(2, 2);
    A0(0, 0) = -1.0;
    EXPECT_THROW(CoefficientField::constant(g, A0), InputError);
    CoefficientField C = CoefficientField::from_function(g, [&](double, double) { return A0; }, false);
    EXPECT_LT(accretivity_estimate(C), 0.0);
    EXPECT_THROW(accretivity_bound(C), InputError);
}

TEST(Families, ConstantAndZeroAmplitude) {
    GridSpec g{1, 16};
    FamilySpec s;
    EXPECT_EQ(max_abs_difference(make_family(s, g), CoefficientField::identity(g)), 0.0);
    s.kind = FamilyKind::smooth_trig;
    s.amplitude = 0.0;
    s.base = Mat::Identity(2, 2) * 1.5;
    EXPECT_LE(max_abs_difference(make_family(s, g), CoefficientField::constant(g, s.base)), 1e-15);
}

TEST(Families, LowerTriangularRespectsBoundsAndStructure) {
    GridSpec g{1, 64};
    CoefficientField A = random_family(FamilyKind::lower_triangular_random, g, 7);
    EXPECT_GE(accretivity_bound(A), 0.5 - 1e-12);
    EXPECT_LE(sup_norm(A), 2.0 + 1e-12);
    EXPECT_EQ(A.block_class, BlockClass::lower_triangular);
    EXPECT_EQ(A.at(0, 1).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Families, ContinuumSamplesAgreeOnSharedPoints) {
    FamilySpec s;
    s.kind = FamilyKind::block_diagonal_random;
    s.seed = 4;
    ContinuumCoefficient c = make_continuum(s, 1);
    CoefficientField a = c.sample(GridSpec{1, 16}), b = c.sample(GridSpec{1, 32});
    for (int k = 0; k < 16; ++k)
        EXPECT_LT((a.matrix_at(std::size_t(k)) - b.matrix_at(std::size_t(2 * k))).norm(), 1e-14);
}

TEST(Mgamma, ZeroGammaIsIdentity) {
    GridSpec g{2, 8};
    CoefficientField A = random_family(FamilyKind::smooth_trig, g, 2);
    std::vector<Vec> z(2, Vec::Zero(64));
    EXPECT_EQ(max_abs_difference(mgamma_perturb(A, z), A), 0.0);
}

TEST(Mgamma, StreamFunctionGammaKeepsAccretivity) {
    GridSpec g{2, 16};
    CoefficientField A = random_family(FamilyKind::smooth_trig, g, 2);
    auto gamma = stream_function_gamma(g, 13, 0.4);
    EXPECT_LT(divergence_defect(g, gamma), 1e-12);
    CoefficientField B = mgamma_perturb(A, gamma);
    EXPECT_NEAR(accretivity_bound(B), accretivity_bound(A), 1e-10);
    EXPECT_GT(max_abs_difference(A, B), 1e-3);
}

TEST(Mgamma, RejectsDivergentGamma) {
    GridSpec g{2, 8};
    CoefficientField A = CoefficientField::identity(g);
    std::vector<Vec> gamma{oracle::sample(g, [](double a, double) { return std::sin(a); }), Vec::Zero(64)};
    EXPECT_THROW(mgamma_perturb(A, gamma), InputError);
}

TEST(Expressions, ConstantsAndPointwiseValues) {
    GridSpec g{1, 32};
    Vec one = parse_coefficient_expr("1", g);
    EXPECT_EQ((one.array() - 1.0).abs().maxCoeff(), 0.0);
    Vec f = parse_coefficient_expr("2+0.3*sin(x1)", g);
    EXPECT_GE(f.real().minCoeff(), 1.7 - 1e-15);
    EXPECT_LE(f.real().maxCoeff(), 2.3 + 1e-15);
    EXPECT_NEAR(f(8).real(), 2.3, 1e-14);
    Vec z = parse_coefficient_expr("exp(i*x1)^2 - cos(2*x1) - i*sin(2*x1)", g);
    EXPECT_LT(z.cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Expressions, DegenerateDenominatorIsRejected) {
    GridSpec g{1, 8};
    EXPECT_THROW(parse_coefficient_expr("1/(x1-x1)", g), InputError);
}

TEST(Expressions, SyntaxErrorsCarryPositions) {
    try {
        Expression::parse("1 + * x1", 1);
        FAIL() << "expected a parse error";
    } catch (const ExprError& e) {
        EXPECT_EQ(e.line(), 1);
        EXPECT_EQ(e.column(), 5);
    }
    EXPECT_THROW(Expression::parse("x2", 1), ExprError);
    EXPECT_THROW(Expression::parse("foo(x1)", 1), ExprError);
    EXPECT_NO_THROW(Expression::parse("x2 * cos(x1)", 2));
}
