#include <gtest/gtest.h>

#include <cmath>

#include "splitann/error.hpp"
#include "splitann/liouville.hpp"

using namespace splitann;

namespace {

const Box kBox{1.0, 2.0, -1.0, 0.0};

ScalarField bump_pair() {
    return ScalarField::bump(1.45, -0.5, 0.3, 0.3, 0.4) + ScalarField::bump(1.6, -0.4, 0.25, 0.3, -0.3);
}

}  // namespace

TEST(Action, IdenticalMetricsGiveZero) {
    const SplitMetric g = SplitMetric::desitter(ScalarField::bump(1.5, -0.5, 0.3, 0.3, 0.2));
    EXPECT_EQ(action(g, g, QuadratureGrid::rectangle(kBox, 1)).value, 0.0);
    EXPECT_EQ(action_monotone(g, g, QuadratureGrid::rectangle(kBox, 1)).value, 0.0);
}

TEST(Action, FlatClosedForm) {
    // Oracle: scipy dblquad of ½∫u_x u_y for the same bump pair.
    const SplitMetric g = SplitMetric::flat();
    const SplitMetric h = g.scaled(bump_pair());
    const ActionValue a = action(h, g, QuadratureGrid::rectangle(kBox, 3));
    EXPECT_NEAR(a.value, 0.001510827997045441, 1e-8);
    EXPECT_EQ(a.formula, "definition");
    EXPECT_LT(a.error_estimate, 1e-7);
}

TEST(Action, DefinitionMatchesMonotoneFormula) {
    const QuadratureGrid grid = QuadratureGrid::rectangle(kBox, 3);
    for (const SplitMetric& g : {SplitMetric::flat(), SplitMetric::desitter()}) {
        const SplitMetric h = g.scaled(bump_pair());
        EXPECT_NEAR(action(g, h, grid).value, action_monotone(g, h, grid).value, 1e-6);
    }
}

TEST(Action, MobiusPullbackGivesZero) {
    const SplitMetric g0 = SplitMetric::desitter();
    const SplitMetric h = pullback(g0, CircleMap::mobius({2.0, 1.0, 0.5, 0.75}));
    EXPECT_NEAR(action(g0, h, QuadratureGrid::rectangle(kBox, 1)).value, 0.0, 1e-12);
}

TEST(Action, IncompatibleMetricsRejected) {
    try {
        action(SplitMetric::flat(), SplitMetric::desitter(), QuadratureGrid::rectangle(kBox, 0));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::IncompatibleMetrics);
    }
}

TEST(Action, NonFiniteIntegrandReported) {
    const SplitMetric g0 = SplitMetric::desitter();
    const SplitMetric h = g0.scaled(ScalarField::log_distance());
    try {
        action(g0, h, QuadratureGrid::rectangle({0.0, 1.0, 0.0, 1.0}, 0));
        FAIL();
    } catch (const Error& e) {
        EXPECT_TRUE(e.code() == ErrorCode::NonFiniteIntegrand || e.code() == ErrorCode::DiagonalPoint);
    }
}

TEST(Action, ChaslesAndAntisymmetry) {
    const QuadratureGrid grid = QuadratureGrid::rectangle({0.8, 2.2, -1.2, 0.2}, 2);
    const SplitMetric f = SplitMetric::flat();
    EXPECT_LE(chasles_residual(f, f.scaled(bump_pair()), f.scaled(ScalarField::bump(1.2, -0.8, 0.3, 0.3, 0.5)), grid),
              1e-6);
    const SplitMetric g0 = SplitMetric::desitter();
    const SplitMetric h = g0.scaled(ScalarField::bump(1.2, -0.8, 0.3, 0.3, 0.5));
    const SplitMetric k = g0.scaled(ScalarField::bump(1.8, -0.2, 0.3, 0.3, -0.4));
    EXPECT_LE(chasles_residual(g0, h, k, grid), 1e-6);
    EXPECT_NEAR(action(g0, h, grid).value, -action(h, g0, grid).value, 1e-9);
}

TEST(Action, MobiusSplitInvariance) {
    const CircleMap m = CircleMap::mobius({1.0, 0.2, 0.0, 1.0});
    const SplitMetric g0 = SplitMetric::desitter();
    const ScalarField u = bump_pair();
    const SplitMetric h = g0.scaled(u);
    const double s = action(g0, h, QuadratureGrid::rectangle(kBox, 3)).value;
    const double sp = action(pullback(g0, m), pullback(h, m), QuadratureGrid::rectangle({0.8, 1.8, -1.2, -0.2}, 3)).value;
    EXPECT_NEAR(s, sp, 1e-6);
}

TEST(VB, DiamondOfHeightOne) {
    const PolygonalCurve p({{0.0, 0.0}, {0.0, 1.0}, {2.0, 1.0}, {2.0, 0.0}});
    auto f = [](const AnnulusPoint& q) { return q.y; };
    EXPECT_DOUBLE_EQ(vb_at_refinement(f, p, 0), 2.0);
    EXPECT_DOUBLE_EQ(vb(f, p), 2.0);
    EXPECT_DOUBLE_EQ(vb([](const AnnulusPoint&) { return 3.0; }, p), 0.0);
}

TEST(SClass, IdenticalMetricsPass) {
    const SplitMetric g = SplitMetric::desitter(ScalarField::zero(Chart::Angular), Chart::Angular);
    const SClassReport r = sclass_report(g, g, QuadratureGrid::torus(2));
    EXPECT_TRUE(r.pass);
    EXPECT_EQ(r.sup_u, 0.0);
}

TEST(SClass, UniformizingSinePasses) {
    const CircleMap phi = CircleMap::sine(0.3, 2);
    const SplitMetric g0 = SplitMetric::desitter(ScalarField::zero(Chart::Angular), Chart::Angular);
    const SplitMetric h = SplitMetric::desitter(reference_pullback_factor(Reference::DeSitter, phi), Chart::Angular);
    const SClassReport r = sclass_report(g0, h, QuadratureGrid::torus(3));
    EXPECT_TRUE(r.pass) << r.failing_clause;
    for (double q : r.decay_ratios) EXPECT_GE(q, 2.0);
}

TEST(SClass, LogDistanceFailsBoundedness) {
    const SplitMetric g0 = SplitMetric::desitter(ScalarField::zero(Chart::Angular), Chart::Angular);
    const SplitMetric h = g0.scaled(ScalarField::log_distance(Chart::Angular));
    const SClassReport r = sclass_report(g0, h, QuadratureGrid::torus(2));
    EXPECT_FALSE(r.pass);
    EXPECT_FALSE(r.clause[0]);
    EXPECT_EQ(r.failing_clause, "1");
}

TEST(Variational, DeSitterBumpSecondOrder) {
    const SplitMetric g0 = SplitMetric::desitter();
    const QuadratureGrid grid = QuadratureGrid::rectangle(kBox, 2);
    const VariationalResult r = variational_residual(g0, bump_pair(), 1e-3, grid);
    EXPECT_LE(r.residual, 1e-5);
    EXPECT_NE(r.target, 0.0);
    const VariationalResult z = variational_residual(g0, ScalarField::zero(), 1e-3, grid);
    EXPECT_EQ(z.derivative, 0.0);
}

TEST(Variational, FlatDerivativeVanishes) {
    const VariationalResult r =
        variational_residual(SplitMetric::flat(), bump_pair(), 1e-3, QuadratureGrid::rectangle(kBox, 2));
    EXPECT_NEAR(r.derivative, 0.0, 1e-6);
}

TEST(Criticality, ConstantCurvatureIsCritical) {
    const SplitMetric g0 = SplitMetric::desitter();
    const QuadratureGrid grid = QuadratureGrid::rectangle(kBox, 2);
    std::vector<ScalarField> candidates{ScalarField::bump(1.3, -0.6, 0.2, 0.2, 1.0),
                                        ScalarField::bump(1.7, -0.3, 0.2, 0.2, 1.0)};
    const auto r = find_criticality_counterexample(g0, candidates, grid);
    EXPECT_LE(std::fabs(r.result.area_deriv), 1e-10);
    EXPECT_LE(std::fabs(r.result.action_deriv), 1e-6);
    const auto z = criticality_test(g0, ScalarField::zero(), grid);
    EXPECT_EQ(z.area_deriv, 0.0);
    EXPECT_EQ(z.action_deriv, 0.0);
}

TEST(Criticality, NonConstantCurvatureCounterexample) {
    const SplitMetric g = SplitMetric::desitter(ScalarField::bump(1.5, -0.5, 0.4, 0.4, 0.8));
    std::vector<ScalarField> candidates;
    for (double cx : {1.3, 1.5, 1.7}) {
        for (double cy : {-0.7, -0.5, -0.3}) candidates.push_back(ScalarField::bump(cx, cy, 0.15, 0.15, 1.0));
    }
    const auto r = find_criticality_counterexample(g, candidates, QuadratureGrid::rectangle(kBox, 2));
    EXPECT_LE(std::fabs(r.result.area_deriv), 1e-10);
    EXPECT_GT(std::fabs(r.result.action_deriv), 1e-3);
}

TEST(Uniformizing, LimitMatchesSchwarzianOracle) {
    // Oracle: sympy, S/12 + (φ′² − 1)/6 for φ = θ + 0.3 sin 2θ at 0.7.
    EXPECT_NEAR(uniformizing_limit(CircleMap::sine(0.3, 2), 0.7), -0.13906490361565246, 1e-13);
    EXPECT_NEAR(uniformizing_limit(CircleMap::tangent(), 0.3), 2.0 / 12.0, 1e-13);
}

TEST(Uniformizing, ActionVanishesUnderRefinement) {
    const ActionValue a = uniformizing_action(CircleMap::sine(0.3, 2), 3);
    ASSERT_EQ(a.trail.size(), 4u);
    EXPECT_LE(std::fabs(a.value), 5e-3);
    for (std::size_t i = 1; i < a.trail.size(); ++i) {
        EXPECT_LT(std::fabs(a.trail[i].value), std::fabs(a.trail[i - 1].value));
    }
    EXPECT_NEAR(uniformizing_action(CircleMap::mobius({2, 1, 0.5, 0.75}, Chart::Angular), 1).value, 0.0, 1e-12);
    EXPECT_THROW(uniformizing_action(CircleMap::tangent(), 1), Error);
}
