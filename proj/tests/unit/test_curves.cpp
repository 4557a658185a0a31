#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "splitann/curves.hpp"
#include "splitann/error.hpp"

using namespace splitann;

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

TEST(Crossratio, ClassicalValuesAndLimits) {
    EXPECT_DOUBLE_EQ(classical_crossratio(0, 1, 2, 3), (0.0 - 2) * (1 - 3) / ((0.0 - 1) * (2 - 3)));
    const double inf = std::numeric_limits<double>::infinity();
    EXPECT_NEAR(classical_crossratio(inf, 1, 2, 3), (1.0 - 3) / (2 - 3), 1e-15);
    EXPECT_THROW(classical_crossratio(1, 1, 2, 3), Error);
}

TEST(Crossratio, ReferenceDiamond) {
    const Crossratio b = reference_crossratio();
    EXPECT_NEAR(b(0, 1, 2, 3), 16.0 / 9.0, 1e-15);
    const Diamond d(0, 1, 2, 3);
    EXPECT_NEAR(diamond_area(b, d), 2 * std::log(4.0 / 3.0), 1e-15);
    EXPECT_NEAR(diamond_area_quadrature(b, d), 2 * std::log(4.0 / 3.0), 1e-12);
    EXPECT_NEAR(crossratio_metric_density(b, {0.0, 2.0}), 0.5, 1e-14);
}

TEST(Crossratio, DiamondOrder) {
    EXPECT_THROW(Diamond(0, 2, 1, 3, kPi), Error);
    EXPECT_NO_THROW(Diamond(0.1, 0.5, 1.2, 2.0, kPi));
}

TEST(Crossratio, Po22SineAgainstOracle) {
    // Oracle: sympy and scipy for φ = θ + 0.3 sin 2θ.
    const Crossratio b = po22_crossratio(CircleMap::sine(0.3, 2));
    EXPECT_NEAR(crossratio_metric_density(b, {0.4, 2.1}), 2.1490702500971799, 1e-12);
    EXPECT_NEAR(crossratio_metric_density_fd(b, {0.4, 2.1}), 2.1490702500971799, 1e-5);
    const Diamond d(0.1, 0.5, 1.2, 2.0, kPi);
    EXPECT_NEAR(diamond_area(b, d), 0.66566576429026347, 1e-13);
    EXPECT_NEAR(diamond_area_quadrature(b, d), 0.66566576429026358, 1e-10);
}

TEST(Crossratio, Psl3ConicMatchesReference) {
    const PSL3Curve c = psl3_conic();
    EXPECT_LE(c.incidence_residual({-1.0, 0.0, 0.5, 2.0}), 1e-14);
    const Crossratio b = psl3_crossratio(c);
    const Crossratio r = reference_crossratio();
    EXPECT_NEAR(b(0.1, 0.7, 1.5, 2.4), r(0.1, 0.7, 1.5, 2.4), 1e-12);
    EXPECT_NEAR(psl3_crossratio(psl3_conic(Chart::Angular))(0.1, 0.5, 1.2, 2.0),
                reference_crossratio(Chart::Angular)(0.1, 0.5, 1.2, 2.0), 1e-12);
}

TEST(Schwarzian, ClosedForms) {
    EXPECT_NEAR(schwarzian(CircleMap::tangent(), 0.3), 2.0, 1e-12);
    EXPECT_NEAR(schwarzian(CircleMap::exponential(), 0.3), -0.5, 1e-12);
    EXPECT_NEAR(schwarzian(CircleMap::sine(0.3, 2), 0.7), -2.0974999437076911, 1e-12);
    EXPECT_NEAR(schwarzian(CircleMap::mobius({2, 1, 0.5, 0.75}), 0.3), 0.0, 1e-12);
    EXPECT_NEAR(schwarzian_ratio(CircleMap::tangent(), 0.3, 1e-3), 2.0 / 12.0, 1e-5);
}

TEST(PiecewiseMobius, FourPieceIsC1) {
    const PiecewiseMobius m = PiecewiseMobius::four_piece();
    EXPECT_EQ(m.pieces().size(), 4u);
    EXPECT_LE(m.c0_residual(), 1e-12);
    EXPECT_LE(m.c1_residual(), 1e-10);
    const CircleMap phi = m.circle_map();
    // Oracle: sympy evaluation of the same parabolic pieces.
    EXPECT_NEAR(phi(2.0), 2.1063914769046104, 1e-12);
    EXPECT_NEAR(phi.inverse(phi(2.0)), 2.0, 1e-12);
    EXPECT_THROW(schwarzian(phi, m.breakpoints()[1]), Error);
    // Angular lifts of Möbius maps satisfy S + 2φ′² = 2.
    const double a = m.breakpoints()[1] + 0.1;
    const double d = phi.eval(a)[1];
    EXPECT_NEAR(schwarzian(phi, a) + 2.0 * d * d, 2.0, 1e-10);
}

TEST(PiecewiseMobius, MismatchedPiecesAreNotC1) {
    try {
        PiecewiseMobius({0.0, kPi / 2, kPi}, {Mobius{}, Mobius{2.0, 0.0, 0.0, 1.0}});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NotC1);
    }
}

TEST(Curves, FamilyNames) {
    EXPECT_STREQ(to_string(CurveFamily::PO22), "po22");
    EXPECT_EQ(curve_family_from_string("psl3"), CurveFamily::PSL3);
    EXPECT_THROW(curve_family_from_string("po33"), Error);
}

TEST(Curves, MobiusCurveHasZeroAction) {
    PositiveCurve c;
    c.phi = CircleMap::mobius({2, 1, 0.5, 0.75}, Chart::Angular);
    const CurveAction a = curve_action(c, 2);
    EXPECT_NEAR(a.action.value, 0.0, 1e-10);
    EXPECT_TRUE(a.sclass.pass);
}

TEST(Curves, SineCurveConvergesAndIsInvariant) {
    PositiveCurve c;
    c.phi = CircleMap::sine(0.3, 2);
    const CurveAction a = curve_action(c, 3);
    ASSERT_EQ(a.action.trail.size(), 4u);
    EXPECT_GT(a.action.value, 0.0);
    EXPECT_LE(std::fabs(a.action.trail[3].value - a.action.trail[2].value), 1e-4);
    const double r1 = reparam_invariance_residual(c, CircleMap::sine(0.1, 4), 1);
    const double r2 = reparam_invariance_residual(c, CircleMap::sine(0.1, 4), 2);
    EXPECT_LE(r2, 2e-5);
    EXPECT_GT(r1 / r2, 6.0);
}

TEST(Curves, Psl3CircleMemberIsFlat) {
    PositiveCurve c;
    c.family = CurveFamily::PSL3;
    EXPECT_NEAR(curve_action(c, 1).action.value, 0.0, 1e-12);
    EXPECT_DOUBLE_EQ(circle_metric_scale(CurveFamily::PSL3), 1.0);
}
