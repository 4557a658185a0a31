#include <gtest/gtest.h>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <numbers>
#include <sstream>

#include "splitann/error.hpp"
#include "splitann/fields.hpp"

using namespace splitann;

namespace {

constexpr double kPi = std::numbers::pi;

// Central-difference partials of f at (x, y).
FieldValue finite_difference(const ScalarField& f, double x, double y, double h = 1e-4) {
    auto v = [&](double a, double b) { return f.value(a, b); };
    return {v(x, y), (v(x + h, y) - v(x - h, y)) / (2 * h), (v(x, y + h) - v(x, y - h)) / (2 * h),
            (v(x + h, y + h) - v(x + h, y - h) - v(x - h, y + h) + v(x - h, y - h)) / (4 * h * h)};
}

void expect_consistent(const ScalarField& f, double x, double y, double tol = 1e-6) {
    const FieldValue e = eval_field(f, {x, y});
    const FieldValue d = finite_difference(f, x, y);
    EXPECT_NEAR(e.value, d.value, 1e-14);
    EXPECT_NEAR(e.dx, d.dx, tol);
    EXPECT_NEAR(e.dy, d.dy, tol);
    EXPECT_NEAR(e.dxy, d.dxy, tol);
}

}  // namespace

TEST(Mobius, ApplyInverseAndProduct) {
    const Mobius m{2.0, 1.0, 0.5, 0.75};
    const Mobius n{1.0, -1.0, 0.25, 1.0};
    for (double x : {-3.0, -0.2, 0.4, 5.0}) {
        EXPECT_NEAR(m.inverse().apply(m.apply(x)), x, 1e-12);
        EXPECT_NEAR((m * n).apply(x), m.apply(n.apply(x)), 1e-12);
        const double h = 1e-6;
        EXPECT_NEAR(m.derivative(x), (m.apply(x + h) - m.apply(x - h)) / (2 * h), 1e-6);
    }
    EXPECT_DOUBLE_EQ(m.apply(std::numeric_limits<double>::infinity()), 4.0);
}

TEST(Charts, RotationTransition) {
    const AnnulusPoint p{0.3, -1.2, 0};
    const AnnulusPoint q = to_chart(p, 2);
    EXPECT_EQ(q.chart_id, 2);
    const AnnulusPoint back = to_chart(q, 0);
    EXPECT_NEAR(back.x, p.x, 1e-12);
    EXPECT_NEAR(back.y, p.y, 1e-12);
    // Chart 2 is the quarter-turn: tan(a) ↦ tan(a − π/2) = −1/tan(a).
    EXPECT_NEAR(q.x, -1.0 / p.x, 1e-12);
}

TEST(ScalarField, G0FactorJetAtZeroOne) {
    // Oracle: sympy differentiation of ½log(2/(x−y)²) at (0, 1).
    const ScalarField f = ScalarField::log_conformal(2.0);
    const FieldValue v = eval_field(f, {0.0, 1.0});
    EXPECT_NEAR(v.value, 0.34657359027997264, 1e-15);
    EXPECT_NEAR(v.dx, 1.0, 1e-15);
    EXPECT_NEAR(v.dy, -1.0, 1e-15);
    EXPECT_NEAR(v.dxy, -1.0, 1e-15);
}

TEST(ScalarField, DerivativeConsistency) {
    expect_consistent(ScalarField::polynomial({{{1, 1}, 0.5}, {{2, 0}, -1.0}, {{1, 3}, 0.25}}), 0.3, -0.7);
    expect_consistent(ScalarField::bump(0.2, -0.1, 0.8, 0.6, 0.7), 0.35, -0.2);
    expect_consistent(ScalarField::log_conformal(3.0), 1.1, -0.4);
    expect_consistent(ScalarField::log_distance(Chart::Angular), 0.3, 1.9);
    const ScalarField c = ScalarField::composed(ScalarField::log_distance(), CircleMap::mobius({2, 1, 0.5, 0.75}));
    expect_consistent(c, 0.4, -1.3);
    expect_consistent(ScalarField::bump(0, 0, 1, 1, 1) + ScalarField::polynomial({{{1, 1}, 1.0}}), 0.1, 0.2);
}

TEST(ScalarField, BumpSupportAndSum) {
    const ScalarField b = ScalarField::bump(1.0, -1.0, 0.5, 0.25, 2.0);
    ASSERT_TRUE(b.support());
    EXPECT_DOUBLE_EQ(b.value(2.0, -1.0), 0.0);
    EXPECT_NEAR(b.value(1.0, -1.0), 2.0 * std::exp(-2.0), 1e-15);
    const ScalarField s = ScalarField::zero() + b;
    ASSERT_TRUE(s.support());
    EXPECT_DOUBLE_EQ(s.support()->x0, 0.5);
    EXPECT_DOUBLE_EQ(s.support()->y1, -0.75);
}

TEST(ScalarField, BumpMassAgainstTanhSinh) {
    boost::math::quadrature::tanh_sinh<double> q;
    const double mass = q.integrate([](double s) { return std::exp(-1.0 / (1.0 - s * s)); }, -1.0, 1.0);
    EXPECT_NEAR(kBumpMass1D, mass, 1e-14);
    // Oracle: mpmath quadrature.
    EXPECT_NEAR(kBumpMass1D, 0.44399381616807942, 1e-16);
}

TEST(CircleMap, MobiusAngularLiftHasDegreeOne) {
    const CircleMap m = CircleMap::mobius({2.0, 1.0, 0.5, 0.75}, Chart::Angular);
    for (double a : {-0.7, 0.1, 1.2, 2.9}) {
        EXPECT_NEAR(m(a + kPi), m(a) + kPi, 1e-12);
        EXPECT_NEAR(std::tan(m(a)), (Mobius{2.0, 1.0, 0.5, 0.75}.apply(std::tan(a))), 1e-9);
        EXPECT_NEAR(m.inverse(m(a)), a, 1e-12);
    }
    for (int k = 0; k < 100; ++k) {
        const double a = k * kPi / 100;
        EXPECT_LT(m(a), m(a + kPi / 100));
    }
}

TEST(CircleMap, SineInverseAndCompose) {
    const CircleMap s = CircleMap::sine(0.3, 2);
    for (double a : {0.0, 0.4, 1.7, 3.0}) EXPECT_NEAR(s.inverse(s(a)), a, 1e-12);
    const CircleMap c = CircleMap::compose(s, CircleMap::sine(0.1, 4));
    EXPECT_NEAR(c(0.7), s(0.7 + 0.1 * std::sin(2.8)), 1e-15);
    EXPECT_EQ(c.smoothness(), Smoothness::Smooth);
    EXPECT_THROW(CircleMap::sine(0.3, 3), Error);
    EXPECT_THROW(CircleMap::sine(0.6, 2), Error);
    EXPECT_THROW(CircleMap::compose(s, CircleMap::tangent()), Error);
}

TEST(Polygonal, CyclicOrderChecks) {
    EXPECT_TRUE(is_cyclically_ordered({0, 1, 2, 3}));
    EXPECT_TRUE(is_cyclically_ordered({2, 3, 0, 1}));
    EXPECT_FALSE(is_cyclically_ordered({0, 2, 1, 3}));
    const PolygonalCurve ok({{0, 2}, {0, 3}, {1, 3}, {1, 2}});
    EXPECT_EQ(ok.size(), 4u);
    try {
        PolygonalCurve bad({{0, 2}, {0, 3}, {1, 3}, {1, 2}, {2, 2}, {2, 1}, {0.5, 1}, {0.5, 2}});
        FAIL() << "expected NotCyclic";
    } catch (const Error& e) {
        EXPECT_TRUE(e.code() == ErrorCode::NotCyclic || e.code() == ErrorCode::InvalidArgument);
    }
}

TEST(Polygonal, NormalizeDropsZeroSegments) {
    const PolygonalCurve p({{0, 2}, {0, 3}, {1, 3}, {1, 3}, {1, 3}, {1, 2}});
    EXPECT_EQ(normalize_polygonal(p).size(), 4u);
}

TEST(Quadrature, G0AreaOfUnitDiamond) {
    // Oracle: symbolic integration of 2/(x−y)² over [0,1]×[2,3].
    const QuadratureGrid grid = QuadratureGrid::rectangle({0, 1, 2, 3}, 3);
    const auto r = integrate_refined(grid, [](const AnnulusPoint& p) { return 2.0 / ((p.x - p.y) * (p.x - p.y)); });
    EXPECT_NEAR(r.value, 0.57536414490356187, 1e-5);
    EXPECT_NEAR(r.richardson, 0.57536414490356187, 1e-9);
}

TEST(Quadrature, NormalizedBumpMass) {
    const ScalarField b = ScalarField::normalized_bump(0.3, -0.2, 0.5, 0.4, 1.0);
    const QuadratureGrid grid = QuadratureGrid::rectangle(*b.support(), 3);
    EXPECT_NEAR(integrate(grid, [&](const AnnulusPoint& p) { return b.value(p.x, p.y); }), 1.0, 1e-6);
}

TEST(Quadrature, TorusGridAlignsBreakpointsAndBand) {
    const QuadratureGrid g = QuadratureGrid::torus(1, {0.3, 1.9}, 1);
    EXPECT_EQ(g.nx(), 64u);
    EXPECT_NEAR(g.region_area(), kPi * kPi, 1e-12);
    EXPECT_GT(g.band_area(), 0.0);
    EXPECT_NEAR(g.total_weight() + g.band_area(), kPi * kPi, 1e-12);
    const auto cells = g.at_level(0);
    EXPECT_EQ(cells.nx(), 32u);
}

TEST(Quadrature, GridCsvHeader) {
    std::ostringstream os;
    QuadratureGrid::rectangle({0, 1, 2, 3}, 0).write_csv(os);
    const std::string text = os.str();
    EXPECT_EQ(text.substr(0, text.find('\n')), "x,y,w");
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1 + 32 * 32);
}

TEST(Quadrature, NonFiniteDensityThrows) {
    const QuadratureGrid grid = QuadratureGrid::rectangle({0, 1, 0, 1}, 0);
    EXPECT_THROW(integrate(grid, [](const AnnulusPoint&) { return std::nan(""); }), Error);
}
