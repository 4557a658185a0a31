#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "splitann/error.hpp"
#include "splitann/lorentz.hpp"

using namespace splitann;

namespace {

std::vector<AnnulusPoint> random_points(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(-2.0, 2.0);
    std::vector<AnnulusPoint> pts;
    while (static_cast<int>(pts.size()) < n) {
        const double x = U(rng), y = U(rng);
        if (std::fabs(x - y) > 0.05) pts.push_back({x, y});
    }
    return pts;
}

}  // namespace

TEST(Lorentz, DeSitterCurvatureIsOne) {
    const CurvatureReport k(SplitMetric::desitter());
    for (const auto& p : random_points(200, 1)) EXPECT_NEAR(k.K(p), 1.0, 1e-10);
    const CurvatureReport ka(SplitMetric::desitter(ScalarField::zero(Chart::Angular), Chart::Angular));
    EXPECT_NEAR(ka.K({0.3, 2.0}), 1.0, 1e-12);
}

TEST(Lorentz, DalembertianOfG0FactorIsMinusOne) {
    const SplitMetric g0 = SplitMetric::desitter();
    const ScalarField f = ScalarField::log_conformal(2.0);
    for (const auto& p : random_points(20, 2)) EXPECT_NEAR(dalembertian(g0, f, p), -1.0, 1e-12);
}

TEST(Lorentz, FlatExponentialCurvature) {
    // Oracle: sympy, K = −2e^{−2xy} at (0.3, 0.7).
    const SplitMetric g = SplitMetric::flat(ScalarField::polynomial({{{1, 1}, 1.0}}));
    EXPECT_NEAR(CurvatureReport(g).K({0.3, 0.7}), -1.3140936396301135, 1e-13);
}

TEST(Lorentz, DensityAndGram) {
    const SplitMetric g0 = SplitMetric::desitter();
    EXPECT_NEAR(g0.density(0.0, 2.0), 0.5, 1e-15);
    const Eigen::Matrix2d G = g0.gram(0.0, 2.0);
    EXPECT_DOUBLE_EQ(G(0, 0), 0.0);
    EXPECT_NEAR(G(0, 1), 0.25, 1e-15);
    Eigen::Matrix2d t;
    t << 0.0, 1.0, 1.0, 0.0;
    EXPECT_NEAR(trace(g0, {0.0, 2.0}, t), 8.0, 1e-12);
}

TEST(Lorentz, ConformalChangeFormula) {
    const SplitMetric g0 = SplitMetric::desitter();
    const ScalarField u = ScalarField::bump(0.2, -0.3, 0.7, 0.6, 0.45);
    EXPECT_LE(conformal_change_residual(g0, u, random_points(200, 3)), 1e-8);
    const SplitMetric flat = SplitMetric::flat();
    EXPECT_LE(conformal_change_residual(flat, ScalarField::polynomial({{{1, 1}, 0.5}}), random_points(50, 4)), 1e-10);
}

TEST(Lorentz, CurvatureFormDifferenceFlatXY) {
    const auto d = curvature_form_difference(SplitMetric::flat(), ScalarField::polynomial({{{1, 1}, 1.0}}), {0.4, -0.8});
    EXPECT_NEAR(d.dcI, 2.0, 1e-13);
    EXPECT_NEAR(d.curvature_difference, 2.0, 1e-12);
    EXPECT_LE(d.residual, 1e-12);
    const auto e = curvature_form_difference(SplitMetric::desitter(), ScalarField::bump(0, 1, 0.5, 0.5, 0.3), {0.1, 0.9});
    EXPECT_LE(e.residual, 1e-8);
}

TEST(Lorentz, MobiusPullbackIsIsometry) {
    const CircleMap m = CircleMap::mobius({2.0, 1.0, 0.5, 0.75});
    const ScalarField w = reference_pullback_factor(Reference::DeSitter, m);
    for (const auto& p : random_points(20, 5)) {
        if (std::fabs(0.5 * p.x + 0.75) < 0.1 || std::fabs(0.5 * p.y + 0.75) < 0.1) continue;
        EXPECT_NEAR(w.value(p.x, p.y), 0.0, 1e-12);
    }
    const SplitMetric pg = pullback(SplitMetric::desitter(), m);
    EXPECT_NEAR(CurvatureReport(pg).K({0.3, -0.4}), 1.0, 1e-10);
}

TEST(Lorentz, ChartAndReferenceChecks) {
    EXPECT_THROW(SplitMetric(Reference::Flat, ScalarField::zero(Chart::Angular), Chart::Angular), Error);
    EXPECT_THROW(SplitMetric::desitter(ScalarField::zero(Chart::Angular), Chart::Affine), Error);
    EXPECT_THROW(CurvatureReport(SplitMetric::desitter()).K({0.5, 0.5}), Error);
    EXPECT_FALSE(compatible(SplitMetric::flat(), SplitMetric::desitter()));
}
