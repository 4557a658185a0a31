#include <gtest/gtest.h>

#include <cmath>

#include "splitann/adsgeom.hpp"
#include "splitann/error.hpp"

using namespace splitann;

namespace {

const SplitMetric kBumped = SplitMetric::desitter(ScalarField::bump(0.2, 1.4, 0.6, 0.5, 0.35));

}  // namespace

TEST(Polar, GramSignature) {
    const auto ev = polar_eigenvalues();
    EXPECT_NEAR(ev[0], -1.0, 1e-15);
    EXPECT_NEAR(ev[1], -1.0, 1e-15);
    EXPECT_NEAR(ev[2], 1.0, 1e-15);
    EXPECT_NEAR(ev[3], 1.0, 1e-15);
    EXPECT_DOUBLE_EQ(det4(Vec4::UnitX(), Vec4::UnitY(), Vec4::UnitZ(), Vec4::UnitW()), 1.0);
}

TEST(Polar, SegreIsIsotropic) {
    for (double x : {-1.0, 0.3, 2.0}) {
        for (double y : {-0.5, 1.7}) {
            EXPECT_NEAR(q(segre(x, y)), 0.0, 1e-14);
            EXPECT_NEAR(pairing(segre(x, y), segre(y, x)), (x - y) * (x - y), 1e-12);
        }
    }
    const Vec4 c(0.3, -1.0, 2.0, 0.5);
    for (int i = 0; i < 4; ++i) EXPECT_NEAR(pairing(raise(c), Vec4::Unit(i)), c[i], 1e-15);
}

TEST(Isotropic, RelationsAndRealization) {
    for (const SplitMetric& g : {SplitMetric::desitter(), kBumped}) {
        const IsotropicSurface s = isotropic_from_metric(g);
        for (auto [x, y] : {std::pair{0.1, 1.2}, {0.4, 1.6}, {-0.3, 0.9}}) {
            EXPECT_LE(isotropic_relations_residual(s.at(x, y)), 1e-12);
            EXPECT_LE(metric_realization_residual(s, x, y), 1e-12);
            EXPECT_LE(uniqueness_residual(s, x, y), 1e-12);
        }
    }
}

TEST(Isotropic, DualFromLinearSystem) {
    const IsotropicSurface s = isotropic_from_metric(kBumped);
    const SurfacePoint p = s.at(0.3, 1.5);
    EXPECT_LE((solve_dual(p.sigma, p.sigma_x, p.sigma_y) - p.eta).norm(), 1e-10);
}

TEST(Epstein, LiftSatisfiesConstraints) {
    const IsotropicSurface s = isotropic_from_metric(kBumped);
    for (auto [x, y] : {std::pair{0.1, 1.2}, {0.5, 1.3}}) {
        const EpsteinFrame f = epstein_lift(s, x, y);
        EXPECT_LE(epstein_residual(f), 1e-12);
        EXPECT_NEAR(q(f.x), -1.0, 1e-12);
        EXPECT_NEAR(q(f.n), 1.0, 1e-12);
        EXPECT_LE(envelope_incidence_residual(s.at(x, y)), 1e-12);
    }
    const auto samples = sample_epstein(s, {0.0, 0.5, 1.0, 1.5}, 4);
    EXPECT_EQ(samples.size(), 16u);
}

TEST(Epstein, InfinityForms) {
    const IsotropicSurface s = isotropic_from_metric(kBumped);
    EXPECT_LE(infinity_forms_residual(infinity_forms(s, 0.2, 1.3)), 1e-10);
    const InfinityForms f0 = infinity_forms(isotropic_from_metric(SplitMetric::desitter()), 0.0, 1.0);
    EXPECT_NEAR(f0.Istar(0, 1), 1.0, 1e-12);
}

TEST(Epstein, EnvelopeMetricFormula) {
    const EnvelopeMetric e = envelope_metric(isotropic_from_metric(kBumped), 0.25, 1.35);
    if (!e.degenerate) EXPECT_LE(e.residual, 1e-8);
    const EnvelopeMetric d = envelope_metric(isotropic_from_metric(SplitMetric::desitter()), 0.0, 1.0);
    EXPECT_TRUE(d.degenerate);
}

TEST(Holonomic, GeodesicSliceIsTotallyGeodesic) {
    const HolonomicCheck c = typical_holonomic_check(geodesic_slice(), 0.3, 0.7);
    EXPECT_LE(c.II.norm(), 1e-7);
    EXPECT_NEAR(c.mean_curvature, 0.0, 1e-7);
    EXPECT_LE(c.residual, 1e-6);
}

TEST(Holonomic, PerturbedSliceFormula) {
    const HolonomicCheck c = typical_holonomic_check(perturbed_slice(0.2), 0.1, 0.4);
    EXPECT_LE(c.residual, 1e-6);
    EXPECT_GT(c.II.norm(), 1e-4);
}
