#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "splitann/error.hpp"
#include "splitann/forms.hpp"

using namespace splitann;

TEST(Manifolds, RandomPointsAndTangents) {
    std::mt19937_64 rng(7);
    for (Manifold m : {Manifold::UnitTangent, Manifold::Frames}) {
        for (int k = 0; k < 10; ++k) {
            const Eigen::VectorXd p = random_point(m, rng);
            EXPECT_EQ(p.size(), ambient_dimension(m));
            const Eigen::VectorXd v = random_tangent(m, p, rng);
            EXPECT_NEAR(v.norm(), 1.0, 1e-12);
            EXPECT_LE((constraint_jacobian(m, p) * v).norm(), 1e-10);
        }
    }
    std::mt19937_64 r2(7);
    const FramePoint f = unpack_frame_point(random_point(Manifold::Frames, r2));
    EXPECT_LE(frame_residual(f), 1e-12);
    const Vec4 e = frame_completion(f);
    EXPECT_NEAR(q(e), -1.0, 1e-12);
    EXPECT_NEAR(det4(f.x, f.n, f.u, e), 1.0, 1e-12);
}

TEST(Manifolds, RetractionFixesManifoldPoints) {
    std::mt19937_64 rng(11);
    const Eigen::VectorXd p = random_point(Manifold::UnitTangent, rng);
    EXPECT_LE((retract(Manifold::UnitTangent, p) - p).norm(), 1e-12);
    EXPECT_LE(ut_residual(unpack_ut_point(retract(Manifold::UnitTangent, p + 1e-3 * Eigen::VectorXd::Ones(8)))),
              1e-12);
}

TEST(Forms, CheckedFormsRejectNonTangent) {
    std::mt19937_64 rng(3);
    const Eigen::VectorXd p = random_point(Manifold::UnitTangent, rng);
    const UTPoint up = unpack_ut_point(p);
    UTVector bad{Vec4::Ones(), Vec4::Zero()};
    const UTVector good = unpack_ut_vector(random_tangent(Manifold::UnitTangent, p, rng));
    try {
        alpha2_checked(up, bad, good);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NotTangent);
    }
    EXPECT_NEAR(alpha2(up, good, good), 0.0, 1e-14);
}

TEST(Forms, FundamentalEquationsFromSeed) {
    std::mt19937_64 rng(20240611);
    const Eigen::VectorXd fp = random_point(Manifold::Frames, rng);
    std::vector<Eigen::VectorXd> fv{random_tangent(Manifold::Frames, fp, rng), random_tangent(Manifold::Frames, fp, rng)};
    const Eigen::VectorXd up = random_point(Manifold::UnitTangent, rng);
    std::vector<Eigen::VectorXd> uv;
    for (int i = 0; i < 3; ++i) uv.push_back(random_tangent(Manifold::UnitTangent, up, rng));
    const FundamentalResidual a = fundamental_equations_residual(fp, fv, up, uv, 1e-3);
    const FundamentalResidual b = fundamental_equations_residual(fp, fv, up, uv, 5e-4);
    EXPECT_LE(a.r2, 1e-5);
    EXPECT_NEAR(std::log2(a.r2 / b.r2), 2.0, 0.3);
    EXPECT_LE(a.r1_opposite, 1e-5);
    const FundamentalResidual flipped = fundamental_equations_residual(fp, fv, up, uv, 1e-3, true);
    EXPECT_GT(flipped.r2, 1e-3);
}

TEST(Lens, AlphaVanishesOnFlatDeSitterPiece) {
    const IsotropicSurface s = isotropic_from_metric(SplitMetric::desitter());
    EXPECT_NEAR(alpha_pullback(epstein_lift(s, 0.1, 1.2)), 0.0, 1e-12);
}

TEST(Lens, VariationalThreeDimensional) {
    const SplitMetric g0 = SplitMetric::desitter();
    const ScalarField u = ScalarField::bump(1.5, -0.5, 0.3, 0.3, 0.4);
    const VariationalResult r = variational_3d_residual(g0, u, 1e-3, 1);
    EXPECT_LE(r.residual, 1e-4 * std::max(1.0, std::fabs(r.target)));
}

TEST(Lens, ClassicalFormulaOnPerturbedSlice) {
    EXPECT_LE(classical_formula_residual(frame_field(perturbed_slice(0.2)), {-0.5, 0.5, -0.5, 0.5}, 16), 1e-5);
}
