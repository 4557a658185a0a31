#pragma once

#include <Eigen/Dense>
#include <functional>
#include <random>
#include <vector>

#include "splitann/adsgeom.hpp"
#include "splitann/liouville.hpp"

namespace splitann {

// Point (x, n) of the unit tangent bundle: q(x) = −1, q(n) = 1, ⟨x,n⟩ = 0.
struct UTPoint {
    Vec4 x;
    Vec4 n;
};

// Tangent vector (u1, u2): ⟨u1,x⟩ = ⟨u2,n⟩ = ⟨u1,n⟩ + ⟨x,u2⟩ = 0.
struct UTVector {
    Vec4 u1;
    Vec4 u2;
};

// Pairwise orthogonal (x, n, u) with −q(x) = q(n) = q(u) = 1.
struct FramePoint {
    Vec4 x;
    Vec4 n;
    Vec4 u;
};

struct FrameVector {
    Vec4 w1;
    Vec4 w2;
    Vec4 w3;
};

double ut_residual(const UTPoint& p);
double ut_tangent_residual(const UTPoint& p, const UTVector& v);
double frame_residual(const FramePoint& f);
double frame_tangent_residual(const FramePoint& f, const FrameVector& w);

// e with q(e) = −1, orthogonal to x, n, u and det(x, n, u, e) = 1.
Vec4 frame_completion(const FramePoint& f);

double omega3(const UTPoint& p, const UTVector& u, const UTVector& v, const UTVector& w);
double alpha2(const UTPoint& p, const UTVector& u, const UTVector& v);
double theta(int i, const UTPoint& p, const UTVector& u, const UTVector& v);
double x_star(const UTPoint& p, const UTVector& u);
double n_star(const UTPoint& p, const UTVector& u);
// −det(x, n, u, w3).
double beta1(const FramePoint& f, const FrameVector& w);

// Forms checked against their tangency preconditions; throw NotTangent.
double omega3_checked(const UTPoint& p, const UTVector& u, const UTVector& v, const UTVector& w, double tol = 1e-8);
double alpha2_checked(const UTPoint& p, const UTVector& u, const UTVector& v, double tol = 1e-8);
double beta1_checked(const FramePoint& f, const FrameVector& w, double tol = 1e-8);

UTPoint ut_point(const FramePoint& f);
UTVector ut_vector(const FrameVector& w);

// Constraint manifolds embedded in R^8 (unit tangent bundle) and R^12 (frames).
enum class Manifold { UnitTangent, Frames };

int ambient_dimension(Manifold m);
Eigen::VectorXd pack(const UTPoint& p);
Eigen::VectorXd pack(const UTVector& v);
Eigen::VectorXd pack(const FramePoint& f);
Eigen::VectorXd pack(const FrameVector& w);
UTPoint unpack_ut_point(const Eigen::VectorXd& v);
UTVector unpack_ut_vector(const Eigen::VectorXd& v);
FramePoint unpack_frame_point(const Eigen::VectorXd& v);
FrameVector unpack_frame_vector(const Eigen::VectorXd& v);

// Jacobian of the constraints (one row per constraint).
Eigen::MatrixXd constraint_jacobian(Manifold m, const Eigen::VectorXd& p);
// Least-squares projection of an ambient vector onto the constraint kernel.
Eigen::VectorXd project_tangent(Manifold m, const Eigen::VectorXd& p, const Eigen::VectorXd& v);
// Gram–Schmidt retraction onto the manifold; throws ChartBreakdown.
Eigen::VectorXd retract(Manifold m, const Eigen::VectorXd& p);

Eigen::VectorXd random_point(Manifold m, std::mt19937_64& rng);
// Gaussian ambient vector projected to the tangent space, unit Euclidean norm.
Eigen::VectorXd random_tangent(Manifold m, const Eigen::VectorXd& p, std::mt19937_64& rng);

using AmbientForm = std::function<double(const Eigen::VectorXd& p, const std::vector<Eigen::VectorXd>& v)>;

// dη(v0, …, vk) in the chart t ↦ retract(p + Σ tᵢ vᵢ), by central differences of step h.
double exterior_derivative(Manifold m, const AmbientForm& form, const Eigen::VectorXd& p,
                           const std::vector<Eigen::VectorXd>& vectors, double step);

AmbientForm ambient_omega3();
AmbientForm ambient_alpha2();
AmbientForm ambient_beta1();
// θ₁ − θ₂ on frames through (w1, w2).
AmbientForm ambient_theta_difference();
// ½(n*∧θ₂ − x*∧θ₁) on the unit tangent bundle.
AmbientForm ambient_alpha_rhs();

struct FundamentalResidual {
    double r1 = 0.0;
    double r2 = 0.0;
    // |dβ + θ₁ − θ₂|, the opposite-sign reading of the first equation.
    double r1_opposite = 0.0;
};

// Compile-time default for the injected sign flip of dα (mutation check).
bool default_sign_flip();

FundamentalResidual fundamental_equations_residual(const Eigen::VectorXd& frame,
                                                   const std::vector<Eigen::VectorXd>& frame_vectors,
                                                   const Eigen::VectorXd& ut,
                                                   const std::vector<Eigen::VectorXd>& ut_vectors, double step,
                                                   bool sign_flip = false);

// Interpolation t ↦ a(t)·u + b(t)·w of conformal factors; value and derivative.
struct LensPath {
    std::function<std::pair<double, double>(double)> a;
    std::function<std::pair<double, double>(double)> b;

    static LensPath canonical();
    // a = t, b = t(1 − t).
    static LensPath bent();
};

// Epstein maps of g = e^{2f}g₀ and e^{2u}g joined through e^{2(a(t)u + b(t)w)}g.
struct LensCobordism {
    SplitMetric base;
    ScalarField u;
    ScalarField w;
    LensPath path;
    Box box;

    LensCobordism(SplitMetric base, ScalarField u, ScalarField w = ScalarField::zero(),
                  LensPath path = LensPath::canonical());
};

// Epstein frame at (x, y) of the metric at parameter t, and ∂t of its position.
EpsteinFrame lens_frame(const LensCobordism& lens, double x, double y, double t, Vec4* x_t = nullptr);

// φ*α(∂x, ∂y) = ¼(det(x,n,n_x,x_y) + det(x,n,x_x,n_y)).
double alpha_pullback(const EpsteinFrame& f);

// 𝒲 over [t0, t1] with 32·2^level midpoint cells per axis and Gauss–Legendre in t.
ActionValue w_volume(const LensCobordism& lens, int level, double t0 = 0.0, double t1 = 1.0);

// Central difference of 𝒲(g → e^{±2dt u}g) against −½∫u F_g.
VariationalResult variational_3d_residual(const SplitMetric& g, const ScalarField& u, double dt, int level);

// F*α(∂s,∂t) against ¼tr(B)·da(∂s,∂t) with B from the 2×2 solve and da = ±√|det I|.
// Where I is singular (the lift collapses) the right side is taken as 0.
struct ClassicalPoint {
    double alpha = 0.0;
    double quarter_trace_area = 0.0;
    double residual = 0.0;
    bool degenerate = false;
};

ClassicalPoint classical_formula_point(const EpsteinFrame& f);

using FrameField = std::function<EpsteinFrame(double, double)>;

FrameField frame_field(const IsotropicSurface& s);
FrameField frame_field(const HolonomicSurface& s, double step = 1e-4);

// |∫F*α − ½∫H da| over an n×n midpoint grid of the box, H = ½tr(B).
double classical_formula_residual(const FrameField& field, const Box& box, int n);

}  // namespace splitann
