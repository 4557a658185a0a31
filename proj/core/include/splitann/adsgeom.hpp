#pragma once

#include <Eigen/Dense>
#include <array>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "splitann/autodiff.hpp"
#include "splitann/fields.hpp"
#include "splitann/lorentz.hpp"

namespace splitann {

// Coordinates in the basis (E11, E12, E21, E22) of V⊗V.
using Vec4 = Eigen::Vector4d;

// Gram matrix Q of ⟨·,·⟩ = −ω⊗ω: ⟨E11,E22⟩ = −1, ⟨E12,E21⟩ = +1.
const Eigen::Matrix4d& polar_gram();
double pairing(const Vec4& a, const Vec4& b);
double q(const Vec4& a);
// Volume form with det(E11, E12, E21, E22) = +1.
double det4(const Vec4& a, const Vec4& b, const Vec4& c, const Vec4& d);
// Vector representing the covector c through ⟨·,·⟩.
Vec4 raise(const Vec4& covector);
// Sorted eigenvalues of Q.
std::array<double, 4> polar_eigenvalues();

// (x e1 + e2) ⊗ (y e1 + e2) = (xy, x, y, 1).
Vec4 segre(double x, double y);

template <std::size_t N>
using DVec4 = std::array<Dual<N>, 4>;

template <std::size_t N>
DVec4<N> operator+(const DVec4<N>& a, const DVec4<N>& b) {
    return {a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]};
}
template <std::size_t N>
DVec4<N> operator-(const DVec4<N>& a, const DVec4<N>& b) {
    return {a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]};
}
template <std::size_t N>
DVec4<N> operator*(const Dual<N>& s, const DVec4<N>& a) {
    return {s * a[0], s * a[1], s * a[2], s * a[3]};
}

// σ and its dual η for e^{2f}g₀ at (X, Y), given f, ∂x f and ∂y f carrying the same derivative slots.
template <std::size_t N>
std::pair<DVec4<N>, DVec4<N>> isotropic_pair(const Dual<N>& X, const Dual<N>& Y, const Dual<N>& F,
                                             const Dual<N>& FX, const Dual<N>& FY) {
    using D = Dual<N>;
    const D diff = X - Y;
    const D inv_d = 1.0 / diff;
    const D inv_d2 = inv_d * inv_d;
    const DVec4<N> s{X * Y, X, Y, D(1.0)};
    const DVec4<N> sigma0 = inv_d * s;
    const DVec4<N> eta0 = inv_d * DVec4<N>{X * Y, Y, X, D(1.0)};
    const DVec4<N> sigma0_x = inv_d * DVec4<N>{Y, D(1.0), D(0.0), D(0.0)} - inv_d2 * s;
    const DVec4<N> sigma0_y = inv_d * DVec4<N>{X, D(0.0), D(1.0), D(0.0)} + inv_d2 * s;
    // 1/m with m = ⟨∂xσ₀, ∂yσ₀⟩ = (x − y)⁻².
    const D inv_m = diff * diff;
    const DVec4<N> sigma = exp(F) * sigma0;
    const DVec4<N> eta =
        exp(-F) * (eta0 - (FY * inv_m) * sigma0_x - (FX * inv_m) * sigma0_y - (FX * FY * inv_m) * sigma0);
    return {sigma, eta};
}

struct SurfacePoint {
    Vec4 sigma, sigma_x, sigma_y;
    Vec4 eta, eta_x, eta_y;
};

// Isotropic surface σ realizing g in the affine chart together with its dual η.
class IsotropicSurface {
public:
    explicit IsotropicSurface(SplitMetric g);

    SurfacePoint at(double x, double y) const;
    const SplitMetric& metric() const { return g_; }
    const std::string& base() const { return base_; }

private:
    SplitMetric g_;
    std::string base_ = "segre(identity)";
};

IsotropicSurface isotropic_from_metric(const SplitMetric& g);

// Unique η with ⟨η,η⟩ = 0, ⟨η,σ⟩ = 1, ⟨η,∂xσ⟩ = ⟨η,∂yσ⟩ = 0, from the pointwise linear system.
Vec4 solve_dual(const Vec4& sigma, const Vec4& sigma_x, const Vec4& sigma_y);

// Largest violation of the six σ/η relations, each relative to the sizes of the paired vectors.
double isotropic_relations_residual(const SurfacePoint& s);

// max |⟨Dσ,Dσ⟩ − Gram(g)| over the four entries, relative to max(1, |Gram(g)|).
double metric_realization_residual(const IsotropicSurface& s, double x, double y);

// ±√(ρ/2)·segre with the sign matching σ; returns the distance between the two constructions.
double uniqueness_residual(const IsotropicSurface& s, double x, double y);

struct EpsteinFrame {
    Vec4 x, x_x, x_y;
    Vec4 n, n_x, n_y;
};

// x = (σ−η)/√2, n = (σ+η)/√2.
EpsteinFrame epstein_lift(const SurfacePoint& s);
EpsteinFrame epstein_lift(const IsotropicSurface& s, double x, double y);

// Largest relative violation of q(x) = −1, q(n) = 1, ⟨x,n⟩ = 0 and the contact conditions.
double epstein_residual(const EpsteinFrame& f);

struct InfinityForms {
    Eigen::Matrix2d Istar;
    Eigen::Matrix2d IIstar;
    Eigen::Matrix2d IIIstar;
    Eigen::Matrix2d Bstar;
};

InfinityForms infinity_forms(const SurfacePoint& s);
InfinityForms infinity_forms(const IsotropicSurface& s, double x, double y);

// max of |II* − I*B*| and |III* − B*ᵀ I* B*|.
double infinity_forms_residual(const InfinityForms& f);

// |⟨σ, x⟩ + √2/2|.
double envelope_incidence_residual(const SurfacePoint& s);

struct EnvelopeMetric {
    Eigen::Matrix2d induced;
    Eigen::Matrix2d formula;
    double residual = 0.0;
    bool degenerate = false;
};

// Induced metric of the envelope x = (σ−η)/√2 against ½I* + II* + ½III*.
EnvelopeMetric envelope_metric(const IsotropicSurface& s, double x, double y, double degeneracy_tol = 1e-12);

// Surface in the anti-de Sitter quadric q = −1 with unit normal.
struct HolonomicSurface {
    std::function<Vec4(double, double)> position;
    // Empty: the normal is computed from det(x, x_s, x_t, ·).
    std::function<Vec4(double, double)> normal;
};

struct HolonomicCheck {
    Eigen::Matrix2d I;
    Eigen::Matrix2d II;
    Eigen::Matrix2d III;
    Eigen::Matrix2d B;
    Eigen::Matrix2d Istar;
    double mean_curvature = 0.0;
    double residual = 0.0;
};

// Position, normal and their central-difference partials at (s, t).
EpsteinFrame holonomic_frame(const HolonomicSurface& surface, double s, double t, double step = 1e-4);

// Compares ⟨D(x+n)/√2, D(x+n)/√2⟩ with ½(I + 2II + III); II and III come from the shape operator.
HolonomicCheck typical_holonomic_check(const HolonomicSurface& surface, double s, double t, double step = 1e-4,
                                       double unit_tol = 1e-8);

// Totally geodesic slice cosh s (cos t A + sin t B) + sinh s C with constant normal (E12+E21)/√2.
HolonomicSurface geodesic_slice();
// Slice pushed along its normal by amplitude·bump(s, t) and renormalized to q = −1.
HolonomicSurface perturbed_slice(double amplitude);

struct EpsteinSample {
    double s = 0.0;
    double t = 0.0;
    Vec4 x;
    Vec4 n;
};

// Samples the Epstein lift on an n×n midpoint grid of the box.
std::vector<EpsteinSample> sample_epstein(const IsotropicSurface& s, const Box& box, int n);

}  // namespace splitann
