#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "splitann/fields.hpp"
#include "splitann/liouville.hpp"
#include "splitann/lorentz.hpp"

namespace splitann {

// cr(a,b,c,d) = (a−c)(b−d)/((a−b)(c−d)); infinite arguments use the limit in the affine chart.
double classical_crossratio(double a, double b, double c, double d);

// Positive crossratio b(x, y, X, Y) with derivatives in every slot.
class Crossratio {
public:
    using Fn = std::function<Jet(const Jet&, const Jet&, const Jet&, const Jet&)>;

    Crossratio(Fn fn, Chart chart, std::string family);

    double operator()(double x, double y, double X, double Y) const;
    Jet jet(const Jet& x, const Jet& y, const Jet& X, const Jet& Y) const { return fn_(x, y, X, Y); }
    // log|b| with y, Y as the jet variables.
    Jet log_jet(double x, double y, double X, double Y) const;
    Chart chart() const { return chart_; }
    const std::string& family() const { return family_; }

private:
    Fn fn_;
    Chart chart_;
    std::string family_;
};

// (x−X)(y−Y)/((x−Y)(y−X)), with sin(·−·) factors in the angular chart.
Jet diamond_ratio(const Jet& x, const Jet& y, const Jet& X, const Jet& Y, Chart chart);

// Square of the diamond ratio; its metric is g₀.
Crossratio reference_crossratio(Chart chart = Chart::Affine);
// D(x,y,X,Y)·D(φx,φy,φX,φY), angular chart.
Crossratio po22_crossratio(const CircleMap& phi);
Crossratio po22_crossratio(const CircleMap& psi, const CircleMap& phi);

// Curve x in RP² with osculating lines ℓ.
struct PSL3Curve {
    std::function<std::array<Jet, 3>(const Jet&)> point;
    std::function<std::array<Jet, 3>(const Jet&)> line;
    Chart chart = Chart::Affine;

    Jet pairing(const Jet& s, const Jet& t) const;
    double pairing(double s, double t) const;
    // max of |⟨ℓ(t)|x(t)⟩| and |∂t⟨ℓ(s)|x(t)⟩ at t = s| over the samples.
    double incidence_residual(const std::vector<double>& samples) const;
};

// Affine: x(t) = [t², t, 1], ℓ(s) = (1, −2s, s²).  Angular: the same conic with t = tan a, rescaled.
PSL3Curve psl3_conic(Chart chart = Chart::Affine);
// ⟨ℓ_X|x_x⟩⟨ℓ_Y|x_y⟩ / (⟨ℓ_Y|x_x⟩⟨ℓ_X|x_y⟩); throws DegeneratePairing.
Crossratio psl3_crossratio(const PSL3Curve& c);

struct Diamond {
    double x = 0.0;
    double y = 0.0;
    double X = 0.0;
    double Y = 0.0;

    // period > 0 checks the cyclic order modulo period; throws NotCyclic.
    Diamond(double x, double y, double X, double Y, double period = 0.0);
};

// log b(x, y, X, Y); throws NonPositiveB.
double diamond_area(const Crossratio& b, const Diamond& d);
// ∬ over [x,y]×[X,Y] of the crossratio metric density (Gauss–Legendre).
double diamond_area_quadrature(const Crossratio& b, const Diamond& d);

// ρ(s,t) = ∂y∂Y log b(x, y, X, Y) at y = s, Y = t.
double crossratio_metric_density(const Crossratio& b, const AnnulusPoint& p);
// Same density by central differences of step h.
double crossratio_metric_density_fd(const Crossratio& b, const AnnulusPoint& p, double h = 1e-5);

// S = φ‴/φ′ − (3/2)(φ″/φ′)²; throws NotC3AtPoint at breakpoints.
double schwarzian(const CircleMap& phi, double x);

// u(x, x+ε)/ε² for the uniformizing factor of φ.
double schwarzian_ratio(const CircleMap& phi, double x, double eps);

// Circle map of RP¹ that is Möbius on each interval [t_i, t_{i+1}], angular chart; t_k = t_0 + π.
class PiecewiseMobius {
public:
    PiecewiseMobius(std::vector<double> breakpoints, std::vector<Mobius> pieces, double c0_tol = 1e-12,
                    double c1_tol = 1e-10);

    const std::vector<double>& breakpoints() const { return breakpoints_; }
    const std::vector<Mobius>& pieces() const { return pieces_; }
    double c0_residual() const { return c0_; }
    double c1_residual() const { return c1_; }
    CircleMap circle_map() const;

    // Four parabolic pieces through 1, ∞, −1, 0 with a C¹ turn at each breakpoint.
    static PiecewiseMobius four_piece();
    // The same Möbius map on two arcs.
    static PiecewiseMobius two_piece(const Mobius& m = {});

private:
    std::vector<double> breakpoints_;
    std::vector<Mobius> pieces_;
    double c0_ = 0.0;
    double c1_ = 0.0;
};

// Parabolic Möbius map fixing p (p = ±∞ allowed) with translation parameter s.
Mobius parabolic(double p, double s);

enum class CurveFamily { PO22, PSL3 };

const char* to_string(CurveFamily f);
CurveFamily curve_family_from_string(const std::string& s);

// PO(2,2): t ↦ (ψ(t), φ(t)) on RP¹×RP¹.  PSL₃: the conic reparametrized by ψ.
struct PositiveCurve {
    CurveFamily family = CurveFamily::PO22;
    CircleMap psi = CircleMap::identity(Chart::Angular);
    CircleMap phi = CircleMap::identity(Chart::Angular);

    Crossratio crossratio() const;
    std::vector<double> breakpoints() const;
    PositiveCurve reparametrized(const CircleMap& f) const;
};

// Constant c with ρ_circle = c·2/sin²(s−t), measured from the family's circle member.
double circle_metric_scale(CurveFamily f);

// g_γ = e^{2u}·g_circle on the angular torus.
SplitMetric curve_metric(const PositiveCurve& c);
SplitMetric circle_metric(CurveFamily f);

struct CurveAction {
    ActionValue action;
    SClassReport sclass;
};

// 𝒮(g_γ, g_circle) with refinement trail over levels 0..level; throws SClassFail when require_sclass.
CurveAction curve_action(const PositiveCurve& c, int level, const SClassParams& params = {},
                         bool require_sclass = true);

double reparam_invariance_residual(const PositiveCurve& c, const CircleMap& f, int level);

}  // namespace splitann
