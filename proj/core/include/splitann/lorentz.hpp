#pragma once

#include <Eigen/Dense>
#include <vector>

#include "splitann/fields.hpp"

namespace splitann {

enum class Reference { Flat, DeSitter };

const char* to_string(Reference ref);

// Metric e^{2u}·reference on a chart of the split annulus.  The density ρ of a metric is the
// coefficient of dx dy; the total conformal factor is v with ρ = e^{2v}.
class SplitMetric {
public:
    SplitMetric(Reference reference, ScalarField u, Chart chart = Chart::Affine);

    static SplitMetric flat(ScalarField u = ScalarField::zero());
    static SplitMetric desitter(ScalarField u = ScalarField::zero(), Chart chart = Chart::Affine);

    Reference reference() const { return reference_; }
    Chart chart() const { return chart_; }
    const ScalarField& u() const { return u_; }

    Jet reference_factor(double x, double y) const;
    Jet total_factor(double x, double y) const;
    double density(double x, double y) const;

    // e^{2w}·this.
    SplitMetric scaled(const ScalarField& w) const;

    // Gram matrix in the frame (∂x, ∂y).
    Eigen::Matrix2d gram(double x, double y) const;

private:
    Reference reference_;
    Chart chart_;
    ScalarField u_;
};

bool compatible(const SplitMetric& g, const SplitMetric& h);

// Factor w with Φ*(reference) = e^{2w}·reference for Φ = (φ, φ).
ScalarField reference_pullback_factor(Reference reference, const CircleMap& phi);

// Φ*g for the diagonal map Φ = (φ, φ).
SplitMetric pullback(const SplitMetric& g, const CircleMap& phi);

// □_g f = 2ρ⁻¹ ∂²xy f.
double dalembertian(const SplitMetric& g, const ScalarField& f, const AnnulusPoint& p);

class CurvatureReport {
public:
    explicit CurvatureReport(SplitMetric g);

    // K = −□_g v for the total factor v.
    double K(const AnnulusPoint& p) const;
    // Density of F_g = K·ω_g against dx∧dy.
    double F(const AnnulusPoint& p) const;

private:
    SplitMetric g_;
};

CurvatureReport curvature(const SplitMetric& g);

// max over sample of |□_g u − K(g) + e^{2u} K(e^{2u} g)|.
double conformal_change_residual(const SplitMetric& g, const ScalarField& u, const std::vector<AnnulusPoint>& sample);

// Density of d(du∘I) = 2∂²xy u dx∧dy.
double dcI_density(const ScalarField& u, const AnnulusPoint& p);

struct CurvatureFormDifference {
    double dcI = 0.0;
    double dal_area = 0.0;
    double curvature_difference = 0.0;
    double residual = 0.0;
};

// Three-way comparison of (□_g u)ω_g, d(du∘I) and F_g − F_h with h = e^{2u}g.
CurvatureFormDifference curvature_form_difference(const SplitMetric& g, const ScalarField& u, const AnnulusPoint& p);

// tr_g(T) = tr(G⁻¹ T) with G the Gram matrix at p.
double trace(const SplitMetric& g, const AnnulusPoint& p, const Eigen::Matrix2d& t);

}  // namespace splitann
