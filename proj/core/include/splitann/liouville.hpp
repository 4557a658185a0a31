#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "splitann/fields.hpp"
#include "splitann/lorentz.hpp"

namespace splitann {

struct TrailEntry {
    int level = 0;
    double value = 0.0;
};

struct ActionValue {
    double value = 0.0;
    double error_estimate = 0.0;
    double richardson = 0.0;
    std::string grid;
    std::string formula;
    std::vector<TrailEntry> trail;
};

// Conformal factor u with h = e^{2u} g.
ScalarField relative_factor(const SplitMetric& g, const SplitMetric& h);

// Integrand densities (against dx dy) of the two formulas.
double action_density(const SplitMetric& g, const SplitMetric& h, const AnnulusPoint& p);
double action_monotone_density(const SplitMetric& g, const SplitMetric& h, const AnnulusPoint& p);

// S(g,h) = −½∫u F_g + ¼∫u d(du∘I).  Band cells of the grid use band_density when given.
ActionValue action(const SplitMetric& g, const SplitMetric& h, const QuadratureGrid& grid,
                   const Density& band_density = {});

// S(g,h) = −¼∫u (F_g + F_h).
ActionValue action_monotone(const SplitMetric& g, const SplitMetric& h, const QuadratureGrid& grid,
                            const Density& band_density = {});

double chasles_residual(const SplitMetric& g, const SplitMetric& h, const SplitMetric& k, const QuadratureGrid& grid);

using PointFunction = std::function<double(const AnnulusPoint&)>;

// Σ over vertical segments of the variation of f along 2^refinement equal pieces.
double vb_at_refinement(const PointFunction& f, const PolygonalCurve& p, int refinement);

// Dyadic lower bound of VB(f, P); stops when two levels agree to stop_tol.
double vb(const PointFunction& f, const PolygonalCurve& p, int max_refinement = 16, double stop_tol = 1e-8);

struct SClassParams {
    int first_band = 1;
    int bands = 4;
    double decay_factor = 2.0;
    double growth_tol = 0.05;
    double floor = 1e-13;
    double linf_max = 1e6;
    int vb_refinement = 16;
    std::optional<PolygonalCurve> curve;
};

struct SClassReport {
    double sup_u = 0.0;
    double sup_u_coarse = 0.0;
    std::vector<double> band_widths;
    std::vector<double> boundary_decay;
    std::vector<double> decay_ratios;
    double linf_dal = 0.0;
    double linf_dal_coarse = 0.0;
    double l1_dal = 0.0;
    double l1_dal_coarse = 0.0;
    double vb = 0.0;
    std::array<bool, 4> clause{false, false, false, false};
    bool pass = false;
    std::string failing_clause;
};

// Default loop for VB: a staircase around the torus or a diamond inside the rectangle.
PolygonalCurve default_sclass_curve(const QuadratureGrid& grid);

SClassReport sclass_report(const SplitMetric& g, const SplitMetric& h, const QuadratureGrid& grid,
                           const SClassParams& params = {});

struct VariationalResult {
    double derivative = 0.0;
    double target = 0.0;
    double residual = 0.0;
};

// |(S(g, e^{2dt u}g) − S(g, e^{−2dt u}g)) / 2dt + ½∫u F_g|.
VariationalResult variational_residual(const SplitMetric& g, const ScalarField& u, double dt,
                                       const QuadratureGrid& grid);

struct CriticalityResult {
    double area_deriv = 0.0;
    double action_deriv = 0.0;
};

CriticalityResult criticality_test(const SplitMetric& g, const ScalarField& u, const QuadratureGrid& grid);

struct CounterexampleResult {
    ScalarField u;
    CriticalityResult result;
    int first = -1;
    int second = -1;
};

// Searches u = b_i − c·b_j over candidate bumps with c chosen so that ∫u da_g = 0, maximizing
// |action derivative|.
CounterexampleResult find_criticality_counterexample(const SplitMetric& g, const std::vector<ScalarField>& candidates,
                                                     const QuadratureGrid& grid);

// Limit of u(a, a+ε)/ε² for the uniformizing factor of φ in its chart.
double uniformizing_limit(const CircleMap& phi, double a);

// S(Φ*g₀, g₀) on the angular torus with diagonal band closed by the limit density.
ActionValue uniformizing_action(const CircleMap& phi, int level, int band_cells = 1);

}  // namespace splitann
