#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "splitann/autodiff.hpp"

namespace splitann {

// Affine: x = point of R in the chart R ∪ {∞}.  Angular: x = a with tan a the affine coordinate, period π.
enum class Chart { Affine, Angular };

const char* to_string(Chart chart);

struct AnnulusPoint {
    double x = 0.0;
    double y = 0.0;
    int chart_id = 0;
};

struct Box {
    double x0 = 0.0;
    double x1 = 0.0;
    double y0 = 0.0;
    double y1 = 0.0;

    bool contains(double x, double y) const { return x > x0 && x < x1 && y > y0 && y < y1; }
    double area() const { return (x1 - x0) * (y1 - y0); }
};

// Smallest box containing both; empty boxes are ignored.
Box bounding_box(const Box& a, const Box& b);

// Real Möbius map x -> (a x + b) / (c x + d).
struct Mobius {
    double a = 1.0;
    double b = 0.0;
    double c = 0.0;
    double d = 1.0;

    double det() const { return a * d - b * c; }
    double apply(double x) const;
    double derivative(double x) const;
    Mobius inverse() const;
    Mobius operator*(const Mobius& o) const;
};

// Rotation of RP^1 by angle k·π/4 (tan a -> tan(a + kπ/4)).
Mobius chart_rotation(int chart_id);

// Applies m to both coordinates; the result carries target_chart_id.
AnnulusPoint transition(const Mobius& m, const AnnulusPoint& p, int target_chart_id);

// Re-expresses p in the affine chart with the given id.
AnnulusPoint to_chart(const AnnulusPoint& p, int target_chart_id);

struct FieldValue {
    double value = 0.0;
    double dx = 0.0;
    double dy = 0.0;
    double dxy = 0.0;
};

class CircleMap;

// Real function on an annulus chart carrying exact partials up to order 2.
class ScalarField {
public:
    using Fn = std::function<Jet(const Jet&, const Jet&)>;

    ScalarField();
    ScalarField(Fn fn, std::optional<Box> support, Chart chart, std::string kind);

    Jet jet(double x, double y) const;
    Jet jet(const Jet& x, const Jet& y) const;
    double value(double x, double y) const { return jet(x, y).v; }

    const std::optional<Box>& support() const { return support_; }
    Chart chart() const { return chart_; }
    int chart_id() const { return chart_id_; }
    const std::string& kind() const { return kind_; }
    bool is_zero() const { return kind_ == "zero"; }

    static ScalarField zero(Chart chart = Chart::Affine);
    static ScalarField constant(double c, Chart chart = Chart::Affine);
    // Sum of c · x^i · y^j over (i, j, c) terms.
    static ScalarField polynomial(std::vector<std::pair<std::pair<int, int>, double>> terms,
                                  Chart chart = Chart::Affine);
    // amplitude · ψ((x-cx)/rx) · ψ((y-cy)/ry) with ψ(s) = exp(-1/(1-s²)) on |s| < 1.
    static ScalarField bump(double cx, double cy, double rx, double ry, double amplitude,
                            Chart chart = Chart::Affine);
    // Bump rescaled so that its integral over the plane equals mass.
    static ScalarField normalized_bump(double cx, double cy, double rx, double ry, double mass);
    // ½·log(c/(x−y)²) (affine) or ½·log(c/sin²(x−y)) (angular).
    static ScalarField log_conformal(double c, Chart chart = Chart::Affine);
    // log|x−y| (affine) or log|sin(x−y)| (angular).
    static ScalarField log_distance(Chart chart = Chart::Affine);
    // f(φ(x), φ(y)).
    static ScalarField composed(const ScalarField& f, const CircleMap& phi);

    ScalarField operator+(const ScalarField& o) const;
    ScalarField operator-(const ScalarField& o) const;
    ScalarField scaled(double s) const;

private:
    Fn fn_;
    std::optional<Box> support_;
    Chart chart_ = Chart::Affine;
    int chart_id_ = 0;
    std::string kind_ = "zero";
};

// Integral of ψ(s) = exp(-1/(1-s²)) over [-1, 1].
inline constexpr double kBumpMass1D = 0.44399381616807943782;

// Jet of ψ(s); zero outside (-1, 1).
Jet bump_profile(const Jet& s);

FieldValue eval_field(const ScalarField& f, const AnnulusPoint& p);

enum class Smoothness { Smooth, PiecewiseC1 };

// Orientation-preserving map of RP^1 with derivatives up to order 3 in its chart.
class CircleMap {
public:
    using Fn = std::function<Taylor3(const Taylor3&)>;

    CircleMap();
    CircleMap(Fn fn, Chart chart, std::vector<double> breakpoints, Smoothness smoothness, std::string kind,
              std::function<double(double)> inverse = {});

    Taylor3 eval(double t) const { return fn_(Taylor3::var(t)); }
    Taylor3 apply(const Taylor3& t) const { return fn_(t); }
    double operator()(double t) const { return fn_(Taylor3(t)).value(); }

    // φ(a) and φ′(a) as bivariate jets.
    Jet apply(const Jet& a) const;
    Jet apply_derivative(const Jet& a) const;

    Chart chart() const { return chart_; }
    const std::vector<double>& breakpoints() const { return breakpoints_; }
    Smoothness smoothness() const { return smoothness_; }
    const std::string& kind() const { return kind_; }
    bool has_inverse() const { return static_cast<bool>(inverse_); }
    double inverse(double t) const { return inverse_(t); }
    bool near_breakpoint(double t, double tol) const;

    static CircleMap identity(Chart chart = Chart::Affine);
    static CircleMap mobius(const Mobius& m, Chart chart = Chart::Affine);
    // θ + amplitude·sin(frequency·θ), angular chart; frequency must be even.
    static CircleMap sine(double amplitude, int frequency);
    static CircleMap tangent();
    static CircleMap exponential();
    // outer ∘ inner.
    static CircleMap compose(const CircleMap& outer, const CircleMap& inner);

private:
    Fn fn_;
    Chart chart_ = Chart::Affine;
    std::vector<double> breakpoints_;
    Smoothness smoothness_ = Smoothness::Smooth;
    std::string kind_ = "identity";
    std::function<double(double)> inverse_;
};

// Lift of a Möbius map to the angular chart, continuous in a with φ(a + π) = φ(a) + π.
Taylor3 mobius_angular(const Mobius& m, const Taylor3& a, double branch_center);
double mobius_angular_branch_center(const Mobius& m);

// Closed loop of alternating vertical (constant x) and horizontal (constant y) segments.
// Segments [p_{2i}, p_{2i+1}] are vertical and [p_{2i+1}, p_{2i+2}] horizontal, cyclically.
class PolygonalCurve {
public:
    // period > 0 compares coordinates modulo period (angular chart).
    explicit PolygonalCurve(std::vector<AnnulusPoint> vertices, double period = 0.0, double tol = 1e-12);

    const std::vector<AnnulusPoint>& vertices() const { return vertices_; }
    std::size_t size() const { return vertices_.size(); }
    double period() const { return period_; }

private:
    std::vector<AnnulusPoint> vertices_;
    double period_ = 0.0;
};

bool is_cyclically_ordered(const std::vector<double>& values, double period = 0.0, double tol = 1e-12);
PolygonalCurve normalize_polygonal(const PolygonalCurve& p, double tol = 1e-12);

// Tensor midpoint grid over a product of partitions with breakpoint-aligned cells and an optional
// diagonal band.  Level L has 32·2^L cells per axis, distributed over breakpoint intervals.
class QuadratureGrid {
public:
    static QuadratureGrid rectangle(const Box& box, int level, double band_halfwidth = 0.0);
    // Periodic angular grid on [a0, a0 + π)² with cell edges on the breakpoints.
    static QuadratureGrid torus(int level, std::vector<double> breakpoints = {}, int band_cells = 1);

    QuadratureGrid at_level(int level) const;

    int level() const { return level_; }
    Chart chart() const { return chart_; }
    bool periodic() const { return periodic_; }
    std::size_t nx() const { return xc_.size(); }
    std::size_t ny() const { return yc_.size(); }
    double node_x(std::size_t i) const { return xc_[i]; }
    double node_y(std::size_t j) const { return yc_[j]; }
    double weight(std::size_t i, std::size_t j) const { return wx_[i] * wy_[j]; }
    bool in_band(std::size_t i, std::size_t j) const;
    // Distance of a node to the diagonal in the chart (cyclic for the torus).
    double diagonal_distance(std::size_t i, std::size_t j) const;
    double band_halfwidth() const { return band_halfwidth_; }
    int band_cells() const { return band_cells_; }

    double region_area() const;
    double band_area() const;
    double total_weight() const;
    std::string descriptor() const;
    void write_csv(std::ostream& os) const;

private:
    QuadratureGrid() = default;
    void build();

    Chart chart_ = Chart::Affine;
    bool periodic_ = false;
    int level_ = 0;
    std::vector<double> xbreaks_;
    std::vector<double> ybreaks_;
    double band_halfwidth_ = 0.0;
    int band_cells_ = -1;
    std::vector<double> xc_, yc_, wx_, wy_;
};

using Density = std::function<double(const AnnulusPoint&)>;

// Pairwise-summed midpoint integral; band cells are skipped unless band_density is given.
double integrate(const QuadratureGrid& grid, const Density& density, const Density& band_density = {});

struct RefinedIntegral {
    double value = 0.0;
    double coarse = 0.0;
    double error_estimate = 0.0;
    double richardson = 0.0;
};

// Integral at the grid's level and one level coarser; Richardson assumes second order.
RefinedIntegral integrate_refined(const QuadratureGrid& grid, const Density& density,
                                  const Density& band_density = {});

double pairwise_sum(const double* data, std::size_t n);

}  // namespace splitann
