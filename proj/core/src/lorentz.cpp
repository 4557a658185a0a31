#include "splitann/lorentz.hpp"

#include <cmath>
#include <numbers>

#include "splitann/error.hpp"

namespace splitann {

namespace {

void check_off_diagonal(Chart chart, const AnnulusPoint& p) {
    const bool diagonal = chart == Chart::Affine ? p.x == p.y : std::sin(p.x - p.y) == 0.0;
    if (diagonal) throw Error(ErrorCode::DiagonalPoint, "point lies on the diagonal");
}

}  // namespace

const char* to_string(Reference ref) { return ref == Reference::Flat ? "flat" : "desitter"; }

SplitMetric::SplitMetric(Reference reference, ScalarField u, Chart chart)
    : reference_(reference), chart_(chart), u_(std::move(u)) {
    if (u_.chart() != chart_) throw Error(ErrorCode::OutOfChart, "conformal factor chart differs from metric chart");
    if (reference_ == Reference::Flat && chart_ == Chart::Angular) {
        throw Error(ErrorCode::InvalidArgument, "flat reference is only defined in the affine chart");
    }
}

SplitMetric SplitMetric::flat(ScalarField u) { return {Reference::Flat, std::move(u), Chart::Affine}; }

SplitMetric SplitMetric::desitter(ScalarField u, Chart chart) { return {Reference::DeSitter, std::move(u), chart}; }

Jet SplitMetric::reference_factor(double x, double y) const {
    if (reference_ == Reference::Flat) return Jet{};
    const Jet jx = Jet::var_x(x), jy = Jet::var_y(y);
    const double half_log2 = 0.5 * std::numbers::ln2;
    if (chart_ == Chart::Affine) return half_log2 - log_abs(jx - jy);
    return half_log2 - log_abs(sin(jx - jy));
}

Jet SplitMetric::total_factor(double x, double y) const { return reference_factor(x, y) + u_.jet(x, y); }

double SplitMetric::density(double x, double y) const { return std::exp(2.0 * total_factor(x, y).v); }

SplitMetric SplitMetric::scaled(const ScalarField& w) const { return {reference_, u_ + w, chart_}; }

Eigen::Matrix2d SplitMetric::gram(double x, double y) const {
    const double half = 0.5 * density(x, y);
    Eigen::Matrix2d g;
    g << 0.0, half, half, 0.0;
    return g;
}

bool compatible(const SplitMetric& g, const SplitMetric& h) {
    return g.reference() == h.reference() && g.chart() == h.chart();
}

ScalarField reference_pullback_factor(Reference reference, const CircleMap& phi) {
    const Chart chart = phi.chart();
    if (reference == Reference::Flat) {
        if (chart != Chart::Affine) throw Error(ErrorCode::OutOfChart, "flat reference needs the affine chart");
        auto fn = [phi](const Jet& x, const Jet& y) {
            return 0.5 * (log(phi.apply_derivative(x)) + log(phi.apply_derivative(y)));
        };
        return ScalarField(fn, std::nullopt, chart, "pullback_factor");
    }
    ScalarField::Fn fn;
    if (chart == Chart::Affine) {
        fn = [phi](const Jet& x, const Jet& y) {
            return 0.5 * (log(phi.apply_derivative(x)) + log(phi.apply_derivative(y))) + log_abs(x - y) -
                   log_abs(phi.apply(x) - phi.apply(y));
        };
    } else {
        fn = [phi](const Jet& x, const Jet& y) {
            return 0.5 * (log(phi.apply_derivative(x)) + log(phi.apply_derivative(y))) + log_abs(sin(x - y)) -
                   log_abs(sin(phi.apply(x) - phi.apply(y)));
        };
    }
    return ScalarField(fn, std::nullopt, chart, "uniformizing");
}

SplitMetric pullback(const SplitMetric& g, const CircleMap& phi) {
    if (phi.chart() != g.chart()) throw Error(ErrorCode::OutOfChart, "circle map chart differs from metric chart");
    ScalarField u = ScalarField::composed(g.u(), phi) + reference_pullback_factor(g.reference(), phi);
    return {g.reference(), u, g.chart()};
}

double dalembertian(const SplitMetric& g, const ScalarField& f, const AnnulusPoint& p) {
    check_off_diagonal(g.chart(), p);
    return 2.0 * f.jet(p.x, p.y).xy / g.density(p.x, p.y);
}

CurvatureReport::CurvatureReport(SplitMetric g) : g_(std::move(g)) {}

double CurvatureReport::K(const AnnulusPoint& p) const {
    check_off_diagonal(g_.chart(), p);
    const Jet v = g_.total_factor(p.x, p.y);
    return -2.0 * v.xy * std::exp(-2.0 * v.v);
}

double CurvatureReport::F(const AnnulusPoint& p) const { return K(p) * g_.density(p.x, p.y); }

CurvatureReport curvature(const SplitMetric& g) { return CurvatureReport(g); }

double conformal_change_residual(const SplitMetric& g, const ScalarField& u, const std::vector<AnnulusPoint>& sample) {
    const SplitMetric h = g.scaled(u);
    const CurvatureReport kg(g), kh(h);
    double worst = 0.0;
    for (const auto& p : sample) {
        const double lhs = dalembertian(g, u, p);
        const double rhs = kg.K(p) - std::exp(2.0 * u.jet(p.x, p.y).v) * kh.K(p);
        worst = std::max(worst, std::fabs(lhs - rhs));
    }
    return worst;
}

double dcI_density(const ScalarField& u, const AnnulusPoint& p) { return 2.0 * u.jet(p.x, p.y).xy; }

CurvatureFormDifference curvature_form_difference(const SplitMetric& g, const ScalarField& u, const AnnulusPoint& p) {
    CurvatureFormDifference r;
    r.dcI = dcI_density(u, p);
    r.dal_area = dalembertian(g, u, p) * g.density(p.x, p.y);
    r.curvature_difference = curvature(g).F(p) - curvature(g.scaled(u)).F(p);
    const double scale = std::max({1.0, std::fabs(r.dcI)});
    r.residual = std::max(std::fabs(r.dcI - r.dal_area), std::fabs(r.dcI - r.curvature_difference)) / scale;
    return r;
}

double trace(const SplitMetric& g, const AnnulusPoint& p, const Eigen::Matrix2d& t) {
    check_off_diagonal(g.chart(), p);
    return (g.gram(p.x, p.y).inverse() * t).trace();
}

}  // namespace splitann
