#include "splitann/curves.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "splitann/error.hpp"

namespace splitann {

namespace {

constexpr double kPi = std::numbers::pi;

Jet chart_difference(const Jet& a, const Jet& b, Chart chart) { return chart == Chart::Affine ? a - b : sin(a - b); }

double chart_gap(double a, double b, Chart chart) {
    return chart == Chart::Affine ? std::fabs(a - b) : std::fabs(std::sin(a - b));
}

bool is_infinite(double v) { return std::isinf(v); }

}  // namespace

double classical_crossratio(double a, double b, double c, double d) {
    const double v[4] = {a, b, c, d};
    for (int i = 0; i < 4; ++i) {
        if (std::isnan(v[i])) throw Error(ErrorCode::InvalidArgument, "crossratio argument is NaN");
        for (int j = i + 1; j < 4; ++j) {
            if (v[i] == v[j]) throw Error(ErrorCode::CoincidentPoints, "crossratio needs four distinct points");
        }
    }
    int infinite = 0;
    for (double x : v) infinite += is_infinite(x) ? 1 : 0;
    if (infinite > 1) throw Error(ErrorCode::CoincidentPoints, "crossratio needs four distinct points");
    if (is_infinite(a)) return (b - d) / (c - d);
    if (is_infinite(b)) return -(a - c) / (c - d);
    if (is_infinite(c)) return -(b - d) / (a - b);
    if (is_infinite(d)) return (a - c) / (a - b);
    return (a - c) * (b - d) / ((a - b) * (c - d));
}

Crossratio::Crossratio(Fn fn, Chart chart, std::string family)
    : fn_(std::move(fn)), chart_(chart), family_(std::move(family)) {}

double Crossratio::operator()(double x, double y, double X, double Y) const {
    return fn_(Jet(x), Jet(y), Jet(X), Jet(Y)).v;
}

Jet Crossratio::log_jet(double x, double y, double X, double Y) const {
    return log_abs(fn_(Jet(x), Jet::var_x(y), Jet(X), Jet::var_y(Y)));
}

Jet diamond_ratio(const Jet& x, const Jet& y, const Jet& X, const Jet& Y, Chart chart) {
    return chart_difference(x, X, chart) * chart_difference(y, Y, chart) /
           (chart_difference(x, Y, chart) * chart_difference(y, X, chart));
}

Crossratio reference_crossratio(Chart chart) {
    auto fn = [chart](const Jet& x, const Jet& y, const Jet& X, const Jet& Y) {
        return square(diamond_ratio(x, y, X, Y, chart));
    };
    return {fn, chart, "circle"};
}

Crossratio po22_crossratio(const CircleMap& phi) { return po22_crossratio(CircleMap::identity(Chart::Angular), phi); }

Crossratio po22_crossratio(const CircleMap& psi, const CircleMap& phi) {
    if (psi.chart() != Chart::Angular || phi.chart() != Chart::Angular) {
        throw Error(ErrorCode::OutOfChart, "PO(2,2) crossratio is built in the angular chart");
    }
    auto fn = [psi, phi](const Jet& x, const Jet& y, const Jet& X, const Jet& Y) {
        return diamond_ratio(psi.apply(x), psi.apply(y), psi.apply(X), psi.apply(Y), Chart::Angular) *
               diamond_ratio(phi.apply(x), phi.apply(y), phi.apply(X), phi.apply(Y), Chart::Angular);
    };
    return {fn, Chart::Angular, "po22"};
}

Jet PSL3Curve::pairing(const Jet& s, const Jet& t) const {
    const auto l = line(s);
    const auto x = point(t);
    return l[0] * x[0] + l[1] * x[1] + l[2] * x[2];
}

double PSL3Curve::pairing(double s, double t) const { return pairing(Jet(s), Jet(t)).v; }

double PSL3Curve::incidence_residual(const std::vector<double>& samples) const {
    double r = 0.0;
    for (double t : samples) {
        r = std::max(r, std::fabs(pairing(t, t)));
        r = std::max(r, std::fabs(pairing(Jet(t), Jet::var_x(t)).x));
    }
    return r;
}

PSL3Curve psl3_conic(Chart chart) {
    PSL3Curve c;
    c.chart = chart;
    if (chart == Chart::Affine) {
        c.point = [](const Jet& t) { return std::array<Jet, 3>{t * t, t, Jet(1.0)}; };
        c.line = [](const Jet& s) { return std::array<Jet, 3>{Jet(1.0), -2.0 * s, s * s}; };
    } else {
        c.point = [](const Jet& a) {
            const Jet s = sin(a), k = cos(a);
            return std::array<Jet, 3>{s * s, s * k, k * k};
        };
        c.line = [](const Jet& a) {
            const Jet s = sin(a), k = cos(a);
            return std::array<Jet, 3>{k * k, -2.0 * s * k, s * s};
        };
    }
    return c;
}

Crossratio psl3_crossratio(const PSL3Curve& c) {
    auto fn = [c](const Jet& x, const Jet& y, const Jet& X, const Jet& Y) {
        const Jet num = c.pairing(X, x) * c.pairing(Y, y);
        const Jet den = c.pairing(Y, x) * c.pairing(X, y);
        if (den.v == 0.0 || !std::isfinite(den.v)) {
            throw Error(ErrorCode::DegeneratePairing, "pairing vanishes in the crossratio denominator");
        }
        return num / den;
    };
    return {fn, c.chart, "psl3"};
}

Diamond::Diamond(double x_, double y_, double X_, double Y_, double period) : x(x_), y(y_), X(X_), Y(Y_) {
    if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(X) || !std::isfinite(Y)) {
        throw Error(ErrorCode::InvalidArgument, "diamond corners must be finite");
    }
    if (x == y || X == Y) throw Error(ErrorCode::InvalidArgument, "diamond sides must have positive length");
    if (!is_cyclically_ordered({x, y, X, Y}, period)) {
        throw Error(ErrorCode::NotCyclic, "diamond corners are not cyclically ordered");
    }
}

double diamond_area(const Crossratio& b, const Diamond& d) {
    const double v = b(d.x, d.y, d.X, d.Y);
    if (!(v > 0.0)) {
        std::ostringstream msg;
        msg << "crossratio is not positive on the diamond: b = " << v;
        throw Error(ErrorCode::NonPositiveB, msg.str());
    }
    return std::log(v);
}

double diamond_area_quadrature(const Crossratio& b, const Diamond& d) {
    using boost::math::quadrature::gauss;
    auto inner = [&](double s) {
        auto f = [&](double t) { return crossratio_metric_density(b, {s, t}); };
        return gauss<double, 30>::integrate(f, d.X, d.Y);
    };
    return gauss<double, 30>::integrate(inner, d.x, d.y);
}

namespace {

// Reference slots away from s, t and from each other.
std::pair<double, double> reference_slots(Chart chart, double s, double t) {
    static constexpr double kOffsets[] = {0.41, 0.83, 1.27, 0.19, 1.51, 0.63};
    for (double a : kOffsets) {
        for (double b : kOffsets) {
            const double xr = s + a, Xr = t - b;
            if (chart_gap(xr, t, chart) > 0.1 && chart_gap(Xr, s, chart) > 0.1 && chart_gap(xr, Xr, chart) > 0.1) {
                return {xr, Xr};
            }
        }
    }
    return {s + 0.5, t - 0.5};
}

}  // namespace

double crossratio_metric_density(const Crossratio& b, const AnnulusPoint& p) {
    const auto [xr, Xr] = reference_slots(b.chart(), p.x, p.y);
    const double rho = b.log_jet(xr, p.x, Xr, p.y).xy;
    if (!std::isfinite(rho)) throw Error(ErrorCode::NonSmoothB, "crossratio metric density is not finite");
    return rho;
}

double crossratio_metric_density_fd(const Crossratio& b, const AnnulusPoint& p, double h) {
    const auto [xr, Xr] = reference_slots(b.chart(), p.x, p.y);
    auto L = [&](double s, double t) { return std::log(std::fabs(b(xr, s, Xr, t))); };
    const double rho =
        (L(p.x + h, p.y + h) - L(p.x + h, p.y - h) - L(p.x - h, p.y + h) + L(p.x - h, p.y - h)) / (4.0 * h * h);
    if (!std::isfinite(rho)) throw Error(ErrorCode::NonSmoothB, "crossratio metric density is not finite");
    return rho;
}

double schwarzian(const CircleMap& phi, double x) {
    if (phi.near_breakpoint(x, 1e-9)) {
        std::ostringstream msg;
        msg << "circle map is not C3 at " << x;
        throw Error(ErrorCode::NotC3AtPoint, msg.str());
    }
    const Taylor3 t = phi.eval(x);
    const double r = t[2] / t[1];
    return t[3] / t[1] - 1.5 * r * r;
}

double schwarzian_ratio(const CircleMap& phi, double x, double eps) {
    const ScalarField u = reference_pullback_factor(Reference::DeSitter, phi);
    return u.value(x, x + eps) / (eps * eps);
}

Mobius parabolic(double p, double s) {
    if (std::isinf(p)) return {1.0, s, 0.0, 1.0};
    return {1.0 + s * p, -s * p * p, s, 1.0 - s * p};
}

namespace {

struct PieceData {
    std::vector<double> breakpoints;
    std::vector<Mobius> pieces;
    std::vector<double> centers;
    std::vector<double> offsets;
};

Taylor3 piece_eval(const PieceData& d, std::size_t i, const Taylor3& a) {
    Taylor3 r = mobius_angular(d.pieces[i], a, d.centers[i]);
    r.d[0] += d.offsets[i];
    return r;
}

Taylor3 piecewise_eval(const PieceData& d, const Taylor3& a) {
    const double t0 = d.breakpoints.front();
    const double k = std::floor((a[0] - t0) / kPi);
    const Taylor3 b = a - k * kPi;
    auto it = std::upper_bound(d.breakpoints.begin(), d.breakpoints.end(), b[0]);
    std::size_t i = it == d.breakpoints.begin() ? 0 : static_cast<std::size_t>(it - d.breakpoints.begin()) - 1;
    i = std::min(i, d.pieces.size() - 1);
    Taylor3 r = piece_eval(d, i, b);
    r.d[0] += k * kPi;
    return r;
}

}  // namespace

PiecewiseMobius::PiecewiseMobius(std::vector<double> breakpoints, std::vector<Mobius> pieces, double c0_tol,
                                 double c1_tol)
    : breakpoints_(std::move(breakpoints)), pieces_(std::move(pieces)) {
    if (pieces_.empty() || breakpoints_.size() != pieces_.size() + 1) {
        throw Error(ErrorCode::InvalidArgument, "piecewise Möbius map needs one more breakpoint than pieces");
    }
    for (std::size_t i = 0; i + 1 < breakpoints_.size(); ++i) {
        if (!(breakpoints_[i + 1] > breakpoints_[i])) {
            throw Error(ErrorCode::InvalidArgument, "breakpoints must increase");
        }
    }
    if (std::fabs(breakpoints_.back() - breakpoints_.front() - kPi) > 1e-12) {
        throw Error(ErrorCode::InvalidArgument, "breakpoints must span one period π");
    }
    for (const Mobius& m : pieces_) {
        if (!(m.det() > 0.0)) throw Error(ErrorCode::InvalidArgument, "pieces must have positive determinant");
    }
    PieceData d{breakpoints_, pieces_, {}, {}};
    for (const Mobius& m : pieces_) d.centers.push_back(mobius_angular_branch_center(m));
    d.offsets.assign(pieces_.size(), 0.0);
    const std::size_t n = pieces_.size();
    for (std::size_t i = 1; i <= n; ++i) {
        const Taylor3 t = Taylor3::var(breakpoints_[i]);
        const Taylor3 left = piece_eval(d, i - 1, t);
        Taylor3 right;
        if (i < n) {
            right = piece_eval(d, i, t);
            d.offsets[i] = std::round((left[0] - right[0]) / kPi) * kPi;
            right.d[0] += d.offsets[i];
        } else {
            right = piece_eval(d, 0, Taylor3::var(breakpoints_.front()));
            right.d[0] += kPi;
            if (std::fabs(left[0] - right[0]) > 0.5 * kPi) {
                throw Error(ErrorCode::NotC1, "piecewise Möbius map does not have degree one");
            }
        }
        c0_ = std::max(c0_, std::fabs(std::sin(left[0] - right[0])));
        c1_ = std::max(c1_, std::fabs(left[1] - right[1]));
    }
    if (c0_ > c0_tol || c1_ > c1_tol) {
        std::ostringstream msg;
        msg << "pieces do not glue to a C1 map: C0 residual " << c0_ << ", C1 residual " << c1_;
        throw Error(ErrorCode::NotC1, msg.str());
    }
}

CircleMap PiecewiseMobius::circle_map() const {
    PieceData d{breakpoints_, pieces_, {}, {}};
    for (const Mobius& m : pieces_) d.centers.push_back(mobius_angular_branch_center(m));
    d.offsets.assign(pieces_.size(), 0.0);
    for (std::size_t i = 1; i < pieces_.size(); ++i) {
        const Taylor3 t = Taylor3::var(breakpoints_[i]);
        const double left = piece_eval(d, i - 1, t)[0];
        const double right = piece_eval(d, i, t)[0];
        d.offsets[i] = std::round((left - right) / kPi) * kPi;
    }
    auto fn = [d](const Taylor3& a) { return piecewise_eval(d, a); };
    auto inv = [d](double v) {
        const double t0 = d.breakpoints.front();
        const double y0 = piecewise_eval(d, Taylor3(t0))[0];
        const double k = std::floor((v - y0) / kPi);
        auto f = [&](double a) { return piecewise_eval(d, Taylor3(a))[0] - v; };
        const double lo = t0 + k * kPi, hi = lo + kPi;
        if (f(lo) == 0.0) return lo;
        std::uintmax_t iters = 200;
        const auto r = boost::math::tools::toms748_solve(f, lo, hi, boost::math::tools::eps_tolerance<double>(52), iters);
        return 0.5 * (r.first + r.second);
    };
    std::vector<double> bps(breakpoints_.begin(), breakpoints_.end() - 1);
    return CircleMap(fn, Chart::Angular, bps, Smoothness::PiecewiseC1, "piecewise_mobius", inv);
}

PiecewiseMobius PiecewiseMobius::four_piece() {
    const double inf = std::numeric_limits<double>::infinity();
    const Mobius k0 = parabolic(inf, 0.5);
    const Mobius k1 = parabolic(-1.0, 1.0 / 3.0);
    const Mobius k2 = parabolic(0.0, -0.5);
    return {{kPi / 4.0, kPi / 2.0, 3.0 * kPi / 4.0, kPi, 5.0 * kPi / 4.0}, {Mobius{}, k0, k0 * k1, k0 * k1 * k2}};
}

PiecewiseMobius PiecewiseMobius::two_piece(const Mobius& m) { return {{0.0, kPi / 2.0, kPi}, {m, m}}; }

const char* to_string(CurveFamily f) { return f == CurveFamily::PO22 ? "po22" : "psl3"; }

CurveFamily curve_family_from_string(const std::string& s) {
    if (s == "po22" || s == "PO22" || s == "PO(2,2)") return CurveFamily::PO22;
    if (s == "psl3" || s == "PSL3" || s == "PSL(3,R)") return CurveFamily::PSL3;
    throw Error(ErrorCode::ConfigError, "unknown curve family: " + s);
}

Crossratio PositiveCurve::crossratio() const {
    if (family == CurveFamily::PO22) return po22_crossratio(psi, phi);
    const Crossratio base = psl3_crossratio(psl3_conic(Chart::Angular));
    const CircleMap p = psi;
    auto fn = [base, p](const Jet& x, const Jet& y, const Jet& X, const Jet& Y) {
        return base.jet(p.apply(x), p.apply(y), p.apply(X), p.apply(Y));
    };
    return {fn, Chart::Angular, "psl3"};
}

std::vector<double> PositiveCurve::breakpoints() const {
    std::vector<double> b = psi.breakpoints();
    if (family == CurveFamily::PO22) b.insert(b.end(), phi.breakpoints().begin(), phi.breakpoints().end());
    std::sort(b.begin(), b.end());
    b.erase(std::unique(b.begin(), b.end(), [](double a, double c) { return std::fabs(a - c) < 1e-14; }), b.end());
    return b;
}

PositiveCurve PositiveCurve::reparametrized(const CircleMap& f) const {
    PositiveCurve c = *this;
    c.psi = CircleMap::compose(psi, f);
    c.phi = CircleMap::compose(phi, f);
    return c;
}

double circle_metric_scale(CurveFamily f) {
    PositiveCurve circle;
    circle.family = f;
    const AnnulusPoint p{0.3, 1.4};
    const double s = std::sin(p.x - p.y);
    return crossratio_metric_density(circle.crossratio(), p) * s * s / 2.0;
}

SplitMetric curve_metric(const PositiveCurve& c) {
    for (const CircleMap* m : {&c.psi, &c.phi}) {
        if (m->chart() != Chart::Angular) throw Error(ErrorCode::OutOfChart, "curve maps live in the angular chart");
    }
    const ScalarField wpsi = reference_pullback_factor(Reference::DeSitter, c.psi);
    if (c.family == CurveFamily::PSL3) return SplitMetric::desitter(wpsi, Chart::Angular);
    const ScalarField wphi = reference_pullback_factor(Reference::DeSitter, c.phi);
    auto fn = [wpsi, wphi](const Jet& x, const Jet& y) {
        return 0.5 * log(0.5 * (exp(2.0 * wpsi.jet(x, y)) + exp(2.0 * wphi.jet(x, y))));
    };
    return SplitMetric::desitter(ScalarField(fn, std::nullopt, Chart::Angular, "curve"), Chart::Angular);
}

SplitMetric circle_metric(CurveFamily f) {
    return SplitMetric::desitter(ScalarField::constant(0.5 * std::log(circle_metric_scale(f)), Chart::Angular),
                                 Chart::Angular);
}

CurveAction curve_action(const PositiveCurve& c, int level, const SClassParams& params, bool require_sclass) {
    const SplitMetric g = curve_metric(c);
    const SplitMetric h = circle_metric(c.family);
    const QuadratureGrid top = QuadratureGrid::torus(level, c.breakpoints(), 1);

    CurveAction out;
    out.sclass = sclass_report(g, h, top, params);
    if (require_sclass && !out.sclass.pass) {
        throw Error(ErrorCode::SClassFail, "curve metric is not in the S-class: " + out.sclass.failing_clause);
    }

    Density band;
    if (c.family == CurveFamily::PO22) {
        band = [&c](const AnnulusPoint& p) {
            return 0.5 * (uniformizing_limit(c.psi, p.x) + uniformizing_limit(c.phi, p.x));
        };
    } else {
        band = [&c](const AnnulusPoint& p) { return uniformizing_limit(c.psi, p.x); };
    }

    ActionValue& a = out.action;
    for (int l = 0; l <= level; ++l) a.trail.push_back({l, action(g, h, top.at_level(l), band).value});
    a.value = a.trail.back().value;
    if (a.trail.size() > 1) {
        const double coarse = a.trail[a.trail.size() - 2].value;
        a.error_estimate = std::fabs(a.value - coarse);
        a.richardson = a.value + (a.value - coarse) / 3.0;
    } else {
        a.richardson = a.value;
    }
    a.grid = top.descriptor();
    a.formula = "definition";
    return out;
}

double reparam_invariance_residual(const PositiveCurve& c, const CircleMap& f, int level) {
    const double s0 = curve_action(c, level, {}, false).action.value;
    const double s1 = curve_action(c.reparametrized(f), level, {}, false).action.value;
    return std::fabs(s1 - s0);
}

}  // namespace splitann
