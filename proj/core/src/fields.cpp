#include "splitann/fields.hpp"

#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <exception>
#include <iomanip>
#include <limits>
#include <mutex>
#include <numbers>
#include <ostream>
#include <sstream>
#include <thread>

#include "splitann/error.hpp"

namespace splitann {

namespace {

constexpr double kPi = std::numbers::pi;

double coord_gap(double a, double b, double period) {
    return period > 0.0 ? std::fabs(std::remainder(a - b, period)) : std::fabs(a - b);
}

bool same_point(const AnnulusPoint& a, const AnnulusPoint& b, double period, double tol) {
    return coord_gap(a.x, b.x, period) <= tol && coord_gap(a.y, b.y, period) <= tol;
}

}  // namespace

const char* to_string(Chart chart) { return chart == Chart::Affine ? "affine" : "angular"; }

Box bounding_box(const Box& a, const Box& b) {
    if (!(a.area() > 0.0)) return b;
    if (!(b.area() > 0.0)) return a;
    return {std::min(a.x0, b.x0), std::max(a.x1, b.x1), std::min(a.y0, b.y0), std::max(a.y1, b.y1)};
}

double Mobius::apply(double x) const {
    if (std::isinf(x)) {
        return c == 0.0 ? std::numeric_limits<double>::infinity() : a / c;
    }
    const double den = c * x + d;
    if (den == 0.0) return std::numeric_limits<double>::infinity();
    return (a * x + b) / den;
}

double Mobius::derivative(double x) const {
    const double den = c * x + d;
    return det() / (den * den);
}

Mobius Mobius::inverse() const { return {d, -b, -c, a}; }

Mobius Mobius::operator*(const Mobius& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
}

Mobius chart_rotation(int chart_id) {
    const double t = chart_id * kPi / 4.0;
    return {std::cos(t), std::sin(t), -std::sin(t), std::cos(t)};
}

AnnulusPoint transition(const Mobius& m, const AnnulusPoint& p, int target_chart_id) {
    return {m.apply(p.x), m.apply(p.y), target_chart_id};
}

AnnulusPoint to_chart(const AnnulusPoint& p, int target_chart_id) {
    // Affine coordinate in chart k is tan(a - kπ/4) where a is the angular coordinate.
    const Mobius m = chart_rotation(p.chart_id - target_chart_id);
    return transition(m, p, target_chart_id);
}

Jet bump_profile(const Jet& s) {
    if (!(s.v > -1.0 && s.v < 1.0)) return Jet{};
    const Jet q = 1.0 - square(s);
    return exp(-inv(q));
}

ScalarField::ScalarField() : fn_([](const Jet&, const Jet&) { return Jet{}; }) {}

ScalarField::ScalarField(Fn fn, std::optional<Box> support, Chart chart, std::string kind)
    : fn_(std::move(fn)), support_(support), chart_(chart), kind_(std::move(kind)) {}

Jet ScalarField::jet(double x, double y) const { return jet(Jet::var_x(x), Jet::var_y(y)); }

Jet ScalarField::jet(const Jet& x, const Jet& y) const {
    if (support_ && !support_->contains(x.v, y.v)) return Jet{};
    return fn_(x, y);
}

ScalarField ScalarField::zero(Chart chart) {
    return ScalarField([](const Jet&, const Jet&) { return Jet{}; }, Box{0, 0, 0, 0}, chart, "zero");
}

ScalarField ScalarField::constant(double c, Chart chart) {
    return ScalarField([c](const Jet&, const Jet&) { return Jet(c); }, std::nullopt, chart, "constant");
}

ScalarField ScalarField::polynomial(std::vector<std::pair<std::pair<int, int>, double>> terms, Chart chart) {
    for (const auto& t : terms) {
        if (t.first.first < 0 || t.first.second < 0) {
            throw Error(ErrorCode::InvalidArgument, "polynomial exponents must be non-negative");
        }
    }
    auto fn = [terms = std::move(terms)](const Jet& x, const Jet& y) {
        Jet sum;
        for (const auto& [ij, c] : terms) {
            Jet term(c);
            for (int k = 0; k < ij.first; ++k) term = term * x;
            for (int k = 0; k < ij.second; ++k) term = term * y;
            sum += term;
        }
        return sum;
    };
    return ScalarField(fn, std::nullopt, chart, "polynomial");
}

ScalarField ScalarField::bump(double cx, double cy, double rx, double ry, double amplitude, Chart chart) {
    if (!(rx > 0.0 && ry > 0.0)) throw Error(ErrorCode::InvalidArgument, "bump radii must be positive");
    auto fn = [=](const Jet& x, const Jet& y) {
        return amplitude * bump_profile((x - cx) / rx) * bump_profile((y - cy) / ry);
    };
    return ScalarField(fn, Box{cx - rx, cx + rx, cy - ry, cy + ry}, chart, "bump");
}

ScalarField ScalarField::normalized_bump(double cx, double cy, double rx, double ry, double mass) {
    const double amplitude = mass / (rx * ry * kBumpMass1D * kBumpMass1D);
    return bump(cx, cy, rx, ry, amplitude);
}

ScalarField ScalarField::log_conformal(double c, Chart chart) {
    if (!(c > 0.0)) throw Error(ErrorCode::InvalidArgument, "log_conformal constant must be positive");
    const double half_log_c = 0.5 * std::log(c);
    Fn fn;
    if (chart == Chart::Affine) {
        fn = [half_log_c](const Jet& x, const Jet& y) { return half_log_c - log_abs(x - y); };
    } else {
        fn = [half_log_c](const Jet& x, const Jet& y) { return half_log_c - log_abs(sin(x - y)); };
    }
    return ScalarField(fn, std::nullopt, chart, "log_conformal");
}

ScalarField ScalarField::log_distance(Chart chart) {
    Fn fn;
    if (chart == Chart::Affine) {
        fn = [](const Jet& x, const Jet& y) { return log_abs(x - y); };
    } else {
        fn = [](const Jet& x, const Jet& y) { return log_abs(sin(x - y)); };
    }
    return ScalarField(fn, std::nullopt, chart, "log_distance");
}

ScalarField ScalarField::composed(const ScalarField& f, const CircleMap& phi) {
    if (f.chart() != phi.chart()) throw Error(ErrorCode::OutOfChart, "field and circle map charts differ");
    std::optional<Box> support;
    if (f.support() && phi.has_inverse()) {
        const Box& b = *f.support();
        Box pre{phi.inverse(b.x0), phi.inverse(b.x1), phi.inverse(b.y0), phi.inverse(b.y1)};
        if (std::isfinite(pre.x0) && std::isfinite(pre.x1) && std::isfinite(pre.y0) && std::isfinite(pre.y1) &&
            pre.x0 < pre.x1 && pre.y0 < pre.y1) {
            support = pre;
        }
    }
    auto inner = f;
    auto fn = [inner, phi](const Jet& x, const Jet& y) { return inner.jet(phi.apply(x), phi.apply(y)); };
    return ScalarField(fn, support, f.chart(), "composed");
}

ScalarField ScalarField::operator+(const ScalarField& o) const {
    if (chart_ != o.chart_) throw Error(ErrorCode::OutOfChart, "cannot add fields on different charts");
    if (o.is_zero()) return *this;
    if (is_zero()) return o;
    std::optional<Box> support;
    if (support_ && o.support_) support = bounding_box(*support_, *o.support_);
    auto a = *this;
    auto b = o;
    return ScalarField([a, b](const Jet& x, const Jet& y) { return a.jet(x, y) + b.jet(x, y); }, support, chart_,
                       "sum");
}

ScalarField ScalarField::operator-(const ScalarField& o) const { return *this + o.scaled(-1.0); }

ScalarField ScalarField::scaled(double s) const {
    if (is_zero()) return *this;
    auto a = *this;
    return ScalarField([a, s](const Jet& x, const Jet& y) { return s * a.jet(x, y); }, support_, chart_, kind_);
}

FieldValue eval_field(const ScalarField& f, const AnnulusPoint& p) {
    if (p.chart_id != f.chart_id()) {
        throw Error(ErrorCode::OutOfChart, "point chart " + std::to_string(p.chart_id) + " differs from field chart");
    }
    const bool diagonal = f.chart() == Chart::Affine ? p.x == p.y : std::sin(p.x - p.y) == 0.0;
    if (diagonal) throw Error(ErrorCode::DiagonalPoint, "evaluation on the diagonal");
    const Jet j = f.jet(p.x, p.y);
    return {j.v, j.x, j.y, j.xy};
}

CircleMap::CircleMap() : CircleMap(identity()) {}

CircleMap::CircleMap(Fn fn, Chart chart, std::vector<double> breakpoints, Smoothness smoothness, std::string kind,
                     std::function<double(double)> inverse)
    : fn_(std::move(fn)),
      chart_(chart),
      breakpoints_(std::move(breakpoints)),
      smoothness_(smoothness),
      kind_(std::move(kind)),
      inverse_(std::move(inverse)) {}

Jet CircleMap::apply(const Jet& a) const {
    const Taylor3 t = eval(a.v);
    return splitann::compose(a, t[0], t[1], t[2]);
}

Jet CircleMap::apply_derivative(const Jet& a) const {
    const Taylor3 t = eval(a.v);
    return splitann::compose(a, t[1], t[2], t[3]);
}

bool CircleMap::near_breakpoint(double t, double tol) const {
    for (double b : breakpoints_) {
        double d = t - b;
        if (chart_ == Chart::Angular) d = std::remainder(d, kPi);
        if (std::fabs(d) <= tol) return true;
    }
    return false;
}

CircleMap CircleMap::identity(Chart chart) {
    return CircleMap([](const Taylor3& t) { return t; }, chart, {}, Smoothness::Smooth, "identity",
                     [](double t) { return t; });
}

double mobius_angular_branch_center(const Mobius& m) {
    constexpr int kSamples = 256;
    double prev = 0.0;
    double lo = 0.0, hi = 0.0;
    for (int k = 0; k <= kSamples; ++k) {
        const double a = k * kPi / kSamples;
        const double w0 = m.a * std::sin(a) + m.b * std::cos(a);
        const double w1 = m.c * std::sin(a) + m.d * std::cos(a);
        double delta = std::remainder(std::atan2(w0, w1) - a, kPi);
        if (k > 0) delta = prev + std::remainder(delta - prev, kPi);
        prev = delta;
        lo = k == 0 ? delta : std::min(lo, delta);
        hi = k == 0 ? delta : std::max(hi, delta);
    }
    return 0.5 * (lo + hi);
}

Taylor3 mobius_angular(const Mobius& m, const Taylor3& a, double branch_center) {
    const Taylor3 s = sin(a), c = cos(a);
    const Taylor3 w0 = m.a * s + m.b * c;
    const Taylor3 w1 = m.c * s + m.d * c;
    Taylor3 th = atan2(w0, w1);
    const double delta = th[0] - a[0];
    const double shift = branch_center + std::remainder(delta - branch_center, kPi) - delta;
    th.d[0] += shift;
    return th;
}

CircleMap CircleMap::mobius(const Mobius& m, Chart chart) {
    if (!(m.det() > 0.0)) throw Error(ErrorCode::InvalidArgument, "Möbius map must have positive determinant");
    if (chart == Chart::Affine) {
        auto fn = [m](const Taylor3& t) { return (m.a * t + m.b) / (m.c * t + m.d); };
        const Mobius mi = m.inverse();
        return CircleMap(fn, chart, {}, Smoothness::Smooth, "mobius", [mi](double t) { return mi.apply(t); });
    }
    const double center = mobius_angular_branch_center(m);
    const Mobius mi = m.inverse();
    const double center_inv = mobius_angular_branch_center(mi);
    auto fn = [m, center](const Taylor3& t) { return mobius_angular(m, t, center); };
    auto inv_fn = [mi, center_inv](double t) { return mobius_angular(mi, Taylor3(t), center_inv)[0]; };
    return CircleMap(fn, chart, {}, Smoothness::Smooth, "mobius", inv_fn);
}

CircleMap CircleMap::sine(double amplitude, int frequency) {
    if (frequency % 2 != 0) throw Error(ErrorCode::InvalidArgument, "sine map frequency must be even");
    if (std::fabs(amplitude * frequency) >= 1.0) {
        throw Error(ErrorCode::InvalidArgument, "sine map must be orientation preserving");
    }
    const double k = frequency;
    auto fn = [amplitude, k](const Taylor3& t) { return t + amplitude * sin(k * t); };
    auto inv = [amplitude, k](double t) {
        const double r = std::fabs(amplitude);
        if (r == 0.0) return t;
        auto f = [&](double a) { return a + amplitude * std::sin(k * a) - t; };
        std::uintmax_t iters = 200;
        const auto [lo, hi] = boost::math::tools::toms748_solve(f, t - r, t + r, boost::math::tools::eps_tolerance<double>(52), iters);
        return 0.5 * (lo + hi);
    };
    return CircleMap(fn, Chart::Angular, {}, Smoothness::Smooth, "sine", inv);
}

CircleMap CircleMap::tangent() {
    auto fn = [](const Taylor3& t) { return tan(t); };
    return CircleMap(fn, Chart::Affine, {}, Smoothness::Smooth, "tangent", [](double t) { return std::atan(t); });
}

CircleMap CircleMap::exponential() {
    auto fn = [](const Taylor3& t) { return exp(t); };
    return CircleMap(fn, Chart::Affine, {}, Smoothness::Smooth, "exponential", [](double t) { return std::log(t); });
}

CircleMap CircleMap::compose(const CircleMap& outer, const CircleMap& inner) {
    if (outer.chart() != inner.chart()) throw Error(ErrorCode::OutOfChart, "circle map charts differ");
    auto fn = [outer, inner](const Taylor3& t) { return outer.apply(inner.apply(t)); };
    std::vector<double> bps = inner.breakpoints();
    if (inner.has_inverse()) {
        for (double b : outer.breakpoints()) bps.push_back(inner.inverse(b));
    }
    const Smoothness s = (outer.smoothness() == Smoothness::Smooth && inner.smoothness() == Smoothness::Smooth)
                             ? Smoothness::Smooth
                             : Smoothness::PiecewiseC1;
    std::function<double(double)> inv;
    if (outer.has_inverse() && inner.has_inverse()) {
        inv = [outer, inner](double t) { return inner.inverse(outer.inverse(t)); };
    }
    return CircleMap(fn, outer.chart(), bps, s, "composed", inv);
}

bool is_cyclically_ordered(const std::vector<double>& values, double period, double tol) {
    std::vector<double> v;
    for (double x : values) {
        if (period > 0.0) {
            x = std::fmod(x, period);
            if (x < 0.0) x += period;
        }
        if (v.empty() || std::fabs(x - v.back()) > tol) v.push_back(x);
    }
    while (v.size() > 1 && std::fabs(v.front() - v.back()) <= tol) v.pop_back();
    const std::size_t n = v.size();
    if (n <= 2) return true;
    int descents = 0, ascents = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double a = v[i], b = v[(i + 1) % n];
        if (b < a) ++descents;
        if (b > a) ++ascents;
    }
    return descents <= 1 || ascents <= 1;
}

PolygonalCurve::PolygonalCurve(std::vector<AnnulusPoint> vertices, double period, double tol)
    : vertices_(std::move(vertices)), period_(period) {
    const std::size_t n = vertices_.size();
    if (n < 2 || n % 2 != 0) {
        throw Error(ErrorCode::InvalidArgument, "polygonal curve needs an even number of vertices");
    }
    for (std::size_t i = 0; i < n; ++i) {
        const AnnulusPoint& a = vertices_[i];
        const AnnulusPoint& b = vertices_[(i + 1) % n];
        const bool vertical = i % 2 == 0;
        if (vertical && coord_gap(a.x, b.x, period_) > tol) {
            throw Error(ErrorCode::InvalidArgument, "segment " + std::to_string(i) + " is not vertical");
        }
        if (!vertical && coord_gap(a.y, b.y, period_) > tol) {
            throw Error(ErrorCode::InvalidArgument, "segment " + std::to_string(i) + " is not horizontal");
        }
    }
    std::vector<double> xs, ys;
    for (const auto& p : vertices_) {
        xs.push_back(p.x);
        ys.push_back(p.y);
    }
    if (!is_cyclically_ordered(xs, period_, tol) || !is_cyclically_ordered(ys, period_, tol)) {
        throw Error(ErrorCode::NotCyclic, "vertex projections are not cyclically oriented");
    }
}

PolygonalCurve normalize_polygonal(const PolygonalCurve& p, double tol) {
    std::vector<AnnulusPoint> v = p.vertices();
    bool changed = true;
    while (changed && v.size() > 2) {
        changed = false;
        const std::size_t n = v.size();
        for (std::size_t i = 0; i < n; ++i) {
            if (!same_point(v[i], v[(i + 1) % n], p.period(), tol)) continue;
            if (i + 1 < n) {
                v.erase(v.begin() + static_cast<std::ptrdiff_t>(i), v.begin() + static_cast<std::ptrdiff_t>(i + 2));
            } else {
                // Pair (last, first): drop both and rotate so the merged segment keeps its type.
                v.pop_back();
                v.erase(v.begin());
                std::rotate(v.begin(), v.end() - 1, v.end());
            }
            changed = true;
            break;
        }
    }
    return PolygonalCurve(std::move(v), p.period(), tol);
}

// ---------------------------------------------------------------------------------------------
// Quadrature

namespace {

std::vector<int> base_cells(const std::vector<double>& breaks) {
    const double total = breaks.back() - breaks.front();
    std::vector<int> n;
    for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
        const double len = breaks[k + 1] - breaks[k];
        n.push_back(std::max(1, static_cast<int>(std::lround(32.0 * len / total))));
    }
    return n;
}

void build_axis(const std::vector<double>& breaks, int level, std::vector<double>& centers,
                std::vector<double>& widths) {
    centers.clear();
    widths.clear();
    const std::vector<int> base = base_cells(breaks);
    for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
        int n = base[k];
        if (level >= 0) {
            n <<= level;
        } else {
            n = std::max(1, n >> (-level));
        }
        const double a = breaks[k], b = breaks[k + 1];
        const double h = (b - a) / n;
        for (int i = 0; i < n; ++i) {
            centers.push_back(a + (i + 0.5) * h);
            widths.push_back(h);
        }
    }
}

}  // namespace

QuadratureGrid QuadratureGrid::rectangle(const Box& box, int level, double band_halfwidth) {
    if (!(box.x1 > box.x0 && box.y1 > box.y0)) {
        throw Error(ErrorCode::InvalidArgument, "quadrature rectangle is empty");
    }
    if (band_halfwidth < 0.0) throw Error(ErrorCode::InvalidArgument, "band half-width must be non-negative");
    QuadratureGrid g;
    g.chart_ = Chart::Affine;
    g.periodic_ = false;
    g.level_ = level;
    g.xbreaks_ = {box.x0, box.x1};
    g.ybreaks_ = {box.y0, box.y1};
    g.band_halfwidth_ = band_halfwidth;
    g.band_cells_ = -1;
    g.build();
    return g;
}

QuadratureGrid QuadratureGrid::torus(int level, std::vector<double> breakpoints, int band_cells) {
    std::vector<double> b;
    for (double t : breakpoints) {
        double r = std::fmod(t, kPi);
        if (r < 0.0) r += kPi;
        b.push_back(r);
    }
    std::sort(b.begin(), b.end());
    b.erase(std::unique(b.begin(), b.end(), [](double p, double q) { return std::fabs(p - q) < 1e-14; }), b.end());
    if (b.empty()) b.push_back(0.0);
    b.push_back(b.front() + kPi);
    QuadratureGrid g;
    g.chart_ = Chart::Angular;
    g.periodic_ = true;
    g.level_ = level;
    g.xbreaks_ = b;
    g.ybreaks_ = b;
    g.band_cells_ = band_cells;
    g.build();
    return g;
}

void QuadratureGrid::build() {
    build_axis(xbreaks_, level_, xc_, wx_);
    build_axis(ybreaks_, level_, yc_, wy_);
    if (periodic_) {
        double hmax = 0.0;
        for (double w : wx_) hmax = std::max(hmax, w);
        band_halfwidth_ = band_cells_ >= 0 ? (band_cells_ + 0.5) * hmax : 0.0;
    }
}

QuadratureGrid QuadratureGrid::at_level(int level) const {
    QuadratureGrid g = *this;
    g.level_ = level;
    g.build();
    return g;
}

bool QuadratureGrid::in_band(std::size_t i, std::size_t j) const {
    if (periodic_) {
        if (band_cells_ < 0) return false;
        const std::size_t n = xc_.size();
        const std::size_t d = i > j ? i - j : j - i;
        return static_cast<int>(std::min(d, n - d)) <= band_cells_;
    }
    return band_halfwidth_ > 0.0 && std::fabs(xc_[i] - yc_[j]) < band_halfwidth_;
}

double QuadratureGrid::diagonal_distance(std::size_t i, std::size_t j) const {
    const double d = std::fabs(xc_[i] - yc_[j]);
    if (!periodic_) return d;
    const double r = std::fmod(d, kPi);
    return std::min(r, kPi - r);
}

double QuadratureGrid::region_area() const {
    return (xbreaks_.back() - xbreaks_.front()) * (ybreaks_.back() - ybreaks_.front());
}

double QuadratureGrid::band_area() const {
    std::vector<double> row;
    std::vector<double> rows;
    for (std::size_t i = 0; i < nx(); ++i) {
        row.clear();
        for (std::size_t j = 0; j < ny(); ++j) {
            if (in_band(i, j)) row.push_back(weight(i, j));
        }
        rows.push_back(pairwise_sum(row.data(), row.size()));
    }
    return pairwise_sum(rows.data(), rows.size());
}

double QuadratureGrid::total_weight() const {
    std::vector<double> row;
    std::vector<double> rows;
    for (std::size_t i = 0; i < nx(); ++i) {
        row.clear();
        for (std::size_t j = 0; j < ny(); ++j) {
            if (!in_band(i, j)) row.push_back(weight(i, j));
        }
        rows.push_back(pairwise_sum(row.data(), row.size()));
    }
    return pairwise_sum(rows.data(), rows.size());
}

std::string QuadratureGrid::descriptor() const {
    std::ostringstream os;
    os << std::setprecision(17);
    os << (periodic_ ? "torus" : "rectangle") << "[" << xbreaks_.front() << "," << xbreaks_.back() << "]x["
       << ybreaks_.front() << "," << ybreaks_.back() << "] level=" << level_ << " cells=" << nx() << "x" << ny();
    if (periodic_) {
        os << " band_cells=" << band_cells_;
    } else {
        os << " band_halfwidth=" << band_halfwidth_;
    }
    return os.str();
}

void QuadratureGrid::write_csv(std::ostream& os) const {
    os << "x,y,w\n";
    os << std::setprecision(17);
    for (std::size_t i = 0; i < nx(); ++i) {
        for (std::size_t j = 0; j < ny(); ++j) {
            if (in_band(i, j)) continue;
            os << xc_[i] << "," << yc_[j] << "," << weight(i, j) << "\n";
        }
    }
}

double pairwise_sum(const double* data, std::size_t n) {
    if (n == 0) return 0.0;
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += data[i];
        return s;
    }
    const std::size_t h = n / 2;
    return pairwise_sum(data, h) + pairwise_sum(data + h, n - h);
}

double integrate(const QuadratureGrid& grid, const Density& density, const Density& band_density) {
    const std::size_t nx = grid.nx(), ny = grid.ny();
    std::vector<double> row_sums(nx, 0.0);
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto work = [&](std::size_t begin, std::size_t end) {
        std::vector<double> row(ny);
        try {
            for (std::size_t i = begin; i < end; ++i) {
                std::size_t m = 0;
                for (std::size_t j = 0; j < ny; ++j) {
                    const AnnulusPoint p{grid.node_x(i), grid.node_y(j), 0};
                    double f;
                    if (grid.in_band(i, j)) {
                        if (!band_density) continue;
                        f = band_density(p);
                    } else {
                        f = density(p);
                    }
                    if (!std::isfinite(f)) {
                        std::ostringstream os;
                        os << std::setprecision(17) << "density is not finite at (" << p.x << ", " << p.y << ")";
                        throw Error(ErrorCode::NonFiniteDensity, os.str());
                    }
                    row[m++] = f * grid.weight(i, j);
                }
                row_sums[i] = pairwise_sum(row.data(), m);
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(failure_mutex);
            if (!failure) failure = std::current_exception();
        }
    };

    const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t nthreads = std::min<std::size_t>(hw, std::max<std::size_t>(1, nx / 16));
    if (nthreads <= 1) {
        work(0, nx);
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (nx + nthreads - 1) / nthreads;
        for (std::size_t t = 0; t < nthreads; ++t) {
            const std::size_t b = t * chunk, e = std::min(nx, b + chunk);
            if (b < e) pool.emplace_back(work, b, e);
        }
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);
    return pairwise_sum(row_sums.data(), row_sums.size());
}

RefinedIntegral integrate_refined(const QuadratureGrid& grid, const Density& density, const Density& band_density) {
    RefinedIntegral r;
    r.value = integrate(grid, density, band_density);
    r.coarse = integrate(grid.at_level(grid.level() - 1), density, band_density);
    r.error_estimate = std::fabs(r.value - r.coarse);
    r.richardson = r.value + (r.value - r.coarse) / 3.0;
    return r;
}

}  // namespace splitann
