#include "splitann/adsgeom.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "splitann/autodiff.hpp"
#include "splitann/error.hpp"

namespace splitann {

namespace {

using D2 = Dual<2>;
using V4 = DVec4<2>;

void unpack(const V4& a, Vec4& value, Vec4& dx, Vec4& dy) {
    for (int i = 0; i < 4; ++i) {
        value[i] = a[i].v;
        dx[i] = a[i].d[0];
        dy[i] = a[i].d[1];
    }
}

D2 lift(double v, double dx, double dy) {
    D2 r(v);
    r.d = {dx, dy};
    return r;
}

Eigen::Matrix2d gram2(const Vec4& ax, const Vec4& ay, const Vec4& bx, const Vec4& by) {
    Eigen::Matrix2d m;
    m << pairing(ax, bx), pairing(ax, by), pairing(ay, bx), pairing(ay, by);
    return m;
}

Eigen::Matrix2d symmetrize(const Eigen::Matrix2d& m) { return 0.5 * (m + m.transpose()); }

double max_abs(const Eigen::Matrix2d& m) { return m.cwiseAbs().maxCoeff(); }

// |⟨a,b⟩ − target| relative to the Euclidean sizes of a and b.
double scaled_pairing(const Vec4& a, const Vec4& b, double target) {
    return std::fabs(pairing(a, b) - target) / std::max(1.0, a.norm() * b.norm());
}

}  // namespace

const Eigen::Matrix4d& polar_gram() {
    static const Eigen::Matrix4d q = [] {
        Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
        m(0, 3) = m(3, 0) = -1.0;
        m(1, 2) = m(2, 1) = 1.0;
        return m;
    }();
    return q;
}

double pairing(const Vec4& a, const Vec4& b) { return -a[0] * b[3] - a[3] * b[0] + a[1] * b[2] + a[2] * b[1]; }

double q(const Vec4& a) { return pairing(a, a); }

double det4(const Vec4& a, const Vec4& b, const Vec4& c, const Vec4& d) {
    Eigen::Matrix4d m;
    m << a, b, c, d;
    return m.determinant();
}

Vec4 raise(const Vec4& covector) { return polar_gram() * covector; }

std::array<double, 4> polar_eigenvalues() {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(polar_gram());
    const Eigen::Vector4d ev = es.eigenvalues();
    return {ev[0], ev[1], ev[2], ev[3]};
}

Vec4 segre(double x, double y) { return {x * y, x, y, 1.0}; }

IsotropicSurface::IsotropicSurface(SplitMetric g) : g_(std::move(g)) {
    if (g_.chart() != Chart::Affine) {
        throw Error(ErrorCode::OutOfChart, "isotropic surfaces are built in the affine chart");
    }
}

SurfacePoint IsotropicSurface::at(double x, double y) const {
    if (x == y) throw Error(ErrorCode::DiagonalPoint, "isotropic surface is undefined on the diagonal");
    const Jet v0 = SplitMetric::desitter().reference_factor(x, y);
    const Jet f = g_.total_factor(x, y) - v0;

    const D2 X = D2::var(x, 0), Y = D2::var(y, 1);
    const auto [sigma, eta] =
        isotropic_pair(X, Y, lift(f.v, f.x, f.y), lift(f.x, f.xx, f.xy), lift(f.y, f.xy, f.yy));

    SurfacePoint p;
    unpack(sigma, p.sigma, p.sigma_x, p.sigma_y);
    unpack(eta, p.eta, p.eta_x, p.eta_y);
    return p;
}

IsotropicSurface isotropic_from_metric(const SplitMetric& g) { return IsotropicSurface(g); }

Vec4 solve_dual(const Vec4& sigma, const Vec4& sigma_x, const Vec4& sigma_y) {
    const Eigen::Matrix4d& Q = polar_gram();
    Eigen::Matrix<double, 3, 4> A;
    A.row(0) = (Q * sigma).transpose();
    A.row(1) = (Q * sigma_x).transpose();
    A.row(2) = (Q * sigma_y).transpose();
    const Eigen::Vector3d b(1.0, 0.0, 0.0);
    Eigen::JacobiSVD<Eigen::Matrix<double, 3, 4>> svd(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto sv = svd.singularValues();
    if (!(sv[2] > 1e-12 * sv[0])) throw Error(ErrorCode::SingularDual, "dual system is rank-deficient");
    const Vec4 particular = svd.solve(b);
    const Vec4 k = svd.matrixV().col(3);
    // q(particular + s k) = 0.
    const double qa = q(k), qb = 2.0 * pairing(particular, k), qc = q(particular);
    double s;
    if (std::fabs(qa) <= 1e-14 * std::max(1.0, std::fabs(qb))) {
        if (std::fabs(qb) < 1e-300) throw Error(ErrorCode::SingularDual, "dual isotropy condition is degenerate");
        s = -qc / qb;
    } else {
        const double disc = qb * qb - 4.0 * qa * qc;
        if (disc < 0.0) throw Error(ErrorCode::SingularDual, "dual isotropy condition has no real solution");
        const double r = -0.5 * (qb + std::copysign(std::sqrt(disc), qb));
        const double s1 = r / qa, s2 = qc / r;
        s = std::fabs(s1) < std::fabs(s2) ? s1 : s2;
    }
    return particular + s * k;
}

double isotropic_relations_residual(const SurfacePoint& s) {
    const double r[] = {
        scaled_pairing(s.sigma, s.sigma, 0.0),
        scaled_pairing(s.sigma_x, s.sigma, 0.0),
        scaled_pairing(s.sigma_y, s.sigma, 0.0),
        scaled_pairing(s.eta, s.eta, 0.0),
        scaled_pairing(s.eta, s.sigma, 1.0),
        scaled_pairing(s.eta, s.sigma_x, 0.0),
        scaled_pairing(s.eta, s.sigma_y, 0.0),
    };
    return *std::max_element(std::begin(r), std::end(r));
}

double metric_realization_residual(const IsotropicSurface& s, double x, double y) {
    const SurfacePoint p = s.at(x, y);
    const Eigen::Matrix2d I = gram2(p.sigma_x, p.sigma_y, p.sigma_x, p.sigma_y);
    const Eigen::Matrix2d G = s.metric().gram(x, y);
    return max_abs(I - G) / std::max(1.0, max_abs(G));
}

double uniqueness_residual(const IsotropicSurface& s, double x, double y) {
    const SurfacePoint p = s.at(x, y);
    const Vec4 alt = std::sqrt(0.5 * s.metric().density(x, y)) * segre(x, y);
    const double sign = p.sigma.dot(alt) >= 0.0 ? 1.0 : -1.0;
    return (p.sigma - sign * alt).cwiseAbs().maxCoeff();
}

EpsteinFrame epstein_lift(const SurfacePoint& s) {
    const double c = std::numbers::sqrt2 / 2.0;
    EpsteinFrame f;
    f.x = c * (s.sigma - s.eta);
    f.x_x = c * (s.sigma_x - s.eta_x);
    f.x_y = c * (s.sigma_y - s.eta_y);
    f.n = c * (s.sigma + s.eta);
    f.n_x = c * (s.sigma_x + s.eta_x);
    f.n_y = c * (s.sigma_y + s.eta_y);
    return f;
}

EpsteinFrame epstein_lift(const IsotropicSurface& s, double x, double y) { return epstein_lift(s.at(x, y)); }

double epstein_residual(const EpsteinFrame& f) {
    const double r[] = {
        scaled_pairing(f.x, f.x, -1.0),  scaled_pairing(f.n, f.n, 1.0),    scaled_pairing(f.x, f.n, 0.0),
        scaled_pairing(f.n, f.x_x, 0.0), scaled_pairing(f.n, f.x_y, 0.0), scaled_pairing(f.x, f.n_x, 0.0),
        scaled_pairing(f.x, f.n_y, 0.0),
    };
    return *std::max_element(std::begin(r), std::end(r));
}

InfinityForms infinity_forms(const SurfacePoint& s) {
    InfinityForms f;
    f.Istar = gram2(s.sigma_x, s.sigma_y, s.sigma_x, s.sigma_y);
    f.IIstar = -gram2(s.sigma_x, s.sigma_y, s.eta_x, s.eta_y);
    f.IIIstar = gram2(s.eta_x, s.eta_y, s.eta_x, s.eta_y);
    const double det = f.Istar.determinant();
    if (!(std::fabs(det) > 1e-14 * std::max(1.0, f.Istar.squaredNorm()))) {
        throw Error(ErrorCode::DegenerateIstar, "first fundamental form at infinity is singular");
    }
    f.Bstar = f.Istar.inverse() * f.IIstar;
    return f;
}

InfinityForms infinity_forms(const IsotropicSurface& s, double x, double y) { return infinity_forms(s.at(x, y)); }

double infinity_forms_residual(const InfinityForms& f) {
    const double scale = std::max(1.0, max_abs(f.IIstar));
    const double r1 = max_abs(f.IIstar - f.Istar * f.Bstar) / scale;
    const double r2 = max_abs(f.IIIstar - f.Bstar.transpose() * f.Istar * f.Bstar) / std::max(1.0, max_abs(f.IIIstar));
    return std::max(r1, r2);
}

double envelope_incidence_residual(const SurfacePoint& s) {
    const EpsteinFrame f = epstein_lift(s);
    return std::fabs(pairing(s.sigma, f.x) + std::numbers::sqrt2 / 2.0);
}

EnvelopeMetric envelope_metric(const IsotropicSurface& s, double x, double y, double degeneracy_tol) {
    const SurfacePoint p = s.at(x, y);
    const EpsteinFrame f = epstein_lift(p);
    const InfinityForms forms = infinity_forms(p);
    EnvelopeMetric m;
    m.induced = gram2(f.x_x, f.x_y, f.x_x, f.x_y);
    m.formula = 0.5 * forms.Istar + symmetrize(forms.IIstar) + 0.5 * forms.IIIstar;
    m.residual = max_abs(m.induced - m.formula) / std::max(1.0, max_abs(m.formula));
    m.degenerate = std::fabs(m.induced.determinant()) <= degeneracy_tol * std::max(1.0, m.induced.squaredNorm());
    return m;
}

namespace {

struct Derivs {
    Vec4 value, ds, dt;
};

Derivs central(const std::function<Vec4(double, double)>& f, double s, double t, double h) {
    return {f(s, t), (f(s + h, t) - f(s - h, t)) / (2.0 * h), (f(s, t + h) - f(s, t - h)) / (2.0 * h)};
}

}  // namespace

EpsteinFrame holonomic_frame(const HolonomicSurface& surface, double s, double t, double step) {
    std::function<Vec4(double, double)> normal = surface.normal;
    if (!normal) {
        normal = [position = surface.position, step](double a, double b) {
            const Derivs d = central(position, a, b, step);
            Vec4 c;
            for (int i = 0; i < 4; ++i) c[i] = det4(d.value, d.ds, d.dt, Vec4::Unit(i));
            const Vec4 n = raise(c);
            const double qn = q(n);
            if (!(qn > 0.0)) throw Error(ErrorCode::NotUnitNormal, "surface normal is not spacelike");
            return Vec4(n / std::sqrt(qn));
        };
    }
    const Derivs x = central(surface.position, s, t, step);
    const Derivs n = central(normal, s, t, step);
    return {x.value, x.ds, x.dt, n.value, n.ds, n.dt};
}

HolonomicCheck typical_holonomic_check(const HolonomicSurface& surface, double s, double t, double step,
                                       double unit_tol) {
    const EpsteinFrame f = holonomic_frame(surface, s, t, step);
    if (std::fabs(q(f.x) + 1.0) > unit_tol || std::fabs(q(f.n) - 1.0) > unit_tol ||
        std::fabs(pairing(f.x, f.n)) > unit_tol) {
        throw Error(ErrorCode::NotUnitNormal, "frame violates q(x) = -1, q(n) = 1, <x,n> = 0");
    }
    const Derivs x{f.x, f.x_x, f.x_y};
    const Derivs n{f.n, f.n_x, f.n_y};

    HolonomicCheck r;
    r.I = gram2(x.ds, x.dt, x.ds, x.dt);
    // dn = dx·B.
    const Eigen::Matrix2d mixed = gram2(x.ds, x.dt, n.ds, n.dt);
    r.B = r.I.inverse() * mixed;
    r.II = symmetrize(r.I * r.B);
    r.III = r.B.transpose() * r.I * r.B;
    r.mean_curvature = 0.5 * r.B.trace();

    const double c = std::numbers::sqrt2 / 2.0;
    const Vec4 ys = c * (x.ds + n.ds), yt = c * (x.dt + n.dt);
    r.Istar = gram2(ys, yt, ys, yt);
    r.residual = max_abs(r.Istar - 0.5 * (r.I + 2.0 * r.II + r.III));
    return r;
}

namespace {

const Vec4 kSliceA = Vec4(1.0, 0.0, 0.0, 1.0) / std::numbers::sqrt2;
const Vec4 kSliceB = Vec4(0.0, 1.0, -1.0, 0.0) / std::numbers::sqrt2;
const Vec4 kSliceC = Vec4(1.0, 0.0, 0.0, -1.0) / std::numbers::sqrt2;
const Vec4 kSliceN = Vec4(0.0, 1.0, 1.0, 0.0) / std::numbers::sqrt2;

Vec4 slice_point(double s, double t) {
    return std::cosh(s) * (std::cos(t) * kSliceA + std::sin(t) * kSliceB) + std::sinh(s) * kSliceC;
}

}  // namespace

HolonomicSurface geodesic_slice() {
    return {slice_point, [](double, double) { return kSliceN; }};
}

HolonomicSurface perturbed_slice(double amplitude) {
    auto position = [amplitude](double s, double t) {
        const double bump = std::exp(-s * s - (t - 0.5) * (t - 0.5));
        const Vec4 p = slice_point(s, t) + amplitude * bump * kSliceN;
        return Vec4(p / std::sqrt(-q(p)));
    };
    return {position, {}};
}

std::vector<EpsteinSample> sample_epstein(const IsotropicSurface& s, const Box& box, int n) {
    if (n <= 0) throw Error(ErrorCode::InvalidArgument, "sample count must be positive");
    std::vector<EpsteinSample> out;
    const double hx = (box.x1 - box.x0) / n, hy = (box.y1 - box.y0) / n;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double a = box.x0 + (i + 0.5) * hx, b = box.y0 + (j + 0.5) * hy;
            if (a == b) continue;
            const EpsteinFrame f = epstein_lift(s, a, b);
            out.push_back({a, b, f.x, f.n});
        }
    }
    return out;
}

}  // namespace splitann
