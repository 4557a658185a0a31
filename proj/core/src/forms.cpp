#include "splitann/forms.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <numbers>

#include "splitann/error.hpp"

namespace splitann {

namespace {

template <class T>
T pair_t(const T* a, const T* b) {
    return -(a[0] * b[3]) - a[3] * b[0] + a[1] * b[2] + a[2] * b[1];
}

template <class T>
void normalize_block(T* a, double expected_sign) {
    const double qa = value_of(pair_t(a, a));
    if (!(qa * expected_sign > 0.0)) throw Error(ErrorCode::ChartBreakdown, "retraction lost the signature");
    using std::sqrt;
    const T scale = 1.0 / sqrt(expected_sign * pair_t(a, a));
    for (int i = 0; i < 4; ++i) a[i] = scale * a[i];
}

// b ← b − ⟨b,a⟩/q(a)·a for a unit block with q(a) = sign.
template <class T>
void remove_component(T* b, const T* a, double sign) {
    const T c = pair_t(b, a) * (1.0 / sign);
    for (int i = 0; i < 4; ++i) b[i] = b[i] - c * a[i];
}

template <class T>
std::vector<T> retract_t(Manifold m, std::vector<T> p) {
    T* x = p.data();
    T* n = p.data() + 4;
    normalize_block(x, -1.0);
    remove_component(n, x, -1.0);
    normalize_block(n, 1.0);
    if (m == Manifold::Frames) {
        T* u = p.data() + 8;
        remove_component(u, x, -1.0);
        remove_component(u, n, 1.0);
        normalize_block(u, 1.0);
    }
    return p;
}

Vec4 block(const Eigen::VectorXd& v, int k) { return v.segment<4>(4 * k); }

double wedge_1_2(const std::function<double(int)>& a, const std::function<double(int, int)>& th) {
    return a(0) * th(1, 2) - a(1) * th(0, 2) + a(2) * th(0, 1);
}

}  // namespace

double ut_residual(const UTPoint& p) {
    return std::max({std::fabs(q(p.x) + 1.0), std::fabs(q(p.n) - 1.0), std::fabs(pairing(p.x, p.n))});
}

double ut_tangent_residual(const UTPoint& p, const UTVector& v) {
    return std::max({std::fabs(pairing(v.u1, p.x)), std::fabs(pairing(v.u2, p.n)),
                     std::fabs(pairing(v.u1, p.n) + pairing(p.x, v.u2))});
}

double frame_residual(const FramePoint& f) {
    return std::max({std::fabs(q(f.x) + 1.0), std::fabs(q(f.n) - 1.0), std::fabs(q(f.u) - 1.0),
                     std::fabs(pairing(f.x, f.n)), std::fabs(pairing(f.x, f.u)), std::fabs(pairing(f.n, f.u))});
}

double frame_tangent_residual(const FramePoint& f, const FrameVector& w) {
    return std::max({std::fabs(pairing(w.w1, f.x)), std::fabs(pairing(w.w2, f.n)), std::fabs(pairing(w.w3, f.u)),
                     std::fabs(pairing(w.w1, f.n) + pairing(f.x, w.w2)),
                     std::fabs(pairing(w.w1, f.u) + pairing(f.x, w.w3)),
                     std::fabs(pairing(w.w2, f.u) + pairing(f.n, w.w3))});
}

Vec4 frame_completion(const FramePoint& f) {
    Vec4 c;
    for (int i = 0; i < 4; ++i) c[i] = det4(f.x, f.n, f.u, Vec4::Unit(i));
    return -raise(c);
}

double omega3(const UTPoint& p, const UTVector& u, const UTVector& v, const UTVector& w) {
    return det4(p.x, u.u1, v.u1, w.u1);
}

double alpha2(const UTPoint& p, const UTVector& u, const UTVector& v) {
    return 0.25 * (det4(p.x, p.n, u.u2, v.u1) + det4(p.x, p.n, u.u1, v.u2));
}

double theta(int i, const UTPoint& p, const UTVector& u, const UTVector& v) {
    if (i == 1) return det4(p.x, p.n, u.u1, v.u1);
    if (i == 2) return det4(p.x, p.n, u.u2, v.u2);
    throw Error(ErrorCode::InvalidArgument, "theta index must be 1 or 2");
}

double x_star(const UTPoint& p, const UTVector& u) { return pairing(p.x, u.u2); }

double n_star(const UTPoint& p, const UTVector& u) { return pairing(u.u1, p.n); }

double beta1(const FramePoint& f, const FrameVector& w) { return -det4(f.x, f.n, f.u, w.w3); }

namespace {

void require_tangent(double residual, double tol) {
    if (residual > tol) throw Error(ErrorCode::NotTangent, "vector violates the differentiated constraints");
}

}  // namespace

double omega3_checked(const UTPoint& p, const UTVector& u, const UTVector& v, const UTVector& w, double tol) {
    for (const auto* a : {&u, &v, &w}) require_tangent(ut_tangent_residual(p, *a), tol);
    return omega3(p, u, v, w);
}

double alpha2_checked(const UTPoint& p, const UTVector& u, const UTVector& v, double tol) {
    for (const auto* a : {&u, &v}) require_tangent(ut_tangent_residual(p, *a), tol);
    return alpha2(p, u, v);
}

double beta1_checked(const FramePoint& f, const FrameVector& w, double tol) {
    require_tangent(frame_tangent_residual(f, w), tol);
    return beta1(f, w);
}

UTPoint ut_point(const FramePoint& f) { return {f.x, f.n}; }

UTVector ut_vector(const FrameVector& w) { return {w.w1, w.w2}; }

int ambient_dimension(Manifold m) { return m == Manifold::UnitTangent ? 8 : 12; }

Eigen::VectorXd pack(const UTPoint& p) {
    Eigen::VectorXd v(8);
    v << p.x, p.n;
    return v;
}
Eigen::VectorXd pack(const UTVector& u) {
    Eigen::VectorXd v(8);
    v << u.u1, u.u2;
    return v;
}
Eigen::VectorXd pack(const FramePoint& f) {
    Eigen::VectorXd v(12);
    v << f.x, f.n, f.u;
    return v;
}
Eigen::VectorXd pack(const FrameVector& w) {
    Eigen::VectorXd v(12);
    v << w.w1, w.w2, w.w3;
    return v;
}
UTPoint unpack_ut_point(const Eigen::VectorXd& v) { return {block(v, 0), block(v, 1)}; }
UTVector unpack_ut_vector(const Eigen::VectorXd& v) { return {block(v, 0), block(v, 1)}; }
FramePoint unpack_frame_point(const Eigen::VectorXd& v) { return {block(v, 0), block(v, 1), block(v, 2)}; }
FrameVector unpack_frame_vector(const Eigen::VectorXd& v) { return {block(v, 0), block(v, 1), block(v, 2)}; }

Eigen::MatrixXd constraint_jacobian(Manifold m, const Eigen::VectorXd& p) {
    const Eigen::Matrix4d& Q = polar_gram();
    const int blocks = m == Manifold::UnitTangent ? 2 : 3;
    std::vector<std::pair<int, int>> pairs;
    for (int a = 0; a < blocks; ++a) {
        for (int b = a; b < blocks; ++b) pairs.emplace_back(a, b);
    }
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(pairs.size()), 4 * blocks);
    for (std::size_t r = 0; r < pairs.size(); ++r) {
        const auto [a, b] = pairs[r];
        const auto row = static_cast<Eigen::Index>(r);
        J.block<1, 4>(row, 4 * a) += (Q * block(p, b)).transpose();
        J.block<1, 4>(row, 4 * b) += (Q * block(p, a)).transpose();
    }
    return J;
}

Eigen::VectorXd project_tangent(Manifold m, const Eigen::VectorXd& p, const Eigen::VectorXd& v) {
    const Eigen::MatrixXd J = constraint_jacobian(m, p);
    const Eigen::MatrixXd JJt = J * J.transpose();
    return v - J.transpose() * JJt.ldlt().solve(J * v);
}

Eigen::VectorXd retract(Manifold m, const Eigen::VectorXd& p) {
    std::vector<double> raw(p.data(), p.data() + p.size());
    const std::vector<double> r = retract_t(m, std::move(raw));
    return Eigen::Map<const Eigen::VectorXd>(r.data(), static_cast<Eigen::Index>(r.size()));
}

Eigen::VectorXd random_point(Manifold m, std::mt19937_64& rng) {
    std::normal_distribution<double> N(0.0, 1.0);
    auto gaussian = [&] { return Vec4(N(rng), N(rng), N(rng), N(rng)); };
    const int blocks = m == Manifold::UnitTangent ? 2 : 3;
    for (;;) {
        Eigen::VectorXd p(4 * blocks);
        for (int k = 0; k < blocks; ++k) p.segment<4>(4 * k) = gaussian();
        try {
            const Eigen::VectorXd r = retract(m, p);
            if (r.cwiseAbs().maxCoeff() < 20.0) return r;
        } catch (const Error&) {
        }
    }
}

Eigen::VectorXd random_tangent(Manifold m, const Eigen::VectorXd& p, std::mt19937_64& rng) {
    std::normal_distribution<double> N(0.0, 1.0);
    Eigen::VectorXd v(p.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = N(rng);
    const Eigen::VectorXd t = project_tangent(m, p, v);
    return t / t.norm();
}

double exterior_derivative(Manifold m, const AmbientForm& form, const Eigen::VectorXd& p,
                           const std::vector<Eigen::VectorXd>& vectors, double step) {
    constexpr std::size_t kMax = 4;
    const std::size_t k1 = vectors.size();
    if (k1 == 0 || k1 > kMax) throw Error(ErrorCode::InvalidArgument, "exterior derivative needs 1 to 4 vectors");
    if (!(step >= 1e-7 * std::max(1.0, p.cwiseAbs().maxCoeff()))) {
        throw Error(ErrorCode::StepTooSmall, "finite-difference step is below the cancellation threshold");
    }
    using D = Dual<kMax>;
    const auto dim = p.size();

    auto chart_form = [&](std::size_t skip, const std::vector<double>& t) {
        std::vector<D> q(static_cast<std::size_t>(dim));
        for (Eigen::Index j = 0; j < dim; ++j) {
            D c(p[j]);
            for (std::size_t a = 0; a < k1; ++a) {
                c.v += t[a] * vectors[a][j];
                c.d[a] = vectors[a][j];
            }
            q[static_cast<std::size_t>(j)] = c;
        }
        const std::vector<D> r = retract_t(m, std::move(q));
        Eigen::VectorXd point(dim);
        std::vector<Eigen::VectorXd> cols;
        for (std::size_t a = 0; a < k1; ++a) {
            if (a != skip) cols.emplace_back(dim);
        }
        for (Eigen::Index j = 0; j < dim; ++j) {
            const D& c = r[static_cast<std::size_t>(j)];
            point[j] = c.v;
            std::size_t col = 0;
            for (std::size_t a = 0; a < k1; ++a) {
                if (a == skip) continue;
                cols[col++][j] = c.d[a];
            }
        }
        return form(point, cols);
    };

    double total = 0.0;
    for (std::size_t i = 0; i < k1; ++i) {
        std::vector<double> t(k1, 0.0);
        t[i] = step;
        const double plus = chart_form(i, t);
        t[i] = -step;
        const double minus = chart_form(i, t);
        const double sign = i % 2 == 0 ? 1.0 : -1.0;
        total += sign * (plus - minus) / (2.0 * step);
    }
    return total;
}

AmbientForm ambient_omega3() {
    return [](const Eigen::VectorXd& p, const std::vector<Eigen::VectorXd>& v) {
        return omega3(unpack_ut_point(p), unpack_ut_vector(v[0]), unpack_ut_vector(v[1]), unpack_ut_vector(v[2]));
    };
}

AmbientForm ambient_alpha2() {
    return [](const Eigen::VectorXd& p, const std::vector<Eigen::VectorXd>& v) {
        return alpha2(unpack_ut_point(p), unpack_ut_vector(v[0]), unpack_ut_vector(v[1]));
    };
}

AmbientForm ambient_beta1() {
    return [](const Eigen::VectorXd& p, const std::vector<Eigen::VectorXd>& v) {
        return beta1(unpack_frame_point(p), unpack_frame_vector(v[0]));
    };
}

AmbientForm ambient_theta_difference() {
    return [](const Eigen::VectorXd& p, const std::vector<Eigen::VectorXd>& v) {
        const UTPoint x = ut_point(unpack_frame_point(p));
        const UTVector a = ut_vector(unpack_frame_vector(v[0]));
        const UTVector b = ut_vector(unpack_frame_vector(v[1]));
        return theta(1, x, a, b) - theta(2, x, a, b);
    };
}

AmbientForm ambient_alpha_rhs() {
    return [](const Eigen::VectorXd& p, const std::vector<Eigen::VectorXd>& v) {
        const UTPoint x = unpack_ut_point(p);
        std::vector<UTVector> u;
        for (const auto& w : v) u.push_back(unpack_ut_vector(w));
        const double n_theta2 = wedge_1_2([&](int i) { return n_star(x, u[i]); },
                                          [&](int i, int j) { return theta(2, x, u[i], u[j]); });
        const double x_theta1 = wedge_1_2([&](int i) { return x_star(x, u[i]); },
                                          [&](int i, int j) { return theta(1, x, u[i], u[j]); });
        return 0.5 * (n_theta2 - x_theta1);
    };
}

bool default_sign_flip() {
#ifdef SPLITANN_INJECT_SIGN_FLIP
    return true;
#else
    return false;
#endif
}

FundamentalResidual fundamental_equations_residual(const Eigen::VectorXd& frame,
                                                   const std::vector<Eigen::VectorXd>& frame_vectors,
                                                   const Eigen::VectorXd& ut,
                                                   const std::vector<Eigen::VectorXd>& ut_vectors, double step,
                                                   bool sign_flip) {
    if (frame_vectors.size() != 2 || ut_vectors.size() != 3) {
        throw Error(ErrorCode::InvalidArgument, "fundamental equations need 2 frame vectors and 3 tangent vectors");
    }
    FundamentalResidual r;
    const double dbeta = exterior_derivative(Manifold::Frames, ambient_beta1(), frame, frame_vectors, step);
    const double thetas = ambient_theta_difference()(frame, frame_vectors);
    r.r1 = std::fabs(dbeta - thetas);
    r.r1_opposite = std::fabs(dbeta + thetas);
    double dalpha = exterior_derivative(Manifold::UnitTangent, ambient_alpha2(), ut, ut_vectors, step);
    if (sign_flip) dalpha = -dalpha;
    r.r2 = std::fabs(dalpha - ambient_alpha_rhs()(ut, ut_vectors));
    return r;
}

LensPath LensPath::canonical() {
    return {[](double t) { return std::pair{t, 1.0}; }, [](double) { return std::pair{0.0, 0.0}; }};
}

LensPath LensPath::bent() {
    return {[](double t) { return std::pair{t, 1.0}; },
            [](double t) { return std::pair{t * (1.0 - t), 1.0 - 2.0 * t}; }};
}

LensCobordism::LensCobordism(SplitMetric base_, ScalarField u_, ScalarField w_, LensPath path_)
    : base(std::move(base_)), u(std::move(u_)), w(std::move(w_)), path(std::move(path_)) {
    if (base.chart() != Chart::Affine) throw Error(ErrorCode::OutOfChart, "lens cobordisms use the affine chart");
    if (!u.support()) throw Error(ErrorCode::NonCompactDifference, "lens factor is not compactly supported");
    box = *u.support();
    if (!w.is_zero()) {
        if (!w.support()) throw Error(ErrorCode::NonCompactDifference, "path factor is not compactly supported");
        box = bounding_box(box, *w.support());
    }
}

EpsteinFrame lens_frame(const LensCobordism& lens, double x, double y, double t, Vec4* x_t) {
    using D = Dual<3>;
    const Jet g = lens.base.total_factor(x, y) - SplitMetric::desitter().reference_factor(x, y);
    const Jet u = lens.u.jet(x, y);
    const Jet w = lens.w.jet(x, y);
    const auto [a, da] = lens.path.a(t);
    const auto [b, db] = lens.path.b(t);
    const Jet f = g + a * u + b * w;
    auto dual = [](double v, double d0, double d1, double d2) {
        D r(v);
        r.d = {d0, d1, d2};
        return r;
    };
    const D F = dual(f.v, f.x, f.y, da * u.v + db * w.v);
    const D FX = dual(f.x, f.xx, f.xy, da * u.x + db * w.x);
    const D FY = dual(f.y, f.xy, f.yy, da * u.y + db * w.y);
    const auto [sigma, eta] = isotropic_pair(D::var(x, 0), D::var(y, 1), F, FX, FY);

    const double c = std::numbers::sqrt2 / 2.0;
    EpsteinFrame fr;
    for (int i = 0; i < 4; ++i) {
        const D xi = c * (sigma[i] - eta[i]);
        const D ni = c * (sigma[i] + eta[i]);
        fr.x[i] = xi.v;
        fr.x_x[i] = xi.d[0];
        fr.x_y[i] = xi.d[1];
        fr.n[i] = ni.v;
        fr.n_x[i] = ni.d[0];
        fr.n_y[i] = ni.d[1];
        if (x_t) (*x_t)[i] = xi.d[2];
    }
    return fr;
}

double alpha_pullback(const EpsteinFrame& f) {
    return 0.25 * (det4(f.x, f.n, f.n_x, f.x_y) + det4(f.x, f.n, f.x_x, f.n_y));
}

ActionValue w_volume(const LensCobordism& lens, int level, double t0, double t1) {
    const Box& box = lens.box;
    for (int i = 1; i <= 3; ++i) {
        for (int j = 1; j <= 3; ++j) {
            const double x = box.x0 + 0.25 * i * (box.x1 - box.x0), y = box.y0 + 0.25 * j * (box.y1 - box.y0);
            if (x == y) continue;
            for (double t : {t0, t1}) {
                if (epstein_residual(lens_frame(lens, x, y, t)) > 1e-8) {
                    throw Error(ErrorCode::NotHolonomicBoundary, "boundary Epstein map violates the contact conditions");
                }
            }
        }
    }
    auto density = [&lens, t0, t1](const AnnulusPoint& p) {
        auto volume = [&](double t) {
            Vec4 xt;
            const EpsteinFrame f = lens_frame(lens, p.x, p.y, t, &xt);
            return det4(f.x, f.x_x, f.x_y, xt);
        };
        const double bulk = boost::math::quadrature::gauss<double, 20>::integrate(volume, t0, t1);
        const double boundary = alpha_pullback(lens_frame(lens, p.x, p.y, t1)) -
                                alpha_pullback(lens_frame(lens, p.x, p.y, t0));
        return bulk - boundary;
    };
    const QuadratureGrid grid = QuadratureGrid::rectangle(box, level);
    RefinedIntegral r;
    try {
        r = integrate_refined(grid, density);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::NonFiniteDensity) throw Error(ErrorCode::NonFiniteIntegrand, e.what());
        throw;
    }
    ActionValue a;
    a.value = r.value;
    a.error_estimate = r.error_estimate;
    a.richardson = r.richardson;
    a.grid = grid.descriptor();
    a.formula = "w_volume";
    a.trail = {{level - 1, r.coarse}, {level, r.value}};
    return a;
}

VariationalResult variational_3d_residual(const SplitMetric& g, const ScalarField& u, double dt, int level) {
    const LensCobordism plus(g, u.scaled(dt));
    const LensCobordism minus(g, u.scaled(-dt));
    const QuadratureGrid grid = QuadratureGrid::rectangle(plus.box, level);
    const CurvatureReport kg(g);
    VariationalResult r;
    r.derivative = (w_volume(plus, level).value - w_volume(minus, level).value) / (2.0 * dt);
    r.target = -0.5 * integrate(grid, [&](const AnnulusPoint& p) { return u.value(p.x, p.y) * kg.F(p); });
    r.residual = std::fabs(r.derivative - r.target);
    return r;
}

ClassicalPoint classical_formula_point(const EpsteinFrame& f) {
    Eigen::Matrix2d I, mixed;
    I << pairing(f.x_x, f.x_x), pairing(f.x_x, f.x_y), pairing(f.x_y, f.x_x), pairing(f.x_y, f.x_y);
    mixed << pairing(f.x_x, f.n_x), pairing(f.x_x, f.n_y), pairing(f.x_y, f.n_x), pairing(f.x_y, f.n_y);
    ClassicalPoint c;
    c.alpha = alpha_pullback(f);
    const double det = I.determinant();
    c.degenerate = !(std::fabs(det) > 1e-14 * I.squaredNorm());
    if (!c.degenerate) {
        const Eigen::Matrix2d B = I.inverse() * mixed;
        const double orientation = det4(f.x, f.n, f.x_x, f.x_y) >= 0.0 ? 1.0 : -1.0;
        c.quarter_trace_area = 0.25 * B.trace() * orientation * std::sqrt(std::fabs(det));
    }
    c.residual = std::fabs(c.alpha - c.quarter_trace_area);
    return c;
}

FrameField frame_field(const IsotropicSurface& s) {
    return [s](double x, double y) { return epstein_lift(s, x, y); };
}

FrameField frame_field(const HolonomicSurface& s, double step) {
    return [s, step](double a, double b) { return holonomic_frame(s, a, b, step); };
}

double classical_formula_residual(const FrameField& field, const Box& box, int n) {
    if (n <= 0) throw Error(ErrorCode::InvalidArgument, "grid size must be positive");
    std::vector<double> lhs, rhs;
    const double hx = (box.x1 - box.x0) / n, hy = (box.y1 - box.y0) / n;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const ClassicalPoint c = classical_formula_point(field(box.x0 + (i + 0.5) * hx, box.y0 + (j + 0.5) * hy));
            lhs.push_back(c.alpha * hx * hy);
            rhs.push_back(c.quarter_trace_area * hx * hy);
        }
    }
    return std::fabs(pairwise_sum(lhs.data(), lhs.size()) - pairwise_sum(rhs.data(), rhs.size()));
}

}  // namespace splitann
