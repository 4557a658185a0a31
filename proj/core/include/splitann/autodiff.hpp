#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace splitann {

// Bivariate second-order Taylor jet: value and partials up to order 2 in (x, y).
struct Jet {
    double v = 0.0;
    double x = 0.0;
    double y = 0.0;
    double xx = 0.0;
    double xy = 0.0;
    double yy = 0.0;

    constexpr Jet() = default;
    constexpr Jet(double value) : v(value) {}  // NOLINT(google-explicit-constructor)
    constexpr Jet(double v_, double x_, double y_, double xx_, double xy_, double yy_)
        : v(v_), x(x_), y(y_), xx(xx_), xy(xy_), yy(yy_) {}

    static constexpr Jet var_x(double value) { return {value, 1.0, 0.0, 0.0, 0.0, 0.0}; }
    static constexpr Jet var_y(double value) { return {value, 0.0, 1.0, 0.0, 0.0, 0.0}; }

    Jet& operator+=(const Jet& o) {
        v += o.v; x += o.x; y += o.y; xx += o.xx; xy += o.xy; yy += o.yy;
        return *this;
    }
    Jet& operator-=(const Jet& o) {
        v -= o.v; x -= o.x; y -= o.y; xx -= o.xx; xy -= o.xy; yy -= o.yy;
        return *this;
    }
    Jet& operator*=(double s) {
        v *= s; x *= s; y *= s; xx *= s; xy *= s; yy *= s;
        return *this;
    }
};

inline Jet operator-(const Jet& a) { return {-a.v, -a.x, -a.y, -a.xx, -a.xy, -a.yy}; }
inline Jet operator+(Jet a, const Jet& b) { return a += b; }
inline Jet operator-(Jet a, const Jet& b) { return a -= b; }
inline Jet operator*(Jet a, double s) { return a *= s; }
inline Jet operator*(double s, Jet a) { return a *= s; }

inline Jet operator*(const Jet& a, const Jet& b) {
    return {a.v * b.v,
            a.x * b.v + a.v * b.x,
            a.y * b.v + a.v * b.y,
            a.xx * b.v + 2.0 * a.x * b.x + a.v * b.xx,
            a.xy * b.v + a.x * b.y + a.y * b.x + a.v * b.xy,
            a.yy * b.v + 2.0 * a.y * b.y + a.v * b.yy};
}

// h = f(a) given f, f', f'' at a.v.
inline Jet compose(const Jet& a, double f0, double f1, double f2) {
    return {f0,
            f1 * a.x,
            f1 * a.y,
            f2 * a.x * a.x + f1 * a.xx,
            f2 * a.x * a.y + f1 * a.xy,
            f2 * a.y * a.y + f1 * a.yy};
}

inline Jet inv(const Jet& a) {
    const double r = 1.0 / a.v;
    return compose(a, r, -r * r, 2.0 * r * r * r);
}
inline Jet operator/(const Jet& a, const Jet& b) { return a * inv(b); }
inline Jet operator/(const Jet& a, double s) { return a * (1.0 / s); }
inline Jet operator/(double s, const Jet& b) { return s * inv(b); }

inline Jet exp(const Jet& a) {
    const double e = std::exp(a.v);
    return compose(a, e, e, e);
}
inline Jet log(const Jet& a) {
    const double r = 1.0 / a.v;
    return compose(a, std::log(a.v), r, -r * r);
}
// log|a|; derivatives coincide with log for either sign.
inline Jet log_abs(const Jet& a) {
    const double r = 1.0 / a.v;
    return compose(a, std::log(std::fabs(a.v)), r, -r * r);
}
inline Jet sin(const Jet& a) {
    const double s = std::sin(a.v), c = std::cos(a.v);
    return compose(a, s, c, -s);
}
inline Jet cos(const Jet& a) {
    const double s = std::sin(a.v), c = std::cos(a.v);
    return compose(a, c, -s, -c);
}
inline Jet sqrt(const Jet& a) {
    const double s = std::sqrt(a.v);
    return compose(a, s, 0.5 / s, -0.25 / (s * a.v));
}
inline Jet pow(const Jet& a, double p) {
    const double f0 = std::pow(a.v, p);
    const double f1 = p * std::pow(a.v, p - 1.0);
    const double f2 = p * (p - 1.0) * std::pow(a.v, p - 2.0);
    return compose(a, f0, f1, f2);
}
inline Jet square(const Jet& a) { return a * a; }

// Univariate Taylor number carrying f, f', f'', f''' (derivative values, not coefficients).
struct Taylor3 {
    std::array<double, 4> d{0.0, 0.0, 0.0, 0.0};

    constexpr Taylor3() = default;
    constexpr Taylor3(double value) : d{value, 0.0, 0.0, 0.0} {}  // NOLINT(google-explicit-constructor)
    constexpr Taylor3(double f0, double f1, double f2, double f3) : d{f0, f1, f2, f3} {}

    static constexpr Taylor3 var(double t) { return {t, 1.0, 0.0, 0.0}; }
    double value() const { return d[0]; }
    double operator[](std::size_t i) const { return d[i]; }
};

inline Taylor3 operator+(const Taylor3& a, const Taylor3& b) {
    return {a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]};
}
inline Taylor3 operator-(const Taylor3& a, const Taylor3& b) {
    return {a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]};
}
inline Taylor3 operator-(const Taylor3& a) { return {-a[0], -a[1], -a[2], -a[3]}; }
inline Taylor3 operator*(double s, const Taylor3& a) { return {s * a[0], s * a[1], s * a[2], s * a[3]}; }
inline Taylor3 operator*(const Taylor3& a, double s) { return s * a; }
inline Taylor3 operator+(const Taylor3& a, double s) { return {a[0] + s, a[1], a[2], a[3]}; }
inline Taylor3 operator+(double s, const Taylor3& a) { return a + s; }
inline Taylor3 operator-(const Taylor3& a, double s) { return {a[0] - s, a[1], a[2], a[3]}; }
inline Taylor3 operator-(double s, const Taylor3& a) { return {s - a[0], -a[1], -a[2], -a[3]}; }

inline Taylor3 operator*(const Taylor3& a, const Taylor3& b) {
    return {a[0] * b[0],
            a[1] * b[0] + a[0] * b[1],
            a[2] * b[0] + 2.0 * a[1] * b[1] + a[0] * b[2],
            a[3] * b[0] + 3.0 * a[2] * b[1] + 3.0 * a[1] * b[2] + a[0] * b[3]};
}

// h = g(a) given g, g', g'', g''' at a.
inline Taylor3 compose(const Taylor3& a, double g0, double g1, double g2, double g3) {
    const double a1 = a[1], a2 = a[2], a3 = a[3];
    return {g0,
            g1 * a1,
            g2 * a1 * a1 + g1 * a2,
            g3 * a1 * a1 * a1 + 3.0 * g2 * a1 * a2 + g1 * a3};
}

inline Taylor3 inv(const Taylor3& a) {
    const double r = 1.0 / a[0];
    return compose(a, r, -r * r, 2.0 * r * r * r, -6.0 * r * r * r * r);
}
inline Taylor3 operator/(const Taylor3& a, const Taylor3& b) { return a * inv(b); }
inline Taylor3 operator/(const Taylor3& a, double s) { return a * (1.0 / s); }

inline Taylor3 exp(const Taylor3& a) {
    const double e = std::exp(a[0]);
    return compose(a, e, e, e, e);
}
inline Taylor3 log(const Taylor3& a) {
    const double r = 1.0 / a[0];
    return compose(a, std::log(a[0]), r, -r * r, 2.0 * r * r * r);
}
inline Taylor3 sin(const Taylor3& a) {
    const double s = std::sin(a[0]), c = std::cos(a[0]);
    return compose(a, s, c, -s, -c);
}
inline Taylor3 cos(const Taylor3& a) {
    const double s = std::sin(a[0]), c = std::cos(a[0]);
    return compose(a, c, -s, -c, s);
}
inline Taylor3 tan(const Taylor3& a) { return sin(a) / cos(a); }

// Derivative shift: (f', f'', f''', ?) with the unknown fourth derivative left as zero.
inline Taylor3 shift(const Taylor3& a) { return {a[1], a[2], a[3], 0.0}; }

// atan2(w0, w1) with exact derivatives up to order 3.
inline Taylor3 atan2(const Taylor3& w0, const Taylor3& w1) {
    const Taylor3 q = (w1 * shift(w0) - w0 * shift(w1)) / (w0 * w0 + w1 * w1);
    return {std::atan2(w0[0], w1[0]), q[0], q[1], q[2]};
}

// First-order dual number with N partials.
template <std::size_t N>
struct Dual {
    double v = 0.0;
    std::array<double, N> d{};

    constexpr Dual() = default;
    constexpr Dual(double value) : v(value) {}  // NOLINT(google-explicit-constructor)

    static Dual var(double value, std::size_t i) {
        Dual r(value);
        r.d[i] = 1.0;
        return r;
    }

    Dual& operator+=(const Dual& o) {
        v += o.v;
        for (std::size_t i = 0; i < N; ++i) d[i] += o.d[i];
        return *this;
    }
    Dual& operator-=(const Dual& o) {
        v -= o.v;
        for (std::size_t i = 0; i < N; ++i) d[i] -= o.d[i];
        return *this;
    }
    Dual& operator*=(const Dual& o) {
        for (std::size_t i = 0; i < N; ++i) d[i] = d[i] * o.v + v * o.d[i];
        v *= o.v;
        return *this;
    }
};

template <std::size_t N>
Dual<N> operator+(Dual<N> a, const Dual<N>& b) { return a += b; }
template <std::size_t N>
Dual<N> operator-(Dual<N> a, const Dual<N>& b) { return a -= b; }
template <std::size_t N>
Dual<N> operator*(Dual<N> a, const Dual<N>& b) { return a *= b; }
template <std::size_t N>
Dual<N> operator-(const Dual<N>& a) {
    Dual<N> r;
    r.v = -a.v;
    for (std::size_t i = 0; i < N; ++i) r.d[i] = -a.d[i];
    return r;
}
template <std::size_t N>
Dual<N> operator*(double s, Dual<N> a) {
    a.v *= s;
    for (auto& di : a.d) di *= s;
    return a;
}
template <std::size_t N>
Dual<N> operator*(const Dual<N>& a, double s) { return s * a; }
template <std::size_t N>
Dual<N> operator+(const Dual<N>& a, double s) {
    Dual<N> r = a;
    r.v += s;
    return r;
}
template <std::size_t N>
Dual<N> operator-(const Dual<N>& a, double s) { return a + (-s); }
template <std::size_t N>
Dual<N> operator+(double s, const Dual<N>& a) { return a + s; }
template <std::size_t N>
Dual<N> operator-(double s, const Dual<N>& a) { return -a + s; }

template <std::size_t N>
Dual<N> chain(const Dual<N>& a, double f0, double f1) {
    Dual<N> r;
    r.v = f0;
    for (std::size_t i = 0; i < N; ++i) r.d[i] = f1 * a.d[i];
    return r;
}
template <std::size_t N>
Dual<N> operator/(const Dual<N>& a, const Dual<N>& b) {
    return a * chain(b, 1.0 / b.v, -1.0 / (b.v * b.v));
}
template <std::size_t N>
Dual<N> operator/(const Dual<N>& a, double s) { return a * (1.0 / s); }
template <std::size_t N>
Dual<N> operator/(double s, const Dual<N>& b) { return s * chain(b, 1.0 / b.v, -1.0 / (b.v * b.v)); }
template <std::size_t N>
Dual<N> exp(const Dual<N>& a) {
    const double e = std::exp(a.v);
    return chain(a, e, e);
}
template <std::size_t N>
Dual<N> sqrt(const Dual<N>& a) {
    const double s = std::sqrt(a.v);
    return chain(a, s, 0.5 / s);
}

inline double value_of(double a) { return a; }
template <std::size_t N>
double value_of(const Dual<N>& a) { return a.v; }

}  // namespace splitann
