"""Independent reference values frozen into the unit tests (sympy, mpmath, scipy)."""
import math

import mpmath as mp
import sympy as sp
from scipy import integrate

mp.mp.dps = 30
x, y, t = sp.symbols("x y t", real=True)


def bump1d(s):
    return sp.exp(-1 / (1 - s**2))


def show(name, value):
    print(f"{name} = {float(value):.17g}")


# Mass of the 1D bump profile.
show("bump_mass_1d", mp.quad(lambda s: mp.exp(-1 / (1 - s**2)), [-1, 1]))

# g0 conformal factor jet at (0, 1).
f = sp.Rational(1, 2) * sp.log(2 / (x - y) ** 2)
at = {x: 0, y: 1}
show("g0_factor_v", f.subs(at))
show("g0_factor_dx", sp.diff(f, x).subs(at))
show("g0_factor_dy", sp.diff(f, y).subs(at))
show("g0_factor_dxy", sp.diff(f, x, y).subs(at))

# Curvature of e^{2xy} flat at (0.3, 0.7): K = -2 e^{-2u} u_xy.
u = x * y
show("flat_xy_K", (-2 * sp.exp(-2 * u) * sp.diff(u, x, y)).subs({x: sp.Rational(3, 10), y: sp.Rational(7, 10)}))

# Schwarzians.
def schwarzian(phi, at_value):
    d1, d2, d3 = (sp.diff(phi, t, k) for k in (1, 2, 3))
    return (d3 / d1 - sp.Rational(3, 2) * (d2 / d1) ** 2).subs(t, at_value)


show("S_tan_0.3", sp.simplify(schwarzian(sp.tan(t), sp.Rational(3, 10))))
show("S_exp_0.3", schwarzian(sp.exp(t), sp.Rational(3, 10)))
sine = t + sp.Rational(3, 10) * sp.sin(2 * t)
show("S_sine_0.7", schwarzian(sine, sp.Rational(7, 10)))
d1 = sp.diff(sine, t).subs(t, sp.Rational(7, 10))
show("unif_limit_sine_0.7", schwarzian(sine, sp.Rational(7, 10)) / 12 + (d1**2 - 1) / 6)

# PO(2,2) crossratio density with psi = id, phi = sine at (0.4, 2.1).
s_, t_ = sp.Rational(2, 5), sp.Rational(21, 10)
phi = lambda a: a + sp.Rational(3, 10) * sp.sin(2 * a)
dphi = lambda a: 1 + sp.Rational(3, 5) * sp.cos(2 * a)
rho = 1 / sp.sin(s_ - t_) ** 2 + dphi(s_) * dphi(t_) / sp.sin(phi(s_) - phi(t_)) ** 2
show("po22_sine_density_0.4_2.1", rho)

# PO(2,2) sine diamond area log b(0.1, 0.5, 1.2, 2.0) and its quadrature.
def D(a, b, c, d):
    return mp.sin(a - c) * mp.sin(b - d) / (mp.sin(a - d) * mp.sin(b - c))


phin = lambda a: a + 0.3 * mp.sin(2 * a)
corners = (0.1, 0.5, 1.2, 2.0)
b = D(*corners) * D(*(phin(c) for c in corners))
show("po22_sine_diamond_area", mp.log(b))


def density(s, tt):
    dp = lambda a: 1 + 0.6 * math.cos(2 * a)
    return 1 / math.sin(s - tt) ** 2 + dp(s) * dp(tt) / math.sin(phin(s) - phin(tt)) ** 2


val, _ = integrate.dblquad(lambda tt, s: float(density(s, tt)), 0.1, 0.5, 1.2, 2.0, epsabs=1e-13, epsrel=1e-13)
show("po22_sine_diamond_quadrature", val)

# Four-piece map values: piece k0 = translation by 1/2 at a = 2.0.
show("four_piece_phi_2.0", mp.atan(mp.tan(2.0) + 0.5) + mp.pi)

# Flat closed form 1/2 ∫ u_x u_y for the bump pair of configs/action_flat_bump.yaml.
def psi(s):
    return math.exp(-1 / (1 - s * s)) if abs(s) < 1 else 0.0


def dpsi(s):
    return psi(s) * (-2 * s / (1 - s * s) ** 2) if abs(s) < 1 else 0.0


bumps = [(1.45, -0.5, 0.3, 0.3, 0.4), (1.6, -0.4, 0.25, 0.3, -0.3)]


def ux(px, py):
    return sum(a * dpsi((px - cx) / rx) / rx * psi((py - cy) / ry) for cx, cy, rx, ry, a in bumps)


def uy(px, py):
    return sum(a * psi((px - cx) / rx) * dpsi((py - cy) / ry) / ry for cx, cy, rx, ry, a in bumps)


val, _ = integrate.dblquad(lambda py, px: 0.5 * ux(px, py) * uy(px, py), 1.0, 2.0, -1.0, 0.0, epsabs=1e-12, epsrel=1e-12)
show("flat_bump_pair_action", val)
