"""Independent oracles and constructed families shared by the test modules.

Nothing here calls the derivative or solver code under test: curve jets are
re-derived term by term, ``f`` derivatives by an explicit Leibniz sum, and
the planted events are found with scipy root finders.
"""

from __future__ import annotations

import warnings
from functools import lru_cache
from math import comb

import numpy as np
from scipy.optimize import brentq, fsolve

from minkss.curves import make_family

TWO_PI = 2.0 * np.pi


def ip(a, b):
    """Pseudo-scalar product, written out."""
    return -a[0] * b[0] + a[1] * b[1]


def trig_jet(cos, sin, const, t, k):
    """``k``-th derivative of ``const + sum a_n cos(nt) + b_n sin(nt)``."""
    v = const if k == 0 else 0.0
    for n, a in enumerate(cos, 1):
        v = v + a * n ** k * np.cos(n * t + k * np.pi / 2)
    for n, b in enumerate(sin, 1):
        v = v + b * n ** k * np.sin(n * t + k * np.pi / 2)
    return v


def curve_jet(X, Y, t, k):
    """``gamma^(k)(t)`` for coefficient triples ``X = (cos, sin, const)``."""
    return np.array([trig_jet(*X, t, k), trig_jet(*Y, t, k)])


def fderivs(X, Y, t, c, kmax):
    """``[f, f', .., f^(kmax)]`` of ``f = <gamma - c, gamma - c>``."""
    g = [curve_jet(X, Y, t, k) for k in range(kmax + 1)]
    g[0] = g[0] - np.reshape(np.asarray(c, dtype=float), (2,) + (1,) * np.ndim(t))
    return [sum(comb(j, i) * ip(g[i], g[j - i]) for i in range(j + 1)) for j in range(kmax + 1)]


def coeffs_at(spec, u):
    """Coefficient triples of a family spec ``(X, Y, perts)`` at ``u``."""
    X, Y, perts = spec
    n = max(len(v) for v in [X[0], X[1], Y[0], Y[1]] + [p for _, a, b in perts for p in (a[0], a[1], b[0], b[1])])

    def pad(v):
        return np.pad(np.asarray(v, dtype=float), (0, n - len(v)))

    xc, xs, x0 = pad(X[0]), pad(X[1]), X[2]
    yc, ys, y0 = pad(Y[0]), pad(Y[1]), Y[2]
    for m, a, b in perts:
        w = u ** m
        xc, xs, x0 = xc + w * pad(a[0]), xs + w * pad(a[1]), x0 + w * a[2]
        yc, ys, y0 = yc + w * pad(b[0]), ys + w * pad(b[1]), y0 + w * b[2]
    return (xc, xs, x0), (yc, ys, y0)


def to_family(spec, name="constructed"):
    X, Y, perts = spec
    conv = lambda T: (T[2], list(T[0]), list(T[1]))
    return make_family(conv(X), conv(Y), [(m, conv(a), conv(b)) for m, a, b in perts], name)


def curvature(X, Y, t):
    d1, d2 = curve_jet(X, Y, t, 1), curve_jet(X, Y, t, 2)
    q = ip(d1, d1)
    return ip(d1, d2[::-1]) / abs(q) ** 1.5


def kappa_prime_fd(X, Y, t, h=1e-5):
    """Central difference of curvature divided by the Minkowski speed."""
    d1 = curve_jet(X, Y, t, 1)
    dk = (curvature(X, Y, t + h) - curvature(X, Y, t - h)) / (2 * h)
    return dk / np.sqrt(abs(ip(d1, d1)))


def osculating_center(X, Y, t):
    """Solve ``<g', c> = <g', g>`` and ``<g'', c> = <g'', g> + <g', g'>`` for ``c``."""
    g, d1, d2 = (curve_jet(X, Y, t, k) for k in range(3))
    A = np.array([[-d1[0], d1[1]], [-d2[0], d2[1]]])
    return np.linalg.solve(A, [ip(d1, g), ip(d2, g) + ip(d1, d1)])


def defining_residual(spec, orders, u, ts, c):
    """Max residual of the event system ``orders`` at ``(ts, c, u)``."""
    X, Y = coeffs_at(spec, u)
    fs, worst = [], 0.0
    for t, k in zip(ts, orders):
        d = fderivs(X, Y, t, c, k)
        worst = max([worst] + [abs(v) for v in d[1:]])
        fs.append(d[0])
    return max([worst] + [abs(f - fs[-1]) for f in fs[:-1]])


# -- planted events ---------------------------------------------------------------

@lru_cache(maxsize=None)
def a4_construction():
    """Family with an A4 at ``u = 0``, ``t = 0.4``.

    Two free coefficients of the base curve and the center are fitted so that
    ``f' .. f''''`` vanish at ``t0``; a generic order-1 perturbation unfolds it.
    """
    t0 = 0.4

    def base(p):
        return ([1.0, 0.0, p[0]], [0.03, 0.05], 0.0), ([0.0, 0.1], [0.7, 0.0, p[1]], 0.0)

    def eqs(z):
        X, Y = base(z[:2])
        return fderivs(X, Y, t0, z[2:], 4)[1:]

    z, _, ier, _ = fsolve(eqs, [0.02, 0.02, 0.3, 0.1], full_output=True, xtol=1e-14)
    assert ier == 1
    X, Y = base(z[:2])
    pert = (1, ([0, 0, 0, 0.05], [0, 0.03], 0.0), ([0.04], [0, 0, 0, 0.02], 0.0))
    return {"spec": (X, Y, (pert,)), "t": (t0,), "c": tuple(z[2:]), "u": 0.0}


def _a22_base(eps, alpha):
    X = ([1.0, -0.026, 0.101], [0.0, 0.03 * eps, alpha], 0.0)
    Y = ([0.0, 0.0, 0.02 * eps], [0.8, 0.242, 0.22], 0.0)
    return X, Y


def _a22_eqs(z, eps):
    t1, t2, c0, c1, alpha = z
    X, Y = _a22_base(eps, alpha)
    d1 = fderivs(X, Y, t1, (c0, c1), 2)
    d2 = fderivs(X, Y, t2, (c0, c1), 2)
    return [d1[1], d1[2], d2[1], d2[2], d1[0] - d2[0]]


def _symmetric_a22_start():
    """Mirror-symmetric base: the caustic crosses the axis at ``(t, -t)``."""
    X, Y = _a22_base(0.0, 0.0)
    t1 = brentq(lambda t: osculating_center(X, Y, t)[1], 1.75, 1.95, xtol=1e-15)
    c = osculating_center(X, Y, t1)
    return np.array([t1, -t1, c[0], c[1], 0.0])


@lru_cache(maxsize=None)
def a22_construction():
    """Family with an A2^2 at ``u = 0`` whose contacts have ``kappa'`` of opposite sign.

    Starts from a mirror-symmetric curve, where the two cusps of the caustic
    meet on the axis, and continues the A2^2 condition while switching on an
    asymmetric deformation; one coefficient ``alpha`` is solved for.
    """
    z = _symmetric_a22_start()
    with warnings.catch_warnings():
        # the symmetric start is a singular point of the continuation
        warnings.simplefilter("ignore", RuntimeWarning)
        for eps in np.linspace(0.0, 1.0, 11):
            z = fsolve(_a22_eqs, z, args=(eps,), xtol=1e-14)
    assert max(abs(v) for v in _a22_eqs(z, 1.0)) < 1e-12
    t1, t2, c0, c1, alpha = z
    X, Y = _a22_base(1.0, alpha)
    pert = (1, ([], [0, 0, 1.0], 0.0), ([], [], 0.0))
    ts = (t1 % TWO_PI, t2 % TWO_PI)
    kps = tuple(kappa_prime_fd(X, Y, t) for t in ts)
    return {"spec": (X, Y, (pert,)), "t": ts, "c": (c0, c1), "u": 0.0, "kappa_primes": kps}


@lru_cache(maxsize=None)
def symmetric_a22_construction():
    """Mirror-symmetric A2^2 at ``u = 0`` unfolded by an asymmetric mode."""
    t1, t2, c0, c1, _ = _symmetric_a22_start()
    X, Y = _a22_base(0.0, 0.0)
    pert = (1, ([], [0, 0, 1.0], 0.0), ([], [], 0.0))
    return {"spec": (X, Y, (pert,)), "t": (t1, t2 % TWO_PI), "c": (c0, c1), "u": 0.0}


@lru_cache(maxsize=None)
def a14_construction():
    """D2-symmetric oval: the four feet of the normals through the origin.

    Symmetry under both reflections forces equal ``f`` values at
    ``t*, pi - t*, pi + t*, 2 pi - t*``; a generic perturbation unfolds it.
    """
    X = ([1.0, 0.0, -0.2], [], 0.0)
    Y = ([], [0.865, 0.0, -0.17], 0.0)
    ts = brentq(lambda t: fderivs(X, Y, t, (0.0, 0.0), 1)[1], 0.2, 0.7, xtol=1e-15)
    quad = (ts, np.pi - ts, np.pi + ts, TWO_PI - ts)
    pert = (1, ([0, 0.3], [0.2], 0.0), ([0.25, 0, 0.1], [0, 0.15], 0.0))
    return {"spec": (X, Y, (pert,)), "t": quad, "c": (0.0, 0.0), "u": 0.0}


def a2a1_configuration(X, Y, bracket, other):
    """Osculating circle at ``t1`` that is also tangent at a second point.

    ``t1`` is found by bracketing the value gap between the osculating point
    and the critical point of ``f`` near ``other``.
    """
    def second(t1):
        c = osculating_center(X, Y, t1)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            t2 = fsolve(lambda s: fderivs(X, Y, s[0], c, 1)[1], [other], xtol=1e-14)[0]
        return c, t2

    def gap(t1):
        c, t2 = second(t1)
        return fderivs(X, Y, t1, c, 0)[0] - fderivs(X, Y, t2, c, 0)[0]

    t1 = brentq(gap, *bracket, xtol=1e-15)
    c, t2 = second(t1)
    return t1, t2, c


# closed test curves (no family)
CURVES = {
    "blob": (([1.0, 0.1, 0.05], [0.0, 0.0, 0.03], 0.0), ([0.0, 0.12], [0.7, 0.0, 0.08], 0.0)),
    "ellipse3": (([1.0, 0.0, 0.15], [], 0.0), ([], [0.6, 0.0, 0.1], 0.0)),
    "mirror": (([1.0, 0.2, 0.0], [], 0.0), ([], [0.8, 0.1, 0.05], 0.0)),
}


def curve_family(name):
    X, Y = CURVES[name]
    return to_family((X, Y, ()), name)


def a1cubed_configuration(X, Y, bracket):
    """Triple tangency of a curve symmetric under ``y -> -y``.

    The normal at ``t`` meets the axis at ``c``; by symmetry ``c`` is also
    on the normal at ``-t`` with equal value, and every axis point is on the
    normal at ``t = 0``.  Matching ``f(t) = f(0)`` fixes ``t``.
    """
    def center(t):
        g, d1 = curve_jet(X, Y, t, 0), curve_jet(X, Y, t, 1)
        return np.array([g[0] - d1[1] * g[1] / d1[0], 0.0])

    def gap(t):
        c = center(t)
        return fderivs(X, Y, t, c, 0)[0] - fderivs(X, Y, 0.0, c, 0)[0]

    t = brentq(gap, *bracket, xtol=1e-15)
    return (0.0, t, TWO_PI - t), center(t)

CURVES_UNIT = (([1.0], [], 0.0), ([], [1.0], 0.0))
