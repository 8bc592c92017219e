"""Lorentz-Minkowski plane kernel.

Points are ``(u0, u1)`` with pseudo-scalar product ``-u0*v0 + u1*v1``; the
first coordinate is the timelike one.  The scalar API works on
:class:`MinkVec`; the helpers prefixed ``m`` operate on ``(..., 2)`` arrays
and are what the numerical modules use in their inner loops.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import InputError, NotOnCircle

EPS_LIGHT = 1e-12


@dataclass(frozen=True)
class MinkVec:
    u0: float
    u1: float

    def __post_init__(self):
        if not (math.isfinite(self.u0) and math.isfinite(self.u1)):
            raise InputError(f"non-finite MinkVec ({self.u0}, {self.u1})")
        object.__setattr__(self, "u0", float(self.u0))
        object.__setattr__(self, "u1", float(self.u1))

    @classmethod
    def of(cls, v) -> "MinkVec":
        if isinstance(v, MinkVec):
            return v
        a = np.asarray(v, dtype=float).reshape(2)
        return cls(a[0], a[1])

    def __iter__(self):
        yield self.u0
        yield self.u1

    def __array__(self, dtype=None, copy=None):
        return np.array([self.u0, self.u1], dtype=dtype or float)

    def __add__(self, other):
        o = MinkVec.of(other)
        return MinkVec(self.u0 + o.u0, self.u1 + o.u1)

    def __sub__(self, other):
        o = MinkVec.of(other)
        return MinkVec(self.u0 - o.u0, self.u1 - o.u1)

    def __neg__(self):
        return MinkVec(-self.u0, -self.u1)

    def __mul__(self, s: float):
        return MinkVec(self.u0 * s, self.u1 * s)

    __rmul__ = __mul__

    def __truediv__(self, s: float):
        return MinkVec(self.u0 / s, self.u1 / s)

    def euclid_norm(self) -> float:
        return math.hypot(self.u0, self.u1)

    def tolist(self) -> list[float]:
        return [self.u0, self.u1]


class CausalType(str, Enum):
    TIMELIKE = "Timelike"
    SPACELIKE = "Spacelike"
    LIGHTLIKE = "Lightlike"


class Branch(str, Enum):
    PLUS = "Plus"
    MINUS = "Minus"


class CircleKind(str, Enum):
    H = "H"
    S = "S"
    LC = "LC"


# -- array helpers ---------------------------------------------------------

def mdot(a, b):
    """Pseudo-scalar product over the last axis."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return -a[..., 0] * b[..., 0] + a[..., 1] * b[..., 1]


def mperp(a):
    a = np.asarray(a, dtype=float)
    return a[..., ::-1].copy()


def det2(a, b):
    """Euclidean determinant ``a0*b1 - a1*b0`` over the last axis."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def is_lightlike_value(q, sq_norm, eps: float = EPS_LIGHT):
    """Relative lightlike test: ``|<u,u>| <= eps * max(1, |u|^2)``."""
    return np.abs(q) <= eps * np.maximum(1.0, sq_norm)


def _finite(*vs):
    for v in vs:
        if not np.all(np.isfinite(np.asarray(v, dtype=float))):
            raise InputError("non-finite vector")


# -- scalar API ------------------------------------------------------------

def pseudo_dot(u, v) -> float:
    _finite(u, v)
    return float(mdot(np.asarray(u, float), np.asarray(v, float)))


def causal_type(u, eps: float = EPS_LIGHT) -> CausalType:
    """Thresholded sign of ``<u,u>``; the threshold scales with ``|u|^2``."""
    _finite(u)
    a = np.asarray(u, dtype=float)
    q = float(mdot(a, a))
    if is_lightlike_value(q, float(a @ a), eps):
        return CausalType.LIGHTLIKE
    return CausalType.TIMELIKE if q < 0 else CausalType.SPACELIKE


def perp(u) -> MinkVec:
    _finite(u)
    v = MinkVec.of(u)
    return MinkVec(v.u1, v.u0)


@dataclass(frozen=True)
class PseudoCircle:
    """Level set ``<p - center, p - center> = r2``.

    ``r2`` is signed: negative for H (timelike radius vector, two branches
    split by ``u0``), positive for S (branches split by ``u1``), zero for the
    lightcone LC through the center.
    """

    kind: CircleKind
    center: MinkVec
    r2: float

    def __post_init__(self):
        object.__setattr__(self, "kind", CircleKind(self.kind))
        object.__setattr__(self, "center", MinkVec.of(self.center))
        expected = {CircleKind.H: self.r2 < 0, CircleKind.S: self.r2 > 0,
                    CircleKind.LC: True}[self.kind]
        if not expected:
            raise InputError(f"{self.kind.value} pseudo-circle with r2={self.r2}")

    @classmethod
    def through(cls, center, r2: float, scale: float = 1.0, eps: float = EPS_LIGHT) -> "PseudoCircle":
        """Classify by the sign of ``r2``, treating ``|r2| <= eps*scale^2`` as LC."""
        if abs(r2) <= eps * max(1.0, scale * scale):
            return cls(CircleKind.LC, center, r2)
        return cls(CircleKind.H if r2 < 0 else CircleKind.S, center, r2)

    @property
    def radius(self) -> float:
        return math.sqrt(abs(self.r2))

    @property
    def light_directions(self) -> tuple[MinkVec, MinkVec]:
        return MinkVec(1.0, 1.0), MinkVec(1.0, -1.0)


def pseudo_circle_point(pc: PseudoCircle, branch: Branch, theta: float) -> MinkVec:
    """Point of the branch parametrisation at hyperbolic angle ``theta``.

    H: ``c + (+-r cosh, r sinh)``; S: ``c + (r sinh, +-r cosh)``.
    """
    if pc.kind is CircleKind.LC:
        raise InputError("lightcone has no hyperbolic parametrisation")
    r = pc.radius
    sgn = 1.0 if Branch(branch) is Branch.PLUS else -1.0
    ch, sh = math.cosh(theta), math.sinh(theta)
    if pc.kind is CircleKind.H:
        return pc.center + MinkVec(sgn * r * ch, r * sh)
    return pc.center + MinkVec(r * sh, sgn * r * ch)


def branch_of(pc: PseudoCircle, p, tol: float = 1e-9) -> Branch:
    """Which branch of an H or S pseudo-circle the point ``p`` lies on."""
    if pc.kind is CircleKind.LC:
        raise InputError("branch is undefined on the lightcone")
    d = np.asarray(p, dtype=float) - np.asarray(pc.center)
    _finite(d)
    val = float(mdot(d, d))
    if abs(val - pc.r2) > tol * max(1.0, abs(pc.r2), float(d @ d)):
        raise NotOnCircle(f"<p-c,p-c>={val} but r2={pc.r2}")
    coord = d[0] if pc.kind is CircleKind.H else d[1]
    if abs(coord) <= tol * pc.radius:
        raise NotOnCircle("deciding coordinate vanishes")
    return Branch.PLUS if coord > 0 else Branch.MINUS


def circle_tangent(pc: PseudoCircle, p) -> MinkVec:
    """Unit tangent of the pseudo-circle at ``p`` in its canonical orientation.

    The orientation is ``perp(p - c)``, which for both branches reproduces the
    ``(sinh, +-cosh)`` / ``(+-cosh, sinh)`` tangent families of the branch
    parametrisations with the sign following the branch.
    """
    d = np.asarray(p, dtype=float) - np.asarray(pc.center)
    n = math.sqrt(abs(float(mdot(d, d))))
    if n == 0.0:
        raise InputError("tangent undefined at the center")
    return MinkVec.of(mperp(d) / n)
