"""Closed plane curves and 1-parameter families, with Minkowski differential geometry.

A family is ``gamma(t, u) = gamma_0(t) + sum_m u**m * delta_m(t)`` where every
piece is a finite trigonometric polynomial, so derivatives of any order in
``t`` and the first derivative in ``u`` are exact.

Curves are duck-typed: anything with ``jet(t, u, k)`` and ``u_jet(t, u, k)``
returning the stacked t-derivatives ``0..k`` with shape ``(k+1, *t.shape, 2)``
works with every function here (see :class:`PseudoCircleArc`).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping, NamedTuple, Sequence

import numpy as np
from scipy.optimize import brentq

from .errors import InputError, IrregularCurve, LightlikeTangent, VanishingCurvature
from .minkowski import (
    EPS_LIGHT,
    Branch,
    CausalType,
    CircleKind,
    MinkVec,
    PseudoCircle,
    det2,
    is_lightlike_value,
    mdot,
    mperp,
)

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class FourierComponent:
    """``const + sum_k cos[k-1] cos(k t) + sin[k-1] sin(k t)``."""

    const: float = 0.0
    cos: tuple[float, ...] = (0.0,)
    sin: tuple[float, ...] = (0.0,)

    def __post_init__(self):
        cos = tuple(float(v) for v in self.cos)
        sin = tuple(float(v) for v in self.sin)
        k = max(len(cos), len(sin), 1)
        cos += (0.0,) * (k - len(cos))
        sin += (0.0,) * (k - len(sin))
        object.__setattr__(self, "const", float(self.const))
        object.__setattr__(self, "cos", cos)
        object.__setattr__(self, "sin", sin)
        if not all(math.isfinite(v) for v in (self.const, *cos, *sin)):
            raise InputError("non-finite Fourier coefficient")

    @property
    def order(self) -> int:
        return len(self.cos)

    def coefficients(self, k: int) -> np.ndarray:
        """``(3, k)`` array: row 0 holds the constant in column 0, then cos, sin."""
        out = np.zeros((3, k))
        out[0, 0] = self.const
        out[1, : self.order] = self.cos
        out[2, : self.order] = self.sin
        return out

    @classmethod
    def from_dict(cls, data: Mapping[str, Any], where: str) -> "FourierComponent":
        if not isinstance(data, Mapping):
            raise InputError(f"{where}: expected an object")
        unknown = set(data) - {"const", "cos", "sin"}
        if unknown:
            raise InputError(f"{where}: unknown keys {sorted(unknown)}")
        const = data.get("const", 0.0)
        cos = data.get("cos", [])
        sin = data.get("sin", [])
        if not _is_number(const):
            raise InputError(f"{where}.const must be a number")
        for name, seq in (("cos", cos), ("sin", sin)):
            if not isinstance(seq, list) or not all(_is_number(v) for v in seq):
                raise InputError(f"{where}.{name} must be an array of numbers")
        if not cos and not sin:
            cos = [0.0]
        return cls(const, tuple(cos), tuple(sin))

    def to_dict(self) -> dict:
        return {"const": self.const, "cos": list(self.cos), "sin": list(self.sin)}


def _is_number(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v)


class FourierCurve:
    """A single closed curve with precomputed coefficient arrays."""

    def __init__(self, x: np.ndarray, y: np.ndarray):
        # x, y: (3, K) as produced by FourierComponent.coefficients
        self._c = np.stack([x, y])  # (2, 3, K)
        self._k = np.arange(1, x.shape[1] + 1, dtype=float)

    def jet(self, t, k: int) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        kt = np.multiply.outer(t, self._k)
        c, s = np.cos(kt), np.sin(kt)
        out = np.empty((k + 1, *t.shape, 2))
        for j in range(k + 1):
            # d^j/dt^j of cos(kt), sin(kt) is k^j times a quarter-turn phase shift
            rc = (c, -s, -c, s)[j % 4]
            rs = (s, c, -s, -c)[j % 4]
            w = self._k ** j
            for axis in range(2):
                a, b = self._c[axis, 1] * w, self._c[axis, 2] * w
                val = rc @ a + rs @ b
                if j == 0:
                    val = val + self._c[axis, 0, 0]
                out[j, ..., axis] = val
        return out


@dataclass(frozen=True)
class Perturbation:
    order: int
    x: FourierComponent
    y: FourierComponent

    def __post_init__(self):
        if isinstance(self.order, bool) or not isinstance(self.order, int) or self.order < 1:
            raise InputError("perturbation order must be an integer >= 1")


@dataclass(frozen=True)
class CurveFamily:
    x: FourierComponent
    y: FourierComponent
    perturbations: tuple[Perturbation, ...] = ()
    name: str = "curve"

    def __post_init__(self):
        object.__setattr__(self, "perturbations", tuple(self.perturbations))

    @property
    def has_family(self) -> bool:
        return bool(self.perturbations)

    def _order(self) -> int:
        comps = [self.x, self.y] + [c for p in self.perturbations for c in (p.x, p.y)]
        return max(c.order for c in comps)

    def at(self, u: float = 0.0) -> FourierCurve:
        cache = self.__dict__.get("_at_cache")
        if cache is not None and cache[0] == u:
            return cache[1]
        curve = self._build_at(u)
        object.__setattr__(self, "_at_cache", (u, curve))
        return curve

    def _build_at(self, u: float) -> FourierCurve:
        k = self._order()
        x = self.x.coefficients(k)
        y = self.y.coefficients(k)
        for p in self.perturbations:
            w = u ** p.order
            x = x + w * p.x.coefficients(k)
            y = y + w * p.y.coefficients(k)
        return FourierCurve(x, y)

    def du_at(self, u: float = 0.0) -> FourierCurve:
        k = self._order()
        x = np.zeros((3, k))
        y = np.zeros((3, k))
        for p in self.perturbations:
            w = p.order * u ** (p.order - 1)
            x = x + w * p.x.coefficients(k)
            y = y + w * p.y.coefficients(k)
        return FourierCurve(x, y)

    def jet(self, t, u: float, k: int) -> np.ndarray:
        return self.at(u).jet(t, k)

    def u_jet(self, t, u: float, k: int) -> np.ndarray:
        return self.du_at(u).jet(t, k)

    def fixed(self, u: float) -> "FixedCurve":
        return FixedCurve(self.at(u))

    # -- curve-spec file ---------------------------------------------------

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "CurveFamily":
        if not isinstance(data, Mapping):
            raise InputError("curve spec must be a JSON object")
        unknown = set(data) - {"name", "x", "y", "family"}
        if unknown:
            raise InputError(f"unknown keys in curve spec: {sorted(unknown)}")
        for key in ("name", "x", "y"):
            if key not in data:
                raise InputError(f"curve spec is missing {key!r}")
        if not isinstance(data["name"], str):
            raise InputError("name must be a string")
        perts = []
        fam = data.get("family", [])
        if not isinstance(fam, list):
            raise InputError("family must be an array")
        for i, entry in enumerate(fam):
            if not isinstance(entry, Mapping):
                raise InputError(f"family[{i}] must be an object")
            extra = set(entry) - {"order", "x", "y"}
            if extra or "order" not in entry:
                raise InputError(f"family[{i}] needs exactly order, x, y")
            zero = {"const": 0.0, "cos": [0.0], "sin": []}
            perts.append(Perturbation(
                entry["order"],
                FourierComponent.from_dict(entry.get("x", zero), f"family[{i}].x"),
                FourierComponent.from_dict(entry.get("y", zero), f"family[{i}].y"),
            ))
        return cls(
            FourierComponent.from_dict(data["x"], "x"),
            FourierComponent.from_dict(data["y"], "y"),
            tuple(perts),
            data["name"],
        )

    def to_dict(self) -> dict:
        out: dict[str, Any] = {"name": self.name, "x": self.x.to_dict(), "y": self.y.to_dict()}
        if self.perturbations:
            out["family"] = [
                {"order": p.order, "x": p.x.to_dict(), "y": p.y.to_dict()}
                for p in self.perturbations
            ]
        return out


def load_curve(path: str | Path) -> CurveFamily:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc})") from exc
    return CurveFamily.from_dict(data)


class FixedCurve:
    """Adapter giving a :class:`FourierCurve` the family interface at fixed ``u``."""

    def __init__(self, curve: FourierCurve):
        self._curve = curve

    def jet(self, t, u: float, k: int) -> np.ndarray:
        return self._curve.jet(t, k)

    def u_jet(self, t, u: float, k: int) -> np.ndarray:
        return np.zeros((k + 1, *np.shape(t), 2))


@dataclass(frozen=True)
class PseudoCircleArc:
    """Exact parametrisation of one branch of an H or S pseudo-circle.

    Not closed; used where truncation error of a Fourier fit would mask the
    quantity being checked.
    """

    circle: PseudoCircle
    branch: Branch = Branch.PLUS

    def jet(self, t, u: float, k: int) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        r = self.circle.radius
        sgn = 1.0 if self.branch is Branch.PLUS else -1.0
        ch, sh = np.cosh(t), np.sinh(t)
        out = np.empty((k + 1, *t.shape, 2))
        for j in range(k + 1):
            c_j, s_j = (ch, sh) if j % 2 == 0 else (sh, ch)
            if self.circle.kind is CircleKind.H:
                out[j, ..., 0] = sgn * r * c_j
                out[j, ..., 1] = r * s_j
            else:
                out[j, ..., 0] = r * s_j
                out[j, ..., 1] = sgn * r * c_j
        out[0] += np.asarray(self.circle.center)
        return out

    def u_jet(self, t, u: float, k: int) -> np.ndarray:
        return np.zeros((k + 1, *np.shape(t), 2))


# -- differential geometry ---------------------------------------------------

class CurvePointData(NamedTuple):
    t: float
    point: MinkVec
    d1: MinkVec
    d2: MinkVec
    d3: MinkVec
    d4: MinkVec
    causal: CausalType
    T: MinkVec | None
    kappa: float | None
    kappa_prime: float | None


def evaluate(curve, t: float, u: float = 0.0, k: int = 0) -> MinkVec:
    """Exact ``k``-th t-derivative of the curve at ``(t, u)``."""
    if k < 0:
        raise InputError("derivative order must be >= 0")
    return MinkVec.of(curve.jet(float(t), u, k)[k])


def _check_regular(d1: np.ndarray):
    if np.any(np.hypot(d1[..., 0], d1[..., 1]) == 0.0):
        raise IrregularCurve("curve is singular (zero velocity)")


def _tangent_q(curve, t, u, eps):
    J = curve.jet(float(t), u, 3)
    _check_regular(J[1])
    q = float(mdot(J[1], J[1]))
    if is_lightlike_value(q, float(J[1] @ J[1]), eps):
        raise LightlikeTangent(f"lightlike tangent at t={t}")
    return J, q


def curvature(curve, t: float, u: float = 0.0, eps: float = EPS_LIGHT) -> float:
    """``<g', g''^perp> / |<g', g'>|^(3/2)``."""
    J, q = _tangent_q(curve, t, u, eps)
    return float(mdot(J[1], mperp(J[2]))) / abs(q) ** 1.5


def curvature_arclength_derivative(curve, t: float, u: float = 0.0, eps: float = EPS_LIGHT) -> float:
    J, q = _tangent_q(curve, t, u, eps)
    return float(_kappa_prime(J[1], J[2], J[3], q))


def _kappa_prime(d1, d2, d3, q):
    num = mdot(d1, mperp(d2))
    # <g'', g''^perp> vanishes identically, leaving one term in the numerator derivative
    num_t = mdot(d1, mperp(d3))
    q_t = 2.0 * mdot(d1, d2)
    aq = np.abs(q)
    kappa_t = num_t / aq ** 1.5 - 1.5 * num * np.sign(q) * q_t / aq ** 2.5
    return kappa_t / np.sqrt(aq)


def unit_tangent_normal(curve, t: float, u: float = 0.0, eps: float = EPS_LIGHT) -> tuple[MinkVec, MinkVec]:
    """Unit tangent and the normal that points from the osculating center.

    ``N = sign(<g',g'>) * perp(T)``; with this sign ``gamma - N/kappa`` is the
    solution of ``f' = f'' = 0``.
    """
    J, q = _tangent_q(curve, t, u, eps)
    T = J[1] / math.sqrt(abs(q))
    N = math.copysign(1.0, q) * mperp(T)
    return MinkVec.of(T), MinkVec.of(N)


def evolute(curve, t: float, u: float = 0.0, eps: float = EPS_LIGHT, kappa_tol: float = 1e-12) -> MinkVec:
    k = curvature(curve, t, u, eps)
    if abs(k) <= kappa_tol:
        raise VanishingCurvature(f"kappa={k} at t={t}")
    _, N = unit_tangent_normal(curve, t, u, eps)
    return evaluate(curve, t, u) - N / k


def curve_point_data(curve, t: float, u: float = 0.0, eps: float = EPS_LIGHT) -> CurvePointData:
    J = curve.jet(float(t), u, 4)
    _check_regular(J[1])
    q = float(mdot(J[1], J[1]))
    light = bool(is_lightlike_value(q, float(J[1] @ J[1]), eps))
    vecs = [MinkVec.of(v) for v in J]
    if light:
        return CurvePointData(float(t), *vecs, CausalType.LIGHTLIKE, None, None, None)
    causal = CausalType.TIMELIKE if q < 0 else CausalType.SPACELIKE
    kappa = float(mdot(J[1], mperp(J[2]))) / abs(q) ** 1.5
    return CurvePointData(
        float(t), *vecs, causal, MinkVec.of(J[1] / math.sqrt(abs(q))), kappa,
        float(_kappa_prime(J[1], J[2], J[3], q)),
    )


def tangent_norm_sq(curve, t, u: float = 0.0) -> np.ndarray:
    """``<g', g'>`` at an array of parameters."""
    d1 = curve.jet(t, u, 1)[1]
    return mdot(d1, d1)


def vertex_function(curve, t, u: float = 0.0) -> np.ndarray:
    """Smooth function whose zeros off the lightlike set are the vertices.

    Equals ``kappa'`` up to a nonvanishing factor on spacelike and timelike arcs;
    unlike ``kappa'`` it stays bounded through lightlike points.
    """
    J = curve.jet(t, u, 3)
    q = mdot(J[1], J[1])
    return det2(J[1], J[3]) * q - 3.0 * det2(J[1], J[2]) * mdot(J[1], J[2])


def grid_roots(func, n: int, xtol: float = 1e-13) -> list[float]:
    """Simple roots of a 2pi-periodic function by sign changes on an ``n``-grid."""
    ts = np.linspace(0.0, TWO_PI, n, endpoint=False)
    vals = np.asarray(func(ts), dtype=float)
    roots = []
    for i in range(n):
        a, b = vals[i], vals[(i + 1) % n]
        ta = ts[i]
        tb = ts[i] + TWO_PI / n
        if a == 0.0:
            roots.append(ta)
        elif a * b < 0.0:
            g = lambda s: float(func(np.array([s]))[0])
            roots.append(brentq(g, ta, tb, xtol=xtol, rtol=4 * np.finfo(float).eps))
    return sorted(r % TWO_PI for r in roots)


def lightlike_points(curve, u: float = 0.0, n: int = 4096) -> list[float]:
    """Parameters in ``[0, 2pi)`` where the tangent is lightlike."""
    return grid_roots(lambda ts: tangent_norm_sq(curve, ts, u), n)


def curve_scale(curve, u: float = 0.0, n: int = 1024) -> float:
    """Largest Euclidean distance of the curve from its sample centroid."""
    ts = np.linspace(0.0, TWO_PI, n, endpoint=False)
    p = curve.jet(ts, u, 0)[0]
    d = p - p.mean(axis=0)
    return float(np.max(np.hypot(d[:, 0], d[:, 1])))


def make_family(x, y, perturbations: Sequence[tuple[int, Any, Any]] = (), name: str = "curve") -> CurveFamily:
    """Convenience constructor from ``(const, cos, sin)`` triples or dicts."""

    def comp(v):
        if isinstance(v, FourierComponent):
            return v
        if isinstance(v, Mapping):
            return FourierComponent(v.get("const", 0.0), tuple(v.get("cos", ())), tuple(v.get("sin", ())))
        const, cos, sin = v
        return FourierComponent(const, tuple(cos), tuple(sin))

    return CurveFamily(comp(x), comp(y), tuple(Perturbation(m, comp(a), comp(b)) for m, a, b in perturbations), name)
