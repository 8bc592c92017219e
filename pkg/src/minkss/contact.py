"""Distance-squared family ``f(t, c) = <gamma(t) - c, gamma(t) - c>`` and contact detection."""

from __future__ import annotations

import math
from dataclasses import dataclass
from math import comb
from typing import NamedTuple, Optional

import numpy as np

from .errors import Ambiguous, SingularSystem
from .minkowski import (
    EPS_LIGHT,
    Branch,
    CausalType,
    CircleKind,
    MinkVec,
    PseudoCircle,
    branch_of,
    det2,
    is_lightlike_value,
    mdot,
    mperp,
)
from .curves import _kappa_prime

MAX_ORDER = 5


class DistDerivs(NamedTuple):
    f: float
    d: tuple[float, ...]  # f', f'', ..., f^(5)


@dataclass(frozen=True)
class ContactPoint:
    t: float
    order: int
    point: MinkVec
    causal: CausalType
    kappa: Optional[float]
    kappa_prime: Optional[float]
    branch: Optional[Branch]
    near_lightlike: bool


def dist_sq(curve, t: float, u: float, c) -> float:
    p = curve.jet(float(t), u, 0)[0] - np.asarray(c, dtype=float)
    return float(mdot(p, p))


def _derivs_from_jet(J: np.ndarray, c, n: int) -> np.ndarray:
    """``f, f', ..., f^(n)`` by the Leibniz rule; ``J`` holds at least ``n+1`` jets."""
    P = J.copy()
    P[0] = P[0] - np.asarray(c, dtype=float)
    out = np.empty((n + 1, *J.shape[1:-1]))
    for j in range(n + 1):
        acc = 0.0
        for k in range(j + 1):
            acc = acc + comb(j, k) * mdot(P[k], P[j - k])
        out[j] = acc
    return out


def dist_sq_derivs(curve, t: float, u: float, c) -> DistDerivs:
    J = curve.jet(float(t), u, MAX_ORDER)
    vals = _derivs_from_jet(J, c, MAX_ORDER)
    return DistDerivs(float(vals[0]), tuple(float(v) for v in vals[1:]))


def normalized_derivs(curve, t: float, u: float, c) -> np.ndarray:
    """``|f^(j)| / (|gamma'|^j * max(1, |f|))`` for ``j = 1..5``."""
    J = curve.jet(float(t), u, MAX_ORDER)
    vals = _derivs_from_jet(J, c, MAX_ORDER)
    speed = math.hypot(*J[1])
    scale = max(1.0, abs(vals[0]))
    return np.array([abs(vals[j]) / (speed ** j * scale) for j in range(1, MAX_ORDER + 1)])


def contact_order(curve, t: float, u: float, c, tol: float = 1e-6) -> Optional[int]:
    """A_k type of ``f_c`` at ``t``, or ``None`` if ``f_c'(t) != 0``.

    ``k`` is the number of leading normalized derivatives at or below ``tol``;
    the next one must exceed ``10 * tol``, otherwise the configuration sits
    in the gap between "zero" and "nonzero" and :class:`Ambiguous` is raised.
    """
    nd = normalized_derivs(curve, t, u, c)
    k = 0
    while k < MAX_ORDER and nd[k] <= tol:
        k += 1
    if k == 0:
        return None
    if k == MAX_ORDER or nd[k] <= 10.0 * tol:
        raise Ambiguous(f"contact order undecided at t={t}: {nd.tolist()}")
    return k


def caustic_point(curve, t: float, u: float = 0.0, rtol: float = 1e-12) -> MinkVec:
    """Center ``c`` solving ``f_c'(t) = f_c''(t) = 0``; defined at lightlike points too."""
    J = curve.jet(float(t), u, 2)
    c = caustic_from_jet(J)
    if not np.all(np.isfinite(c)):
        raise SingularSystem(f"gamma' and gamma'' are parallel at t={t}")
    d1, d2 = J[1], J[2]
    if abs(det2(d1, d2)) <= rtol * math.hypot(*d1) * math.hypot(*d2):
        raise SingularSystem(f"gamma' and gamma'' are parallel at t={t}")
    return MinkVec.of(c)


def caustic_from_jet(J: np.ndarray) -> np.ndarray:
    """Vectorised caustic: rows ``<g', c> = <g', g>`` and ``<g'', c> = <g'', g> + <g', g'>``."""
    g, d1, d2 = J[0], J[1], J[2]
    r1 = mdot(d1, g)
    r2 = mdot(d2, g) + mdot(d1, d1)
    return _solve_pseudo(d1, d2, r1, r2)


def _solve_pseudo(a, b, r1, r2):
    """Solve ``<a, c> = r1, <b, c> = r2`` for ``c`` (broadcasting)."""
    det = -a[..., 0] * b[..., 1] + a[..., 1] * b[..., 0]
    with np.errstate(divide="ignore", invalid="ignore"):
        c0 = (r1 * b[..., 1] - a[..., 1] * r2) / det
        c1 = (-a[..., 0] * r2 + b[..., 0] * r1) / det
    return np.stack([c0, c1], axis=-1)


def make_contact(curve, t: float, u: float, circle: Optional[PseudoCircle], order: int,
                 near_tol: float = 1e-6, eps: float = EPS_LIGHT) -> ContactPoint:
    """Tangency record at ``t`` for the given circle; curvature only off the lightlike set."""
    J = curve.jet(float(t), u, 3)
    q = float(mdot(J[1], J[1]))
    sq = float(J[1] @ J[1])
    near = bool(abs(q) <= near_tol * sq)
    if is_lightlike_value(q, sq, eps):
        causal, kappa, kp = CausalType.LIGHTLIKE, None, None
    else:
        causal = CausalType.TIMELIKE if q < 0 else CausalType.SPACELIKE
        kappa = float(mdot(J[1], mperp(J[2]))) / abs(q) ** 1.5
        kp = float(_kappa_prime(J[1], J[2], J[3], q))
    branch = None
    if circle is not None and circle.kind is not CircleKind.LC:
        branch = branch_of(circle, J[0], tol=1e-6)
    return ContactPoint(float(t), int(order), MinkVec.of(J[0]), causal, kappa, kp, branch, near)
