"""Transition events of the MSS in 1-parameter families and their (a)/(b) subtypes.

Each event kind is a square system in the contact parameters, the center and
``u``: contact ``i`` of order ``k_i`` contributes ``f'(t_i) .. f^(k_i)(t_i) = 0``
and all contacts share one value of ``f``.  The distinguished contact of a
kind (the A2 of A1^2A2, the A3 of A1A3) comes first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from math import comb
from typing import Optional, Sequence

import numpy as np

from .config import DEFAULT, Config
from .contact import ContactPoint, _derivs_from_jet, dist_sq_derivs, make_contact
from .curves import TWO_PI, curve_scale
from .errors import (
    CriterionConflict,
    DegenerateJacobian,
    LightconeCircle,
    MinkError,
    NonGeneric,
    NoConvergence,
    NotOnCircle,
)
from .minkowski import (
    Branch,
    CausalType,
    CircleKind,
    MinkVec,
    PseudoCircle,
    circle_tangent,
    det2,
    mdot,
)


class EventKind(str, Enum):
    A1_4 = "A1_4"
    A2_2 = "A2_2"
    A1_2A2 = "A1_2A2"
    A1A3 = "A1A3"
    A4 = "A4"


CONTACT_ORDERS = {
    EventKind.A4: (4,),
    EventKind.A1A3: (3, 1),
    EventKind.A2_2: (2, 2),
    EventKind.A1_2A2: (2, 1, 1),
    EventKind.A1_4: (1, 1, 1, 1),
}

# Minkowski column of the classification table
TABLE = {
    (EventKind.A1_4, "a"): "Odd # points per branch",
    (EventKind.A1_4, "b"): "Even # points per branch",
    (EventKind.A2_2, "a"): "kappa1' kappa2' > 0 (M. Curvature)",
    (EventKind.A2_2, "b"): "kappa1' kappa2' < 0 (M. Curvature)",
    (EventKind.A1A3, "a"): "Points on different branches",
    (EventKind.A1A3, "b"): "Points on the same branch",
    (EventKind.A1_2A2, "a"): "A1 points on same branch",
    (EventKind.A1_2A2, "b"): "A1 points on opposite branches",
    (EventKind.A4, "single"): "single transition type",
}


@dataclass
class ClassificationEvidence:
    branch_counts: Optional[tuple[int, int]] = None
    kappa_primes: Optional[tuple[float, float]] = None
    tangent_dots: Optional[list[float]] = None
    triangle_test: Optional[dict] = None
    sign_quantity: Optional[int] = None
    threshold_consistent: Optional[list[bool]] = None


@dataclass
class TransitionEvent:
    kind: EventKind
    subtype: Optional[str]
    u_star: float
    t_params: list[float]
    center: MinkVec
    f_value: float
    circle: PseudoCircle
    contacts: list[ContactPoint]
    evidence: ClassificationEvidence = field(default_factory=ClassificationEvidence)
    residual: float = 0.0
    flags: list[str] = field(default_factory=list)


# -- defining systems ------------------------------------------------------------

def event_system(family, orders: Sequence[int], x: np.ndarray, u: Optional[float] = None):
    """Residual vector and Jacobian.

    ``x = (t_1, .., t_n, c0, c1[, u])``; when ``u`` is given it is held fixed
    and the last unknown is dropped (used for special points at fixed ``u``).
    """
    n = len(orders)
    free_u = u is None
    uu = float(x[n + 2]) if free_u else float(u)
    c = x[n:n + 2]
    m = n + 2 + (1 if free_u else 0)
    rows, jac = [], []
    values = []
    for i, k in enumerate(orders):
        t = float(x[i])
        J = family.jet(t, uu, k + 1)
        Ju = family.u_jet(t, uu, k) if free_u else None
        vals = _derivs_from_jet(J, c, k + 1)
        P = J.copy()
        P[0] = P[0] - c
        grads = []
        for j in range(k + 1):
            g = np.zeros(m)
            g[i] = vals[j + 1]
            g[n] = 2.0 * P[j][0]
            g[n + 1] = -2.0 * P[j][1]
            if free_u:
                g[n + 2] = 2.0 * sum(comb(j, a) * mdot(Ju[a], P[j - a]) for a in range(j + 1))
            grads.append(g)
        for j in range(1, k + 1):
            rows.append(vals[j])
            jac.append(grads[j])
        values.append((vals[0], grads[0]))
    f_last, g_last = values[-1]
    for f_i, g_i in values[:-1]:
        rows.append(f_i - f_last)
        jac.append(g_i - g_last)
    return np.array(rows, dtype=float), np.array(jac, dtype=float)


def _equilibrated_cond(J: np.ndarray) -> float:
    r = np.max(np.abs(J), axis=1)
    r[r == 0] = 1.0
    A = J / r[:, None]
    cmax = np.max(np.abs(A), axis=0)
    cmax[cmax == 0] = 1.0
    return float(np.linalg.cond(A / cmax[None, :]))


def newton_solve(family, orders, x0, u: Optional[float] = None, tol: float = 1e-10,
                 cfg: Config = DEFAULT) -> np.ndarray:
    """Damped Newton; step halving up to ``cfg.newton_halvings`` times."""
    x = np.array(x0, dtype=float)
    F, J = event_system(family, orders, x, u)
    r = np.max(np.abs(F))
    for _ in range(cfg.newton_maxiter):
        if not np.all(np.isfinite(J)) or not np.all(np.isfinite(F)):
            raise NoConvergence("non-finite residual")
        cond = _equilibrated_cond(J)
        if cond > cfg.cond_max:
            raise DegenerateJacobian(f"condition number {cond:.3g}")
        dx = np.linalg.solve(J, -F)
        lam = 1.0
        for _ in range(cfg.newton_halvings + 1):
            x_new = x + lam * dx
            F_new, J_new = event_system(family, orders, x_new, u)
            r_new = np.max(np.abs(F_new))
            if r_new < r or r_new <= tol:
                break
            lam *= 0.5
        else:
            raise NoConvergence("damping failed to reduce the residual")
        x, F, J, r = x_new, F_new, J_new, r_new
        if r <= tol and np.max(np.abs(lam * dx)) <= 1e-9 * max(1.0, np.max(np.abs(x))):
            return x
    if r <= tol:
        return x
    raise NoConvergence(f"residual {r:.3g} after {cfg.newton_maxiter} iterations")


# -- events ----------------------------------------------------------------------

def _circ(a, b):
    d = abs(a - b) % TWO_PI
    return min(d, TWO_PI - d)


def verify_residual(family, kind: EventKind, u: float, ts: Sequence[float], c) -> float:
    """Max defining-equation residual recomputed through the contact module."""
    worst = 0.0
    fs = []
    for t, k in zip(ts, CONTACT_ORDERS[kind]):
        d = dist_sq_derivs(family, t, u, c)
        worst = max(worst, max(abs(v) for v in d.d[:k]))
        fs.append(d.f)
    worst = max([worst] + [abs(f - fs[-1]) for f in fs[:-1]])
    return worst


def solve_event(family, kind, seed, tol: Optional[float] = None, cfg: Config = DEFAULT,
                scale: Optional[float] = None, delta_diag: Optional[float] = None,
                classify_event: bool = True) -> TransitionEvent:
    """Converge a seed ``(t_params, c, u)`` onto an event of the given kind."""
    kind = EventKind(kind)
    orders = CONTACT_ORDERS[kind]
    ts0, c0, u0 = seed
    ts0 = list(np.atleast_1d(np.asarray(ts0, dtype=float)))
    if len(ts0) != len(orders):
        raise ValueError(f"{kind.value} needs {len(orders)} contact parameters")
    if scale is None:
        scale = curve_scale(family, float(u0))
    tol = cfg.residual_tol * scale * scale if tol is None else tol
    x = newton_solve(family, orders, [*ts0, *np.asarray(c0, dtype=float), float(u0)],
                     None, 1e-3 * tol, cfg)
    n = len(orders)
    ts = [float(t) % TWO_PI for t in x[:n]]
    c = MinkVec(x[n], x[n + 1])
    u = float(x[n + 2])
    delta = 4 * math.pi / cfg.grid_n if delta_diag is None else delta_diag
    for a in range(n):
        for b in range(a + 1, n):
            if _circ(ts[a], ts[b]) <= delta:
                raise NoConvergence("contacts collapsed onto each other")
    res = verify_residual(family, kind, u, ts, c)
    if res > tol:
        raise NoConvergence(f"verified residual {res:.3g} exceeds {tol:.3g}")
    ev = build_event(family, kind, u, ts, c, scale, cfg)
    ev.residual = res
    if classify_event:
        classify(ev)
    return ev


def build_event(family, kind: EventKind, u: float, ts: Sequence[float], c, scale: float,
                cfg: Config = DEFAULT) -> TransitionEvent:
    kind = EventKind(kind)
    c = MinkVec.of(c)
    fs = [dist_sq_derivs(family, t, u, c).f for t in ts]
    f = float(np.mean(fs))
    circle = PseudoCircle.through(c, f, scale, cfg.eps_light)
    flags = []
    contacts = []
    for t, k in zip(ts, CONTACT_ORDERS[kind]):
        try:
            cp = make_contact(family, t, u, circle, k, cfg.near_lightlike, cfg.eps_light)
        except NotOnCircle:
            cp = make_contact(family, t, u, None, k, cfg.near_lightlike, cfg.eps_light)
            flags.append("OffCircle")
        if cp.near_lightlike and "NearLightlike" not in flags:
            flags.append("NearLightlike")
        contacts.append(cp)
    # canonical labels by ascending t; the distinguished contact is found by order
    contacts.sort(key=lambda cp: cp.t)
    return TransitionEvent(kind, None, u, [cp.t for cp in contacts], c, f, circle, contacts, flags=flags)


# -- classifiers -------------------------------------------------------------------

def _require_branches(ev: TransitionEvent):
    if ev.circle.kind is CircleKind.LC:
        raise LightconeCircle("bitangent circle is the lightcone")
    if any(cp.branch is None for cp in ev.contacts):
        raise LightconeCircle("contact without branch label")


def oriented_tangents(ev: TransitionEvent) -> list[MinkVec]:
    return [circle_tangent(ev.circle, cp.point) for cp in ev.contacts]


def _inside(p, a, b, c) -> bool:
    d1, d2, d3 = det2(b - a, p - a), det2(c - b, p - b), det2(a - c, p - c)
    return (d1 > 0 and d2 > 0 and d3 > 0) or (d1 < 0 and d2 < 0 and d3 < 0)


def triangle_diagnostic(points: Sequence) -> dict:
    """q-vector determinant signs and point-in-triangle tests for four points."""
    g = [np.asarray(p, dtype=float) for p in points]
    q = [g[1] - g[2], g[2] - g[3], g[3] - g[0], g[0] - g[1]]
    dets = [float(np.sign(det2(q[i], q[(i + 1) % 4]))) for i in range(4)]
    inside = []
    for i in range(4):
        others = [g[j] for j in range(4) if j != i]
        inside.append(bool(_inside(g[i], *others)))
    return {"det_signs": dets, "inside": inside, "predicted": "a" if any(inside) else "b"}


def classify_a14(ev: TransitionEvent, strict: bool = False) -> str:
    """Odd number of contacts on each branch gives (a), even gives (b).

    The point-in-triangle diagnostic is recorded alongside; a disagreement is
    flagged (or raised with ``strict``) and the parity rule stands.
    """
    _require_branches(ev)
    n_plus = sum(cp.branch is Branch.PLUS for cp in ev.contacts)
    counts = (n_plus, len(ev.contacts) - n_plus)
    sub = "a" if counts[0] % 2 == 1 else "b"
    tri = triangle_diagnostic([cp.point for cp in ev.contacts])
    ev.evidence.branch_counts = counts
    ev.evidence.triangle_test = tri
    if tri["predicted"] != sub:
        if strict:
            raise CriterionConflict(f"parity says {sub}, triangle test says {tri['predicted']}")
        if "CriterionConflict" not in ev.flags:
            ev.flags.append("CriterionConflict")
    return sub


def classify_a22(ev: TransitionEvent, tol: float = 1e-8) -> str:
    """Moth (a) when ``kappa1' kappa2' > 0``, nib (b) when negative."""
    kps = [cp.kappa_prime for cp in ev.contacts]
    if any(cp.causal is CausalType.LIGHTLIKE or cp.near_lightlike for cp in ev.contacts) or None in kps:
        raise NonGeneric("A2^2 contact at a lightlike point")
    k1, k2 = kps
    ev.evidence.kappa_primes = (k1, k2)
    if abs(k1) <= tol or abs(k2) <= tol or abs(k1 + k2) <= tol:
        raise NonGeneric(f"kappa' genericity fails: {k1}, {k2}")
    return "a" if k1 * k2 > 0 else "b"


def _dot_side_expected(circle: PseudoCircle, same: bool) -> int:
    # spacelike tangents (H): same branch > 1, opposite < -1; timelike (S) reversed
    if circle.kind is CircleKind.H:
        return 1 if same else -1
    return -1 if same else 1


def classify_a12a2(ev: TransitionEvent) -> str:
    """(a) when the two A1 contacts share a branch, (b) otherwise."""
    _require_branches(ev)
    a2 = [cp for cp in ev.contacts if cp.order == 2]
    a1 = [cp for cp in ev.contacts if cp.order == 1]
    T1 = circle_tangent(ev.circle, a2[0].point)
    dots, consistent = [], []
    for cp in a1:
        d = float(mdot(T1, circle_tangent(ev.circle, cp.point)))
        dots.append(d)
        side = 1 if d > 1 else (-1 if d < -1 else 0)
        consistent.append(side == _dot_side_expected(ev.circle, cp.branch == a2[0].branch))
    ev.evidence.tangent_dots = dots
    ev.evidence.threshold_consistent = consistent
    ev.evidence.branch_counts = _counts(ev)
    return "a" if a1[0].branch == a1[1].branch else "b"


def classify_a1a3(ev: TransitionEvent) -> str:
    """(a) when the A1 and A3 contacts lie on different branches, (b) on the same."""
    _require_branches(ev)
    a3 = next(cp for cp in ev.contacts if cp.order == 3)
    a1 = next(cp for cp in ev.contacts if cp.order == 1)
    T1 = circle_tangent(ev.circle, a3.point)
    d = float(mdot(T1, circle_tangent(ev.circle, a1.point)))
    t11 = float(mdot(T1, T1))
    beta = 1 if t11 > 0 else 2
    ev.evidence.tangent_dots = [d]
    ev.evidence.sign_quantity = int(np.sign((-1) ** beta * (t11 - d)))
    side = 1 if d > 1 else (-1 if d < -1 else 0)
    ev.evidence.threshold_consistent = [side == _dot_side_expected(ev.circle, a1.branch == a3.branch)]
    ev.evidence.branch_counts = _counts(ev)
    return "b" if a1.branch == a3.branch else "a"


def classify_a4(ev: TransitionEvent) -> str:
    return "single"


def _counts(ev):
    n_plus = sum(cp.branch is Branch.PLUS for cp in ev.contacts)
    return (n_plus, len(ev.contacts) - n_plus)


_CLASSIFIERS = {
    EventKind.A1_4: classify_a14,
    EventKind.A2_2: classify_a22,
    EventKind.A1_2A2: classify_a12a2,
    EventKind.A1A3: classify_a1a3,
    EventKind.A4: classify_a4,
}


def classify(ev: TransitionEvent) -> TransitionEvent:
    """Set ``ev.subtype``; unclassifiable events keep ``None`` and gain a flag."""
    try:
        ev.subtype = _CLASSIFIERS[ev.kind](ev)
    except (LightconeCircle, NonGeneric) as exc:
        ev.subtype = None
        ev.flags.append(type(exc).__name__)
    return ev


def table_entry(ev: TransitionEvent) -> Optional[str]:
    """Row text of the Minkowski classification table for a classified event."""
    return TABLE.get((ev.kind, ev.subtype))


# -- scanning ----------------------------------------------------------------------

# orders of the fixed-u special points refined during a scan
_A2A1 = (2, 1)
_A1CUBED = (1, 1, 1)
_MATCH_RADIUS = 0.25


@dataclass
class Indicator:
    kind: EventKind
    ts: tuple[float, ...]
    center: np.ndarray
    value: float


@dataclass
class ScanResult:
    events: list[TransitionEvent]
    u_grid: list[float]
    failed_seeds: list[dict]


def _crit_many(ts, J, C, skip=(), exclude: float = 0.0):
    """Critical points of ``f_c`` for each row of ``C`` via sign changes of ``f'``.

    Returns per center ``(t, f)`` arrays, dropping roots within ``exclude`` of
    any parameter listed for that center in ``skip``.
    """
    C = np.atleast_2d(np.asarray(C, dtype=float))
    P = J[0][None, :, :] - C[:, None, :]
    fp = mdot(J[1][None], P)
    fv = mdot(P, P)
    nxt = np.roll(fp, -1, axis=1)
    fnxt = np.roll(fv, -1, axis=1)
    h = ts[1] - ts[0]
    out = []
    for r in range(len(C)):
        idx = np.nonzero(fp[r] * nxt[r] < 0)[0]
        w = fp[r, idx] / (fp[r, idx] - nxt[r, idx])
        t = np.mod(ts[idx] + w * h, TWO_PI)
        f = fv[r, idx] + w * (fnxt[r, idx] - fv[r, idx])
        keep = np.ones(len(t), dtype=bool)
        for s in (skip[r] if len(skip) else ()):
            d = np.abs(t - s) % TWO_PI
            keep &= np.minimum(d, TWO_PI - d) > exclude
        out.append((t[keep], f[keep]))
    return out


def _vertex_jet(J):
    """Vertex function and its t-derivative from a 4-jet."""
    d1, d2, d3, d4 = J[1], J[2], J[3], J[4]
    q, p = mdot(d1, d1), mdot(d1, d2)
    a, b = det2(d1, d3), det2(d1, d2)
    V = a * q - 3.0 * b * p
    Vt = (det2(d2, d3) + det2(d1, d4)) * q + 2.0 * a * p - 3.0 * (a * p + b * (mdot(d2, d2) + mdot(d1, d3)))
    return V, Vt


def _sign_roots(ts, v):
    """Linear-interpolated sign changes of periodic samples ``v`` on the grid ``ts``."""
    nxt = np.roll(v, -1)
    idx = np.nonzero(v * nxt < 0)[0]
    w = v[idx] / (v[idx] - nxt[idx])
    return np.mod(ts[idx] + w * (ts[1] - ts[0]), TWO_PI), idx, w


def _fixed_solve(family, orders, ts, c, u, cfg, scale, delta):
    try:
        x = newton_solve(family, orders, [*ts, *c], u, 1e-3 * cfg.residual_tol * scale * scale,
                         cfg.replace(newton_maxiter=15))
    except MinkError:
        return None
    n = len(orders)
    t = [float(v) % TWO_PI for v in x[:n]]
    if any(_circ(t[a], t[b]) <= delta for a in range(n) for b in range(a + 1, n)):
        return None
    return t, x[n:n + 2]


def _matched_sign_changes(ta, ga, tb, gb, h):
    """Critical points present at two neighbouring samples whose gap changes sign.

    Yields ``(t, w)`` with ``w`` the linear-interpolation weight of the zero.
    """
    if len(tb) == 0:
        return
    for x, t in enumerate(ta):
        dist = np.abs(tb - t) % TWO_PI
        dist = np.minimum(dist, TWO_PI - dist)
        y = int(np.argmin(dist))
        if dist[y] < 4 * h and ga[x] * gb[y] < 0:
            yield float(t), float(ga[x] / (ga[x] - gb[y]))


def _near_known(ts, found, radius: float = 0.02, ordered: bool = False) -> bool:
    key = list(ts) if ordered else sorted(ts)
    for t, _ in found:
        other = list(t) if ordered else sorted(t)
        if max(_circ(a, b) for a, b in zip(key, other)) < radius:
            return True
    return False


def _dedup_points(points, tol=1e-7):
    out = []
    for t, c in points:
        key = sorted(t)
        if not any(max(_circ(a, b) for a, b in zip(key, sorted(t2))) < tol for t2, _ in out):
            out.append((t, c))
    return out


def scan_indicators(family, u: float, cfg: Config = DEFAULT, kinds=None,
                    scale: Optional[float] = None) -> list[Indicator]:
    """Indicator values whose sign changes in ``u`` mark transition events.

    Each indicator is attached to a fixed-``u`` special configuration that
    moves continuously with ``u``: critical points of the vertex function (A4),
    vertices with a further critical point of the distance function (A1A3),
    caustic self-crossings (A2_2), A2A1 points with a third critical point
    (A1_2A2) and triple tangencies with a fourth one (A1_4).
    """
    kinds = set(EventKind) if kinds is None else {EventKind(k) for k in kinds}
    scale = curve_scale(family, u) if scale is None else scale
    n = 4 * cfg.scan_grid
    ts = np.linspace(0.0, TWO_PI, n, endpoint=False)
    J = family.jet(ts, u, 4)
    s2 = scale * scale
    delta = 4 * math.pi / cfg.scan_grid
    out: list[Indicator] = []
    from .contact import caustic_from_jet

    caus = caustic_from_jet(J)
    bend = det2(J[1], J[2])
    centroid = J[0].mean(axis=0)
    with np.errstate(invalid="ignore"):
        far = ~(np.hypot(*(caus - centroid).T) <= 50.0 * scale)

    if kinds & {EventKind.A4, EventKind.A1A3}:
        V, Vt = _vertex_jet(J)
        speed4 = float(np.max(np.einsum("ij,ij->i", J[1], J[1]))) ** 2
        if EventKind.A4 in kinds:
            tm, idx, w = _sign_roots(ts, Vt)
            for t in tm:
                Jt = family.jet(t, u, 4)
                v, _ = _vertex_jet(Jt)
                c = caustic_from_jet(Jt)
                if np.all(np.isfinite(c)):
                    out.append(Indicator(EventKind.A4, (float(t),), c, float(v) / speed4))
        if EventKind.A1A3 in kinds:
            tv, _, _ = _sign_roots(ts, V)
            if len(tv):
                Jv = family.jet(tv, u, 2)
                C = caustic_from_jet(Jv)
                ok = np.all(np.isfinite(C), axis=1)
                tv, C = tv[ok], C[ok]
                crit = _crit_many(ts, J, C, [[t] for t in tv], delta)
                for t, c, (tj, fj) in zip(tv, C, crit):
                    f0 = float(mdot(family.jet(t, u, 0)[0] - c, family.jet(t, u, 0)[0] - c))
                    for t2, f2 in zip(tj, fj):
                        out.append(Indicator(EventKind.A1A3, (float(t), float(t2)), c, (f0 - f2) / s2))

    if EventKind.A2_2 in kinds:
        seg_ok = ~(far | np.roll(far, -1)) & (bend * np.roll(bend, -1) > 0)
        A = caus
        B = np.roll(caus, -1, axis=0)
        ii = np.nonzero(seg_ok)[0]
        if len(ii) > 1:
            a, b = A[ii], B[ii]
            d = b - a
            I, K = np.triu_indices(len(ii), 2)
            den = det2(d[I], d[K])
            with np.errstate(divide="ignore", invalid="ignore"):
                r = det2(a[K] - a[I], d[K]) / den
                s = det2(a[K] - a[I], d[I]) / den
            hit = (den != 0) & (r >= 0) & (r < 1) & (s >= 0) & (s < 1)
            h = ts[1] - ts[0]
            for m in np.nonzero(hit)[0]:
                i, k = ii[I[m]], ii[K[m]]
                if min(abs(i - k), n - abs(i - k)) <= 2:
                    continue
                t1, t2 = ts[i] + r[m] * h, ts[k] + s[m] * h
                c = a[I[m]] + r[m] * d[I[m]]
                g1 = family.jet(t1, u, 0)[0] - c
                g2 = family.jet(t2, u, 0)[0] - c
                out.append(Indicator(EventKind.A2_2, (float(t1), float(t2)), c,
                                     float(mdot(g1, g1) - mdot(g2, g2)) / s2))

    if EventKind.A1_2A2 in kinds:
        good = ~far & np.all(np.isfinite(caus), axis=1)
        rows = np.nonzero(good)[0]
        crit = _crit_many(ts, J, caus[rows], [[ts[r]] for r in rows], delta)
        f_own = mdot(J[0][rows] - caus[rows], J[0][rows] - caus[rows])
        found = []
        for a in range(len(rows) - 1):
            if rows[a + 1] != rows[a] + 1:
                continue
            (ta, fa), (tb, fb) = crit[a], crit[a + 1]
            ga, gb = f_own[a] - fa, f_own[a + 1] - fb
            for t2, w in _matched_sign_changes(ta, ga, tb, gb, ts[1] - ts[0]):
                t1 = ts[rows[a]] + w * (ts[1] - ts[0])
                c = caus[rows[a]] + w * (caus[rows[a + 1]] - caus[rows[a]])
                if _near_known([t1, t2], found, ordered=True):
                    continue
                sol = _fixed_solve(family, _A2A1, [t1, t2], c, u, cfg, scale, delta)
                if sol is not None:
                    found.append(sol)
        pts = _dedup_points(found)
        if pts:
            crit3 = _crit_many(ts, J, np.array([c for _, c in pts]), [t for t, _ in pts], delta)
            for (t, c), (t3, f3) in zip(pts, crit3):
                g = family.jet(t[0], u, 0)[0] - c
                f0 = float(mdot(g, g))
                for tt, ff in zip(t3, f3):
                    out.append(Indicator(EventKind.A1_2A2, (t[0], t[1], float(tt)), c, (f0 - ff) / s2))

    if EventKind.A1_4 in kinds:
        out.extend(_a1_cubed_indicators(family, u, cfg, scale, ts, J, delta))
    return out


def _a1_cubed_indicators(family, u, cfg, scale, ts, J, delta):
    from .mss import trace_zero_set, _pair_values

    lines, _, _, _ = trace_zero_set(family, u, cfg.scan_grid, cfg, scale)
    found = []
    s2 = scale * scale
    h = ts[1] - ts[0]
    for line in lines:
        if len(line) < 2:
            continue
        C, _, _, _ = _pair_values(family, u, line[:, 0], line[:, 1])
        ok = np.all(np.isfinite(C), axis=1)
        crit = _crit_many(ts, J, np.where(ok[:, None], C, 0.0), [tuple(p) for p in line], delta)
        P = family.jet(line[:, 0], u, 0)[0] - C
        f0 = mdot(P, P)
        for k in range(len(line) - 1):
            if not (ok[k] and ok[k + 1]):
                continue
            (ta, fa), (tb, fb) = crit[k], crit[k + 1]
            for t3, _ in _matched_sign_changes(ta, fa - f0[k], tb, fb - f0[k + 1], h):
                seed = [line[k][0], line[k][1], t3]
                if _near_known(seed, found):
                    continue
                sol = _fixed_solve(family, _A1CUBED, seed, C[k], u, cfg, scale, delta)
                if sol is not None:
                    found.append(sol)
    out = []
    pts = _dedup_points([(sorted(t), c) for t, c in found])
    if pts:
        crit4 = _crit_many(ts, J, np.array([c for _, c in pts]), [t for t, _ in pts], delta)
        for (t, c), (t4, f4) in zip(pts, crit4):
            g = family.jet(t[0], u, 0)[0] - c
            f0 = float(mdot(g, g))
            for tt, ff in zip(t4, f4):
                out.append(Indicator(EventKind.A1_4, (*t, float(tt)), c, (ff - f0) / s2))
    return out


def _match(a: Indicator, pool: list[Indicator]) -> Optional[Indicator]:
    best, bd = None, _MATCH_RADIUS
    for b in pool:
        if b.kind is not a.kind or len(b.ts) != len(a.ts):
            continue
        d = max(_circ(x, y) for x, y in zip(a.ts, b.ts))
        if d < bd:
            best, bd = b, d
    return best


def _wrap_diff(a, b):
    return (b - a + math.pi) % TWO_PI - math.pi


def _seeds(prev, cur, u0, u1, thresh):
    seeds = []
    for a in prev:
        b = _match(a, cur)
        if b is None:
            continue
        if a.value * b.value < 0:
            w = a.value / (a.value - b.value)
        elif a.value == 0.0:
            w = 0.0
        elif abs(a.value) <= thresh and abs(a.value) <= abs(b.value):
            w = 0.0
        else:
            continue
        ts = [x + w * _wrap_diff(x, y) for x, y in zip(a.ts, b.ts)]
        c = a.center + w * (b.center - a.center)
        seeds.append((a.kind, ts, c, u0 + w * (u1 - u0)))
    return seeds


def _event_key(ev: TransitionEvent):
    return (ev.u_star, ev.kind.value, tuple(ev.t_params))


def scan_family_detailed(family, u_min: float, u_max: float, steps: Optional[int] = None,
                         grid_n: Optional[int] = None, cfg: Config = DEFAULT, kinds=None,
                         progress=None) -> ScanResult:
    """Scan ``[u_min, u_max]`` for transition events and solve each seed."""
    steps = cfg.scan_steps if steps is None else int(steps)
    if steps < 2:
        raise ValueError("steps must be >= 2")
    if not u_min < u_max:
        raise ValueError("u_min must be smaller than u_max")
    if grid_n is not None:
        cfg = cfg.replace(scan_grid=int(grid_n))
    us = np.linspace(u_min, u_max, steps)
    scale = curve_scale(family, 0.5 * (u_min + u_max))
    delta = 4 * math.pi / cfg.scan_grid
    thresh = 10.0 * cfg.residual_tol
    prev = None
    seeds = []
    for k, u in enumerate(us):
        cur = scan_indicators(family, float(u), cfg, kinds, scale)
        if prev is not None:
            seeds.extend(_seeds(prev, cur, float(us[k - 1]), float(u), thresh))
        prev = cur
        if progress is not None:
            progress(k, float(u))

    events: list[TransitionEvent] = []
    failed = []
    tol = cfg.residual_tol * scale * scale
    for kind, ts, c, u in seeds:
        try:
            ev = solve_event(family, kind, (ts, c, u), tol, cfg, scale, delta)
        except MinkError as exc:
            failed.append({"kind": kind.value, "u": float(u), "t_params": [float(t) for t in ts],
                           "reason": type(exc).__name__})
            continue
        if not (u_min <= ev.u_star <= u_max):
            continue
        dup = any(
            e.kind is ev.kind and abs(e.u_star - ev.u_star) <= cfg.dedup_u
            and math.dist(tuple(e.center), tuple(ev.center)) <= cfg.dedup_c * scale
            for e in events
        )
        if not dup:
            events.append(ev)
    events.sort(key=_event_key)
    return ScanResult(events, [float(u) for u in us], failed)


def scan_family(family, u_min: float, u_max: float, steps: Optional[int] = None,
                grid_n: Optional[int] = None, cfg: Config = DEFAULT, kinds=None) -> list[TransitionEvent]:
    return scan_family_detailed(family, u_min, u_max, steps, grid_n, cfg, kinds).events
