"""Minkowski symmetry set: bitangent pseudo-circles traced on the parameter torus.

A pair ``(t1, t2)`` is bitangent when the pseudo-normal lines at the two
parameters meet in a center ``c`` with ``f(t1, c) = f(t2, c)``.  The residual
``g = f(t1, c) - f(t2, c)`` is contoured on the unordered-pair torus
``{t1 < t2}`` whose edge ``t1 = 0`` is glued to ``t2 = 2pi``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .config import DEFAULT, Config
from .contact import ContactPoint, _derivs_from_jet, contact_order, make_contact
from .curves import TWO_PI, curve_scale, lightlike_points
from .errors import Ambiguous, NotOnCircle, ParallelNormals
from .minkowski import CircleKind, MinkVec, PseudoCircle, mdot

LABELS = ("A1A1", "A2A1", "A3", "A1cubed", "NearLightlike", "NearDiagonal")


@dataclass(frozen=True)
class MssPoint:
    t1: float
    t2: float
    center: MinkVec
    f_value: float
    circle: PseudoCircle
    contacts: tuple[ContactPoint, ...]
    local_label: str = "A1A1"
    medial_flag: bool = False
    flags: tuple[str, ...] = ()


@dataclass
class MssBranch:
    points: list[MssPoint]
    closed: bool = False


@dataclass
class MaskInfo:
    count: int = 0
    by_reason: dict = field(default_factory=dict)
    boxes: list = field(default_factory=list)  # [t1_min, t1_max, t2_min, t2_max]


@dataclass
class TraceResult:
    branches: list[MssBranch]
    masked: MaskInfo
    grid_n: int
    scale: float


# -- pointwise ---------------------------------------------------------------

def _normal_centers(g1, d1, g2, d2):
    """Intersection of the pseudo-normal lines; also returns the determinant."""
    r1 = mdot(d1, g1)
    r2 = mdot(d2, g2)
    det = -d1[..., 0] * d2[..., 1] + d1[..., 1] * d2[..., 0]
    with np.errstate(divide="ignore", invalid="ignore"):
        c0 = (r1 * d2[..., 1] - d1[..., 1] * r2) / det
        c1 = (-d1[..., 0] * r2 + d2[..., 0] * r1) / det
    return np.stack([c0, c1], axis=-1), det


def _pair_values(curve, u, t1, t2):
    """Centers, determinants and residuals for arrays of parameter pairs."""
    J1 = curve.jet(t1, u, 1)
    J2 = curve.jet(t2, u, 1)
    c, det = _normal_centers(J1[0], J1[1], J2[0], J2[1])
    p1 = J1[0] - c
    p2 = J2[0] - c
    g = mdot(p1, p1) - mdot(p2, p2)
    speeds = np.hypot(J1[1][..., 0], J1[1][..., 1]) * np.hypot(J2[1][..., 0], J2[1][..., 1])
    return c, det, speeds, g


def normal_center(curve, t1: float, t2: float, u: float = 0.0, tol: float = 1e-9) -> MinkVec:
    c, det, speeds, _ = _pair_values(curve, u, np.float64(t1), np.float64(t2))
    if not abs(det) > tol * speeds:
        raise ParallelNormals(f"normals at {t1} and {t2} are parallel (det={det})")
    return MinkVec.of(c)


def bitangency_residual(curve, t1: float, t2: float, u: float = 0.0, tol: float = 1e-9) -> float:
    """``f(t1, c) - f(t2, c)`` with ``c`` the normal-line intersection; antisymmetric."""
    c, det, speeds, g = _pair_values(curve, u, np.float64(t1), np.float64(t2))
    if not abs(det) > tol * speeds:
        raise ParallelNormals(f"normals at {t1} and {t2} are parallel (det={det})")
    return float(g)


# -- grid evaluation -----------------------------------------------------------

def _circ_index_dist(i, j, n):
    d = np.abs(np.asarray(i) - np.asarray(j)) % n
    return np.minimum(d, n - d)


@dataclass
class _Grid:
    n: int
    ts: np.ndarray
    g: np.ndarray       # (n, n), g[i, j] = residual at (t_i, t_j)
    det: np.ndarray
    valid: np.ndarray   # vertex evaluable (off diagonal band, finite, not parallel, not far)
    reason: np.ndarray  # 0 ok, 1 diagonal, 2 parallel, 3 far
    scale: float
    centroid: np.ndarray
    light_rows: np.ndarray  # interval [t_i, t_i+h] contains a lightlike root


def evaluate_grid(curve, u: float, n: int, cfg: Config = DEFAULT, scale: Optional[float] = None) -> _Grid:
    ts = np.arange(n) * (TWO_PI / n)
    J = curve.jet(ts, u, 1)
    if scale is None:
        scale = curve_scale(curve, u)
    centroid = curve.jet(np.linspace(0, TWO_PI, 1024, endpoint=False), u, 0)[0].mean(axis=0)
    c, det = _normal_centers(J[0][:, None], J[1][:, None], J[0][None, :], J[1][None, :])
    with np.errstate(invalid="ignore", over="ignore"):
        p1 = J[0][:, None] - c
        p2 = J[0][None, :] - c
        g = mdot(p1, p1) - mdot(p2, p2)
        far = np.hypot(*(c - centroid).transpose(2, 0, 1)) > cfg.center_cap * scale
    speed = np.hypot(J[1][:, 0], J[1][:, 1])
    reason = np.zeros((n, n), dtype=np.int8)
    idx = np.arange(n)
    reason[~np.isfinite(g) | far] = 3
    reason[np.abs(det) <= cfg.parallel_tol * np.outer(speed, speed)] = 2
    reason[_circ_index_dist(idx[:, None], idx[None, :], n) <= 2] = 1
    valid = reason == 0
    light = np.zeros(n, dtype=bool)
    for r in lightlike_points(curve, u, max(cfg.lightlike_grid, n)):
        light[int(math.floor(r / (TWO_PI / n))) % n] = True
    return _Grid(n, ts, g, det, valid, reason, float(scale), centroid, light)


def residual_map(curve, u: float, n: int, cfg: Config = DEFAULT):
    """Dense residual on the grid with non-evaluable vertices set to NaN.

    Returns ``(ts, g, det)``; ``g[i, j]`` is the residual at ``(t_i, t_j)``.
    """
    grid = evaluate_grid(curve, u, n, cfg)
    g = np.where(grid.valid, grid.g, np.nan)
    return grid.ts, g, grid.det


# -- marching squares on the glued domain ------------------------------------

# corners: 0=(i,j) 1=(i+1,j) 2=(i+1,j+1) 3=(i,j+1); edge e joins corners e and e+1
_EDGE_CORNERS = ((0, 1), (1, 2), (2, 3), (3, 0))
_CORNER_OFF = ((0, 0), (1, 0), (1, 1), (0, 1))


def _vkey(a, b, n):
    a, b = a % n, b % n
    return (a, b) if a <= b else (b, a)


def _cell_masks(grid: _Grid):
    """Per-cell status for cells ``(i, j)``: 0 ok, >0 masked reason, -1 outside the domain.

    Outside means ``j <= i`` or a corner inside the diagonal band.
    """
    n = grid.n
    i = np.arange(n)[:, None]
    j = np.arange(n)[None, :]
    ip, jp = (i + 1) % n, (j + 1) % n
    corner_reason = [grid.reason, grid.reason[ip, j], grid.reason[ip, jp], grid.reason[i, jp]]
    diag = np.logical_or.reduce([r == 1 for r in corner_reason])
    bad = np.maximum.reduce(corner_reason)
    sgn = np.sign(grid.det)
    pole = (sgn != sgn[ip, j]) | (sgn != sgn[ip, jp]) | (sgn != sgn[i, jp])
    light = grid.light_rows[:, None] | grid.light_rows[None, :]
    status = np.zeros((n, n), dtype=np.int8)
    status[light] = 5
    status[pole] = 4
    status[bad > 1] = 10 + bad[bad > 1]
    status[(j <= i) | diag] = -1
    return status


MASK_REASONS = {4: "pole", 5: "lightlike", 12: "parallel", 13: "far"}


def _mask_info(status: np.ndarray, n: int) -> MaskInfo:
    from scipy import ndimage

    masked = status > 0
    info = MaskInfo(count=int(masked.sum()))
    for code, name in MASK_REASONS.items():
        k = int((status == code).sum())
        if k:
            info.by_reason[name] = k
    h = TWO_PI / n
    labels, _ = ndimage.label(masked)
    for sl in ndimage.find_objects(labels):
        if sl is None:
            continue
        rs, cs = sl
        info.boxes.append([rs.start * h, rs.stop * h, cs.start * h, cs.stop * h])
    return info


def _bisect_edges(curve, u, a, b, ga, iters: int = 64):
    """Vectorised bisection of ``g`` along segments ``a -> b`` in (t1, t2)."""
    lo = np.zeros(len(a))
    hi = np.ones(len(a))
    sa = ga >= 0
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        p = a + mid[:, None] * (b - a)
        _, _, _, g = _pair_values(curve, u, p[:, 0], p[:, 1])
        same = (g >= 0) == sa
        lo = np.where(same, mid, lo)
        hi = np.where(same, hi, mid)
        if np.all(hi - lo < 1e-17):
            break
    p_lo = a + lo[:, None] * (b - a)
    p_hi = a + hi[:, None] * (b - a)
    _, _, _, g_lo = _pair_values(curve, u, p_lo[:, 0], p_lo[:, 1])
    _, _, _, g_hi = _pair_values(curve, u, p_hi[:, 0], p_hi[:, 1])
    return np.where((np.abs(g_lo) <= np.abs(g_hi))[:, None], p_lo, p_hi)


def trace_zero_set(curve, u: float = 0.0, grid_n: int = 512, cfg: Config = DEFAULT,
                   scale: Optional[float] = None):
    """Polylines of ``{g = 0}`` in canonical ``(t1, t2)``, ``t1 < t2``.

    Returns ``(polylines, closed_flags, mask_info, grid)``.  Cells are visited
    in row-major order so output is independent of evaluation order.
    """
    n = grid_n
    if n < 64:
        raise ValueError("grid_n must be >= 64")
    grid = evaluate_grid(curve, u, n, cfg, scale)
    status = _cell_masks(grid)
    h = TWO_PI / n
    gv = grid.g

    edges: dict = {}     # edge key -> (ordered start index pair, ordered end index pair)
    segments: list = []  # pairs of edge keys
    saddle_cells = []
    pos_all = gv >= 0
    ii = np.arange(n)
    mixed = ((pos_all != pos_all[(ii + 1) % n, :]) | (pos_all != pos_all[:, (ii + 1) % n])
             | (pos_all != pos_all[(ii + 1) % n][:, (ii + 1) % n]))
    cells = np.argwhere((status == 0) & mixed)
    for i, j in cells:
        corner = [(i + di, j + dj) for di, dj in _CORNER_OFF]
        vals = [gv[a % n, b % n] for a, b in corner]
        pos = [v >= 0 for v in vals]
        crossing = [e for e, (p, q) in enumerate(_EDGE_CORNERS) if pos[p] != pos[q]]
        if not crossing:
            continue
        keys = []
        for e in crossing:
            p, q = _EDGE_CORNERS[e]
            k = tuple(sorted((_vkey(*corner[p], n), _vkey(*corner[q], n))))
            if k not in edges:
                edges[k] = (corner[p], corner[q], vals[p])
            keys.append(k)
        if len(crossing) == 2:
            segments.append((keys[0], keys[1]))
        else:
            saddle_cells.append((len(segments), i, j, pos[0], keys))
            segments.append(None)

    if saddle_cells:
        centers = np.array([[(i + 0.5) * h, (j + 0.5) * h] for _, i, j, _, _ in saddle_cells])
        _, _, _, gc = _pair_values(curve, u, centers[:, 0], centers[:, 1])
        for (slot, i, j, pos0, keys), gcen in zip(saddle_cells, gc):
            e0, e1, e2, e3 = keys
            if (gcen >= 0) == pos0:
                segments[slot] = (e0, e1)
                segments.append((e2, e3))
            else:
                segments[slot] = (e3, e0)
                segments.append((e1, e2))

    keys = list(edges)
    if keys:
        a = np.array([edges[k][0] for k in keys], dtype=float) * h
        b = np.array([edges[k][1] for k in keys], dtype=float) * h
        ga = np.array([edges[k][2] for k in keys])
        pts = _bisect_edges(curve, u, a, b, ga)
        pts = np.mod(pts, TWO_PI)
        pts = np.sort(pts, axis=1)
    else:
        pts = np.zeros((0, 2))
    where = {k: idx for idx, k in enumerate(keys)}

    polylines, closed = _assemble(segments, where)
    lines = [pts[np.array(pl)] for pl in polylines]
    return lines, closed, _mask_info(status, n), grid


def _assemble(segments, where):
    adj: dict = {}
    for s, seg in enumerate(segments):
        for k in seg:
            adj.setdefault(k, []).append(s)
    used = [False] * len(segments)
    polylines, closed = [], []

    def walk(start_seg, start_key):
        chain = [start_key]
        s, k = start_seg, start_key
        while True:
            used[s] = True
            a, b = segments[s]
            k = b if a == k else a
            chain.append(k)
            nxt = [x for x in adj[k] if not used[x]]
            if not nxt:
                return chain, False
            s = nxt[0]
            if k == start_key:
                return chain, True

    ends = sorted(k for k, v in adj.items() if len(v) == 1)
    order = [(adj[k][0], k) for k in ends] + [(s, segments[s][0]) for s in range(len(segments))]
    for s, k in order:
        if used[s]:
            continue
        chain, is_closed = walk(s, k)
        if chain[0] == chain[-1] and len(chain) > 2:
            is_closed = True
            chain = chain[:-1]
        polylines.append([where[x] for x in chain])
        closed.append(is_closed)
    return polylines, closed


# -- lifting -------------------------------------------------------------------

class CriticalPoints:
    """Global enumeration of critical points of ``f_c`` for a fixed curve."""

    def __init__(self, curve, u: float, n: int = 1024):
        self.curve, self.u, self.n = curve, u, n
        self.ts = np.linspace(0.0, TWO_PI, n, endpoint=False)
        self.J = curve.jet(self.ts, u, 1)

    def find(self, c, polish: int = 3):
        """Parameters ``t`` with ``f_c'(t) = 0`` and their values ``f_c(t)``."""
        c = np.asarray(c, dtype=float)
        fp = mdot(self.J[1], self.J[0] - c)
        nxt = np.roll(fp, -1)
        idx = np.nonzero((fp == 0) | (fp * nxt < 0))[0]
        if len(idx) == 0:
            return np.zeros(0), np.zeros(0)
        h = TWO_PI / self.n
        with np.errstate(divide="ignore", invalid="ignore"):
            frac = np.where(fp[idx] == nxt[idx], 0.0, fp[idx] / (fp[idx] - nxt[idx]))
        t = self.ts[idx] + frac * h
        lo, hi = self.ts[idx], self.ts[idx] + h
        for _ in range(polish):
            J = self.curve.jet(t, self.u, 2)
            P = J[0] - c
            d1 = mdot(J[1], P)
            d2 = mdot(J[2], P) + mdot(J[1], J[1])
            with np.errstate(divide="ignore", invalid="ignore"):
                step = np.where(d2 != 0, d1 / d2, 0.0)
            t = np.clip(t - step, lo, hi)
        P = self.curve.jet(t, self.u, 0)[0] - c
        return np.mod(t, TWO_PI), mdot(P, P)


def _circ(a, b):
    d = abs(a - b) % TWO_PI
    return min(d, TWO_PI - d)


def pair_distance(p, q) -> float:
    """Distance between unordered parameter pairs on the torus."""
    def d(a, b):
        return math.hypot(_circ(a[0], b[0]), _circ(a[1], b[1]))
    return min(d(p, q), d(p, (q[1], q[0])))


def make_mss_point(curve, u: float, t1: float, t2: float, scale: float, cfg: Config = DEFAULT,
                   crit: Optional[CriticalPoints] = None, label: bool = True) -> MssPoint:
    t1, t2 = sorted((float(t1) % TWO_PI, float(t2) % TWO_PI))
    c = normal_center(curve, t1, t2, u, cfg.parallel_tol)
    f1 = _f_at(curve, u, t1, c)
    f2 = _f_at(curve, u, t2, c)
    f = 0.5 * (f1 + f2)
    circle = PseudoCircle.through(c, f, scale, cfg.eps_light)
    flags = []
    contacts = []
    for t in (t1, t2):
        try:
            k = contact_order(curve, t, u, c, cfg.tol)
        except Ambiguous:
            k = 1
            flags.append("NearTransition")
        try:
            contacts.append(make_contact(curve, t, u, circle, k or 1, cfg.near_lightlike, cfg.eps_light))
        except NotOnCircle:
            contacts.append(make_contact(curve, t, u, None, k or 1, cfg.near_lightlike, cfg.eps_light))
            flags.append("OffCircle")
    p = MssPoint(t1, t2, c, f, circle, tuple(contacts), "A1A1", False, tuple(flags))
    if not label:
        return p
    lab = label_mss_point(curve, u, p, cfg, crit)
    med = medial_flag(p)
    extra = list(p.flags)
    if circle.kind is CircleKind.LC and "NearLightlike" not in extra:
        extra.append("NearLightlike")
    return MssPoint(t1, t2, c, f, circle, p.contacts, lab, med, tuple(extra))


def _f_at(curve, u, t, c):
    p = curve.jet(float(t), u, 0)[0] - np.asarray(c)
    return float(mdot(p, p))


def label_mss_point(curve, u: float, p: MssPoint, cfg: Config = DEFAULT,
                    crit: Optional[CriticalPoints] = None) -> str:
    """Local type of a traced point: A1A1, A2A1, A3, A1cubed or a near-degeneracy flag."""
    if p.circle.kind is CircleKind.LC or any(cp.near_lightlike for cp in p.contacts):
        return "NearLightlike"
    if _circ(p.t1, p.t2) <= 2 * TWO_PI / max(cfg.grid_n, 64):
        return "NearDiagonal"
    orders = [cp.order for cp in p.contacts]
    if 3 in orders:
        return "A3"
    if orders.count(2) == 1:
        return "A2A1"
    crit = crit or CriticalPoints(curve, u, cfg.t_samples)
    ts, fs = crit.find(p.center)
    sep = 4 * TWO_PI / crit.n
    # near an A3 endpoint the critical point between two close contacts has a tiny gap
    short = _circ(p.t1, p.t2) <= 8 * sep
    for t3, f3 in zip(ts, fs):
        if _circ(t3, p.t1) <= sep or _circ(t3, p.t2) <= sep:
            continue
        if short and _circ(t3, p.t1) + _circ(t3, p.t2) <= _circ(p.t1, p.t2) + 1e-12:
            continue
        if abs(f3 - p.f_value) <= cfg.tol * max(1.0, abs(p.f_value)):
            return "A1cubed"
    return "A1A1"


def medial_flag(p: MssPoint) -> bool:
    """All contacts on one branch of the bitangent pseudo-circle (false on the lightcone)."""
    if p.circle.kind is CircleKind.LC:
        return False
    branches = {cp.branch for cp in p.contacts}
    return None not in branches and len(branches) == 1


def trace_mss(curve, u: float = 0.0, grid_n: int = 512, tol: Optional[float] = None,
              cfg: Config = DEFAULT, label: bool = True) -> TraceResult:
    """Trace all MSS branches; masked cells are reported, not guessed through."""
    if tol is not None:
        cfg = cfg.replace(tol=tol)
    cfg = cfg.replace(grid_n=grid_n)
    scale = curve_scale(curve, u)
    lines, closed, mask, _ = trace_zero_set(curve, u, grid_n, cfg, scale)
    crit = CriticalPoints(curve, u, cfg.t_samples) if label else None
    branches = []
    for pts, cl in zip(lines, closed):
        mps = []
        for t1, t2 in pts:
            try:
                mps.append(make_mss_point(curve, u, t1, t2, scale, cfg, crit, label))
            except ParallelNormals:
                continue
        if mps:
            branches.append(MssBranch(mps, cl))
    return TraceResult(branches, mask, grid_n, scale)


def b2_residuals(curve, u: float, p: MssPoint) -> tuple[float, float, float]:
    """Independent recomputation of ``|f'(t1)|, |f'(t2)|, |f(t1) - f(t2)|``."""
    J1 = curve.jet(p.t1, u, 1)
    J2 = curve.jet(p.t2, u, 1)
    v1 = _derivs_from_jet(J1, p.center, 1)
    v2 = _derivs_from_jet(J2, p.center, 1)
    return abs(float(v1[1])), abs(float(v2[1])), abs(float(v1[0] - v2[0]))
