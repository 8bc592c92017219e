"""JSON report assembly for analyses, scans and the dense oracle dump.

Floats are written with Python's shortest round-trip ``repr`` so a report
parses back to exactly the numbers that were computed.
"""

from __future__ import annotations

import io
import json
import math
from importlib import resources
from typing import Any, Optional

import numpy as np

from .config import DEFAULT, Config
from .contact import ContactPoint, caustic_from_jet
from .curves import TWO_PI, curve_scale, lightlike_points
from .errors import InputError
from .minkowski import PseudoCircle, det2
from .mss import TraceResult, evaluate_grid, trace_mss
from .transitions import ScanResult, TransitionEvent, table_entry

# caustic samples farther than this many curve scales from the centroid are dropped
CAUSTIC_CAP = 10.0


def _num(x: float) -> float:
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"non-finite value {x} in report")
    return x


def _xy(v) -> list[float]:
    a = np.asarray(v, dtype=float)
    return [_num(a[0]), _num(a[1])]


def circle_dict(pc: PseudoCircle) -> dict:
    return {"kind": pc.kind.value, "center": _xy(pc.center), "r2": _num(pc.r2)}


def contact_dict(cp: ContactPoint) -> dict:
    return {
        "t": _num(cp.t),
        "order": cp.order,
        "point": _xy(cp.point),
        "causal": cp.causal.value,
        "kappa": None if cp.kappa is None else _num(cp.kappa),
        "kappa_prime": None if cp.kappa_prime is None else _num(cp.kappa_prime),
        "branch": None if cp.branch is None else cp.branch.value,
        "near_lightlike": cp.near_lightlike,
    }


def curve_polyline(curve, u: float, n: int) -> list[list[float]]:
    ts = np.linspace(0.0, TWO_PI, n, endpoint=False)
    return [_xy(p) for p in curve.jet(ts, u, 0)[0]]


def caustic_polyline(curve, u: float, n: int, scale: float) -> list[Optional[list[float]]]:
    """Caustic samples; ``None`` marks a pen-up at poles and far excursions."""
    ts = np.linspace(0.0, TWO_PI, n, endpoint=False)
    J = curve.jet(ts, u, 2)
    C = caustic_from_jet(J)
    bend = det2(J[1], J[2])
    centroid = J[0].mean(axis=0)
    with np.errstate(invalid="ignore"):
        ok = np.all(np.isfinite(C), axis=1) & (np.hypot(*(C - centroid).T) <= CAUSTIC_CAP * scale)
    out: list[Optional[list[float]]] = []
    for i in range(n + 1):
        k = i % n
        if i > 0 and (not ok[k] or np.sign(bend[k]) != np.sign(bend[i - 1])):
            if out and out[-1] is not None:
                out.append(None)
        if ok[k]:
            out.append(_xy(C[k]))
    while out and out[-1] is None:
        out.pop()
    return out


def mss_records(trace: TraceResult) -> list[list[dict]]:
    branches = []
    for br in trace.branches:
        recs = []
        for p in br.points:
            recs.append({
                "t1": _num(p.t1),
                "t2": _num(p.t2),
                "center": _xy(p.center),
                "f": _num(p.f_value),
                "kind": p.circle.kind.value,
                "label": p.local_label,
                "medial": p.medial_flag,
                "flags": list(p.flags),
            })
        branches.append(recs)
    return branches


def build_analysis(family, u: float, cfg: Config = DEFAULT) -> dict:
    """AnalysisReport as a plain dict, ready for :func:`dumps`."""
    scale = curve_scale(family, u)
    trace = trace_mss(family, u, cfg.grid_n, cfg=cfg)
    ll = lightlike_points(family, u, cfg.lightlike_grid)
    pts = family.jet(np.asarray(ll, dtype=float), u, 0)[0] if ll else np.zeros((0, 2))
    return {
        "curve_name": family.name,
        "u": _num(u),
        "mss_branches": mss_records(trace),
        "mss_closed": [br.closed for br in trace.branches],
        "caustic_polyline": caustic_polyline(family, u, cfg.t_samples, scale),
        "curve_polyline": curve_polyline(family, u, cfg.t_samples),
        "lightlike_ts": [_num(t) for t in ll],
        "lightlike_points": [_xy(p) for p in pts],
        "masked_cells": {
            "count": trace.masked.count,
            "by_reason": dict(sorted(trace.masked.by_reason.items())),
            "boxes": [[_num(x) for x in b] for b in trace.masked.boxes],
        },
        "scale": _num(scale),
        "config_echo": cfg.as_dict(),
    }


def event_dict(ev: TransitionEvent) -> dict:
    evd: dict[str, Any] = {}
    e = ev.evidence
    if e.branch_counts is not None:
        evd["branch_counts"] = list(e.branch_counts)
    if e.kappa_primes is not None:
        evd["kappa_primes"] = [_num(k) for k in e.kappa_primes]
    if e.tangent_dots is not None:
        evd["tangent_dots"] = [_num(d) for d in e.tangent_dots]
    if e.triangle_test is not None:
        evd["triangle_test"] = {
            "inside": list(e.triangle_test["inside"]),
            "det_signs": [int(s) for s in e.triangle_test["det_signs"]],
            "predicted": e.triangle_test["predicted"],
        }
    if e.sign_quantity is not None:
        evd["sign_quantity"] = e.sign_quantity
    if e.threshold_consistent is not None:
        evd["threshold_consistent"] = list(e.threshold_consistent)
    return {
        "kind": ev.kind.value,
        "subtype": ev.subtype,
        "table_entry": table_entry(ev),
        "u_star": _num(ev.u_star),
        "t_params": [_num(t) for t in ev.t_params],
        "center": _xy(ev.center),
        "f_value": _num(ev.f_value),
        "circle": circle_dict(ev.circle),
        "contacts": [contact_dict(cp) for cp in ev.contacts],
        "evidence": evd,
        "residual": _num(ev.residual),
        "flags": list(ev.flags),
    }


def build_event_report(family, result: ScanResult, u_min: float, u_max: float,
                       steps: int, cfg: Config = DEFAULT) -> dict:
    return {
        "curve_name": family.name,
        "u_min": _num(u_min),
        "u_max": _num(u_max),
        "steps": int(steps),
        "u_grid": [_num(u) for u in result.u_grid],
        "events": [event_dict(ev) for ev in sorted(result.events, key=lambda e: e.u_star)],
        "failed_seeds": [
            {"kind": s["kind"], "u": _num(s["u"]), "t_params": [_num(t) for t in s["t_params"]],
             "reason": s["reason"]}
            for s in result.failed_seeds
        ],
        "config_echo": cfg.as_dict(),
    }


def oracle_csv(family, u: float, grid_n: int, cfg: Config = DEFAULT) -> str:
    """Dense ``t1,t2,g`` dump over grid vertices with ``t1 < t2`` off the diagonal band.

    Vertices whose normals are parallel or whose center is too far emit ``nan``.
    """
    grid = evaluate_grid(family, u, grid_n, cfg)
    buf = io.StringIO()
    buf.write("t1,t2,g\n")
    ts = grid.ts
    for i in range(grid_n):
        for j in range(i + 1, grid_n):
            r = grid.reason[i, j]
            if r == 1:
                continue
            g = repr(float(grid.g[i, j])) if r == 0 else "nan"
            buf.write(f"{float(ts[i])!r},{float(ts[j])!r},{g}\n")
    return buf.getvalue()


def dumps(report: dict) -> str:
    return json.dumps(report, indent=1, allow_nan=False) + "\n"


def load_schema(name: str) -> dict:
    text = resources.files("minkss").joinpath("schemas", f"{name}.schema.json").read_text(encoding="utf-8")
    return json.loads(text)


def validate(report: Any, name: str) -> None:
    """Raise :class:`InputError` if ``report`` does not match the named schema."""
    import jsonschema

    try:
        jsonschema.validate(report, load_schema(name))
    except jsonschema.ValidationError as exc:
        raise InputError(f"{name} does not match its schema: {exc.message}") from exc
