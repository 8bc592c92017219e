import dataclasses
import itertools
import math

import numpy as np
import pytest

import constructions as C
from minkss.contact import contact_order, make_contact
from minkss.curves import PseudoCircleArc, load_curve
from minkss.errors import CriterionConflict, DegenerateJacobian, NonGeneric, NoConvergence
from minkss.minkowski import Branch, CircleKind, PseudoCircle
from minkss.transitions import (
    CONTACT_ORDERS,
    EventKind,
    TABLE,
    TransitionEvent,
    classify,
    classify_a14,
    classify_a22,
    event_system,
    scan_family,
    scan_family_detailed,
    solve_event,
    table_entry,
)

P, M = Branch.PLUS, Branch.MINUS
H = PseudoCircle(CircleKind.H, (0.1, -0.2), -1.5)
S = PseudoCircle(CircleKind.S, (-0.3, 0.4), 0.8)


def synthetic(kind, circle, placements, kappa_primes=None):
    """Event whose contacts are exact points of ``circle``.

    ``placements`` lists ``(branch, theta, order)``; ``theta`` is the
    hyperbolic angle of the branch parametrisation and also the contact ``t``.
    """
    contacts = [make_contact(PseudoCircleArc(circle, b), th, 0.0, circle, k) for b, th, k in placements]
    if kappa_primes is not None:
        contacts = [dataclasses.replace(cp, kappa_prime=kp) for cp, kp in zip(contacts, kappa_primes)]
    return TransitionEvent(EventKind(kind), None, 0.0, [cp.t for cp in contacts], circle.center,
                           circle.r2, circle, contacts)


def solve_planted(construction, kind, offset=1e-2):
    d = construction()
    fam = C.to_family(d["spec"])
    seed = (np.array(d["t"]) + offset, np.array(d["c"]) + offset, d["u"] + offset)
    return d, fam, solve_event(fam, kind, seed)


def circ(a, b):
    x = abs(a - b) % (2 * math.pi)
    return min(x, 2 * math.pi - x)


# -- defining systems -------------------------------------------------------------

@pytest.mark.parametrize("kind", list(EventKind))
def test_system_is_square_with_correct_jacobian(kind):
    fam = C.to_family(C.a14_construction()["spec"])
    orders = CONTACT_ORDERS[kind]
    n = len(orders)
    x = np.array([0.3 + 1.4 * i for i in range(n)] + [0.1, -0.2, 0.05])
    F, J = event_system(fam, orders, x)
    assert J.shape == (len(x), len(x)) == (len(F), len(x))
    h = 1e-6
    for j in range(len(x)):
        e = np.zeros(len(x))
        e[j] = h
        fd = (event_system(fam, orders, x + e)[0] - event_system(fam, orders, x - e)[0]) / (2 * h)
        np.testing.assert_allclose(J[:, j], fd, rtol=1e-5, atol=1e-7)


def test_system_residual_matches_oracle():
    d = C.a22_construction()
    fam = C.to_family(d["spec"])
    x = np.array([*d["t"], *d["c"], 0.0])
    F, _ = event_system(fam, CONTACT_ORDERS[EventKind.A2_2], x)
    assert np.max(np.abs(F)) <= 1e-12
    assert C.defining_residual(d["spec"], (2, 2), 0.0, d["t"], d["c"]) <= 1e-12


# -- solving planted events ---------------------------------------------------------

def test_solve_a4():
    d, fam, ev = solve_planted(C.a4_construction, "A4")
    assert abs(ev.u_star - d["u"]) <= 1e-8
    assert ev.t_params[0] == pytest.approx(d["t"][0], abs=1e-8)
    np.testing.assert_allclose(np.asarray(ev.center), d["c"], atol=1e-8)
    assert C.defining_residual(d["spec"], (4,), ev.u_star, ev.t_params, ev.center) <= 1e-8
    assert ev.subtype == "single" and table_entry(ev) == TABLE[(EventKind.A4, "single")]
    assert contact_order(fam, ev.t_params[0], ev.u_star, ev.center) == 4


def test_solve_a22():
    d, fam, ev = solve_planted(C.a22_construction, "A2_2")
    assert abs(ev.u_star) <= 1e-8
    for t, want in zip(ev.t_params, sorted(d["t"])):
        assert t == pytest.approx(want, abs=1e-8)
    for cp in ev.contacts:
        assert contact_order(fam, cp.t, ev.u_star, ev.center) == 2
    kps = dict(zip(d["t"], d["kappa_primes"]))
    for cp in ev.contacts:
        want = kps[min(kps, key=lambda t: circ(t, cp.t))]
        assert cp.kappa_prime == pytest.approx(want, rel=1e-6)
    assert ev.subtype == "b"
    assert ev.residual <= 1e-8


def test_a22_subtype_invariant_under_u_scaling():
    d = C.a22_construction()
    X, Y, ((m, a, b),) = d["spec"]
    for lam in (0.25, 4.0):
        scaled = (X, Y, ((m, (list(np.multiply(a[0], lam)), list(np.multiply(a[1], lam)), a[2] * lam),
                                (list(np.multiply(b[0], lam)), list(np.multiply(b[1], lam)), b[2] * lam)),))
        fam = C.to_family(scaled)
        ev = solve_event(fam, "A2_2", (np.array(d["t"]) + 1e-2, np.array(d["c"]), 1e-2 / lam))
        assert ev.subtype == "b" and abs(ev.u_star) <= 1e-8


def test_solve_a14():
    d, fam, ev = solve_planted(C.a14_construction, "A1_4")
    assert abs(ev.u_star) <= 1e-8
    np.testing.assert_allclose(ev.t_params, sorted(d["t"]), atol=1e-6)
    assert ev.evidence.branch_counts == (2, 2)
    assert ev.subtype == "b" and "CriterionConflict" not in ev.flags
    assert ev.evidence.triangle_test["predicted"] == "b"


def test_mirror_symmetric_a22_is_on_axis_and_nongeneric():
    d, fam, ev = solve_planted(C.symmetric_a22_construction, "A2_2")
    assert abs(ev.u_star) <= 1e-8
    assert ev.center.u1 == pytest.approx(0.0, abs=1e-9)
    # reflection reverses the sign of kappa', so kappa1' + kappa2' vanishes
    k1, k2 = ev.evidence.kappa_primes
    assert k1 == pytest.approx(-k2, rel=1e-8)
    assert ev.subtype is None and "NonGeneric" in ev.flags


def test_far_seed_does_not_converge():
    fam = C.to_family(C.a4_construction()["spec"])
    with pytest.raises(NoConvergence):
        solve_event(fam, "A4", ([2.5], [5.0, 5.0], 0.5))


def test_translation_family_is_degenerate(curves_dir):
    fam = load_curve(curves_dir / "translation.json")
    with pytest.raises(DegenerateJacobian):
        solve_event(fam, "A4", ([0.5], [0.3, 0.1], 0.0))


def test_seed_with_wrong_arity_rejected():
    fam = C.to_family(C.a4_construction()["spec"])
    with pytest.raises(ValueError):
        solve_event(fam, "A2_2", ([0.4], [0.0, 0.0], 0.0))


# -- scanning -----------------------------------------------------------------------

def test_scan_finds_planted_quadritangency():
    d = C.a14_construction()
    fam = C.to_family(d["spec"])
    res = scan_family_detailed(fam, -0.02, 0.02, 40, kinds=["A1_4"])
    evs = [e for e in res.events if e.kind is EventKind.A1_4]
    assert len(evs) == 1
    assert abs(evs[0].u_star) <= 1e-6
    np.testing.assert_allclose(evs[0].t_params, sorted(d["t"]), atol=1e-6)
    assert len(res.u_grid) == 40


def test_scan_output_is_sorted_and_verified():
    d = C.a22_construction()
    fam = C.to_family(d["spec"])
    events = scan_family(fam, -0.04, 0.04, 40)
    assert events
    keys = [(e.u_star, e.kind.value, tuple(e.t_params)) for e in events]
    assert keys == sorted(keys)
    for e in events:
        assert -0.04 <= e.u_star <= 0.04
        X, Y = C.coeffs_at(d["spec"], e.u_star)
        fs = [C.fderivs(X, Y, t, e.center, 0)[0] for t in e.t_params]
        assert max(fs) - min(fs) <= 1e-8
        for a, b in itertools.combinations(e.t_params, 2):
            assert circ(a, b) > 0.0
        assert e.residual <= 1e-8
    a22 = [e for e in events if e.kind is EventKind.A2_2 and e.subtype is not None]
    assert len(a22) == 1 and a22[0].subtype == "b"


def test_scan_rejects_bad_steps():
    fam = C.to_family(C.a4_construction()["spec"])
    with pytest.raises(ValueError):
        scan_family(fam, 0.0, 0.1, 1)


# -- classifiers on constructed configurations --------------------------------------

@pytest.mark.parametrize("circle", [H, S], ids=["H", "S"])
def test_a14_parity(circle):
    cases = {
        "a": [(P, -1.0, 1), (P, 0.1, 1), (P, 0.9, 1), (M, 0.3, 1)],
        "b": [(P, -1.0, 1), (P, 0.9, 1), (M, -0.5, 1), (M, 0.6, 1)],
    }
    for want, pl in cases.items():
        assert classify(synthetic("A1_4", circle, pl)).subtype == want
    four = synthetic("A1_4", circle, [(M, -1.0, 1), (M, -0.2, 1), (M, 0.5, 1), (M, 1.2, 1)])
    assert classify(four).subtype == "b" and four.evidence.branch_counts == (0, 4)


def test_a14_conflict_is_flagged_or_raised():
    ev = synthetic("A1_4", H, [(P, -1.0, 1), (P, 0.9, 1), (M, -0.5, 1), (M, 0.6, 1)])
    # relabel one contact so parity and geometry disagree
    ev.contacts[0] = dataclasses.replace(ev.contacts[0], branch=M)
    with pytest.raises(CriterionConflict):
        classify_a14(ev, strict=True)
    ev.flags.clear()
    assert classify_a14(ev) == "a"
    assert "CriterionConflict" in ev.flags


def test_a22_examples():
    def ev(k1, k2):
        return synthetic("A2_2", S, [(P, -0.4, 2), (M, 0.7, 2)], (k1, k2))

    assert classify_a22(ev(0.3, 0.2)) == "a"
    assert classify_a22(ev(0.3, -0.2)) == "b"
    with pytest.raises(NonGeneric):
        classify_a22(ev(1e-12, 0.5))
    with pytest.raises(NonGeneric):
        classify_a22(ev(0.5, -0.5))


@pytest.mark.parametrize("circle", [H, S], ids=["H", "S"])
def test_a12a2_and_a1a3(circle):
    same = synthetic("A1_2A2", circle, [(P, -0.8, 1), (M, 0.2, 2), (P, 1.1, 1)])
    opp = synthetic("A1_2A2", circle, [(P, -0.8, 1), (P, 0.2, 2), (M, 1.1, 1)])
    assert classify(same).subtype == "a" and classify(opp).subtype == "b"
    assert all(same.evidence.threshold_consistent) and all(opp.evidence.threshold_consistent)
    diff = synthetic("A1A3", circle, [(P, -0.6, 3), (M, 0.9, 1)])
    one = synthetic("A1A3", circle, [(M, -0.6, 1), (M, 0.9, 3)])
    assert classify(diff).subtype == "a" and classify(one).subtype == "b"
    assert diff.evidence.threshold_consistent == [True]


@pytest.mark.parametrize("circle", [H, S], ids=["H", "S"])
def test_a4_is_single(circle):
    ev = synthetic("A4", circle, [(P, 0.3, 4)])
    assert classify(ev).subtype == "single"


def test_subtype_invariant_under_contact_relabelling():
    base = [(P, -1.0, 1), (P, 0.1, 1), (P, 0.9, 1), (M, 0.3, 1)]
    want = classify(synthetic("A1_4", H, base)).subtype
    for perm in itertools.permutations(base):
        assert classify(synthetic("A1_4", H, list(perm))).subtype == want
    pl = [(P, -0.8, 1), (M, 0.2, 2), (P, 1.1, 1)]
    for perm in itertools.permutations(pl):
        assert classify(synthetic("A1_2A2", S, list(perm))).subtype == "a"
    kp = [(P, -0.4, 2, 0.3), (M, 0.7, 2, -0.2)]
    for perm in itertools.permutations(kp):
        ev = synthetic("A2_2", H, [p[:3] for p in perm], [p[3] for p in perm])
        assert classify(ev).subtype == "b"


def test_lightcone_event_is_unclassified():
    lc = PseudoCircle(CircleKind.LC, (0.0, 0.0), 0.0)
    fam = C.curve_family("blob")
    cps = [make_contact(fam, t, 0.0, None, 1) for t in (0.5, 1.5, 3.0, 4.5)]
    ev = TransitionEvent(EventKind.A1_4, None, 0.0, [0.5, 1.5, 3.0, 4.5], lc.center, 0.0, lc, cps)
    classify(ev)
    assert ev.subtype is None and "LightconeCircle" in ev.flags and table_entry(ev) is None
