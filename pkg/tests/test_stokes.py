import cmath
import math

import numpy as np
import pytest

from tritronquee.bsb import solve_period_targets
from tritronquee.elliptic import Potential, turning_points
from tritronquee.errors import DegenerateTurningPoints
from tritronquee.stokes import (ASYMPTOTIC, TURNING_POINT, classify_graph,
                                polylines, trace_stokes_lines)

from oracles import polyline_action_drift

#: labels recorded from the oracle runs of the tracer
LABEL_10_0 = "g0,g2,tA;g3,g4,tI;g0,g1,g2"
LABEL_SYMMETRIC = "g0,g1,g2;g0,g2,g4;g2,g3,g4"


def test_degenerate_raises():
    with pytest.raises(DegenerateTurningPoints):
        trace_stokes_lines(Potential(0.0, 0.0))


def test_three_lines_per_turning_point(anchor):
    g = trace_stokes_lines(Potential(anchor.point.a, anchor.point.b))
    for i in range(3):
        assert sum(1 for ln in g.lines if ln.origin == i) == 3


def test_reference_point_is_320(anchor):
    g = trace_stokes_lines(Potential(anchor.point.a, anchor.point.b))
    assert classify_graph(g) == "320"
    # all five asymptotic gaps are used exactly once
    gaps = sorted(ln.terminus_index % 5 for ln in g.lines
                  if ln.terminus_kind == ASYMPTOTIC)
    assert gaps == [0, 1, 2, 3, 4]
    # the inner point connects to both outer points
    internal = [(ln.origin, ln.terminus_index) for ln in g.lines
                if ln.terminus_kind == TURNING_POINT]
    assert (0, 1) in internal and (0, 2) in internal
    assert (1, 0) in internal and (2, 0) in internal


def test_asymptotic_termini_near_gap_bisectors(anchor):
    g = trace_stokes_lines(Potential(anchor.point.a, anchor.point.b))
    for ln in g.lines:
        if ln.terminus_kind != ASYMPTOTIC:
            continue
        ang = cmath.phase(ln.points[-1])
        bisector = (2 * ln.terminus_index + 1) * math.pi / 5.0
        diff = abs((ang - bisector + math.pi) % (2 * math.pi) - math.pi)
        assert diff < math.pi / 5.0


def test_incremental_action_oracle(anchor):
    g = trace_stokes_lines(Potential(anchor.point.a, anchor.point.b))
    pot = Potential(anchor.point.a, anchor.point.b)
    for ln in g.lines:
        drift, weight = polyline_action_drift(pot, ln.points)
        assert drift < 1e-6 * max(1.0, weight)


def test_symmetric_point_graph():
    """At (0, 1/7) all nine lines escape; the graph is symmetric under
    conjugation (gap j -> -1-j mod 5 maps the signature multiset to itself).
    """
    pot = Potential(0.0, 1.0 / 7.0)
    g = trace_stokes_lines(pot)
    assert classify_graph(g) == LABEL_SYMMETRIC
    assert all(ln.terminus_kind == ASYMPTOTIC for ln in g.lines)
    # turning points form one orbit of the rotation by 2 pi / 3
    tp = turning_points(pot)
    rotated = {complex(r * cmath.exp(2j * math.pi / 3)) for r in tp.roots}
    for r in rotated:
        assert min(abs(r - s) for s in tp.roots) < 1e-9
    sigs = []
    for i in range(3):
        sigs.append(frozenset(ln.terminus_index % 5 for ln in g.lines
                              if ln.origin == i))
    reflected = [frozenset((-1 - j) % 5 for j in sig) for sig in sigs]
    assert sorted(map(sorted, reflected)) == sorted(map(sorted, sigs))


def test_label_scaling_invariance(anchor):
    rng = np.random.default_rng(5)
    base_points = [anchor.point]
    for _ in range(49):
        s, t = rng.uniform(2.2, 4.8, 2)
        point, _ = solve_period_targets(1j * s, 1j * t, anchor.point)
        base_points.append(point)
    for point in base_points:
        label = classify_graph(trace_stokes_lines(Potential(point.a, point.b)))
        assert label == "320"
        for x in (0.5, 2.0, 3.0):
            scaled = point.scaled(x)
            g = trace_stokes_lines(Potential(scaled.a, scaled.b))
            assert classify_graph(g) == label


def test_non_320_labels():
    assert classify_graph(trace_stokes_lines(Potential(10.0, 0.0))) == LABEL_10_0
    off = classify_graph(trace_stokes_lines(Potential(-2.24759199, -0.064)))
    assert off != "320"


def test_label_stable_under_step_refinement(anchor):
    pot = Potential(anchor.point.a, anchor.point.b)
    a = classify_graph(trace_stokes_lines(pot, rtol=1e-9))
    b = classify_graph(trace_stokes_lines(pot, rtol=3e-11))
    assert a == b == "320"
    pot2 = Potential(10.0, 0.0)
    assert (classify_graph(trace_stokes_lines(pot2, rtol=1e-9))
            == classify_graph(trace_stokes_lines(pot2, rtol=3e-11)))


def _count_crossings(pA, pB, exclude_near, radius):
    """Transversal chord intersections between two polylines, skipping
    segments whose endpoints lie near the given exclusion centers."""
    a1, a2 = pA[:-1], pA[1:]
    b1, b2 = pB[:-1], pB[1:]

    def keep(p, q):
        mask = np.ones(len(p), dtype=bool)
        for c in exclude_near:
            mask &= (np.abs(p - c) > radius) & (np.abs(q - c) > radius)
        return mask
    ka = keep(a1, a2)
    kb = keep(b1, b2)
    a1, a2 = a1[ka], a2[ka]
    b1, b2 = b1[kb], b2[kb]
    if len(a1) == 0 or len(b1) == 0:
        return 0
    d1 = (a2 - a1)[:, None]
    d2 = (b2 - b1)[None, :]
    dp = b1[None, :] - a1[:, None]
    denom = d1.real * d2.imag - d1.imag * d2.real
    denom = np.where(np.abs(denom) < 1e-14, np.nan, denom)
    t = (dp.real * d2.imag - dp.imag * d2.real) / denom
    u = (dp.real * d1.imag - dp.imag * d1.real) / denom
    hits = (t > 1e-9) & (t < 1 - 1e-9) & (u > 1e-9) & (u < 1 - 1e-9)
    return int(np.count_nonzero(hits))


def test_graph_is_embedded(anchor):
    g = trace_stokes_lines(Potential(anchor.point.a, anchor.point.b))
    tol_merge = 1e-4 * 10.0 * g.turning_points.scale
    roots = list(g.turning_points.roots)
    for i in range(len(g.lines)):
        for j in range(i + 1, len(g.lines)):
            li, lj = g.lines[i], g.lines[j]
            # a saddle connection traced from both endpoints is one edge
            # drawn twice, not a crossing
            if (li.terminus_kind == TURNING_POINT
                    and lj.terminus_kind == TURNING_POINT
                    and li.terminus_index == lj.origin
                    and lj.terminus_index == li.origin):
                continue
            n = _count_crossings(np.asarray(li.points), np.asarray(lj.points),
                                 roots, 3.0 * tol_merge)
            assert n == 0, f"lines {i} and {j} cross {n} times"


def test_stalled_line_unresolvable(anchor):
    from tritronquee.errors import UnresolvedTopology
    from tritronquee.stokes import STALLED, StokesGraph, StokesLine
    g = trace_stokes_lines(Potential(anchor.point.a, anchor.point.b))
    bad = StokesLine(origin=0, points=g.lines[0].points,
                     terminus_kind=STALLED, terminus_index=None,
                     action_drift=0.0, action_scale=1.0)
    broken = StokesGraph(turning_points=g.turning_points,
                         lines=g.lines[:-1] + (bad,))
    with pytest.raises(UnresolvedTopology):
        classify_graph(broken)


def test_polylines_export(anchor):
    g = trace_stokes_lines(Potential(anchor.point.a, anchor.point.b))
    data = polylines(g)
    assert len(data) == 9
    for line, ln in zip(data, g.lines):
        assert len(line) == len(ln.points)
        assert all(len(pair) == 2 for pair in line)
