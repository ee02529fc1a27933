"""Stokes lines of the quadratic differential V(lam) dlam^2 and their graph.

From every simple turning point three lines leave along directions that keep
the action integral of sqrt(V) purely imaginary.  Lines either escape to
infinity (they asymptote to the bisectors between the five recessive
directions ``2 pi k / 5``) or hit another turning point (a saddle
connection).  The resulting embedded graph is summarized by a canonical
label; the label of the configuration that controls the pole region is
reported as "320".
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace

import numpy as np

from . import complex_ode
from .elliptic import Potential, TurningPoints, turning_points
from .errors import OdeToleranceNotMet, StepUnderflow, TraceStalled, UnresolvedTopology

ESCAPE_FACTOR = 10.0
MERGE_FACTOR = 1e-4
TRACE_RTOL = 1e-9
TOL_STOKES = 1e-6

ASYMPTOTIC = "asymptotic"
TURNING_POINT = "turning_point"
STALLED = "stalled"


@dataclass(frozen=True)
class StokesLine:
    """One traced Stokes line.

    ``terminus_index`` is a gap index k in Z5 for asymptotic termini (the
    line escapes between the recessive directions 2 pi k/5 and
    2 pi (k+1)/5, i.e. along the bisector (2k+1) pi/5), or the index of the
    reached turning point for saddle connections.
    """

    origin: int
    points: np.ndarray
    terminus_kind: str
    terminus_index: int | None
    action_drift: float
    action_scale: float


@dataclass(frozen=True)
class StokesGraph:
    turning_points: TurningPoints
    lines: tuple[StokesLine, ...]
    topology_label: str | None = None


def _local_directions(pot: Potential, root: complex) -> list[float]:
    arg_vp = cmath.phase(pot.deriv(root))
    return [((2 * j + 1) * math.pi - arg_vp) / 3.0 for j in range(3)]


def _gap_index(angle: float) -> int:
    j = int(math.floor((angle % (2.0 * math.pi)) / (2.0 * math.pi / 5.0))) % 5
    return j if j <= 2 else j - 5


def _trace_single(pot: Potential, tp: TurningPoints, origin: int, angle: float,
                  escape_radius: float, tol_merge: float,
                  rtol: float) -> StokesLine:
    root = tp.roots[origin]
    start = root + tol_merge * cmath.exp(1j * angle)
    others = [(j, tp.roots[j]) for j in range(3) if j != origin]

    w0 = cmath.sqrt(pot(start))
    tau0 = 1j * w0.conjugate() / abs(w0)
    if (tau0 * cmath.exp(-1j * angle)).real < 0:
        w0 = -w0
    state = {"w": w0, "lam": start, "action": 0.0j, "abs_action": 0.0,
             "left_origin": False, "terminus": (STALLED, None)}
    points = [start]

    def branch_sqrt(lam: complex) -> complex:
        w = cmath.sqrt(pot(lam))
        if abs(w - state["w"]) > abs(w + state["w"]):
            w = -w
        return w

    def g(t, y):
        lam = complex(y[0])
        w = branch_sqrt(lam)
        return np.array([1j * w.conjugate() / abs(w)], dtype=complex)

    def on_accept(t, y):
        lam = complex(y[0])
        dlam = lam - state["lam"]
        # Simpson panel per accepted step; trapezoid error would leak into
        # the drift projection and bend the polyline off the level set
        wm = branch_sqrt(state["lam"] + 0.5 * dlam)
        w = branch_sqrt(lam)
        state["action"] += (state["w"] + 4.0 * wm + w) * dlam / 6.0
        state["abs_action"] += (abs(state["w"]) + 4.0 * abs(wm)
                                + abs(w)) * abs(dlam) / 6.0
        # project out accumulated drift of the conserved real part
        drift = state["action"].real
        if abs(drift) > 1e-14 * max(1.0, state["abs_action"]) and abs(w) > 0:
            lam = lam - drift * w.conjugate() / (abs(w) ** 2)
            w = branch_sqrt(lam)
            state["action"] = 1j * state["action"].imag
        state["w"] = w
        state["lam"] = lam
        points.append(lam)
        y = np.array([lam], dtype=complex)
        if abs(lam) >= escape_radius:
            state["terminus"] = (ASYMPTOTIC, _gap_index(cmath.phase(lam)))
            return y, complex_ode.STOP
        dist_origin = abs(lam - root)
        if not state["left_origin"] and dist_origin > 3.0 * tol_merge:
            state["left_origin"] = True
        if state["left_origin"] and dist_origin < tol_merge:
            state["terminus"] = (TURNING_POINT, origin)
            return y, complex_ode.STOP
        for j, other in others:
            if abs(lam - other) < tol_merge:
                state["terminus"] = (TURNING_POINT, j)
                return y, complex_ode.STOP
        return y, complex_ode.CONTINUE

    max_arc = 40.0 * escape_radius
    try:
        complex_ode.integrate(g, 0.0, max_arc, np.array([start], dtype=complex),
                              rtol=rtol, atol=rtol * 1e-2,
                              on_accept=on_accept, max_steps=400_000)
    except StepUnderflow:
        raise TraceStalled(
            f"stokes trace from turning point {origin} stalled near {state['lam']}")
    except OdeToleranceNotMet:
        pass  # recorded as a stalled terminus below

    kind, index = state["terminus"]
    return StokesLine(origin=origin, points=np.asarray(points, dtype=complex),
                      terminus_kind=kind, terminus_index=index,
                      action_drift=abs(state["action"].real),
                      action_scale=state["abs_action"])


def trace_stokes_lines(pot: Potential, escape_factor: float = ESCAPE_FACTOR,
                       merge_factor: float = MERGE_FACTOR,
                       rtol: float = TRACE_RTOL) -> StokesGraph:
    """Trace the three Stokes lines from every turning point."""
    tp = turning_points(pot)
    escape_radius = escape_factor * tp.scale
    tol_merge = merge_factor * escape_radius
    lines = []
    for i in range(3):
        for angle in _local_directions(pot, tp.roots[i]):
            lines.append(_trace_single(pot, tp, i, angle, escape_radius,
                                       tol_merge, rtol))
    return StokesGraph(turning_points=tp, lines=tuple(lines))


# ---------------------------------------------------------------------------
# classification

#: Canonical signature of the graph that controls the pole region: the inner
#: point connects to both outer points and sends its free line into one gap;
#: each outer point keeps the remaining two adjacent gaps.
_SIGNATURE_320 = "g0,tA,tB;g3,g4,tI;g1,g2,tI"


def _vertex_role(idx: int) -> str:
    return ("I", "A", "B")[idx]


def _transform_gap(j: int, rotation: int, reflect: bool) -> int:
    if reflect:
        j = (-1 - j) % 5
    return (j - rotation) % 5


def _transform_role(role: str, reflect: bool) -> str:
    if reflect and role in ("A", "B"):
        return "B" if role == "A" else "A"
    return role


def canonical_label(g: StokesGraph) -> str:
    """Rotation/reflection-invariant label of the incidence structure."""
    termini: dict[int, list] = {0: [], 1: [], 2: []}
    for line in g.lines:
        if line.terminus_kind == STALLED:
            raise UnresolvedTopology(
                f"line from turning point {line.origin} ended by step limit")
        if line.terminus_kind == ASYMPTOTIC:
            termini[line.origin].append(("gap", line.terminus_index % 5))
        else:
            termini[line.origin].append(("tp", line.terminus_index))

    candidates = []
    for reflect in (False, True):
        for rotation in range(5):
            sigs = {}
            for vertex in range(3):
                tokens = []
                for kind, value in termini[vertex]:
                    if kind == "gap":
                        tokens.append(f"g{_transform_gap(value, rotation, reflect)}")
                    else:
                        tokens.append(f"t{_transform_role(_vertex_role(value), reflect)}")
                sigs[_vertex_role(vertex)] = ",".join(sorted(tokens))
            order = ["I", "A", "B"]
            if reflect:
                order = ["I", "B", "A"]
            candidates.append(";".join(sigs[r] for r in order))
    return min(candidates)


def classify_graph(g: StokesGraph) -> str:
    """Return "320" for the pole-region incidence structure, else the
    canonical label itself."""
    label = canonical_label(g)
    return "320" if label == _SIGNATURE_320 else label


def stokes_graph(pot: Potential, **kwargs) -> StokesGraph:
    """Trace and classify in one call."""
    g = trace_stokes_lines(pot, **kwargs)
    return replace(g, topology_label=classify_graph(g))


def is_type_320(pot: Potential, **kwargs) -> bool:
    try:
        return classify_graph(trace_stokes_lines(pot, **kwargs)) == "320"
    except (UnresolvedTopology, TraceStalled):
        return False


def polylines(g: StokesGraph) -> list[list[list[float]]]:
    """Polylines as [re, im] pair lists, ready for JSON export."""
    return [[[z.real, z.imag] for z in line.points] for line in g.lines]
