"""Independent oracle implementations used by the tests.

Everything here deliberately avoids the code paths it is used to check:
roots come from Durand-Kerner instead of the companion matrix, periods from
a dense trapezoid on a circular contour instead of the segment quadrature,
branch values from stepwise continuation, and log-derivatives from the
linear (psi, psi') system with rescaling instead of the Riccati flow.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

from tritronquee import complex_ode
from tritronquee.elliptic import Potential, TurningPoints
from tritronquee.oscillator import RaySpec, _adiabatic_handoff, _path_to


def durand_kerner_roots(pot: Potential, n_iter: int = 200) -> list[complex]:
    """Roots of 4 x^3 - 2a x - 28b by simultaneous iteration."""
    a, b = pot.a, pot.b
    scale = 1.0 + max(abs(a) ** 0.5, abs(b) ** (1.0 / 3.0))

    def p(x):
        return 4.0 * x ** 3 - 2.0 * a * x - 28.0 * b

    z = [scale * (0.4 + 0.9j) ** i for i in range(3)]
    for _ in range(n_iter):
        moved = 0.0
        for i in range(3):
            denom = 4.0
            for j in range(3):
                if j != i:
                    denom *= z[i] - z[j]
            step = p(z[i]) / denom
            z[i] -= step
            moved = max(moved, abs(step))
        if moved < 1e-15 * scale:
            break
    return z


def continued_sqrt(pot: Potential, points, w0: complex) -> complex:
    """Track sqrt(V) stepwise along a point sequence starting from w0."""
    w = complex(w0)
    for z in points[1:]:
        cand = cmath.sqrt(pot(z))
        if abs(cand - w) > abs(cand + w):
            cand = -cand
        w = cand
    return w


def continued_sqrt_path(pot: Potential, z0: complex, z1: complex,
                        w0: complex, n: int = 2000) -> complex:
    pts = [z0 + (z1 - z0) * i / n for i in range(n + 1)]
    return continued_sqrt(pot, pts, w0)


def contour_period_trapezoid(pot: Potential, center: complex, radius: float,
                             w_start: complex, n: int = 4096) -> complex:
    """Counterclockwise contour integral of sqrt(V) by dense trapezoid.

    The branch is continued stepwise around the circle; with two branch
    points enclosed it closes up, and the periodic trapezoid rule is
    spectrally accurate.
    """
    phis = np.linspace(0.0, 2.0 * math.pi, n, endpoint=False)
    zs = center + radius * np.exp(1j * phis)
    w = complex(w_start)
    total = 0.0j
    values = []
    for z in zs:
        cand = cmath.sqrt(pot(complex(z)))
        if abs(cand - w) > abs(cand + w):
            cand = -cand
        w = cand
        values.append(w)
    # closure check: continuing one more step must return to the start
    cand = cmath.sqrt(pot(complex(zs[0])))
    if abs(cand - values[0]) > abs(cand + values[0]):
        cand = -cand
    assert abs(cand - values[0]) < 1e-6 * max(1.0, abs(values[0])), \
        "branch did not close around the contour"
    dz = 1j * radius * np.exp(1j * phis) * (2.0 * math.pi / n)
    for wv, d in zip(values, dz):
        total += wv * d
    return total


def linear_logderivative(pot: Potential, tp: TurningPoints, ray: RaySpec,
                         lam_match: complex, rtol: float = 1e-12) -> complex:
    """s(lam_match) from the linear (psi, psi') system with rescaling."""
    waypoints = _path_to(tp, ray.start_point, complex(lam_match))
    s0, remaining = _adiabatic_handoff(pot, ray, waypoints)

    def f(z, y):
        return np.array([y[1], pot(z) * y[0]])

    def on_accept(z, y):
        m = max(abs(y[0]), abs(y[1]))
        if m > 1e100:
            return y / m, complex_ode.CONTINUE
        return y, complex_ode.CONTINUE

    res = complex_ode.integrate_along_path(f, np.array([1.0, s0]), remaining,
                                           rtol=rtol, atol=1e-30,
                                           on_accept=on_accept)
    return complex(res.y[1] / res.y[0])


def polyline_action_drift(pot: Potential, points) -> tuple[float, float]:
    """(|Re int sqrt(V) dlam|, int |sqrt(V)| |dlam|) along a polyline.

    Re-integrates the action with 8x-subdivided composite Simpson panels and
    stepwise branch continuation, independently of the tracer's own
    accumulator.  Simpson keeps the quadrature error negligible near the
    square-root behaviour at the turning-point endpoints.
    """
    w = cmath.sqrt(pot(points[0]))
    total = 0.0j
    weight = 0.0

    def branch(z, ref):
        c = cmath.sqrt(pot(z))
        return -c if abs(c - ref) > abs(c + ref) else c

    for z0, z1 in zip(points[:-1], points[1:]):
        for i in range(8):
            za = z0 + (z1 - z0) * (i / 8.0)
            zm = z0 + (z1 - z0) * ((i + 0.5) / 8.0)
            zb = z0 + (z1 - z0) * ((i + 1) / 8.0)
            wa = branch(za, w)
            wm = branch(zm, wa)
            wb = branch(zb, wm)
            w = wb
            h = zb - za
            total += (wa + 4.0 * wm + wb) * h / 6.0
            weight += (abs(wa) + 4.0 * abs(wm) + abs(wb)) * abs(h) / 6.0
    return abs(total.real), weight


def hermite_quintic_residual(records) -> float:
    """Max midpoint residual |y'' - (6y^2 - z)| over recorded steps.

    Builds the two-sided quintic Hermite interpolant of y from
    (y, y', y'' = 6y^2 - z) at consecutive nodes and tests the equation at
    the midpoint, normalized by 1 + |6y^2 - z|.
    """
    worst = 0.0
    for (z0, y0, yp0), (z1, y1, yp1) in zip(records[:-1], records[1:]):
        h = z1 - z0
        if h == 0:
            continue
        ypp0 = 6.0 * y0 * y0 - z0
        ypp1 = 6.0 * y1 * y1 - z1
        # quintic on t in [0,1]: y(t) with derivatives scaled by h
        d0, d1 = yp0 * h, yp1 * h
        s0, s1 = ypp0 * h * h, ypp1 * h * h
        c0 = y0
        c1 = d0
        c2 = 0.5 * s0
        # remaining three coefficients from conditions at t=1
        A = np.array([[1.0, 1.0, 1.0],
                      [3.0, 4.0, 5.0],
                      [6.0, 12.0, 20.0]])
        rhs = np.array([y1 - (c0 + c1 + c2),
                        d1 - (c1 + 2.0 * c2),
                        s1 - 2.0 * c2])
        c3, c4, c5 = np.linalg.solve(A, rhs)
        t = 0.5
        y_mid = c0 + c1 * t + c2 * t ** 2 + c3 * t ** 3 + c4 * t ** 4 + c5 * t ** 5
        ypp_mid = (2.0 * c2 + 6.0 * c3 * t + 12.0 * c4 * t ** 2
                   + 20.0 * c5 * t ** 3) / (h * h)
        z_mid = z0 + 0.5 * h
        rhs_mid = 6.0 * y_mid * y_mid - z_mid
        worst = max(worst, abs(ypp_mid - rhs_mid) / (1.0 + abs(rhs_mid)))
    return worst
