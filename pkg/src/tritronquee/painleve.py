"""Direct integration of y'' = 6 y^2 - z for the tritronquee solution.

Seeding uses the asymptotic series y = -sqrt(z/6) (1 + sum c_j z^(-5j/2))
whose coefficients follow from substituting the ansatz into the equation.
Tracking runs an adaptive integrator over polyline paths; movable double
poles are detected from the blow-up of y, fitted in the local Laurent frame

    y = (z-a)^(-2) + (a/10)(z-a)^2 + (1/6)(z-a)^3 + b (z-a)^4 + ...

(the quartic coefficient b is the second free parameter), passed through by
evaluating the series on the far side, and recorded.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import complex_ode
from .errors import NewtonDiverged, PoleFitFailed, SeedNotConverged

TOL_SEED = 1e-10
TOL_MATCH = 1e-8
TOL_FIT = 1e-6
BLOWUP_THRESHOLD = 1e4
FIT_RADIUS = 0.25
LAURENT_ORDER = 16
Z_SEED_MIN = 40.0
SEED_MARGIN = math.pi / 10


def _effective_fit_radius(fit_radius: float, a_est: complex) -> float:
    """Fit radius shrunk with |a|: the local pole lattice tightens like
    |a|^(-1/2) and the Laurent coefficients grow with |a|."""
    return fit_radius * min(1.0, math.sqrt(3.0 / (1.0 + abs(a_est))))

_SECTOR_HALF_WIDTH = 4.0 * math.pi / 5.0

# polynomial-in-(a,b) helpers: {(i, j): coeff} means coeff * a^i * b^j

def _poly_add(p, q):
    out = dict(p)
    for key, val in q.items():
        out[key] = out.get(key, Fraction(0)) + val
        if out[key] == 0:
            del out[key]
    return out


def _poly_mul(p, q):
    out: dict = {}
    for (i1, j1), v1 in p.items():
        for (i2, j2), v2 in q.items():
            key = (i1 + i2, j1 + j2)
            out[key] = out.get(key, Fraction(0)) + v1 * v2
    return {k: v for k, v in out.items() if v != 0}


def _poly_scale(p, c):
    return {k: v * c for k, v in p.items() if v * c != 0}


def _poly_eval(p, a: complex, b: complex) -> complex:
    return sum(complex(v) * a ** i * b ** j for (i, j), v in p.items())


def _poly_diff(p, var: int):
    out = {}
    for (i, j), v in p.items():
        if var == 0 and i > 0:
            out[(i - 1, j)] = v * i
        elif var == 1 and j > 0:
            out[(i, j - 1)] = v * j
    return out


@dataclass(frozen=True)
class LaurentTable:
    """Coefficients of the movable-pole expansion as polynomials in (a, b).

    ``coeffs[j]`` multiplies (z-a)^(j-2); the table covers powers -2..order.
    """

    order: int
    coeffs: tuple

    @property
    def n(self) -> int:
        return len(self.coeffs)

    def numeric(self, a: complex, b: complex) -> np.ndarray:
        return np.array([_poly_eval(c, a, b) for c in self.coeffs], dtype=complex)

    def eval_frame(self, a: complex, b: complex, z: complex):
        """(Y, Y', dY/da, dY/db, dY'/da, dY'/db) at z for the pole (a, b)."""
        t = z - a
        c = self.numeric(a, b)
        ca = np.array([_poly_eval(_poly_diff(p, 0), a, b) for p in self.coeffs],
                      dtype=complex)
        cb = np.array([_poly_eval(_poly_diff(p, 1), a, b) for p in self.coeffs],
                      dtype=complex)
        powers = np.arange(-2, self.order + 1)
        tp = t ** powers
        tpm = t ** (powers - 1)
        y = np.sum(c * tp)
        yp = np.sum(c * powers * tpm)
        ypp = 6.0 * y * y - z
        dy_da = np.sum(ca * tp) - yp
        dy_db = np.sum(cb * tp)
        dyp_da = np.sum(ca * powers * tpm) - ypp
        dyp_db = np.sum(cb * powers * tpm)
        return y, yp, dy_da, dy_db, dyp_da, dyp_db


def laurent_coefficients(order: int = LAURENT_ORDER) -> LaurentTable:
    """Recurrence table of the Laurent expansion about a movable pole.

    The leading term is (z-a)^(-2); the resonance sits at the quartic power,
    where the free coefficient b enters.  For j >= 7 (power j-2):

        c_j [(j-2)(j-3) - 12] = 6 sum_{p+q=j, p,q>=1} c_p c_q
        (with -a and -1 sources at the quadratic and cubic powers).
    """
    if order < 4:
        raise ValueError("order must be at least 4 (the resonance power)")
    one = Fraction(1)
    coeffs = [dict() for _ in range(order + 3)]
    coeffs[0] = {(0, 0): one}
    coeffs[4] = {(1, 0): Fraction(1, 10)}
    coeffs[5] = {(0, 0): Fraction(1, 6)}
    if order >= 4:
        coeffs[6] = {(0, 1): one}
    for j in range(7, order + 3):
        conv: dict = {}
        for p in range(1, j):
            q = j - p
            if q < 1 or q >= j:
                continue
            conv = _poly_add(conv, _poly_mul(coeffs[p], coeffs[q]))
        denom = (j - 2) * (j - 3) - 12
        coeffs[j] = _poly_scale(conv, Fraction(6, denom))
    return LaurentTable(order=order, coeffs=tuple(coeffs))


# ---------------------------------------------------------------------------
# asymptotic seeding


def tritronquee_series_coefficients(n_terms: int = 40) -> np.ndarray:
    """Coefficients c_j of y = -sqrt(z/6) sum c_j z^(-5j/2), c_0 = 1.

    Derived by series substitution: with mu_j = (25 j^2 - 1)/4,

        2 c_j = -mu_{j-1} c_{j-1} / sqrt(6) - sum_{p+q=j, p,q>=1} c_p c_q.
    """
    c = np.zeros(n_terms, dtype=float)
    c[0] = 1.0
    s6 = math.sqrt(6.0)
    for j in range(1, n_terms):
        mu = (25.0 * (j - 1) ** 2 - 1.0) / 4.0
        inner = sum(c[p] * c[j - p] for p in range(1, j))
        c[j] = 0.5 * (-mu * c[j - 1] / s6 - inner)
    return c


_SERIES = tritronquee_series_coefficients()


def _asymptotic_state(z: complex, tol_seed: float = TOL_SEED):
    """(y, y') from the truncated asymptotic series at z."""
    lead = -cmath.sqrt(z / 6.0)
    y = 0.0 + 0.0j
    yp = 0.0 + 0.0j
    prev = math.inf
    for j, cj in enumerate(_SERIES):
        expo = (1.0 - 5.0 * j) / 2.0
        term = -(1.0 / math.sqrt(6.0)) * cj * z ** expo
        if abs(term) > prev:
            break
        y += term
        yp += expo * term / z
        prev = abs(term)
        if abs(term) < tol_seed * abs(lead):
            break
    return y, yp


@dataclass
class TritronqueeState:
    z: complex
    y: complex
    yp: complex
    chart: str = "regular"
    laurent_center: complex | None = None


@dataclass(frozen=True)
class PainlevePole:
    a: complex
    b: complex
    fit_residual: float


def _pi_rhs(z, y):
    return np.array([y[1], 6.0 * y[0] * y[0] - z])


def seed_asymptotic(z0: complex, tol_seed: float = TOL_SEED,
                    tol_match: float = TOL_MATCH,
                    z_seed_min: float = Z_SEED_MIN,
                    margin: float = SEED_MARGIN) -> TritronqueeState:
    """Certified asymptotic-series state at z0.

    Requires |z0| >= z_seed_min inside the sector |arg z| < 4 pi/5 - margin.
    The state is cross-checked by integrating the series state at 2 z0
    inward to z0 and comparing.
    """
    z0 = complex(z0)
    if abs(z0) < z_seed_min:
        raise ValueError(f"|z0| = {abs(z0):.3g} below the seeding radius")
    if abs(cmath.phase(z0)) > _SECTOR_HALF_WIDTH - margin:
        raise ValueError("z0 outside the tritronquee sector")
    y0, yp0 = _asymptotic_state(z0, tol_seed)
    y1, yp1 = _asymptotic_state(2.0 * z0, tol_seed)
    res = complex_ode.integrate_along_path(_pi_rhs, np.array([y1, yp1]),
                                           [2.0 * z0, z0], rtol=1e-12,
                                           atol=1e-14)
    mismatch = max(abs(res.y[0] - y0), abs(res.y[1] - yp0))
    if mismatch > tol_match:
        raise SeedNotConverged(
            f"two-radius seeding disagreement {mismatch:.3e} at z0 = {z0}")
    return TritronqueeState(z=z0, y=y0, yp=yp0)


# ---------------------------------------------------------------------------
# tracking with Laurent pole passes


def _fit_pole(table: LaurentTable, z: complex, y: complex, yp: complex,
              a0: complex, b0: complex = 0.0) -> tuple[complex, complex]:
    """Newton solve of series(z; a, b) = (y, y') for the pole data."""
    a, b = complex(a0), complex(b0)
    for _ in range(40):
        Y, Yp, da, db, dpa, dpb = table.eval_frame(a, b, z)
        F = np.array([Y - y, Yp - yp])
        if abs(F[0]) / (1.0 + abs(y)) + abs(F[1]) / (1.0 + abs(yp)) < 1e-13:
            return a, b
        J = np.array([[da, db], [dpa, dpb]])
        try:
            step = np.linalg.solve(J, F)
        except np.linalg.LinAlgError as exc:
            raise NewtonDiverged(f"singular Laurent-fit Jacobian: {exc}")
        a -= complex(step[0])
        b -= complex(step[1])
    raise NewtonDiverged("Laurent fit did not converge")


def track(state: TritronqueeState, waypoints, fit_radius: float = FIT_RADIUS,
          blowup_threshold: float = BLOWUP_THRESHOLD,
          laurent_order: int = LAURENT_ORDER, tol_fit: float = TOL_FIT,
          rtol: float = 1e-13, record_to: list | None = None
          ) -> tuple[TritronqueeState, list[PainlevePole]]:
    """Integrate along the polyline, passing through movable poles.

    When the trajectory enters the fit radius of a pole (estimated from
    y/y'), the pole data (a, b) are fitted twice, at radii 1.0 and 0.8 times
    the entry distance, the disagreement is recorded as the fit residual,
    and the state is continued from the mirror point on the far side.
    """
    table = laurent_coefficients(laurent_order)
    z_cur = complex(state.z)
    y_cur = np.array([state.y, state.yp], dtype=complex)
    poles: list[PainlevePole] = []
    pts = [complex(w) for w in waypoints]
    if abs(pts[0] - z_cur) > 1e-9 * (1.0 + abs(z_cur)):
        raise ValueError("path must start at the current state")
    last_pole: complex | None = None
    idx = 0
    guard = 0
    while idx < len(pts) - 1:
        guard += 1
        if guard > 200:
            raise NewtonDiverged("pole passing did not settle")
        z0, z1 = z_cur, pts[idx + 1]
        dz = z1 - z0
        if dz == 0:
            idx += 1
            continue
        hit = {"z": None}

        def on_accept(z, y, z0=z0, dz=dz):
            if record_to is not None:
                record_to.append((z, complex(y[0]), complex(y[1])))
            ay = abs(y[0])
            if ay < 8.0:
                return y, complex_ode.CONTINUE
            if abs(y[1]) == 0.0:
                return y, complex_ode.CONTINUE
            dist = abs(2.0 * y[0] / y[1])
            a_est = z + 2.0 * y[0] / y[1]
            radius = _effective_fit_radius(fit_radius, a_est)
            if last_pole is not None and abs(z - last_pole) < 1.3 * radius:
                return y, complex_ode.CONTINUE
            if dist <= radius or ay >= blowup_threshold:
                hit["z"] = z
                return y, complex_ode.STOP
            return y, complex_ode.CONTINUE

        res = complex_ode.integrate_along_path(
            _pi_rhs, y_cur, [z0, z1], rtol=rtol, atol=1e-14,
            on_accept=on_accept)
        if not res.stopped:
            z_cur = z1
            y_cur = res.y
            idx += 1
            continue

        # first fit at the entry distance
        z_a = res.z
        y_a, yp_a = complex(res.y[0]), complex(res.y[1])
        a1, b1 = _fit_pole(table, z_a, y_a, yp_a, z_a + 2.0 * y_a / yp_a)
        # second fit at 0.8 of the entry distance, from re-integrated data
        z_b = a1 + 0.8 * (z_a - a1)
        res_b = complex_ode.integrate_along_path(
            _pi_rhs, res.y, [z_a, z_b], rtol=rtol, atol=1e-14)
        a2, b2 = _fit_pole(table, z_b, complex(res_b.y[0]),
                           complex(res_b.y[1]), a1, b1)
        fit_res = abs(a1 - a2) + abs(b1 - b2)
        if fit_res > tol_fit:
            raise PoleFitFailed(
                f"two-radius Laurent fits disagree by {fit_res:.3e} near {a1}")
        poles.append(PainlevePole(a=a2, b=b2, fit_residual=fit_res))
        last_pole = a2

        # exit on the far side, mirror of the certification point
        z_exit = a2 - (z_b - a2)
        yF, ypF, *_ = table.eval_frame(a2, b2, z_exit)
        z_cur = z_exit
        y_cur = np.array([yF, ypF], dtype=complex)
        # if the exit overshoots the current leg, move to the next one
        t_exit = ((z_exit - z0) / dz).real if dz != 0 else 0.0
        if t_exit >= 1.0:
            idx += 1

    final = TritronqueeState(z=z_cur, y=complex(y_cur[0]),
                             yp=complex(y_cur[1]))
    if last_pole is not None and abs(z_cur - last_pole) < fit_radius:
        final.chart = "laurent"
        final.laurent_center = last_pole
    return final, poles
