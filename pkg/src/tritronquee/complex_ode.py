"""Adaptive Dormand-Prince 5(4) integration for complex-valued systems.

The integrator advances ``y' = g(t, y)`` for a real parameter ``t`` and a
complex state vector ``y``; paths in the complex plane are handled by the
callers through the parametrization baked into ``g``.  An ``on_accept``
callback can inspect and adjust the state after every accepted step (used
for branch-drift correction, chart switching and early termination).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import OdeToleranceNotMet, StepUnderflow

# Dormand-Prince 5(4) tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
    np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]),
]
_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_E = np.array([71 / 57600, 0.0, -71 / 16695, 71 / 1920,
               -17253 / 339200, 22 / 525, -1 / 40])

CONTINUE = "continue"
STOP = "stop"


@dataclass
class IntegrationResult:
    t: float
    y: np.ndarray
    stopped: bool
    n_steps: int
    records: list = field(default_factory=list)


def _error_norm(err: np.ndarray, y0: np.ndarray, y1: np.ndarray,
                rtol: float, atol: float) -> float:
    scale = atol + rtol * np.maximum(np.abs(y0), np.abs(y1))
    return float(np.max(np.abs(err) / scale))


def integrate(g, t0: float, t1: float, y0, rtol: float = 1e-12,
              atol: float = 1e-14, on_accept=None, record: bool = False,
              max_steps: int = 500_000, h0: float | None = None) -> IntegrationResult:
    """Integrate y' = g(t, y) from t0 to t1 (t1 > t0).

    ``on_accept(t, y) -> (y, action)`` runs after each accepted step; action
    ``STOP`` ends the integration at that point.  ``record=True`` stores
    ``(t, y, g(t, y))`` at every accepted step (plus the initial point).
    """
    y = np.atleast_1d(np.asarray(y0, dtype=complex)).copy()
    t = float(t0)
    span = t1 - t0
    if span <= 0.0:
        raise ValueError("t1 must exceed t0")
    f = np.atleast_1d(np.asarray(g(t, y), dtype=complex))
    if h0 is None:
        fn = float(np.max(np.abs(f)))
        yn = float(np.max(np.abs(y))) + 1.0
        h = min(span, 1e-2 * span, 0.1 * yn / (fn + 1e-300))
        h = max(h, 1e-12 * span)
    else:
        h = min(float(h0), span)

    records = []
    if record:
        records.append((t, y.copy(), f.copy()))
    k = np.empty((7,) + y.shape, dtype=complex)
    n = 0
    min_h = 1e-15 * max(1.0, abs(span))
    while t < t1:
        if n >= max_steps:
            raise OdeToleranceNotMet(f"step limit {max_steps} reached at t={t:.6g}")
        h = min(h, t1 - t)
        k[0] = f
        for i in range(1, 7):
            yi = y + h * np.tensordot(_A[i], k[:i], axes=(0, 0))
            k[i] = g(t + _C[i] * h, yi)
        y_new = y + h * np.tensordot(_B, k, axes=(0, 0))
        err = h * np.tensordot(_E, k, axes=(0, 0))
        enorm = _error_norm(err, y, y_new, rtol, atol)
        if not np.isfinite(enorm):
            h *= 0.25
            if h < min_h:
                raise StepUnderflow("non-finite error estimate at minimal step")
            continue
        if enorm > 1.0:
            h *= max(0.2, 0.9 * enorm ** -0.2)
            if h < min_h:
                raise StepUnderflow(f"step underflow at t={t:.6g}")
            continue
        t_new = t + h
        f_new = k[6].copy()  # FSAL: last stage sits at (t+h, y_new)
        n += 1
        y, t, f = y_new, t_new, f_new
        if on_accept is not None:
            y_adj, action = on_accept(t, y)
            if y_adj is not y:
                y = np.atleast_1d(np.asarray(y_adj, dtype=complex))
                f = np.atleast_1d(np.asarray(g(t, y), dtype=complex))
            if record:
                records.append((t, y.copy(), f.copy()))
            if action == STOP:
                return IntegrationResult(t, y, True, n, records)
        elif record:
            records.append((t, y.copy(), f.copy()))
        h *= min(5.0, max(0.2, 0.9 * enorm ** -0.2 if enorm > 0 else 5.0))
    return IntegrationResult(t, y, False, n, records)


def integrate_along_path(f, y0, waypoints, rtol: float = 1e-12,
                         atol: float = 1e-14, on_accept=None,
                         record: bool = False,
                         max_steps: int = 500_000) -> IntegrationResult:
    """Integrate y' = f(z, y) dz along the polyline through ``waypoints``.

    Each leg is parametrized linearly; ``on_accept`` receives the complex
    position instead of the leg parameter.  Returns the state at the final
    waypoint (or at the stop point).
    """
    y = np.atleast_1d(np.asarray(y0, dtype=complex))
    records = []
    steps = 0
    z_end = complex(waypoints[0])
    stopped = False
    for z0, z1 in zip(waypoints[:-1], waypoints[1:]):
        z0 = complex(z0)
        z1 = complex(z1)
        dz = z1 - z0
        if dz == 0:
            continue

        def g(t, yy, z0=z0, dz=dz):
            return np.atleast_1d(np.asarray(f(z0 + t * dz, yy), dtype=complex)) * dz

        hook = None
        if on_accept is not None:
            def hook(t, yy, z0=z0, dz=dz):
                return on_accept(z0 + t * dz, yy)

        res = integrate(g, 0.0, 1.0, y, rtol=rtol, atol=atol, on_accept=hook,
                        record=record, max_steps=max_steps)
        y = res.y
        steps += res.n_steps
        if record:
            records.extend((z0 + t * dz, yy, ff / dz) for t, yy, ff in res.records)
        z_end = z0 + res.t * dz
        if res.stopped:
            stopped = True
            break
    out = IntegrationResult(0.0, y, stopped, steps, records)
    out.z = z_end
    return out
