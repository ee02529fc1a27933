"""Solver for the quantization system on the cycle periods.

The system asks for points (a, b) with ``chi_2 = i pi (2n-1)`` and
``chi_-2 = i pi (2m-1)``.  Newton iteration uses the analytic Jacobian from
the period derivatives; new quantum numbers are reached by a short homotopy
in the right-hand side starting from the real (1,1) solution.  Solutions
with coprime odd integers generate whole q-sequences by exact rescaling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .elliptic import ParamPoint, PeriodData, Potential
from .errors import NewtonDiverged, NotType320
from .stokes import classify_graph, trace_stokes_lines

TOL_NEWTON = 1e-10
NEWTON_MAX_ITER = 50
NEWTON_MAX_HALVINGS = 30

#: Seed for the real primitive solution with n = m = 1.
PRIMITIVE_11_SEED = ParamPoint(-2.34, -0.064)


@dataclass(frozen=True)
class QuantumPair:
    """Quantization integers; primitive when 2n-1 and 2m-1 are coprime."""

    n: int
    m: int

    def __post_init__(self):
        if self.n < 1 or self.m < 1:
            raise ValueError("quantum numbers must be positive integers")

    @property
    def odd_n(self) -> int:
        return 2 * self.n - 1

    @property
    def odd_m(self) -> int:
        return 2 * self.m - 1

    @property
    def is_primitive(self) -> bool:
        return math.gcd(self.odd_n, self.odd_m) == 1

    @property
    def q(self) -> Fraction:
        return Fraction(self.odd_n, self.odd_m)


@dataclass(frozen=True)
class BsbSolution:
    """A solved quantization point, primitive (k = 0) or descendant."""

    point: ParamPoint
    quantum: QuantumPair
    residual: float
    q: Fraction
    k: int

    @property
    def scale_factor(self) -> float:
        return float(2 * self.k + 1)


def _period_residual(point: ParamPoint, target2: complex, targetm2: complex,
                     tol_quad: float = 1e-10):
    pd = PeriodData.compute(Potential(point.a, point.b), tol_quad)
    F = np.array([pd.chi2 - target2, pd.chi_m2 - targetm2])
    J = np.array([[pd.dchi2_da, pd.dchi2_db],
                  [pd.dchim2_da, pd.dchim2_db]])
    return F, J


def solve_period_targets(target2: complex, targetm2: complex, seed: ParamPoint,
                         tol_newton: float = TOL_NEWTON,
                         max_iter: int = NEWTON_MAX_ITER,
                         max_halvings: int = NEWTON_MAX_HALVINGS) -> tuple[ParamPoint, float]:
    """Newton with step-halving line search on the period residual norm."""
    x = np.array([seed.a, seed.b], dtype=complex)
    F, J = _period_residual(ParamPoint(x[0], x[1]), target2, targetm2)
    res = float(abs(F[0]) + abs(F[1]))
    for _ in range(max_iter):
        if res < tol_newton:
            return ParamPoint(x[0], x[1]), res
        step = np.linalg.solve(J, F)
        factor = 1.0
        for _ in range(max_halvings):
            x_try = x - factor * step
            try:
                F_try, J_try = _period_residual(
                    ParamPoint(x_try[0], x_try[1]), target2, targetm2)
            except Exception:
                factor *= 0.5
                continue
            res_try = float(abs(F_try[0]) + abs(F_try[1]))
            if res_try < res:
                x, F, J, res = x_try, F_try, J_try, res_try
                break
            factor *= 0.5
        else:
            raise NewtonDiverged(
                f"line search exhausted at residual {res:.3e}")
    if res < tol_newton:
        return ParamPoint(x[0], x[1]), res
    raise NewtonDiverged(f"no convergence after {max_iter} iterations "
                         f"(residual {res:.3e})")


def _homotopy_targets(quantum: QuantumPair):
    """Straight-line homotopy of the right-hand side from the (1,1) anchor."""
    s_end = np.array([quantum.odd_n * math.pi, quantum.odd_m * math.pi])
    s_start = np.array([math.pi, math.pi])
    span = float(np.max(np.abs(s_end - s_start)))
    n_steps = max(1, int(math.ceil(span / (0.6 * math.pi))))
    for i in range(1, n_steps + 1):
        s = s_start + (s_end - s_start) * (i / n_steps)
        yield 1j * s[0], 1j * s[1]


def solve_bsb(quantum: QuantumPair, seed: ParamPoint | None = None,
              tol_newton: float = TOL_NEWTON, verify_graph: bool = True) -> BsbSolution:
    """Solve the quantization system for the given quantum numbers.

    Without an explicit seed, the (1,1) case starts from the known real
    point and other cases continue from it along a homotopy in the
    right-hand side.  The converged point is checked to carry a "320" graph.
    """
    target2 = 1j * math.pi * quantum.odd_n
    targetm2 = 1j * math.pi * quantum.odd_m
    if seed is not None:
        point, res = solve_period_targets(target2, targetm2, seed, tol_newton)
    else:
        point = PRIMITIVE_11_SEED
        for t2, tm2 in _homotopy_targets(quantum):
            point, res = solve_period_targets(t2, tm2, point, tol_newton)
    if verify_graph:
        label = classify_graph(trace_stokes_lines(Potential(point.a, point.b)))
        if label != "320":
            raise NotType320(f"converged point {point} classifies as {label!r}")
    return BsbSolution(point=point, quantum=quantum, residual=res,
                       q=quantum.q, k=0)


def descendant(primitive: BsbSolution, k: int,
               tol_quad: float = 1e-10) -> BsbSolution:
    """The k-th rescaled solution ((2k+1)^(4/5) a, (2k+1)^(6/5) b).

    The residual is re-evaluated against the scaled right-hand sides
    i pi (2n-1)(2k+1), i pi (2m-1)(2k+1).
    """
    if primitive.k != 0:
        raise ValueError("descendant() expects a primitive solution")
    if not primitive.quantum.is_primitive:
        raise ValueError("quantum numbers are not coprime odd integers")
    if k < 0:
        raise ValueError("k must be a nonnegative integer")
    if k == 0:
        return primitive
    factor = float(2 * k + 1)
    point = ParamPoint(factor ** 0.8 * primitive.point.a,
                       factor ** 1.2 * primitive.point.b)
    pd = PeriodData.compute(Potential(point.a, point.b), tol_quad)
    target2 = 1j * math.pi * primitive.quantum.odd_n * (2 * k + 1)
    targetm2 = 1j * math.pi * primitive.quantum.odd_m * (2 * k + 1)
    res = abs(pd.chi2 - target2) + abs(pd.chi_m2 - targetm2)
    return BsbSolution(point=point, quantum=primitive.quantum,
                       residual=float(res), q=primitive.q, k=k)


def q_sequence(quantum: QuantumPair, K: int,
               tol_newton: float = TOL_NEWTON,
               verify_graph: bool = True) -> list[BsbSolution]:
    """[primitive, descendant(1), ..., descendant(K)] with verified residuals."""
    if not quantum.is_primitive:
        raise ValueError("q_sequence requires a primitive quantum pair")
    primitive = solve_bsb(quantum, tol_newton=tol_newton,
                          verify_graph=verify_graph)
    seq = [primitive]
    for k in range(1, K + 1):
        sol = descendant(primitive, k)
        if verify_graph:
            label = classify_graph(
                trace_stokes_lines(Potential(sol.point.a, sol.point.b)))
            if label != "320":
                raise NotType320(f"descendant k={k} classifies as {label!r}")
        seq.append(sol)
    return seq


def tilde_U(point: ParamPoint, tol_quad: float = 1e-10) -> tuple[complex, complex]:
    """(u~2 - 1, u~-2 - 1) with u~(+-2) = -exp(chi_(+-2)).

    Vanishes exactly at solutions of the quantization system.
    """
    pd = PeriodData.compute(Potential(point.a, point.b), tol_quad)
    return (-np.exp(pd.chi2) - 1.0, -np.exp(pd.chi_m2) - 1.0)


@dataclass(frozen=True)
class LinearizationFrame:
    """First-order data of u~(+-2) around a primitive solution.

    c2, c_m2 are the a-derivatives and d2, d_m2 the b-derivatives of the
    periods at the primitive; (z, w) are the rescaled coordinates
    z = (2k+1)^alpha (a - a_k), w = (2k+1)^beta (b - b_k).
    """

    c2: complex
    c_m2: complex
    d2: complex
    d_m2: complex
    alpha: float
    beta: float
    z: complex
    w: complex

    @property
    def jacobian_det(self) -> complex:
        return self.c2 * self.d_m2 - self.c_m2 * self.d2

    def exponents_in_range(self) -> bool:
        return 0.2 < self.alpha < 1.2 and -0.2 < self.beta < 0.8


def linearization_frame(primitive: BsbSolution, alpha: float, beta: float,
                        z: complex, w: complex,
                        tol_quad: float = 1e-10) -> LinearizationFrame:
    """Build the frame from period derivatives at the primitive point."""
    pd = PeriodData.compute(
        Potential(primitive.point.a, primitive.point.b), tol_quad)
    return LinearizationFrame(c2=pd.dchi2_da, c_m2=pd.dchim2_da,
                              d2=pd.dchi2_db, d_m2=pd.dchim2_db,
                              alpha=alpha, beta=beta, z=z, w=w)


def linearized_tilde_u(frame: LinearizationFrame, k: int) -> tuple[complex, complex]:
    """First-order predictions of (u~2, u~-2) at the rescaled coordinates."""
    if not frame.exponents_in_range():
        raise ValueError("frame exponents outside the admissible range")
    s = float(2 * k + 1)
    za = s ** (0.2 - frame.alpha) * frame.z
    wb = s ** (-0.2 - frame.beta) * frame.w
    return (1.0 + frame.c2 * za + frame.d2 * wb,
            1.0 + frame.c_m2 * za + frame.d_m2 * wb)
