"""Two-phase primal simplex for feasibility questions and small LPs.

Standard form: minimize ``c.x`` subject to ``A x = b`` and ``x >= 0``.
Pivot selection uses Bland's lowest-index rule throughout, which prevents
cycling and makes every run deterministic.  Two arithmetic backends are
provided: a float64 tableau driven by the compiled kernel, and exact
``fractions.Fraction`` arithmetic for rational inputs.  Infeasible systems
come back with a Farkas certificate ``y`` satisfying ``y.A >= 0``
componentwise and ``y.b < 0``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

import numpy as np

from ._kernels import LOOP_ITER_LIMIT, LOOP_OPTIMAL, LOOP_UNBOUNDED, simplex_loop
from .errors import NumericError, ValidationError

DEFAULT_FEAS_TOL = 1e-9
DEFAULT_PIVOT_TOL = 1e-11

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass
class LPResult:
    """Solver outcome; exactly one of ``x`` / ``certificate`` is set."""

    status: str
    x: object = None           # ndarray (float mode) or list[Fraction]
    objective: object = None
    certificate: object = None  # Farkas vector over the original rows

    @property
    def feasible(self) -> bool:
        return self.status == OPTIMAL


def _default_iterations(m: int, n: int) -> int:
    return 200 * (m + n) + 2000


# ---------------------------------------------------------------------------
# float backend
# ---------------------------------------------------------------------------

def _manual_pivot(tableau: np.ndarray, basis: np.ndarray, row: int, col: int) -> None:
    # mirrors the kernel's pivot arithmetic exactly
    tableau[row, :] /= tableau[row, col]
    column = tableau[:, col].copy()
    column[row] = 0.0
    tableau -= np.outer(column, tableau[row, :])
    basis[row] = col


def solve_lp_float(A, b, c=None, *, feas_tol: float = DEFAULT_FEAS_TOL,
                   pivot_tol: float = DEFAULT_PIVOT_TOL,
                   max_iter: int | None = None,
                   backend: str | None = None) -> LPResult:
    """Solve min c.x, A x = b, x >= 0 in floating point."""
    A = np.array(A, dtype=float)
    b = np.array(b, dtype=float)
    if A.ndim != 2 or b.shape != (A.shape[0],):
        raise ValidationError(f"incompatible LP shapes A{A.shape}, b{b.shape}")
    m, n = A.shape
    c = np.zeros(n) if c is None else np.array(c, dtype=float)
    if c.shape != (n,):
        raise ValidationError(f"cost vector must have length {n}")

    flips = np.where(b < 0.0, -1.0, 1.0)
    A *= flips[:, None]
    b *= flips

    tableau = np.zeros((m + 1, n + m + 1))
    tableau[:m, :n] = A
    tableau[:m, n:n + m] = np.eye(m)
    tableau[:m, -1] = b
    tableau[m, :n] = -A.sum(axis=0)
    tableau[m, -1] = -b.sum()
    basis = np.arange(n, n + m, dtype=np.int64)
    iterations = max_iter if max_iter is not None else _default_iterations(m, n)

    code = simplex_loop(tableau, basis, n, pivot_tol, iterations, backend)
    if code != LOOP_OPTIMAL:
        raise NumericError(f"phase-1 simplex did not terminate cleanly (code {code})")

    phase1_objective = -tableau[m, -1]
    if phase1_objective > feas_tol:
        duals = 1.0 - tableau[m, n:n + m]
        certificate = -(flips * duals)
        return LPResult(status=INFEASIBLE, certificate=certificate)

    # drive leftover artificials out of the basis; drop redundant rows
    drop: list[int] = []
    for r in range(m):
        if basis[r] >= n:
            pivot_col = -1
            for j in range(n):
                if abs(tableau[r, j]) > pivot_tol:
                    pivot_col = j
                    break
            if pivot_col < 0:
                drop.append(r)
            else:
                _manual_pivot(tableau, basis, r, pivot_col)
    keep = [r for r in range(m) if r not in drop]
    cols = list(range(n)) + [n + m]
    tableau = np.ascontiguousarray(tableau[np.ix_(keep + [m], cols)])
    basis = basis[keep].copy()
    m2 = len(keep)

    if np.any(c != 0.0):
        tableau[m2, :n] = c
        tableau[m2, -1] = 0.0
        for i in range(m2):
            weight = c[basis[i]]
            if weight != 0.0:
                tableau[m2, :] -= weight * tableau[i, :]
        code = simplex_loop(tableau, basis, n, pivot_tol, iterations, backend)
        if code == LOOP_UNBOUNDED:
            return LPResult(status=UNBOUNDED)
        if code == LOOP_ITER_LIMIT:
            raise NumericError("phase-2 simplex hit the iteration limit")

    x = np.zeros(n)
    for i in range(m2):
        x[basis[i]] = tableau[i, -1]
    return LPResult(status=OPTIMAL, x=x, objective=float(c @ x))


# ---------------------------------------------------------------------------
# exact backend
# ---------------------------------------------------------------------------

def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, Rational) or isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if not value.is_integer():
            raise ValidationError(f"exact mode requires rational inputs, got float {value!r}")
        return Fraction(int(value))
    raise ValidationError(f"exact mode cannot coerce {value!r} to a rational")


def _exact_pivot(tableau: list[list[Fraction]], basis: list[int], row: int, col: int) -> None:
    pivot = tableau[row][col]
    tableau[row] = [v / pivot for v in tableau[row]]
    pivot_row = tableau[row]
    for i, current in enumerate(tableau):
        if i == row:
            continue
        factor = current[col]
        if factor:
            tableau[i] = [v - factor * p for v, p in zip(current, pivot_row)]
    basis[row] = col


def _exact_loop(tableau: list[list[Fraction]], basis: list[int], n_eligible: int,
                max_iter: int) -> int:
    m = len(tableau) - 1
    last = len(tableau[0]) - 1
    for _ in range(max_iter):
        cost_row = tableau[m]
        enter = -1
        for j in range(n_eligible):
            if cost_row[j] < 0:
                enter = j
                break
        if enter < 0:
            return LOOP_OPTIMAL
        best_ratio = None
        leave = -1
        for i in range(m):
            coef = tableau[i][enter]
            if coef > 0:
                ratio = tableau[i][last] / coef
                if best_ratio is None or ratio < best_ratio or (
                        ratio == best_ratio and basis[i] < basis[leave]):
                    best_ratio = ratio
                    leave = i
        if leave < 0:
            return LOOP_UNBOUNDED
        _exact_pivot(tableau, basis, leave, enter)
    return LOOP_ITER_LIMIT


def solve_lp_exact(A, b, c=None, *, max_iter: int | None = None) -> LPResult:
    """Solve min c.x, A x = b, x >= 0 in exact rational arithmetic."""
    rows = [[_as_fraction(v) for v in row] for row in A]
    rhs = [_as_fraction(v) for v in b]
    m = len(rows)
    if m == 0 or len(rhs) != m:
        raise ValidationError("exact LP needs at least one constraint row and matching rhs")
    n = len(rows[0])
    if any(len(row) != n for row in rows):
        raise ValidationError("constraint rows must share one length")
    cost = [Fraction(0)] * n if c is None else [_as_fraction(v) for v in c]
    if len(cost) != n:
        raise ValidationError(f"cost vector must have length {n}")

    flips = [Fraction(-1) if v < 0 else Fraction(1) for v in rhs]
    rows = [[f * v for v in row] for f, row in zip(flips, rows)]
    rhs = [f * v for f, v in zip(flips, rhs)]

    zero, one = Fraction(0), Fraction(1)
    tableau: list[list[Fraction]] = []
    for i in range(m):
        art = [one if k == i else zero for k in range(m)]
        tableau.append(list(rows[i]) + art + [rhs[i]])
    objective_row = [zero] * (n + m + 1)
    for j in range(n):
        objective_row[j] = -sum(rows[i][j] for i in range(m))
    objective_row[-1] = -sum(rhs)
    tableau.append(objective_row)
    basis = list(range(n, n + m))
    iterations = max_iter if max_iter is not None else _default_iterations(m, n)

    code = _exact_loop(tableau, basis, n, iterations)
    if code != LOOP_OPTIMAL:
        raise NumericError(f"exact phase-1 simplex did not terminate cleanly (code {code})")

    phase1_objective = -tableau[m][-1]
    if phase1_objective > 0:
        duals = [one - tableau[m][n + i] for i in range(m)]
        certificate = [-(f * y) for f, y in zip(flips, duals)]
        return LPResult(status=INFEASIBLE, certificate=certificate)

    drop: list[int] = []
    for r in range(m):
        if basis[r] >= n:
            pivot_col = next((j for j in range(n) if tableau[r][j] != 0), -1)
            if pivot_col < 0:
                drop.append(r)
            else:
                _exact_pivot(tableau, basis, r, pivot_col)
    keep = [r for r in range(m) if r not in drop]
    tableau = [[tableau[r][j] for j in list(range(n)) + [n + m]] for r in keep + [m]]
    basis = [basis[r] for r in keep]
    m2 = len(keep)

    if any(v != 0 for v in cost):
        tableau[m2] = list(cost) + [zero]
        for i in range(m2):
            weight = cost[basis[i]]
            if weight:
                tableau[m2] = [v - weight * p for v, p in zip(tableau[m2], tableau[i])]
        code = _exact_loop(tableau, basis, n, iterations)
        if code == LOOP_UNBOUNDED:
            return LPResult(status=UNBOUNDED)
        if code == LOOP_ITER_LIMIT:
            raise NumericError("exact phase-2 simplex hit the iteration limit")

    x = [zero] * n
    for i in range(m2):
        x[basis[i]] = tableau[i][-1]
    objective = sum(ci * xi for ci, xi in zip(cost, x))
    return LPResult(status=OPTIMAL, x=x, objective=objective)


def solve_lp(A, b, c=None, *, exact: bool = False, backend: str | None = None,
             max_iter: int | None = None) -> LPResult:
    """Dispatch to the exact or floating solver (``backend`` applies to float only)."""
    if exact:
        return solve_lp_exact(A, b, c, max_iter=max_iter)
    return solve_lp_float(A, b, c, backend=backend, max_iter=max_iter)


def verify_certificate(A, b, certificate, tol: float = 1e-9) -> bool:
    """Check the Farkas conditions ``y.A >= 0`` (componentwise) and ``y.b < 0``.

    Exact inputs are checked exactly; float inputs within an absolute
    tolerance scaled by the certificate magnitude.
    """
    if certificate is None:
        return False
    if all(isinstance(v, Rational) for v in certificate):
        cols = len(A[0])
        combo = [sum(certificate[i] * A[i][j] for i in range(len(A))) for j in range(cols)]
        rhs = sum(ci * bi for ci, bi in zip(certificate, b))
        return all(v >= 0 for v in combo) and rhs < 0
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    y = np.asarray(certificate, dtype=float)
    scale = max(1.0, float(np.max(np.abs(y))))
    combo = y @ A
    rhs = float(y @ b)
    return bool(combo.min() >= -tol * scale and rhs < -tol * scale)
