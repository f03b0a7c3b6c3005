"""Small dense simplex routines for the convertibility solvers.

The LPs here are tiny (tens of variables), so a plain dense tableau with
Bland's anti-cycling rule is both sufficient and fully deterministic, which
keeps feasibility certificates reproducible run to run.
"""

from __future__ import annotations

import numpy as np

FEASIBILITY_TOL = 1e-9


def _pivot(tableau: np.ndarray, basis: list[int], row: int, col: int) -> None:
    tableau[row] /= tableau[row, col]
    for r in range(tableau.shape[0]):
        if r != row and tableau[r, col] != 0.0:
            tableau[r] -= tableau[r, col] * tableau[row]
    basis[row] = col


def _solve_min(
    cost: np.ndarray, a_eq: np.ndarray, b_eq: np.ndarray, basis: list[int]
) -> tuple[np.ndarray, float, list[int]]:
    """Minimize cost @ x subject to a_eq @ x = b_eq, x >= 0.

    ``basis`` must index an identity submatrix of ``a_eq`` with b_eq >= 0
    (callers supply artificial or slack columns).  Bland's rule: entering
    variable is the lowest-index negative reduced cost, leaving variable the
    lowest-index minimizer of the ratio test.
    """
    m, n = a_eq.shape
    tableau = np.zeros((m + 1, n + 1))
    tableau[:m, :n] = a_eq
    tableau[:m, n] = b_eq
    tableau[m, :n] = cost
    for r, c in enumerate(basis):
        if tableau[m, c] != 0.0:
            tableau[m] -= tableau[m, c] * tableau[r]

    while True:
        reduced = tableau[m, :n]
        entering = -1
        for j in range(n):
            if reduced[j] < -FEASIBILITY_TOL:
                entering = j
                break
        if entering < 0:
            break
        leaving = -1
        best = np.inf
        for r in range(m):
            coef = tableau[r, entering]
            if coef > FEASIBILITY_TOL:
                ratio = tableau[r, n] / coef
                if ratio < best - FEASIBILITY_TOL or (
                    abs(ratio - best) <= FEASIBILITY_TOL
                    and (leaving < 0 or basis[r] < basis[leaving])
                ):
                    best = ratio
                    leaving = r
        if leaving < 0:
            raise ArithmeticError("linear program is unbounded")
        _pivot(tableau, basis, leaving, entering)

    x = np.zeros(n)
    for r, c in enumerate(basis):
        x[c] = tableau[r, n]
    # the cost-row RHS accumulates minus the objective value
    return x, -float(tableau[m, n]), basis


def feasible_combination(a_eq: np.ndarray, b_eq: np.ndarray) -> np.ndarray | None:
    """Find x >= 0 with a_eq @ x = b_eq, or None if infeasible (phase 1)."""
    a_eq = np.asarray(a_eq, dtype=float)
    b_eq = np.asarray(b_eq, dtype=float).copy()
    m, n = a_eq.shape
    flip = b_eq < 0
    a_eq = a_eq.copy()
    a_eq[flip] *= -1
    b_eq[flip] *= -1
    full = np.hstack([a_eq, np.eye(m)])
    cost = np.concatenate([np.zeros(n), np.ones(m)])
    basis = list(range(n, n + m))
    x, objective, _ = _solve_min(cost, full, b_eq, basis)
    if objective > FEASIBILITY_TOL:
        return None
    return x[:n]


def maximize(
    cost: np.ndarray, a_ub: np.ndarray, b_ub: np.ndarray
) -> tuple[np.ndarray, float]:
    """Maximize cost @ x subject to a_ub @ x <= b_ub, x >= 0 (b_ub >= 0)."""
    a_ub = np.asarray(a_ub, dtype=float)
    b_ub = np.asarray(b_ub, dtype=float)
    cost = np.asarray(cost, dtype=float)
    if np.any(b_ub < -FEASIBILITY_TOL):
        raise ValueError("maximize expects nonnegative bounds")
    m, n = a_ub.shape
    full = np.hstack([a_ub, np.eye(m)])
    padded = np.concatenate([-cost, np.zeros(m)])
    basis = list(range(n, n + m))
    x, objective, _ = _solve_min(padded, full, np.maximum(b_ub, 0.0), basis)
    return x[:n], -objective
