"""Exact linear programming over arbitrary-precision rationals.

A dense two-phase simplex with Bland's rule, so every pivot is exact and
termination is guaranteed.  Problems are stated over nonnegative variables:

    optimize c.x   subject to   A_eq x = b_eq,  A_le x <= b_le,  x >= 0

When the constraints are infeasible the result carries a Farkas certificate
``y`` (one multiplier per constraint row, equality rows first) satisfying

    sum_i y_i * row_i <= 0  componentwise over the variables,
    y_i <= 0 for every inequality row,
    y . b > 0,

which refutes feasibility by inspection.  Callers with free variables split
them into differences of nonnegative ones.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

__all__ = ["LPResult", "solve_lp", "feasible_point"]

_ZERO = Fraction(0)
_ONE = Fraction(1)


@dataclass(frozen=True)
class LPResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: tuple[Fraction, ...] | None = None
    objective: Fraction | None = None
    farkas: tuple[Fraction, ...] | None = None

    @property
    def is_optimal(self) -> bool:
        return self.status == "optimal"


def _to_frac_matrix(rows: Sequence[Sequence]) -> list[list[Fraction]]:
    return [[Fraction(v) for v in row] for row in rows]


def solve_lp(
    c: Sequence,
    A_eq: Sequence[Sequence] = (),
    b_eq: Sequence = (),
    A_le: Sequence[Sequence] = (),
    b_le: Sequence = (),
    maximize: bool = False,
) -> LPResult:
    """Solve the LP exactly; see the module docstring for conventions."""
    c = [Fraction(v) for v in c]
    A_eq = _to_frac_matrix(A_eq)
    b_eq = [Fraction(v) for v in b_eq]
    A_le = _to_frac_matrix(A_le)
    b_le = [Fraction(v) for v in b_le]
    n = len(c)
    for row in A_eq + A_le:
        if len(row) != n:
            raise ValueError("constraint row length does not match the objective")
    if maximize:
        c = [-v for v in c]

    m_eq, m_le = len(A_eq), len(A_le)
    m = m_eq + m_le
    n_slack = m_le
    n_total = n + n_slack + m  # structural, slack, artificial

    # Rows: equalities first, then inequalities with unit slacks.
    rows: list[list[Fraction]] = []
    rhs: list[Fraction] = []
    scale: list[int] = []  # row sign flips applied to make rhs nonnegative
    for i in range(m_eq):
        rows.append(list(A_eq[i]) + [_ZERO] * n_slack)
        rhs.append(b_eq[i])
    for k in range(m_le):
        slack = [_ZERO] * n_slack
        slack[k] = _ONE
        rows.append(list(A_le[k]) + slack)
        rhs.append(b_le[k])
    for i in range(m):
        if rhs[i] < 0:
            rows[i] = [-v for v in rows[i]]
            rhs[i] = -rhs[i]
            scale.append(-1)
        else:
            scale.append(1)

    # Tableau with one artificial per row (identity block = basis inverse).
    tableau = [rows[i] + [_ONE if j == i else _ZERO for j in range(m)] + [rhs[i]] for i in range(m)]
    basis = [n + n_slack + i for i in range(m)]

    def pivot(row: int, col: int) -> None:
        piv = tableau[row][col]
        inv = 1 / piv
        tableau[row] = [v * inv for v in tableau[row]]
        prow = tableau[row]
        for r in range(m):
            if r == row:
                continue
            factor = tableau[r][col]
            if factor:
                tableau[r] = [v - factor * p for v, p in zip(tableau[r], prow)]
        basis[row] = col

    def run_simplex(cost: list[Fraction], allowed: int) -> list[Fraction]:
        """Minimize cost over the current tableau; returns the reduced-cost row.

        ``allowed`` bounds the entering columns (artificials are barred in
        phase two by passing a smaller count).  Returns None-like sentinel
        via exception for unboundedness.
        """
        while True:
            # reduced costs: z_j = cost_j - cost_B . column_j
            cb = [cost[b] for b in basis]
            entering = -1
            for j in range(allowed):
                if j in basis:
                    continue
                rc = cost[j] - sum(cb[i] * tableau[i][j] for i in range(m))
                if rc < 0:
                    entering = j
                    break  # Bland: first improving index
            if entering < 0:
                return [
                    cost[j] - sum(cb[i] * tableau[i][j] for i in range(m))
                    for j in range(n_total)
                ]
            leaving = -1
            best = None
            for i in range(m):
                a = tableau[i][entering]
                if a > 0:
                    ratio = tableau[i][-1] / a
                    if best is None or ratio < best or (ratio == best and basis[i] < basis[leaving]):
                        best = ratio
                        leaving = i
            if leaving < 0:
                raise _Unbounded()
            pivot(leaving, entering)

    class _Unbounded(Exception):
        pass

    # Phase one: drive the artificials out.
    phase1_cost = [_ZERO] * (n + n_slack) + [_ONE] * m
    try:
        reduced = run_simplex(phase1_cost, n_total)
    except _Unbounded:  # pragma: no cover - phase-one objective is bounded below by 0
        raise AssertionError("phase-one simplex cannot be unbounded")
    infeasibility = sum(tableau[i][-1] for i in range(m) if basis[i] >= n + n_slack)
    if infeasibility > 0:
        # Dual solution read off the artificial columns: y_i = 1 - rc(artificial_i),
        # mapped back through the row sign flips.
        y = [(_ONE - reduced[n + n_slack + i]) * scale[i] for i in range(m)]
        return LPResult(status="infeasible", farkas=tuple(y))

    # Remove artificials still stuck in the basis at level zero.
    for i in range(m):
        if basis[i] >= n + n_slack:
            pivot_col = next(
                (j for j in range(n + n_slack) if j not in basis and tableau[i][j] != 0),
                None,
            )
            if pivot_col is not None:
                pivot(i, pivot_col)
            # else: redundant row; the artificial stays basic at value zero.

    phase2_cost = list(c) + [_ZERO] * (n_slack + m)
    try:
        run_simplex(phase2_cost, n + n_slack)
    except _Unbounded:
        return LPResult(status="unbounded")

    x = [_ZERO] * n
    for i, b in enumerate(basis):
        if b < n:
            x[b] = tableau[i][-1]
    objective = sum(ci * xi for ci, xi in zip(c, x))
    if maximize:
        objective = -objective
    return LPResult(status="optimal", x=tuple(x), objective=objective)


def feasible_point(
    A_eq: Sequence[Sequence] = (),
    b_eq: Sequence = (),
    A_le: Sequence[Sequence] = (),
    b_le: Sequence = (),
) -> LPResult:
    """Feasibility of the system over nonnegative variables (zero objective)."""
    n = len(A_eq[0]) if A_eq else (len(A_le[0]) if A_le else 0)
    return solve_lp([_ZERO] * n, A_eq, b_eq, A_le, b_le)
