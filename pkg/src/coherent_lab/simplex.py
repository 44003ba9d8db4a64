"""Exact bounded-variable primal simplex.

Solves ``min c.x  s.t.  A x = b,  0 <= x <= upper`` in exact arithmetic.

The tableau ``B^-1 A`` is kept fraction-free: an integer matrix ``T`` and an
integer ``d`` with ``B^-1 A = T / d`` (Bareiss/Edmonds integer pivoting).  For
the totally unimodular systems produced by :mod:`coherent_lab.coherence`,
``|d| == 1`` throughout and every entry is in {-1, 0, 1}, so the tableau lives
in an ``int64`` array.  Entries are promoted to Python integers (``object``
dtype) if they ever grow large enough to risk overflow.

Primal values are exact :class:`~fractions.Fraction` objects.  Entering and
leaving variables are chosen by Bland's smallest-index rule, which rules out
cycling on degenerate vertices.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

# int64 products of two entries below this bound cannot overflow after the
# "a*p - b*c" update.
_INT64_SAFE = 1 << 30


class LPStatus(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class LPResult:
    status: LPStatus
    x: Optional[tuple[Fraction, ...]]
    objective: Optional[Fraction]


def _lcm_denominator(values) -> int:
    out = 1
    for v in values:
        out = math.lcm(out, Fraction(v).denominator)
    return out


def _integer_row(row: Sequence) -> list[int]:
    row = [Fraction(v) for v in row]
    if any(v.denominator != 1 for v in row):
        raise ValueError("tableau rows must be integral; scale them first")
    return [int(v) for v in row]


class ExactSimplex:
    """Simplex state over a fixed constraint system ``A x = b``.

    ``basis[i]`` names the column that is basic in row ``i``; that column of
    ``A`` must be ``+e_i`` or ``-e_i`` (rows with ``-e_i`` are negated), and the
    resulting basic solution ``x_B = b`` must respect the bounds.  ``A`` must
    be integral.  ``upper[j] is None`` means no upper bound.

    The object can be re-optimised after :meth:`set_cost` or
    :meth:`set_upper`, reusing the current basis as a warm start.
    """

    def __init__(
        self,
        A: Sequence[Sequence],
        b: Sequence,
        upper: Sequence[Optional[Fraction]],
        basis: Sequence[int],
    ) -> None:
        m = len(A)
        n = len(upper)
        if len(b) != m or len(basis) != m:
            raise ValueError("A, b and basis disagree on the number of rows")
        rows = [_integer_row(r) for r in A]
        if any(len(r) != n for r in rows):
            raise ValueError("every row of A needs one entry per variable")
        b = [Fraction(v) for v in b]
        for i, j in enumerate(basis):
            col = [rows[k][j] for k in range(m)]
            if any(col[k] != 0 for k in range(m) if k != i) or abs(col[i]) != 1:
                raise ValueError(f"basis column {j} is not a unit vector for row {i}")
            if col[i] == -1:
                rows[i] = [-v for v in rows[i]]
                b[i] = -b[i]
        self.m, self.n = m, n
        self.upper: list[Optional[Fraction]] = [
            None if u is None else Fraction(u) for u in upper
        ]
        if any(u is not None and u < 0 for u in self.upper):
            raise ValueError("upper bounds must be nonnegative")
        # row m holds the reduced-cost row, updated by the same pivots
        self.T = np.zeros((m + 1, n), dtype=np.int64)
        if rows:
            big = max((abs(v) for r in rows for v in r), default=0)
            if big >= _INT64_SAFE:
                self.T = self.T.astype(object)
            self.T[:m] = np.array(rows, dtype=self.T.dtype)
        self.d = 1
        self.basis = list(basis)
        self.is_basic = np.zeros(n, dtype=bool)
        self.is_basic[self.basis] = True
        self.x: list[Fraction] = [Fraction(0)] * n
        for i, j in enumerate(self.basis):
            self.x[j] = b[i]
            if b[i] < 0 or (self.upper[j] is not None and b[i] > self.upper[j]):
                raise ValueError(f"initial basic value x[{j}] = {b[i]} violates its bounds")
        self.at_upper = np.zeros(n, dtype=bool)
        self.cost: list[Fraction] = [Fraction(0)] * n
        self.pivots = 0

    # -- cost handling ---------------------------------------------------

    def set_cost(self, c: Sequence) -> None:
        """Install a new objective; reduced costs are rebuilt for the current basis."""
        if len(c) != self.n:
            raise ValueError("cost vector has the wrong length")
        self.cost = [Fraction(v) for v in c]
        scale = _lcm_denominator(self.cost)
        c_int = [int(v * scale) for v in self.cost]
        reduced = np.array(c_int, dtype=object) * self.d
        for i, j in enumerate(self.basis):
            if c_int[j]:
                reduced = reduced - c_int[j] * self.T[i].astype(object)
        self._store_row(self.m, reduced)

    def set_upper(self, j: int, value: Optional[Fraction]) -> None:
        """Change the upper bound of variable ``j``; the current point must stay feasible."""
        value = None if value is None else Fraction(value)
        if value is not None and not (0 <= self.x[j] <= value):
            raise ValueError(f"x[{j}] = {self.x[j]} would violate the new bound {value}")
        if value is not None and not self.is_basic[j] and self.at_upper[j] and self.x[j] != value:
            raise ValueError("cannot move the bound of a nonbasic variable sitting on it")
        self.upper[j] = value
        if not self.is_basic[j]:
            self.at_upper[j] = value is not None and value == self.x[j] and value != 0

    @property
    def objective(self) -> Fraction:
        return sum((c * v for c, v in zip(self.cost, self.x) if c), Fraction(0))

    def values(self) -> tuple[Fraction, ...]:
        return tuple(self.x)

    # -- pivoting --------------------------------------------------------

    def _store_row(self, i: int, row) -> None:
        row = np.asarray(row, dtype=object)
        if self.T.dtype != object:
            big = max((abs(int(v)) for v in row), default=0)
            if big >= _INT64_SAFE:
                self.T = self.T.astype(object)
            else:
                row = row.astype(np.int64)
        self.T[i] = row

    def _entering(self) -> Optional[tuple[int, int]]:
        """Smallest-index improving nonbasic column and its direction (+1/-1)."""
        reduced = self.T[self.m]
        sign_d = 1 if self.d > 0 else -1
        candidates = np.nonzero(reduced)[0]
        for j in candidates:
            if self.is_basic[j]:
                continue
            s = sign_d * (1 if reduced[j] > 0 else -1)
            if s < 0 and not self.at_upper[j]:
                if self.upper[j] is None or self.upper[j] > 0:
                    return int(j), 1
            elif s > 0 and self.at_upper[j]:
                return int(j), -1
        return None

    def _pivot(self, r: int, j: int) -> None:
        T = self.T
        p = T[r, j]
        col = T[:, j].copy()
        pivot_row = T[r].copy()
        if T.dtype != object:
            big = max(int(np.abs(T).max()), abs(int(p)))
            if big >= _INT64_SAFE:
                T = T.astype(object)
                col = col.astype(object)
                pivot_row = pivot_row.astype(object)
                p = int(p)
        new = (T * p - np.outer(col, pivot_row)) // self.d
        new[r] = pivot_row
        self.T = new
        self.d = int(p)
        leaving = self.basis[r]
        self.basis[r] = j
        self.is_basic[leaving] = False
        self.is_basic[j] = True
        self.at_upper[j] = False
        self.pivots += 1

    def optimize(self, max_pivots: Optional[int] = None) -> LPStatus:
        """Run primal simplex from the current basis to optimality."""
        while True:
            if max_pivots is not None and self.pivots >= max_pivots:
                raise RuntimeError("pivot limit reached")
            choice = self._entering()
            if choice is None:
                return LPStatus.OPTIMAL
            j, sigma = choice
            column = self.T[: self.m, j]
            d = self.d

            # ratio test: entering moves by sigma * theta, basic row i by -sigma*theta*alpha_i
            theta: Optional[Fraction] = None
            leave_row = -1
            leave_to_upper = False
            flip = self.upper[j]  # bound-to-bound move of the entering variable
            for i in np.nonzero(column)[0]:
                g = Fraction(int(column[i]) * sigma, d)
                k = self.basis[i]
                if g > 0:
                    limit = self.x[k] / g
                    to_upper = False
                elif self.upper[k] is not None:
                    limit = (self.upper[k] - self.x[k]) / (-g)
                    to_upper = True
                else:
                    continue
                if (
                    theta is None
                    or limit < theta
                    or (limit == theta and k < self.basis[leave_row])
                ):
                    theta, leave_row, leave_to_upper = limit, int(i), to_upper
            if flip is not None and (theta is None or flip <= theta):
                theta, leave_row = flip, -1
            if theta is None:
                return LPStatus.UNBOUNDED

            if theta:
                self.x[j] += sigma * theta
                for i in np.nonzero(column)[0]:
                    k = self.basis[i]
                    self.x[k] -= sigma * theta * Fraction(int(column[i]), d)
            if leave_row < 0:
                self.at_upper[j] = sigma > 0
                self.x[j] = self.upper[j] if sigma > 0 else Fraction(0)
                continue
            leaving = self.basis[leave_row]
            self.x[leaving] = self.upper[leaving] if leave_to_upper else Fraction(0)
            self._pivot(leave_row, j)
            self.at_upper[leaving] = leave_to_upper


def minimize(
    c: Sequence,
    A: Sequence[Sequence],
    b: Sequence,
    upper: Optional[Sequence[Optional[Fraction]]] = None,
) -> LPResult:
    """Two-phase exact solve of ``min c.x  s.t.  A x = b, 0 <= x <= upper``.

    ``A`` and ``b`` may hold arbitrary rationals; rows are scaled to integers
    before an artificial basis is appended.
    """
    m = len(A)
    n = len(c)
    upper = [None] * n if upper is None else list(upper)
    rows, rhs = [], []
    for row, bi in zip(A, b):
        row = [Fraction(v) for v in row]
        scale = _lcm_denominator(row)
        rows.append([v * scale for v in row])
        rhs.append(Fraction(bi) * scale)
    for i in range(m):
        if rhs[i] < 0:
            rows[i] = [-v for v in rows[i]]
            rhs[i] = -rhs[i]
    # phase 1: one artificial per row
    full = [row + [1 if k == i else 0 for k in range(m)] for i, row in enumerate(rows)]
    lp = ExactSimplex(full, rhs, upper + [None] * m, [n + i for i in range(m)])
    lp.set_cost([0] * n + [1] * m)
    lp.optimize()
    if lp.objective != 0:
        return LPResult(LPStatus.INFEASIBLE, None, None)
    for k in range(n, n + m):
        lp.set_upper(k, Fraction(0))
    lp.set_cost(list(c) + [0] * m)
    status = lp.optimize()
    if status is LPStatus.UNBOUNDED:
        return LPResult(status, None, None)
    x = lp.values()[:n]
    return LPResult(status, x, sum((Fraction(ci) * xi for ci, xi in zip(c, x)), Fraction(0)))
