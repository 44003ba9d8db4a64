"""Exact rational Gaussian elimination on sparse rows."""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Sequence

SparseRow = dict[int, Fraction]


def _sparse(row) -> SparseRow:
    if isinstance(row, Mapping):
        items = row.items()
    else:
        items = enumerate(row)
    return {int(j): Fraction(v) for j, v in items if v != 0}


def rref(rows: Iterable, ncols: int) -> tuple[list[SparseRow], list[int]]:
    """Reduced row echelon form.

    ``rows`` are dense sequences or ``{column: value}`` mappings.  Returns the
    nonzero reduced rows (pivot entry 1, zero elsewhere in pivot columns) and
    the pivot column of each.  Pivots are taken in increasing column order.
    """
    pending = [r for r in (_sparse(row) for row in rows) if r]
    for r in pending:
        if any(not 0 <= j < ncols for j in r):
            raise ValueError("column index out of range")
    reduced: list[SparseRow] = []
    pivots: list[int] = []
    for col in range(ncols):
        pick = None
        for idx, r in enumerate(pending):
            if col in r and (pick is None or len(r) < len(pending[pick])):
                pick = idx
        if pick is None:
            continue
        prow = pending.pop(pick)
        inv = 1 / prow[col]
        prow = {j: v * inv for j, v in prow.items()}
        for target in pending:
            f = target.get(col)
            if f:
                _axpy(target, -f, prow)
        for target in reduced:
            f = target.get(col)
            if f:
                _axpy(target, -f, prow)
        reduced.append(prow)
        pivots.append(col)
        pending = [r for r in pending if r]
    return reduced, pivots


def _axpy(target: SparseRow, factor: Fraction, source: SparseRow) -> None:
    for j, v in source.items():
        w = target.get(j, 0) + factor * v
        if w:
            target[j] = w
        else:
            target.pop(j, None)


def rank(rows: Iterable, ncols: int) -> int:
    return len(rref(rows, ncols)[1])


def nullspace(rows: Iterable, ncols: int) -> list[list[Fraction]]:
    """Basis of ``{x : A x = 0}``, one vector per free column.

    Each basis vector has a 1 in its free column and 0 in the other free
    columns.
    """
    reduced, pivots = rref(rows, ncols)
    pivot_set = set(pivots)
    basis = []
    for free in range(ncols):
        if free in pivot_set:
            continue
        v = [Fraction(0)] * ncols
        v[free] = Fraction(1)
        for prow, pcol in zip(reduced, pivots):
            coeff = prow.get(free)
            if coeff:
                v[pcol] = -coeff
        basis.append(v)
    return basis


def apply(rows: Sequence, x: Sequence[Fraction]) -> list[Fraction]:
    """Matrix-vector product for dense or sparse rows."""
    out = []
    for row in rows:
        r = _sparse(row)
        out.append(sum((v * x[j] for j, v in r.items()), Fraction(0)))
    return out
