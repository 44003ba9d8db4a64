"""Coherence, uniqueness, minimality and extremality of finitely supported measures.

For a measure ``m`` with atoms ``p`` write ``u_p`` for the part of ``m(p)``
assigned to ``mu`` (``nu`` takes the rest).  The pair ``(mu, nu)`` satisfies
the weighted marginal identities exactly when, for every column ``x = a``,

    sum_{p.x = a} u_p = a * m(column a)

and likewise for every row ``y = b``.  Together with ``0 <= u_p <= m(p)`` this
is a transportation polytope with box constraints; ``m`` is coherent iff the
polytope is nonempty.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable, NamedTuple, Optional, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from . import linalg
from .errors import (
    DomainError,
    EmptyMeasureError,
    NotARepresentationError,
    NotCoherentError,
    NullCellError,
    ParseError,
)
from .measures import (
    Atom,
    DiscreteMeasure,
    Point,
    measure_from_json,
    measure_to_json,
    scale_add,
)
from .rational import format_rational, parse_rational
from .simplex import ExactSimplex, LPStatus

# ---------------------------------------------------------------------------
# representation pairs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RepresentationPair:
    mu: DiscreteMeasure
    nu: DiscreteMeasure

    @property
    def total(self) -> DiscreteMeasure:
        return scale_add(1, self.mu, 1, self.nu)

    def to_dict(self) -> dict[str, Any]:
        return {"mu": measure_to_json(self.mu), "nu": measure_to_json(self.nu)}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "RepresentationPair":
        return cls(measure_from_json(data["mu"]), measure_from_json(data["nu"]))


def r_condition_residuals(
    mu: DiscreteMeasure, nu: DiscreteMeasure
) -> tuple[dict[Fraction, Fraction], dict[Fraction, Fraction]]:
    """Per-column and per-row residuals ``(1-a) mu(a) - a nu(a)``."""
    cols: dict[Fraction, Fraction] = {}
    rows: dict[Fraction, Fraction] = {}
    for atom in mu.atoms:
        cols[atom.x] = cols.get(atom.x, 0) + (1 - atom.x) * atom.weight
        rows[atom.y] = rows.get(atom.y, 0) + (1 - atom.y) * atom.weight
    for atom in nu.atoms:
        cols[atom.x] = cols.get(atom.x, 0) - atom.x * atom.weight
        rows[atom.y] = rows.get(atom.y, 0) - atom.y * atom.weight
    return cols, rows


def satisfies_r_conditions(mu: DiscreteMeasure, nu: DiscreteMeasure) -> bool:
    cols, rows = r_condition_residuals(mu, nu)
    return not any(cols.values()) and not any(rows.values())


# ---------------------------------------------------------------------------
# the feasibility system
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FeasibilitySystem:
    """Box-constrained transportation system for one measure.

    Constraint ``i < len(columns)`` is the column ``x = columns[i]``; the rest
    are rows ``y = rows[i - len(columns)]``.
    """

    points: tuple[Point, ...]
    upper: tuple[Fraction, ...]
    columns: tuple[Fraction, ...]
    rows: tuple[Fraction, ...]
    column_of: tuple[int, ...]
    row_of: tuple[int, ...]
    rhs: tuple[Fraction, ...]

    @property
    def n_variables(self) -> int:
        return len(self.points)

    @property
    def n_constraints(self) -> int:
        return len(self.columns) + len(self.rows)

    def constraint_of(self, p: int) -> tuple[int, int]:
        """Indices of the column and row constraints containing variable ``p``."""
        return self.column_of[p], len(self.columns) + self.row_of[p]

    def matrix(self) -> list[list[int]]:
        A = [[0] * self.n_variables for _ in range(self.n_constraints)]
        for p in range(self.n_variables):
            c, r = self.constraint_of(p)
            A[c][p] = 1
            A[r][p] = 1
        return A

    def residuals(self, u: Sequence[Fraction]) -> list[Fraction]:
        out = [-b for b in self.rhs]
        for p, value in enumerate(u):
            c, r = self.constraint_of(p)
            out[c] += value
            out[r] += value
        return out

    def violation(self, u: Sequence[Fraction]) -> Fraction:
        return sum((abs(v) for v in self.residuals(u)), Fraction(0))

    def in_box(self, u: Sequence[Fraction]) -> bool:
        return all(0 <= v <= w for v, w in zip(u, self.upper))

    def is_solution(self, u: Sequence[Fraction]) -> bool:
        return self.in_box(u) and not any(self.residuals(u))

    def components(self) -> list[list[int]]:
        """Atom indices grouped by connected component of the column/row graph."""
        nc = len(self.columns)
        size = self.n_constraints
        src = np.array(self.column_of, dtype=np.int64)
        dst = np.array(self.row_of, dtype=np.int64) + nc
        graph = coo_matrix((np.ones(len(src)), (src, dst)), shape=(size, size))
        _, label = connected_components(graph, directed=False)
        groups: dict[int, list[int]] = {}
        for p in range(self.n_variables):
            groups.setdefault(int(label[self.column_of[p]]), []).append(p)
        return list(groups.values())


def build_system(m: DiscreteMeasure) -> FeasibilitySystem:
    if not m:
        raise EmptyMeasureError()
    columns = sorted({a.x for a in m.atoms})
    rows = sorted({a.y for a in m.atoms})
    col_idx = {a: i for i, a in enumerate(columns)}
    row_idx = {b: i for i, b in enumerate(rows)}
    col_mass = [Fraction(0)] * len(columns)
    row_mass = [Fraction(0)] * len(rows)
    for a in m.atoms:
        col_mass[col_idx[a.x]] += a.weight
        row_mass[row_idx[a.y]] += a.weight
    rhs = [a * w for a, w in zip(columns, col_mass)] + [b * w for b, w in zip(rows, row_mass)]
    return FeasibilitySystem(
        points=m.support,
        upper=tuple(a.weight for a in m.atoms),
        columns=tuple(columns),
        rows=tuple(rows),
        column_of=tuple(col_idx[a.x] for a in m.atoms),
        row_of=tuple(row_idx[a.y] for a in m.atoms),
        rhs=tuple(rhs),
    )


class _ComponentLP:
    """Phase-1 (defect) LP restricted to one connected component.

    Variables: the component's ``u_p``, then one surplus and one deficit
    slack per constraint.  Objective: total slack.
    """

    def __init__(self, system: FeasibilitySystem, atoms: list[int]) -> None:
        self.atoms = atoms
        local: dict[int, int] = {}
        for p in atoms:
            for c in system.constraint_of(p):
                local.setdefault(c, len(local))
        self.constraints = sorted(local, key=local.get)
        k, mc = len(atoms), len(local)
        self.k, self.mc = k, mc
        n = k + 2 * mc
        A = [[0] * n for _ in range(mc)]
        for j, p in enumerate(atoms):
            for c in system.constraint_of(p):
                A[local[c]][j] = 1
        for i in range(mc):
            A[i][k + i] = 1
            A[i][k + mc + i] = -1
        b = [system.rhs[c] for c in self.constraints]
        upper = [system.upper[p] for p in atoms] + [None] * (2 * mc)
        self.lp = ExactSimplex(A, b, upper, basis=[k + i for i in range(mc)])
        self.lp.set_cost([0] * k + [1] * (2 * mc))
        status = self.lp.optimize()
        assert status is LPStatus.OPTIMAL
        self.defect = self.lp.objective
        self.u = self.lp.values()[:k]

    def fix_slacks(self) -> None:
        for j in range(self.k, self.k + 2 * self.mc):
            self.lp.set_upper(j, Fraction(0))

    def extreme_value(self, j: int, sense: int) -> tuple[Fraction, tuple[Fraction, ...]]:
        """Minimise (sense=+1) or maximise (sense=-1) local variable ``j``."""
        cost = [0] * (self.k + 2 * self.mc)
        cost[j] = sense
        self.lp.set_cost(cost)
        status = self.lp.optimize()
        assert status is LPStatus.OPTIMAL
        values = self.lp.values()[: self.k]
        return values[j], values


def _pair_from_u(m: DiscreteMeasure, u: Sequence[Fraction]) -> RepresentationPair:
    mu = DiscreteMeasure.from_atoms(Atom(a.x, a.y, v, a.label) for a, v in zip(m.atoms, u))
    nu = DiscreteMeasure.from_atoms(
        Atom(a.x, a.y, a.weight - v, a.label) for a, v in zip(m.atoms, u)
    )
    return RepresentationPair(mu, nu)


def _solve(m: DiscreteMeasure) -> tuple[FeasibilitySystem, list[_ComponentLP], list[Fraction]]:
    system = build_system(m)
    parts = [_ComponentLP(system, atoms) for atoms in system.components()]
    u = [Fraction(0)] * system.n_variables
    for part in parts:
        for p, value in zip(part.atoms, part.u):
            u[p] = value
    return system, parts, u


# ---------------------------------------------------------------------------
# coherence
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CoherenceReport:
    feasible: bool
    defect: Fraction
    representation: Optional[RepresentationPair] = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "feasible": self.feasible,
            "defect": format_rational(self.defect),
            "representation": None if self.representation is None else self.representation.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "CoherenceReport":
        rep = data.get("representation")
        return cls(
            feasible=bool(data["feasible"]),
            defect=parse_rational(data["defect"]),
            representation=None if rep is None else RepresentationPair.from_dict(rep),
        )


def check_coherence(m: DiscreteMeasure) -> CoherenceReport:
    """Decide coherence of ``m`` (any positive total mass) by exact phase-1 simplex.

    The defect is the least total absolute violation of the column and row
    constraints over the box ``0 <= u_p <= m(p)``; it is zero iff ``m`` is
    coherent.
    """
    _, parts, u = _solve(m)
    defect = sum((p.defect for p in parts), Fraction(0))
    if defect:
        return CoherenceReport(False, defect)
    return CoherenceReport(True, defect, _pair_from_u(m, u))


def coherence_defect(m: DiscreteMeasure) -> Fraction:
    return check_coherence(m).defect


# ---------------------------------------------------------------------------
# uniqueness
# ---------------------------------------------------------------------------


class UniquenessResult(NamedTuple):
    unique: bool
    witness: Optional[RepresentationPair]
    representation: RepresentationPair


def check_uniqueness(m: DiscreteMeasure) -> UniquenessResult:
    """Is the feasible polytope a single point?

    Each ``u_p`` is minimised and maximised over the polytope.  The first
    coordinate whose range is not a single point yields a second
    representation, returned as ``witness``.
    """
    _, parts, u = _solve(m)
    if any(part.defect for part in parts):
        raise NotCoherentError()
    primary = _pair_from_u(m, u)
    for part in parts:
        part.fix_slacks()
        for j, p in enumerate(part.atoms):
            for sense in (1, -1):
                value, local = part.extreme_value(j, sense)
                if value != u[p]:
                    alt = list(u)
                    for q, v in zip(part.atoms, local):
                        alt[q] = v
                    return UniquenessResult(False, _pair_from_u(m, alt), primary)
    return UniquenessResult(True, None, primary)


# ---------------------------------------------------------------------------
# minimality
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NullDirection:
    """Signed weights on supp(mu) and supp(nu)."""

    mu: tuple[tuple[Point, Fraction], ...]
    nu: tuple[tuple[Point, Fraction], ...]

    def to_dict(self) -> dict[str, Any]:
        def rows(entries):
            return [[format_rational(p[0]), format_rational(p[1]), format_rational(v)] for p, v in entries]

        return {"mu": rows(self.mu), "nu": rows(self.nu)}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "NullDirection":
        def entries(rows):
            return tuple(
                ((parse_rational(x), parse_rational(y)), parse_rational(v)) for x, y, v in rows
            )

        return cls(entries(data["mu"]), entries(data["nu"]))


class MinimalityResult(NamedTuple):
    minimal: bool
    witness: Optional[NullDirection]
    dimension: int
    epsilon: Optional[Fraction]

    def dominated_pair(self, rep: RepresentationPair) -> RepresentationPair:
        """``((mu, nu) + epsilon * witness) / 2``, dominated by and not proportional to ``rep``."""
        if self.witness is None or self.epsilon is None:
            raise ValueError("minimal representation has no dominated witness pair")
        half = Fraction(1, 2)

        def shift(measure: DiscreteMeasure, entries) -> DiscreteMeasure:
            delta = dict(entries)
            return DiscreteMeasure.from_atoms(
                (a.x, a.y, half * (a.weight + self.epsilon * delta.get(a.point, 0)))
                for a in measure.atoms
            )

        return RepresentationPair(shift(rep.mu, self.witness.mu), shift(rep.nu, self.witness.nu))


def homogeneous_system(rep: RepresentationPair) -> list[dict[int, Fraction]]:
    """Rows of the R-conditions over variables supp(mu) followed by supp(nu)."""
    k = len(rep.mu)
    cols: dict[Fraction, dict[int, Fraction]] = {}
    rows: dict[Fraction, dict[int, Fraction]] = {}
    for i, a in enumerate(rep.mu.atoms):
        cols.setdefault(a.x, {})[i] = 1 - a.x
        rows.setdefault(a.y, {})[i] = 1 - a.y
    for j, a in enumerate(rep.nu.atoms):
        cols.setdefault(a.x, {})[k + j] = -a.x
        rows.setdefault(a.y, {})[k + j] = -a.y
    return [cols[a] for a in sorted(cols)] + [rows[b] for b in sorted(rows)]


def check_minimality(rep: RepresentationPair) -> MinimalityResult:
    """Minimal iff the homogeneous R-system on the supports has a 1-dimensional kernel.

    The kernel always contains ``(mu, nu)``.  Any further direction ``d``
    gives the dominated pair ``((mu, nu) + eps*d) / 2`` with
    ``eps = min |w_i / d_i|``, which is not a multiple of ``(mu, nu)``.
    """
    if not satisfies_r_conditions(rep.mu, rep.nu):
        raise NotARepresentationError()
    weights = [a.weight for a in rep.mu.atoms] + [a.weight for a in rep.nu.atoms]
    if not weights:
        raise EmptyMeasureError()
    basis = linalg.nullspace(homogeneous_system(rep), len(weights))
    if len(basis) == 1:
        return MinimalityResult(True, None, 1, None)
    direction = next(v for v in basis if not _proportional(v, weights))
    epsilon = min(w / abs(d) for w, d in zip(weights, direction) if d)
    k = len(rep.mu)
    witness = NullDirection(
        mu=tuple((a.point, d) for a, d in zip(rep.mu.atoms, direction[:k])),
        nu=tuple((a.point, d) for a, d in zip(rep.nu.atoms, direction[k:])),
    )
    return MinimalityResult(False, witness, len(basis), epsilon)


def _proportional(v: Sequence[Fraction], w: Sequence[Fraction]) -> bool:
    pivot = next(i for i, x in enumerate(w) if x)
    ratio = v[pivot] / w[pivot]
    return all(a == ratio * b for a, b in zip(v, w))


# ---------------------------------------------------------------------------
# extremality
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExtremalityReport:
    """Verdicts for a normalised measure.

    For an incoherent measure ``unique`` and ``minimal`` are reported False
    and no witnesses are attached.
    """

    coherent: bool
    unique: bool
    minimal: bool
    extreme: bool
    defect: Fraction
    representation: Optional[RepresentationPair] = None
    witness_alt_representation: Optional[RepresentationPair] = None
    witness_null_direction: Optional[NullDirection] = None
    null_space_dimension: Optional[int] = None
    epsilon: Optional[Fraction] = None

    def to_dict(self) -> dict[str, Any]:
        def opt(value):
            return None if value is None else value.to_dict()

        return {
            "coherent": self.coherent,
            "unique": self.unique,
            "minimal": self.minimal,
            "extreme": self.extreme,
            "defect": format_rational(self.defect),
            "representation": opt(self.representation),
            "witness_alt_representation": opt(self.witness_alt_representation),
            "witness_null_direction": opt(self.witness_null_direction),
            "null_space_dimension": self.null_space_dimension,
            "epsilon": None if self.epsilon is None else format_rational(self.epsilon),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ExtremalityReport":
        def rep(key):
            value = data.get(key)
            return None if value is None else RepresentationPair.from_dict(value)

        null = data.get("witness_null_direction")
        eps = data.get("epsilon")
        return cls(
            coherent=bool(data["coherent"]),
            unique=bool(data["unique"]),
            minimal=bool(data["minimal"]),
            extreme=bool(data["extreme"]),
            defect=parse_rational(data["defect"]),
            representation=rep("representation"),
            witness_alt_representation=rep("witness_alt_representation"),
            witness_null_direction=None if null is None else NullDirection.from_dict(null),
            null_space_dimension=data.get("null_space_dimension"),
            epsilon=None if eps is None else parse_rational(eps),
        )


def check_extreme(m: DiscreteMeasure) -> ExtremalityReport:
    """Extreme point test: coherent, with a unique and minimal representation."""
    if not m:
        raise EmptyMeasureError()
    m = m.normalized()
    coherence = check_coherence(m)
    if not coherence.feasible:
        return ExtremalityReport(False, False, False, False, coherence.defect)
    uniq = check_uniqueness(m)
    rep = uniq.representation
    mini = check_minimality(rep)
    return ExtremalityReport(
        coherent=True,
        unique=uniq.unique,
        minimal=mini.minimal,
        extreme=uniq.unique and mini.minimal,
        defect=coherence.defect,
        representation=rep,
        witness_alt_representation=uniq.witness,
        witness_null_direction=mini.witness,
        null_space_dimension=mini.dimension,
        epsilon=mini.epsilon,
    )


# ---------------------------------------------------------------------------
# expert models:  X_i = P(E | G_i) on a finite outcome space
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExpertModel:
    """Finite probability space with an event and two partitions.

    Outcomes are numbered ``0 .. n-1``; probabilities are proportional to
    ``weights``.
    """

    weights: tuple[Fraction, ...]
    event: frozenset[int]
    partition1: tuple[frozenset[int], ...]
    partition2: tuple[frozenset[int], ...]

    def __post_init__(self) -> None:
        n = len(self.weights)
        if n == 0:
            raise DomainError("expert model needs at least one outcome")
        if any(w < 0 for w in self.weights):
            raise DomainError("outcome weights must be nonnegative")
        if not self.event <= frozenset(range(n)):
            raise DomainError("event refers to unknown outcomes")
        for partition in (self.partition1, self.partition2):
            seen: set[int] = set()
            for cell in partition:
                if seen & cell:
                    raise DomainError("partition cells overlap")
                seen |= cell
            if seen != set(range(n)):
                raise DomainError("partition does not cover the outcome set")

    @classmethod
    def build(
        cls,
        weights: Iterable,
        event: Iterable[int],
        partition1: Iterable[Iterable[int]],
        partition2: Iterable[Iterable[int]],
    ) -> "ExpertModel":
        return cls(
            tuple(Fraction(w) for w in weights),
            frozenset(event),
            tuple(frozenset(c) for c in partition1),
            tuple(frozenset(c) for c in partition2),
        )


def _conditional(model: ExpertModel, partition) -> dict[int, Fraction]:
    out = {}
    for cell in partition:
        mass = sum((model.weights[i] for i in cell), Fraction(0))
        if mass == 0:
            raise NullCellError()
        hit = sum((model.weights[i] for i in cell if i in model.event), Fraction(0))
        for i in cell:
            out[i] = hit / mass
    return out


def from_expert_model(model: ExpertModel) -> tuple[DiscreteMeasure, RepresentationPair]:
    """Joint law of ``(P(E|G1), P(E|G2))`` and its representation ``(P restricted to E, to E^c)``."""
    total = sum(model.weights, Fraction(0))
    if total <= 0:
        raise DomainError("total outcome weight must be positive")
    x = _conditional(model, model.partition1)
    y = _conditional(model, model.partition2)
    inside, outside = [], []
    for i, w in enumerate(model.weights):
        target = inside if i in model.event else outside
        target.append((x[i], y[i], w / total))
    mu = DiscreteMeasure.from_atoms(inside)
    nu = DiscreteMeasure.from_atoms(outside)
    return DiscreteMeasure.from_atoms(inside + outside), RepresentationPair(mu, nu)


def random_expert_model(rng: random.Random, max_outcomes: int = 8) -> ExpertModel:
    n = rng.randint(1, max_outcomes)
    weights = [Fraction(rng.randint(1, 12), rng.randint(1, 7)) for _ in range(n)]
    event = [i for i in range(n) if rng.random() < 0.5]

    def partition():
        cells = rng.randint(1, n)
        groups: dict[int, list[int]] = {}
        for i in range(n):
            groups.setdefault(rng.randrange(cells), []).append(i)
        return list(groups.values())

    return ExpertModel.build(weights, event, partition(), partition())


_CELL = re.compile(r"\[([^\[\]]*)\]")


def parse_expert_model(text: str) -> ExpertModel:
    """Read the four-line format ``weights`` / ``event`` / ``partition1`` / ``partition2``.

    Outcome indices in the file are 1-based.
    """
    lines = [
        (no, ln.strip())
        for no, ln in enumerate(text.splitlines(), start=1)
        if ln.strip() and not ln.strip().startswith("#")
    ]
    expected = ("weights", "event", "partition1", "partition2")
    if len(lines) != 4:
        raise ParseError(f"expected 4 lines ({', '.join(expected)}), got {len(lines)}")
    fields: dict[str, tuple[int, str]] = {}
    for (no, line), key in zip(lines, expected):
        head, _, rest = line.partition(" ")
        if head != key:
            raise ParseError(f"expected '{key}', got {head!r}", no)
        fields[key] = (no, rest.strip())

    no, rest = fields["weights"]
    try:
        weights = [parse_rational(t) for t in rest.split()]
    except ValueError as exc:
        raise ParseError(str(exc), no) from None
    n = len(weights)

    def indices(tokens: str, no: int) -> list[int]:
        try:
            out = [int(t) - 1 for t in tokens.split()]
        except ValueError:
            raise ParseError(f"bad outcome index in {tokens!r}", no) from None
        if any(not 0 <= i < n for i in out):
            raise ParseError("outcome index out of range", no)
        return out

    no, rest = fields["event"]
    event = indices(rest, no)
    partitions = []
    for key in ("partition1", "partition2"):
        no, rest = fields[key]
        if _CELL.sub("", rest).strip():
            raise ParseError(f"{key} must be a list of [..] cells", no)
        partitions.append([indices(cell, no) for cell in _CELL.findall(rest)])
    try:
        return ExpertModel.build(weights, event, *partitions)
    except DomainError as exc:
        raise ParseError(str(exc)) from None


def format_expert_model(model: ExpertModel) -> str:
    def cells(partition):
        return "".join("[" + " ".join(str(i + 1) for i in sorted(c)) + "]" for c in partition)

    return "\n".join(
        [
            "weights " + " ".join(format_rational(w) for w in model.weights),
            ("event " + " ".join(str(i + 1) for i in sorted(model.event))).rstrip(),
            "partition1 " + cells(model.partition1),
            "partition2 " + cells(model.partition2),
        ]
    ) + "\n"


def load_expert_model(path: str | Path) -> ExpertModel:
    return parse_expert_model(Path(path).read_text(encoding="utf-8"))
