"""Finitely supported nonnegative measures on the unit square and the unit interval.

Atoms are stored in canonical order (sorted by position) with exact
:class:`~fractions.Fraction` coordinates and weights.  Duplicate positions are
merged when a measure is built and zero weights are never stored, so two
measures are equal exactly when they assign the same mass to every point.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Iterable, Iterator, Mapping, Optional

from .errors import DomainError, ParseError
from .rational import RationalLike, as_rational, format_rational, parse_rational

DIAGONAL = "diagonal"
GRAPH = "graph"
LABELS = (DIAGONAL, GRAPH)

Point = tuple[Fraction, Fraction]

# Label spellings used by the text format.
_LABEL_TOKENS = {"diag": DIAGONAL, "graph": GRAPH}
_TOKEN_FOR_LABEL = {DIAGONAL: "diag", GRAPH: "graph"}


def _unit(value: Fraction, what: str) -> Fraction:
    if not 0 <= value <= 1:
        raise DomainError(f"{what} = {value} lies outside [0, 1]")
    return value


@dataclass(frozen=True)
class Atom:
    x: Fraction
    y: Fraction
    weight: Fraction
    label: Optional[str] = None

    @property
    def point(self) -> Point:
        return (self.x, self.y)


@dataclass(frozen=True)
class DiscreteMeasure:
    """Weighted atoms on [0,1]^2.  Build with :meth:`from_atoms`."""

    atoms: tuple[Atom, ...] = ()

    @classmethod
    def from_atoms(cls, atoms: Iterable) -> "DiscreteMeasure":
        """Build from ``(x, y, w)`` or ``(x, y, w, label)`` tuples or :class:`Atom` objects.

        Weights at a repeated point are summed.  If the merged atoms disagree
        on their label the merged atom is left unlabelled.
        """
        mass: dict[Point, Fraction] = defaultdict(Fraction)
        labels: dict[Point, Optional[str]] = {}
        for item in atoms:
            if isinstance(item, Atom):
                x, y, w, label = item.x, item.y, item.weight, item.label
            else:
                x, y, w, *rest = item
                label = rest[0] if rest else None
            x = _unit(as_rational(x), "x")
            y = _unit(as_rational(y), "y")
            w = as_rational(w)
            if w < 0:
                raise DomainError(f"negative weight {w} at ({x}, {y})")
            if label is not None and label not in LABELS:
                raise DomainError(f"unknown label {label!r}")
            point = (x, y)
            if point in labels and labels[point] != label:
                labels[point] = None
            else:
                labels[point] = label
            mass[point] += w
        return cls(
            tuple(
                Atom(p[0], p[1], w, labels[p])
                for p, w in sorted(mass.items())
                if w != 0
            )
        )

    @classmethod
    def point_mass(cls, x: RationalLike, y: RationalLike, weight: RationalLike = 1) -> "DiscreteMeasure":
        return cls.from_atoms([(x, y, weight)])

    @classmethod
    def from_weights(cls, weights: Mapping[Point, Fraction]) -> "DiscreteMeasure":
        return cls.from_atoms((p[0], p[1], w) for p, w in weights.items())

    @cached_property
    def weights(self) -> dict[Point, Fraction]:
        return {a.point: a.weight for a in self.atoms}

    def __len__(self) -> int:
        return len(self.atoms)

    def __iter__(self) -> Iterator[Atom]:
        return iter(self.atoms)

    def __bool__(self) -> bool:
        return bool(self.atoms)

    def weight_at(self, x: RationalLike, y: RationalLike) -> Fraction:
        return self.weights.get((as_rational(x), as_rational(y)), Fraction(0))

    @property
    def support(self) -> tuple[Point, ...]:
        return tuple(a.point for a in self.atoms)

    @cached_property
    def total_mass(self) -> Fraction:
        return sum((a.weight for a in self.atoms), Fraction(0))

    def scaled(self, factor: RationalLike) -> "DiscreteMeasure":
        return scale_add(factor, self, 0, DiscreteMeasure())

    def normalized(self) -> "DiscreteMeasure":
        if self.total_mass == 0:
            raise DomainError("cannot normalize the zero measure")
        return self.scaled(1 / self.total_mass)

    def restricted(self, label: Optional[str]) -> "DiscreteMeasure":
        """Sub-measure of atoms carrying ``label``."""
        return DiscreteMeasure(tuple(a for a in self.atoms if a.label == label))

    def unlabelled(self) -> "DiscreteMeasure":
        return DiscreteMeasure(tuple(Atom(a.x, a.y, a.weight) for a in self.atoms))


@dataclass(frozen=True)
class Measure1D:
    """Weighted atoms on [0,1], sorted by position."""

    atoms: tuple[tuple[Fraction, Fraction], ...] = ()

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[RationalLike, RationalLike]]) -> "Measure1D":
        mass: dict[Fraction, Fraction] = defaultdict(Fraction)
        for x, w in pairs:
            x = _unit(as_rational(x), "x")
            w = as_rational(w)
            if w < 0:
                raise DomainError(f"negative weight {w} at {x}")
            mass[x] += w
        return cls(tuple((x, w) for x, w in sorted(mass.items()) if w != 0))

    @cached_property
    def weights(self) -> dict[Fraction, Fraction]:
        return dict(self.atoms)

    def weight_at(self, x: RationalLike) -> Fraction:
        return self.weights.get(as_rational(x), Fraction(0))

    @cached_property
    def total_mass(self) -> Fraction:
        return sum((w for _, w in self.atoms), Fraction(0))

    def __len__(self) -> int:
        return len(self.atoms)


def marginal_x(m: DiscreteMeasure) -> Measure1D:
    return Measure1D.from_pairs((a.x, a.weight) for a in m.atoms)


def marginal_y(m: DiscreteMeasure) -> Measure1D:
    return Measure1D.from_pairs((a.y, a.weight) for a in m.atoms)


def scale_add(
    a: RationalLike, m1: DiscreteMeasure, b: RationalLike, m2: DiscreteMeasure
) -> DiscreteMeasure:
    """Exact ``a*m1 + b*m2`` for nonnegative rationals ``a`` and ``b``."""
    a, b = as_rational(a), as_rational(b)
    if a < 0 or b < 0:
        raise DomainError("scale_add coefficients must be nonnegative")
    items = [Atom(t.x, t.y, a * t.weight, t.label) for t in m1.atoms]
    items += [Atom(t.x, t.y, b * t.weight, t.label) for t in m2.atoms]
    return DiscreteMeasure.from_atoms(items)


def dominates(m1: DiscreteMeasure, m2: DiscreteMeasure) -> bool:
    """True iff ``m2 <= m1`` atom-wise, i.e. every point carries no more mass in ``m2``."""
    w1 = m1.weights
    return all(a.weight <= w1.get(a.point, 0) for a in m2.atoms)


def subtract(m1: DiscreteMeasure, m2: DiscreteMeasure) -> DiscreteMeasure:
    """``m1 - m2``; raises if the difference would be negative somewhere."""
    if not dominates(m1, m2):
        raise DomainError("difference of measures is not nonnegative")
    w2 = m2.weights
    return DiscreteMeasure.from_atoms(
        Atom(a.x, a.y, a.weight - w2.get(a.point, 0), a.label) for a in m1.atoms
    )


# ---------------------------------------------------------------------------
# text format:  x y w [diag|graph]   one atom per line, '#' comments
# ---------------------------------------------------------------------------


def parse_measure(text: str) -> DiscreteMeasure:
    atoms = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        if len(tokens) not in (3, 4):
            raise ParseError(f"expected 'x y w [diag|graph]', got {line!r}", lineno)
        try:
            x, y, w = (parse_rational(t) for t in tokens[:3])
        except ValueError as exc:
            raise ParseError(str(exc), lineno) from None
        label = None
        if len(tokens) == 4:
            if tokens[3] not in _LABEL_TOKENS:
                raise ParseError(f"unknown label {tokens[3]!r}", lineno)
            label = _LABEL_TOKENS[tokens[3]]
        if not (0 <= x <= 1 and 0 <= y <= 1):
            raise ParseError(f"point ({x}, {y}) outside the unit square", lineno)
        if w < 0:
            raise ParseError(f"negative weight {w}", lineno)
        atoms.append((x, y, w, label))
    return DiscreteMeasure.from_atoms(atoms)


def format_measure(m: DiscreteMeasure, header: str | None = None) -> str:
    lines = []
    if header:
        lines.extend(f"# {h}" for h in header.splitlines())
    for a in m.atoms:
        fields = [format_rational(a.x), format_rational(a.y), format_rational(a.weight)]
        if a.label is not None:
            fields.append(_TOKEN_FOR_LABEL[a.label])
        lines.append(" ".join(fields))
    return "\n".join(lines) + "\n"


def load_measure(path: str | Path) -> DiscreteMeasure:
    return parse_measure(Path(path).read_text(encoding="utf-8"))


def save_measure(m: DiscreteMeasure, path: str | Path, header: str | None = None) -> None:
    Path(path).write_text(format_measure(m, header), encoding="utf-8")


def measure_to_json(m: DiscreteMeasure) -> list[list[str]]:
    return [
        [format_rational(a.x), format_rational(a.y), format_rational(a.weight)]
        for a in m.atoms
    ]


def measure_from_json(rows: Iterable[Iterable[str]]) -> DiscreteMeasure:
    return DiscreteMeasure.from_atoms(
        tuple(parse_rational(str(t)) for t in row) for row in rows
    )
