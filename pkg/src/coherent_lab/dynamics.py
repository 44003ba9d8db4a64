"""Tent maps, exact orbits, preimages and transfer-operator iteration.

``tent(eta, x) = eta * min(x, 1 - x)`` on [0, 1] and its rescaled version
``tent_r(r, x) = 2 * min(x, r - x)`` on [0, r].  Orbits and preimages are exact
rationals.  Note that a rational start point always has an eventually
periodic orbit: a dyadic one even lands on the fixed point 0 after
``log2(denominator)`` steps.  Odd denominators give purely periodic orbits
whose period can be large.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional, Sequence, Union

from .errors import DomainError
from .rational import RationalLike, as_rational, format_rational, parse_rational


@dataclass(frozen=True)
class TentParams:
    """``eta`` selects ``T_eta`` on [0,1]; ``r`` selects ``t_r`` on [0,r]."""

    eta: Fraction = Fraction(2)
    r: Optional[Fraction] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "eta", as_rational(self.eta))
        if not 0 <= self.eta <= 2:
            raise DomainError(f"eta = {self.eta} outside [0, 2]")
        if self.r is not None:
            object.__setattr__(self, "r", as_rational(self.r))
            if not 0 < self.r < 1:
                raise DomainError(f"r = {self.r} outside (0, 1)")

    @property
    def domain_length(self) -> Fraction:
        return Fraction(1) if self.r is None else self.r


def _check_r(r: RationalLike) -> Fraction:
    r = as_rational(r)
    if not 0 < r <= 1:
        raise DomainError(f"r = {r} outside (0, 1]")
    return r


def tent(eta: RationalLike, x: RationalLike) -> Fraction:
    eta, x = as_rational(eta), as_rational(x)
    if not 0 <= eta <= 2:
        raise DomainError(f"eta = {eta} outside [0, 2]")
    if not 0 <= x <= 1:
        raise DomainError(f"x = {x} outside [0, 1]")
    return eta * min(x, 1 - x)


def tent_r(r: RationalLike, x: RationalLike) -> Fraction:
    r, x = _check_r(r), as_rational(x)
    if not 0 <= x <= r:
        raise DomainError(f"x = {x} outside [0, {r}]")
    return 2 * min(x, r - x)


# ---------------------------------------------------------------------------
# orbits
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Orbit:
    r: Fraction
    x0: Fraction
    points: tuple[Fraction, ...]
    first_repeat: Optional[int] = None
    """Index of the first point equal to an earlier one, if any."""
    cycle_start: Optional[int] = None
    """Index of that earlier occurrence."""

    @property
    def periodic(self) -> bool:
        return self.first_repeat is not None

    @property
    def period(self) -> Optional[int]:
        if self.first_repeat is None:
            return None
        return self.first_repeat - self.cycle_start


def _numerators(r: Fraction, x0: Fraction) -> tuple[int, int, Iterator[int]]:
    """Iterate ``t_r`` on integer numerators over the common denominator."""
    den = math.lcm(r.denominator, x0.denominator)
    top = int(r * den)
    n = int(x0 * den)

    def gen() -> Iterator[int]:
        k = n
        while True:
            yield k
            k = 2 * min(k, top - k)

    return den, top, gen()


def orbit(r: RationalLike, x0: RationalLike, n: int) -> Orbit:
    """The first ``n + 1`` points ``x0, t_r(x0), ...``, with periodicity flagged."""
    r, x0 = _check_r(r), as_rational(x0)
    if not 0 <= x0 <= r:
        raise DomainError(f"x0 = {x0} outside [0, {r}]")
    if n < 0:
        raise DomainError("orbit length must be nonnegative")
    den, _, nums = _numerators(r, x0)
    points = []
    seen: dict[int, int] = {}
    first_repeat = cycle_start = None
    for i, k in zip(range(n + 1), nums):
        if first_repeat is None:
            if k in seen:
                first_repeat, cycle_start = i, seen[k]
            else:
                seen[k] = i
        points.append(Fraction(k, den))
    return Orbit(r, x0, tuple(points), first_repeat, cycle_start)


def birkhoff_average(r: RationalLike, x0: RationalLike, n: int) -> float:
    """Time average of the identity over ``x_0 .. x_{n-1}``.

    States are exact; the running sum is a correctly rounded float sum.
    """
    r, x0 = _check_r(r), as_rational(x0)
    if not 0 <= x0 <= r:
        raise DomainError(f"x0 = {x0} outside [0, {r}]")
    if n < 1:
        raise DomainError("need at least one step")
    den, _, nums = _numerators(r, x0)
    return math.fsum(k / den for _, k in zip(range(n), nums)) / n


# ---------------------------------------------------------------------------
# preimages
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IntervalUnion:
    """Sorted, pairwise disjoint closed intervals.  Touching intervals are merged."""

    intervals: tuple[tuple[Fraction, Fraction], ...] = ()

    @classmethod
    def of(cls, pieces: Sequence[tuple[RationalLike, RationalLike]]) -> "IntervalUnion":
        spans = sorted((as_rational(a), as_rational(b)) for a, b in pieces)
        merged: list[list[Fraction]] = []
        for a, b in spans:
            if a > b:
                raise DomainError(f"empty interval [{a}, {b}]")
            if merged and a <= merged[-1][1]:
                merged[-1][1] = max(merged[-1][1], b)
            else:
                merged.append([a, b])
        return cls(tuple((a, b) for a, b in merged))

    @property
    def length(self) -> Fraction:
        return sum((b - a for a, b in self.intervals), Fraction(0))

    def __contains__(self, x: RationalLike) -> bool:
        x = as_rational(x)
        return any(a <= x <= b for a, b in self.intervals)


def preimage_interval(r: RationalLike, a: RationalLike, b: RationalLike) -> IntervalUnion:
    """``t_r^{-1}([a, b]) = [a/2, b/2] u [r - b/2, r - a/2]``."""
    r, a, b = _check_r(r), as_rational(a), as_rational(b)
    if not 0 <= a <= b <= r:
        raise DomainError(f"need 0 <= a <= b <= r, got a={a}, b={b}, r={r}")
    return IntervalUnion.of([(a / 2, b / 2), (r - b / 2, r - a / 2)])


def preimage(r: RationalLike, target: IntervalUnion) -> IntervalUnion:
    pieces = []
    for a, b in target.intervals:
        pieces.extend(preimage_interval(r, a, b).intervals)
    return IntervalUnion.of(pieces)


# ---------------------------------------------------------------------------
# transfer operator on piecewise-constant densities
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Histogram:
    """Density on [0, length], constant on ``k`` equal bins."""

    length: Fraction
    values: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if self.length <= 0:
            raise DomainError("histogram domain length must be positive")
        if not self.values:
            raise DomainError("histogram needs at least one bin")
        if any(v < 0 for v in self.values):
            raise DomainError("histogram values must be nonnegative")

    @classmethod
    def of(cls, length: RationalLike, values: Sequence[RationalLike]) -> "Histogram":
        return cls(as_rational(length), tuple(as_rational(v) for v in values))

    @classmethod
    def uniform(cls, length: RationalLike, k: int, mass: RationalLike = 1) -> "Histogram":
        length = as_rational(length)
        return cls(length, (as_rational(mass) / length,) * k)

    @property
    def k(self) -> int:
        return len(self.values)

    @property
    def bin_width(self) -> Fraction:
        return self.length / self.k

    @property
    def integral(self) -> Fraction:
        return sum(self.values, Fraction(0)) * self.bin_width

    def is_uniform(self) -> bool:
        return all(v == self.values[0] for v in self.values)

    def l1_distance(self, other: "Histogram") -> Fraction:
        if other.length != self.length or other.k != self.k:
            raise DomainError("histograms live on different grids")
        return sum((abs(a - b) for a, b in zip(self.values, other.values)), Fraction(0)) * self.bin_width

    def l1_to_uniform(self) -> Fraction:
        return self.l1_distance(Histogram.uniform(self.length, self.k, self.integral))

    def to_dict(self) -> dict:
        return {"length": format_rational(self.length), "values": [format_rational(v) for v in self.values]}

    @classmethod
    def from_dict(cls, data: dict) -> "Histogram":
        return cls(parse_rational(data["length"]), tuple(parse_rational(v) for v in data["values"]))


def _domain(params: Union[TentParams, RationalLike]) -> Fraction:
    if isinstance(params, TentParams):
        if params.eta != 2:
            raise DomainError("the transfer operator is only implemented for the full tent map")
        return params.domain_length
    return _check_r(params)


def transfer_step(params: Union[TentParams, RationalLike], h: Histogram) -> Histogram:
    """Push a density forward by the full tent map on [0, s].

    ``(L f)(x) = (f(x/2) + f(s - x/2)) / 2``.  With an even number of bins,
    bin ``j`` of the result averages bins ``j // 2`` and ``k - 1 - j // 2``.
    ``params`` is a :class:`TentParams` or the domain length ``s`` itself,
    and must match ``h.length``.
    """
    s = _domain(params)
    if s != h.length:
        raise DomainError(f"histogram lives on [0, {h.length}], map on [0, {s}]")
    k = h.k
    if k % 2:
        raise DomainError("odd bin count")
    v = h.values
    half = Fraction(1, 2)
    return Histogram(h.length, tuple(half * (v[j // 2] + v[k - 1 - j // 2]) for j in range(k)))


def iterate_transfer(params: Union[TentParams, RationalLike], h: Histogram, steps: int) -> list[Histogram]:
    out = [h]
    for _ in range(steps):
        out.append(transfer_step(params, out[-1]))
    return out


def ergodic_probe(r: Union[TentParams, RationalLike], h0: Histogram, steps: int) -> list[float]:
    """L1 distance to the uniform density after each of ``steps`` transfer steps.

    Requires ``k = 2**m`` bins; the distance then hits exactly 0 after at most
    ``m`` steps.
    """
    k = h0.k
    if k < 2 or k & (k - 1):
        raise DomainError("bin count must be a power of two")
    return [float(h.l1_to_uniform()) for h in iterate_transfer(r, h0, steps)[1:]]
