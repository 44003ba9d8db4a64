"""The measures ``m_r = mu_r + nu_r`` and their cobweb approximants.

``mu_r`` lives on the diagonal segment {(s, s) : 0 <= s <= r} with density
``s / (1 - s) / c_r``; ``nu_r`` lives on the graph {(s, t_r(s))} with density
``1 / c_r``, where ``c_r = -log(1 - r)`` makes the total mass one.

The continuous side is floating point (logs are irrational).  Cobweb measures
are exact rationals.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from scipy import integrate

from .dynamics import orbit as tent_orbit
from .dynamics import tent_r
from .errors import DomainError
from .measures import DIAGONAL, GRAPH, Atom, DiscreteMeasure, scale_add
from .rational import RationalLike, as_rational, nearest_with_denominator

WEIGHT_DENOMINATOR = 10**12


def c_r(r: float) -> float:
    if not 0 < r < 1:
        raise DomainError(f"r = {r} outside (0, 1)")
    return -math.log1p(-r)


def _check_x(r: float, x: float) -> None:
    if not 0 <= x <= r:
        raise DomainError(f"x = {x} outside [0, {r}]")


def mu_density(r: float, s: float) -> float:
    return s / (1 - s) / c_r(r)


def mu_cdf(r: float, x: float) -> float:
    """mu_r mass of the diagonal piece over [0, x]: ``(-x - log(1-x)) / c_r``."""
    c = c_r(r)
    _check_x(r, x)
    return (-x - math.log1p(-x)) / c


def nu_cdf(r: float, x: float) -> float:
    """nu_r mass of the graph piece over [0, x] in the x-parametrisation."""
    c = c_r(r)
    _check_x(r, x)
    return x / c


def nu_y_cdf(r: float, y: float) -> float:
    """nu_r mass below height ``y``; preimage length is ``y`` so this equals ``y / c_r``."""
    _check_x(r, y)
    # {s : t_r(s) <= y} = [0, y/2] u [r - y/2, r]
    return nu_cdf(r, y / 2) + nu_cdf(r, r) - nu_cdf(r, r - y / 2)


@dataclass(frozen=True)
class MrMeasure:
    """Accessors for the continuous measure ``m_r``."""

    r: float

    def __post_init__(self) -> None:
        c_r(self.r)

    @property
    def c(self) -> float:
        return c_r(self.r)

    def mu_cdf(self, x: float) -> float:
        return mu_cdf(self.r, x)

    def nu_cdf(self, x: float) -> float:
        return nu_cdf(self.r, x)

    def total_mass(self) -> float:
        return mu_cdf(self.r, self.r) + nu_cdf(self.r, self.r)


@dataclass(frozen=True)
class RIdentityReport:
    r: float
    grid: int
    tol: float
    max_error_mu: float
    max_error_nu: float
    total_mass_error: float

    @property
    def max_error(self) -> float:
        return max(self.max_error_mu, self.max_error_nu)

    @property
    def passed(self) -> bool:
        return self.max_error <= self.tol

    def to_dict(self) -> dict:
        return {
            "r": self.r,
            "grid": self.grid,
            "tol": self.tol,
            "max_error_mu": self.max_error_mu,
            "max_error_nu": self.max_error_nu,
            "max_error": self.max_error,
            "total_mass_error": self.total_mass_error,
            "passed": self.passed,
        }


def verify_R_identities(r: float, grid: int = 100, tol: float = 1e-10) -> RIdentityReport:
    """Check the column identity of ``(mu_r, nu_r)`` on ``A = [0, x_j]`` by quadrature.

    Both ``int_A (1-s) d mu_r^x`` and ``int_A s d nu_r^x`` should equal
    ``x_j^2 / (2 c_r)``.
    """
    if grid < 2:
        raise DomainError("grid needs at least two points")
    c = c_r(r)
    err_mu = err_nu = 0.0
    for j in range(grid):
        x = r * j / (grid - 1)
        target = x * x / (2 * c)
        lhs, _ = integrate.quad(lambda s: (1 - s) * mu_density(r, s), 0, x, epsabs=1e-14, epsrel=1e-13)
        rhs, _ = integrate.quad(lambda s: s / c, 0, x, epsabs=1e-14, epsrel=1e-13)
        err_mu = max(err_mu, abs(lhs - target))
        err_nu = max(err_nu, abs(rhs - target))
    mass_error = abs(mu_cdf(r, r) + nu_cdf(r, r) - 1)
    return RIdentityReport(r, grid, tol, err_mu, err_nu, mass_error)


# ---------------------------------------------------------------------------
# cobweb approximants
# ---------------------------------------------------------------------------


def red_weight(x: RationalLike) -> Fraction:
    """Diagonal weight ``x / (1 - x)``; unbounded as ``x -> 1``."""
    x = as_rational(x)
    if not 0 <= x < 1:
        raise DomainError(f"x = {x} outside [0, 1)")
    return x / (1 - x)


@dataclass(frozen=True)
class CobwebMeasure:
    """Normalised cobweb measure with its red (diagonal) and blue (graph) parts.

    ``red + blue == measure``.  The start and end points carry weight zero,
    so they are kept only as metadata.
    """

    r: Fraction
    x0: Fraction
    n: int
    red: DiscreteMeasure
    blue: DiscreteMeasure
    measure: DiscreteMeasure
    endpoints: tuple[Fraction, Fraction]
    normalizer: Fraction
    first_repeat: Optional[int] = None


def cobweb_measure(r: RationalLike, x0: RationalLike, n: int) -> CobwebMeasure:
    """Cobweb diagram of ``t_r`` from ``x0`` with ``n`` graph points.

    Red mass ``x_k / (1 - x_k)`` sits at ``(x_k, x_k)`` for ``k = 1 .. n-1`` and
    blue mass 1 at ``(x_{k-1}, x_k)`` for ``k = 1 .. n``.  Repeated points (the
    orbit of a rational start is eventually periodic) are merged.
    """
    r, x0 = as_rational(r), as_rational(x0)
    if not 0 < r < 1:
        raise DomainError(f"r = {r} outside (0, 1)")
    if not 0 <= x0 <= r:
        raise DomainError(f"x0 = {x0} outside [0, {r}]")
    if n < 2:
        raise DomainError("cobweb needs n >= 2")
    path = tent_orbit(r, x0, n)
    xs = path.points
    red_atoms = [Atom(xs[k], xs[k], red_weight(xs[k]), DIAGONAL) for k in range(1, n)]
    blue_atoms = [Atom(xs[k - 1], xs[k], Fraction(1), GRAPH) for k in range(1, n + 1)]
    red = DiscreteMeasure.from_atoms(red_atoms)
    blue = DiscreteMeasure.from_atoms(blue_atoms)
    total = red.total_mass + blue.total_mass
    red, blue = red.scaled(1 / total), blue.scaled(1 / total)
    return CobwebMeasure(
        r=r,
        x0=x0,
        n=n,
        red=red,
        blue=blue,
        measure=scale_add(1, red, 1, blue),
        endpoints=(xs[0], xs[n]),
        normalizer=total,
        first_repeat=path.first_repeat,
    )


@dataclass(frozen=True)
class RatioCheck:
    """Red share of each column and row, for lines away from the orbit endpoints."""

    columns_checked: int
    rows_checked: int
    column_failures: tuple[Fraction, ...]
    row_failures: tuple[Fraction, ...]

    @property
    def ok(self) -> bool:
        return not self.column_failures and not self.row_failures


def interior_ratio_check(cw: CobwebMeasure) -> RatioCheck:
    """Verify red / (red + blue) == coordinate on every interior line, exactly.

    A column ``x = a`` is interior when ``a != x_0``; a row ``y = b`` when
    ``b != x_N``.  Only lines carrying positive mass are examined.
    """
    start, end = cw.endpoints

    def shares(coord):
        red: dict[Fraction, Fraction] = {}
        total: dict[Fraction, Fraction] = {}
        for a in cw.red.atoms:
            red[coord(a)] = red.get(coord(a), 0) + a.weight
            total[coord(a)] = total.get(coord(a), 0) + a.weight
        for a in cw.blue.atoms:
            total[coord(a)] = total.get(coord(a), 0) + a.weight
        return red, total

    red_c, tot_c = shares(lambda a: a.x)
    red_r, tot_r = shares(lambda a: a.y)
    cols = [a for a in tot_c if a != start]
    rows = [b for b in tot_r if b != end]
    col_fail = tuple(a for a in cols if red_c.get(a, 0) != a * tot_c[a])
    row_fail = tuple(b for b in rows if red_r.get(b, 0) != b * tot_r[b])
    return RatioCheck(len(cols), len(rows), col_fail, row_fail)


# ---------------------------------------------------------------------------
# grid discretisation of m_r
# ---------------------------------------------------------------------------


def discretize_mr(r: RationalLike, k: int) -> DiscreteMeasure:
    """Midpoint discretisation of ``m_r`` on ``k`` equal cells of [0, r].

    Cell ``j`` contributes a diagonal atom at ``(m_j, m_j)`` with the mu_r mass
    of the cell and a graph atom at ``(m_j, t_r(m_j))`` with its nu_r mass.
    Weights are rounded to multiples of 1e-12 and the result renormalised to
    total mass exactly 1.
    """
    r = as_rational(r)
    if not 0 < r < 1:
        raise DomainError(f"r = {r} outside (0, 1)")
    if k < 1:
        raise DomainError("need at least one cell")
    rf = float(r)
    atoms = []
    for j in range(k):
        lo, hi = r * j / k, r * (j + 1) / k
        mid = (lo + hi) / 2
        w_mu = mu_cdf(rf, float(hi)) - mu_cdf(rf, float(lo))
        w_nu = nu_cdf(rf, float(hi)) - nu_cdf(rf, float(lo))
        atoms.append(Atom(mid, mid, nearest_with_denominator(w_mu, WEIGHT_DENOMINATOR), DIAGONAL))
        atoms.append(Atom(mid, tent_r(r, mid), nearest_with_denominator(w_nu, WEIGHT_DENOMINATOR), GRAPH))
    return DiscreteMeasure.from_atoms(atoms).normalized()


# ---------------------------------------------------------------------------
# plot data
# ---------------------------------------------------------------------------


def plot_rows(m: DiscreteMeasure) -> list[tuple[float, float, float, str]]:
    return [(float(a.x), float(a.y), float(a.weight), a.label or "") for a in m.atoms]


def plot_csv(m: DiscreteMeasure, endpoints: Optional[tuple[Fraction, Fraction]] = None) -> str:
    """CSV ``x,y,weight,label``; cobweb endpoints appear with weight 0 and label ``endpoint``."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["x", "y", "weight", "label"])
    for row in plot_rows(m):
        writer.writerow([repr(row[0]), repr(row[1]), repr(row[2]), row[3]])
    if endpoints is not None:
        for e in endpoints:
            writer.writerow([repr(float(e)), repr(float(e)), "0.0", "endpoint"])
    return buf.getvalue()


def mr_curve_csv(r: float, samples: int = 201) -> str:
    """Support curves of m_r with cumulative masses along each curve."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["x", "y", "weight", "label"])
    rr = as_rational(r)
    for i in range(samples):
        x = float(r) * i / (samples - 1)
        writer.writerow([repr(x), repr(x), repr(mu_cdf(float(r), x)), DIAGONAL])
    for i in range(samples):
        xq = rr * i / (samples - 1)
        writer.writerow([repr(float(xq)), repr(float(tent_r(rr, xq))), repr(nu_cdf(float(r), float(xq))), GRAPH])
    return buf.getvalue()
