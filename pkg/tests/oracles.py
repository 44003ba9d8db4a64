"""Independent reference computations used only by the tests.

None of these touch the simplex or the feasibility-system builder of the
package; they work from raw atoms.
"""

from __future__ import annotations

import math
from fractions import Fraction
from itertools import combinations

import networkx as nx
import sympy


def _lines(atoms):
    cols, rows = {}, {}
    for x, y, w in atoms:
        cols[x] = cols.get(x, 0) + w
        rows[y] = rows.get(y, 0) + w
    return cols, rows


def defect_by_maxflow(atoms) -> Fraction:
    """Least total violation via a bipartite max-flow.

    Column ``a`` must send ``C_a = a * colmass(a)`` and row ``b`` must absorb
    ``R_b = b * rowmass(b)``; each atom is an edge of capacity ``m(p)``.  The
    least violation is ``sum C + sum R - 2 * maxflow``.
    """
    atoms = [(Fraction(x), Fraction(y), Fraction(w)) for x, y, w in atoms]
    cols, rows = _lines(atoms)
    demand_c = {a: a * m for a, m in cols.items()}
    demand_r = {b: b * m for b, m in rows.items()}
    scale = 1
    for v in [w for *_, w in atoms] + list(demand_c.values()) + list(demand_r.values()):
        scale = math.lcm(scale, v.denominator)
    g = nx.DiGraph()
    for a, c in demand_c.items():
        g.add_edge("s", ("c", a), capacity=int(c * scale))
    for b, c in demand_r.items():
        g.add_edge(("r", b), "t", capacity=int(c * scale))
    for x, y, w in atoms:
        edge = (("c", x), ("r", y))
        cap = int(w * scale)
        if g.has_edge(*edge):
            g.edges[edge]["capacity"] += cap
        else:
            g.add_edge(*edge, capacity=cap)
    flow = nx.maximum_flow_value(g, "s", "t") if len(g) else 0
    return sum(demand_c.values()) + sum(demand_r.values()) - Fraction(2 * flow, scale)


def reduced_system(atoms):
    """Equality system in sympy form: (A, b, upper) over one variable per atom."""
    atoms = [(Fraction(x), Fraction(y), Fraction(w)) for x, y, w in atoms]
    cols, rows = _lines(atoms)
    A, b = [], []
    for a in sorted(cols):
        A.append([1 if x == a else 0 for x, _, _ in atoms])
        b.append(a * cols[a])
    for r in sorted(rows):
        A.append([1 if y == r else 0 for _, y, _ in atoms])
        b.append(r * rows[r])
    Q = sympy.Rational
    M = sympy.Matrix([[Q(v) for v in row] for row in A])
    rhs = sympy.Matrix([Q(v.numerator, v.denominator) for v in b])
    upper = [Q(w.numerator, w.denominator) for *_, w in atoms]
    return M, rhs, upper


def free_dimension(atoms) -> int:
    M, _, _ = reduced_system(atoms)
    return M.cols - M.rank()


def feasible_by_intervals(atoms) -> bool:
    """Feasibility of ``A u = b, 0 <= u <= w`` for at most two free parameters.

    The equality system is solved symbolically; what remains is a set of
    half-planes in the free parameters.  One parameter is an interval
    intersection.  With two, a bounded nonempty polygon has a vertex at the
    crossing of two bounding lines, so all crossings are enumerated.
    """
    M, rhs, upper = reduced_system(atoms)
    try:
        sol, params = M.gauss_jordan_solve(rhs)
    except ValueError:
        return False
    params = list(params)
    exprs = list(sol)
    k = len(params)
    if k > 2:
        raise ValueError("oracle handles at most two free parameters")
    # each constraint as (coefficients, constant) with value = coeffs.t + const
    affine = []
    for e, w in zip(exprs, upper):
        coeffs = [sympy.diff(e, p) for p in params]
        const = e.subs({p: 0 for p in params})
        affine.append((coeffs, const, w))

    def ok(point):
        sub = dict(zip(params, point))
        return all(0 <= e.subs(sub) <= w for e, w in zip(exprs, upper))

    if k == 0:
        return ok([])
    bounds = []  # (coeffs, level): coeffs.t + const == level
    for coeffs, const, w in affine:
        bounds.append((coeffs, -const))
        bounds.append((coeffs, w - const))
    if k == 1:
        lo, hi = -sympy.oo, sympy.oo
        for coeffs, const, w in affine:
            c = coeffs[0]
            if c == 0:
                if not 0 <= const <= w:
                    return False
                continue
            a, b = -const / c, (w - const) / c
            lo, hi = max(lo, min(a, b)), min(hi, max(a, b))
        return lo <= hi
    for (c1, l1), (c2, l2) in combinations(bounds, 2):
        det = c1[0] * c2[1] - c1[1] * c2[0]
        if det == 0:
            continue
        t0 = (l1 * c2[1] - c1[1] * l2) / det
        t1 = (c1[0] * l2 - l1 * c2[0]) / det
        if ok([t0, t1]):
            return True
    return False


def coordinate_range(atoms, index: int):
    """Min and max of ``u_index`` over the feasible polytope, via scipy's LP."""
    from scipy.optimize import linprog

    M, rhs, upper = reduced_system(atoms)
    A = [[float(v) for v in M.row(i)] for i in range(M.rows)]
    b = [float(v) for v in rhs]
    bounds = [(0, float(w)) for w in upper]
    c = [0.0] * M.cols
    c[index] = 1.0
    lo = linprog(c, A_eq=A, b_eq=b, bounds=bounds, method="highs")
    c[index] = -1.0
    hi = linprog(c, A_eq=A, b_eq=b, bounds=bounds, method="highs")
    return lo.fun, -hi.fun
