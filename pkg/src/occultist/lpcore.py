"""Exact linear feasibility with certificates, and double description.

Constraints are homogeneous or normalized: ``<a, x> >= 0``, ``<a, x> >= 1``
(the homogeneous encoding of a strict inequality), ``<a, x> = 0``, and the
mirrored ``<= 0`` / ``<= -1`` forms, which are stored negated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce

from . import _kernel
from .errors import DegenerateBody, DimensionMismatch, DimensionTooLarge
from .ratlin import dot, lcm_denominators, primitive, rank, to_rat

DD_DIM_BOUND = 10

_RELS = {">=0": (1, 0, _kernel.GE), ">=1": (1, 1, _kernel.GE), "=0": (1, 0, _kernel.EQ),
         "<=0": (-1, 0, _kernel.GE), "<=-1": (-1, 1, _kernel.GE)}


class LinFeasProblem:
    """A conjunction of linear constraints on ``x`` in Q^dim.

    Parameters
    ----------
    dim : int
    constraints : list of (vector, relation)
        relation is one of ``">=0"``, ``">=1"``, ``"=0"``, ``"<=0"``, ``"<=-1"``.
    """

    def __init__(self, dim, constraints):
        if not constraints:
            raise DimensionMismatch("a feasibility problem needs at least one constraint")
        rows, rhs, kinds = [], [], []
        for coeffs, rel in constraints:
            if len(coeffs) != dim:
                raise DimensionMismatch(f"row of length {len(coeffs)} in dim {dim}")
            if rel not in _RELS:
                raise ValueError(f"unknown relation {rel!r}")
            sgn, b, kind = _RELS[rel]
            rows.append(tuple(sgn * to_rat(c) for c in coeffs))
            rhs.append(Fraction(b))
            kinds.append(kind)
        self.dim = dim
        self.rows = rows
        self.rhs = rhs
        self.kinds = kinds

    def __len__(self):
        return len(self.rows)


@dataclass(frozen=True)
class FeasVerdict:
    """Outcome of :func:`feasible` with its exact certificate.

    ``farkas`` multipliers refer to the normalized (``>=``/``=``) rows of the
    problem: nonnegative on inequality rows, combining to the zero vector
    with positive right-hand side.
    """

    status: str
    witness: tuple | None
    farkas: tuple | None
    pivots: int = 0

    @property
    def is_feasible(self) -> bool:
        return self.status == "Feasible"

    def replay(self, problem: LinFeasProblem) -> bool:
        """Re-check the certificate with exact arithmetic."""
        if self.status == "Feasible":
            x = self.witness
            for a, b, k in zip(problem.rows, problem.rhs, problem.kinds):
                v = dot(a, x)
                if (k == _kernel.EQ and v != b) or (k == _kernel.GE and v < b):
                    return False
            return True
        y = self.farkas
        if y is None or len(y) != len(problem.rows):
            return False
        for yr, k in zip(y, problem.kinds):
            if k == _kernel.GE and yr < 0:
                return False
        combo = [sum((yr * a[j] for yr, a in zip(y, problem.rows)), Fraction(0)) for j in range(problem.dim)]
        if any(c != 0 for c in combo):
            return False
        return sum((yr * b for yr, b in zip(y, problem.rhs)), Fraction(0)) > 0


def _integer_rows(problem: LinFeasProblem):
    rows, rhs, scales = [], [], []
    for a, b in zip(problem.rows, problem.rhs):
        s = math.lcm(lcm_denominators(a), b.denominator)
        rows.append([int(x * s) for x in a])
        rhs.append(int(b * s))
        scales.append(s)
    return rows, rhs, scales


def feasible(problem: LinFeasProblem, solver=None) -> FeasVerdict:
    """Decide feasibility exactly (integer-pivoting simplex, Bland's rule).

    Parameters
    ----------
    problem : LinFeasProblem
    solver : callable, optional
        Kernel override, e.g. ``_kernel.solve_python`` for comparisons.
    """
    solve = solver or _kernel.solve
    rows, rhs, scales = _integer_rows(problem)
    ok, nums, den, pivots = solve(rows, rhs, list(problem.kinds), problem.dim)
    if ok:
        x = tuple(Fraction(n, den) for n in nums)
        return FeasVerdict("Feasible", x, None, pivots)
    ys = [n * s for n, s in zip(nums, scales)]
    g = reduce(math.gcd, ys, 0) or 1
    y = tuple(Fraction(v // g) for v in ys)
    return FeasVerdict("Infeasible", None, y, pivots)


def is_feasible(dim, constraints) -> bool:
    return feasible(LinFeasProblem(dim, constraints)).is_feasible


# ---------------------------------------------------------------- double description


def _int_dot(a, b):
    s = 0
    for x, y in zip(a, b):
        s += x * y
    return s


def _solve_square(rows, d):
    """Columns of the inverse of an invertible integer matrix, made primitive."""
    a = [[Fraction(x) for x in r] + [Fraction(int(i == j)) for j in range(d)] for i, r in enumerate(rows)]
    for c in range(d):
        p = next(r for r in range(c, d) if a[r][c] != 0)
        a[c], a[p] = a[p], a[c]
        piv = a[c][c]
        a[c] = [x / piv for x in a[c]]
        for r in range(d):
            if r != c and a[r][c] != 0:
                f = a[r][c]
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    inv = [r[d:] for r in a]
    return [primitive([inv[i][j] for i in range(d)]) for j in range(d)]


def _independent_subset(rows, d):
    chosen = []
    for i, r in enumerate(rows):
        if rank([rows[j] for j in chosen] + [r], d) == len(chosen) + 1:
            chosen.append(i)
            if len(chosen) == d:
                break
    return chosen


def extreme_rays(rows, dim: int) -> list:
    """Extreme rays of the pointed cone ``{y : <a, y> >= 0 for a in rows}``.

    Parameters
    ----------
    rows : list of vectors
        Must span Q^dim (otherwise the cone contains a line).
    dim : int

    Returns
    -------
    list of tuple of int
        Primitive, sorted.
    """
    if dim > DD_DIM_BOUND:
        raise DimensionTooLarge(f"dimension {dim} exceeds bound {DD_DIM_BOUND}")
    ints = sorted({primitive(r) for r in rows if any(x != 0 for x in r)})
    if any(len(r) != dim for r in ints):
        raise DimensionMismatch("vector length differs from dim")
    if dim == 1:
        signs = {r[0] > 0 for r in ints}
        if signs == {True}:
            return [(1,)]
        if signs == {False}:
            return [(-1,)]
        raise DegenerateBody("cone in dimension 1 is not pointed")
    basis_idx = _independent_subset(ints, dim)
    if len(basis_idx) < dim:
        raise DegenerateBody("constraint vectors do not span; cone contains a line")
    order = basis_idx + [i for i in range(len(ints)) if i not in basis_idx]
    a = [ints[i] for i in order]
    rays = _solve_square(a[:dim], dim)
    zeros = []
    for r in rays:
        z = 0
        for k in range(dim):
            if _int_dot(a[k], r) == 0:
                z |= 1 << k
        zeros.append(z)
    for k in range(dim, len(a)):
        row = a[k]
        vals = [_int_dot(row, r) for r in rays]
        pos = [i for i, v in enumerate(vals) if v > 0]
        neg = [i for i, v in enumerate(vals) if v < 0]
        if not neg:
            for i, v in enumerate(vals):
                if v == 0:
                    zeros[i] |= 1 << k
            continue
        new_rays, new_zeros = [], []
        for i, v in enumerate(vals):
            if v >= 0:
                new_rays.append(rays[i])
                new_zeros.append(zeros[i] | ((1 << k) if v == 0 else 0))
        for p in pos:
            for n in neg:
                common = zeros[p] & zeros[n]
                if bin(common).count("1") < dim - 2:
                    continue
                adjacent = True
                for t in range(len(rays)):
                    if t != p and t != n and (zeros[t] & common) == common:
                        adjacent = False
                        break
                if not adjacent:
                    continue
                vp, vn = vals[p], vals[n]
                r = tuple(vp * x - vn * y for x, y in zip(rays[n], rays[p]))
                new_rays.append(primitive(r))
                new_zeros.append(common | (1 << k))
        rays, zeros = new_rays, new_zeros
    return sorted(set(rays))


def dd_convert(vectors, dim: int) -> list:
    """Switch between generator and facet descriptions of a closed cone.

    Given generators of a full-dimensional salient cone returns its facet
    covectors, and vice versa; the map is an involution on canonical forms.
    """
    return extreme_rays(vectors, dim)


def canonical_rays(vectors, dim: int) -> list:
    """Extreme rays (primitive, sorted) of the cone generated by ``vectors``."""
    return dd_convert(dd_convert(vectors, dim), dim)
