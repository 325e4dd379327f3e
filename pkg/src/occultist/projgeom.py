"""Projective points, maps and properly convex bodies as salient cones.

A :class:`ConePolytope` fixes one lift (a salient closed cone ``K``); its
projectivization is the properly convex set. The open set is the interior
of ``K`` (strict facet inequalities), the closure is ``K`` itself.
Operations across two bodies consider both sign pairings ``K`` / ``-K``.
"""

from __future__ import annotations

import enum
import itertools
import math
import threading
from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    DegenerateBody,
    DegenerateSampling,
    DimensionMismatch,
    NoCommonChart,
    NotProperlyConvex,
    PointNotInterior,
    SignAmbiguous,
)
from .lpcore import LinFeasProblem, extreme_rays, feasible
from .ratlin import RMat, canonical_projective, mat_inverse, primitive, rat_str, to_rat


def _idot(a, b):
    s = 0
    for x, y in zip(a, b):
        s += x * y
    return s


def _neg(v):
    return tuple(-x for x in v)


class ProjPoint:
    """A point of P(V), stored in canonical projective form."""

    __slots__ = ("rep",)

    def __init__(self, v):
        self.rep = canonical_projective([to_rat(x) for x in v])

    @property
    def dim(self):
        return len(self.rep)

    def __eq__(self, other):
        return isinstance(other, ProjPoint) and self.rep == other.rep

    def __hash__(self):
        return hash(("pt", self.rep))

    def __repr__(self):
        return "ProjPoint([" + ":".join(map(str, self.rep)) + "])"


class ProjHyp(ProjPoint):
    """A hyperplane of P(V), i.e. a point of P(V*)."""

    __slots__ = ()

    def __hash__(self):
        return hash(("hyp", self.rep))

    def __eq__(self, other):
        return isinstance(other, ProjHyp) and self.rep == other.rep

    def __repr__(self):
        return "ProjHyp([" + ":".join(map(str, self.rep)) + "])"


class ProjMap:
    """An element of PGL(V): an invertible rational matrix up to scaling.

    The stored matrix is the primitive integer multiple with first nonzero
    entry positive, so equality is projective equality.
    """

    __slots__ = ("mat", "_inv", "_inv_sign")

    def __init__(self, m):
        m = m if isinstance(m, RMat) else RMat(m)
        if m.det() == 0:
            from .errors import Singular

            raise Singular("projective maps must be invertible")
        flat = canonical_projective([x for r in m.rows for x in r])
        n = m.dim
        self.mat = RMat._raw([flat[i * n:(i + 1) * n] for i in range(n)])
        self._inv = None
        self._inv_sign = 1

    @property
    def dim(self):
        return self.mat.dim

    @classmethod
    def identity(cls, n):
        return cls(RMat.identity(n))

    def inverse(self) -> "ProjMap":
        if self._inv is None:
            exact = mat_inverse(self.mat)
            inv = ProjMap(exact)
            i, j = next((i, j) for i in range(self.dim) for j in range(self.dim) if exact.rows[i][j] != 0)
            # canonical scaling may flip the sign; covectors must not
            self._inv_sign = 1 if (inv.mat.rows[i][j] > 0) == (exact.rows[i][j] > 0) else -1
            self._inv = inv
        return self._inv

    def __matmul__(self, other):
        if isinstance(other, ProjMap):
            return ProjMap(self.mat @ other.mat)
        raise TypeError("use apply_vector / apply for points and bodies")

    def __pow__(self, k):
        if k < 0:
            return self.inverse() ** (-k)
        return ProjMap(self.mat ** k)

    def __eq__(self, other):
        return isinstance(other, ProjMap) and self.mat == other.mat

    def __hash__(self):
        return hash(self.mat)

    def __repr__(self):
        return f"ProjMap({self.mat.to_strings()})"

    def is_identity(self) -> bool:
        return self == ProjMap.identity(self.dim)

    def apply_vector(self, v) -> tuple:
        return primitive(self.mat @ tuple(Fraction(x) for x in v))

    def apply_covector(self, f) -> tuple:
        w = self.inverse().mat.row_vec_mul(tuple(Fraction(x) for x in f))
        return primitive([self._inv_sign * x for x in w])

    def apply_point(self, p: ProjPoint) -> ProjPoint:
        return ProjPoint(self.mat @ p.rep)

    def apply_hyp(self, h: ProjHyp) -> ProjHyp:
        return ProjHyp(self.apply_covector(h.rep))


class Relation(enum.Enum):
    DISJOINT_OPEN = "DisjointOpen"
    OVERLAPPING = "Overlapping"
    SUBSET_OPEN = "SubsetOpen"
    SUPERSET_OPEN = "SupersetOpen"
    EQUAL = "Equal"


class ConePolytope:
    """Properly convex polytope of P(V) as a salient rational cone.

    Use :func:`make_body` or :func:`body_from_facets` to construct.

    Attributes
    ----------
    dim : int
    generators : tuple of tuple of int
        Extreme rays, primitive, sorted.
    salient_witness : tuple of int
        Covector strictly positive on every generator.
    """

    __slots__ = ("dim", "generators", "salient_witness", "_facets", "_lock", "_key")

    def __init__(self, generators, salient_witness, facets=None):
        self.generators = tuple(sorted(generators))
        self.dim = len(self.generators[0])
        self.salient_witness = tuple(salient_witness)
        self._facets = tuple(sorted(facets)) if facets is not None else None
        self._lock = threading.Lock()
        self._key = None

    @property
    def facets(self) -> tuple:
        """Facet covectors (nonnegative on the cone), computed once."""
        if self._facets is None:
            with self._lock:
                if self._facets is None:
                    self._facets = tuple(extreme_rays(self.generators, self.dim))
        return self._facets

    def key(self):
        """Hashable key invariant under the lift sign."""
        if self._key is None:
            a = self.generators
            b = tuple(sorted(_neg(g) for g in a))
            self._key = min(a, b)
        return self._key

    def __eq__(self, other):
        return isinstance(other, ConePolytope) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"ConePolytope(dim={self.dim}, generators={list(self.generators)})"

    def negated(self) -> "ConePolytope":
        f = None if self._facets is None else [_neg(x) for x in self._facets]
        return ConePolytope([_neg(g) for g in self.generators], _neg(self.salient_witness), f)

    def contains(self, v, open_: bool = False, either_sign: bool = True) -> bool:
        """Membership of a vector (or its negative) in the closed / open set."""
        vals = [_idot(f, v) for f in self.facets]
        if open_:
            plus = all(x > 0 for x in vals)
            minus = all(x < 0 for x in vals)
        else:
            plus = all(x >= 0 for x in vals)
            minus = all(x <= 0 for x in vals)
        return plus or (either_sign and minus)

    def interior_point(self) -> tuple:
        return primitive([sum(c) for c in zip(*self.generators)])

    def to_json(self, with_facets: bool = False) -> dict:
        d = {"generators": [[str(x) for x in g] for g in self.generators]}
        if with_facets:
            d["facets"] = [[str(x) for x in f] for f in self.facets]
        return d


def _as_int_rays(points):
    rays = []
    for p in points:
        if isinstance(p, ProjPoint):
            rays.append(p.rep)
        else:
            v = [to_rat(x) for x in p]
            if all(x == 0 for x in v):
                raise ValueError("zero vector is not a ray")
            rays.append(primitive(v))
    return rays


def salience_problem(rays, dim) -> LinFeasProblem:
    return LinFeasProblem(dim, [(r, ">=1") for r in rays])


def make_body(points, dim=None) -> ConePolytope:
    """Closed salient cone generated by the given rays.

    Plain vectors are taken as signed lifts. :class:`ProjPoint` inputs carry
    no sign; they are lifted into the chart ``x_d = 1`` (last coordinate),
    which must not vanish on any of them.

    Raises
    ------
    NotProperlyConvex
        The cone contains a line (no strictly positive functional).
    SignAmbiguous
        ProjPoint inputs with a vanishing last coordinate.
    DegenerateBody
        The cone is not full-dimensional.
    """
    points = list(points)
    if not points:
        raise ValueError("empty point list")
    if all(isinstance(p, ProjPoint) for p in points):
        lifted = []
        for p in points:
            if p.rep[-1] == 0:
                raise SignAmbiguous(f"{p} lies on the chart boundary x_d = 0")
            lifted.append(p.rep if p.rep[-1] > 0 else _neg(p.rep))
        rays = lifted
    else:
        rays = _as_int_rays(points)
    d = dim or len(rays[0])
    if any(len(r) != d for r in rays):
        raise DimensionMismatch("rays of different lengths")
    rays = sorted(set(rays))
    verdict = feasible(salience_problem(rays, d))
    if not verdict.is_feasible:
        raise NotProperlyConvex("cone over the points contains a line")
    facets = extreme_rays(rays, d)
    gens = extreme_rays(facets, d)
    witness = primitive([sum(c) for c in zip(*facets)])
    return ConePolytope(gens, witness, facets)


def body_from_facets(facets, dim=None) -> ConePolytope:
    """Cone ``{x : <f, x> >= 0}``; must be full-dimensional and salient."""
    rows = _as_int_rays(facets)
    d = dim or len(rows[0])
    if not feasible(LinFeasProblem(d, [(f, ">=1") for f in rows])).is_feasible:
        raise DegenerateBody("facet system has empty interior")
    gens = extreme_rays(rows, d)
    fac = extreme_rays(gens, d)
    witness = primitive([sum(c) for c in zip(*fac)])
    return ConePolytope(gens, witness, fac)


def dual(p: ConePolytope) -> ConePolytope:
    """Dual body: covectors positive on the closed cone."""
    witness = primitive([sum(c) for c in zip(*p.generators)])
    return ConePolytope(p.facets, witness, p.generators)


def apply(g: ProjMap, p: ConePolytope) -> ConePolytope:
    """Image ``g . p``; facets move by the inverse transpose."""
    if g.dim != p.dim:
        raise DimensionMismatch("map and body dimensions differ")
    gens = [g.apply_vector(v) for v in p.generators]
    facets = None if p._facets is None else [g.apply_covector(f) for f in p._facets]
    w = g.apply_covector(p.salient_witness)
    return ConePolytope(gens, w, facets)


# ------------------------------------------------------------------ two-body ops


def open_overlap(p: ConePolytope, q: ConePolytope, sign: int = 1) -> bool:
    """Do int(p) and int(sign * q) meet (as cones)?"""
    rows = [(f, ">=1") for f in p.facets] + [(f if sign > 0 else _neg(f), ">=1") for f in q.facets]
    return feasible(LinFeasProblem(p.dim, rows)).is_feasible


def overlap_sign(p: ConePolytope, q: ConePolytope):
    """Sign ``s`` with int(p) meeting int(s q), or None; +1 preferred."""
    for s in (1, -1):
        if open_overlap(p, q, s):
            return s
    return None


def closed_subset(p: ConePolytope, q: ConePolytope, sign: int = 1) -> bool:
    """Is the cone of p inside sign * (cone of q)?"""
    return all(sign * _idot(f, g) >= 0 for g in p.generators for f in q.facets)


def subset(p: ConePolytope, q: ConePolytope) -> bool:
    """Projective inclusion of the open sets (equivalently the closures)."""
    return closed_subset(p, q, 1) or closed_subset(p, q, -1)


def relate(p: ConePolytope, q: ConePolytope) -> Relation:
    """Containment/overlap relation of the open sets."""
    for s in (1, -1):
        pq = closed_subset(p, q, s)
        qp = closed_subset(q, p, s)
        if pq and qp:
            return Relation.EQUAL
        if pq:
            return Relation.SUBSET_OPEN
        if qp:
            return Relation.SUPERSET_OPEN
    if overlap_sign(p, q) is not None:
        return Relation.OVERLAPPING
    return Relation.DISJOINT_OPEN


def _chart_lp(bodies, signs):
    d = bodies[0].dim
    rows = []
    for b, s in zip(bodies, signs):
        for g in b.generators:
            rows.append((g if s > 0 else _neg(g), ">=1"))
    return LinFeasProblem(d, rows)


def common_chart_signs(bodies, max_patterns: int = 4096):
    """Chart covector and lift signs putting all closures in one chart.

    Returns
    -------
    (tuple of Fraction, tuple of int) or None
    """
    bodies = list(bodies)
    n = len(bodies)
    patterns = itertools.product((1, -1), repeat=n - 1)
    for k, tail in enumerate(patterns):
        if k >= max_patterns:
            break
        signs = (1,) + tail
        v = feasible(_chart_lp(bodies, signs))
        if v.is_feasible:
            return v.witness, signs
    return None


def propagated_chart_signs(bodies, links):
    """Signs forced along overlapping pairs, then one chart LP.

    ``links`` lists index pairs known to overlap (e.g. tree edges); signs
    propagate from body 0 through them.
    """
    n = len(bodies)
    signs = [0] * n
    signs[0] = 1
    adj = {i: [] for i in range(n)}
    for i, j in links:
        adj[i].append(j)
        adj[j].append(i)
    stack = [0]
    while stack:
        i = stack.pop()
        for j in adj[i]:
            if signs[j] == 0:
                s = overlap_sign(bodies[i], bodies[j])
                if s is None:
                    return None
                signs[j] = signs[i] * s
                stack.append(j)
    if any(s == 0 for s in signs):
        return None
    v = feasible(_chart_lp(bodies, signs))
    return (v.witness, tuple(signs)) if v.is_feasible else None


def find_common_chart(bodies):
    """A hyperplane whose complement chart contains all closures, or None."""
    res = common_chart_signs(bodies)
    return None if res is None else ProjHyp(res[0])


def hull_union(p: ConePolytope, q: ConePolytope) -> ConePolytope:
    """Convex hull of the union inside a common chart.

    Overlapping bodies fix the relative sign; otherwise the first chart
    sign pattern found is used.
    """
    s = overlap_sign(p, q)
    if s is None:
        res = common_chart_signs([p, q])
        if res is None:
            raise NoCommonChart("bodies share no affine chart")
        s = res[1][1]
    gens = list(p.generators) + [g if s > 0 else _neg(g) for g in q.generators]
    try:
        return make_body(gens)
    except NotProperlyConvex as exc:
        raise NoCommonChart("hull of the union is not properly convex") from exc


def intersect(p: ConePolytope, q: ConePolytope):
    """Intersection of the open sets, or None when it is empty."""
    found = []
    for s in (1, -1):
        if open_overlap(p, q, s):
            rows = list(p.facets) + [f if s > 0 else _neg(f) for f in q.facets]
            found.append(body_from_facets(rows, p.dim))
    if not found:
        return None
    if len(found) > 1:
        raise SignAmbiguous("intersection is disconnected in P(V)")
    return found[0]


# ------------------------------------------------------------------ Hilbert metric


def _interior_lift(p: ConePolytope, v):
    v = primitive([to_rat(x) for x in (v.rep if isinstance(v, ProjPoint) else v)])
    vals = [_idot(f, v) for f in p.facets]
    if all(x > 0 for x in vals):
        return v
    if all(x < 0 for x in vals):
        return _neg(v)
    raise PointNotInterior(f"{v} is not in the open body")


def hilbert_cross_ratio(p: ConePolytope, x, y) -> Fraction:
    """Exact cross-ratio ``[a; x; y; b]`` with ``[0; 1; t; inf] = t``."""
    xv = _interior_lift(p, x)
    yv = _interior_lift(p, y)
    w = p.salient_witness
    xs = [Fraction(c, _idot(w, xv)) for c in xv]
    ys = [Fraction(c, _idot(w, yv)) for c in yv]
    if xs == ys:
        return Fraction(1)
    s_a = None
    s_b = None
    for f in p.facets:
        fx = sum((a * b for a, b in zip(f, xs)), Fraction(0))
        fy = sum((a * b for a, b in zip(f, ys)), Fraction(0))
        if fx == fy:
            continue
        s = fx / (fx - fy)
        if fy < fx:
            s_b = s if s_b is None else min(s_b, s)
        else:
            s_a = s if s_a is None else max(s_a, s)
    return ((1 - s_a) * s_b) / ((-s_a) * (s_b - 1))


def hilbert_distance(p: ConePolytope, x, y):
    """Hilbert distance in the open body.

    Returns
    -------
    (Fraction, float)
        Exact cross-ratio and ``0.5 * log`` of it.
    """
    cr = hilbert_cross_ratio(p, x, y)
    return cr, 0.5 * math.log(cr)


# ------------------------------------------------------------------ smooth bodies


@dataclass(frozen=True)
class ApproxBody:
    """Certified inner/outer polytopal sandwich of a convex body."""

    inner: ConePolytope
    outer: ConePolytope
    label: str = ""

    def certified(self) -> bool:
        return closed_subset(self.inner, self.outer, 1)

    @classmethod
    def exact(cls, body: ConePolytope, label: str = "") -> "ApproxBody":
        return cls(body, body, label)


def sandwich_smooth_body(membership, boundary_sampler, support_sampler, n_samples, label="") -> ApproxBody:
    """Polytopal sandwich from exact boundary points and supports.

    Parameters
    ----------
    membership : callable
        Exact closed-body membership test on vectors; every boundary sample
        must pass it.
    boundary_sampler, support_sampler : callable
        ``f(n) -> list of vectors`` with exact rational entries.
    n_samples : int
    """
    pts = boundary_sampler(n_samples)
    for v in pts:
        if not membership(v):
            raise DegenerateSampling(f"boundary sample {v} fails membership")
    try:
        inner = make_body(pts)
    except (DegenerateBody, NotProperlyConvex) as exc:
        raise DegenerateSampling(str(exc)) from exc
    sup = support_sampler(n_samples)
    outer = body_from_facets(sup)
    body = ApproxBody(inner, outer, label)
    if not body.certified():
        raise DegenerateSampling("inner body is not inside outer body")
    return body


def vec_str(v):
    return [rat_str(Fraction(x)) for x in v]
