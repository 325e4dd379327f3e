"""Reusable scene builders: symmetric squares and positive-definite cones,
thickenings, the reducible triangle example, diagonal-lattice transversality,
pyramid replacement and the certified free-product scene.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .bass_serre import (
    BridgeConfinement,
    CYCLIC,
    EdgeGroupSpec,
    GraphOfGroups,
    OrientedEdge,
    VertexGroupSpec,
    confinement_certificate,
    validate_gog,
    verify_hypotheses,
)
from .errors import (
    DegenerateBody,
    ApexOutside,
    AssemblyFailed,
    ChopNotPyramidal,
    DegenerateSampling,
    NoFlagFound,
)
from .occultation import FULL, WEAK, occultation_check
from .projgeom import (
    ApproxBody,
    ConePolytope,
    ProjHyp,
    ProjMap,
    ProjPoint,
    _neg,
    apply,
    body_from_facets,
    closed_subset,
    make_body,
    subset,
)
from .ratlin import RMat, primitive, rank, rat_str, spectral_report, to_rat


def _dot(a, b):
    return sum((x * y for x, y in zip(a, b)), Fraction(0))


# ------------------------------------------------------------------ scenes


@dataclass
class Scene:
    """Named bodies, maps and points plus an optional graph of groups."""

    dim: int
    bodies: dict = field(default_factory=dict)
    maps: dict = field(default_factory=dict)
    points: dict = field(default_factory=dict)
    gog: GraphOfGroups | None = None
    metadata: dict = field(default_factory=dict)


@dataclass(frozen=True)
class FlagPair:
    """Point, hyperplane through it and the certified orbit margin."""

    x: ProjPoint
    X: ProjHyp
    margin: Fraction
    d: int = 0
    window: int = 0
    base: int = 2

    def to_json(self) -> dict:
        return {"x": [str(v) for v in self.x.rep], "X": [str(v) for v in self.X.rep],
                "margin": rat_str(self.margin), "d": self.d, "window": self.window, "base": self.base}

    @classmethod
    def from_json(cls, doc: dict) -> "FlagPair":
        return cls(ProjPoint([to_rat(v) for v in doc["x"]]), ProjHyp([to_rat(v) for v in doc["X"]]),
                   to_rat(doc["margin"]), int(doc["d"]), int(doc["window"]), int(doc.get("base", 2)))

    def replay(self) -> bool:
        """Recompute the margin over the orbit window exactly."""
        if _dot(self.X.rep, self.x.rep) != 0:
            return False
        pts = soifer_orbit(self.d, self.window, self.base)
        return orbit_margin(self.X.rep, pts) == self.margin


# ------------------------------------------------------------------ symmetric squares


def sym_index(d: int):
    """Basis order: diagonal (i,i) first, then (i,j) with i<j lexicographic."""
    return [(i, i) for i in range(d)] + [(i, j) for i in range(d) for j in range(i + 1, d)]


def sym_dim(d: int) -> int:
    return d * (d + 1) // 2


def sym_coords(m) -> tuple:
    """Coordinates of a symmetric matrix (entries M_ij, no scaling)."""
    rows = m.rows if isinstance(m, RMat) else m
    return tuple(to_rat(rows[i][j]) for i, j in sym_index(len(rows)))


def sym_matrix(c, d: int) -> RMat:
    m = [[Fraction(0)] * d for _ in range(d)]
    for v, (i, j) in zip(c, sym_index(d)):
        m[i][j] = m[j][i] = to_rat(v)
    return RMat(m)


def sym_square(g: RMat) -> RMat:
    """Matrix of ``M -> g M g^T`` on symmetric matrices.

    The basis is ``E_ii`` then ``E_ij + E_ji`` (i<j), so coordinates are the
    entries ``M_ij`` and integer ``g`` gives an integer matrix.
    """
    d = g.dim
    idx = sym_index(d)
    a = g.rows
    out = []
    for p, q in idx:
        row = []
        for i, j in idx:
            if i == j:
                row.append(a[p][i] * a[q][i])
            else:
                row.append(a[p][i] * a[q][j] + a[p][j] * a[q][i])
        out.append(row)
    return RMat(out)


def sym_square_plus(g: RMat) -> RMat:
    """Block sum of :func:`sym_square` with the trivial 1-dimensional summand."""
    s = sym_square(g)
    n = s.dim
    return RMat([list(r) + [0] for r in s.rows] + [[0] * n + [1]])


def pd_facet(v) -> tuple:
    """Covector of ``M -> v^T M v`` in symmetric coordinates."""
    d = len(v)
    return tuple(to_rat(v[i]) * to_rat(v[j]) * (1 if i == j else 2) for i, j in sym_index(d))


def rank_one(v) -> tuple:
    """Coordinates of ``v v^T``."""
    return tuple(to_rat(v[i]) * to_rat(v[j]) for i, j in sym_index(len(v)))


def small_vectors(d: int, count: int):
    """Deterministic primitive integer vectors (first nonzero entry > 0)."""
    out = []
    k = 1
    while len(out) < count:
        found = []
        for v in itertools.product(range(-k, k + 1), repeat=d):
            if max(abs(x) for x in v) != k:
                continue
            if tuple(primitive(v)) != v:
                continue
            first = next(x for x in v if x != 0)
            if first > 0:
                found.append(v)
        found.sort(key=lambda v: (sum(x * x for x in v), [-x for x in v]))
        out += found
        k += 1
    if d == 2:
        head = [(1, 0), (0, 1), (1, 1), (1, -1)]
        out = head + [v for v in out if v not in head]
    return out[:count]


def pd_cone_body(d: int, n_samples: int, samples=None) -> ApproxBody:
    """Sandwich of the positive-definite cone in symmetric coordinates.

    Inner generators are rank-one ``v v^T``; outer facets are ``v^T M v >= 0``.
    """
    n = sym_dim(d)
    if n_samples < n + 1:
        raise DegenerateSampling(f"need at least {n + 1} samples")
    vs = samples or small_vectors(d, n_samples)
    try:
        inner = make_body([rank_one(v) for v in vs])
        outer = body_from_facets([pd_facet(v) for v in vs])
    except Exception as exc:  # noqa: BLE001 - any degeneracy is a sampling problem
        raise DegenerateSampling(str(exc)) from exc
    body = ApproxBody(inner, outer, f"pd{d}")
    if not body.certified():
        raise DegenerateSampling("inner not inside outer")
    return body


def det_rat(m: RMat) -> Fraction:
    return m.det()


def root_lower(value: Fraction, k: int, den: int = 64) -> Fraction:
    """Largest multiple of ``1/den`` whose k-th power is at most ``value``."""
    lo, hi = 0, 1
    while Fraction(hi, den) ** k <= value:
        hi *= 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if Fraction(mid, den) ** k <= value:
            lo = mid
        else:
            hi = mid
    return Fraction(lo, den)


def root_upper(value: Fraction, k: int, den: int = 64) -> Fraction:
    low = root_lower(value, k, den)
    return low if low ** k == value else low + Fraction(1, den)


def _trace_pairing(n_mat: RMat) -> tuple:
    """Covector of ``M -> tr(N M)`` for symmetric N."""
    d = n_mat.dim
    return tuple(n_mat.rows[i][j] * (1 if i == j else 2) for i, j in sym_index(d))


def thickened_pd_body(d: int, n_samples: int) -> ApproxBody:
    """Sandwich of ``{(M, t) : M > 0, |t|^d < det M}`` in dimension n_d + 1.

    Inner points are exact: rank-one ``(v v^T, 0)``, ``(I, +-1)`` and
    ``(I + v v^T, +-t)`` with ``t^d <= det``. Outer facets are the PD supports
    and tangents of the concave ``det^(1/d)``: at ``M0`` with a rational upper
    bound ``u >= det(M0)^(1/d)``, ``(u/d) tr(M0^-1 M) -+ t >= 0``.
    """
    n = sym_dim(d)
    if n_samples < n + 1:
        raise DegenerateSampling(f"need at least {n + 1} samples")
    vs = small_vectors(d, n_samples)
    ident = RMat.identity(d)
    inner = [rank_one(v) + (0,) for v in vs]
    inner += [sym_coords(ident) + (s,) for s in (1, -1)]
    outer = [pd_facet(v) + (0,) for v in vs]
    centers = [ident] + [ident + RMat([[v[i] * v[j] for j in range(d)] for i in range(d)]) for v in vs[: max(1, n_samples // 2)]]
    for m0 in centers:
        det = m0.det()
        t = root_lower(det, d)
        if m0 != ident and t > 0:
            inner += [sym_coords(m0) + (s * t,) for s in (1, -1)]
        u = root_upper(det, d)
        tp = _trace_pairing(m0 ** -1)
        for s in (1, -1):
            outer.append(tuple(u * c / d for c in tp) + (-s,))
    try:
        body = ApproxBody(make_body(inner), body_from_facets(outer), f"thick{d}")
    except Exception as exc:  # noqa: BLE001
        raise DegenerateSampling(str(exc)) from exc
    if not body.certified():
        raise DegenerateSampling("inner not inside outer")
    return body


def in_thickened(m: RMat, t) -> bool:
    """Exact closed membership ``M >= 0`` (assumed) and ``|t|^d <= det M``."""
    t = to_rat(t)
    return abs(t) ** m.dim <= m.det()


# ------------------------------------------------------------------ triangle example


def triangle_scene(i_ends=((0, 1, 3), (0, 3, 1))) -> Scene:
    """Orthant triangle T, ``h = diag(4, 1/2, 1/2)`` and ``C = hull(b1, I)``."""
    t = make_body([(1, 0, 0), (0, 1, 0), (0, 0, 1)])
    h = ProjMap(RMat.diag(*[4, Fraction(1, 2), Fraction(1, 2)]))
    c = make_body([(1, 0, 0)] + [tuple(p) for p in i_ends])
    spec = VertexGroupSpec(CYCLIC, t, generator=h, window=3, cc_body=c)
    gog = GraphOfGroups({"v": spec}, {}, "v")
    scene = Scene(3, {"T": t, "C": c}, {"h": h}, {"b1": ProjPoint((1, 0, 0))}, gog,
                  {"name": "triangle"})
    scene.metadata["flags"] = triangle_flags(scene)
    return scene


def triangle_flags(scene: Scene) -> dict:
    t, c, h = scene.bodies["T"], scene.bodies["C"], scene.maps["h"]
    line_fixed = all(h.apply_vector(v) == primitive(v) for v in [(0, 1, 0), (0, 0, 1), (0, 1, 1), (0, 1, 3)])
    inv = spectral_report(h.inverse().mat)
    return {
        "T_invariant": apply(h, t) == t,
        "C_invariant": apply(h, c) == c,
        "line_b2_b3_fixed_pointwise": line_fixed,
        "h_inverse_not_proximal": not inv.proximal,
        "C_inside_T": subset(c, t),
    }


# ------------------------------------------------------------------ diagonal-lattice transversality


def soifer_generators(d: int, base: int = 2):
    """Diagonal ``a_i`` with ``base^(d-1)`` at slot i and ``base^-1`` elsewhere."""
    gens = []
    for i in range(d - 1):
        diag = [Fraction(1, base)] * d
        diag[i] = Fraction(base) ** (d - 1)
        gens.append(RMat.diag(*diag))
    return gens


def soifer_orbit(d: int, window: int, base: int = 2):
    """Orbit of ``[1:...:1]`` under exponents in ``[-N, N]^(d-1)`` minus 0.

    Points are normalised to max coordinate 1.
    """
    pts = []
    for ks in itertools.product(range(-window, window + 1), repeat=d - 1):
        if not any(ks):
            continue
        total = sum(ks)
        exps = [d * k - total for k in ks] + [-total]
        v = [Fraction(base) ** e for e in exps]
        top = max(v)
        pts.append(tuple(x / top for x in v))
    return pts


def orbit_margin(x_cov, pts) -> Fraction:
    """``min |<X, y>| / |X|_1`` over points y (normalised to max 1)."""
    n1 = sum(abs(to_rat(a)) for a in x_cov)
    return min(abs(_dot(x_cov, y)) for y in pts) / n1


def soifer_transversality(d: int, window: int = 6, budget: int = 6, base: int = 2) -> FlagPair:
    """Hyperplane through ``[1:...:1]`` with the best exact orbit margin.

    Candidates are integer covectors with zero coordinate sum and entries in
    ``[-budget, budget]``, enumerated in a fixed order; ties keep the first.

    Raises
    ------
    NoFlagFound
        No candidate has positive margin.
    """
    if d < 2:
        raise ValueError("d >= 2 required")
    pts = soifer_orbit(d, window, base)
    best, best_m = None, Fraction(-1)
    for head in itertools.product(range(-budget, budget + 1), repeat=d - 1):
        cov = tuple(head) + (-sum(head),)
        if not any(cov) or tuple(primitive(cov)) != cov:
            continue
        first = next(a for a in cov if a != 0)
        if first < 0:
            continue
        m = orbit_margin(cov, pts)
        if m > best_m:
            best, best_m = cov, m
    if best is None or best_m <= 0:
        raise NoFlagFound(best_m if best is not None else None)
    return FlagPair(ProjPoint((1,) * d), ProjHyp(best), best_m, d, window, base)


# ------------------------------------------------------------------ pyramid replacement


def _adjacent(body: ConePolytope, v) -> list:
    """Generators sharing an edge (2-face of the cone) with ``v``."""
    d = body.dim
    fv = [f for f in body.facets if _dot(f, v) == 0]
    out = []
    for u in body.generators:
        if u == v:
            continue
        common = [f for f in fv if _dot(f, u) == 0]
        if common and rank(common, d) == d - 2:
            out.append(u)
        elif d == 2 and not common:
            out.append(u)
    return out


def pyramid_replace(body: ConePolytope, chop, apex_new, orbit=None) -> ConePolytope:
    """Replace the vertex pyramid cut off by ``chop`` (and its orbit) by a
    smaller pyramid on the same base with tip ``apex_new``.

    Raises
    ------
    ChopNotPyramidal
        ``chop`` does not cut off exactly one vertex.
    ApexOutside
        The new tip is not in the closed old pyramid strictly beyond ``chop``.
    """
    cov = tuple(chop.rep if isinstance(chop, ProjHyp) else primitive(chop))
    orbit = orbit or [ProjMap.identity(body.dim)]
    vals = [_dot(cov, g) for g in body.generators]
    if sum(1 for x in vals if x < 0) != 1:
        cov = _neg(cov)
        vals = [-x for x in vals]
    neg = [g for g, x in zip(body.generators, vals) if x < 0]
    if len(neg) != 1 or any(x == 0 for x in vals):
        raise ChopNotPyramidal("chop must strictly separate exactly one vertex")
    v = neg[0]
    base = []
    for u in _adjacent(body, v):
        cu, cv = _dot(cov, u), _dot(cov, v)
        base.append(primitive([cu * a - cv * b for a, b in zip(v, u)]))
    apex = primitive(apex_new.rep if isinstance(apex_new, ProjPoint) else apex_new)
    if not all(_dot(f, apex) >= 0 for f in body.facets):
        apex = _neg(apex)
    if not all(_dot(f, apex) >= 0 for f in body.facets) or _dot(cov, apex) >= 0:
        raise ApexOutside("new tip must lie in the closed pyramid beyond the chop")
    if apex == tuple(v):
        return body
    gens = set(body.generators)
    new = []
    images = set()
    for g in orbit:
        if apply(g, body) != body:
            raise ValueError("orbit element does not preserve the body")
        gv = g.apply_vector(v)
        if gv not in gens and _neg(gv) not in gens:
            raise ValueError("orbit image of the tip is not a vertex")
        sgn = 1 if gv in gens else -1
        if gv in images:
            continue
        images.add(gv)
        gens.discard(gv if sgn > 0 else _neg(gv))
        for p in base + [apex]:
            q = g.apply_vector(p)
            new.append(q if sgn > 0 else _neg(q))
    out = make_body(list(gens) + new)
    if not closed_subset(out, body, 1):
        raise ApexOutside("replacement leaves the body")
    for p in new[: len(base)]:
        if p not in out.generators:
            raise ApexOutside("base points are no longer vertices")
    return out


# ------------------------------------------------------------------ free-product flagship

SIMPLEX = ((1, 0, 0), (0, 1, 0), (0, 0, 1))
# tips of the replaced pyramids: chop at x1 = 3/4 of the coordinate sum,
# new tip (7/8, 1/16, 1/16)
CHOP = (1, -3, -3)
TIP = (14, 1, 1)
# g sends the simplex onto a small triangle around the tip; its apex
# (114, 7, 7) is beyond the tip and its base cuts through the replaced pyramid
G_A = ((114, 27, 27), (7, 4, 1), (7, 1, 4))
G_C = ((27, 27, 114), (4, 1, 7), (1, 4, 7))


def factor_z3():
    p3 = ProjMap(RMat([[0, 0, 1], [1, 0, 0], [0, 1, 0]]))
    return "Z/3", p3


def factor_z2():
    s = ProjMap(RMat([[0, 1, 0], [1, 0, 0], [0, 0, 1]]))
    return "Z/2", s


def _orbit(gen: ProjMap):
    ident = ProjMap.identity(gen.dim)
    out, p = [ident], gen
    while p != ident:
        out.append(p)
        p = p @ gen
    return out


def _confinement_boxes(kappa: Fraction, mu: Fraction):
    """Boxes with the attracting/repelling points of diag(l,1,1/l) on their boundary."""
    h = Fraction(-1, 2)
    u_plus = make_body([(1, 0, h), (1, kappa, h), (1, kappa, mu), (1, 0, mu)])
    u_minus = make_body([(h, 0, 1), (h, kappa, 1), (mu, kappa, 1), (mu, 0, 1)])
    return u_plus, u_minus


def diagonal_confinement_example(lam: int = 4):
    """Standalone confinement data for ``h = diag(lam, 1, 1/lam)`` on the simplex.

    Returns
    -------
    (ProjMap, ConePolytope, ConePolytope, ConePolytope, list, list)
        ``h``, the simplex, U+, U-, plus targets and minus targets. The
        targets are boxes in the chart ``x2 = 1`` that stick out of the simplex.
    """
    h = ProjMap(RMat.diag(lam, 1, Fraction(1, lam)))
    u_plus, u_minus = _confinement_boxes(Fraction(1, 2), Fraction(1, 2))
    q, half = Fraction(1, 4), Fraction(1, 2)
    t_plus = make_body([(q, 1, -half), (1, 1, -half), (1, 1, half), (q, 1, half)])
    t_minus = make_body([(-half, 1, q), (-half, 1, 1), (half, 1, 1), (half, 1, q)])
    return h, make_body(SIMPLEX), u_plus, u_minus, [t_plus], [t_minus]


def assemble_free_product_scene(lam: int = 2, n: int | None = None, swap: bool = False,
                                kappa=Fraction(1, 2), mu=Fraction(1, 2), max_n: int = 10,
                                with_cc: bool = False, shrink=Fraction(1, 256)) -> Scene:
    """Certified scene for the free product of two finite cyclic groups.

    Graph ``v0 - w - v1`` with trivial edge groups, base ``w``; the central
    body is the simplex, invariant under ``beta = diag(lam, 1, 1/lam)``, and
    ``g_e0 = beta^-N g_A^-1``, ``g_e1 = beta^N g_C^-1``. The smallest N (or the
    given one) for which the central triple and the beta confinement hold is
    used.

    Raises
    ------
    AssemblyFailed
        With the first failing stage.
    """
    omega = make_body(SIMPLEX)
    factors = [factor_z3(), factor_z2()]
    if swap:
        factors.reverse()
    beta = ProjMap(RMat.diag(*[lam, 1, Fraction(1, lam)]))
    bodies, gens = [], []
    for _, gen in factors:
        orb = _orbit(gen)
        bodies.append(pyramid_replace(omega, CHOP, TIP, orb))
        gens.append(gen)
    ga, gc = ProjMap(RMat(G_A)), ProjMap(RMat(G_C))
    a = apply(ga.inverse(), bodies[0])
    c = apply(gc.inverse(), bodies[1])
    u_plus, u_minus = _confinement_boxes(to_rat(kappa), to_rat(mu))
    for i, (gm, body) in enumerate(((ga, bodies[0]), (gc, bodies[1]))):
        tri = apply(gm, omega)
        for gam in _orbit(gens[i])[1:]:
            cert = occultation_check(tri, body, apply(gam, tri))
            if not cert.holds:
                raise AssemblyFailed(f"vertex triple v{i}", cert.failed_at)

    def attempt(k):
        direct = occultation_check(apply(beta ** (-k), a), omega, apply(beta ** k, c))
        if not direct.holds:
            return "bridge triple", direct.failed_at
        conf = confinement_certificate(beta, omega, u_plus, u_minus, k, [c], [a], strict=False)
        if not conf.holds:
            return "confinement", conf.failed_stage
        return None

    if n is None:
        for k in range(1, max_n + 1):
            if attempt(k) is None:
                n = k
                break
        else:
            raise AssemblyFailed("bridge power search", f"no N <= {max_n}")
    else:
        res = attempt(n)
        if res is not None:
            raise AssemblyFailed(*res)
    cc = {}
    if with_cc:
        for i, body in enumerate(bodies):
            cc[i] = _shrink(body, to_rat(shrink))
    names = [f[0] for f in factors]
    vertices = {
        "v0": VertexGroupSpec(CYCLIC, bodies[0], generator=gens[0], cc_body=cc.get(0)),
        "v1": VertexGroupSpec(CYCLIC, bodies[1], generator=gens[1], cc_body=cc.get(1)),
        "w": VertexGroupSpec("finite", omega, elements=[], cc_body=omega if with_cc else None),
    }
    ge0 = beta ** (-n) @ ga.inverse()
    ge1 = beta ** n @ gc.inverse()
    edges = {
        "e0": OrientedEdge("e0", "w", "v0", ge0, "e0r", EdgeGroupSpec()),
        "e0r": OrientedEdge("e0r", "v0", "w", ge0.inverse(), "e0", EdgeGroupSpec()),
        "e1": OrientedEdge("e1", "w", "v1", ge1, "e1r", EdgeGroupSpec()),
        "e1r": OrientedEdge("e1r", "v1", "w", ge1.inverse(), "e1", EdgeGroupSpec()),
    }
    bridge = BridgeConfinement("w", beta, u_plus, u_minus, n, [c], [a])
    gog = GraphOfGroups(vertices, edges, "w", {"beta": bridge})
    validate_gog(gog)
    report = verify_hypotheses(gog)
    if report.verdict != "Holds":
        bad = report.first_failure
        raise AssemblyFailed("hypotheses", f"{bad.vertex} {bad.e} {bad.e2} {bad.gamma}" if bad else "")
    scene = Scene(3, {"Omega": omega, "Omega0": bodies[0], "Omega1": bodies[1], "A": a, "C": c,
                      "U+": u_plus, "U-": u_minus},
                  {"beta": beta, "gA": ga, "gC": gc, "gamma0": gens[0], "gamma1": gens[1]},
                  {}, gog, {"name": "free-product", "N": n, "lambda": lam, "factors": names})
    return scene


def _shrink(body: ConePolytope, eps: Fraction) -> ConePolytope:
    """Move every generator toward the barycentre (symmetric bodies stay symmetric)."""
    w = body.salient_witness
    center = [sum(Fraction(g[i], _dot(w, g)) for g in body.generators) for i in range(body.dim)]
    pts = []
    for g in body.generators:
        gn = [Fraction(x, _dot(w, g)) for x in g]
        pts.append([(1 - eps) * x + eps * y for x, y in zip(gn, center)])
    return make_body(pts)


# ------------------------------------------------------------------ random generators


def random_polygon(rng: random.Random, cx, cy, radius, n: int = 6, den: int = 256,
                   spread: float = 0.4) -> ConePolytope:
    """Random rational convex polygon (lifted to z = 1) around a center.

    Vertex radii are drawn from ``radius * [1 - spread, 1]``.
    """
    import math

    while True:
        angles = sorted(rng.uniform(0, 2 * math.pi) for _ in range(n))
        pts = []
        for t in angles:
            r = radius * rng.uniform(1.0 - spread, 1.0)
            x = Fraction(round((cx + r * math.cos(t)) * den), den)
            y = Fraction(round((cy + r * math.sin(t)) * den), den)
            pts.append((x, y, 1))
        try:
            return make_body(pts)
        except DegenerateBody:
            continue


def random_box(rng: random.Random, x0, x1, y0, y1, den: int = 16) -> ConePolytope:
    def q(v):
        return Fraction(round(v * den), den)

    a, b, c, d = q(x0), q(x1), q(y0), q(y1)
    return make_body([(a, c, 1), (b, c, 1), (b, d, 1), (a, d, 1)])


def random_triple(rng: random.Random):
    """Random polygons near x = 0, 2, 4 (sizes make every outcome common)."""
    a = random_polygon(rng, 0, rng.uniform(-0.6, 0.6), rng.uniform(1.0, 2.0), rng.randint(3, 7))
    b = random_polygon(rng, 2, rng.uniform(-0.4, 0.4), rng.uniform(1.6, 2.8), rng.randint(3, 7))
    c = random_polygon(rng, 4, rng.uniform(-0.6, 0.6), rng.uniform(1.0, 2.0), rng.randint(3, 7))
    return a, b, c


def random_weak_triple(rng: random.Random, tries: int = 1000):
    """Rejection-sampled triple in weak occultation position."""
    for _ in range(tries):
        t = random_triple(rng)
        if occultation_check(*t, mode=WEAK).holds:
            return t
    raise RuntimeError("rejection sampling exhausted")


def random_lining_quadruple(rng: random.Random, tries: int = 2000):
    """Bodies along a line with (a,b,c) and (b,c,d) in occultation position."""
    for _ in range(tries):
        radii = [1.0, 2.0, 2.0, 1.0]
        bodies = [random_polygon(rng, 2 * k, rng.uniform(-0.1, 0.1), radii[k] * rng.uniform(0.9, 1.1),
                                 rng.randint(7, 10), spread=0.1) for k in range(4)]
        a, b, c, d = bodies
        if occultation_check(a, b, c).holds and occultation_check(b, c, d).holds:
            return a, b, c, d
    raise RuntimeError("rejection sampling exhausted")


def random_valence_quadruple(rng: random.Random, tries: int = 2000):
    """Central body b with a, c, d around it; (a,b,c), (a,b,d), (c,b,d) hold."""
    import math

    for _ in range(tries):
        b = random_polygon(rng, 0, 0, 2.0, rng.randint(8, 10), spread=0.1)
        others = []
        for k in range(3):
            t = 2 * math.pi * k / 3 + rng.uniform(-0.15, 0.15)
            r = rng.uniform(2.0, 2.2)
            others.append(random_polygon(rng, r * math.cos(t), r * math.sin(t), rng.uniform(0.45, 0.6),
                                         rng.randint(3, 6), spread=0.2))
        a, c, d = others
        if all(occultation_check(*t).holds for t in ((a, b, c), (a, b, d), (c, b, d))):
            return a, b, c, d
    raise RuntimeError("rejection sampling exhausted")


def aligned_boxes():
    """Boxes [0,2], [1,3], [2,4], [3,5] x [0,1]: weak but not full occultation."""
    return [make_body([(x, 0, 1), (x + 2, 0, 1), (x + 2, 1, 1), (x, 1, 1)]) for x in range(4)]
