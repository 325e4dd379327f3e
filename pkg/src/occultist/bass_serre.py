"""Graphs of groups acting projectively, their Bass-Serre trees, and the
combination-theorem checks.

Conventions: an oriented edge ``e`` runs from ``origin`` to ``target`` and
names its reverse; ``g_e`` maps the target body near the origin body, and
``g_e = g_ebar^-1`` in PGL. Edge-group images are given as elements of the
origin vertex group (``iota_e``), listed in the same order on ``e`` and
``ebar``.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field

from .errors import (
    BudgetExceeded,
    ConclusionViolated,
    NestingFailed,
    RelationViolated,
    UnsupportedGraph,
    UnsupportedGroupKind,
)
from .lpcore import LinFeasProblem, feasible
from .occultation import FULL, occultation_check
from .parallel import ordered_map
from .projgeom import (
    ConePolytope,
    ProjMap,
    Relation,
    _neg,
    apply,
    closed_subset,
    hull_union,
    intersect,
    overlap_sign,
    propagated_chart_signs,
    relate,
    subset,
)
from .ratlin import singular_log_ratio, operator_distance_to_identity

FINITE = "finite"
CYCLIC = "cyclic"
BOUNDED = "bounded_words"
ORDER_CAP = 64


def _order(h: ProjMap, cap: int = ORDER_CAP):
    """Projective order of ``h`` if at most ``cap``, else None."""
    ident = ProjMap.identity(h.dim)
    p = h
    for k in range(1, cap + 1):
        if p == ident:
            return k
        p = p @ h
    return None


@dataclass
class Confinement:
    """Neighbourhoods for a confinement certificate of a cyclic group."""

    u_plus: ConePolytope
    u_minus: ConePolytope
    n: int


@dataclass
class VertexGroupSpec:
    """Vertex group data ``rho_v(Gamma_v)`` with its invariant body.

    kind ``finite`` lists all elements; ``cyclic`` has a generator (finite
    order is enumerated completely, infinite order uses ``window`` and a
    :class:`Confinement`); ``bounded_words`` enumerates words in
    ``generators`` up to ``max_length`` and never certifies.
    """

    kind: str
    body: ConePolytope
    elements: list = field(default_factory=list)
    generator: ProjMap | None = None
    generators: list = field(default_factory=list)
    max_length: int = 0
    window: int = 3
    confinement: Confinement | None = None
    cc_body: ConePolytope | None = None
    exponent_cap: int = ORDER_CAP

    def __post_init__(self):
        if self.kind not in (FINITE, CYCLIC, BOUNDED):
            raise UnsupportedGroupKind(self.kind)
        if self.kind == FINITE:
            ident = ProjMap.identity(self.body.dim)
            els = list(dict.fromkeys(self.elements))
            if ident in els:
                els.remove(ident)
            self.elements = [ident] + els
        self._order = _order(self.generator, self.exponent_cap) if self.kind == CYCLIC else None

    @property
    def order(self):
        if self.kind == FINITE:
            return len(self.elements)
        if self.kind == CYCLIC:
            return self._order
        return None

    @property
    def is_finite(self) -> bool:
        return self.order is not None

    def enumerate(self):
        """Deterministic list of ``(label, ProjMap)``; identity first."""
        if self.kind == FINITE:
            return [(f"g{i}", g) for i, g in enumerate(self.elements)]
        if self.kind == CYCLIC:
            if self._order is not None:
                return [(f"h^{k}", self.generator ** k) for k in range(self._order)]
            ks = sorted(range(-self.window, self.window + 1), key=lambda k: (abs(k), -k))
            return [(f"h^{k}", self.generator ** k) for k in ks]
        out = {ProjMap.identity(self.body.dim): "e"}
        frontier = [("", ProjMap.identity(self.body.dim))]
        gens = []
        for i, g in enumerate(self.generators):
            gens += [(f"s{i}", g), (f"S{i}", g.inverse())]
        for _ in range(self.max_length):
            nxt = []
            for word, m in frontier:
                for lab, g in gens:
                    p = m @ g
                    if p not in out:
                        out[p] = word + lab
                        nxt.append((word + lab, p))
            frontier = nxt
        return [(lab, m) for m, lab in out.items()]

    def power_of_generator(self, w: ProjMap):
        """Exponent k with ``w = h^k`` (|k| bounded by the cap), else None."""
        if self.kind != CYCLIC:
            raise UnsupportedGroupKind("power test needs a cyclic group")
        ident = ProjMap.identity(w.dim)
        if w == ident:
            return 0
        up, down = ident, ident
        hinv = self.generator.inverse()
        for k in range(1, self.exponent_cap + 1):
            up = up @ self.generator
            down = down @ hinv
            if up == w:
                return k
            if down == w:
                return -k
        return None

    def contains(self, w: ProjMap) -> bool:
        if self.kind == FINITE:
            return w in self.elements
        if self.kind == CYCLIC:
            return self.power_of_generator(w) is not None
        raise UnsupportedGroupKind("membership in bounded_words groups is undecidable here")

    def group_generators(self):
        if self.kind == FINITE:
            return self.elements[1:]
        if self.kind == CYCLIC:
            return [self.generator]
        return list(self.generators)


@dataclass
class EdgeGroupSpec:
    """Edge group as images in the origin vertex group.

    kind ``trivial``, ``finite`` (``images``: every element, same order on
    both orientations) or ``cyclic`` (``image`` of the generator).
    """

    kind: str = "trivial"
    images: list = field(default_factory=list)
    image: ProjMap | None = None

    def generators(self):
        if self.kind == "trivial":
            return []
        if self.kind == "finite":
            return list(self.images)
        return [self.image]


@dataclass
class OrientedEdge:
    name: str
    origin: str
    target: str
    g: ProjMap
    reverse: str
    edge_group: EdgeGroupSpec = field(default_factory=EdgeGroupSpec)


@dataclass
class BridgeConfinement:
    """Confinement of a vertex body under an extra element ``h``.

    Certifies ``(h^-j A, Omega_vertex, h^k C)`` for all j, k >= n, covering
    the bridge triples of a free-product assembly at every larger power.
    """

    vertex: str
    h: ProjMap
    u_plus: ConePolytope
    u_minus: ConePolytope
    n: int
    plus_targets: list
    minus_targets: list


@dataclass
class GraphOfGroups:
    vertices: dict
    edges: dict
    base_vertex: str
    bridge: dict = field(default_factory=dict)

    def out_edges(self, v):
        return sorted((e for e in self.edges.values() if e.origin == v), key=lambda e: e.name)

    @property
    def dim(self):
        return next(iter(self.vertices.values())).body.dim


# ------------------------------------------------------------------ validation


def _subgroup_elements(vs: VertexGroupSpec, eg: EdgeGroupSpec):
    """Elements of iota_e(Gamma_e) inside a finite vertex group."""
    ident = ProjMap.identity(vs.body.dim)
    if eg.kind == "trivial":
        return {ident}
    if eg.kind == "finite":
        return set(eg.images) | {ident}
    out = {ident}
    p = eg.image
    for _ in range(ORDER_CAP):
        if p in out:
            break
        out.add(p)
        p = p @ eg.image
    return out


def validate_gog(g: GraphOfGroups) -> bool:
    """Check the edge relations, edge-group membership and body invariance.

    Raises
    ------
    RelationViolated
        With the offending edge and element.
    """
    for v, spec in g.vertices.items():
        for gen in spec.group_generators():
            if apply(gen, spec.body) != spec.body:
                raise RelationViolated(v, "body invariance", gen, None)
        if spec.cc_body is not None:
            if not subset(spec.cc_body, spec.body):
                raise RelationViolated(v, "cc_body inside body")
            for gen in spec.group_generators():
                if apply(gen, spec.cc_body) != spec.cc_body:
                    raise RelationViolated(v, "cc_body invariance", gen, None)
    for e in g.edges.values():
        if e.origin not in g.vertices or e.target not in g.vertices:
            raise RelationViolated(e.name, "endpoint")
        r = g.edges.get(e.reverse)
        if r is None or r.origin != e.target or r.target != e.origin or r.reverse != e.name:
            raise RelationViolated(e.name, "reverse edge")
        if e.g != r.g.inverse():
            raise RelationViolated(e.name, "g_e = g_ebar^-1", e.g, r.g.inverse())
        if e.edge_group.kind != r.edge_group.kind:
            raise RelationViolated(e.name, "edge group kinds")
        ge, rg = e.edge_group.generators(), r.edge_group.generators()
        if len(ge) != len(rg):
            raise RelationViolated(e.name, "edge group sizes")
        ov = g.vertices[e.origin]
        for i, (a, b) in enumerate(zip(ge, rg)):
            rhs = e.g @ b @ e.g.inverse()
            if a != rhs:
                raise RelationViolated(e.name, f"edge element {i}", a, rhs)
            if ov.kind != BOUNDED and not ov.contains(a):
                raise RelationViolated(e.name, f"edge element {i} not in vertex group", a)
    seen = {g.base_vertex}
    todo = [g.base_vertex]
    while todo:
        v = todo.pop()
        for e in g.out_edges(v):
            if e.target not in seen:
                seen.add(e.target)
                todo.append(e.target)
    if seen != set(g.vertices):
        raise RelationViolated("graph", "connectedness")
    return True


# ------------------------------------------------------------------ cosets


def _in_edge_subgroup(vs: VertexGroupSpec, eg: EdgeGroupSpec, w: ProjMap) -> bool:
    if eg.kind == "trivial":
        return w.is_identity()
    if eg.kind == "finite":
        return w.is_identity() or w in eg.images
    # cyclic edge group image <u>: w in <u>
    probe = VertexGroupSpec(CYCLIC, vs.body, generator=eg.image, exponent_cap=vs.exponent_cap)
    return probe.power_of_generator(w) is not None


def coset_reps(vs: VertexGroupSpec, eg: EdgeGroupSpec):
    """Left coset representatives of Gamma_v / iota_e(Gamma_e).

    Returns
    -------
    (list of (label, ProjMap), bool)
        Representatives (identity first) and whether the list is complete.
    """
    if vs.kind == CYCLIC and vs.order is None:
        if eg.kind == "cyclic":
            p = vs.power_of_generator(eg.image)
            if p is None:
                raise UnsupportedGroupKind("edge image is not a power of the generator")
            p = abs(p)
            return [(f"h^{k}", vs.generator ** k) for k in range(p)], True
        if eg.kind == "finite" and len(eg.images) > 0:
            raise UnsupportedGroupKind("infinite cyclic group with a finite nontrivial edge group")
        return vs.enumerate(), False
    reps = []
    for lab, gam in vs.enumerate():
        if any(_in_edge_subgroup(vs, eg, r.inverse() @ gam) for _, r in reps):
            continue
        reps.append((lab, gam))
    return reps, vs.kind != BOUNDED


# ------------------------------------------------------------------ confinement


@dataclass
class ConfinementCertificate:
    holds: bool
    n: int
    stages: dict
    failed_stage: str | None = None
    h: ProjMap | None = None
    middle: ConePolytope | None = None
    u_plus: ConePolytope | None = None
    u_minus: ConePolytope | None = None
    plus_targets: list = field(default_factory=list)
    minus_targets: list = field(default_factory=list)
    blocking_lps: list = field(default_factory=list)


def _strictly_inside(p: ConePolytope, q: ConePolytope) -> bool:
    """cl(p) inside the open q (some lift)."""
    for s in (1, -1):
        if all(s * sum(a * b for a, b in zip(f, g)) > 0 for g in p.generators for f in q.facets):
            return True
    return False


def _properly_nested(h: ProjMap, u: ConePolytope) -> bool:
    img = apply(h, u)
    return subset(img, u) and img != u


def _open_blocking(u_minus: ConePolytope, middle: ConePolytope, u_plus: ConePolytope):
    """Every hyperplane meeting int U- and int U+ meets int middle?

    Needs both U's to meet the middle; returns (holds, lps).
    """
    sm = overlap_sign(middle, u_minus)
    sp = overlap_sign(middle, u_plus)
    if sm is None or sp is None:
        return False, []
    um = [g if sm > 0 else _neg(g) for g in u_minus.generators]
    up = [g if sp > 0 else _neg(g) for g in u_plus.generators]
    lps = []
    for i, a in enumerate(um):
        for j, c in enumerate(up):
            rows = [(m, ">=0") for m in middle.generators] + [(a, "<=-1"), (c, "<=-1")]
            prob = LinFeasProblem(middle.dim, rows)
            v = feasible(prob)
            lps.append(((i, j), prob, v))
            if v.is_feasible:
                return False, lps
    return True, lps


def confinement_certificate(h: ProjMap, middle: ConePolytope, u_plus: ConePolytope,
                            u_minus: ConePolytope, n: int, plus_targets, minus_targets,
                            strict: bool = True) -> ConfinementCertificate:
    """Certify occultation of ``(h^-j A, middle, h^k C)`` for all j, k >= n.

    Stages: (a) ``h`` nests cl(U+) properly into itself and ``h^-1`` nests
    cl(U-); (b) cl(h^n C) lies in open U+ for every plus target and cl(h^-n A)
    in open U- for every minus target; (c) ``middle`` is h-invariant, U- and
    U+ are disjoint, every hyperplane meeting both open U's meets the open
    middle, and each target meets but is not inside the middle.

    Raises
    ------
    NestingFailed
        When ``strict`` and a stage fails.
    """
    stages = {}
    stages["a_plus"] = _properly_nested(h, u_plus)
    stages["a_minus"] = _properly_nested(h.inverse(), u_minus)
    hn = h ** n
    hmn = h ** (-n)
    stages["b_plus"] = all(_strictly_inside(apply(hn, t), u_plus) for t in plus_targets)
    stages["b_minus"] = all(_strictly_inside(apply(hmn, t), u_minus) for t in minus_targets)
    stages["c_invariant"] = apply(h, middle) == middle
    stages["c_disjoint"] = overlap_sign(u_minus, u_plus) is None
    blocking, lps = _open_blocking(u_minus, middle, u_plus)
    stages["c_blocking"] = blocking
    stages["c_targets"] = all(overlap_sign(middle, t) is not None and not subset(t, middle)
                              for t in list(plus_targets) + list(minus_targets))
    failed = next((k for k, v in stages.items() if not v), None)
    cert = ConfinementCertificate(failed is None, n, stages, failed, h, middle, u_plus, u_minus,
                                  list(plus_targets), list(minus_targets), lps)
    if failed is not None and strict:
        raise NestingFailed(failed[0], failed)
    return cert


# ------------------------------------------------------------------ hypotheses


@dataclass
class HypothesisItem:
    vertex: str
    e: str
    e2: str
    gamma: str
    certificate: object

    @property
    def holds(self):
        return self.certificate.holds


@dataclass
class HypothesisReport:
    items: list
    confinements: list
    complete: bool
    notes: list = field(default_factory=list)

    @property
    def verdict(self) -> str:
        if not all(i.holds for i in self.items) or not all(c.holds for c in self.confinements):
            return "Fails"
        return "Holds" if self.complete else "Indeterminate"

    @property
    def first_failure(self):
        return next((i for i in self.items if not i.holds), None)


def hypothesis_triples(g: GraphOfGroups, bodies=None):
    """Enumerate the required triples; returns (jobs, complete, notes).

    ``bodies`` overrides the vertex bodies (used for the cc-triples).
    """
    bodies = bodies or {v: s.body for v, s in g.vertices.items()}
    jobs, notes = [], []
    complete = True
    for v in sorted(g.vertices):
        spec = g.vertices[v]
        out = g.out_edges(v)
        for e, e2 in itertools.product(out, out):
            reps, full = coset_reps(spec, e2.edge_group)
            complete &= full
            if not full:
                notes.append(f"vertex {v}: window |k| <= {spec.window}, beyond it by confinement")
            left = apply(e.g, bodies[e.target])
            right_base = apply(e2.g, bodies[e2.target])
            for lab, gam in reps:
                if e.name == e2.name and _in_edge_subgroup(spec, e.edge_group, gam):
                    continue
                jobs.append((v, e.name, e2.name, lab, left, bodies[v], apply(gam, right_base)))
    return jobs, complete, notes


def _cyclic_confinements(g: GraphOfGroups, bodies, strict=False):
    certs = []
    complete = True
    for v in sorted(g.vertices):
        spec = g.vertices[v]
        if spec.kind != CYCLIC or spec.order is not None:
            continue
        out = g.out_edges(v)
        if all(e.edge_group.kind == "cyclic" for e in out):
            continue
        if spec.confinement is None:
            complete = False
            continue
        c = spec.confinement
        targets = [apply(e.g, bodies[e.target]) for e in out]
        cert = confinement_certificate(spec.generator, bodies[v], c.u_plus, c.u_minus, c.n,
                                       targets, targets, strict=False)
        if spec.window < 2 * c.n - 1:
            cert.holds = False
            cert.failed_stage = "window"
            cert.stages["window"] = False
        certs.append(cert)
    return certs, complete


def verify_hypotheses(g: GraphOfGroups, mode: str = FULL, threads=None, bodies=None) -> HypothesisReport:
    """Check every occultation triple the combination theorem requires.

    Finite (and finite-order cyclic) vertex groups are enumerated completely
    modulo the edge group; infinite cyclic groups use the power window plus
    a confinement certificate; bounded-word groups never certify.
    """
    jobs, complete, notes = hypothesis_triples(g, bodies)
    certs = ordered_map(lambda j: occultation_check(j[4], j[5], j[6], mode), jobs, threads)
    items = [HypothesisItem(j[0], j[1], j[2], j[3], c) for j, c in zip(jobs, certs)]
    bodies = bodies or {v: s.body for v, s in g.vertices.items()}
    confs, conf_complete = _cyclic_confinements(g, bodies)
    for name in sorted(g.bridge):
        b = g.bridge[name]
        confs.append(confinement_certificate(b.h, bodies[b.vertex], b.u_plus, b.u_minus, b.n,
                                             b.plus_targets, b.minus_targets, strict=False))
    has_bounded = any(s.kind == BOUNDED for s in g.vertices.values())
    complete = (complete or bool(confs)) and conf_complete and not has_bounded
    if has_bounded:
        notes.append("bounded_words vertex group: non-certificate")
    return HypothesisReport(items, confs, complete, notes)


# ------------------------------------------------------------------ normal forms


@dataclass(frozen=True)
class NormalForm:
    letters: tuple
    delta: ProjMap | None
    element: ProjMap

    @property
    def length(self) -> int:
        return len(self.letters)


def normal_form(word, factors, delta, dim=None) -> NormalForm:
    """Reduce a word in an amalgam ``Gamma_0 *_Delta Gamma_1``.

    Parameters
    ----------
    word : list of (int, ProjMap)
        Letters tagged with their factor, in product order (left first).
    factors : sequence of VertexGroupSpec
        Membership oracles for the two factors.
    delta : VertexGroupSpec or None
        The edge group (None for a free product).
    """
    if dim is None:
        dim = word[0][1].dim if word else factors[0].body.dim
    ident = ProjMap.identity(dim)
    for f in factors:
        if f.kind == BOUNDED:
            raise UnsupportedGroupKind("membership in bounded_words groups")
    if delta is not None and delta.kind == BOUNDED:
        raise UnsupportedGroupKind("membership in bounded_words groups")

    def in_delta(m):
        return m.is_identity() or (delta is not None and delta.contains(m))

    out = []
    pending = ident
    for fac, m in word:
        m = pending @ m
        pending = ident
        if in_delta(m):
            if out:
                out[-1] = (out[-1][0], out[-1][1] @ m)
            else:
                pending = m
        elif out and out[-1][0] == fac:
            out[-1] = (fac, out[-1][1] @ m)
        else:
            out.append((fac, m))
        # collapse letters that fell into Delta
        while out and in_delta(out[-1][1]):
            _, d = out.pop()
            if out:
                out[-1] = (out[-1][0], out[-1][1] @ d)
            else:
                pending = d
                break
        while len(out) >= 2 and out[-1][0] == out[-2][0]:
            f2, b = out.pop()
            f1, a = out.pop()
            out.append((f1, a @ b))
            while out and in_delta(out[-1][1]):
                _, d = out.pop()
                if out:
                    out[-1] = (out[-1][0], out[-1][1] @ d)
                else:
                    pending = d
    element = ident
    for _, m in out:
        element = element @ m
    element = element @ pending
    return NormalForm(tuple(out), None if pending.is_identity() else pending, element)


# ------------------------------------------------------------------ Bass-Serre tree


@dataclass
class TreeNode:
    word: tuple
    vertex: str
    matrix: ProjMap
    body: ConePolytope
    parent: int | None
    depth: int


@dataclass
class TreeTruncation:
    nodes: list
    edges: list
    depth: int
    windowed: bool = False

    def adjacency(self):
        return {(min(i, j), max(i, j)) for i, j, _ in self.edges}


def expand_tree(g: GraphOfGroups, depth: int, budget: int = 5000, prefix: ProjMap | None = None) -> TreeTruncation:
    """Ball of radius ``depth`` around the base coset in the covering tree.

    Node bodies are ``rho([c, mu]) . Omega_v``; children are enumerated by
    out-edge name, then coset representative order.
    """
    base = g.base_vertex
    m0 = prefix or ProjMap.identity(g.dim)
    root = TreeNode((), base, m0, apply(m0, g.vertices[base].body), None, 0)
    nodes = [root]
    edges = []
    arrived = {0: None}
    windowed = False
    q = deque([0])
    while q:
        i = q.popleft()
        node = nodes[i]
        if node.depth >= depth:
            continue
        spec = g.vertices[node.vertex]
        for e in g.out_edges(node.vertex):
            reps, full = coset_reps(spec, e.edge_group)
            windowed |= not full
            back = arrived[i]
            for lab, gam in reps:
                if back is not None and e.name == g.edges[back].reverse and gam.is_identity():
                    continue
                m = node.matrix @ gam @ e.g
                child = TreeNode(node.word + ((lab, e.name),), e.target, m,
                                 apply(m, g.vertices[e.target].body), i, node.depth + 1)
                nodes.append(child)
                j = len(nodes) - 1
                arrived[j] = e.name
                edges.append((i, j, e.name))
                if len(nodes) > budget:
                    raise BudgetExceeded(f"more than {budget} cosets")
                q.append(j)
    return TreeTruncation(nodes, edges, depth, windowed)


@dataclass
class TreeConclusionReport:
    pair_checks: int
    edge_pair_checks: int
    chart: bool
    violations: list

    @property
    def holds(self):
        return self.chart and not self.violations


def verify_tree_conclusions(t: TreeTruncation, raise_on_violation: bool = True,
                            threads=None) -> TreeConclusionReport:
    """Check overlap-iff-adjacent, edge-hull intersections and a common chart."""
    bodies = [n.body for n in t.nodes]
    adj = t.adjacency()
    violations = []
    pairs = [(i, j) for i in range(len(bodies)) for j in range(i + 1, len(bodies))]

    def rel(ij):
        return relate(bodies[ij[0]], bodies[ij[1]])

    rels = ordered_map(rel, pairs, threads)
    for (i, j), r in zip(pairs, rels):
        want = Relation.OVERLAPPING if (i, j) in adj else Relation.DISJOINT_OPEN
        if r != want:
            violations.append(("node", (i, j), r.value))
    edge_bodies = []
    for i, j, _ in t.edges:
        try:
            edge_bodies.append(hull_union(bodies[i], bodies[j]))
        except Exception as exc:  # noqa: BLE001 - recorded as a violation
            edge_bodies.append(None)
            violations.append(("edge_hull", (i, j), str(exc)))
    edge_pairs = [(a, b) for a in range(len(t.edges)) for b in range(a + 1, len(t.edges))]

    def edge_check(ab):
        a, b = ab
        ea, eb = edge_bodies[a], edge_bodies[b]
        if ea is None or eb is None:
            return None
        ends_a = {t.edges[a][0], t.edges[a][1]}
        ends_b = {t.edges[b][0], t.edges[b][1]}
        shared = ends_a & ends_b
        links = [(v, w) for v in ends_a for w in ends_b if (min(v, w), max(v, w)) in adj]
        try:
            inter = intersect(ea, eb)
            if shared:
                (v,) = shared
                want = bodies[v]
            elif links:
                # edges joined by a third edge {v, w} meet in Omega(v) n Omega(w)
                (v, w), = links
                want = intersect(bodies[v], bodies[w])
            else:
                want = None
        except Exception as exc:  # noqa: BLE001
            return str(exc)
        return None if inter == want else "edge-hull intersection"

    for ab, res in zip(edge_pairs, ordered_map(edge_check, edge_pairs, threads)):
        if res is not None:
            violations.append(("edge", (t.edges[ab[0]][:2], t.edges[ab[1]][:2]), res))
    chart = propagated_chart_signs(bodies, [(i, j) for i, j, _ in t.edges]) is not None
    report = TreeConclusionReport(len(pairs), len(edge_pairs), chart, violations)
    if raise_on_violation and not report.holds:
        first = violations[0] if violations else ("chart", None, "no common chart")
        raise ConclusionViolated(first[1], f"{first[0]}: {first[2]}")
    return report


# ------------------------------------------------------------------ divergence


def _tree_paths(g: GraphOfGroups):
    """Conjugators c_v (product of g_e along the tree path from the base)."""
    paths = {g.base_vertex: ProjMap.identity(g.dim)}
    parent_edge = {g.base_vertex: None}
    q = deque([g.base_vertex])
    nedges = 0
    while q:
        v = q.popleft()
        for e in g.out_edges(v):
            if e.target in paths:
                continue
            paths[e.target] = paths[v] @ e.g
            parent_edge[e.target] = e.name
            nedges += 1
            q.append(e.target)
    if 2 * nedges != len(g.edges):
        raise UnsupportedGraph("divergence tables need a tree-shaped graph")
    return paths


def free_factors(g: GraphOfGroups):
    """Letters of the free-product decomposition of pi_1 at the base vertex.

    Returns
    -------
    list of list of (label, ProjMap)
        One list of nontrivial letters per vertex with a nontrivial group.
    """
    if any(e.edge_group.kind != "trivial" for e in g.edges.values()):
        raise UnsupportedGraph("divergence tables need trivial edge groups")
    paths = _tree_paths(g)
    factors = []
    for v in sorted(g.vertices):
        c = paths[v]
        letters = [(f"{v}:{lab}", c @ m @ c.inverse()) for lab, m in g.vertices[v].enumerate()
                   if not m.is_identity()]
        if letters:
            factors.append(letters)
    return factors


def enumerate_words(factors, max_len: int, budget: int = 200000):
    """Alternating words by length: dict m -> list of (labels, ProjMap)."""
    words = {0: [((), None)]}
    layer = [((), None, -1)]
    total = 0
    for m in range(1, max_len + 1):
        nxt = []
        for labels, mat, last in layer:
            for fi, letters in enumerate(factors):
                if fi == last:
                    continue
                for lab, a in letters:
                    p = a if mat is None else mat @ a
                    nxt.append((labels + (lab,), p, fi))
        total += len(nxt)
        if total > budget:
            raise BudgetExceeded(f"more than {budget} words")
        words[m] = [(lab, p) for lab, p, _ in nxt]
        layer = nxt
    return words


@dataclass
class DivergenceRow:
    length: int
    count: int
    min_log_ratio: float
    min_distance_to_identity: float


@dataclass
class DivergenceTable:
    rows: list
    identity_hits: list
    collisions: int

    @property
    def strictly_increasing(self) -> bool:
        vals = [r.min_log_ratio for r in self.rows if r.length >= 1]
        return all(a < b for a, b in zip(vals, vals[1:]))


def divergence_report(g: GraphOfGroups, max_len: int, budget: int = 200000) -> DivergenceTable:
    """Growth of ``log(sigma1/sigma2)`` by normal-form length.

    Also records exact identity hits among non-empty words and collisions
    between distinct normal forms (both must be empty for a faithful
    representation up to the budget).
    """
    factors = free_factors(g)
    words = enumerate_words(factors, max_len, budget)
    ident = ProjMap.identity(g.dim)
    rows = [DivergenceRow(0, 1, 0.0, 0.0)]
    hits, seen, collisions = [], {}, 0
    for m in range(1, max_len + 1):
        lst = words[m]
        if not lst:
            break
        ratios = []
        dists = []
        for labels, p in lst:
            if p == ident:
                hits.append(labels)
            if p in seen:
                collisions += 1
            seen[p] = labels
            ratios.append(singular_log_ratio(p.mat))
            dists.append(operator_distance_to_identity(p.mat))
        rows.append(DivergenceRow(m, len(lst), min(ratios), min(dists)))
    return DivergenceTable(rows, hits, collisions)


# ------------------------------------------------------------------ convex cocompact variant


def _faces(p: ConePolytope):
    """All proper faces as frozensets of generator indices."""
    gens = p.generators
    facet_sets = []
    for f in p.facets:
        facet_sets.append(frozenset(i for i, g in enumerate(gens) if sum(a * b for a, b in zip(f, g)) == 0))
    faces = set(facet_sets)
    frontier = set(facet_sets)
    while frontier:
        nxt = set()
        for a in frontier:
            for b in facet_sets:
                c = a & b
                if c and c not in faces:
                    nxt.add(c)
        faces |= nxt
        frontier = nxt
    return faces


def bisaturated(cc: ConePolytope, body: ConePolytope):
    """Is every face of cl(cc) entirely ideal or entirely inside the body?

    Returns
    -------
    (bool, frozenset or None)
        Verdict and an offending face (generator indices).
    """
    s = 1 if closed_subset(cc, body, 1) else -1
    gens = [g if s > 0 else _neg(g) for g in cc.generators]
    for face in sorted(_faces(cc), key=lambda f: (len(f), sorted(f))):
        pts = [gens[i] for i in face]
        ideal = any(all(sum(a * b for a, b in zip(f, v)) == 0 for v in pts) for f in body.facets)
        inside = all(sum(a * b for a, b in zip(f, v)) > 0 for v in pts for f in body.facets)
        if not (ideal or inside):
            return False, face
    return True, None


def nonideal_boundary_strictly_convex(cc: ConePolytope, body: ConePolytope) -> bool:
    """True only when no face of positive dimension meets the open body.

    A polytope of dimension >= 2 has flat nonideal boundary unless its whole
    boundary is ideal.
    """
    s = 1 if closed_subset(cc, body, 1) else -1
    gens = [g if s > 0 else _neg(g) for g in cc.generators]
    for face in _faces(cc):
        if len(face) < 2:
            continue
        pts = [gens[i] for i in face]
        ideal = any(all(sum(a * b for a, b in zip(f, v)) == 0 for v in pts) for f in body.facets)
        if not ideal:
            return False
    return True


@dataclass
class CCReport:
    omega: HypothesisReport
    interior: HypothesisReport
    bisaturated: dict
    strictly_convex: dict

    @property
    def item1(self) -> str:
        ok = self.omega.verdict == "Holds" and self.interior.verdict == "Holds"
        return "certified" if ok else "not certified"

    @property
    def item3(self) -> str:
        return "not certifiable at polytope level"


def cc_hypothesis_check(g: GraphOfGroups, mode: str = FULL, threads=None) -> CCReport:
    """Omega-triples, cc-interior triples and boundary predicates."""
    for v, s in g.vertices.items():
        if s.cc_body is None:
            raise ValueError(f"vertex {v} has no cc_body")
        if not subset(s.cc_body, s.body):
            raise ValueError(f"cc_body of {v} is not inside its body")
    omega = verify_hypotheses(g, mode, threads)
    inner = verify_hypotheses(g, mode, threads, bodies={v: s.cc_body for v, s in g.vertices.items()})
    bis = {v: bisaturated(s.cc_body, s.body)[0] for v, s in sorted(g.vertices.items())}
    strict = {v: nonideal_boundary_strictly_convex(s.cc_body, s.body) for v, s in sorted(g.vertices.items())}
    return CCReport(omega, inner, bis, strict)
