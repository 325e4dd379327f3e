"""Occultation position (full and weak) with exact certificates.

For a triple ``(A, B, C)`` the checks are

* O1: A is not inside B, C is not inside B;
* O2: A and C each meet B, A and C are disjoint (open sets);
* O3: no hyperplane meets cl(A) and cl(C) while missing B (full mode:
  missing the open B, weak mode: missing cl(B)).

Once O2 holds, a hyperplane nonnegative on B is positive somewhere on A,
so it meets cl(A) exactly when it is nonpositive on some generator of A.
O3 is therefore a family of LPs indexed by a generator of A and one of C.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import PreconditionFailed
from .lpcore import FeasVerdict, LinFeasProblem, feasible
from .parallel import ordered_map
from .projgeom import (
    ApproxBody,
    ConePolytope,
    ProjHyp,
    _neg,
    hull_union,
    intersect,
    make_body,
    overlap_sign,
    subset,
)

FULL = "full"
WEAK = "weak"


@dataclass
class Subproblem:
    index: tuple
    problem: LinFeasProblem | None
    verdict: FeasVerdict | None
    pruned: str = ""

    def replay(self) -> bool:
        if self.problem is None:
            return bool(self.pruned)
        return self.verdict.replay(self.problem)


@dataclass
class OccultCertificate:
    """Verdict of an occultation check with everything needed to replay it.

    Attributes
    ----------
    verdict : str
        ``"Holds"`` or ``"Fails"``.
    failed_at : str or None
        ``"O1"``, ``"O2"`` or ``"O3"``.
    signs : tuple
        Lift signs of A and C relative to B (when O2 holds).
    """

    verdict: str
    mode: str
    o1: dict
    o2: dict
    o3_subproblems: list = field(default_factory=list)
    counterexample_hyperplane: ProjHyp | None = None
    counterexample_covector: tuple | None = None
    failed_at: str | None = None
    signs: tuple = ()
    margin: float | None = None
    bodies: tuple = ()

    @property
    def holds(self) -> bool:
        return self.verdict == "Holds"

    def replay(self) -> bool:
        """Re-verify every certificate with exact arithmetic."""
        fresh = _check(*self.bodies, mode=self.mode)
        if fresh.verdict != self.verdict:
            return False
        if not all(s.replay() for s in self.o3_subproblems):
            return False
        if self.counterexample_covector is not None:
            return _replay_counterexample(self)
        return True


def _replay_counterexample(cert) -> bool:
    a, b, c = cert.bodies
    x = cert.counterexample_covector
    sa, sc = cert.signs
    bv = [_dot(x, g) for g in b.generators]
    av = [sa * _dot(x, g) for g in a.generators]
    cv = [sc * _dot(x, g) for g in c.generators]
    if cert.mode == FULL:
        miss_b = all(v >= 0 for v in bv) and any(v > 0 for v in bv)
    else:
        miss_b = all(v > 0 for v in bv)
    return miss_b and min(av) <= 0 and min(cv) <= 0


def _dot(a, b):
    return sum((x * y for x, y in zip(a, b)), Fraction(0))


def _o3_problem(b_gens, a_gen, c_gen, mode, dim):
    rows = []
    if mode == FULL:
        rows += [(g, ">=0") for g in b_gens]
        rows.append((tuple(sum(col) for col in zip(*b_gens)), ">=1"))
    else:
        rows += [(g, ">=1") for g in b_gens]
    rows.append((a_gen, "<=0"))
    rows.append((c_gen, "<=0"))
    return LinFeasProblem(dim, rows)


def _pruned(b: ConePolytope, v, mode) -> str:
    """Trivial infeasibility reason when a generator sits inside B."""
    vals = [_dot(f, v) for f in b.facets]
    if mode == FULL and all(x > 0 for x in vals):
        return "generator in open B"
    if mode == WEAK and all(x >= 0 for x in vals):
        return "generator in closed B"
    return ""


def _o3(a_gens, b: ConePolytope, c_gens, mode, threads=None):
    index = [(i, j) for i in range(len(a_gens)) for j in range(len(c_gens))]
    pa = [_pruned(b, g, mode) for g in a_gens]
    pc = [_pruned(b, g, mode) for g in c_gens]

    def run(ij):
        i, j = ij
        why = pa[i] and f"A[{i}] {pa[i]}" or pc[j] and f"C[{j}] {pc[j]}"
        if why:
            return Subproblem(ij, None, None, why)
        prob = _o3_problem(b.generators, a_gens[i], c_gens[j], mode, b.dim)
        return Subproblem(ij, prob, feasible(prob))

    subs = []
    if threads is not None and threads > 1:
        done = ordered_map(run, index, threads)
        for s in done:
            subs.append(s)
            if s.verdict is not None and s.verdict.is_feasible:
                break
        return subs
    for ij in index:
        s = run(ij)
        subs.append(s)
        if s.verdict is not None and s.verdict.is_feasible:
            break
    return subs


def _check(a, b, c, mode=FULL, threads=None) -> OccultCertificate:
    if mode not in (FULL, WEAK):
        raise ValueError(f"mode must be {FULL!r} or {WEAK!r}")
    bodies = (a, b, c)
    a_in = subset(a, b)
    c_in = subset(c, b)
    o1 = {"holds": not (a_in or c_in), "a_subset_b": a_in, "c_subset_b": c_in}
    if not o1["holds"]:
        return OccultCertificate("Fails", mode, o1, {"holds": None}, failed_at="O1", bodies=bodies)
    sa = overlap_sign(b, a)
    sc = overlap_sign(b, c)
    ac = overlap_sign(a, c)
    o2 = {"holds": sa is not None and sc is not None and ac is None,
          "a_meets_b": sa is not None, "c_meets_b": sc is not None, "a_meets_c": ac is not None}
    if not o2["holds"]:
        return OccultCertificate("Fails", mode, o1, o2, failed_at="O2", bodies=bodies)
    a_gens = [g if sa > 0 else _neg(g) for g in a.generators]
    c_gens = [g if sc > 0 else _neg(g) for g in c.generators]
    subs = _o3(a_gens, b, c_gens, mode, threads)
    bad = next((s for s in subs if s.verdict is not None and s.verdict.is_feasible), None)
    if bad is None:
        return OccultCertificate("Holds", mode, o1, o2, subs, signs=(sa, sc), bodies=bodies)
    x = bad.verdict.witness
    norm = sum(abs(v) for v in x)
    margin = float(min(_dot(x, g) / sum(abs(t) for t in g) for g in b.generators) / norm)
    return OccultCertificate(
        "Fails", mode, o1, o2, subs,
        counterexample_hyperplane=ProjHyp(x), counterexample_covector=x,
        failed_at="O3", signs=(sa, sc), margin=margin, bodies=bodies,
    )


def occultation_check(a: ConePolytope, b: ConePolytope, c: ConePolytope, mode: str = FULL,
                      threads: int | None = None) -> OccultCertificate:
    """Decide whether ``(a, b, c)`` is in (full or weak) occultation position.

    Parameters
    ----------
    a, b, c : ConePolytope
    mode : {"full", "weak"}
    threads : int, optional
        Fan-out for the O3 family; results are identical for any value.

    Returns
    -------
    OccultCertificate
    """
    return _check(a, b, c, mode, threads)


def approx_occultation_check(a: ApproxBody, b: ApproxBody, c: ApproxBody,
                             mode: str = FULL) -> OccultCertificate:
    """Sound check for smooth bodies given by sandwiches.

    Holds certifies the true triple; Fails only means "not certified".
    """
    o1 = {"holds": not subset(a.inner, b.outer) and not subset(c.inner, b.outer)}
    if not o1["holds"]:
        return OccultCertificate("Fails", mode, o1, {"holds": None}, failed_at="O1",
                                 bodies=(a.outer, b.inner, c.outer))
    sa = overlap_sign(b.inner, a.inner)
    sc = overlap_sign(b.inner, c.inner)
    ac = overlap_sign(a.outer, c.outer)
    o2 = {"holds": sa is not None and sc is not None and ac is None}
    if not o2["holds"]:
        return OccultCertificate("Fails", mode, o1, o2, failed_at="O2",
                                 bodies=(a.outer, b.inner, c.outer))
    # the outer bodies overlap the inner B with the same lift as the inner ones
    sa2 = overlap_sign(b.inner, a.outer)
    sc2 = overlap_sign(b.inner, c.outer)
    a_gens = [g if sa2 > 0 else _neg(g) for g in a.outer.generators]
    c_gens = [g if sc2 > 0 else _neg(g) for g in c.outer.generators]
    subs = _o3(a_gens, b.inner, c_gens, mode)
    bad = next((s for s in subs if s.verdict is not None and s.verdict.is_feasible), None)
    cert = OccultCertificate("Holds" if bad is None else "Fails", mode, o1, o2, subs,
                             failed_at=None if bad is None else "O3", signs=(sa2, sc2),
                             bodies=(a.outer, b.inner, c.outer))
    if bad is not None:
        cert.counterexample_covector = bad.verdict.witness
        cert.counterexample_hyperplane = ProjHyp(bad.verdict.witness)
    return cert


# ------------------------------------------------------------------ derived triples


@dataclass
class InvisibilityReport:
    hull_abc: ConePolytope
    hull_ab: ConePolytope
    hull_bc: ConePolytope
    flags: dict

    @property
    def all_pass(self) -> bool:
        return all(self.flags.values())


def _signed(body: ConePolytope, s: int) -> ConePolytope:
    return body if s > 0 else body.negated()


def _open_union_covers(abc: ConePolytope, ab: ConePolytope, bc: ConePolytope) -> bool:
    """Is int(abc) inside int(ab) union int(bc)? One LP per facet pair."""
    for f1 in ab.facets:
        for f2 in bc.facets:
            rows = [(f, ">=1") for f in abc.facets] + [(f1, "<=0"), (f2, "<=0")]
            if feasible(LinFeasProblem(abc.dim, rows)).is_feasible:
                return False
    return True


def invisibility(a: ConePolytope, b: ConePolytope, c: ConePolytope) -> InvisibilityReport:
    """Hulls of a weak-occultation triple and the exact invisibility flags.

    Flags: ``chart`` (common chart), ``union`` (hull_abc = hull_ab u hull_bc),
    ``intersection`` (hull_ab n hull_bc = b), ``non_absorption``
    (a not in hull_bc, c not in hull_ab).
    """
    cert = occultation_check(a, b, c, WEAK)
    if not cert.holds:
        raise PreconditionFailed(f"weak occultation fails at {cert.failed_at}")
    sa, sc = cert.signs
    a1, c1 = _signed(a, sa), _signed(c, sc)
    hull_ab = make_body(list(a1.generators) + list(b.generators))
    hull_bc = make_body(list(b.generators) + list(c1.generators))
    hull_abc = make_body(list(a1.generators) + list(b.generators) + list(c1.generators))
    rows = [(g, ">=1") for body in (a1, b, c1) for g in body.generators]
    chart = feasible(LinFeasProblem(b.dim, rows)).is_feasible
    rays_ok = all(_in_closed(hull_ab, g) or _in_closed(hull_bc, g) for g in hull_abc.generators)
    union = rays_ok and _open_union_covers(hull_abc, hull_ab, hull_bc)
    inter = intersect(hull_ab, hull_bc)
    flags = {
        "chart": chart,
        "union": union,
        "intersection": inter is not None and inter == b,
        "non_absorption": not subset(a, hull_bc) and not subset(c, hull_ab),
    }
    return InvisibilityReport(hull_abc, hull_ab, hull_bc, flags)


def _in_closed(p: ConePolytope, v) -> bool:
    return all(_dot(f, v) >= 0 for f in p.facets)


@dataclass
class DerivedTriples:
    triples: list
    certificates: list

    @property
    def all_hold(self) -> bool:
        return all(c.holds for c in self.certificates)


def _require(label, cert):
    if not cert.holds:
        raise PreconditionFailed(f"hypothesis {label} fails at {cert.failed_at}")


def derive_lining_up(a, b, c, d) -> DerivedTriples:
    """From (a,b,c) and (b,c,d) in occultation derive two new triples.

    Returns the certified triples ``(a, hull(b,c), d)`` and
    ``(a, b, hull(c,d))``.
    """
    _require("(a,b,c)", occultation_check(a, b, c, FULL))
    _require("(b,c,d)", occultation_check(b, c, d, FULL))
    bc = hull_union(b, c)
    cd = hull_union(c, d)
    triples = [(a, bc, d), (a, b, cd)]
    return DerivedTriples(triples, [occultation_check(*t, FULL) for t in triples])


def derive_valence3(a, b, c, d) -> DerivedTriples:
    """From (a,b,c), (a,b,d), (c,b,d) derive ``(a, hull(b,c), d)``."""
    _require("(a,b,c)", occultation_check(a, b, c, FULL))
    _require("(a,b,d)", occultation_check(a, b, d, FULL))
    _require("(c,b,d)", occultation_check(c, b, d, FULL))
    t = (a, hull_union(b, c), d)
    return DerivedTriples([t], [occultation_check(*t, FULL)])
