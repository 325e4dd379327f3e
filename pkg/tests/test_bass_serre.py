import dataclasses
import random
from fractions import Fraction

import pytest

from occultist.bass_serre import (
    BOUNDED,
    CYCLIC,
    FINITE,
    EdgeGroupSpec,
    GraphOfGroups,
    OrientedEdge,
    VertexGroupSpec,
    bisaturated,
    cc_hypothesis_check,
    confinement_certificate,
    coset_reps,
    divergence_report,
    expand_tree,
    normal_form,
    validate_gog,
    verify_hypotheses,
    verify_tree_conclusions,
)
from occultist.errors import (
    BudgetExceeded,
    ConclusionViolated,
    NestingFailed,
    RelationViolated,
    UnsupportedGraph,
    UnsupportedGroupKind,
)
from occultist.gallery import assemble_free_product_scene, diagonal_confinement_example, factor_z3
from occultist.projgeom import ProjMap, apply, make_body
from occultist.ratlin import RMat

F = Fraction
SIMPLEX = make_body([(1, 0, 0), (0, 1, 0), (0, 0, 1)])
DIAG = ProjMap(RMat.diag(2, 1, F(1, 2)))
SWAP = ProjMap([[0, 1, 0], [1, 0, 0], [0, 0, 1]])


def box(x0, x1, y0, y1):
    return make_body([(x0, y0, 1), (x1, y0, 1), (x1, y1, 1), (x0, y1, 1)])


def edge_pair(name, a, b, g, eg=None, egr=None):
    eg = eg or EdgeGroupSpec()
    egr = egr or EdgeGroupSpec()
    return {name: OrientedEdge(name, a, b, g, name + "r", eg),
            name + "r": OrientedEdge(name + "r", b, a, g.inverse(), name, egr)}


def free_shape(g_edge):
    v0 = VertexGroupSpec(FINITE, SIMPLEX, elements=[SWAP])
    v1 = VertexGroupSpec(FINITE, SIMPLEX, elements=[])
    return GraphOfGroups({"a": v0, "b": v1}, edge_pair("e", "a", "b", g_edge), "a")


def test_validate_free_product_shape():
    assert validate_gog(free_shape(ProjMap.identity(3)))
    assert validate_gog(free_shape(DIAG))


def test_validate_hnn_shape():
    # t = diag(1, 3, 9) conjugates <diag(2,1,1)> to itself
    delta = ProjMap(RMat.diag(2, 1, 1))
    t = ProjMap(RMat.diag(1, 3, 9))
    v = VertexGroupSpec(CYCLIC, SIMPLEX, generator=delta)
    eg = EdgeGroupSpec("cyclic", image=delta)
    edges = {"t": OrientedEdge("t", "v", "v", t, "tr", eg),
             "tr": OrientedEdge("tr", "v", "v", t.inverse(), "t", EdgeGroupSpec("cyclic", image=delta))}
    assert validate_gog(GraphOfGroups({"v": v}, edges, "v"))


def test_validate_detects_corruption():
    g = free_shape(DIAG)
    g.edges["er"] = dataclasses.replace(g.edges["er"], g=DIAG)
    with pytest.raises(RelationViolated):
        validate_gog(g)
    bad_body = VertexGroupSpec(FINITE, box(0, 2, 0, 1), elements=[SWAP])
    g2 = free_shape(DIAG)
    g2.vertices["a"] = bad_body
    with pytest.raises(RelationViolated):
        validate_gog(g2)
    g3 = free_shape(DIAG)
    g3.vertices["c"] = VertexGroupSpec(FINITE, SIMPLEX)
    with pytest.raises(RelationViolated):
        validate_gog(g3)


def test_vertex_spec_kinds():
    with pytest.raises(UnsupportedGroupKind):
        VertexGroupSpec("abelian", SIMPLEX)
    z3 = VertexGroupSpec(CYCLIC, SIMPLEX, generator=factor_z3()[1])
    assert z3.order == 3 and [lab for lab, _ in z3.enumerate()] == ["h^0", "h^1", "h^2"]
    inf = VertexGroupSpec(CYCLIC, SIMPLEX, generator=DIAG, window=2)
    assert inf.order is None
    assert [lab for lab, _ in inf.enumerate()] == ["h^0", "h^1", "h^-1", "h^2", "h^-2"]
    assert inf.power_of_generator(DIAG ** -5) == -5
    assert inf.power_of_generator(SWAP) is None
    words = VertexGroupSpec(BOUNDED, SIMPLEX, generators=[DIAG, SWAP], max_length=2)
    assert len(words.enumerate()) > 3
    with pytest.raises(UnsupportedGroupKind):
        words.contains(DIAG)


def test_coset_reps():
    spec = VertexGroupSpec(CYCLIC, SIMPLEX, generator=ProjMap([[0, 0, 1], [1, 0, 0], [0, 1, 0]]))
    reps, full = coset_reps(spec, EdgeGroupSpec())
    assert full and len(reps) == 3
    inf = VertexGroupSpec(CYCLIC, SIMPLEX, generator=DIAG)
    reps, full = coset_reps(inf, EdgeGroupSpec("cyclic", image=DIAG ** 3))
    assert full and len(reps) == 3
    reps, full = coset_reps(inf, EdgeGroupSpec())
    assert not full


# ---------------------------------------------------------------- normal forms


def _free_factors():
    a = VertexGroupSpec(CYCLIC, SIMPLEX, generator=factor_z3()[1])
    b = VertexGroupSpec(CYCLIC, SIMPLEX, generator=DIAG @ SWAP @ DIAG.inverse())
    return a, b


def test_normal_form_basics():
    a, b = _free_factors()
    x, y = a.generator, b.generator
    assert normal_form([], [a, b], None, 3).length == 0
    assert normal_form([(0, x), (0, x)], [a, b], None).length == 1
    nf = normal_form([(0, x), (1, y), (1, y), (0, x)], [a, b], None)
    assert nf.length == 1 and nf.element == x @ x
    assert normal_form([(0, x), (1, y), (0, x)], [a, b], None).length == 3


def test_normal_form_absorbs_delta():
    d = ProjMap(RMat.diag(1, 1, -1))
    a = VertexGroupSpec(FINITE, SIMPLEX, elements=[d, SWAP, SWAP @ d])
    c3 = ProjMap([[0, 0, 1], [1, 0, 0], [0, 1, 0]])
    b = VertexGroupSpec(FINITE, SIMPLEX, elements=[d, c3, c3 @ c3, c3 @ d, c3 @ c3 @ d])
    delta = VertexGroupSpec(FINITE, SIMPLEX, elements=[d])
    nf = normal_form([(0, SWAP), (0, d), (1, c3)], [a, b], delta)
    assert nf.length == 2 and nf.element == SWAP @ d @ c3


def test_normal_form_length_invariant_under_insertions():
    d = ProjMap(RMat.diag(1, 1, -1))
    c3 = ProjMap([[0, 0, 1], [1, 0, 0], [0, 1, 0]])
    a = VertexGroupSpec(FINITE, SIMPLEX, elements=[d, SWAP, SWAP @ d])
    b = VertexGroupSpec(FINITE, SIMPLEX, elements=[d, c3, c3 @ c3, c3 @ d, c3 @ c3 @ d])
    delta = VertexGroupSpec(FINITE, SIMPLEX, elements=[d])
    rng = random.Random(1)
    for _ in range(30):
        word = [(k % 2, SWAP if k % 2 == 0 else c3) for k in range(rng.randint(1, 6))]
        base = normal_form(word, [a, b], delta)
        noisy = list(word)
        for _ in range(3):
            i = rng.randint(0, len(noisy))
            noisy[i:i] = [(rng.randint(0, 1), d), (rng.randint(0, 1), d)]
        red = normal_form(noisy, [a, b], delta)
        assert red.length == base.length and red.element == base.element


def test_normal_form_bounded_unsupported():
    w = VertexGroupSpec(BOUNDED, SIMPLEX, generators=[DIAG], max_length=1)
    with pytest.raises(UnsupportedGroupKind):
        normal_form([(0, DIAG)], [w, w], None)


# ---------------------------------------------------------------- confinement


def _confinement_scene():
    h, _, up, um, tp, tm = diagonal_confinement_example()
    return h, up, um, tp[0], tm[0]


def test_confinement_holds():
    h, up, um, tp, tm = _confinement_scene()
    cert = confinement_certificate(h, SIMPLEX, up, um, 4, [tp], [tm])
    assert cert.holds and all(cert.stages.values())
    assert all(v.replay(p) for _, p, v in cert.blocking_lps)


def test_confinement_failures():
    h, up, um, tp, tm = _confinement_scene()
    with pytest.raises(NestingFailed) as exc:
        confinement_certificate(h, SIMPLEX, up, um, 0, [tp], [tm])
    assert "b_" in str(exc.value)
    with pytest.raises(NestingFailed) as exc:
        confinement_certificate(ProjMap.identity(3), SIMPLEX, up, um, 4, [tp], [tm])
    assert "a_" in str(exc.value)
    soft = confinement_certificate(h, SIMPLEX, up, um, 0, [tp], [tm], strict=False)
    assert not soft.holds and soft.failed_stage.startswith("b")


# ---------------------------------------------------------------- flagship


def test_flagship_hypotheses(flagship):
    rep = verify_hypotheses(flagship.gog)
    assert rep.verdict == "Holds" and rep.complete
    assert len(rep.items) == 5 and len(rep.confinements) == 1
    assert flagship.metadata["N"] == 6


def test_flagship_small_power_fails():
    from occultist.errors import AssemblyFailed

    with pytest.raises(AssemblyFailed) as exc:
        assemble_free_product_scene(n=2)
    assert "confinement" in str(exc.value) or "bridge" in str(exc.value)


def test_flagship_weakened_scene_reports_confinement(flagship):
    gog = flagship.gog
    b = gog.bridge["beta"]
    weak = dataclasses.replace(gog, bridge={"beta": dataclasses.replace(b, n=1)})
    rep = verify_hypotheses(weak)
    assert rep.verdict == "Fails"
    assert not rep.confinements[0].holds


def test_swap_gives_same_verdict():
    s = assemble_free_product_scene(swap=True)
    assert verify_hypotheses(s.gog).verdict == "Holds"


def test_finite_z2_vertex_single_gamma():
    gog = free_shape(DIAG)
    jobs = [j for j in verify_hypotheses(gog).items if j.vertex == "a"]
    assert len(jobs) == 1 and jobs[0].gamma == "g1"


def test_tree_depths(flagship):
    assert len(expand_tree(flagship.gog, 0).nodes) == 1
    t1 = expand_tree(flagship.gog, 1)
    assert len(t1.nodes) == 3
    rep = verify_tree_conclusions(t1)
    assert rep.holds and rep.pair_checks == 3
    with pytest.raises(BudgetExceeded):
        expand_tree(flagship.gog, 4, budget=5)


def test_tree_equivariance(flagship):
    g = flagship.maps["gA"]
    base = expand_tree(flagship.gog, 2)
    moved = expand_tree(flagship.gog, 2, prefix=g)
    assert [apply(g, n.body) for n in base.nodes] == [n.body for n in moved.nodes]


def test_tree_scramble_detected(flagship_tree):
    nodes = list(flagship_tree.nodes)
    nodes[3] = dataclasses.replace(nodes[3], body=nodes[-1].body)
    t = dataclasses.replace(flagship_tree, nodes=nodes)
    with pytest.raises(ConclusionViolated):
        verify_tree_conclusions(t)


def test_divergence(flagship):
    table = divergence_report(flagship.gog, 3)
    assert table.rows[0].min_log_ratio == 0 and table.rows[0].min_distance_to_identity == 0
    assert table.strictly_increasing and table.collisions == 0
    ident = VertexGroupSpec(FINITE, SIMPLEX)
    trivial = GraphOfGroups({"a": ident}, {}, "a")
    assert [r.min_log_ratio for r in divergence_report(trivial, 3).rows] == [0.0]
    with pytest.raises(BudgetExceeded):
        divergence_report(flagship.gog, 8, budget=50)


def test_divergence_needs_trivial_edge_groups():
    delta = ProjMap(RMat.diag(2, 1, 1))
    v = VertexGroupSpec(CYCLIC, SIMPLEX, generator=delta)
    eg = EdgeGroupSpec("cyclic", image=delta)
    edges = edge_pair("t", "v", "v", ProjMap(RMat.diag(1, 3, 9)), eg, EdgeGroupSpec("cyclic", image=delta))
    with pytest.raises(UnsupportedGraph):
        divergence_report(GraphOfGroups({"v": v}, edges, "v"), 2)


# ---------------------------------------------------------------- convex cocompact variant


def test_cc_check_on_flagship():
    s = assemble_free_product_scene(with_cc=True)
    rep = cc_hypothesis_check(s.gog)
    assert rep.item1 == "certified"
    assert rep.item3 == "not certifiable at polytope level"


def test_cc_equal_to_body_matches(flagship):
    gog = flagship.gog
    verts = {v: dataclasses.replace(s, cc_body=s.body) for v, s in gog.vertices.items()}
    rep = cc_hypothesis_check(dataclasses.replace(gog, vertices=verts))
    assert [i.holds for i in rep.omega.items] == [i.holds for i in rep.interior.items]


def test_bisaturated_predicate():
    body = box(0, 2, 0, 2)
    ok, face = bisaturated(box(0, 1, 0, 1), body)
    assert not ok and face is not None
    assert bisaturated(box(F(1, 2), 1, F(1, 2), 1), body)[0]
    assert bisaturated(body, body)[0]
