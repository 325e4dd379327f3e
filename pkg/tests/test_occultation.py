import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from occultist import FULL, WEAK, occultation_check
from occultist.errors import PreconditionFailed
from occultist.gallery import random_triple, random_weak_triple
from occultist.occultation import (
    approx_occultation_check,
    derive_lining_up,
    derive_valence3,
    invisibility,
)
from occultist.projgeom import ApproxBody, ProjMap, apply, body_from_facets, make_body
from occultist.ratlin import RMat

F = Fraction


def box(x0, x1, y0, y1):
    return make_body([(x0, y0, 1), (x1, y0, 1), (x1, y1, 1), (x0, y1, 1)])


TRI_A = make_body([(0, 0, 1), (1, 0, 1), (0, 1, 1)])
TRI_C = make_body([(3, 0, 1), (4, 0, 1), (3, 1, 1)])


def test_triangles_and_tall_box_hold():
    cert = occultation_check(TRI_A, box(F(1, 2), F(7, 2), -1, 2), TRI_C)
    assert cert.holds and cert.replay()
    assert all(s.verdict is None or not s.verdict.is_feasible for s in cert.o3_subproblems)


def test_short_middle_box_misses_the_triangles():
    # (1.5, 2.5) x (0, 1) does not reach either triangle
    cert = occultation_check(TRI_A, box(F(3, 2), F(5, 2), 0, 1), TRI_C)
    assert cert.failed_at == "O2" and not cert.o2["a_meets_b"]


def test_flat_box_fails_on_the_bottom_line():
    cert = occultation_check(TRI_A, box(F(1, 2), F(7, 2), 0, 1), TRI_C)
    assert cert.failed_at == "O3"
    x = cert.counterexample_covector
    assert x[0] == 0 and x[2] == 0 and x[1] != 0  # the line y = 0
    assert cert.replay()
    # weak mode only asks to meet the closure
    assert occultation_check(TRI_A, box(F(1, 2), F(7, 2), 0, 1), TRI_C, WEAK).holds


def test_o1_failure():
    assert occultation_check(TRI_A, TRI_A, TRI_C).failed_at == "O1"


def test_mode_validation():
    with pytest.raises(ValueError):
        occultation_check(TRI_A, TRI_A, TRI_C, "strong")


def test_threads_do_not_change_result():
    b = box(F(1, 2), F(7, 2), -1, 2)
    one = occultation_check(TRI_A, b, TRI_C, threads=1)
    many = occultation_check(TRI_A, b, TRI_C, threads=4)
    assert [s.index for s in one.o3_subproblems] == [s.index for s in many.o3_subproblems]
    assert [s.verdict for s in one.o3_subproblems] == [s.verdict for s in many.o3_subproblems]


maps3 = st.lists(st.lists(st.integers(-3, 3), min_size=3, max_size=3), min_size=3, max_size=3).filter(
    lambda m: RMat(m).det() != 0).map(ProjMap)


@settings(max_examples=25, deadline=None)
@given(maps3, st.integers(0, 10_000))
def test_equivariance(g, seed):
    a, b, c = random_triple(random.Random(seed))
    before = occultation_check(a, b, c)
    after = occultation_check(apply(g, a), apply(g, b), apply(g, c))
    assert before.verdict == after.verdict and before.failed_at == after.failed_at


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_full_implies_weak(seed):
    t = random_triple(random.Random(seed))
    if occultation_check(*t).holds:
        assert occultation_check(*t, mode=WEAK).holds


def test_tampered_certificate_fails_replay():
    cert = occultation_check(TRI_A, box(F(1, 2), F(7, 2), -1, 2), TRI_C)
    sub = next(s for s in cert.o3_subproblems if s.verdict is not None)
    sub.verdict = type(sub.verdict)("Infeasible", None, tuple(0 for _ in sub.verdict.farkas))
    assert not cert.replay()


# ---------------------------------------------------------------- sandwiches


def _disc(cx, r, n):
    """Inner/outer n-gons of the disc of radius r at (cx, 0); vertices off the axes."""
    ts = [F(round(math.tan((math.pi / n + 2 * math.pi * k / n) / 2) * 4096), 4096) for k in range(n)]
    ts = [t for t in ts if abs(t) < 10**6]
    pts, sups = [], []
    for t in ts:
        x, y = (1 - t * t) / (1 + t * t), 2 * t / (1 + t * t)
        pts.append((cx + r * x, r * y, 1))
        sups.append((-x, -y, cx * x + r))
    return ApproxBody(make_body(pts), body_from_facets(sups))


def test_disc_sandwich_refinement():
    coarse = [_disc(0, 1, 4), _disc(F(13, 5), F(9, 5), 4), _disc(F(26, 5), 1, 4)]
    fine = [_disc(0, 1, 16), _disc(F(13, 5), F(9, 5), 16), _disc(F(26, 5), 1, 16)]
    assert all(b.certified() for b in coarse + fine)
    assert not approx_occultation_check(*coarse).holds
    assert approx_occultation_check(*fine).holds


def test_exact_sandwich_agrees():
    for b in (box(F(1, 2), F(7, 2), -1, 2), box(F(1, 2), F(7, 2), 0, 1)):
        bodies = [ApproxBody.exact(x) for x in (TRI_A, b, TRI_C)]
        assert approx_occultation_check(*bodies).verdict == occultation_check(TRI_A, b, TRI_C).verdict


# ---------------------------------------------------------------- derived triples


def test_invisibility_on_the_triangle_scene():
    rep = invisibility(TRI_A, box(F(1, 2), F(7, 2), -1, 2), TRI_C)
    assert rep.all_pass


def test_invisibility_precondition():
    with pytest.raises(PreconditionFailed):
        invisibility(TRI_A, TRI_A, TRI_C)


def test_invisibility_random():
    rng = random.Random(99)
    for _ in range(10):
        assert invisibility(*random_weak_triple(rng)).all_pass


def _row(k):
    heights = [1, 2, 2, 1]
    h = heights[k]
    return box(2 * k - F(6, 5), 2 * k + F(6, 5), -h, h)


def test_lining_up_collinear_boxes():
    res = derive_lining_up(*[_row(k) for k in range(4)])
    assert res.all_hold and len(res.triples) == 2


def test_lining_up_needs_disjoint_ends():
    a, b, c, _ = (_row(k) for k in range(4))
    with pytest.raises(PreconditionFailed):
        derive_lining_up(a, b, c, b)


def _tripod():
    b = box(-2, 2, -2, 2)
    a = box(F(-5, 2), F(-3, 2), F(-1, 2), F(1, 2))
    c = box(F(3, 2), F(5, 2), F(-1, 2), F(1, 2))
    d = box(F(-1, 2), F(1, 2), F(3, 2), F(5, 2))
    return a, b, c, d


def test_valence_three_tripod():
    a, b, c, d = _tripod()
    assert derive_valence3(a, b, c, d).all_hold
    swapped = derive_valence3(d, b, c, a)
    assert swapped.all_hold


def test_valence_three_missing_hypothesis():
    a, b, c, _ = _tripod()
    d = box(F(3, 2), F(5, 2), F(1, 4), F(3, 4))  # overlaps c
    with pytest.raises(PreconditionFailed):
        derive_valence3(a, b, c, d)
