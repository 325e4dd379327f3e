import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from occultist import _kernel
from occultist.errors import DegenerateBody, DimensionMismatch, DimensionTooLarge
from occultist.lpcore import LinFeasProblem, canonical_rays, dd_convert, extreme_rays, feasible

RELS = [">=0", ">=1", "=0", "<=0", "<=-1"]

rows3 = st.lists(
    st.tuples(st.lists(st.integers(-4, 4), min_size=3, max_size=3), st.sampled_from(RELS)),
    min_size=1, max_size=7,
)


@settings(max_examples=150, deadline=None)
@given(rows3)
def test_certificates_replay(constraints):
    prob = LinFeasProblem(3, constraints)
    v = feasible(prob)
    assert v.replay(prob)


@settings(max_examples=80, deadline=None)
@given(rows3)
def test_kernels_agree(constraints):
    prob = LinFeasProblem(3, constraints)
    a = feasible(prob)
    b = feasible(prob, solver=_kernel.solve_python)
    assert a == b


def test_simple_verdicts():
    ok = feasible(LinFeasProblem(2, [((1, 0), ">=1"), ((0, 1), ">=1")]))
    assert ok.is_feasible and ok.witness[0] >= 1
    bad = LinFeasProblem(2, [((1, 1), ">=1"), ((-1, -1), ">=0")])
    v = feasible(bad)
    assert not v.is_feasible and v.replay(bad)


def test_tampered_certificate_rejected():
    prob = LinFeasProblem(2, [((1, 1), ">=1"), ((-1, -1), ">=0")])
    v = feasible(prob)
    forged = type(v)(v.status, None, tuple(-y for y in v.farkas))
    assert not forged.replay(prob)


def test_problem_validation():
    with pytest.raises(DimensionMismatch):
        LinFeasProblem(2, [((1, 2, 3), ">=0")])
    with pytest.raises(DimensionMismatch):
        LinFeasProblem(2, [])
    with pytest.raises(ValueError):
        LinFeasProblem(2, [((1, 2), ">")])


def test_square_cone_rays():
    facets = [(1, 0, 0), (0, 1, 0), (-1, 0, 1), (0, -1, 1)]
    assert extreme_rays(facets, 3) == [(0, 0, 1), (0, 1, 1), (1, 0, 1), (1, 1, 1)]
    assert sorted(dd_convert(extreme_rays(facets, 3), 3)) == sorted(facets)


def test_redundant_generators_removed():
    gens = [(0, 0, 1), (2, 0, 1), (0, 2, 1), (1, 1, 2), (Fraction(1, 2), Fraction(1, 2), 1)]
    assert canonical_rays(gens, 3) == [(0, 0, 1), (0, 2, 1), (2, 0, 1)]


def test_dd_errors():
    with pytest.raises(DegenerateBody):
        extreme_rays([(1, 0, 0), (0, 1, 0)], 3)
    with pytest.raises(DimensionTooLarge):
        extreme_rays([tuple(int(i == j) for j in range(11)) for i in range(11)], 11)


def test_dd_cube_in_dim_four():
    rng = random.Random(0)
    pts = [(x, y, z, 1) for x in (0, 1) for y in (0, 1) for z in (0, 1)]
    pts += [(Fraction(rng.randint(1, 9), 10), Fraction(rng.randint(1, 9), 10), Fraction(1, 2), 1) for _ in range(5)]
    facets = dd_convert(pts, 4)
    assert len(facets) == 6
    assert len(dd_convert(facets, 4)) == 8
