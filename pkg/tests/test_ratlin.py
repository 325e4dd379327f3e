from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from occultist.errors import Indeterminate, Singular
from occultist.ratlin import (
    RMat,
    canonical_projective,
    char_poly,
    exterior_square,
    mat_inverse,
    nullspace,
    poly_eval_matrix,
    primitive,
    rank,
    rat_str,
    rational_roots,
    singular_log_ratio,
    spectral_report,
    to_rat,
)

small = st.fractions(min_value=-20, max_value=20, max_denominator=12)


def mats(n):
    return st.lists(st.lists(small, min_size=n, max_size=n), min_size=n, max_size=n).map(RMat)


def test_to_rat_parses_strings_and_rejects_floats():
    assert to_rat("3/4") == Fraction(3, 4)
    assert to_rat(" -2 ") == -2
    assert to_rat(Fraction(1, 3)) == Fraction(1, 3)
    with pytest.raises(TypeError):
        to_rat(0.5)
    with pytest.raises(ZeroDivisionError):
        to_rat("1/0")


def test_rat_str_round_trip():
    for x in (Fraction(-7, 3), Fraction(5), Fraction(0)):
        assert to_rat(rat_str(x)) == x
    assert rat_str(Fraction(4, 2)) == "2"


def test_primitive_and_canonical():
    assert primitive((Fraction(1, 2), 1, Fraction(3, 2))) == (1, 2, 3)
    assert canonical_projective((0, -2, 4)) == (0, 1, -2)
    with pytest.raises(ValueError):
        primitive((0, 0))


@settings(max_examples=60, deadline=None)
@given(mats(3))
def test_inverse_and_det(m):
    if m.det() == 0:
        with pytest.raises(Singular):
            mat_inverse(m)
        return
    assert m @ mat_inverse(m) == RMat.identity(3)
    floats = np.array([[float(x) for x in r] for r in m.rows])
    assert abs(float(m.det()) - np.linalg.det(floats)) < 1e-6 * (1 + abs(float(m.det())))


@settings(max_examples=60, deadline=None)
@given(mats(3))
def test_cayley_hamilton(m):
    assert poly_eval_matrix(char_poly(m), m) == RMat.identity(3) * 0


@settings(max_examples=40, deadline=None)
@given(st.lists(st.lists(st.integers(-5, 5), min_size=4, max_size=4), min_size=1, max_size=5))
def test_rank_nullity(rows):
    ns = nullspace(rows, 4)
    assert rank(rows, 4) + len(ns) == 4
    for v in ns:
        assert all(sum(a * b for a, b in zip(r, v)) == 0 for r in rows)


def test_rational_roots_with_multiplicity():
    # (x - 1/2)^2 (x + 3)
    coeffs = [1, 2, Fraction(-11, 4), Fraction(3, 4)]
    assert rational_roots(coeffs) == [(Fraction(-3), 1), (Fraction(1, 2), 2)]
    assert rational_roots([1, 0, -2]) == []


def test_spectral_exact_proximal():
    rep = spectral_report(RMat.diag(4, Fraction(1, 2), Fraction(1, 2)))
    assert rep.mode == "exact" and rep.proximal and not rep.biproximal
    assert rep.attracting_point == (1, 0, 0)
    assert rep.repelling_hyperplane == (1, 0, 0)
    inv = spectral_report(RMat.diag(Fraction(1, 4), 2, 2))
    assert not inv.proximal


def test_spectral_numeric_and_indeterminate():
    rot = RMat([[3, -4, 0], [4, 3, 0], [0, 0, 1]])
    with pytest.raises(Indeterminate):
        spectral_report(rot)
    m = RMat([[2, 1, 0], [1, 1, 1], [0, 1, 3]])
    rep = spectral_report(m)
    assert rep.proximal and rep.biproximal
    with pytest.raises(Singular):
        spectral_report(RMat([[1, 1], [1, 1]]))


def test_exterior_square_is_multiplicative():
    a = RMat([[1, 2, 0], [0, 1, 3], [1, 0, 1]])
    b = RMat([[2, 0, 1], [1, 1, 0], [0, 3, 1]])
    assert exterior_square(a @ b) == exterior_square(a) @ exterior_square(b)
    assert exterior_square(a).det() == a.det() ** 2


def test_singular_log_ratio_matches_svd():
    m = RMat([[5, 1, 0], [2, 3, 1], [0, 1, 1]])
    s = np.linalg.svd(m.to_float(), compute_uv=False)
    assert singular_log_ratio(m) == pytest.approx(np.log(s[0] / s[1]), abs=1e-9)
    big = RMat.diag(2, 1, Fraction(1, 2)) ** 400
    assert singular_log_ratio(big) == pytest.approx(400 * np.log(2), rel=1e-12)
