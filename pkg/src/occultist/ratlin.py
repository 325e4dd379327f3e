"""Exact rational linear algebra and spectral diagnostics.

Scalars are :class:`fractions.Fraction`. Matrices are immutable
:class:`RMat` instances; vectors are tuples of Fractions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce

import numpy as np
from sympy import divisors

from .errors import DimensionMismatch, Indeterminate, Singular

Rat = Fraction


def to_rat(x) -> Fraction:
    """Parse an int, Fraction or ``"p/q"`` string exactly.

    Floats are rejected: they would silently import rounding error.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        s = x.strip()
        if "/" in s:
            p, q = s.split("/", 1)
            q_int = int(q)
            if q_int == 0:
                raise ZeroDivisionError(f"zero denominator in {x!r}")
            return Fraction(int(p), q_int)
        return Fraction(s)
    raise TypeError(f"cannot read {x!r} as an exact rational")


def rat_str(x: Fraction) -> str:
    """Serialize as ``"p/q"`` (or ``"p"`` for integers)."""
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def vec(xs) -> tuple:
    return tuple(to_rat(x) for x in xs)


def dot(u, v):
    return sum((a * b for a, b in zip(u, v)), 0)


def lcm_denominators(xs) -> int:
    return reduce(math.lcm, (Fraction(x).denominator for x in xs), 1)


def primitive(v) -> tuple:
    """Positive rescaling of ``v`` to a coprime integer tuple."""
    v = [Fraction(x) for x in v]
    den = lcm_denominators(v)
    ints = [int(x * den) for x in v]
    g = reduce(math.gcd, ints, 0)
    if g == 0:
        raise ValueError("zero vector has no primitive form")
    return tuple(i // g for i in ints)


def canonical_projective(v) -> tuple:
    """Primitive integer form with first nonzero coordinate positive."""
    p = primitive(v)
    for x in p:
        if x != 0:
            return p if x > 0 else tuple(-y for y in p)
    raise ValueError("zero vector")


class RMat:
    """Square matrix over Q.

    Parameters
    ----------
    rows : iterable of iterables
        Entries readable by :func:`to_rat`.
    """

    __slots__ = ("rows", "dim", "_hash")

    def __init__(self, rows):
        rows = tuple(tuple(to_rat(x) for x in r) for r in rows)
        n = len(rows)
        if n == 0 or any(len(r) != n for r in rows):
            raise DimensionMismatch("matrix must be square and nonempty")
        self.rows = rows
        self.dim = n
        self._hash = None

    @classmethod
    def identity(cls, n: int) -> "RMat":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def diag(cls, *entries) -> "RMat":
        n = len(entries)
        return cls([[entries[i] if i == j else 0 for j in range(n)] for i in range(n)])

    def __eq__(self, other):
        return isinstance(other, RMat) and self.rows == other.rows

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.rows)
        return self._hash

    def __repr__(self):
        body = ", ".join("[" + ", ".join(rat_str(x) for x in r) + "]" for r in self.rows)
        return f"RMat([{body}])"

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __matmul__(self, other):
        if isinstance(other, RMat):
            if other.dim != self.dim:
                raise DimensionMismatch("matrix sizes differ")
            cols = list(zip(*other.rows))
            return RMat._raw([[dot(r, c) for c in cols] for r in self.rows])
        v = tuple(other)
        if len(v) != self.dim:
            raise DimensionMismatch("vector length differs from matrix size")
        return tuple(dot(r, v) for r in self.rows)

    def __mul__(self, scalar):
        s = to_rat(scalar)
        return RMat._raw([[s * x for x in r] for r in self.rows])

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1

    def __add__(self, other):
        return RMat._raw([[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __sub__(self, other):
        return RMat._raw([[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    @classmethod
    def _raw(cls, rows):
        m = cls.__new__(cls)
        m.rows = tuple(tuple(Fraction(x) for x in r) for r in rows)
        m.dim = len(m.rows)
        m._hash = None
        return m

    def transpose(self) -> "RMat":
        return RMat._raw(list(zip(*self.rows)))

    @property
    def T(self) -> "RMat":
        return self.transpose()

    def row_vec_mul(self, v):
        """Return ``v^T m`` (covector action)."""
        return tuple(dot(v, c) for c in zip(*self.rows))

    def det(self) -> Fraction:
        a = [list(r) for r in self.rows]
        n = self.dim
        det = Fraction(1)
        for c in range(n):
            p = next((r for r in range(c, n) if a[r][c] != 0), None)
            if p is None:
                return Fraction(0)
            if p != c:
                a[c], a[p] = a[p], a[c]
                det = -det
            piv = a[c][c]
            det *= piv
            for r in range(c + 1, n):
                f = a[r][c] / piv
                if f:
                    a[r] = [x - f * y for x, y in zip(a[r], a[c])]
        return det

    def trace(self) -> Fraction:
        return sum((self.rows[i][i] for i in range(self.dim)), Fraction(0))

    def is_invertible(self) -> bool:
        return self.det() != 0

    def __pow__(self, k: int) -> "RMat":
        if k < 0:
            return mat_inverse(self) ** (-k)
        result = RMat.identity(self.dim)
        base = self
        while k:
            if k & 1:
                result = result @ base
            base = base @ base
            k >>= 1
        return result

    def to_float(self) -> np.ndarray:
        """Float copy rescaled by the largest entry (safe for huge entries)."""
        big = max((abs(x) for r in self.rows for x in r), default=Fraction(1))
        if big == 0:
            big = Fraction(1)
        return np.array([[float(x / big) for x in r] for r in self.rows], dtype=float)

    def to_strings(self):
        return [[rat_str(x) for x in r] for r in self.rows]


def mat_inverse(m: RMat) -> RMat:
    """Exact inverse by Gauss-Jordan elimination.

    Raises
    ------
    Singular
        If ``det(m) = 0``.
    """
    n = m.dim
    a = [list(r) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(m.rows)]
    for c in range(n):
        p = next((r for r in range(c, n) if a[r][c] != 0), None)
        if p is None:
            raise Singular("matrix is singular")
        a[c], a[p] = a[p], a[c]
        piv = a[c][c]
        a[c] = [x / piv for x in a[c]]
        for r in range(n):
            if r != c and a[r][c] != 0:
                f = a[r][c]
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return RMat._raw([r[n:] for r in a])


def nullspace(rows, ncols: int):
    """Basis of ``{x : rows x = 0}`` over Q (list of Fraction tuples)."""
    a = [[Fraction(x) for x in r] for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(a)) if a[i][c] != 0), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        piv = a[r][c]
        a[r] = [x / piv for x in a[r]]
        for i in range(len(a)):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == len(a):
            break
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for i, c in enumerate(pivots):
            x[c] = -a[i][f]
        basis.append(tuple(x))
    return basis


def rank(rows, ncols: int) -> int:
    return ncols - len(nullspace(rows, ncols))


def char_poly(m: RMat) -> list:
    """Monic characteristic polynomial, highest degree first.

    Uses the Faddeev-LeVerrier recursion, exact over Q.
    """
    n = m.dim
    coeffs = [Fraction(1)]
    mk = RMat.identity(n) * 0
    ident = RMat.identity(n)
    c = Fraction(1)
    for k in range(1, n + 1):
        mk = m @ (mk + ident * c)
        c = -mk.trace() / k
        coeffs.append(c)
    return coeffs


def poly_eval(coeffs, x):
    acc = Fraction(0)
    for c in coeffs:
        acc = acc * x + c
    return acc


def poly_eval_matrix(coeffs, m: RMat) -> RMat:
    acc = RMat.identity(m.dim) * 0
    ident = RMat.identity(m.dim)
    for c in coeffs:
        acc = acc @ m + ident * c
    return acc


def _deflate(coeffs, root):
    out = [coeffs[0]]
    for c in coeffs[1:-1]:
        out.append(c + out[-1] * root)
    return out


def rational_roots(coeffs) -> list:
    """Rational roots with multiplicity of a polynomial over Q.

    Returns
    -------
    list of (Fraction, int)
        Sorted by root value.
    """
    coeffs = [Fraction(c) for c in coeffs]
    while coeffs and coeffs[0] == 0:
        coeffs = coeffs[1:]
    roots = {}
    while len(coeffs) > 1 and coeffs[-1] == 0:
        roots[Fraction(0)] = roots.get(Fraction(0), 0) + 1
        coeffs = coeffs[:-1]
    if len(coeffs) <= 1:
        return sorted(roots.items())
    ints = list(primitive(coeffs))
    lead, const = abs(ints[0]), abs(ints[-1])
    cands = set()
    for p in divisors(const):
        for q in divisors(lead):
            cands.add(Fraction(p, q))
            cands.add(Fraction(-p, q))
    poly = [Fraction(c) for c in ints]
    for r in sorted(cands):
        while len(poly) > 1 and poly_eval(poly, r) == 0:
            roots[r] = roots.get(r, 0) + 1
            poly = _deflate(poly, r)
    return sorted(roots.items())


@dataclass(frozen=True)
class SpectralReport:
    mode: str
    rational_eigenvalues: tuple
    fully_split: bool
    numeric_eigenvalues: tuple
    proximal: bool
    biproximal: bool
    attracting_point: tuple | None = None
    repelling_hyperplane: tuple | None = None
    tol: float = 0.0
    gap: float = field(default=float("nan"))


def _top_data_exact(m: RMat, eig):
    """Proximality data from the exact spectrum (fully split case)."""
    top = max(abs(v) for v, _ in eig)
    tops = [(v, k) for v, k in eig if abs(v) == top]
    if len(tops) != 1 or tops[0][1] != 1:
        return False, None, None
    lam = tops[0][0]
    n = m.dim
    shifted = m - RMat.identity(n) * lam
    right = nullspace(shifted.rows, n)
    left = nullspace(shifted.transpose().rows, n)
    return True, canonical_projective(right[0]), canonical_projective(left[0])


def _proximal_exact(m: RMat):
    cp = char_poly(m)
    eig = rational_roots(cp)
    split = sum(k for _, k in eig) == m.dim
    return cp, eig, split


def _numeric_gap(m: RMat) -> tuple:
    ev = np.linalg.eigvals(m.to_float())
    order = np.argsort(-np.abs(ev))
    ev = ev[order]
    mods = np.abs(ev)
    gap = float(mods[0] / mods[1]) if len(mods) > 1 and mods[1] > 0 else float("inf")
    return ev, gap


def spectral_report(m: RMat, tol: float = 1e-9) -> SpectralReport:
    """Eigen-data, proximality and biproximality of ``m``.

    Exact whenever the characteristic polynomial splits over Q; numeric
    otherwise, raising :class:`Indeterminate` when the modulus gap of ``m``
    or of its inverse is within ``tol`` of 1.
    """
    if m.det() == 0:
        raise Singular("spectral_report needs an invertible matrix")
    _, eig, split = _proximal_exact(m)
    ev, gap = _numeric_gap(m)
    numeric = tuple(complex(z) for z in ev)
    if split:
        prox, att, rep = _top_data_exact(m, eig)
        inv_eig = [(1 / v, k) for v, k in eig]
        inv_prox, _, _ = _top_data_exact(mat_inverse(m), inv_eig)
        return SpectralReport(
            mode="exact",
            rational_eigenvalues=tuple(eig),
            fully_split=True,
            numeric_eigenvalues=numeric,
            proximal=prox,
            biproximal=prox and inv_prox,
            attracting_point=att,
            repelling_hyperplane=rep,
            tol=tol,
            gap=gap,
        )
    _, inv_gap = _numeric_gap(mat_inverse(m))
    if gap < 1 + tol or inv_gap < 1 + tol:
        raise Indeterminate(f"numeric modulus gap {min(gap, inv_gap)} within tol {tol}")
    prox = gap > 1 + tol
    att = rep = None
    if prox:
        w, v = np.linalg.eig(m.to_float())
        i = int(np.argmax(np.abs(w)))
        att = tuple(float(x) for x in np.real(v[:, i]))
        wl, vl = np.linalg.eig(m.to_float().T)
        j = int(np.argmax(np.abs(wl)))
        rep = tuple(float(x) for x in np.real(vl[:, j]))
    return SpectralReport(
        mode="numeric",
        rational_eigenvalues=tuple(eig),
        fully_split=False,
        numeric_eigenvalues=numeric,
        proximal=prox,
        biproximal=prox and inv_gap > 1 + tol,
        attracting_point=att,
        repelling_hyperplane=rep,
        tol=tol,
        gap=gap,
    )


def _log_top_singular(m: RMat) -> float:
    big = max((abs(x) for r in m.rows for x in r), default=Fraction(0))
    if big == 0:
        return float("-inf")
    s = np.linalg.svd(m.to_float(), compute_uv=False)
    return math.log(big.numerator) - math.log(big.denominator) + math.log(s[0])


def exterior_square(m: RMat) -> RMat:
    """Exact matrix of the action on the second exterior power (2x2 minors)."""
    n = m.dim
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    a = m.rows
    return RMat._raw(tuple(tuple(a[i][k] * a[j][l] - a[i][l] * a[j][k] for k, l in pairs)
                           for i, j in pairs))


def singular_log_ratio(m: RMat) -> float:
    """``log(sigma_1 / sigma_2)`` (0 for 1x1).

    Computed as ``2 log sigma_1(m) - log sigma_1(wedge^2 m)``; both top
    singular values are accurate in relative terms, so the ratio stays
    meaningful far below double precision.
    """
    if m.dim < 2:
        return 0.0
    top2 = _log_top_singular(exterior_square(m))
    if top2 == float("-inf"):
        return float("inf")
    return max(2 * _log_top_singular(m) - top2, 0.0)


def operator_distance_to_identity(m: RMat) -> float:
    """Spectral-norm distance from ``m`` (scaled to det +-1) to the identity."""
    a = np.array([[float(x) for x in r] for r in m.rows], dtype=float) if _fits_float(m) else m.to_float()
    det = np.linalg.det(a)
    if det == 0:
        return float("inf")
    a = a / (abs(det) ** (1.0 / m.dim))
    return float(np.linalg.norm(a - np.eye(m.dim), 2))


def _fits_float(m: RMat) -> bool:
    return all(abs(x) < 1e300 for r in m.rows for x in r)
