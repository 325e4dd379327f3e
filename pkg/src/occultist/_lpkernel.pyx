"""Compiled integer-pivoting simplex (phase I feasibility).

Line-for-line twin of ``_lpkernel_py.py``. All arithmetic is on Python ints;
every tableau entry is implicitly divided by the running determinant ``D``.
"""

GE = 0
EQ = 1


def solve(list rows, list rhs, list kinds, Py_ssize_t nvars):
    """Decide feasibility of ``rows[r] . x (>= | =) rhs[r]`` over free x.

    Parameters
    ----------
    rows : list of list of int
    rhs : list of int
    kinds : list of int
        ``GE`` or ``EQ`` per row.
    nvars : int

    Returns
    -------
    tuple
        ``(True, xnum, den, pivots)`` with ``x = xnum / den`` feasible, or
        ``(False, ynum, den, pivots)`` with multipliers ``y = ynum / den``
        satisfying ``y >= 0`` on GE rows, ``sum y_r rows[r] = 0`` and
        ``sum y_r rhs[r] > 0``.
    """
    cdef Py_ssize_t m = len(rows)
    cdef Py_ssize_t d, r, j, i, q, p, nslack, art0, ncol, width, b
    cdef long pivots
    cdef list tab, row, prow, z, basis, sign, slack_of, xnum, ynum
    d = nvars
    sign = []
    slack_of = []
    nslack = 0
    for r in range(m):
        sign.append(-1 if rhs[r] < 0 else 1)
        if kinds[r] == GE:
            slack_of.append(2 * d + nslack)
            nslack += 1
        else:
            slack_of.append(-1)
    art0 = 2 * d + nslack
    ncol = art0 + m
    width = ncol + 1
    tab = []
    for r in range(m):
        s = sign[r]
        row = [0] * width
        a = rows[r]
        for j in range(d):
            v = s * a[j]
            row[j] = v
            row[d + j] = -v
        if slack_of[r] >= 0:
            row[slack_of[r]] = -s
        row[art0 + r] = 1
        row[ncol] = s * rhs[r]
        tab.append(row)
    z = [0] * width
    for j in range(art0):
        acc = 0
        for r in range(m):
            acc -= tab[r][j]
        z[j] = acc
    acc = 0
    for r in range(m):
        acc -= tab[r][ncol]
    z[ncol] = acc
    basis = [art0 + r for r in range(m)]
    den = 1
    pivots = 0
    while True:
        q = -1
        for j in range(ncol):
            if z[j] < 0:
                q = j
                break
        if q < 0:
            break
        p = -1
        for r in range(m):
            t = tab[r][q]
            if t > 0:
                if p < 0:
                    p = r
                else:
                    lhs = tab[r][ncol] * tab[p][q]
                    rhs_ = tab[p][ncol] * t
                    if lhs < rhs_ or (lhs == rhs_ and basis[r] < basis[p]):
                        p = r
        if p < 0:
            # phase I objective is bounded below by zero; cannot happen
            raise RuntimeError("unbounded phase I")
        prow = tab[p]
        piv = prow[q]
        for i in range(m):
            if i == p:
                continue
            row = tab[i]
            f = row[q]
            if f == 0:
                if piv != den:
                    for j in range(width):
                        row[j] = (piv * row[j]) // den
                continue
            for j in range(width):
                row[j] = (piv * row[j] - f * prow[j]) // den
        f = z[q]
        for j in range(width):
            z[j] = (piv * z[j] - f * prow[j]) // den
        den = piv
        basis[p] = q
        pivots += 1
    if z[ncol] == 0:
        xnum = [0] * d
        for r in range(m):
            b = basis[r]
            if b < d:
                xnum[b] += tab[r][ncol]
            elif b < 2 * d:
                xnum[b - d] -= tab[r][ncol]
        return True, xnum, den, pivots
    ynum = [sign[r] * (den - z[art0 + r]) for r in range(m)]
    return False, ynum, den, pivots
