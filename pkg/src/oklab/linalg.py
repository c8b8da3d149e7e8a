"""Exact rational linear algebra over fractions.Fraction.

Everything in this package runs on exact arithmetic; this module holds the
small dense-matrix toolbox (row reduction, solving, nullspaces, integer
determinants) shared by the geometry and the toric backends.  Matrices are
plain tuples of tuples, vectors are tuples.  Sizes are tiny (dimensions
up to ~6), so simple fraction-free-ish Gaussian elimination is plenty.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

Vec = tuple[Fraction, ...]
Mat = tuple[Vec, ...]


def rat(x) -> Fraction:
    """Coerce ints / strings like '3/2' / Fractions to Fraction."""
    if isinstance(x, Fraction):
        return x
    return Fraction(x)


def vec(xs: Iterable) -> Vec:
    return tuple(rat(x) for x in xs)


def vsub(a: Sequence[Fraction], b: Sequence[Fraction]) -> Vec:
    return tuple(x - y for x, y in zip(a, b, strict=True))


def dot(a: Sequence, b: Sequence) -> Fraction:
    return sum((x * y for x, y in zip(a, b, strict=True)), Fraction(0))


def rref(rows: Sequence[Sequence[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form; returns (rows, pivot column indices)."""
    m = [list(r) for r in rows]
    if not m:
        return [], []
    ncols = len(m[0])
    pivots = []
    r = 0
    for c in range(ncols):
        if r >= len(m):
            break
        pr = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if pr is None:
            continue
        m[r], m[pr] = m[pr], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    return m, pivots


def rank(rows: Sequence[Sequence[Fraction]]) -> int:
    return len(rref(rows)[1])


def solve(a: Sequence[Sequence[Fraction]], b: Sequence[Fraction]) -> Vec | None:
    """One exact solution x of A x = b, or None if inconsistent.

    For underdetermined systems the free variables are set to 0.
    """
    arows = [list(r) + [bv] for r, bv in zip(a, b, strict=True)]
    red, pivots = rref(arows)
    ncols = len(a[0]) if a else 0
    if ncols in pivots:
        return None  # pivot in the augmented column: inconsistent
    x = [Fraction(0)] * ncols
    for row, c in zip(red, pivots):
        x[c] = row[-1]
    return tuple(x)


def nullspace(rows: Sequence[Sequence[Fraction]]) -> list[Vec]:
    """Basis of the right kernel of the matrix."""
    if not rows:
        return []
    ncols = len(rows[0])
    red, pivots = rref(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, c in zip(red, pivots):
            v[c] = -row[f]
        basis.append(tuple(v))
    return basis


def det_int(rows: Sequence[Sequence[int]]) -> int:
    """Determinant of a small integer matrix (Bareiss / expansion hybrid)."""
    n = len(rows)
    if n == 0:
        return 1
    if n == 1:
        return rows[0][0]
    if n == 2:
        return rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    if n == 3:
        (a, b, c), (d, e, f), (g, h, i) = rows
        return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)
    # cofactor expansion along the first row; n stays <= ~6 here
    total = 0
    for j, x in enumerate(rows[0]):
        if x == 0:
            continue
        minor = [[r[k] for k in range(n) if k != j] for r in rows[1:]]
        total += (-1) ** j * x * det_int(minor)
    return total


def cross_normal_int(diffs: Sequence[Sequence[int]]) -> tuple[int, ...]:
    """Generalized cross product: integer normal to k-1 vectors in Z^k."""
    k = len(diffs) + 1
    out = []
    for j in range(k):
        minor = [[d[c] for c in range(k) if c != j] for d in diffs]
        out.append((-1) ** j * det_int(minor))
    return tuple(out)


def primitive(v: Sequence[int]) -> tuple[int, ...]:
    """Divide an integer vector by the gcd of its entries (keeps sign)."""
    g = 0
    for x in v:
        g = gcd(g, abs(x))
    if g <= 1:
        return tuple(v)
    return tuple(x // g for x in v)


def lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


def common_denominator(points: Iterable[Sequence[Fraction]]) -> int:
    d = 1
    for p in points:
        for x in p:
            d = lcm(d, x.denominator)
    return d


def to_int_points(points: Sequence[Sequence[Fraction]], scale: int) -> list[tuple[int, ...]]:
    return [tuple(int(x * scale) for x in p) for p in points]


def iroot(n: int, k: int) -> tuple[int, bool]:
    """Floor k-th root of n >= 0, plus whether it is exact (Newton on ints)."""
    if n < 0 or k < 1:
        raise ValueError("iroot needs n >= 0, k >= 1")
    if n in (0, 1) or k == 1:
        return n, True
    x = 1 << (-(-n.bit_length() // k))  # upper-ish start
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            break
        x = y
    while x ** k > n:
        x -= 1
    return x, x ** k == n
