"""Exact rational helpers: parsing, formatting and small dense linear algebra."""
from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import Sequence

from .errors import InternalConsistencyError, ManifestError

Vector = tuple  # tuple[Fraction, ...]
Matrix = tuple  # tuple[tuple[Fraction, ...], ...]


def parse_rational(token) -> Fraction:
    """Parse ``"p/q"``, ``"p"`` or a Python int into a Fraction.

    Floating-point values and decimal strings are rejected: every guarantee
    downstream is an exact-arithmetic guarantee.
    """
    if isinstance(token, bool):
        raise ManifestError(f"not a rational: {token!r}")
    if isinstance(token, int):
        return Fraction(token)
    if isinstance(token, Fraction):
        return token
    if not isinstance(token, str):
        raise ManifestError(f"floating-point literal rejected: {token!r}")
    text = token.strip()
    if any(c in text for c in ".eE"):
        raise ManifestError(f"floating-point literal rejected: {token!r}")
    num, sep, den = text.partition("/")
    try:
        p = int(num)
        q = int(den) if sep else 1
    except ValueError:
        raise ManifestError(f"not a rational: {token!r}") from None
    if q == 0:
        raise ManifestError(f"zero denominator in {token!r}")
    return Fraction(p, q)


def fmt_q(x: Fraction) -> str:
    """Always render as ``p/q`` (``1`` becomes ``1/1``)."""
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def fmt_vec(v: Sequence[Fraction]) -> str:
    return ",".join(fmt_q(x) for x in v)


def as_vector(values) -> Vector:
    return tuple(Fraction(x) for x in values)


def dot(u: Sequence[Fraction], v: Sequence[Fraction]) -> Fraction:
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def bilinear(gram: Matrix, u: Sequence[Fraction], v: Sequence[Fraction]) -> Fraction:
    total = Fraction(0)
    for i, ui in enumerate(u):
        if ui:
            total += ui * dot(gram[i], v)
    return total


def denominator_lcm(values) -> int:
    out = 1
    for x in values:
        out = lcm(out, Fraction(x).denominator)
    return out


def solve(matrix: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]) -> Vector:
    """Solve a square system by Gaussian elimination over Q.

    Rows are never swapped: the callers pass negative definite
    matrices, for which a zero pivot means the input was corrupted.
    """
    n = len(matrix)
    a = [[Fraction(x) for x in row] + [Fraction(rhs[i])] for i, row in enumerate(matrix)]
    for col in range(n):
        pivot = a[col][col]
        if pivot == 0:
            raise InternalConsistencyError(f"zero pivot at column {col}")
        for r in range(col + 1, n):
            f = a[r][col] / pivot
            if f:
                for c in range(col, n + 1):
                    a[r][c] -= f * a[col][c]
    x = [Fraction(0)] * n
    for r in range(n - 1, -1, -1):
        s = a[r][n] - sum((a[r][c] * x[c] for c in range(r + 1, n)), Fraction(0))
        x[r] = s / a[r][r]
    return tuple(x)


def inertia(gram: Sequence[Sequence[Fraction]]) -> tuple[int, int, int]:
    """(positive, negative, zero) counts of a symmetric rational matrix.

    Symmetric elimination by congruence; a zero diagonal with a nonzero
    off-diagonal entry is repaired by adding one basis vector to another.
    """
    a = [[Fraction(x) for x in row] for row in gram]
    n = len(a)
    pos = neg = 0
    active = list(range(n))
    while active:
        i = next((k for k in active if a[k][k] != 0), None)
        if i is None:
            pair = next(((p, q) for p in active for q in active if p != q and a[p][q] != 0), None)
            if pair is None:
                break
            p, q = pair
            # e_p <- e_p + e_q
            for k in range(n):
                a[p][k] += a[q][k]
            for k in range(n):
                a[k][p] += a[k][q]
            i = p
        d = a[i][i]
        if d > 0:
            pos += 1
        else:
            neg += 1
        active.remove(i)
        for r in active:
            f = a[r][i] / d
            if f:
                for c in active:
                    a[r][c] -= f * a[i][c]
        for r in active:
            a[r][i] = a[i][r] = Fraction(0)
    return pos, neg, n - pos - neg


def independent_subset(vectors: Sequence[Sequence[Fraction]]) -> list[int]:
    """Indices of a maximal linearly independent subfamily, greedy in order."""
    basis: list[list[Fraction]] = []
    pivots: list[int] = []
    chosen = []
    for idx, v in enumerate(vectors):
        w = [Fraction(x) for x in v]
        for b, p in zip(basis, pivots):
            if w[p]:
                f = w[p] / b[p]
                w = [x - f * y for x, y in zip(w, b)]
        p = next((k for k, x in enumerate(w) if x), None)
        if p is not None:
            basis.append(w)
            pivots.append(p)
            chosen.append(idx)
    return chosen


def is_symmetric(m: Sequence[Sequence[Fraction]]) -> bool:
    return all(m[i][j] == m[j][i] for i in range(len(m)) for j in range(i))
