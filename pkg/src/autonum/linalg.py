"""Exact rational linear algebra on plain Python lists.

Scalars are ``int`` or ``fractions.Fraction``; integral values are kept as
``int`` so integer-only computations stay fast.  Pivoting always picks the
lowest-index nonzero entry, which makes every result reproducible.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence, Union

Rational = Union[int, Fraction]


def q(x) -> Rational:
    """Normalize a scalar: integral values become ``int``."""
    if isinstance(x, int):
        return x
    x = Fraction(x)
    return x.numerator if x.denominator == 1 else x


def parse_rational(s: str) -> Rational:
    try:
        return q(Fraction(s))
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"not a rational number: {s!r}") from None


def fmt_rational(x: Rational) -> str:
    x = q(x)
    return str(x)


def sparse(vec: Sequence[Rational]) -> tuple[tuple[int, Rational], ...]:
    return tuple((i, x) for i, x in enumerate(vec) if x)


def vec_mat(vec: Sequence[Rational], rows, width: int) -> list[Rational]:
    """Row vector times a matrix given as sparse rows."""
    out: list = [0] * width
    for i, x in enumerate(vec):
        if x:
            for j, a in rows[i]:
                out[j] += x * a
    return [q(y) if isinstance(y, Fraction) else y for y in out]


def mat_vec(mat: Sequence[Sequence[Rational]], vec: Sequence[Rational]) -> list[Rational]:
    return [q(sum(a * b for a, b in zip(row, vec) if a and b)) for row in mat]


def dot(a: Sequence[Rational], b: Sequence[Rational]) -> Rational:
    return q(sum(x * y for x, y in zip(a, b) if x and y))


def mat_mul(a, b):
    n, m = len(a), len(b[0]) if b else 0
    bt = list(zip(*b)) if b else []
    return [[dot(a[i], bt[j]) for j in range(m)] for i in range(n)]


def identity(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def transpose(m):
    return [list(r) for r in zip(*m)]


class EchelonBasis:
    """Incrementally built basis of a span, with coordinates.

    Vectors are added in order; a vector is kept iff it is independent of the
    ones kept before it.  :meth:`coordinates` expresses any vector in the span
    as a combination of the kept vectors (in insertion order).
    """

    def __init__(self, dim: int):
        self.dim = dim
        self.vectors: list[list[Rational]] = []
        # pivot -> (sparse normalized row, combo over kept vectors as dict)
        self._rows: dict[int, tuple[list[tuple[int, Rational]], dict[int, Rational]]] = {}
        self._order: list[int] = []

    def __len__(self):
        return len(self.vectors)

    def _reduce(self, vec):
        r = list(vec)
        combo: dict[int, Rational] = {}
        for p in self._order:
            f = r[p]
            if f:
                row, rc = self._rows[p]
                for j, a in row:
                    r[j] -= f * a
                for i, c in rc.items():
                    combo[i] = combo.get(i, 0) + f * c
        return r, combo

    def add(self, vec: Sequence[Rational]) -> bool:
        r, combo = self._reduce(vec)
        piv = next((i for i, x in enumerate(r) if x), None)
        if piv is None:
            return False
        m = len(self.vectors)
        self.vectors.append([q(x) for x in vec])
        lead = r[piv]
        row = [(j, q(Fraction(x) / lead)) for j, x in enumerate(r) if x]
        rc = {i: q(Fraction(-c) / lead) for i, c in combo.items() if c}
        rc[m] = q(Fraction(1) / lead)
        self._rows[piv] = (row, rc)
        self._order = sorted(self._rows)
        return True

    def contains(self, vec: Sequence[Rational]) -> bool:
        r, _ = self._reduce(vec)
        return not any(r)

    def coordinates(self, vec: Sequence[Rational]) -> list[Rational]:
        r, combo = self._reduce(vec)
        if any(r):
            raise ValueError("vector is not in the span")
        out = [0] * len(self.vectors)
        for i, c in combo.items():
            out[i] = q(c)
        return out


def solve(a: Sequence[Sequence[Rational]], b: Sequence[Rational]) -> list[Rational]:
    """Unique solution x of a x = b for square nonsingular a."""
    n = len(a)
    m = [[Fraction(x) for x in row] + [Fraction(y)] for row, y in zip(a, b)]
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col]), None)
        if piv is None:
            raise ZeroDivisionError("singular system")
        m[col], m[piv] = m[piv], m[col]
        lead = m[col][col]
        m[col] = [x / lead for x in m[col]]
        for r in range(n):
            if r != col and m[r][col]:
                f = m[r][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return [q(m[r][n]) for r in range(n)]


def rank(rows: Sequence[Sequence[Rational]]) -> int:
    if not rows:
        return 0
    b = EchelonBasis(len(rows[0]))
    for r in rows:
        b.add(r)
    return len(b)
