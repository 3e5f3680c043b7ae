"""Minimal polynomials, closed forms along digit patterns, dominant-root checks."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence

from . import automata as fa
from .linalg import EchelonBasis, Rational, dot, q, solve, sparse, vec_mat
from .linrep import LinearRepresentation, evaluate_range, minimize_rep


# ---------------------------------------------------------------------------
# polynomials


@dataclass(frozen=True)
class RationalPolynomial:
    """Dense polynomial in X with exact coefficients, lowest degree first."""

    coeffs: tuple[Rational, ...]

    def __post_init__(self):
        c = [q(x) for x in self.coeffs]
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(c))

    @classmethod
    def from_roots(cls, roots: Sequence[Rational]) -> "RationalPolynomial":
        p = cls((1,))
        for r in roots:
            p = p * cls((-r, 1))
        return p

    @classmethod
    def x_power(cls, n: int) -> "RationalPolynomial":
        return cls((0,) * n + (1,))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def lead(self) -> Rational:
        return self.coeffs[-1] if self.coeffs else 0

    @property
    def is_monic(self) -> bool:
        return self.lead == 1

    def monic(self) -> "RationalPolynomial":
        if self.is_zero:
            return self
        lead = Fraction(self.lead)
        return RationalPolynomial(tuple(Fraction(c) / lead for c in self.coeffs))

    def __add__(self, other):
        a, b = self.coeffs, other.coeffs
        n = max(len(a), len(b))
        return RationalPolynomial(tuple(
            (a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)
        ))

    def __neg__(self):
        return RationalPolynomial(tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return RationalPolynomial(tuple(c * other for c in self.coeffs))
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return RationalPolynomial(())
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] += x * y
        return RationalPolynomial(tuple(out))

    def __pow__(self, n: int):
        p = RationalPolynomial((1,))
        for _ in range(n):
            p = p * self
        return p

    def __divmod__(self, other):
        if other.is_zero:
            raise ZeroDivisionError("polynomial division by zero")
        rem = [Fraction(c) for c in self.coeffs]
        lead = Fraction(other.lead)
        dq = other.degree
        quot = [Fraction(0)] * max(0, len(rem) - dq)
        for i in range(len(rem) - 1, dq - 1, -1):
            c = rem[i] / lead
            if c:
                quot[i - dq] = c
                for j, b in enumerate(other.coeffs):
                    rem[i - dq + j] -= c * b
        return RationalPolynomial(tuple(quot)), RationalPolynomial(tuple(rem[:dq]))

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def __call__(self, x: Rational) -> Rational:
        acc: Rational = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return q(acc)

    def divides(self, other: "RationalPolynomial") -> bool:
        return (other % self).is_zero

    def __str__(self):
        if self.is_zero:
            return "0"
        parts = []
        for i in range(self.degree, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            mono = "" if i == 0 else ("X" if i == 1 else f"X^{i}")
            if i == 0:
                body = str(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{mag}*{mono}"
            parts.append((sign, body))
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out


X = RationalPolynomial((0, 1))
ONE = RationalPolynomial((1,))


def poly_gcd(a: RationalPolynomial, b: RationalPolynomial) -> RationalPolynomial:
    while not b.is_zero:
        a, b = b, a % b
    return a.monic()


def poly_lcm(a: RationalPolynomial, b: RationalPolynomial) -> RationalPolynomial:
    if a.is_zero or b.is_zero:
        return RationalPolynomial(())
    return (a * b // poly_gcd(a, b)).monic()


def eval_at_matrix(p: RationalPolynomial, m: Sequence[Sequence[Rational]]) -> list[list[Rational]]:
    """p(M) by Horner's rule."""
    n = len(m)
    rows = [sparse(r) for r in m]
    acc = [[0] * n for _ in range(n)]
    for c in reversed(p.coeffs):
        acc = [vec_mat(r, rows, n) for r in acc]
        for i in range(n):
            acc[i][i] = q(acc[i][i] + c)
    return acc


# ---------------------------------------------------------------------------
# minimal and characteristic polynomials


def krylov_min_poly(x: Sequence[Rational], m) -> RationalPolynomial:
    """Monic least-degree p with x . p(M) = 0 (M given as dense or sparse rows)."""
    rows = _as_sparse(m)
    n = len(rows)
    if not any(x):
        return ONE
    basis = EchelonBasis(n)
    cur = list(x)
    while basis.add(cur):
        cur = vec_mat(cur, rows, n)
    c = basis.coordinates(cur)
    return RationalPolynomial(tuple(-a for a in c) + (1,))


def min_poly(m) -> RationalPolynomial:
    """Minimal polynomial, as the lcm of the Krylov polynomials of unit vectors."""
    rows = _as_sparse(m)
    n = len(rows)
    result = ONE
    for j in range(n):
        e = [0] * n
        e[j] = 1
        if result.degree > 0 and not any(_apply_poly(result, e, rows)):
            continue
        result = poly_lcm(result, krylov_min_poly(e, rows))
    return result


def _apply_poly(p: RationalPolynomial, x, rows):
    """x . p(M)."""
    n = len(rows)
    out = [0] * n
    cur = list(x)
    for i, c in enumerate(p.coeffs):
        if i:
            cur = vec_mat(cur, rows, n)
        if c:
            out = [a + c * b for a, b in zip(out, cur)]
    return [q(a) for a in out]


def _as_sparse(m):
    first = next((r for r in m if len(r)), None)
    if first is None or isinstance(first[0], tuple):
        return tuple(tuple(r) for r in m)
    return tuple(sparse(r) for r in m)


def char_poly(m: Sequence[Sequence[Rational]]) -> RationalPolynomial:
    """det(X I - M) by Berkowitz's division-free algorithm."""
    n = len(m)
    if n == 0:
        return ONE
    c = [1, -m[0][0]]  # highest degree first
    for r in range(1, n):
        a = m[r][r]
        row = m[r][:r]
        col = [m[i][r] for i in range(r)]
        sub = [list(m[i][:r]) for i in range(r)]
        vec = [1, -a]
        s = col
        for _ in range(r):
            vec.append(-sum(x * y for x, y in zip(row, s)))
            s = [sum(x * y for x, y in zip(sub[i], s)) for i in range(r)]
        new = []
        for i in range(r + 2):
            new.append(sum(vec[i - j] * c[j] for j in range(r + 1) if 0 <= i - j < len(vec)))
        c = new
    return RationalPolynomial(tuple(reversed(c)))


# ---------------------------------------------------------------------------
# rational roots


def _divisors(n: int) -> list[int]:
    n = abs(n)
    primes: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            primes[p] = primes.get(p, 0) + 1
            n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        primes[n] = primes.get(n, 0) + 1
    divs = [1]
    for p, e in primes.items():
        divs = [d * p**i for d in divs for i in range(e + 1)]
    return sorted(divs)


def _integer_coeffs(p: RationalPolynomial) -> list[int]:
    den = 1
    for c in p.coeffs:
        den = den * Fraction(c).denominator // _gcd(den, Fraction(c).denominator)
    return [int(c * den) for c in p.coeffs]


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return abs(a)


def rational_roots(p: RationalPolynomial) -> tuple[list[tuple[Rational, int]], RationalPolynomial]:
    """Rational roots with multiplicities and the monic cofactor without rational roots."""
    if p.is_zero:
        raise ValueError("zero polynomial has every number as a root")
    rest = p.monic()
    roots: list[tuple[Rational, int]] = []
    m0 = 0
    while rest.degree > 0 and rest.coeffs[0] == 0:
        rest = RationalPolynomial(rest.coeffs[1:])
        m0 += 1
    if m0:
        roots.append((0, m0))
    if rest.degree > 0:
        ic = _integer_coeffs(rest)
        cands = set()
        for a in _divisors(ic[0]):
            for b in _divisors(ic[-1]):
                cands.add(q(Fraction(a, b)))
                cands.add(q(Fraction(-a, b)))
        for r in sorted(cands, key=lambda x: (abs(x), x < 0)):
            mult = 0
            lin = RationalPolynomial((-r, 1))
            while rest.degree > 0:
                quo, rem = divmod(rest, lin)
                if not rem.is_zero:
                    break
                rest = quo
                mult += 1
            if mult:
                roots.append((r, mult))
    return roots, rest.monic()


# ---------------------------------------------------------------------------
# digit patterns


_PAT_TOKEN = re.compile(r"^(\d)\^(?:t|\(t([+-]\d+)\))$")


@dataclass(frozen=True)
class DigitPattern:
    """The word family p d^(t+offset) s, t = 0, 1, 2, ..."""

    prefix: tuple[int, ...]
    digit: int
    suffix: tuple[int, ...] = ()
    offset: int = 0

    def exponent(self, t: int) -> int:
        return t + self.offset

    @property
    def t_min(self) -> int:
        return max(0, -self.offset)

    def word(self, t: int) -> list[int]:
        e = self.exponent(t)
        if e < 0:
            raise ValueError(f"pattern undefined at t={t}")
        return list(self.prefix) + [self.digit] * e + list(self.suffix)

    def value(self, t: int, k: int) -> int:
        return fa.from_digits(self.word(t), k)

    def __str__(self):
        rep = f"{self.digit}^t" if self.offset == 0 else f"{self.digit}^(t{self.offset:+d})"
        parts = ["".join(map(str, self.prefix)), rep, "".join(map(str, self.suffix))]
        return " ".join(p for p in parts if p)


def parse_pattern(text: str, k: int = 2) -> DigitPattern:
    """Parse e.g. ``"1^t"``, ``"1 0^t 1"``, ``"1 0^(t-1) 1"``."""
    prefix: list[int] = []
    suffix: list[int] = []
    found = None
    for tok in text.split():
        m = _PAT_TOKEN.match(tok)
        if m:
            if found is not None:
                raise ValueError(f"pattern {text!r} repeats more than one block")
            found = (int(m.group(1)), int(m.group(2) or 0))
            continue
        if not tok.isdigit():
            raise ValueError(f"bad pattern token {tok!r}")
        (suffix if found is not None else prefix).extend(int(c) for c in tok)
    if found is None:
        raise ValueError(f"pattern {text!r} has no repeated block d^t")
    digits = prefix + suffix + [found[0]]
    if any(d >= k for d in digits):
        raise ValueError(f"pattern digit not below base {k}")
    return DigitPattern(tuple(prefix), found[0], tuple(suffix), found[1])


def _pattern_parts(rep: LinearRepresentation, pat: DigitPattern):
    x0 = rep.run(pat.prefix)
    # column gamma(s) v, computed on the transpose
    y = rep.transpose().run(tuple(reversed(pat.suffix)))
    return x0, rep._rows[pat.digit], y


def pattern_values(rep: LinearRepresentation, pat: DigitPattern, t_from: int, t_to: int) -> Iterator[tuple[int, Rational]]:
    """(t, u gamma(p) gamma(d)^(t+offset) gamma(s) v) for t in [t_from, t_to]."""
    if rep.rank == 0:
        for t in range(max(t_from, pat.t_min), t_to + 1):
            yield t, 0
        return
    x, rows, y = _pattern_parts(rep, pat)
    t_from = max(t_from, pat.t_min)
    for _ in range(pat.exponent(t_from)):
        x = vec_mat(x, rows, rep.rank)
    for t in range(t_from, t_to + 1):
        yield t, dot(x, y)
        x = vec_mat(x, rows, rep.rank)


def pattern_value(rep: LinearRepresentation, pat: DigitPattern, t: int) -> Rational:
    return next(pattern_values(rep, pat, t, t))[1]


# ---------------------------------------------------------------------------
# closed forms


@dataclass(frozen=True)
class ClosedForm:
    """value(t) = sum coeff * t^power * root^t for t >= t0; explicit values before.

    ``terms`` is None when the recurrence has irrational roots; only the
    recurrence polynomial is known then.
    """

    terms: tuple[tuple[Rational, Rational, int], ...] | None
    t0: int
    transients: tuple[tuple[int, Rational], ...]
    recurrence: RationalPolynomial
    irrational_factor: RationalPolynomial = field(default=ONE)

    def __call__(self, t: int) -> Rational:
        if self.terms is None:
            raise ValueError("closed form unavailable (irrational roots)")
        for s, val in self.transients:
            if s == t:
                return val
        return q(sum(c * Fraction(t) ** j * Fraction(r) ** t for c, r, j in self.terms))

    def coefficient(self, root: Rational, power: int = 0) -> Rational:
        for c, r, j in self.terms or ():
            if r == root and j == power:
                return c
        return 0

    def __str__(self):
        if self.terms is None:
            return f"recurrence with characteristic polynomial {self.recurrence}"
        if not self.terms:
            return "0"
        out = []
        for c, r, j in self.terms:
            base = f"({r})^t" if (r < 0 or isinstance(r, Fraction)) else f"{r}^t"
            if r == 1:
                base = ""
            mono = "" if j == 0 else ("t" if j == 1 else f"t^{j}")
            factors = [f for f in (mono, base) if f]
            coef = str(c) if not factors or c not in (1, -1) else ("-" if c == -1 else "")
            if coef and factors and coef != "-":
                coef = f"{coef}*"
            out.append(coef + "*".join(factors))
        s = " + ".join(out).replace("+ -", "- ")
        return s


class ClosedFormError(RuntimeError):
    pass


def fit_closed_form(rep: LinearRepresentation, pat: DigitPattern) -> ClosedForm:
    """Exact closed form of t -> pattern_value(rep, pat, t).

    The recurrence is the Krylov polynomial of u gamma(p) under gamma(d).
    Root 0 of multiplicity m contributes transients (exponents below m);
    every other rational root r of multiplicity m contributes t^j r^t,
    j < m.  Coefficients come from an exact square solve and are checked
    on twice as many further samples.
    """
    if rep.rank == 0:
        return ClosedForm((), pat.t_min, (), ONE)
    x0, rows, y = _pattern_parts(rep, pat)
    rec = krylov_min_poly(x0, rows)
    roots, rest = rational_roots(rec)
    m0 = dict(roots).get(0, 0)
    t0 = max(pat.t_min, m0 - pat.offset)
    if rest.degree > 0:
        return ClosedForm(None, t0, (), rec, rest)
    basis = [(r, j) for r, mult in roots if r != 0 for j in range(mult)]
    n = len(basis)
    values = dict(pattern_values(rep, pat, pat.t_min, t0 + 3 * n))
    transients = tuple((t, values[t]) for t in range(pat.t_min, t0))

    def row(t):
        return [Fraction(t) ** j * Fraction(r) ** t for r, j in basis]

    if n:
        coeffs = solve([row(t) for t in range(t0, t0 + n)], [values[t] for t in range(t0, t0 + n)])
    else:
        coeffs = []
    form = ClosedForm(
        tuple((c, r, j) for c, (r, j) in zip(coeffs, basis) if c != 0), t0, transients, rec
    )
    for t in range(t0, t0 + 3 * n + 1):
        if form(t) != values[t]:
            raise ClosedFormError(f"closed form fails verification at t={t}")
    return form


# ---------------------------------------------------------------------------
# dominant root analysis


@dataclass(frozen=True)
class DominantAnalysis:
    root: Rational
    table: tuple[tuple[int, Rational, Rational], ...]  # (t, value, value / root^t)
    stabilized: bool
    n0: int | None
    estimate: Rational
    exact_coefficient: Rational | None
    recurrence: RationalPolynomial

    def ratio_decimal(self, t: int) -> str:
        for s, _, r in self.table:
            if s == t:
                return f"{float(r):.12e}"
        raise KeyError(t)


def _rel_diff(a: Rational, b: Rational) -> float:
    if a == b:
        return 0.0
    return float(abs(Fraction(a) - Fraction(b)) / max(abs(Fraction(a)), abs(Fraction(b))))


def root_coefficient(rep: LinearRepresentation, pat: DigitPattern, root: Rational):
    """Exact coefficient c of c * root^t in the pattern sequence, and the recurrence.

    Exact only for a simple (or absent) root of the Krylov recurrence of
    u gamma(p) under gamma(d); for a repeated root the coefficient is None.
    Writing the recurrence as (X - root) Q(X), the projector Q(M) / Q(root)
    isolates the root^t component.
    """
    root = q(root)
    if rep.rank == 0:
        return 0, ONE
    x0, rows, y = _pattern_parts(rep, pat)
    rec = krylov_min_poly(x0, rows)
    lin = RationalPolynomial((-root, 1))
    quo, rem = divmod(rec, lin)
    if not rem.is_zero:
        return 0, rec
    if (quo % lin).is_zero:
        return None, rec
    xq = _apply_poly(quo, x0, rows)
    c = Fraction(dot(xq, y)) / Fraction(quo(root))
    # exponent is t + offset
    return q(c * Fraction(root) ** pat.offset), rec


def dominant_ratio(
    rep: LinearRepresentation, pat: DigitPattern, root: Rational, t_max: int, window: int = 5, tol: float = 1e-3
) -> DominantAnalysis:
    """Exact ratios value(t) / root^t and eventual positivity on [t_min, t_max].

    The exact coefficient of root^t is attached when it can be computed
    (see :func:`root_coefficient`).
    """
    if root == 0:
        raise ValueError("dominant root must be nonzero")
    root = q(root)
    table = []
    for t, val in pattern_values(rep, pat, pat.t_min, t_max):
        table.append((t, val, q(Fraction(val) / Fraction(root) ** t)))
    last = [r for _, _, r in table[-window:]]
    stabilized = len(last) == window and all(
        _rel_diff(a, b) < tol for i, a in enumerate(last) for b in last[i + 1:]
    )
    n0 = None
    for t, val, _ in reversed(table):
        if val > 0:
            n0 = t
        else:
            break
    exact, rec = root_coefficient(rep, pat, root)
    estimate = table[-1][2] if table else 0
    return DominantAnalysis(root, tuple(table), stabilized, n0, estimate, exact, rec)


def monotonicity_scan(rep: LinearRepresentation, n_from: int, n_to: int) -> list[int]:
    """All n in [n_from, n_to] with f(n) >= f(n+1)."""
    if n_from > n_to:
        raise ValueError("empty scan range")
    if rep.rank > 40:
        rep = minimize_rep(rep)
    vals = evaluate_range(rep, n_from, n_to + 2)
    return [n_from + i for i in range(len(vals) - 1) if vals[i] >= vals[i + 1]]
