"""Linear representations of k-regular series: extraction, minimization, equality.

A representation ``(u, gamma, v)`` of rank r computes
``f(n) = u . gamma(x_1) ... gamma(x_m) . v`` for the msd-first base-k digits
``x_1 ... x_m`` of n.  All arithmetic is exact (``int`` / ``Fraction``).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import automata as fa
from .automata import TupleDfa
from .linalg import EchelonBasis, Rational, dot, fmt_rational, parse_rational, q, sparse, vec_mat


class RepresentationError(ValueError):
    pass


@dataclass(frozen=True)
class LinearRepresentation:
    base: int
    u: tuple[Rational, ...]
    gamma: tuple[tuple[tuple[Rational, ...], ...], ...]
    v: tuple[Rational, ...]
    _rows: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        r = len(self.u)
        if len(self.v) != r or len(self.gamma) != self.base:
            raise RepresentationError("inconsistent representation dimensions")
        for d, m in enumerate(self.gamma):
            if len(m) != r or any(len(row) != r for row in m):
                raise RepresentationError(f"gamma({d}) is not {r}x{r}")
        object.__setattr__(self, "u", tuple(q(x) for x in self.u))
        object.__setattr__(self, "v", tuple(q(x) for x in self.v))
        object.__setattr__(
            self, "gamma", tuple(tuple(tuple(q(x) for x in row) for row in m) for m in self.gamma)
        )
        object.__setattr__(
            self, "_rows", tuple(tuple(sparse(row) for row in m) for m in self.gamma)
        )

    @property
    def rank(self) -> int:
        return len(self.u)

    def step(self, vec: Sequence[Rational], digit: int) -> list[Rational]:
        return vec_mat(vec, self._rows[digit], self.rank)

    def run(self, digits: Sequence[int], start: Sequence[Rational] | None = None) -> list[Rational]:
        x = list(self.u if start is None else start)
        for d in digits:
            x = self.step(x, d)
        return x

    def value_of_word(self, digits: Sequence[int]) -> Rational:
        return dot(self.run(digits), self.v)

    def transpose(self) -> "LinearRepresentation":
        """Representation of the reversed-word series."""
        return LinearRepresentation(
            self.base, self.v, tuple(tuple(zip(*m)) for m in self.gamma), self.u
        )


@dataclass(frozen=True)
class RationalSeries:
    rep: LinearRepresentation
    source: str = ""


def zero_rep(base: int) -> LinearRepresentation:
    return LinearRepresentation(base, (), tuple(() for _ in range(base)), ())


def evaluate(rep: LinearRepresentation, n: int) -> Rational:
    """f(n) on the canonical base-k representation of n."""
    if rep.rank == 0:
        return 0
    return rep.value_of_word(fa.to_digits(n, rep.base))


def evaluate_range(rep: LinearRepresentation, start: int, stop: int) -> list[Rational]:
    """Values for n in [start, stop), sharing work along common prefixes."""
    if stop <= start:
        return []
    if rep.rank == 0:
        return [0] * (stop - start)
    k = rep.base
    out = []
    cache: dict[tuple[int, ...], list[Rational]] = {(): list(rep.u)}
    for n in range(start, stop):
        digs = tuple(fa.to_digits(n, k))
        i = len(digs)
        while digs[:i] not in cache:
            i -= 1
        x = cache[digs[:i]]
        for j in range(i, len(digs)):
            x = rep.step(x, digs[j])
            cache[digs[: j + 1]] = x
        out.append(dot(x, rep.v))
        if len(cache) > 4096:
            cache = {(): list(rep.u)}
    return out


# ---------------------------------------------------------------------------
# extraction from automata


def _raw_extract(a: TupleDfa, index_var: str):
    if index_var not in a.tracks:
        raise RepresentationError(f"unknown track {index_var!r}")
    k = a.base
    live = sorted(set(range(a.num_states)) - a.dead_states())
    if a.initial not in live:
        return zero_rep(k)
    # initial first, then the rest in state order
    live.remove(a.initial)
    live.insert(0, a.initial)
    pos = {s: i for i, s in enumerate(live)}
    r = len(live)
    ti = a.tracks.index(index_var)
    digit_of = [digs[ti] for digs in fa.letter_digits(k, len(a.tracks))]
    gamma = [[[0] * r for _ in range(r)] for _ in range(k)]
    for s in live:
        row = a.delta[s]
        for x, t in enumerate(row):
            if t in pos:
                gamma[digit_of[x]][pos[s]][pos[t]] += 1
    u = [0] * r
    u[0] = 1
    v = [int(s in a.accepting) for s in live]
    return LinearRepresentation(k, tuple(u), tuple(tuple(map(tuple, m)) for m in gamma), tuple(v))


def extract(a: TupleDfa, index_var: str, pad: int | str = "auto") -> LinearRepresentation:
    """Representation counting the tuples of the other tracks for each value of ``index_var``.

    Basis = live states of ``a`` (the dead sink contributes nothing and is
    dropped); ``gamma(d)[p][q]`` counts letters with index digit d from p to q.

    With a fixed integer ``pad`` the count is over tuples whose padded
    representations fit in ``pad`` more digits than the index value.  With
    ``pad="auto"`` the least pad after which one more leading zero no longer
    changes any value is used, giving the true (length-independent) count;
    :class:`RepresentationError` is raised if no such pad exists.
    """
    rep = _raw_extract(a, index_var)
    if pad == "auto":
        j = stabilizing_pad(rep)
        if j is None:
            raise RepresentationError(
                "count depends on the representation length (infinitely many solutions?); "
                "pass an explicit pad"
            )
        pad = j
    if pad:
        u = rep.run([0] * int(pad))
        rep = LinearRepresentation(rep.base, tuple(u), rep.gamma, rep.v)
    return rep


def stabilizing_pad(rep: LinearRepresentation, limit: int | None = None) -> int | None:
    """Least j with f(0^(j+1) w) = f(0^j w) for every word w, or None."""
    if rep.rank == 0:
        return 0
    limit = rep.rank + 1 if limit is None else limit
    lumped, proj = lump(rep)
    x = list(rep.u)
    for j in range(limit + 1):
        y = rep.step(x, 0)
        delta = [a - b for a, b in zip(y, x)]
        if is_zero_series(lumped, proj(delta)):
            return j
        x = y
    return None


def is_zero_series(rep: LinearRepresentation, start: Sequence[Rational] | None = None) -> bool:
    """True iff ``start . gamma(w) . v`` vanishes for every word w."""
    x = list(rep.u if start is None else start)
    if not any(x):
        return True
    basis = EchelonBasis(rep.rank)
    basis.add(x)
    queue = [x]
    while queue:
        y = queue.pop()
        if dot(y, rep.v):
            return False
        for d in range(rep.base):
            z = rep.step(y, d)
            if basis.add(z):
                queue.append(z)
    return True


# ---------------------------------------------------------------------------
# reduction


def lump(rep: LinearRepresentation):
    """Quotient by the coarsest partition compatible with (gamma, v).

    States p, q are merged when v agrees and, for every digit and every
    block, the row sums of gamma into that block agree.  Returns the
    quotient representation and a function mapping row vectors of the
    original space to the quotient.
    """
    r, k = rep.rank, rep.base
    cls = {}
    block = [cls.setdefault(x, len(cls)) for x in rep.v]
    count = len(cls)
    while True:
        sigs: dict = {}
        new = []
        for p in range(r):
            parts = [block[p]]
            for d in range(k):
                acc: dict = {}
                for j, a in rep._rows[d][p]:
                    acc[block[j]] = acc.get(block[j], 0) + a
                parts.append(tuple(sorted((b, x) for b, x in acc.items() if x)))
            new.append(sigs.setdefault(tuple(parts), len(sigs)))
        block = new
        if len(sigs) == count:
            break
        count = len(sigs)
    m = count
    first = {}
    for p in range(r):
        first.setdefault(block[p], p)
    reps = [first[b] for b in range(m)]
    gamma = []
    for d in range(k):
        mat = [[0] * m for _ in range(m)]
        for b, p in enumerate(reps):
            for j, a in rep._rows[d][p]:
                mat[b][block[j]] += a
        gamma.append(tuple(tuple(row) for row in mat))
    v = tuple(rep.v[p] for p in reps)

    def proj(vec):
        out = [0] * m
        for i, x in enumerate(vec):
            if x:
                out[block[i]] += x
        return out

    return LinearRepresentation(k, tuple(proj(rep.u)), tuple(gamma), v), proj


def forward_reduce(rep: LinearRepresentation) -> tuple[LinearRepresentation, list[tuple[int, ...]]]:
    """Restrict to span{u gamma(w)}, exploring words in length-lexicographic order.

    Returns the reduced representation (coordinates w.r.t. the kept
    vectors u gamma(w_i)) and the list of kept words w_i.
    """
    k = rep.base
    if rep.rank == 0 or not any(rep.u):
        return zero_rep(k), []
    basis = EchelonBasis(rep.rank)
    basis.add(rep.u)
    words: list[tuple[int, ...]] = [()]
    images: list[list[list[Rational]]] = []
    i = 0
    while i < len(basis.vectors):
        vec = basis.vectors[i]
        imgs = []
        for d in range(k):
            y = rep.step(vec, d)
            if basis.add(y):
                words.append(words[i] + (d,))
            imgs.append(y)
        images.append(imgs)
        i += 1
    m = len(basis.vectors)
    gamma = tuple(
        tuple(tuple(basis.coordinates(images[i][d])) for i in range(m)) for d in range(k)
    )
    u = [0] * m
    u[0] = 1
    v = tuple(dot(b, rep.v) for b in basis.vectors)
    return LinearRepresentation(k, tuple(u), gamma, v), words


def minimize_rep(rep: LinearRepresentation) -> LinearRepresentation:
    """Minimal-rank representation of the same series (Schutzenberger reduction).

    A lumping pass shrinks automaton-derived representations cheaply; then a
    forward pass keeps span{u gamma(w)} and a backward pass keeps
    span{gamma(w) v}, both over words in length-lexicographic order.
    """
    if rep.rank == 0:
        return rep
    small, _ = lump(rep)
    fwd, _ = forward_reduce(small)
    if fwd.rank == 0:
        return fwd
    bwd, _ = forward_reduce(fwd.transpose())
    return bwd.transpose()


def canonical_form(rep: LinearRepresentation) -> LinearRepresentation:
    """Series-determined minimal representation.

    Basis = Hankel rows of the length-lex-first independent prefix words
    (found by breadth-first search from the empty word), coordinates are
    those of the Hankel rows in that basis.  Thus ``u = e_0``, row i of
    ``gamma(d)`` expresses the row of ``w_i d``, and ``v_i = f(w_i)``.
    Equal series give entrywise identical results.
    """
    m = minimize_rep(rep)
    # in a minimal representation u gamma(w) determines the Hankel row of w
    # injectively, so forward independence is Hankel-row independence
    return forward_reduce(m)[0]


def canonical_words(rep: LinearRepresentation) -> list[tuple[int, ...]]:
    return forward_reduce(minimize_rep(rep))[1]


def difference(a: LinearRepresentation, b: LinearRepresentation) -> LinearRepresentation:
    """Block-diagonal representation of f_a - f_b."""
    if a.base != b.base:
        raise RepresentationError(f"base mismatch: {a.base} vs {b.base}")
    ra, rb = a.rank, b.rank
    gamma = []
    for d in range(a.base):
        rows = [tuple(row) + (0,) * rb for row in a.gamma[d]]
        rows += [(0,) * ra + tuple(row) for row in b.gamma[d]]
        gamma.append(tuple(rows))
    return LinearRepresentation(
        a.base, a.u + b.u, tuple(gamma), a.v + tuple(-x for x in b.v)
    )


def series_equal(a: LinearRepresentation, b: LinearRepresentation) -> bool:
    """Decide f_a == f_b; difference minimization, confirmed by canonical forms."""
    verdict = minimize_rep(difference(a, b)).rank == 0
    if verdict != (canonical_form(a) == canonical_form(b)):
        raise RuntimeError("difference minimization and canonical forms disagree")
    return verdict


def first_difference(a: LinearRepresentation, b: LinearRepresentation, limit: int = 10_000) -> int | None:
    """Least n <= limit with f_a(n) != f_b(n)."""
    d = difference(a, b)
    chunk = 512
    for start in range(0, limit + 1, chunk):
        stop = min(limit + 1, start + chunk)
        for i, x in enumerate(evaluate_range(d, start, stop)):
            if x:
                return start + i
    return None


# ---------------------------------------------------------------------------
# text format


def serialize(rep: LinearRepresentation, comment: str = "") -> str:
    lines = [f"# {ln}" for ln in comment.splitlines()]
    lines.append(f"base {rep.base}")
    lines.append(f"rank {rep.rank}")
    lines.append("u: " + " ".join(map(fmt_rational, rep.u)))
    for d in range(rep.base):
        lines.append(f"gamma {d}:")
        for row in rep.gamma[d]:
            lines.append(" ".join(map(fmt_rational, row)))
    lines.append("v: " + " ".join(map(fmt_rational, rep.v)))
    return "\n".join(ln.rstrip() for ln in lines) + "\n"


def deserialize(text: str) -> LinearRepresentation:
    lines = [
        (i + 1, ln.strip()) for i, ln in enumerate(text.splitlines())
        if ln.strip() and not ln.strip().startswith("#")
    ]
    it = iter(lines)

    def expect(prefix):
        try:
            no, ln = next(it)
        except StopIteration:
            raise RepresentationError(f"unexpected end of input (expected {prefix!r})") from None
        if not ln.startswith(prefix):
            raise RepresentationError(f"line {no}: expected {prefix!r}, found {ln!r}")
        return no, ln[len(prefix):].strip()

    def nums(no, s, count):
        toks = s.split()
        if len(toks) != count:
            raise RepresentationError(f"line {no}: expected {count} entries, found {len(toks)}")
        try:
            return [parse_rational(t) for t in toks]
        except ValueError as e:
            raise RepresentationError(f"line {no}: {e}") from None

    def header_int(prefix):
        no, s = expect(prefix)
        try:
            return int(s)
        except ValueError:
            raise RepresentationError(f"line {no}: bad integer {s!r}") from None

    k = header_int("base ")
    r = header_int("rank ")
    no, s = expect("u:")
    u = nums(no, s, r)
    gamma = []
    for d in range(k):
        expect(f"gamma {d}:")
        mat = []
        for _ in range(r):
            try:
                no, ln = next(it)
            except StopIteration:
                raise RepresentationError(f"gamma {d}: too few rows") from None
            mat.append(tuple(nums(no, ln, r)))
        gamma.append(tuple(mat))
    no, s = expect("v:")
    v = nums(no, s, r)
    rest = next(it, None)
    if rest is not None:
        raise RepresentationError(f"line {rest[0]}: trailing content {rest[1]!r}")
    return LinearRepresentation(k, tuple(u), tuple(gamma), tuple(v))
