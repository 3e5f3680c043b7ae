"""First-order formulas over (N, +, n -> a_n) and their compilation to automata.

Grammar (whitespace is insignificant)::

    formula := iff
    iff     := implies ('<=>' implies)*
    implies := or ('=>' implies)?
    or      := and ('|' and)*
    and     := unary ('&' unary)*
    unary   := '~' unary | quant | '(' formula ')' | atom
    quant   := ('E' | 'A') var (',' var)* ':' formula
    atom    := term rel term | Name '[' var ']' ('=' | '!=') '@' int
    term    := (var | nat) ('+' (var | nat))*
    rel     := '=' | '!=' | '<' | '<=' | '>' | '>='

Variables match ``[a-z][a-z0-9]*``; sequence names start with an upper-case
letter.  A quantifier body extends as far right as possible.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Mapping, Union

from . import automata as fa
from .automata import Dfao, TupleDfa


class FormulaError(ValueError):
    pass


# ---------------------------------------------------------------------------
# AST

Term = tuple[Union[str, int], ...]


@dataclass(frozen=True)
class Atom:
    lhs: Term
    rel: str
    rhs: Term


@dataclass(frozen=True)
class SeqAtom:
    seq: str
    index: str
    value: int
    negated: bool = False


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Iff:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Exists:
    vars: tuple[str, ...]
    body: "Formula"


@dataclass(frozen=True)
class ForAll:
    vars: tuple[str, ...]
    body: "Formula"


Formula = Union[Atom, SeqAtom, Not, And, Or, Implies, Iff, Exists, ForAll]


def free_vars(f: Formula) -> set[str]:
    if isinstance(f, Atom):
        return {t for t in f.lhs + f.rhs if isinstance(t, str)}
    if isinstance(f, SeqAtom):
        return {f.index}
    if isinstance(f, Not):
        return free_vars(f.body)
    if isinstance(f, (Exists, ForAll)):
        return free_vars(f.body) - set(f.vars)
    return free_vars(f.left) | free_vars(f.right)


# ---------------------------------------------------------------------------
# parser

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+)|(?P<name>[A-Za-z][A-Za-z0-9_]*)"
    r"|(?P<op><=>|=>|<=|>=|!=|[=<>~&|()\[\]@:,+*-]))"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    out = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise FormulaError(f"unexpected character {text[pos:].lstrip()[:1]!r} at position {pos}")
        kind = m.lastgroup
        out.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


def _is_var(tok: str) -> bool:
    return bool(re.fullmatch(r"[a-z][a-z0-9]*", tok))


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self, ahead: int = 0):
        return self.toks[min(self.i + ahead, len(self.toks) - 1)]

    def error(self, msg: str):
        pos = self.peek()[2]
        raise FormulaError(f"{msg} at position {pos}")

    def take(self, value: str | None = None, kind: str | None = None) -> str:
        k, v, _ = self.peek()
        if (value is not None and v != value) or (kind is not None and k != kind):
            want = repr(value) if value is not None else kind
            self.error(f"expected {want}, found {v!r}" if v else f"expected {want}, found end of input")
        self.i += 1
        return v

    def accept(self, value: str) -> bool:
        if self.peek()[1] == value and self.peek()[0] == "op":
            self.i += 1
            return True
        return False

    def parse(self) -> Formula:
        f = self.iff()
        if self.peek()[0] != "end":
            self.error(f"unexpected {self.peek()[1]!r}")
        return f

    def iff(self):
        f = self.implies()
        while self.accept("<=>"):
            f = Iff(f, self.implies())
        return f

    def implies(self):
        f = self.disj()
        if self.accept("=>"):
            return Implies(f, self.implies())
        return f

    def disj(self):
        f = self.conj()
        while self.accept("|"):
            f = Or(f, self.conj())
        return f

    def conj(self):
        f = self.unary()
        while self.accept("&"):
            f = And(f, self.unary())
        return f

    def unary(self):
        kind, v, _ = self.peek()
        if kind == "op" and v == "~":
            self.i += 1
            return Not(self.unary())
        if kind == "name" and v in ("E", "A") and self.peek(1)[0] == "name" and _is_var(self.peek(1)[1]):
            self.i += 1
            names = [self.var()]
            while self.accept(","):
                names.append(self.var())
            self.take(":")
            body = self.iff()
            return (Exists if v == "E" else ForAll)(tuple(names), body)
        if kind == "op" and v == "(":
            self.i += 1
            f = self.iff()
            self.take(")")
            return f
        return self.atom()

    def var(self) -> str:
        kind, v, _ = self.peek()
        if kind != "name" or not _is_var(v):
            self.error(f"expected variable, found {v!r}")
        self.i += 1
        return v

    def term(self) -> Term:
        items: list[str | int] = [self.term_item()]
        while self.accept("+"):
            items.append(self.term_item())
        if self.peek()[1] == "*":
            self.error("multiplication is not in the supported theory")
        if self.peek()[1] == "-":
            self.error("subtraction is not in the supported theory")
        return tuple(items)

    def term_item(self):
        kind, v, _ = self.peek()
        if kind == "num":
            self.i += 1
            return int(v)
        if kind == "name" and _is_var(v):
            self.i += 1
            return v
        self.error(f"expected variable or number, found {v!r}" if v else "unexpected end of input")

    def atom(self):
        kind, v, _ = self.peek()
        if kind == "name" and not _is_var(v):
            self.i += 1
            self.take("[")
            idx = self.var()
            if self.peek()[1] == "+":
                self.error("sequence index must be a single variable")
            self.take("]")
            negated = False
            if self.accept("!="):
                negated = True
            else:
                self.take("=")
            self.take("@")
            sign = -1 if self.accept("-") else 1
            val = sign * int(self.take(kind="num"))
            return SeqAtom(v, idx, val, negated)
        lhs = self.term()
        kind, rel, _ = self.peek()
        if rel not in ("=", "!=", "<", "<=", ">", ">="):
            self.error(f"expected relation, found {rel!r}" if rel else "expected relation, found end of input")
        self.i += 1
        rhs = self.term()
        return Atom(lhs, rel, rhs)


def parse_formula(text: str) -> Formula:
    """Parse formula text into an AST; raises :class:`FormulaError`."""
    return _Parser(text).parse()


# ---------------------------------------------------------------------------
# built-in sequences

THUE_MORSE = Dfao(2, (0, 1), ((0, 1), (1, 0)))
# twisted Thue-Morse, t'_0 = 1
TWISTED_THUE_MORSE = Dfao(2, (1, 0, 1), ((0, 1), (2, 1), (1, 2)))

BUILTINS: dict[str, Dfao] = {"T": THUE_MORSE, "TT": TWISTED_THUE_MORSE}


def default_env() -> dict[str, Dfao]:
    return dict(BUILTINS)


def _env_base(env: Mapping[str, Dfao], base: int | None) -> int:
    bases = {m.base for m in env.values()}
    if base is not None:
        bases.add(base)
    if len(bases) > 1:
        raise FormulaError(f"sequences use different bases: {sorted(bases)}")
    return bases.pop() if bases else 2


# ---------------------------------------------------------------------------
# compiler


class _Compiler:
    def __init__(self, env: Mapping[str, Dfao], k: int):
        self.env = env
        self.k = k
        self.fresh_ids = itertools.count()

    def fresh(self) -> str:
        # '_' never occurs in user variables
        return f"_{next(self.fresh_ids)}"

    def run(self, f: Formula, scope: Mapping[str, str]) -> TupleDfa:
        k = self.k
        if isinstance(f, Atom):
            return self.atom(f, scope)
        if isinstance(f, SeqAtom):
            try:
                m = self.env[f.seq]
            except KeyError:
                raise FormulaError(f"unbound sequence {f.seq!r}") from None
            if not fa.is_zero_stable(m):
                raise FormulaError(f"sequence {f.seq!r} changes value under leading zeros")
            a = fa.sequence_preimage(m, scope.get(f.index, f.index), f.value)
            return fa.complement(a) if f.negated else a
        if isinstance(f, Not):
            return fa.complement(self.run(f.body, scope))
        if isinstance(f, (And, Or, Implies, Iff)):
            op = {And: "and", Or: "or", Implies: "implies", Iff: "iff"}[type(f)]
            return fa.product(self.run(f.left, scope), self.run(f.right, scope), op)
        if isinstance(f, (Exists, ForAll)):
            inner = dict(scope)
            names = []
            for v in f.vars:
                inner[v] = name = self.fresh()
                names.append(name)
            a = self.run(f.body, inner)
            if isinstance(f, ForAll):
                a = fa.complement(a)
            for name in reversed(names):
                a = fa.exists(a, name)
            if isinstance(f, ForAll):
                a = fa.complement(a)
            return a
        raise TypeError(f"not a formula node: {f!r}")

    def atom(self, f: Atom, scope) -> TupleDfa:
        k = self.k
        lhs = [scope.get(t, t) if isinstance(t, str) else t for t in f.lhs]
        rhs = [scope.get(t, t) if isinstance(t, str) else t for t in f.rhs]
        lc = sum(t for t in lhs if isinstance(t, int))
        rc = sum(t for t in rhs if isinstance(t, int))
        shift = min(lc, rc)
        lhs = [t for t in lhs if isinstance(t, str)] + ([lc - shift] if lc > shift else [])
        rhs = [t for t in rhs if isinstance(t, str)] + ([rc - shift] if rc > shift else [])
        tracks = sorted({t for t in lhs + rhs if isinstance(t, str)})
        if f.rel == "=" and len(lhs) == 1 and isinstance(lhs[0], str):
            a = self.sum_into(rhs, lhs[0])
        elif f.rel == "=" and len(rhs) == 1 and isinstance(rhs[0], str):
            a = self.sum_into(lhs, rhs[0])
        elif all(len(side) == 1 and isinstance(side[0], str) for side in (lhs, rhs)):
            a = fa.comparison(k, lhs[0], f.rel, rhs[0])
        else:
            left, right = self.fresh(), self.fresh()
            a = fa.comparison(k, left, f.rel, right)
            a = fa.exists(fa.product(a, self.sum_into(lhs, left), "and"), left)
            a = fa.exists(fa.product(a, self.sum_into(rhs, right), "and"), right)
        return fa.cylindrify(a, tracks)

    def sum_into(self, terms: list, target: str) -> TupleDfa:
        """Automaton for sum(terms) = target; auxiliaries are projected away."""
        k = self.k
        const = sum(t for t in terms if isinstance(t, int))
        names = [t for t in terms if isinstance(t, str)]
        pre = None
        if const or not names:
            c = self.fresh()
            pre = fa.constant(k, c, const)
            names.insert(0, c)
        if len(names) == 1:
            a = fa.comparison(k, names[0], "=", target)
        else:
            a = None
            aux = {names[0]} if pre is not None else set()
            acc = names[0]
            for i, nxt in enumerate(names[1:], start=1):
                out = target if i == len(names) - 1 else self.fresh()
                aux.add(out)
                step = fa.addition(k, acc, nxt, out)
                if a is None:
                    a = step if pre is None else fa.product(pre, step, "and")
                else:
                    a = fa.product(a, step, "and")
                if acc in aux and acc != target:
                    a = fa.exists(a, acc)
                acc = out
            return a
        if pre is not None:
            a = fa.exists(fa.product(pre, a, "and"), names[0])
        return a


def compile_formula(
    f: Formula | str, env: Mapping[str, Dfao] | None = None, base: int | None = None
) -> TupleDfa:
    """Minimal automaton accepting the satisfying assignments of the free variables."""
    if isinstance(f, str):
        f = parse_formula(f)
    env = default_env() if env is None else env
    used = _used_sequences(f)
    missing = used - set(env)
    if missing:
        raise FormulaError(f"unbound sequence {sorted(missing)[0]!r}")
    k = _env_base({n: env[n] for n in used}, base)
    a = _Compiler(env, k).run(f, {})
    return fa.cylindrify(a, sorted(free_vars(f)))


def decide(f: Formula | str, env: Mapping[str, Dfao] | None = None, base: int | None = None) -> bool:
    """Truth value of a sentence."""
    if isinstance(f, str):
        f = parse_formula(f)
    fv = free_vars(f)
    if fv:
        raise FormulaError(f"not a sentence; free variables: {', '.join(sorted(fv))}")
    a = compile_formula(f, env, base)
    return a.initial in a.accepting


def _used_sequences(f: Formula) -> set[str]:
    if isinstance(f, SeqAtom):
        return {f.seq}
    if isinstance(f, Atom):
        return set()
    if isinstance(f, (Not, Exists, ForAll)):
        return _used_sequences(f.body)
    return _used_sequences(f.left) | _used_sequences(f.right)


def evaluate_formula(f: Formula, values: Mapping[str, int], seqs: Mapping[str, callable]) -> bool:
    """Direct evaluation of a quantifier-free formula (test oracle support).

    ``seqs`` maps sequence names to plain Python functions n -> a_n.
    """
    if isinstance(f, Atom):
        val = lambda term: sum(values[t] if isinstance(t, str) else t for t in term)
        a, b = val(f.lhs), val(f.rhs)
        return {"=": a == b, "!=": a != b, "<": a < b, "<=": a <= b, ">": a > b, ">=": a >= b}[f.rel]
    if isinstance(f, SeqAtom):
        return (seqs[f.seq](values[f.index]) == f.value) != f.negated
    if isinstance(f, Not):
        return not evaluate_formula(f.body, values, seqs)
    if isinstance(f, (Exists, ForAll)):
        raise FormulaError("direct evaluation supports quantifier-free formulas only")
    a = evaluate_formula(f.left, values, seqs)
    b = evaluate_formula(f.right, values, seqs)
    if isinstance(f, And):
        return a and b
    if isinstance(f, Or):
        return a or b
    if isinstance(f, Implies):
        return (not a) or b
    return a == b
