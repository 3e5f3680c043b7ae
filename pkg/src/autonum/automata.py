"""Unweighted automata over base-k digit tuples, read most-significant digit first.

A :class:`TupleDfa` over tracks ``(x1, ..., xd)`` reads words whose letters
are d-tuples of base-k digits.  Every word denotes a tuple of naturals (the
value of each track), so the language of an automaton is determined by the
set of tuples it accepts: a word is accepted iff the tuple it spells is.
Consequently every automaton built here is closed under prepending and
removing the all-zero letter, and the empty word spells the all-zero tuple.

Letters are stored as integers.  The letter for digits ``(a1, ..., ad)`` is
``a1*k**(d-1) + ... + ad``, so numeric letter order is lexicographic order
of the digit tuples with the first track most significant.
"""

from __future__ import annotations

import itertools
import json
import re
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence


class AutomatonError(ValueError):
    """Raised on malformed automata or mismatched operands."""


def to_digits(n: int, k: int) -> list[int]:
    """Canonical msd-first base-k digits of ``n`` (``[0]`` for zero)."""
    if n < 0:
        raise ValueError(f"negative value {n}")
    if n == 0:
        return [0]
    out = []
    while n:
        n, r = divmod(n, k)
        out.append(r)
    return out[::-1]


def from_digits(digits: Iterable[int], k: int) -> int:
    n = 0
    for d in digits:
        n = n * k + d
    return n


def letter_digits(k: int, d: int) -> list[tuple[int, ...]]:
    """All d-tuples of base-k digits, indexed by letter number."""
    return list(itertools.product(range(k), repeat=d))


def letter_index(digits: Sequence[int], k: int) -> int:
    i = 0
    for a in digits:
        i = i * k + a
    return i


# ---------------------------------------------------------------------------
# DFAO


@dataclass(frozen=True)
class Dfao:
    """Deterministic finite automaton with output; state 0 is initial."""

    base: int
    outputs: tuple[int, ...]
    delta: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.base < 2:
            raise AutomatonError("base must be at least 2")
        if len(self.outputs) != len(self.delta) or not self.delta:
            raise AutomatonError("outputs and transitions disagree in size")
        n = len(self.delta)
        for q, row in enumerate(self.delta):
            if len(row) != self.base or any(not 0 <= p < n for p in row):
                raise AutomatonError(f"state {q} has a malformed transition row")

    @property
    def num_states(self) -> int:
        return len(self.delta)

    def run(self, digits: Iterable[int]) -> int:
        q = 0
        for a in digits:
            q = self.delta[q][a]
        return q

    def output_values(self) -> list[int]:
        return sorted(set(self.outputs))


def dfao_value(m: Dfao, n: int) -> int:
    """The n'th term of the sequence computed by ``m``."""
    return m.outputs[m.run(to_digits(n, m.base))]


_HEADER = re.compile(r"^msd_(\d+)$")
_STATE = re.compile(r"^(\d+)\s+(-?\d+)$")
_ARROW = re.compile(r"^(\d+)\s*->\s*(\d+)$")


def parse_dfao(text: str) -> Dfao:
    """Parse a DFAO in the Walnut word-automaton text format.

    The first non-blank line is ``msd_k``.  Each state block is a line
    ``state output`` followed by one ``digit -> target`` line per digit.
    The first block is the initial state.  States must be numbered
    0, 1, 2, ... in order of appearance.
    """
    lines = [(i + 1, ln.strip()) for i, ln in enumerate(text.splitlines())]
    lines = [(i, ln) for i, ln in lines if ln]
    if not lines:
        raise AutomatonError("empty automaton file")
    lineno, head = lines[0]
    m = _HEADER.match(head)
    if not m:
        raise AutomatonError(f"line {lineno}: unknown header {head!r} (expected msd_k)")
    k = int(m.group(1))
    if k < 2:
        raise AutomatonError(f"line {lineno}: base must be at least 2")

    blocks: list[tuple[int, int, int, dict[int, tuple[int, int]]]] = []
    for lineno, ln in lines[1:]:
        if (m := _STATE.match(ln)):
            q, out = int(m.group(1)), int(m.group(2))
            if q in {b[0] for b in blocks}:
                raise AutomatonError(f"line {lineno}: duplicate state {q}")
            if q != len(blocks):
                raise AutomatonError(f"line {lineno}: state {q} out of order (expected {len(blocks)})")
            blocks.append((q, out, lineno, {}))
        elif (m := _ARROW.match(ln)):
            if not blocks:
                raise AutomatonError(f"line {lineno}: transition before any state")
            a, p = int(m.group(1)), int(m.group(2))
            if a >= k:
                raise AutomatonError(f"line {lineno}: digit {a} not below base {k}")
            arrows = blocks[-1][3]
            if a in arrows:
                raise AutomatonError(f"line {lineno}: duplicate transition on digit {a}")
            arrows[a] = (p, lineno)
        else:
            raise AutomatonError(f"line {lineno}: syntax error: {ln!r}")

    n = len(blocks)
    if n == 0:
        raise AutomatonError("no states declared")
    delta = []
    for q, _out, lineno, arrows in blocks:
        missing = [a for a in range(k) if a not in arrows]
        if missing:
            raise AutomatonError(f"line {lineno}: state {q} has no transition on digit {missing[0]}")
        row = []
        for a in range(k):
            p, ln = arrows[a]
            if p >= n:
                raise AutomatonError(f"line {ln}: transition to undeclared state {p}")
            row.append(p)
        delta.append(tuple(row))
    return Dfao(k, tuple(b[1] for b in blocks), tuple(delta))


def format_dfao(m: Dfao) -> str:
    """Inverse of :func:`parse_dfao`."""
    blocks = []
    for q, row in enumerate(m.delta):
        lines = [f"{q} {m.outputs[q]}"] + [f"{a} -> {p}" for a, p in enumerate(row)]
        blocks.append("\n".join(lines))
    return f"msd_{m.base}\n" + "\n\n".join(blocks) + "\n"


def normalize_dfao(m: Dfao) -> Dfao:
    """Drop unreachable states and renumber in breadth-first order."""
    order = {0: 0}
    queue = deque([0])
    while queue:
        q = queue.popleft()
        for p in m.delta[q]:
            if p not in order:
                order[p] = len(order)
                queue.append(p)
    inv = sorted(order, key=order.get)
    return Dfao(
        m.base,
        tuple(m.outputs[q] for q in inv),
        tuple(tuple(order[p] for p in m.delta[q]) for q in inv),
    )


def is_zero_stable(m: Dfao) -> bool:
    """True iff prepending a zero digit never changes the output."""
    # pair-state search: (state read on w, state read on 0w) must agree on output
    start = (0, m.delta[0][0])
    seen = {start}
    queue = deque([start])
    while queue:
        p, q = queue.popleft()
        if m.outputs[p] != m.outputs[q]:
            return False
        for a in range(m.base):
            nxt = (m.delta[p][a], m.delta[q][a])
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return True


# ---------------------------------------------------------------------------
# tuple automata


@dataclass(frozen=True)
class TupleDfa:
    """Complete DFA over d-tuples of base-k digits.

    ``delta[q][letter]`` is the successor state.  Tracks are kept sorted by
    name.  Instances are immutable; every operation returns a new one.
    """

    base: int
    tracks: tuple[str, ...]
    initial: int
    accepting: frozenset
    delta: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if list(self.tracks) != sorted(set(self.tracks)):
            raise AutomatonError(f"tracks must be sorted and distinct: {self.tracks}")
        n = len(self.delta)
        width = self.base ** len(self.tracks)
        if not 0 <= self.initial < n:
            raise AutomatonError("initial state out of range")
        for row in self.delta:
            if len(row) != width:
                raise AutomatonError("transition table is not complete")

    @property
    def num_states(self) -> int:
        return len(self.delta)

    @property
    def alphabet_size(self) -> int:
        return self.base ** len(self.tracks)

    def dead_states(self) -> set[int]:
        """States from which no accepting state is reachable."""
        rev: list[set[int]] = [set() for _ in self.delta]
        for q, row in enumerate(self.delta):
            for p in row:
                rev[p].add(q)
        alive = set(self.accepting)
        queue = deque(alive)
        while queue:
            p = queue.popleft()
            for q in rev[p]:
                if q not in alive:
                    alive.add(q)
                    queue.append(q)
        return set(range(self.num_states)) - alive

    @property
    def live_state_count(self) -> int:
        """State count with the dead sink omitted (at least one state)."""
        return max(1, self.num_states - len(self.dead_states()))

    def run(self, word: Iterable[int]) -> int:
        q = self.initial
        for a in word:
            q = self.delta[q][a]
        return q


def encode(values: Mapping[str, int], tracks: Sequence[str], k: int, pad: int = 0) -> list[int]:
    """Letters spelling ``values`` on ``tracks``, zero-padded to a common length."""
    missing = [t for t in tracks if t not in values]
    if missing:
        raise AutomatonError(f"no value for track(s) {', '.join(missing)}")
    digs = [to_digits(values[t], k) for t in tracks]
    length = max((len(d) for d in digs), default=0) + pad
    digs = [[0] * (length - len(d)) + d for d in digs]
    return [letter_index(col, k) for col in zip(*digs)] if tracks else [0] * length


def accepts(a: TupleDfa, values: Mapping[str, int], pad: int = 0) -> bool:
    """Membership of a tuple; ``pad`` extra leading zero letters are prepended."""
    return a.run(encode(values, a.tracks, a.base, pad)) in a.accepting


def _bfs_build(start, successors, is_accepting, width):
    """Generic reachable-state construction; states are numbered in BFS order."""
    index = {start: 0}
    order = [start]
    delta = []
    i = 0
    while i < len(order):
        s = order[i]
        i += 1
        row = []
        for letter in range(width):
            t = successors(s, letter)
            j = index.get(t)
            if j is None:
                j = index[t] = len(order)
                order.append(t)
            row.append(j)
        delta.append(tuple(row))
    accepting = frozenset(j for j, s in enumerate(order) if is_accepting(s))
    return delta, accepting


def cylindrify(a: TupleDfa, tracks: Sequence[str]) -> TupleDfa:
    """Re-express ``a`` over a sorted superset of its tracks."""
    tracks = tuple(sorted(set(tracks)))
    if tracks == a.tracks:
        return a
    if not set(a.tracks) <= set(tracks):
        raise AutomatonError(f"cannot drop tracks {set(a.tracks) - set(tracks)} by cylindrification")
    return rename(a, {t: t for t in a.tracks}, tracks)


def rename(a: TupleDfa, mapping: Mapping[str, str], tracks: Sequence[str] | None = None) -> TupleDfa:
    """Rename tracks; several tracks may map to one name (their digits must agree).

    The result lives on ``tracks`` (default: the sorted image of ``mapping``).
    Identified tracks are forced equal because each new letter is mapped to
    the old letter by copying digits.
    """
    image = sorted(set(mapping[t] for t in a.tracks))
    tracks = tuple(sorted(set(tracks))) if tracks is not None else tuple(image)
    if not set(image) <= set(tracks):
        raise AutomatonError("renaming target outside the requested tracks")
    k = a.base
    pos = {t: i for i, t in enumerate(tracks)}
    src = [pos[mapping[t]] for t in a.tracks]
    old_of_new = [
        letter_index([digs[i] for i in src], k)
        for digs in letter_digits(k, len(tracks))
    ]
    delta = tuple(tuple(row[x] for x in old_of_new) for row in a.delta)
    return minimize_dfa(TupleDfa(k, tracks, a.initial, a.accepting, delta))


def product(a: TupleDfa, b: TupleDfa, op: str) -> TupleDfa:
    """Boolean combination of two automata; ``op`` in and/or/implies/iff/xor."""
    if a.base != b.base:
        raise AutomatonError(f"base mismatch: {a.base} vs {b.base}")
    try:
        fn = _CONNECTIVES[op]
    except KeyError:
        raise AutomatonError(f"unknown connective {op!r}") from None
    tracks = tuple(sorted(set(a.tracks) | set(b.tracks)))
    a, b = cylindrify(a, tracks), cylindrify(b, tracks)
    da, db = a.delta, b.delta
    acc_a, acc_b = a.accepting, b.accepting
    delta, accepting = _bfs_build(
        (a.initial, b.initial),
        lambda s, x: (da[s[0]][x], db[s[1]][x]),
        lambda s: fn(s[0] in acc_a, s[1] in acc_b),
        a.base ** len(tracks),
    )
    return minimize_dfa(TupleDfa(a.base, tracks, 0, accepting, tuple(delta)))


_CONNECTIVES = {
    "and": lambda p, q: p and q,
    "or": lambda p, q: p or q,
    "implies": lambda p, q: (not p) or q,
    "iff": lambda p, q: p == q,
    "xor": lambda p, q: p != q,
}


def complement(a: TupleDfa) -> TupleDfa:
    # Every word spells a valid tuple, so flipping acceptance is already
    # padding-closed; no intersection with a validity language is needed.
    accepting = frozenset(range(a.num_states)) - a.accepting
    return minimize_dfa(TupleDfa(a.base, a.tracks, a.initial, accepting, a.delta))


@dataclass(frozen=True)
class TupleNfa:
    base: int
    tracks: tuple[str, ...]
    initial: frozenset
    accepting: frozenset
    delta: tuple[tuple[frozenset, ...], ...]

    def accepts_word(self, word: Iterable[int]) -> bool:
        cur = set(self.initial)
        for x in word:
            cur = set().union(*(self.delta[q][x] for q in cur)) if cur else set()
        return bool(cur & self.accepting)


def project(a: TupleDfa, var: str) -> TupleNfa:
    """Existentially quantify ``var``; the witness may be longer than the word.

    Longer witnesses correspond to leading letters that are zero on every
    remaining track, so the initial set is closed under those letters.
    """
    if var not in a.tracks:
        raise AutomatonError(f"unknown track {var!r}")
    k = a.base
    i = a.tracks.index(var)
    tracks = a.tracks[:i] + a.tracks[i + 1:]
    letters = letter_digits(k, len(a.tracks))
    groups: list[list[int]] = [[] for _ in range(k ** len(tracks))]
    for x, digs in enumerate(letters):
        groups[letter_index(digs[:i] + digs[i + 1:], k)].append(x)
    delta = tuple(
        tuple(frozenset(row[x] for x in g) for g in groups) for row in a.delta
    )
    init = {a.initial}
    queue = deque(init)
    while queue:
        q = queue.popleft()
        for p in delta[q][0]:
            if p not in init:
                init.add(p)
                queue.append(p)
    return TupleNfa(k, tracks, frozenset(init), a.accepting, delta)


def determinize(n: TupleNfa) -> TupleDfa:
    """Subset construction, followed by minimization."""
    nd, acc = n.delta, n.accepting

    def step(s, x):
        out = set()
        for q in s:
            out |= nd[q][x]
        return frozenset(out)

    delta, accepting = _bfs_build(
        n.initial, step, lambda s: bool(s & acc), n.base ** len(n.tracks)
    )
    return minimize_dfa(TupleDfa(n.base, n.tracks, 0, accepting, tuple(delta)))


def minimize_dfa(a: TupleDfa) -> TupleDfa:
    """Minimal complete DFA, states numbered by BFS with letters in order.

    Moore partition refinement on the reachable part, then canonical
    renumbering; equal languages give identical objects.
    """
    # reachable states
    seen = {a.initial}
    order = [a.initial]
    i = 0
    while i < len(order):
        for p in a.delta[order[i]]:
            if p not in seen:
                seen.add(p)
                order.append(p)
        i += 1
    cls = {q: int(q in a.accepting) for q in order}
    count = len(set(cls.values()))
    while True:
        sigs: dict = {}
        new = {}
        for q in order:
            row = a.delta[q]
            sig = (cls[q], tuple(cls[p] for p in row))
            new[q] = sigs.setdefault(sig, len(sigs))
        cls = new
        if len(sigs) == count:
            break
        count = len(sigs)

    rep = {}
    for q in order:
        rep.setdefault(cls[q], q)
    delta, accepting = _bfs_build(
        cls[a.initial],
        lambda c, x: cls[a.delta[rep[c]][x]],
        lambda c: rep[c] in a.accepting,
        a.alphabet_size,
    )
    return TupleDfa(a.base, a.tracks, 0, accepting, tuple(delta))


def exists(a: TupleDfa, var: str) -> TupleDfa:
    if var not in a.tracks:
        return a
    return determinize(project(a, var))


def same_language(a: TupleDfa, b: TupleDfa) -> bool:
    tracks = tuple(sorted(set(a.tracks) | set(b.tracks)))
    return minimize_dfa(cylindrify(a, tracks)) == minimize_dfa(cylindrify(b, tracks))


# ---------------------------------------------------------------------------
# primitive relations


def universal(k: int, tracks: Sequence[str] = ()) -> TupleDfa:
    tracks = tuple(sorted(tracks))
    return TupleDfa(k, tracks, 0, frozenset({0}), ((0,) * k ** len(tracks),))


def empty(k: int, tracks: Sequence[str] = ()) -> TupleDfa:
    tracks = tuple(sorted(tracks))
    return TupleDfa(k, tracks, 0, frozenset(), ((0,) * k ** len(tracks),))


def _from_table(k, names, start, step, accept) -> TupleDfa:
    """Build a DFA on placeholder tracks ``names`` (any order), then sort them."""
    placeholders = [f"#{i}" for i in range(len(names))]
    letters = letter_digits(k, len(names))
    delta, accepting = _bfs_build(
        start, lambda s, x: step(s, letters[x]), accept, len(letters)
    )
    a = TupleDfa(k, tuple(placeholders), 0, accepting, tuple(delta))
    return rename(a, dict(zip(placeholders, names)))


def addition(k: int, x: str, y: str, z: str) -> TupleDfa:
    """x + y = z, msd-first.

    The state is the deficit d = val(x-prefix) + val(y-prefix) - val(z-prefix).
    Reading the remaining m digits changes the final deficit by
    k**m * d + (x_suffix + y_suffix - z_suffix), where the bracket lies in
    [-(k**m - 1), 2*(k**m - 1)].  So d >= 1 can never return to zero and
    d <= -2 cannot either; live deficits are 0 and -1, anything else is dead.
    """
    def step(d, digs):
        if d is None:
            return None
        a, b, c = digs
        e = k * d + a + b - c
        return e if e in (0, -1) else None

    return _from_table(k, [x, y, z], 0, step, lambda d: d == 0)


def comparison(k: int, x: str, rel: str, y: str) -> TupleDfa:
    """x rel y for rel in = != < <= > >=; states undecided / x<y / x>y."""
    accept = {
        "=": {"eq"}, "!=": {"lt", "gt"}, "<": {"lt"},
        "<=": {"eq", "lt"}, ">": {"gt"}, ">=": {"eq", "gt"},
    }[rel]

    def step(s, digs):
        if s != "eq":
            return s
        a, b = digs
        return "eq" if a == b else ("lt" if a < b else "gt")

    if x == y:
        return universal(k, [x]) if "eq" in accept else empty(k, [x])
    return _from_table(k, [x, y], "eq", step, lambda s: s in accept)


def constant(k: int, x: str, c: int) -> TupleDfa:
    """Accepts exactly the zero-padded representations of ``c`` on track x."""
    def step(v, digs):
        if v is None:
            return None
        w = v * k + digs[0]
        return w if w <= c else None

    return _from_table(k, [x], 0, step, lambda v: v == c)


def sequence_preimage(m: Dfao, x: str, value: int) -> TupleDfa:
    """Single-track DFA accepting x iff the DFAO outputs ``value`` at x."""
    delta = tuple(tuple(row) for row in m.delta)
    acc = frozenset(q for q, o in enumerate(m.outputs) if o == value)
    return minimize_dfa(TupleDfa(m.base, (x,), 0, acc, delta))


# ---------------------------------------------------------------------------
# serialization and export


def dfa_to_json(a: TupleDfa) -> str:
    return json.dumps(
        {
            "base": a.base,
            "tracks": list(a.tracks),
            "initial": a.initial,
            "accepting": sorted(a.accepting),
            "transitions": [list(r) for r in a.delta],
        }
    )


def dfa_from_json(text: str) -> TupleDfa:
    try:
        d = json.loads(text)
        return TupleDfa(
            int(d["base"]),
            tuple(d["tracks"]),
            int(d["initial"]),
            frozenset(d["accepting"]),
            tuple(tuple(r) for r in d["transitions"]),
        )
    except (KeyError, TypeError, json.JSONDecodeError) as e:
        raise AutomatonError(f"malformed automaton file: {e}") from None


def to_dot(a: TupleDfa | Dfao, name: str = "A") -> str:
    """GraphViz source.  DFAO states are labelled ``state/output``."""
    lines = [f'digraph "{name}" {{', "  rankdir=LR;", '  node [shape=circle];',
             '  __start [shape=point, label=""];']
    if isinstance(a, Dfao):
        for q, o in enumerate(a.outputs):
            lines.append(f'  {q} [label="{q}/{o}"];')
        lines.append("  __start -> 0;")
        edges: dict = {}
        for q, row in enumerate(a.delta):
            for d, p in enumerate(row):
                edges.setdefault((q, p), []).append(str(d))
    else:
        dead = a.dead_states()
        for q in range(a.num_states):
            shape = "doublecircle" if q in a.accepting else "circle"
            lines.append(f'  {q} [label="{q}", shape={shape}];')
        lines.append(f"  __start -> {a.initial};")
        letters = letter_digits(a.base, len(a.tracks))
        edges = {}
        for q, row in enumerate(a.delta):
            for x, p in enumerate(row):
                if p in dead and q not in dead and len(dead) < a.num_states:
                    continue
                label = ",".join(map(str, letters[x])) if letters[x] else "()"
                edges.setdefault((q, p), []).append(f"[{label}]")
    for (q, p), labels in edges.items():
        lines.append(f'  {q} -> {p} [label="{" ".join(labels)}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
