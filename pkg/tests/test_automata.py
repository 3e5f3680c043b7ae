import random
import re

import pytest
from hypothesis import given
from hypothesis import strategies as st

from autonum import automata as fa
from autonum import logic, reproduce
from autonum.automata import AutomatonError

TT_TEXT = reproduce.data_text("TT.txt")


def fixtures():
    return {
        "add": fa.addition(2, "x", "y", "z"),
        "lt": fa.comparison(2, "x", "<", "y"),
        "ge": fa.comparison(2, "x", ">=", "y"),
        "c13": fa.constant(2, "x", 13),
        "even": fa.sequence_preimage(logic.THUE_MORSE, "x", 0),
        "tw1": fa.sequence_preimage(logic.TWISTED_THUE_MORSE, "x", 1),
        "add3": fa.addition(3, "x", "y", "z"),
    }


def rand_values(a, rng, hi=2**12):
    return {t: rng.randrange(hi) for t in a.tracks}


def truth(name, v):
    return {
        "add": lambda: v["x"] + v["y"] == v["z"],
        "lt": lambda: v["x"] < v["y"],
        "ge": lambda: v["x"] >= v["y"],
        "c13": lambda: v["x"] == 13,
        "even": lambda: bin(v["x"]).count("1") % 2 == 0,
        "tw1": lambda: v["x"] > 0 and bin(v["x"])[2:].count("0") % 2 == 1,
        "add3": lambda: v["x"] + v["y"] == v["z"],
    }[name]()


# --- representations -------------------------------------------------------

def test_digits_roundtrip():
    assert fa.to_digits(0, 2) == [0]
    assert fa.to_digits(6, 2) == [1, 1, 0]
    for k in (2, 3, 10):
        for n in range(500):
            assert fa.from_digits(fa.to_digits(n, k), k) == n


def test_letter_order_is_lexicographic_first_track_major():
    letters = fa.letter_digits(2, 2)
    assert letters == [(0, 0), (0, 1), (1, 0), (1, 1)]
    assert all(fa.letter_index(d, 3) == i for i, d in enumerate(fa.letter_digits(3, 3)))


# --- DFAO ------------------------------------------------------------------

def test_parse_tt_file():
    m = fa.parse_dfao(TT_TEXT)
    assert m.outputs == (1, 0, 1)
    assert m.delta == ((0, 1), (2, 1), (1, 2))
    assert fa.format_dfao(m) == TT_TEXT


def test_parse_one_state():
    m = fa.parse_dfao("msd_2\n0 1\n0 -> 0\n1 -> 0\n")
    assert [fa.dfao_value(m, n) for n in range(8)] == [1] * 8


def test_parse_missing_transition_names_state():
    text = "msd_2\n0 0\n0 -> 1\n1 -> 0\n\n1 1\n0 -> 1\n"
    with pytest.raises(AutomatonError, match="state 1"):
        fa.parse_dfao(text)


@pytest.mark.parametrize("text", ["", "lsd_2\n0 0\n0 -> 0\n1 -> 0\n", "msd_2\n0 0\n0 -> 5\n1 -> 0\n"])
def test_parse_rejects(text):
    with pytest.raises(AutomatonError):
        fa.parse_dfao(text)


@pytest.mark.parametrize("n,out", [(0, 1), (1, 0), (5, 1)])
def test_tt_values(n, out):
    assert fa.dfao_value(logic.TWISTED_THUE_MORSE, n) == out


def test_thue_morse_dfao_is_popcount_parity():
    assert all(fa.dfao_value(logic.THUE_MORSE, n) == bin(n).count("1") % 2 for n in range(2**16))


def test_normalize_drops_unreachable():
    m = fa.Dfao(2, (0, 1, 0), ((0, 0), (1, 1), (2, 0)))
    n = fa.normalize_dfao(m)
    assert n.num_states == 1


def test_zero_stability():
    assert fa.is_zero_stable(logic.THUE_MORSE)
    assert fa.is_zero_stable(logic.TWISTED_THUE_MORSE)
    # leading zero moves to an output-changing state
    assert not fa.is_zero_stable(fa.Dfao(2, (0, 1), ((1, 1), (1, 1))))


# --- products, complement --------------------------------------------------

def test_product_examples():
    add = fa.addition(2, "x", "y", "n")
    lt = fa.comparison(2, "x", "<", "y")
    both = fa.product(add, lt, "and")
    assert fa.accepts(both, {"x": 1, "y": 2, "n": 3})
    assert not fa.accepts(both, {"x": 2, "y": 1, "n": 3})
    for a in fixtures().values():
        assert fa.same_language(fa.product(a, a, "and"), a)
        nothing = fa.product(a, fa.complement(a), "and")
        assert nothing.accepting == frozenset()


def test_complement_examples(r2a_dfa):
    for a in fixtures().values():
        assert fa.same_language(fa.complement(fa.complement(a)), a)
    assert not fa.complement(fa.universal(2, ("x",))).accepting
    assert not fa.accepts(fa.complement(r2a_dfa), {"x": 0, "y": 3, "n": 3})


def test_de_morgan_on_samples():
    rng = random.Random(5)
    a = fa.comparison(2, "x", "<", "y")
    b = fa.sequence_preimage(logic.THUE_MORSE, "x", 1)
    lhs = fa.complement(fa.product(a, b, "and"))
    rhs = fa.product(fa.complement(a), fa.complement(b), "or")
    assert fa.same_language(lhs, rhs)
    for _ in range(300):
        v = {"x": rng.randrange(4096), "y": rng.randrange(4096)}
        assert fa.accepts(lhs, v) == fa.accepts(rhs, v)


def test_connectives_against_truth_tables():
    rng = random.Random(9)
    a, b = fa.comparison(2, "x", "<", "y"), fa.sequence_preimage(logic.THUE_MORSE, "y", 0)
    ops = {"and": lambda p, q: p and q, "or": lambda p, q: p or q, "implies": lambda p, q: (not p) or q,
           "iff": lambda p, q: p == q, "xor": lambda p, q: p != q}
    for op, fn in ops.items():
        c = fa.product(a, b, op)
        for _ in range(200):
            v = {"x": rng.randrange(1000), "y": rng.randrange(1000)}
            assert fa.accepts(c, v) == fn(fa.accepts(a, v), fa.accepts(b, v))


# --- acceptance, padding ---------------------------------------------------

def test_accepts_examples(r2a_dfa):
    add = fa.addition(2, "x", "y", "z")
    assert fa.accepts(add, {"x": 1, "y": 1, "z": 2})
    assert not fa.accepts(add, {"x": 1, "y": 1, "z": 3})
    assert fa.accepts(r2a_dfa, {"x": 3, "y": 6, "n": 9})


@pytest.mark.parametrize("name", sorted(fixtures()))
def test_fixture_semantics(name):
    a = fixtures()[name]
    rng = random.Random(name)
    for _ in range(1000):
        v = rand_values(a, rng)
        if name.startswith("add") and rng.random() < 0.5:
            v["z"] = v["x"] + v["y"]
        if name == "c13" and rng.random() < 0.2:
            v["x"] = 13
        assert fa.accepts(a, v) == truth(name, v), v


@given(st.sampled_from(sorted(fixtures())), st.integers(0, 2**30), st.integers(0, 2**30),
       st.integers(0, 2**30), st.sampled_from([1, 2, 5]))
def test_padding_invariance(name, x, y, z, j):
    a = fixtures()[name]
    v = {"x": x, "y": y, "z": z}
    v = {t: v[t] for t in a.tracks}
    assert fa.accepts(a, v, pad=j) == fa.accepts(a, v)


def test_padding_invariance_compiled(r2a_dfa):
    rng = random.Random(1)
    for _ in range(300):
        v = rand_values(r2a_dfa, rng, 600)
        v["n"] = v["x"] + v["y"] if rng.random() < 0.7 else v["n"]
        base = fa.accepts(r2a_dfa, v)
        assert all(fa.accepts(r2a_dfa, v, pad=j) == base for j in (1, 2, 5))


# --- projection, determinization, minimization -----------------------------

def test_determinize_matches_nfa_simulation():
    rng = random.Random(3)
    a = fa.product(fa.addition(2, "x", "y", "z"), fa.sequence_preimage(logic.THUE_MORSE, "y", 1), "and")
    nfa = fa.project(a, "y")
    dfa = fa.determinize(nfa)
    for _ in range(1000):
        word = [rng.randrange(4) for _ in range(rng.randrange(12))]
        assert (dfa.run(word) in dfa.accepting) == nfa.accepts_word(word)


def test_exists_allows_longer_witness():
    # E y: x+y=z projects to x<=z; witness y may need the full length of z
    a = fa.exists(fa.addition(2, "x", "y", "z"), "y")
    assert fa.same_language(a, fa.comparison(2, "x", "<=", "z"))
    # E y: y=x+x with x alone: y needs one more digit than x
    b = fa.exists(fa.rename(fa.addition(2, "x", "w", "y"), {"w": "x", "x": "x", "y": "y"}, ("x", "y")), "y")
    assert fa.same_language(b, fa.universal(2, ("x",)))


def test_minimize_language_and_fixpoint():
    rng = random.Random(4)
    a = fa.product(fa.comparison(2, "x", "<", "y"), fa.addition(2, "x", "y", "z"), "or")
    unmin = fa.TupleDfa(a.base, a.tracks, a.initial, a.accepting, a.delta)
    m = fa.minimize_dfa(unmin)
    assert fa.minimize_dfa(m) == m
    for _ in range(1000):
        v = rand_values(a, rng)
        assert fa.accepts(m, v) == fa.accepts(unmin, v)


def test_minimize_empty_language():
    e = fa.minimize_dfa(fa.empty(2, ("x", "y")))
    assert e.num_states == 1 and not e.accepting


def test_r2a_has_12_live_states(r2a_dfa):
    assert r2a_dfa.live_state_count == 12
    assert r2a_dfa.num_states == 13  # plus the dead sink


def test_rename_identifies_tracks():
    a = fa.rename(fa.comparison(2, "x", "<", "y"), {"x": "x", "y": "x"}, ("x",))
    assert a.tracks == ("x",) and not a.accepting
    b = fa.rename(fa.comparison(2, "x", "<=", "y"), {"x": "x", "y": "x"}, ("x",))
    assert fa.same_language(b, fa.universal(2, ("x",)))


# --- serialization, DOT ----------------------------------------------------

def test_json_roundtrip():
    for a in fixtures().values():
        assert fa.dfa_from_json(fa.dfa_to_json(a)) == a
    with pytest.raises(AutomatonError):
        fa.dfa_from_json('{"base": 2}')


_DOT_LINE = re.compile(r'^\s*(rankdir=LR;|node \[[^\]]*\];|\w+ \[[^\]]*\];|\w+ -> \w+( \[label="[^"]*"\])?;)$')


def check_dot(text):
    lines = text.strip().splitlines()
    assert lines[0].startswith("digraph ") and lines[0].endswith("{")
    assert lines[-1] == "}"
    assert all(_DOT_LINE.match(ln) for ln in lines[1:-1]), [ln for ln in lines[1:-1] if not _DOT_LINE.match(ln)]
    return lines


def test_dot_tt():
    text = fa.to_dot(logic.TWISTED_THUE_MORSE, "TT")
    check_dot(text)
    for label in ("0/1", "1/0", "2/1"):
        assert f'label="{label}"' in text


def test_dot_empty_language():
    lines = check_dot(fa.to_dot(fa.minimize_dfa(fa.empty(2, ("x",)))))
    nodes = [ln for ln in lines if re.match(r"^\s*\d+ \[", ln)]
    assert len(nodes) == 1


def test_dot_compiled(r2a_dfa):
    check_dot(fa.to_dot(r2a_dfa, "r2a"))
