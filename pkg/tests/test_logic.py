import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from autonum import automata as fa
from autonum import logic, oracles, templates
from autonum.logic import And, Atom, Exists, ForAll, FormulaError, Not, SeqAtom

SEQS = {"T": oracles.thue_morse, "TT": oracles.twisted_tm}

# quantifier-free formulas, each checked against direct evaluation
FIXTURE_FORMULAS = [
    templates.R2A,
    templates.R2B,
    templates.R3C_SHIFTED,
    templates.R3D_SHIFTED,
    "x+y+3=z | x>=y+2",
    "x!=y <=> T[x]=@1",
    "~(x<=y) => TT[y]!=@0",
    "x+x+x=y & y+1<z",
    "n=x+y & x<=y & TT[x]=@1 & TT[y]=@1",
]


def test_parse_r2a_shape():
    f = logic.parse_formula(templates.R2A)
    want = And(And(And(Atom(("n",), "=", ("x", "y")), Atom(("x",), "<", ("y",))),
                   SeqAtom("T", "x", 0)), SeqAtom("T", "y", 0))
    assert f == want


def test_parse_constant_in_term():
    f = logic.parse_formula(templates.R3D_SHIFTED)
    assert f.left.left.left == Atom(("n", 1), "=", ("x", "y"))


def test_parse_quantifiers():
    assert logic.parse_formula("A x: E y: y=x+x") == ForAll(("x",), Exists(("y",), Atom(("y",), "=", ("x", "x"))))
    assert logic.parse_formula("E x,y: x<y") == Exists(("x", "y"), Atom(("x",), "<", ("y",)))


def test_parse_precedence():
    f = logic.parse_formula("~x=y & y=z | x<z => x=x")
    assert isinstance(f, logic.Implies)
    assert isinstance(f.left, logic.Or)
    assert isinstance(f.left.left, And) and isinstance(f.left.left.left, Not)


@pytest.mark.parametrize("text", [
    "x*2=y", "x-1=y", "T[x+1]=@0", "x=", "E : x=x", "(x=y", "x=y)", "T[x]=0", "x ? y",
])
def test_parse_errors(text):
    with pytest.raises(FormulaError):
        logic.parse_formula(text)


def test_free_vars():
    assert logic.free_vars(logic.parse_formula("E y: n=x+y")) == {"n", "x"}


def test_compile_r2a(r2a_dfa):
    assert r2a_dfa.tracks == ("n", "x", "y")
    assert r2a_dfa.live_state_count == 12
    assert fa.accepts(r2a_dfa, {"n": 9, "x": 3, "y": 6})
    assert not fa.accepts(r2a_dfa, {"n": 9, "x": 4, "y": 5})


def test_compile_trivial():
    a = logic.compile_formula("x=x")
    assert a.num_states == 1 and a.tracks == ("x",) and a.accepting == {0}


def test_unbound_sequence():
    with pytest.raises(FormulaError, match="Q"):
        logic.compile_formula("Q[x]=@1")


@pytest.mark.parametrize("text,want", [
    ("A x: E y: y=x+x", True),
    ("E x: x+1=x", False),
    ("E x: x<x", False),
    ("A x: x=0 | E y: y+1=x", True),
    ("A n: (E x,y: n=x+y & x<y & T[x]=@0 & T[y]=@0) => (E x,y: n=x+y & x<y & T[x]=@1 & T[y]=@1)", True),
    ("E x: T[x]=@1 & T[x]=@0", False),
    ("A x: TT[x]=@0 <=> ~TT[x]=@1", True),
])
def test_decide(text, want):
    assert logic.decide(text) is want


def test_decide_requires_sentence():
    with pytest.raises(FormulaError):
        logic.decide("x=x")


@pytest.mark.parametrize("text", FIXTURE_FORMULAS)
def test_compile_matches_direct_evaluation(text):
    f = logic.parse_formula(text)
    a = logic.compile_formula(f)
    rng = random.Random(text)
    for i in range(1000):
        v = {t: rng.randrange(2**14) for t in a.tracks}
        if i % 2 and {"n", "x", "y"} <= set(v):
            # bias towards satisfying the sum constraint
            shift = 1 if text.startswith("n+1") else 0
            v["n"] = max(0, v["x"] + v["y"] - shift)
        assert fa.accepts(a, v) == logic.evaluate_formula(f, v, SEQS), v


def test_quantified_formula_against_brute_force():
    # x is a sum of two odious numbers
    a = logic.compile_formula("E y,z: x=y+z & T[y]=@1 & T[z]=@1")
    for x in range(300):
        want = any(oracles.thue_morse(y) == 1 and oracles.thue_morse(x - y) == 1 for y in range(x + 1))
        assert fa.accepts(a, {"x": x}) == want


def test_forall_equals_not_exists_not():
    a = logic.compile_formula("A y: x<=y | T[y]=@0")
    b = logic.compile_formula("~E y: ~(x<=y | T[y]=@0)")
    assert a == b


def test_bound_renaming_invariant():
    a = logic.compile_formula("E y: x=y+y & T[y]=@1")
    b = logic.compile_formula("E w: x=w+w & T[w]=@1")
    assert a == b


def test_shadowing_is_scoped():
    # inner x is a different variable from the free x
    a = logic.compile_formula("x=1 & E x: x=2")
    assert [n for n in range(10) if fa.accepts(a, {"x": n})] == [1]


@given(st.sampled_from(["A x: E y: y=x+x", "E x: x<x", "E x: T[x]=@1 & TT[x]=@1",
                        "A x: E y: x<y & T[y]=@0"]), st.integers(1, 3))
def test_double_negation_stable(text, depth):
    base = logic.decide(text)
    wrapped = "~" * (2 * depth) + "(" + text + ")"
    assert logic.decide(wrapped) is base


def test_base_mismatch():
    env = dict(logic.default_env(), U=fa.Dfao(3, (0,), ((0, 0, 0),)))
    with pytest.raises(FormulaError):
        logic.compile_formula("T[x]=@0 & U[x]=@0", env)
