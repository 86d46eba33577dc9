from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, strategies as st

from quonlang.dsl import (
    Atom,
    Check,
    CLiteral,
    Dim,
    DPower,
    Document,
    Env,
    Eval,
    Let,
    LetBraid,
    Name,
    Par,
    Seq,
    parse,
    render,
)
from quonlang.errors import ParseError
from quonlang.qudit_core import gate, resource_state

EXAMPLES = sorted((Path(__file__).parent.parent / "quon_examples").glob("*.quon"))
F = Atom("gate", ("F",))


def test_let_and_eval():
    doc = parse("dim 2\nlet c = bspider(1,2)\neval c")
    assert doc.dim == 2
    assert doc.definitions == {"c": Atom("bspider", (1, 2))}
    assert doc.evals == [Eval(Name("c"))]


def test_scalar_check():
    doc = parse("dim 3\ncheck wspider(2,1) ; F == bspider(2,1) scalar d^(1/2)")
    (chk,) = doc.checks
    assert chk.lhs == Seq((Atom("wspider", (2, 1)), F))
    assert chk.scalar == DPower(Fraction(1, 2))


def test_braid_definition():
    doc = parse("dim 2\nlet w = braid: b1 b2' c1:1")
    assert doc.stmts[1] == LetBraid("w", ("b1", "b2'", "c1:1"))


def test_precedence_and_comments():
    doc = parse("dim 2  # qubits\neval F | G ; X\n\n# trailing\n")
    g, x = Atom("gate", ("G",)), Atom("gate", ("X",))
    assert doc.evals[0].expr == Seq((Par((F, g)), x))


@pytest.mark.parametrize(
    "text,z",
    [("0.5-1.5i", 0.5 - 1.5j), ("-2i", -2j), ("i", 1j), ("3", 3), ("1e-3+2.5e2i", 0.001 + 250j)],
)
def test_complex_literals(text, z):
    (chk,) = parse(f"dim 2\ncheck F == F scalar {text}").checks
    assert chk.scalar == CLiteral(complex(z))


@pytest.mark.parametrize(
    "text,line,col,expected",
    [
        ("dim 2\nlet = F", 2, 5, "NAME"),
        ("dim 2\ncheck F ==", 2, 11, "atom"),
        ("eval bspider(1)", 1, 15, "','"),
        ("dim 2\neval foo", 2, 6, "defined NAME"),
        ("dim 2\ndim 3", 2, 1, "eval"),
        ("dim 2\nlet F = G", 2, 5, "NAME"),
        ("dim 2\nlet w = braid: b1 q2", 2, 19, None),
    ],
)
def test_parse_errors(text, line, col, expected):
    with pytest.raises(ParseError) as info:
        parse(text)
    err = info.value
    assert (err.line, err.column) == (line, col)
    if expected:
        assert expected in err.expected


def test_duplicate_name():
    with pytest.raises(ParseError):
        parse("dim 2\nlet a = F\nlet a = G")


@pytest.mark.parametrize("path", EXAMPLES, ids=lambda p: p.name)
def test_examples_round_trip(path):
    doc = parse(path.read_text(encoding="utf-8"))
    assert parse(render(doc)) == doc
    assert render(parse(render(doc))) == render(doc)


def test_examples_present():
    assert len(EXAMPLES) >= 3


# random documents ----------------------------------------------------------------

NAMES = ("a", "b2", "cup_x")
small = st.integers(0, 4)
atoms = st.one_of(
    st.builds(lambda n: Atom("id", (n,)), small),
    st.sampled_from([Atom("cap"), Atom("cup"), Atom("bell+"), Atom("bell-")]),
    st.builds(lambda k, m, n: Atom(k, (m, n)), st.sampled_from(["bspider", "wspider"]), small, small),
    st.builds(lambda g: Atom("gate", (g,)), st.sampled_from(["F", "F2", "G", "X", "Y", "Z", "CNOT"])),
    st.builds(lambda k, n: Atom(k, (n,)), st.sampled_from(["ghz", "max"]), st.integers(1, 4)),
    st.builds(Name, st.sampled_from(NAMES)),
)
exprs = st.recursive(
    atoms,
    lambda inner: st.one_of(
        st.lists(inner, min_size=2, max_size=3).map(lambda xs: Par(tuple(xs))),
        st.lists(inner, min_size=2, max_size=3).map(lambda xs: Seq(tuple(xs))),
    ),
    max_leaves=8,
)
finite = st.floats(allow_nan=False, allow_infinity=False, width=64)
scalars = st.one_of(
    st.none(),
    st.builds(lambda p, q: DPower(Fraction(p, q)), st.integers(-6, 6), st.integers(1, 4)),
    st.builds(lambda x, y: CLiteral(complex(x, y)), finite, finite),
)
body = st.one_of(
    st.builds(Check, exprs, exprs, scalars),
    st.builds(Eval, exprs),
)


@given(st.integers(1, 9), st.lists(body, max_size=4), exprs.filter(lambda e: "'a'" not in repr(e)))
def test_random_round_trip(d, stmts, first):
    lets = (LetBraid(NAMES[1], ("b1", "c2:-1")), Let(NAMES[2], Atom("cup")), Let(NAMES[0], first))
    doc = Document((Dim(d),) + lets + tuple(stmts))
    assert parse(render(doc)) == doc


# semantics -----------------------------------------------------------------------


def test_env_names_and_atoms():
    doc = parse("dim 3\nlet cnot_pic = id(1) | bspider(1,2) ; wspider(2,1) | id(1)\nlet w = braid: b1\neval cnot_pic")
    env = Env(doc, 3)
    assert env.tensor(Name("cnot_pic")).allclose(gate(3, "CNOT"))
    assert len(env.word("w")) == 1


@pytest.mark.parametrize("d", [2, 3])
def test_resource_atoms(d):
    env = Env(parse(f"dim {d}"), d)
    assert env.tensor(Atom("ghz", (3,))).allclose(resource_state(d, "GHZ", 3))
    assert env.tensor(Atom("max", (2,))).allclose(resource_state(d, "BellMinus"))
    assert np.allclose(env.tensor(Atom("bell+")).vector, resource_state(d, "BellPlus").vector)
