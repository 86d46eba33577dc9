import itertools
import math
import random
from dataclasses import replace

import numpy as np
import pytest

from quonlang import spider_engine as se
from quonlang.errors import GraphError, NoMatch, NotCompilable
from quonlang.numerics import Tensor
from quonlang.qudit_core import gate, resource_state

DIMS = [2, 3, 4, 5]


def test_single_black_identity():
    assert se.eval_tensor(se.black(3, 1, 1)).allclose(Tensor.identity(3))


@pytest.mark.parametrize("d", DIMS)
def test_cnot_exact(d):
    want = np.zeros((d * d, d * d))
    for k, j in itertools.product(range(d), repeat=2):
        want[((k + j) % d) * d + j, k * d + j] = 1
    got = se.eval_tensor(se.cnot_diagram(d)).matrix
    assert np.max(np.abs(got - want)) < 1e-12


def test_white_unit_is_ket0():
    assert se.eval_tensor(se.white(4, 0, 1)).allclose(Tensor.ket(4, 0))


def test_dangling_port_rejected():
    b = se.Builder(2, 1, 1)
    u = b.black(1, 2)
    b.wire(b.ins[0], 0, u, 0)
    b.wire(u, 0, b.outs[0], 0)
    with pytest.raises(GraphError):
        b.build()


def test_compose_arity_mismatch():
    with pytest.raises(GraphError):
        se.compose(se.black(2, 1, 2), se.black(2, 1, 1))


@pytest.mark.parametrize("d", DIMS)
def test_rule_suite(d):
    bad = [r for r in se.rule_suite([d]) if not r.passed]
    assert not bad


def test_color_change_scalar():
    w = se.white(3, 1, 2)
    site = [i for i, n in w.nodes if n.kind == "white"][0]
    after = se.apply_rule(w, "ColorChange", site)
    assert after.scalar == pytest.approx(math.sqrt(3))
    assert se.eval_tensor(after).allclose(se.eval_tensor(w))


@pytest.mark.parametrize("d", DIMS)
def test_bialgebra_gives_two_whites(d):
    lhs, rhs, site = se.hopf2(d)
    out = se.apply_rule(lhs, "Bialgebra", site)
    kinds = sorted(n.kind for _, n in out.nodes if n.kind not in ("in", "out"))
    assert kinds == ["white", "white"]
    assert se.eval_tensor(out).allclose(se.eval_tensor(rhs))


@pytest.mark.parametrize("d", DIMS)
def test_antipode_is_f2(d):
    assert se.eval_tensor(se.antipode_diagram(d)).allclose(gate(d, "F2"))


def test_no_match():
    with pytest.raises(NoMatch):
        se.apply_rule(se.black(2, 1, 1), "GenusCancel")
    with pytest.raises(NoMatch):
        se.apply_rule(se.black(2, 1, 1), "Nonsense")


# soundness inside random contexts ---------------------------------------------


def _patterns(d):
    fuse = lambda c: se.compose(
        se.tensor_product(se.single(d, se.Node(c, 1, 2)), se.identity(d)),
        se.tensor_product(se.identity(d), se.single(d, se.Node(c, 2, 1))),
    )
    ids = lambda dg, kind: tuple(i for i, n in dg.nodes if n.kind == kind)
    out = []
    for color, rule in (("black", "FuseBlack"), ("white", "FuseWhite")):
        dg = fuse(color)
        out.append((rule, dg, ids(dg, color)))
    one = se.black(d, 1, 1)
    out.append(("UnitCancel", one, ids(one, "black")[0]))
    pair = se.compose(se.black(d, 0, 1), se.white(d, 1, 0))
    out.append(("UnitCancel", pair, ids(pair, "black") + ids(pair, "white")))
    for build in (se.hopf2, se.hopf3):
        lhs, _, site = build(d)
        out.append(("Bialgebra", lhs, site))
    sq, site = se.hopf_square(d)
    out.append(("HopfLaw", sq, site))
    lhs, _, site = se.hopf1(d)
    out.append(("AntipodeLoop", lhs, site))
    w = se.white(d, 1, 2)
    out.append(("ColorChange", w, ids(w, "white")[0]))
    b = se.black(d, 2, 1)
    out.append(("ColorChange", b, ids(b, "black")[0]))
    out.append(("GenusCancel", se.with_genus(se.black(d, 1, 1), 1), None))
    return out


def _tag(diag, site):
    flat = [site] if isinstance(site, int) else list(site or ())
    nodes = tuple((i, replace(n, name=f"@{flat.index(i)}") if i in flat else n) for i, n in diag.nodes)
    return replace(diag, nodes=nodes), len(flat), isinstance(site, int)


def _find(diag, k, scalar_site):
    where = {n.name: i for i, n in diag.nodes if n.name.startswith("@")}
    site = tuple(where[f"@{j}"] for j in range(k))
    return site[0] if scalar_site else (site or None)


def _random_box(d, n, rng, name):
    m = rng.normal(size=(d ** n, d ** n)) + 1j * rng.normal(size=(d ** n, d ** n))
    return se.named_box(d, name, Tensor.from_matrix(d, m / d ** n, n, n))


def _embed(d, pattern, rng):
    extra = int(rng.integers(0, 2))
    body = se.tensor_product(pattern, se.identity(d, extra)) if rng.random() < 0.5 else se.tensor_product(se.identity(d, extra), pattern)
    layers = [body]
    if body.n_inputs:
        layers.insert(0, _random_box(d, body.n_inputs, rng, "pre"))
    if body.n_outputs:
        layers.append(_random_box(d, body.n_outputs, rng, "post"))
    return se.with_scalar(se.compose_all(*layers), complex(rng.normal(), rng.normal()))


@pytest.mark.parametrize("d", DIMS)
def test_rules_sound_in_random_contexts(d):
    rng = np.random.default_rng(d)
    for rule, pattern, site in _patterns(d):
        tagged, k, scalar_site = _tag(pattern, site)
        for _ in range(100 // len(_patterns(d)) + 1):
            ctx = _embed(d, tagged, rng)
            after = se.apply_rule(ctx, rule, _find(ctx, k, scalar_site))
            assert se.eval_tensor(ctx).max_dev(se.eval_tensor(after)) < 1e-9, rule


# normalize -----------------------------------------------------------------------


def test_normalize_chain():
    chain = se.compose_all(*[se.black(3, 1, 1)] * 3)
    nf = se.normalize(chain)
    assert not [n for _, n in nf.nodes if n.kind not in ("in", "out")]
    assert se.eval_tensor(nf).allclose(Tensor.identity(3))


def test_normalize_empty():
    empty = se.identity(2, 0)
    assert se.normalize(empty) == empty


@pytest.mark.parametrize("d", [2, 3, 4])
def test_normalize_ghz_from_copies(d):
    diag = se.with_scalar(se.compose(se.black(d, 0, 2), se.tensor_product(se.identity(d), se.black(d, 1, 2))), d ** -0.5)
    nf = se.normalize(diag)
    spiders = [n for _, n in nf.nodes if n.kind in ("black", "white")]
    assert [(n.kind, n.n_in, n.n_out) for n in spiders] == [("black", 0, 3)]
    assert se.eval_tensor(nf).allclose(resource_state(d, "GHZ", 3))


def _corpus(d):
    yield se.compose_all(se.black(d, 1, 2), se.tensor_product(se.black(d, 1, 2), se.black(d, 1, 1)), se.black(d, 3, 1))
    yield se.compose_all(se.white(d, 2, 1), se.white(d, 1, 2), se.tensor_product(se.white(d, 1, 1), se.white(d, 1, 0)))
    yield se.with_genus(se.compose(se.black(d, 0, 1), se.black(d, 1, 0)), 2)
    yield se.compose(se.cnot_diagram(d), se.cnot_diagram(d))
    yield se.tensor_product(se.compose(se.white(d, 0, 1), se.white(d, 1, 0)), se.black(d, 1, 1))


@pytest.mark.parametrize("d", [2, 3])
def test_normalize_terminates_and_is_confluent(d):
    for diag in _corpus(d):
        trace = []
        plain = se.normalize(diag, trace=trace)
        assert len(trace) <= len(diag.nodes) + diag.genus_marks
        for seed in range(3):
            other = se.normalize(diag, rng=random.Random(seed))
            assert other.signature() == plain.signature()
            assert se.eval_tensor(other).allclose(se.eval_tensor(plain))
        assert se.eval_tensor(plain).allclose(se.eval_tensor(diag))


def test_zero_propagates():
    # <0| X |0> = 0 kills the whole diagram
    zero = se.compose_all(se.white(3, 0, 1), se.named_box(3, "X", gate(3, "X")), se.white(3, 1, 0))
    assert np.allclose(se.eval_tensor(se.tensor_product(zero, se.cnot_diagram(3))).entries, 0)


# top view ------------------------------------------------------------------------


@pytest.mark.parametrize("d", [2, 3])
@pytest.mark.parametrize(
    "build,a",
    [
        (lambda d: se.cnot_diagram(d), -1),
        (lambda d: se.with_scalar(se.black(d, 0, 3), d ** -0.5), 0),
        (lambda d: se.with_scalar(se.white(d, 0, 3), 1 / d), -1),
        (lambda d: se.black(d, 1, 2), 0),
        (lambda d: se.compose(se.fbox(d), se.fbox(d)), 0),
    ],
)
def test_top_view_exponents(d, build, a):
    assert se.top_view_exponent(build(d)) == a


@pytest.mark.parametrize("d", DIMS)
def test_hopf_top_view(d):
    assert se.hopf_top_view_ratio(d) == pytest.approx(d ** -0.5)


def test_named_box_not_compilable():
    with pytest.raises(NotCompilable):
        se.compile_to_quon(se.named_box(2, "X", gate(2, "X")))
