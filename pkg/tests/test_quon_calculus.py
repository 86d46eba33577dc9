import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from quonlang.errors import BasisError, NonCancellingCharges, NonNeutralWord, NotFound
from quonlang.numerics import Tensor, compare_up_to_scalar
from quonlang.qudit_core import gate
from quonlang.quon_calculus import (
    BasisSet,
    Braid,
    Charge,
    Loop,
    StringNetwork,
    StrandWord,
    basis_matrix,
    braid_matrix,
    charge_matrix,
    completeness_network,
    crossing_network,
    eval_network,
    eval_word,
    find_word,
    genus_network,
    identity_network,
    joint_check,
    parse_word,
    quon_basis,
    random_basis,
    string_fourier,
    word_operator,
)

DIMS = [2, 3, 4, 5]


def up_to_phase(a: Tensor, b: Tensor) -> bool:
    lam = compare_up_to_scalar(a, b)
    return lam is not None and abs(abs(lam) - 1) < 1e-9


@pytest.mark.parametrize("d", DIMS)
def test_z_basis_is_standard(d):
    for k in range(d):
        assert np.allclose(quon_basis(d, "Z", k).coeffs, np.eye(d)[k])


def test_x_basis_qubit():
    v = quon_basis(2, "X", 0).tensor()
    assert up_to_phase(v, Tensor(2, 1, 0, np.array([1, 1]) / math.sqrt(2)))


def test_y_basis_qubit():
    v = quon_basis(2, "Y", 0).tensor()
    assert up_to_phase(v, Tensor(2, 1, 0, np.array([1, 1j]) / math.sqrt(2)))


@pytest.mark.parametrize("d", DIMS)
@pytest.mark.parametrize("axis", ["X", "Y", "Z"])
def test_bases_orthonormal_eigen(d, axis):
    B = basis_matrix(d, axis)
    assert np.allclose(B.conj().T @ B, np.eye(d))
    D = B.conj().T @ gate(d, axis).matrix @ B
    assert np.allclose(D, np.diag(np.diag(D)))


@pytest.mark.parametrize("d", DIMS)
def test_charge_identity_and_additivity(d):
    for s in (1, 2, 3, 4):
        assert np.allclose(charge_matrix(d, s, 0).matrix, np.eye(d * d))
        for g, h in ((1, 1), (1, d - 1), (2, 3)):
            prod = charge_matrix(d, s, g).matrix @ charge_matrix(d, s, h).matrix
            assert np.allclose(prod, charge_matrix(d, s, g + h).matrix)


@pytest.mark.parametrize("d", DIMS)
@pytest.mark.parametrize("word,name", [("c1:1 c2:-1", "Z"), ("c1:1 c4:-1", "X"), ("c1:-1 c3:1", "Y")])
def test_pauli_pictures(d, word, name):
    assert up_to_phase(eval_word(parse_word(d, word)), gate(d, name))


def test_charged_word_not_neutral():
    with pytest.raises(NonNeutralWord):
        eval_word(parse_word(3, "c1:1"))


def test_braid_trivial_dimension():
    assert np.allclose(braid_matrix(1, 1).matrix, [[1]])
    assert np.allclose(string_fourier(1).matrix, [[1]])


@pytest.mark.parametrize("d", DIMS)
def test_braid_relations(d):
    eye = np.eye(d)
    b = {(i, s): braid_matrix(d, i, s).matrix for i in (1, 2, 3) for s in (1, -1)}
    for m in b.values():
        assert np.allclose(m.conj().T @ m, eye)
    for i in (1, 2, 3):
        assert np.allclose(b[(i, 1)] @ b[(i, -1)], eye)
    for i in (1, 2):
        assert np.allclose(b[(i, 1)] @ b[(i + 1, 1)] @ b[(i, 1)], b[(i + 1, 1)] @ b[(i, 1)] @ b[(i + 1, 1)])


@pytest.mark.parametrize("d", [2, 3])
@given(st.lists(st.sampled_from(["b1", "b2", "b3", "b1'", "b2'", "b3'"]), max_size=5))
def test_word_then_inverse_is_identity(d, toks):
    inv = [t[:-1] if t.endswith("'") else t + "'" for t in reversed(toks)]
    w = parse_word(d, " ".join(toks + inv))
    assert np.allclose(word_operator(w), np.eye(d * d))


def test_empty_word():
    assert np.allclose(eval_word(StrandWord(3)).matrix, np.eye(3))


@pytest.mark.parametrize("d", DIMS)
def test_find_f_and_g(d):
    g = find_word(d, gate(d, "G"), 2)
    f = find_word(d, gate(d, "F"), 4)
    assert len(g) <= 2 and len(f) <= 4
    assert up_to_phase(eval_word(g), gate(d, "G"))
    assert up_to_phase(eval_word(f), gate(d, "F"))


def test_find_identity_and_missing():
    assert len(find_word(2, Tensor.identity(2), 0)) == 0
    with pytest.raises(NotFound):
        find_word(2, gate(2, "X"), 0)


@pytest.mark.parametrize("d", DIMS)
def test_string_fourier(d):
    fs = string_fourier(d)
    assert up_to_phase(fs, gate(d, "F"))
    assert up_to_phase(fs @ fs, gate(d, "F2"))
    assert compare_up_to_scalar(fs.power(4), Tensor.identity(d)) is not None


def test_parse_word_tokens():
    w = parse_word(3, "b1 b2' c4:-1")
    assert w.gens == (Braid(1, 1), Braid(2, -1), Charge(4, 2))
    assert str(w) == "b1 b2' c4:2"
    with pytest.raises(ValueError):
        parse_word(3, "b4")


@pytest.mark.parametrize("d", DIMS)
def test_circles(d):
    assert eval_network(StringNetwork(d, loops=(Loop(),))).vector[0] == pytest.approx(math.sqrt(d))
    for j in range(1, d):
        assert eval_network(StringNetwork(d, loops=(Loop((j,)),))).vector[0] == 0


@pytest.mark.parametrize("d", DIMS)
def test_genus_circle(d):
    base = eval_network(identity_network(d)).matrix
    assert np.allclose(base, np.eye(d))
    assert np.allclose(eval_network(genus_network(d, 1)).matrix, base / math.sqrt(d))
    assert np.allclose(eval_network(genus_network(d, 2)).matrix, 0)


def test_separated_charges_refused():
    with pytest.raises(NonCancellingCharges):
        eval_network(StringNetwork(5, loops=(Loop((1, 3, 4, 2)),)))


@pytest.mark.parametrize("d", DIMS)
def test_completeness(d):
    total = sum(eval_network(completeness_network(d, j)).matrix for j in range(d)) / math.sqrt(d)
    assert np.allclose(total, np.eye(d))


@pytest.mark.parametrize("d", [2, 3])
@pytest.mark.parametrize("i", [1, 3])
def test_crossing_network_matches_braid(d, i):
    got = eval_network(crossing_network(d, i)).matrix
    assert np.allclose(got, braid_matrix(d, i).matrix)


@pytest.mark.parametrize("d", [2, 3])
@pytest.mark.parametrize("m,n", [(1, 1), (1, 2), (2, 1), (2, 2)])
def test_joint_relation(d, m, n):
    rng = np.random.default_rng(10 * d + m + n)
    for _ in range(5):
        T = Tensor.from_matrix(d, rng.normal(size=(d ** n, d ** m)) + 1j * rng.normal(size=(d ** n, d ** m)), n, m)
        rep = joint_check(d, m, n, T, random_basis(d, m, rng), random_basis(d, n, rng))
        assert rep.passed


def test_joint_identity():
    rep = joint_check(3, 1, 1, Tensor.identity(3), BasisSet.matrix_units(3, 1), BasisSet.matrix_units(3, 1))
    assert rep.deviation < 1e-9


def test_basis_duplicate_vector():
    units = BasisSet.matrix_units(2, 1).vectors
    with pytest.raises(BasisError):
        BasisSet(2, 1, (units[0],) + units[:-1])
