import cmath
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from quonlang.errors import InvalidDimension, ShapeError
from quonlang.numerics import Tensor, compare_up_to_scalar, kron_all, roots, tensor_compose, tensor_kron
from quonlang.qudit_core import gate


def test_roots_degenerate():
    rs = roots(1)
    assert rs.q == 1 and rs.zeta == 1 and abs(rs.omega - 1) < 1e-12


def test_roots_qubit():
    rs = roots(2)
    assert abs(rs.q + 1) < 1e-12
    assert abs(rs.zeta - 1j) < 1e-12
    assert abs(rs.omega - (1 + 1j) / math.sqrt(2)) < 1e-12


def test_roots_qutrit():
    rs = roots(3)
    assert abs(rs.zeta - rs.q ** 2) < 1e-12
    assert abs(rs.omega + 1j) < 1e-12


@pytest.mark.parametrize("bad", [0, -2, 2.5, "3"])
def test_roots_rejects(bad):
    with pytest.raises(InvalidDimension):
        roots(bad)


@pytest.mark.parametrize("d", range(1, 9))
def test_zeta_squares_to_q(d):
    rs = roots(d)
    assert abs(rs.zeta ** 2 - rs.q) < 1e-12
    assert abs(abs(rs.omega) - 1) < 1e-12


@given(st.integers(1, 9), st.integers(-1000, 1000))
def test_qpow_matches_power(d, k):
    rs = roots(d)
    assert abs(rs.qpow(k) - cmath.exp(2j * math.pi * k / d)) < 1e-9
    assert abs(rs.zpow(k) - rs.zeta ** (k % (2 * d))) < 1e-9


def test_identity_law():
    t = Tensor(3, 1, 2, np.arange(27) + 1j)
    assert tensor_compose(Tensor.identity(3), t) == t


def test_z_squared_qubit():
    z = gate(2, "Z")
    assert (z @ z).allclose(Tensor.identity(2))


def test_compose_mismatch():
    with pytest.raises(ShapeError):
        tensor_compose(Tensor.identity(2, 2), Tensor.identity(2, 3))


def test_kron_identities():
    assert tensor_kron(Tensor.identity(3), Tensor.identity(3, 2)) == Tensor.identity(3, 3)
    assert tensor_kron(Tensor.ket(2, 0), Tensor.ket(2, 0)) == Tensor.ket(2, 0, 0)


def test_kron_x_z_on_00():
    out = kron_all(gate(2, "X"), gate(2, "Z")) @ Tensor.ket(2, 0, 0)
    assert out.allclose(Tensor.ket(2, 1, 0))


def test_kron_dimension_mismatch():
    with pytest.raises(ShapeError):
        tensor_kron(Tensor.identity(2), Tensor.identity(3))


@given(st.integers(2, 4), st.integers(0, 2), st.integers(0, 2), st.integers(0, 2), st.integers(0, 2))
def test_kron_matches_numpy(d, oa, ia, ob, ib):
    rng = np.random.default_rng(d * 1000 + oa * 100 + ia * 10 + ob)
    a = Tensor.from_matrix(d, rng.normal(size=(d ** oa, d ** ia)), oa, ia)
    b = Tensor.from_matrix(d, rng.normal(size=(d ** ob, d ** ib)), ob, ib)
    assert np.allclose(tensor_kron(a, b).matrix, np.kron(a.matrix, b.matrix))


def test_compare_up_to_scalar():
    h = gate(2, "F")
    assert compare_up_to_scalar(h, h) == 1
    assert abs(compare_up_to_scalar(h.scale(1j), h) - 1j) < 1e-12
    assert compare_up_to_scalar(gate(2, "X"), gate(2, "Z")) is None
    with pytest.raises(ShapeError):
        compare_up_to_scalar(h, Tensor.identity(2, 2))


def test_entries_read_only():
    t = Tensor.identity(2)
    with pytest.raises(ValueError):
        t.entries[0, 0] = 5


def test_from_matrix_shape_checked():
    with pytest.raises(ShapeError):
        Tensor.from_matrix(2, np.eye(3), 1, 1)


def test_to_pairs_stable():
    assert Tensor.scalar(2, -0.0 + 1e-17j).to_pairs() == [[0.0, 0.0]]
