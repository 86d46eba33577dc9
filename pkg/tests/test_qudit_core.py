import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from quonlang.errors import CapExceeded, ShapeError
from quonlang.numerics import Tensor, roots
from quonlang.qudit_core import (
    TELEPORT_CORRECTION,
    SpiderSpec,
    calibrate_teleport,
    clifford_order,
    expected_clifford_order,
    gate,
    random_state,
    resource_state,
    spider,
    teleport_run,
)


def test_z_qutrit():
    q = roots(3).q
    assert np.allclose(gate(3, "Z").matrix, np.diag([1, q, q * q]))


def test_x_qubit():
    assert np.allclose(gate(2, "X").matrix, [[0, 1], [1, 0]])


def test_cnot_qubit():
    c = gate(2, "CNOT").matrix
    images = {0: 0, 1: 3, 2: 2, 3: 1}  # |00>,|01>,|10>,|11> with control second
    for src, dst in images.items():
        assert c[dst, src] == 1


@pytest.mark.parametrize("d", [2, 3, 4, 5, 6])
def test_gates_unitary(d):
    for name in ("X", "Y", "Z", "F", "G", "F2", "CNOT"):
        m = gate(d, name).matrix
        assert np.allclose(m.conj().T @ m, np.eye(m.shape[0]))


@pytest.mark.parametrize("d", [2, 3, 4, 5])
def test_fourier_fourth_power(d):
    f = gate(d, "F").matrix
    assert np.allclose(np.linalg.matrix_power(f, 4), np.eye(d))
    assert np.allclose(f @ f, gate(d, "F2").matrix)


@pytest.mark.parametrize("d", [2, 3, 4, 5])
def test_y_action(d):
    # Y|k> = zeta^(1-2k) |k-1>, i.e. zeta X^-1 Z^-1
    zeta = roots(d).zeta
    for k in range(d):
        out = gate(d, "Y") @ Tensor.ket(d, k)
        assert out.allclose(Tensor.ket(d, k - 1).scale(zeta ** (1 - 2 * k)))
    xz = np.linalg.inv(gate(d, "X").matrix) @ np.linalg.inv(gate(d, "Z").matrix)
    assert np.allclose(gate(d, "Y").matrix, zeta * xz)


def test_unknown_gate():
    with pytest.raises(KeyError):
        gate(2, "H")


def test_sum_qubit():
    t = spider(2, "white", 2, 1).entries
    ones = {(0, 0, 0), (1, 0, 1), (1, 1, 0), (0, 1, 1)}
    for idx in itertools.product(range(2), repeat=3):
        assert t[idx] == (1 if idx in ones else 0)


@pytest.mark.parametrize("d", [2, 3, 5])
def test_copy(d):
    t = spider(d, SpiderSpec("black", 1, 2))
    for j in range(d):
        assert (t @ Tensor.ket(d, j)).allclose(Tensor.ket(d, j, j))


@pytest.mark.parametrize("d", [2, 3, 4])
def test_empty_spiders(d):
    assert spider(d, "black", 0, 0).entries == d
    assert spider(d, "white", 0, 0).entries == 1


def test_bell_plus_qubit():
    v = resource_state(2, "BellPlus").vector
    assert np.allclose(v, np.array([1, 0, 0, 1]) / math.sqrt(2))


@pytest.mark.parametrize("d", range(2, 8))
def test_max2_is_bell_minus(d):
    assert resource_state(d, "Max", 2).allclose(resource_state(d, "BellMinus"))


@pytest.mark.parametrize("d", [2, 3, 4])
@pytest.mark.parametrize("n", [1, 2, 3])
def test_resource_states_normalized(d, n):
    for name in ("GHZ", "Max"):
        v = resource_state(d, name, n).vector
        assert abs(np.linalg.norm(v) - 1) < 1e-12


def test_resource_zero_legs():
    with pytest.raises(ShapeError):
        resource_state(2, "GHZ", 0)


@pytest.mark.parametrize("d,order", [(1, 1), (2, 24), (3, 216)])
def test_clifford_order(d, order):
    assert clifford_order(d) == order == expected_clifford_order(d)


def test_clifford_cap():
    with pytest.raises(CapExceeded):
        clifford_order(3, cap=100)


def test_expected_order_formula():
    # d^2 |SL(2, Z_d)|: |SL(2, Z_4)| = 48, |SL(2, Z_6)| = 144
    assert expected_clifford_order(4) == 16 * 48
    assert expected_clifford_order(6) == 36 * 144


def test_teleport_basis_state():
    assert teleport_run(2, np.array([1, 0]), (0, 0)).fidelity == pytest.approx(1)


@pytest.mark.parametrize("d", [2, 3, 5, 7])
def test_teleport_every_outcome(d):
    rng = np.random.default_rng(d)
    psi = random_state(d, rng)
    for a, b in itertools.product(range(d), repeat=2):
        rep = teleport_run(d, psi, (a, b))
        assert rep.fidelity > 1 - 1e-9
        assert rep.probability == pytest.approx(1 / d ** 2)


@given(st.integers(2, 6), st.integers(0, 5), st.integers(0, 50), st.integers(0, 50))
def test_teleport_basis_inputs(d, k, a, b):
    psi = np.eye(d)[k % d]
    assert teleport_run(d, psi, (a, b)).fidelity > 1 - 1e-9


def test_teleport_rejects_unnormalized():
    with pytest.raises(ShapeError):
        teleport_run(2, np.array([1.0, 1.0]), (0, 0))


def test_calibration_unique():
    assert calibrate_teleport(range(2, 5), trials=2) == [TELEPORT_CORRECTION]
