import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from stabsat import oracle
from stabsat.circuit import Circuit, Gate, QcsatInstance
from stabsat.tableau import compile_tableau, tableau_from_circuit

from conftest import HTH_VALUE, copy_instance, hth_instance, random_gates


def test_simulate_examples():
    e = np.array([1, 0], complex)
    assert np.allclose(oracle.simulate([], e, 1), e)
    assert np.allclose(oracle.simulate([Gate("H", (0,))], e, 1), [2 ** -0.5, 2 ** -0.5])
    plus = np.array([1, 1]) / np.sqrt(2)
    assert np.allclose(oracle.simulate([Gate("T", (0,))], plus, 1), [2 ** -0.5, np.exp(1j * np.pi / 4) / np.sqrt(2)])


def test_val_examples():
    pinned = QcsatInstance(Circuit(2, []), [0], [1], [1])
    assert oracle.exact_val_dense(pinned) == 0
    assert abs(oracle.exact_val_dense(copy_instance()) - 1) < 1e-12
    assert abs(oracle.exact_val_dense(hth_instance()) - HTH_VALUE) < 1e-12


def test_distance_examples():
    assert oracle.identity_distance(Circuit(2, [])) < 1e-12
    # (HS)^3 is e^{i pi/4} I
    assert oracle.identity_distance(Circuit(1, [Gate("H", (0,)), Gate("S", (0,))] * 3)) < 1e-9
    assert abs(oracle.identity_distance(Circuit(1, [Gate("Z", (0,))])) - np.sqrt(2)) < 1e-12


def test_caps():
    with pytest.raises(oracle.CapExceeded):
        oracle.unitary(Circuit(13, []))


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 5), st.integers(0, 20), st.integers(0, 2 ** 31))
def test_unitarity_and_grid_agreement(n, s, seed):
    rng = np.random.default_rng(seed)
    gates = random_gates(rng, n, s, ["H", "S", "T", "CX", "CZ", "X"])
    v = rng.standard_normal(2 ** n) + 1j * rng.standard_normal(2 ** n)
    v /= np.linalg.norm(v)
    assert abs(np.linalg.norm(oracle.simulate(gates, v, n)) - 1) < 1e-12
    c = Circuit(n, gates)
    assert abs(oracle.identity_distance(c) - oracle.identity_distance_grid(c)) < 1e-6


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 4), st.integers(0, 2 ** 31))
def test_distance_unitary_invariance(n, seed):
    rng = np.random.default_rng(seed)
    u = random_gates(rng, n, 12, ["H", "S", "T", "CX"])
    v = compile_tableau(tableau_from_circuit(random_gates(rng, n, 12), n))
    vinv = [g.inverse() for g in reversed(v)]
    d1 = oracle.identity_distance(Circuit(n, u))
    d2 = oracle.identity_distance(Circuit(n, vinv + u + v))
    assert abs(d1 - d2) < 1e-9
