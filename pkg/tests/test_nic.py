import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from stabsat import gen, nic, oracle
from stabsat.circuit import Circuit, Gate
from stabsat.tableau import tableau_from_circuit

from conftest import random_gates


def test_power_coefficients():
    assert nic.power_coefficients(1) == [-1, 2, -1]
    assert nic.power_coefficients(2) == [1, -4, 6, -4, 1]
    x = sympy.symbols("x")
    for p in range(1, 7):
        poly = sympy.expand((2 - x - 1 / x) ** p * x ** p)
        assert [int(poly.coeff(x, k)) for k in range(2 * p + 1)] == nic.power_coefficients(p)
        assert sum(nic.power_coefficients(p)) == 0


def test_clifford_trace_examples():
    assert complex(nic.clifford_trace(Circuit(3, []))) == 8
    assert nic.clifford_trace(Circuit(1, [Gate("X", (0,))])).zero
    assert abs(complex(nic.clifford_trace(Circuit(1, [Gate("S", (0,))]))) - (1 + 1j)) < 1e-12
    t = tableau_from_circuit([Gate("H", (0,)), Gate("CX", (0, 1))], 2)
    assert abs(complex(nic.clifford_trace(t)) - np.trace(oracle.unitary(nic.compile_tableau(t), 2))) < 1e-12


def test_trace_h_power_examples():
    z = Circuit(1, [Gate("Z", (0,))])
    assert str(nic.trace_h_power(z, 1)) == "4"
    assert str(nic.trace_h_power(z, 2)) == "16"
    for p in range(1, 4):
        assert str(nic.trace_h_power(Circuit(2, []), p)) == "0"


GENS_2Q = [Gate("H", (0,)), Gate("H", (1,)), Gate("S", (0,)), Gate("S", (1,)), Gate("CX", (0, 1)), Gate("CZ", (0, 1))]


def _dense_h_traces(gates, n, pmax):
    u = oracle.unitary(gates, n)
    h = 2 * np.eye(2 ** n) - u - u.conj().T
    return [np.trace(np.linalg.matrix_power(h, p)).real for p in range(1, pmax + 1)]


def _exact_h_traces(gates, n, pmax):
    traces = nic.clifford_trace_powers(Circuit(n, gates), pmax)
    return [nic._trace_from_powers(traces[: p + 1], nic.power_coefficients(p)) for p in range(1, pmax + 1)]


GENS_3Q = [Gate("H", (0,)), Gate("S", (1,)), Gate("CX", (0, 1)), Gate("CX", (1, 2)), Gate("CZ", (0, 2)),
           Gate("H", (2,))]


@pytest.mark.parametrize("gens,n", [(GENS_2Q, 2), (GENS_3Q, 3)])
def test_trace_h_power_exhaustive(gens, n):
    for length in range(6):
        for word in itertools.product(gens, repeat=length):
            exact = _exact_h_traces(list(word), n, 4)
            for e, d in zip(exact, _dense_h_traces(list(word), n, 4)):
                assert abs(float(e) - d) < 1e-8 * max(1, d)
                assert float(e) >= -1e-9


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 3), st.integers(0, 5), st.integers(0, 2 ** 31))
def test_trace_h_power_random(n, s, seed):
    gates = random_gates(np.random.default_rng(seed), n, s)
    for e, d in zip(_exact_h_traces(gates, n, 4), _dense_h_traces(gates, n, 4)):
        assert abs(float(e) - d) < 1e-8 * max(1, d)


def test_decider_examples():
    ident = Circuit(2, [])
    assert nic.decide_nic_clifford(nic.NicInstance(ident, 1, 0.5)).decision == "no"
    assert nic.decide_nic_clifford(nic.NicInstance(Circuit(1, [Gate("Z", (0,))]), 1, 0.5)).decision == "yes"
    assert nic.decide_nic_clifford(nic.NicInstance(Circuit(1, [Gate("H", (0,))]), 0.7, 0.1)).decision == "yes"
    # identity up to a global phase
    hs3 = Circuit(1, [Gate("H", (0,)), Gate("S", (0,))] * 3)
    assert nic.decide_nic_clifford(nic.NicInstance(hs3, 1, 0.5)).decision == "no"
    with pytest.raises(ValueError):
        nic.decide_nic_clifford(nic.NicInstance(Circuit(1, [Gate("T", (0,))]), 1, 0.5))


def test_parameters_exact():
    n = 6
    N, beta_p, p = nic._choose_parameters(n, Fraction(1), Fraction(1, 2))
    assert Fraction(355, 113) / N <= Fraction(1, 4)
    assert 1 >= 2 * 2 ** n * beta_p ** (2 * p)
    assert not (1 >= 2 * 2 ** n * beta_p ** (2 * p - 2))


def test_gap_too_small():
    with pytest.raises(nic.GapTooSmall):
        nic.decide_nic_clifford(nic.NicInstance(Circuit(1, [Gate("Z", (0,))]), 0.51, 0.5), max_p_factor=1)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 5), st.integers(0, 12), st.integers(0, 2 ** 31))
def test_decider_agrees_with_oracle(n, s, seed):
    rng = np.random.default_rng(seed)
    c = Circuit(n, random_gates(rng, n, s))
    d = oracle.identity_distance(c)
    gap = 0.1 + 0.5 * rng.random()
    # promise-respecting thresholds on either side of d, rounded outward to 12 decimals
    if d > gap + 1e-6:
        alpha = math.floor(min(d, 2.0) * 1e12) / 1e12
        beta, want = max(0.0, alpha - gap), "yes"
    else:
        beta = math.ceil(d * 1e12) / 1e12
        alpha, want = min(2.0, beta + gap), "no"
    assert nic.decide_nic_clifford(nic.NicInstance(c, alpha, beta)).decision == want


def test_lightcone_examples():
    assert nic.decide_nic_lightcone(nic.NicInstance(Circuit(3, []), 1, 0.5)).decision == "no"
    hh = Circuit(1, [Gate("H", (0,)), Gate("H", (0,))])
    assert nic.decide_nic_lightcone(nic.NicInstance(hh, 1, 0.5, depth_bound=2)).decision == "no"
    x = nic.decide_nic_lightcone(nic.NicInstance(Circuit(4, [Gate("X", (2,))]), 1, 0.5))
    assert x.decision == "yes" and x.failing_qubit == 2
    # an identity whose per-qubit lightcone unitaries are not themselves identities
    tricky = Circuit(2, [Gate("H", (0,)), Gate("CX", (0, 1)), Gate("CX", (0, 1)), Gate("H", (0,))])
    assert nic.decide_nic_lightcone(nic.NicInstance(tricky, 1, 0.5)).decision == "no"


def test_lightcone_errors():
    c = Circuit(2, [Gate("H", (0,)), Gate("CX", (0, 1)), Gate("H", (1,))])
    with pytest.raises(ValueError):
        nic.decide_nic_lightcone(nic.NicInstance(c, 1, 0.5, depth_bound=2))
    wide = gen.random_layered_circuit(20, 5, seed=0, kinds=["CX"])
    with pytest.raises(nic.LightconeTooWide):
        nic.decide_nic_lightcone(nic.NicInstance(wide, 1, 0.5))


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 8), st.integers(0, 2 ** 31))
def test_lightcone_agrees_with_oracle(n, seed):
    c = gen.random_layered_circuit(n, 2, seed=seed, kinds=["H", "S", "T", "X", "Z", "CX", "CZ"], density=0.5)
    dec = nic.decide_nic_lightcone(nic.NicInstance(c, 1, 0.5, depth_bound=2))
    assert (dec.decision == "yes") == (oracle.identity_distance(c) > 1e-6)


def test_lightcone_threads_agree():
    c = gen.random_layered_circuit(30, 2, seed=5)
    a = nic.decide_nic_lightcone(nic.NicInstance(c, 1, 0.5), threads=1)
    b = nic.decide_nic_lightcone(nic.NicInstance(c, 1, 0.5), threads=4)
    assert a == b
