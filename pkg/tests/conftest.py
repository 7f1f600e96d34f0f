import numpy as np
import pytest

from stabsat.circuit import Circuit, Gate, QcsatInstance

CLIFFORD_KINDS = ["H", "S", "SDG", "X", "Y", "Z", "CX", "CZ", "SWAP"]
FIXTURES = __import__("pathlib").Path(__file__).parent / "fixtures"


def random_gates(rng, n, s, kinds=CLIFFORD_KINDS):
    gates = []
    for _ in range(s):
        k = str(rng.choice(kinds))
        if k in ("CX", "CZ", "SWAP"):
            if n < 2:
                continue
            a, b = rng.choice(n, 2, replace=False)
            gates.append(Gate(k, (int(a), int(b))))
        else:
            gates.append(Gate(k, (int(rng.integers(n)),)))
    return gates


def random_qcsat(rng, nq, s, t, max_outputs=3):
    """Random instance with witness/ancilla scattered over the qubits and T/Tdg gates inserted."""
    g = random_gates(rng, nq, s, CLIFFORD_KINDS + ["H", "CX"])
    for _ in range(t):
        pos = int(rng.integers(len(g) + 1))
        g.insert(pos, Gate(str(rng.choice(["T", "TDG"])), (int(rng.integers(nq)),)))
    n = int(rng.integers(0, nq + 1))
    perm = rng.permutation(nq)
    out = rng.choice(nq, int(rng.integers(1, min(max_outputs, nq) + 1)), replace=False)
    return QcsatInstance(Circuit(nq, g), sorted(perm[:n]), sorted(perm[n:]), sorted(out))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def hth_instance():
    return QcsatInstance(Circuit(2, [Gate("H", (1,)), Gate("T", (1,)), Gate("H", (1,))]), [0], [1], [1])


def copy_instance():
    return QcsatInstance(Circuit(2, [Gate("CX", (0, 1))]), [0], [1], [1])


HTH_VALUE = (2 - np.sqrt(2)) / 4
