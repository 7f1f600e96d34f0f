"""Instance generators: random Clifford+T verifiers, random Clifford circuits and the Ising reduction."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .circuit import CLIFFORD_1Q, CLIFFORD_2Q, Circuit, Gate, QcsatInstance

CLIFFORD_KINDS = CLIFFORD_1Q + CLIFFORD_2Q


def _random_clifford_gate(rng: np.random.Generator, nq: int, kinds=CLIFFORD_KINDS) -> Gate:
    if nq < 2:
        kinds = [k for k in kinds if k in CLIFFORD_1Q]
    kind = kinds[int(rng.integers(len(kinds)))]
    if kind in CLIFFORD_2Q:
        a, b = rng.choice(nq, 2, replace=False)
        return Gate(kind, (int(a), int(b)))
    return Gate(kind, (int(rng.integers(nq)),))


def random_instance(n: int, m: int, s: int, t: int, seed=None, num_outputs: int | None = None) -> QcsatInstance:
    """``s`` gates on ``n + m`` qubits, exactly ``t`` of them T gates at random positions.

    Witness qubits are ``0..n-1`` and ancillas ``n..n+m-1``.  The output is a
    random nonempty subset of the ancillas (of the witness when ``m = 0``).
    """
    nq = n + m
    if nq < 1 or t > s or min(n, m, s, t) < 0:
        raise ValueError("infeasible parameters: need n+m >= 1, 0 <= t <= s")
    rng = np.random.default_rng(seed)
    t_pos = set(int(p) for p in rng.choice(s, t, replace=False)) if t else set()
    gates = []
    for i in range(s):
        if i in t_pos:
            gates.append(Gate("T", (int(rng.integers(nq)),)))
        else:
            gates.append(_random_clifford_gate(rng, nq))
    pool = list(range(n, nq)) if m else list(range(n))
    k = num_outputs if num_outputs is not None else int(rng.integers(1, len(pool) + 1))
    if not 1 <= k <= len(pool):
        raise ValueError("infeasible number of outputs")
    out = sorted(int(q) for q in rng.choice(pool, k, replace=False))
    return QcsatInstance(Circuit(nq, gates), range(n), range(n, nq), out)


def random_clifford_circuit(n: int, s: int, seed=None) -> Circuit:
    rng = np.random.default_rng(seed)
    return Circuit(n, [_random_clifford_gate(rng, n) for _ in range(s)])


def random_layered_circuit(n: int, depth: int, seed=None, kinds=CLIFFORD_KINDS, density: float = 1.0) -> Circuit:
    """``depth`` layers of non-overlapping gates; each layer packs random 1- and 2-qubit gates."""
    rng = np.random.default_rng(seed)
    gates = []
    for _ in range(depth):
        free = list(rng.permutation(n))
        while free:
            if rng.random() > density:
                free.pop()
                continue
            kind = kinds[int(rng.integers(len(kinds)))]
            if kind in CLIFFORD_2Q and len(free) >= 2:
                a, b = int(free.pop()), int(free.pop())
                gates.append(Gate(kind, (a, b)))
            elif kind in CLIFFORD_2Q:
                free.pop()
            else:
                gates.append(Gate(kind, (int(free.pop()),)))
    return Circuit(n, gates)


def obfuscated_identity(n: int, s: int, seed=None) -> Circuit:
    """A random circuit followed by its inverse (an identity up to global phase)."""
    c = random_clifford_circuit(n, s, seed)
    return Circuit(n, list(c.gates) + list(c.inverse().gates))


# ---------------------------------------------------------------------------
# Ising reduction


@dataclass(frozen=True)
class IsingSpec:
    num_vertices: int
    edges: tuple = ()

    def __post_init__(self):
        es = tuple(tuple(sorted((int(u), int(v)))) for u, v in self.edges)
        object.__setattr__(self, "edges", es)
        for u, v in es:
            if u == v:
                raise ValueError("self-loop in graph")
            if not (0 <= u < self.num_vertices and 0 <= v < self.num_vertices):
                raise ValueError("edge endpoint out of range")
        if len(set(es)) != len(es):
            raise ValueError("duplicate edge")

    @property
    def num_terms(self) -> int:
        return len(self.edges) + self.num_vertices

    def energy(self, spins) -> int:
        """``H' = sum_E z_u z_v + sum_V z_v`` for spins in {+1, -1}."""
        return sum(spins[u] * spins[v] for u, v in self.edges) + sum(spins)

    def brute_force_val(self) -> float:
        """``lambda_min(H' - m')^2 / m^2`` with ``m = 2 m'``."""
        mp = self.num_terms
        lo = min(self.energy(s) for s in itertools.product((1, -1), repeat=self.num_vertices))
        return (lo - mp) ** 2 / (2 * mp) ** 2


def parse_edge_list(text: str) -> IsingSpec:
    nv = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        if tok[0] == "vertices":
            nv = int(tok[1])
            continue
        if len(tok) != 2:
            raise ValueError(f"line {lineno}: expected 'u v'")
        edges.append((int(tok[0]), int(tok[1])))
    if nv is None:
        raise ValueError("missing 'vertices N' header")
    return IsingSpec(nv, edges)


def w2_preparation() -> Circuit:
    """Clifford circuit with ``|00> -> (|01> + |10>)/sqrt 2``."""
    return Circuit(2, [Gate("H", (0,)), Gate("CX", (0, 1)), Gate("X", (1,))])


def w_state(m: int) -> np.ndarray:
    w = np.zeros(2 ** m)
    w[[1 << k for k in range(m)]] = 1 / math.sqrt(m)
    return w


def w_oracle_preparation(m: int) -> Circuit:
    """Dense Householder unitary sending ``|0^m>`` to ``|W_m>`` (dense oracle only)."""
    w = w_state(m)
    v = -w.copy()
    v[0] += 1
    u = np.eye(2 ** m) - 2 * np.outer(v, v) / (v @ v)
    return Circuit(m, [Gate("UNITARY", tuple(range(m)), matrix=u.astype(complex))])


def ising_to_qcsat(spec: IsingSpec, wprep: Circuit | None = None) -> QcsatInstance:
    """Verifier whose value is ``lambda_min(H' - m')^2 / m^2``.

    Layout: computational qubits ``0..V-1`` (the witness), then the ``m``
    control qubits, then any junk qubits of ``wprep``.  ``wprep`` maps
    ``|0>`` to ``|W_m> x |junk>`` with the control register on its first
    ``m`` qubits.  Control and junk qubits are all measured; a trailing X
    layer turns the all-zeros event into the all-ones acceptance event.
    """
    mp = spec.num_terms
    if spec.num_vertices < 1 or mp < 1:
        raise ValueError("graph must have at least one vertex")
    m = 2 * mp
    if wprep is None:
        if m != 2:
            raise ValueError("a W-state preparation circuit is required unless m = 2")
        wprep = w2_preparation()
    if wprep.num_qubits < m:
        raise ValueError(f"wprep acts on {wprep.num_qubits} qubits but the control register needs {m}")
    nv = spec.num_vertices
    nq = nv + wprep.num_qubits
    ctrl = [nv + i for i in range(m)]
    shift = {j: nv + j for j in range(wprep.num_qubits)}
    v_gates = [g.remap(shift) for g in wprep.gates]
    c_gates = []
    terms = [tuple(e) for e in spec.edges] + [(v,) for v in range(nv)]
    for i, term in enumerate(terms):
        for q in term:
            c_gates.append(Gate("CZ", (ctrl[i], q)))
    for i in range(mp, m):
        c_gates.append(Gate("Z", (ctrl[i],)))
    inv = [g.inverse() for g in reversed(v_gates)]
    measured = list(range(nv, nq))
    x_layer = [Gate("X", (q,)) for q in measured]
    circ = Circuit(nq, v_gates + c_gates + inv + x_layer)
    return QcsatInstance(circ, range(nv), range(nv, nq), measured)
