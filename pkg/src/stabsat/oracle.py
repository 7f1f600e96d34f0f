"""Brute-force statevector reference used to validate every fast path.

Index convention: qubit ``j`` is bit ``j`` of the basis-state index, so a
Kronecker product is written ``kron(M_{q-1}, ..., M_0)``.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.optimize import minimize_scalar

from .circuit import Circuit, Gate, QcsatInstance

STATE_CAP = 14
UNITARY_CAP = 12
_S2 = 1 / math.sqrt(2)


class CapExceeded(ValueError):
    """Raised when a dense computation would exceed the configured qubit cap."""


def gate_matrix(g: Gate) -> np.ndarray:
    k = g.kind
    if k == "UNITARY":
        return np.asarray(g.matrix, dtype=complex)
    if k == "H":
        return np.array([[_S2, _S2], [_S2, -_S2]], dtype=complex)
    if k == "S":
        return np.diag([1, 1j])
    if k == "SDG":
        return np.diag([1, -1j])
    if k == "X":
        return np.array([[0, 1], [1, 0]], dtype=complex)
    if k == "Y":
        return np.array([[0, -1j], [1j, 0]], dtype=complex)
    if k == "Z":
        return np.diag([1, -1]).astype(complex)
    if k in ("T", "TDG", "RZ"):
        return np.diag([1, np.exp(1j * g.rotation_angle)])
    # two-qubit matrices act on (first qubit, second qubit) with the first qubit as the high bit
    if k == "CX":
        return np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
    if k == "CZ":
        return np.diag([1, 1, 1, -1]).astype(complex)
    if k == "SWAP":
        return np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)
    raise ValueError(f"unknown gate {k}")


def _apply(tensor: np.ndarray, g: Gate, q: int) -> np.ndarray:
    """Apply ``g`` to a tensor of shape ``(2,)*q + (batch,)``."""
    qs = g.qubits
    mat = gate_matrix(g).reshape((2,) * (2 * len(qs)))
    # UNITARY gates follow the same rule: qubits[0] is the most significant bit of the matrix index
    axes = [q - 1 - j for j in qs]
    out = np.tensordot(mat, tensor, axes=(list(range(len(qs), 2 * len(qs))), axes))
    return np.moveaxis(out, list(range(len(qs))), axes)


def apply_gates(vecs: np.ndarray, gates, q: int) -> np.ndarray:
    """Apply gates to a single state (shape ``(2^q,)``) or a batch (shape ``(2^q, b)``)."""
    single = vecs.ndim == 1
    b = 1 if single else vecs.shape[1]
    t = np.asarray(vecs, dtype=complex).reshape((2,) * q + (b,))
    for g in gates:
        t = _apply(t, g, q)
    t = t.reshape(2 ** q, b)
    return t[:, 0] if single else t


def simulate(circuit, state: np.ndarray, num_qubits: int | None = None) -> np.ndarray:
    gates = circuit.gates if isinstance(circuit, (Circuit, QcsatInstance)) else circuit
    q = num_qubits if num_qubits is not None else circuit.num_qubits
    if q > STATE_CAP:
        raise CapExceeded(f"{q} qubits exceeds the dense state cap of {STATE_CAP}")
    state = np.asarray(state, dtype=complex)
    if state.shape[0] != 2 ** q:
        raise ValueError("state has the wrong dimension")
    return apply_gates(state, gates, q)


def unitary(circuit, num_qubits: int | None = None) -> np.ndarray:
    gates = circuit.gates if isinstance(circuit, (Circuit, QcsatInstance)) else circuit
    q = num_qubits if num_qubits is not None else circuit.num_qubits
    if q > UNITARY_CAP:
        raise CapExceeded(f"{q} qubits exceeds the dense unitary cap of {UNITARY_CAP}")
    return apply_gates(np.eye(2 ** q, dtype=complex), gates, q)


def embed_witness(inst: QcsatInstance, psi: np.ndarray) -> np.ndarray:
    """``|psi>`` on the witness register tensored with ``|0^m>``."""
    q = inst.num_qubits
    full = np.zeros(2 ** q, dtype=complex)
    full[_witness_index(inst)] = psi
    return full


def _witness_index(inst):
    idx = np.zeros(2 ** inst.n, dtype=np.int64)
    for j, w in enumerate(inst.witness):
        idx |= ((np.arange(2 ** inst.n) >> j) & 1) << w
    return idx


def _accept_mask(inst):
    mask = 0
    for o in inst.output:
        mask |= 1 << o
    return (np.arange(2 ** inst.num_qubits) & mask) == mask


def acceptance_probability(inst: QcsatInstance, psi: np.ndarray) -> float:
    """``||Pi_out U |psi, 0^m>||^2``."""
    out = simulate(inst, embed_witness(inst, psi))
    return float(np.sum(np.abs(out[_accept_mask(inst)]) ** 2))


def acceptance_operator(inst: QcsatInstance) -> np.ndarray:
    """``M = <0^m| U^dag Pi_out U |0^m>`` as a ``2^n x 2^n`` matrix."""
    q = inst.num_qubits
    if q > STATE_CAP:
        raise CapExceeded(f"{q} qubits exceeds the dense state cap of {STATE_CAP}")
    idx = _witness_index(inst)
    acc = _accept_mask(inst)
    dim = 2 ** inst.n
    m = np.zeros((dim, dim), dtype=complex)
    chunk = max(1, 2 ** 20 // 2 ** q)
    cols = []
    for start in range(0, dim, chunk):
        stop = min(dim, start + chunk)
        block = np.zeros((2 ** q, stop - start), dtype=complex)
        block[idx[start:stop], np.arange(stop - start)] = 1
        cols.append(apply_gates(block, inst.gates, q)[acc])
    a = np.hstack(cols)
    m = a.conj().T @ a
    return m


def exact_val_dense(inst: QcsatInstance) -> float:
    """Maximal acceptance probability over witness states."""
    m = acceptance_operator(inst)
    return float(np.linalg.eigvalsh(m)[-1])


def best_witness_dense(inst: QcsatInstance) -> np.ndarray:
    m = acceptance_operator(inst)
    w, v = np.linalg.eigh(m)
    return v[:, -1]


def eigenphases(circuit, num_qubits: int | None = None) -> np.ndarray:
    u = unitary(circuit, num_qubits)
    return np.angle(np.linalg.eigvals(u))


def _distance_for_phases(theta: np.ndarray) -> float:
    """``min_phi max_j |e^{i theta_j} - e^{i phi}|``.

    The optimum sits at the centre of the shortest arc covering every
    eigenphase, i.e. opposite the middle of the largest gap between
    consecutive eigenphases.
    """
    th = np.sort(np.mod(theta, 2 * np.pi))
    if len(th) == 0:
        return 0.0
    gaps = np.diff(np.concatenate([th, [th[0] + 2 * np.pi]]))
    g = float(np.max(gaps))
    half_cover = (2 * np.pi - g) / 2
    return float(2 * math.sin(min(half_cover, np.pi) / 2))


def distance_for_phi(theta: np.ndarray, phi) -> np.ndarray:
    """``max_j |e^{i theta_j} - e^{i phi}|`` for an array of ``phi``."""
    th = np.sort(np.mod(theta, 2 * np.pi))
    phi = np.atleast_1d(np.asarray(phi, dtype=float))
    # the farthest eigenphase from phi is the one closest to its antipode
    anti = np.mod(phi + np.pi, 2 * np.pi)
    pos = np.searchsorted(th, anti) % len(th)
    best = np.full(phi.shape, np.inf)
    for cand in (th[pos], th[pos - 1]):
        d = np.abs(np.mod(cand - anti + np.pi, 2 * np.pi) - np.pi)
        best = np.minimum(best, d)
    return 2 * np.cos(best / 2)


def identity_distance(circuit, num_qubits: int | None = None) -> float:
    """``min_phi ||U - e^{i phi} I||`` from the eigenphases of the dense unitary."""
    return _distance_for_phases(eigenphases(circuit, num_qubits))


def identity_distance_grid(circuit, num_qubits: int | None = None, points: int = 100_000) -> float:
    """Grid search over ``phi`` with a local refinement, as an independent check."""
    theta = eigenphases(circuit, num_qubits)
    grid = np.linspace(0, 2 * np.pi, points, endpoint=False)
    vals = distance_for_phi(theta, grid)
    k = int(np.argmin(vals))
    step = 2 * np.pi / points
    res = minimize_scalar(lambda p: float(distance_for_phi(theta, p)[0]),
                          bounds=(grid[k] - step, grid[k] + step), method="bounded",
                          options={"xatol": 1e-12})
    return float(min(vals[k], res.fun))
