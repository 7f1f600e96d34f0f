"""Heisenberg-picture Pauli propagation of the output observable with a compressed basis.

``Q = U^dag Z_out U`` is carried as ``sum_mask c_mask * prod_{k in mask} B_k``
over a GF(2)-independent basis of Hermitian Paulis ``B_k``.  Clifford gates
act on the basis only; each rotation splits the terms that anticommute with
``Z_q`` and adds at most one basis element, so the basis never exceeds
``t + 1`` elements.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import gf2
from .circuit import QcsatInstance, ROTATIONS
from .pauli import PauliString, diagonal_restrict, multiply
from .tableau import PauliTable

PRUNE = 1e-14


@dataclass
class TermSum:
    num_qubits: int
    basis: list
    terms: dict = field(default_factory=dict)

    @property
    def width(self) -> int:
        return len(self.basis)

    def product(self, mask: int) -> PauliString:
        acc = PauliString(self.num_qubits)
        k = 0
        while mask:
            if mask & 1:
                acc = multiply(acc, self.basis[k])
            mask >>= 1
            k += 1
        return acc

    def explicit(self):
        """``[(coefficient, Pauli)]`` with the Pauli's own phase folded into the coefficient."""
        out = []
        for mask, c in self.terms.items():
            p = self.product(mask)
            out.append((c * 1j ** p.phase, p.with_phase(0)))
        return out

    def to_matrix(self) -> np.ndarray:
        dim = 2 ** self.num_qubits
        m = np.zeros((dim, dim), dtype=complex)
        for c, p in self.explicit():
            m += c * p.to_matrix()
        return m


def _phase_ratio(target: PauliString, got: PauliString) -> complex:
    """``target = ratio * got`` for Paulis with equal bits."""
    assert target.x == got.x and target.z == got.z
    return 1j ** ((target.phase - got.phase) % 4)


def _apply_clifford(basis: list, gate, n: int) -> list:
    tab = PauliTable.from_paulis(basis, n)
    tab.apply(gate, inverse=True)
    return tab.rows()


def _in_span(basis: list, p: PauliString, n: int):
    """Mask expressing ``p`` (up to phase) in the basis, or None."""
    if not basis:
        return 0 if p.x == 0 and p.z == 0 else None
    sym = PauliTable.from_paulis(basis, n).symplectic()
    target = PauliTable.from_paulis([p], n).symplectic()[0]
    sol = gf2.solve(sym.T, target)
    if sol is None:
        return None
    return sum(1 << k for k in np.nonzero(sol)[0])


class Propagator:
    """Runs the basis maintenance, optionally with the term map."""

    def __init__(self, n: int, output: int, track_terms: bool = True, prune: float | None = PRUNE):
        self.n = n
        self.basis = [PauliString(n, 0, 1 << output)]
        self.track = track_terms
        self.terms = {1: 1.0 + 0j} if track_terms else None
        self.prune = prune

    # B_j <- B_j * B_i (re-Hermitized), with terms rewritten
    def _combine(self, j: int, i: int):
        old = list(self.basis)
        new_j = multiply(old[j], old[i]).hermitian()
        self.basis[j] = new_j
        if not self.track:
            return
        ts = TermSum(self.n, old, {})
        new_ts = TermSum(self.n, self.basis, {})
        out = {}
        for mask, c in self.terms.items():
            nm = mask ^ (1 << i) if (mask >> j) & 1 else mask
            ratio = _phase_ratio(ts.product(mask), new_ts.product(nm))
            out[nm] = out.get(nm, 0) + c * ratio
        self.terms = out

    def rotation(self, q: int, theta: float):
        """Conjugate by ``diag(1, e^{i theta})`` on qubit ``q``: ``Q -> R^dag Q R``."""
        xs = [k for k, b in enumerate(self.basis) if (b.x >> q) & 1]
        if not xs:
            return
        i = xs[0]
        for j in xs[1:]:
            self._combine(j, i)
        zs = [k for k, b in enumerate(self.basis) if k != i and (b.z >> q) & 1]
        for j in zs[1:]:
            self._combine(j, zs[0])
        zq = PauliString(self.n, 0, 1 << q)
        mask_z = _in_span(self.basis, zq, self.n)
        if mask_z is None:
            self.basis.append(zq)
            mask_z = 1 << (len(self.basis) - 1)
        if not self.track:
            return
        ts = TermSum(self.n, self.basis, {})
        cos, sin = math.cos(theta), math.sin(theta)
        out = {}
        for mask, c in self.terms.items():
            if not (mask >> i) & 1:
                out[mask] = out.get(mask, 0) + c
                continue
            out[mask] = out.get(mask, 0) + c * cos
            # R^dag B R = cos B - i sin B Z_q for B anticommuting with Z_q
            p = multiply(ts.product(mask), zq)
            nm = mask ^ mask_z
            ratio = _phase_ratio(p, ts.product(nm))
            out[nm] = out.get(nm, 0) + c * (-1j * sin) * ratio
        if self.prune is not None:
            out = {k: v for k, v in out.items() if abs(v) >= self.prune}
        self.terms = out

    def run(self, gates):
        for g in reversed(list(gates)):
            if g.kind in ROTATIONS:
                self.rotation(g.qubits[0], g.rotation_angle)
            else:
                self.basis = _apply_clifford(self.basis, g, self.n)
        return self

    def result(self) -> TermSum:
        return TermSum(self.n, list(self.basis), dict(self.terms or {}))


def _single_output(inst: QcsatInstance) -> int:
    if len(inst.output) != 1:
        raise ValueError("Pauli propagation needs a single-qubit output register")
    return inst.output[0]


def propagate(inst: QcsatInstance, prune: float | None = PRUNE) -> TermSum:
    """``U^dag Z_out U`` as a term sum."""
    out = _single_output(inst)
    return Propagator(inst.num_qubits, out, True, prune).run(inst.gates).result()


def predict_width(inst: QcsatInstance) -> int:
    """Final basis size of :func:`propagate`, from basis maintenance alone."""
    out = _single_output(inst)
    return len(Propagator(inst.num_qubits, out, False).run(inst.gates).basis)


def project_ancillas(ts: TermSum, ancilla, keep=None) -> TermSum:
    """``<0^m| Q |0^m>`` re-expressed over a fresh basis on the remaining qubits (ascending order)."""
    anc = set(int(a) for a in ancilla)
    keep = keep if keep is not None else [q for q in range(ts.num_qubits) if q not in anc]
    n2 = len(keep)
    restricted = []
    for c, p in ts.explicit():
        s, rest = diagonal_restrict(p, anc)
        if rest is None or s == 0:
            continue
        restricted.append((c * s, rest))
    # fresh basis from the surviving Paulis, greedily in term order
    basis: list[PauliString] = []
    vecs = np.zeros((0, 2 * n2), dtype=bool)
    for _, p in restricted:
        if p.x == 0 and p.z == 0:
            continue
        v = PauliTable.from_paulis([p], n2).symplectic()
        cand = np.vstack([vecs, v])
        if gf2.rank(cand) > len(vecs):
            vecs = cand
            basis.append(p.hermitian())
    out = TermSum(n2, basis, {})
    terms: dict[int, complex] = {}
    for c, p in restricted:
        mask = _in_span(basis, p, n2)
        ratio = _phase_ratio(p, out.product(mask))
        terms[mask] = terms.get(mask, 0) + c * ratio
    out.terms = terms
    return out


def compress(ts: TermSum) -> np.ndarray:
    """Dense matrix on ``b'`` qubits with the same algebra as the basis.

    ``B_k -> A_k = prod_{k' < k} X_{k'}^{gamma(k', k)} Z_k`` where ``gamma`` is 1
    when ``B_k'`` and ``B_k`` anticommute.
    """
    b = ts.width
    if b:
        sym = PauliTable.from_paulis(ts.basis, ts.num_qubits).symplectic()
        if gf2.rank(sym) != b:
            raise ValueError("basis is not independent")
    anti = [[((ts.basis[a].x & ts.basis[c].z) ^ (ts.basis[a].z & ts.basis[c].x)).bit_count() % 2
             for c in range(b)] for a in range(b)]
    A = []
    for k in range(b):
        x = sum(1 << kp for kp in range(k) if anti[kp][k])
        A.append(PauliString(b, x, 1 << k, 0))
    mapped = TermSum(b, A, dict(ts.terms))
    return mapped.to_matrix()


@dataclass
class AppendixResult:
    value: float
    lambda_min: float
    b: int
    b_projected: int
    t: int
    num_terms: int
    wall_time_ms: float


def solve_appendix(inst: QcsatInstance, delta: float = 1e-6) -> AppendixResult:
    """``Val = (1 - lambda_min) / 2`` from the compressed observable.

    The eigenvalue is computed by a dense Hermitian solve, which meets any
    requested relative precision ``delta``.
    """
    t0 = time.perf_counter()
    ts = propagate(inst)
    proj = project_ancillas(ts, inst.ancilla)
    h = compress(proj)
    h = (h + h.conj().T) / 2
    lam = float(np.linalg.eigvalsh(h)[0])
    value = min(max((1 - lam) / 2, 0.0), 1.0)
    return AppendixResult(value=value, lambda_min=lam, b=ts.width, b_projected=proj.width, t=inst.t_count,
                          num_terms=len(ts.terms), wall_time_ms=(time.perf_counter() - t0) * 1e3)
