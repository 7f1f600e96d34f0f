"""Signed Clifford tableaus, vectorized Pauli tables and tableau compilation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import gf2
from .circuit import Gate
from .pauli import PauliString, bits_to_int, int_to_bits, multiply


class NotCliffordError(ValueError):
    pass


class PauliTable:
    """A stack of Pauli operators ``i^phase X^x Z^z`` stored as bool arrays.

    Gate methods conjugate every row, ``P -> g P g^dag``.
    """

    def __init__(self, x: np.ndarray, z: np.ndarray, phase: np.ndarray):
        self.x = np.asarray(x, dtype=bool)
        self.z = np.asarray(z, dtype=bool)
        self.phase = np.asarray(phase, dtype=np.int64) % 4

    @classmethod
    def empty(cls, n: int) -> "PauliTable":
        return cls(np.zeros((0, n), bool), np.zeros((0, n), bool), np.zeros(0, np.int64))

    @classmethod
    def from_paulis(cls, paulis, n: int | None = None) -> "PauliTable":
        paulis = list(paulis)
        if not paulis:
            return cls.empty(n or 0)
        n = paulis[0].num_qubits
        x = np.array([int_to_bits(p.x, n) for p in paulis], dtype=bool).reshape(len(paulis), n)
        z = np.array([int_to_bits(p.z, n) for p in paulis], dtype=bool).reshape(len(paulis), n)
        return cls(x, z, np.array([p.phase for p in paulis]))

    @property
    def num_qubits(self) -> int:
        return self.x.shape[1]

    def __len__(self):
        return self.x.shape[0]

    def copy(self) -> "PauliTable":
        return PauliTable(self.x.copy(), self.z.copy(), self.phase.copy())

    def row(self, i: int) -> PauliString:
        return PauliString(self.num_qubits, bits_to_int(self.x[i]), bits_to_int(self.z[i]), int(self.phase[i]))

    def rows(self) -> list[PauliString]:
        return [self.row(i) for i in range(len(self))]

    def subset(self, idx) -> "PauliTable":
        idx = np.asarray(idx, dtype=np.int64)
        return PauliTable(self.x[idx], self.z[idx], self.phase[idx])

    def columns(self, cols) -> "PauliTable":
        """Restrict to a subset of qubits, keeping the phase exponent unchanged."""
        cols = np.asarray(cols, dtype=np.int64)
        return PauliTable(self.x[:, cols], self.z[:, cols], self.phase.copy())

    def symplectic(self) -> np.ndarray:
        return np.hstack([self.x, self.z])

    def hermitian_signs(self) -> np.ndarray:
        """+1/-1 (or +-i for non-Hermitian rows encoded as 1,3) sign exponents relative to the Hermitian form."""
        return (self.phase - np.count_nonzero(self.x & self.z, axis=1)) % 4

    def rowmul(self, h: int, i: int):
        """Row ``h`` becomes ``row_h * row_i``."""
        self.phase[h] = (self.phase[h] + self.phase[i] + 2 * np.count_nonzero(self.z[h] & self.x[i])) % 4
        self.x[h] ^= self.x[i]
        self.z[h] ^= self.z[i]

    def rowmul_many(self, hs, i: int):
        hs = np.asarray(hs, dtype=np.int64)
        if len(hs) == 0:
            return
        self.phase[hs] = (self.phase[hs] + self.phase[i] + 2 * np.count_nonzero(self.z[hs] & self.x[i], axis=1)) % 4
        self.x[hs] ^= self.x[i]
        self.z[hs] ^= self.z[i]

    def swap_rows(self, a: int, b: int):
        for arr in (self.x, self.z, self.phase):
            arr[[a, b]] = arr[[b, a]]

    # ---- gate conjugation P -> g P g^dag ----
    def h(self, q):
        x, z = self.x[:, q].copy(), self.z[:, q].copy()
        self.phase += 2 * (x & z)
        self.x[:, q], self.z[:, q] = z, x

    def s(self, q):
        self.phase += self.x[:, q]
        self.z[:, q] ^= self.x[:, q]

    def sdg(self, q):
        self.phase -= self.x[:, q]
        self.z[:, q] ^= self.x[:, q]

    def pauli_x(self, q):
        self.phase += 2 * self.z[:, q]

    def pauli_z(self, q):
        self.phase += 2 * self.x[:, q]

    def pauli_y(self, q):
        self.phase += 2 * (self.x[:, q] ^ self.z[:, q])

    def cx(self, c, t):
        self.x[:, t] ^= self.x[:, c]
        self.z[:, c] ^= self.z[:, t]

    def cz(self, a, b):
        self.phase += 2 * (self.x[:, a] & self.x[:, b])
        self.z[:, a] ^= self.x[:, b]
        self.z[:, b] ^= self.x[:, a]

    def swap(self, a, b):
        self.x[:, [a, b]] = self.x[:, [b, a]]
        self.z[:, [a, b]] = self.z[:, [b, a]]

    _DISPATCH = {"H": "h", "S": "s", "SDG": "sdg", "X": "pauli_x", "Y": "pauli_y", "Z": "pauli_z",
                 "CX": "cx", "CZ": "cz", "SWAP": "swap"}

    def apply(self, gate: Gate, inverse: bool = False):
        """Conjugate by ``gate`` (or by its inverse)."""
        kind = gate.kind
        if inverse:
            kind = {"S": "SDG", "SDG": "S"}.get(kind, kind)
        name = self._DISPATCH.get(kind)
        if name is None:
            raise NotCliffordError(f"gate {gate.kind} is not Clifford")
        getattr(self, name)(*gate.qubits)
        self.phase %= 4

    def apply_circuit(self, gates, inverse: bool = False):
        """Forward: ``P -> U P U^dag``.  Inverse: ``P -> U^dag P U``."""
        seq = reversed(list(gates)) if inverse else gates
        for g in seq:
            self.apply(g, inverse)
        return self


@dataclass
class CliffordTableau:
    """Images of ``X_j`` and ``Z_j`` under ``P -> U P U^dag``, with signs."""

    num_qubits: int
    table: PauliTable  # rows 0..n-1 are X images, n..2n-1 are Z images

    @classmethod
    def identity(cls, n: int) -> "CliffordTableau":
        eye = np.eye(n, dtype=bool)
        zero = np.zeros((n, n), dtype=bool)
        return cls(n, PauliTable(np.vstack([eye, zero]), np.vstack([zero, eye]), np.zeros(2 * n, np.int64)))

    @classmethod
    def from_images(cls, x_images, z_images) -> "CliffordTableau":
        rows = list(x_images) + list(z_images)
        n = len(x_images)
        t = cls(n, PauliTable.from_paulis(rows, n) if rows else PauliTable.empty(0))
        t.validate()
        return t

    @classmethod
    def from_symplectic(cls, X: np.ndarray, Z: np.ndarray, x_phase=None, z_phase=None) -> "CliffordTableau":
        """Build from image vectors; default signs are the Hermitian +1 ones."""
        n = X.shape[0]
        sx, sz = np.vstack([X, Z])[:, :n], np.vstack([X, Z])[:, n:]
        phase = np.count_nonzero(sx & sz, axis=1)
        if x_phase is not None:
            phase[:n] += x_phase
        if z_phase is not None:
            phase[n:] += z_phase
        return cls(n, PauliTable(sx, sz, phase))

    def validate(self):
        n = self.num_qubits
        sym = self.table.symplectic()
        form = gf2.symplectic_form(sym, sym)
        want = np.zeros((2 * n, 2 * n), dtype=bool)
        want[np.arange(n), np.arange(n) + n] = True
        want[np.arange(n) + n, np.arange(n)] = True
        if not np.array_equal(form, want):
            raise ValueError("images do not satisfy the Pauli commutation relations")
        if np.any(self.table.hermitian_signs() % 2):
            raise ValueError("images must be Hermitian")

    def copy(self):
        return CliffordTableau(self.num_qubits, self.table.copy())

    def x_image(self, j) -> PauliString:
        return self._images()[j]

    def z_image(self, j) -> PauliString:
        return self._images()[self.num_qubits + j]

    def _images(self):
        cache = getattr(self, "_cache", None)
        if cache is None:
            cache = self.table.rows()
            self._cache = cache
        return cache

    def __eq__(self, other):
        return (isinstance(other, CliffordTableau) and self.num_qubits == other.num_qubits
                and np.array_equal(self.table.x, other.table.x) and np.array_equal(self.table.z, other.table.z)
                and np.array_equal(self.table.phase, other.table.phase))

    def apply_gate(self, gate: Gate):
        """Append ``gate`` after the current unitary."""
        self.table.apply(gate)
        self._cache = None
        return self

    def conjugate(self, p: PauliString) -> PauliString:
        return conjugate_pauli(self, p)

    def inverse(self) -> "CliffordTableau":
        return tableau_inverse(self)

    def then(self, other: "CliffordTableau") -> "CliffordTableau":
        """Tableau of ``other . self`` (self applied first)."""
        return compose(self, other)

    def power(self, k: int) -> "CliffordTableau":
        out = CliffordTableau.identity(self.num_qubits)
        for _ in range(k):
            out = compose(out, self)
        return out


def tableau_from_circuit(gates, num_qubits: int) -> CliffordTableau:
    """Tableau of the circuit; raises :class:`NotCliffordError` on a non-Clifford gate."""
    t = CliffordTableau.identity(num_qubits)
    t.table.apply_circuit(gates)
    return t


def conjugate_pauli(t: CliffordTableau, p: PauliString) -> PauliString:
    """``U p U^dag`` with exact phase."""
    n = t.num_qubits
    imgs = t._images()
    acc = PauliString(n, 0, 0, p.phase)
    x, z = p.x, p.z
    j = 0
    while x:
        if x & 1:
            acc = multiply(acc, imgs[j])
        x >>= 1
        j += 1
    j = 0
    while z:
        if z & 1:
            acc = multiply(acc, imgs[n + j])
        z >>= 1
        j += 1
    return acc


def conjugate_table(t: CliffordTableau, tab: PauliTable) -> PauliTable:
    return PauliTable.from_paulis([conjugate_pauli(t, p) for p in tab.rows()], t.num_qubits)


def compose(first: CliffordTableau, second: CliffordTableau) -> CliffordTableau:
    """Tableau of ``second . first``."""
    rows = [conjugate_pauli(second, p) for p in first._images()]
    return CliffordTableau(first.num_qubits, PauliTable.from_paulis(rows, first.num_qubits)
                           if rows else PauliTable.empty(0))


def tableau_inverse(t: CliffordTableau) -> CliffordTableau:
    n = t.num_qubits
    if n == 0:
        return t.copy()
    s = t.table.symplectic().astype(np.int64)
    # S Omega S^T = Omega  =>  S^{-1} = Omega S^T Omega
    omega = np.zeros((2 * n, 2 * n), dtype=np.int64)
    omega[:n, n:] = np.eye(n, dtype=np.int64)
    omega[n:, :n] = np.eye(n, dtype=np.int64)
    sinv = (omega @ s.T @ omega) % 2 == 1
    inv = CliffordTableau.from_symplectic(sinv[:n], sinv[n:])
    rows = inv.table.rows()
    fixed = []
    for j, q in enumerate(rows):
        img = conjugate_pauli(t, q)
        fixed.append(q if img.phase == 0 else -q)
    return CliffordTableau(n, PauliTable.from_paulis(fixed, n))


def compile_tableau(t: CliffordTableau) -> list[Gate]:
    """A circuit over {H, S, Sdg, CX, CZ, SWAP, X, Y, Z} whose tableau equals ``t`` exactly.

    The tableau is reduced to the identity by appending gates qubit by qubit;
    the circuit is the inverse of that reduction.  Uses O(n^2) gates.
    """
    n = t.num_qubits
    work = t.table.copy()
    ops: list[Gate] = []

    def do(kind, *qs):
        g = Gate(kind, qs)
        work.apply(g)
        ops.append(g)

    xr = work.x  # views into the working table
    zr = work.z
    for j in range(n):
        # X image of qubit j -> +-X_j
        row = j
        if not xr[row, j]:
            cand = np.nonzero(xr[row, j:])[0]
            if len(cand):
                do("SWAP", j, j + cand[0])
            else:
                k = j + np.nonzero(zr[row, j:])[0][0]
                if k != j:
                    do("SWAP", j, k)
                do("H", j)
        if zr[row, j]:
            do("S", j)
        for l in range(j + 1, n):
            if zr[row, l]:
                do("S" if xr[row, l] else "H", l)
        for l in range(j + 1, n):
            if xr[row, l]:
                do("CX", j, l)
        # Z image of qubit j -> +-Z_j, using gates that fix X_j
        row = n + j
        for l in range(j + 1, n):
            if xr[row, l]:
                if zr[row, l]:
                    do("S", l)
                do("H", l)
        for l in range(j + 1, n):
            if zr[row, l]:
                do("CX", l, j)
        if xr[row, j]:
            do("H", j)
            do("S", j)
            do("H", j)
    # signs
    for j in range(n):
        sx = (work.phase[j] - int(xr[j, j] & zr[j, j])) % 4
        sz = (work.phase[n + j] - int(xr[n + j, j] & zr[n + j, j])) % 4
        if sx == 2 and sz == 2:
            do("Y", j)
        elif sx == 2:
            do("Z", j)
        elif sz == 2:
            do("X", j)
    return [g.inverse() for g in reversed(ops)]
