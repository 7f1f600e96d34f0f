"""Pauli strings with phase in the ``i^e X^x Z^z`` convention.

Qubit ``j`` is bit ``j`` of the ``x`` and ``z`` bitsets.  Python integers act
as arbitrary-width word arrays, so a single Pauli on hundreds of qubits costs a
handful of machine words.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

_PX = np.array([[0, 1], [1, 0]], dtype=complex)
_PZ = np.array([[1, 0], [0, -1]], dtype=complex)
_I2 = np.eye(2, dtype=complex)

_PREFIX = {0: "+", 1: "+i", 2: "-", 3: "-i"}


def popcount(v: int) -> int:
    return int(v).bit_count()


@dataclass(frozen=True)
class PauliString:
    """The operator ``i**phase * X^x * Z^z`` on ``num_qubits`` qubits."""

    num_qubits: int
    x: int = 0
    z: int = 0
    phase: int = 0

    def __post_init__(self):
        object.__setattr__(self, "phase", self.phase % 4)
        if (self.x | self.z) >> self.num_qubits:
            raise ValueError("bits set beyond num_qubits")

    @classmethod
    def identity(cls, n: int) -> "PauliString":
        return cls(n)

    @classmethod
    def single(cls, n: int, q: int, kind: str, sign: int = 1) -> "PauliString":
        """Hermitian single-qubit Pauli ``kind`` in {'X','Y','Z'} on qubit ``q``."""
        return cls.from_bits(n, {"X": (1 << q, 0), "Y": (1 << q, 1 << q), "Z": (0, 1 << q)}[kind], sign)

    @classmethod
    def from_bits(cls, n, xz, sign=1) -> "PauliString":
        """Hermitian Pauli with the given bits and sign +1/-1."""
        x, z = xz
        e = popcount(x & z) + (0 if sign == 1 else 2)
        return cls(n, x, z, e)

    @classmethod
    def from_label(cls, label: str) -> "PauliString":
        """Parse ``[+|-|+i|-i|i]`` followed by characters of ``IXYZ``; qubit 0 is leftmost."""
        s = label.strip()
        e = 0
        if s.startswith("+"):
            s = s[1:]
        elif s.startswith("-"):
            e = 2
            s = s[1:]
        if s.startswith("i"):
            e += 1
            s = s[1:]
        x = z = 0
        for j, c in enumerate(s):
            if c == "X":
                x |= 1 << j
            elif c == "Z":
                z |= 1 << j
            elif c == "Y":
                x |= 1 << j
                z |= 1 << j
                e += 1
            elif c not in "I_":
                raise ValueError(f"bad Pauli character {c!r} in {label!r}")
        return cls(len(s), x, z, e)

    @property
    def weight(self) -> int:
        return popcount(self.x | self.z)

    def hermitian_sign(self) -> complex:
        """Coefficient in front of the product of Hermitian single-qubit factors."""
        return 1j ** ((self.phase - popcount(self.x & self.z)) % 4)

    def is_hermitian(self) -> bool:
        return (self.phase - popcount(self.x & self.z)) % 2 == 0

    def is_identity_up_to_phase(self) -> bool:
        return self.x == 0 and self.z == 0

    def hermitian(self) -> "PauliString":
        """Same bits with the canonical +1 Hermitian phase."""
        return PauliString(self.num_qubits, self.x, self.z, popcount(self.x & self.z))

    def with_phase(self, e: int) -> "PauliString":
        return PauliString(self.num_qubits, self.x, self.z, e)

    def __mul__(self, other: "PauliString") -> "PauliString":
        return multiply(self, other)

    def __neg__(self) -> "PauliString":
        return PauliString(self.num_qubits, self.x, self.z, self.phase + 2)

    def dagger(self) -> "PauliString":
        # (X^x Z^z)^dag = Z^z X^x = (-1)^{x.z} X^x Z^z
        return PauliString(self.num_qubits, self.x, self.z, -self.phase + 2 * popcount(self.x & self.z))

    def get(self, q: int) -> str:
        b = ((self.x >> q) & 1, (self.z >> q) & 1)
        return {(0, 0): "I", (1, 0): "X", (0, 1): "Z", (1, 1): "Y"}[b]

    def __str__(self) -> str:
        ny = popcount(self.x & self.z)
        body = "".join(self.get(q) for q in range(self.num_qubits))
        return _PREFIX[(self.phase - ny) % 4] + body

    def to_matrix(self) -> np.ndarray:
        """Dense ``2^n x 2^n`` matrix; qubit 0 is the least significant index bit."""
        n = self.num_qubits
        if n == 0:
            return np.array([[1j ** self.phase]])
        mats = []
        for q in reversed(range(n)):
            m = _I2
            if (self.x >> q) & 1:
                m = _PX
            if (self.z >> q) & 1:
                m = m @ _PZ
            mats.append(m)
        return (1j ** self.phase) * reduce(np.kron, mats)

    def bits(self) -> tuple[np.ndarray, np.ndarray]:
        return int_to_bits(self.x, self.num_qubits), int_to_bits(self.z, self.num_qubits)


def multiply(p: PauliString, q: PauliString) -> PauliString:
    """Operator product ``p * q`` with exact phase."""
    if p.num_qubits != q.num_qubits:
        raise ValueError("size mismatch")
    e = p.phase + q.phase + 2 * popcount(p.z & q.x)
    return PauliString(p.num_qubits, p.x ^ q.x, p.z ^ q.z, e)


def commutes(p: PauliString, q: PauliString) -> bool:
    return popcount((p.x & q.z) ^ (p.z & q.x)) % 2 == 0


def compact_bits(v: int, keep: list[int]) -> int:
    out = 0
    for k, q in enumerate(keep):
        if (v >> q) & 1:
            out |= 1 << k
    return out


def spread_bits(v: int, positions: list[int]) -> int:
    """Inverse of :func:`compact_bits`: bit k of ``v`` goes to ``positions[k]``."""
    out = 0
    for k, q in enumerate(positions):
        if (v >> k) & 1:
            out |= 1 << q
    return out


def embed(p: PauliString, positions: list[int], n: int) -> PauliString:
    return PauliString(n, spread_bits(p.x, positions), spread_bits(p.z, positions), p.phase)


def restrict(p: PauliString, keep: list[int]) -> PauliString:
    """Drop every qubit not in ``keep`` (no phase bookkeeping for dropped factors)."""
    return PauliString(len(keep), compact_bits(p.x, keep), compact_bits(p.z, keep), 0)


def diagonal_restrict(p: PauliString, pinned) -> tuple[complex, PauliString | None]:
    """Evaluate ``<0|_pinned p |0>_pinned``.

    Returns ``(scalar, rest)``.  The scalar is 0 (and ``rest`` is None) when a
    pinned qubit carries X or Y.  Otherwise the scalar is ``i**phase`` and
    ``rest`` is ``X^x Z^z`` on the unpinned qubits (kept in ascending order)
    with phase 0.  Z factors on pinned qubits contribute +1.
    """
    pinned = set(int(q) for q in pinned)
    mask = 0
    for q in pinned:
        mask |= 1 << q
    if p.x & mask:
        return 0j, None
    keep = [q for q in range(p.num_qubits) if q not in pinned]
    return 1j ** p.phase, restrict(p, keep)


def int_to_bits(v: int, n: int) -> np.ndarray:
    if n == 0:
        return np.zeros(0, dtype=bool)
    nbytes = (n + 7) // 8
    raw = np.frombuffer(int(v).to_bytes(nbytes, "little"), dtype=np.uint8)
    return np.unpackbits(raw, bitorder="little")[:n].astype(bool)


def bits_to_int(b: np.ndarray) -> int:
    if len(b) == 0:
        return 0
    return int.from_bytes(np.packbits(np.asarray(b, dtype=bool), bitorder="little").tobytes(), "little")
