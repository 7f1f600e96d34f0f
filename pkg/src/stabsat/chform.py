"""Phase-exact stabilizer state simulation in CH form.

A state is stored as ``omega * U_C U_H |s>`` where ``U_C`` fixes ``|0...0>``
(built from S, CZ and CX), ``U_H`` is a layer of Hadamards on the qubits with
``v_j = 1`` and ``s`` is a basis string.  ``U_C`` is kept as the matrices

    U_C^dag Z_p U_C = prod_j Z_j^{G[p, j]}
    U_C^dag X_p U_C = i^{gamma[p]} prod_j X_j^{F[p, j]} Z_j^{M[p, j]}

Amplitudes come out as an exact ``zeta_8^k * 2^(h/2)`` value, so inner
products and traces carry no rounding error.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .circuit import Gate
from .tableau import CliffordTableau, compile_tableau
from . import gf2


@dataclass(frozen=True)
class ExactScalar:
    """``zeta_8**k * 2**(h/2)``, or exactly zero."""

    k: int = 0
    h: int = 0
    zero: bool = False

    def __post_init__(self):
        object.__setattr__(self, "k", 0 if self.zero else self.k % 8)
        if self.zero:
            object.__setattr__(self, "h", 0)

    @classmethod
    def zero_value(cls):
        return cls(zero=True)

    def __mul__(self, other: "ExactScalar") -> "ExactScalar":
        if self.zero or other.zero:
            return ExactScalar(zero=True)
        return ExactScalar(self.k + other.k, self.h + other.h)

    def conjugate(self) -> "ExactScalar":
        return self if self.zero else ExactScalar(-self.k, self.h)

    def __complex__(self):
        if self.zero:
            return 0j
        return cmath.exp(1j * math.pi * self.k / 4) * 2.0 ** (self.h / 2)

    def __abs__(self):
        return 0.0 if self.zero else 2.0 ** (self.h / 2)

    def zeta8_coords(self) -> tuple[int, int, int, int]:
        """Integer coordinates ``(c0, c1, c2, c3)`` with value ``sum c_j zeta_8^j``.

        Uses ``sqrt 2 = zeta_8 - zeta_8^3`` and ``zeta_8^4 = -1``.
        """
        if self.zero:
            return (0, 0, 0, 0)
        c = [0, 0, 0, 0]
        base = 2 ** (self.h // 2) if self.h >= 0 else None
        if base is None:
            raise ValueError("negative powers of two are not integral")
        terms = [(self.k, 1)]
        if self.h % 2:
            terms = [(self.k + 1, 1), (self.k + 3, -1)]
        for e, sgn in terms:
            e %= 8
            if e >= 4:
                e -= 4
                sgn = -sgn
            c[e] += sgn * base
        return tuple(c)

    def __str__(self):
        if self.zero:
            return "0"
        return f"zeta8^{self.k} * 2^({self.h}/2)"


class CHState:
    """Stabilizer state in CH form on ``n`` qubits, initialized to ``|0^n>``."""

    def __init__(self, n: int):
        self.n = n
        self.G = np.eye(n, dtype=bool)
        self.F = np.eye(n, dtype=bool)
        self.M = np.zeros((n, n), dtype=bool)
        self.gamma = np.zeros(n, dtype=np.int64)
        self.v = np.zeros(n, dtype=bool)
        self.s = np.zeros(n, dtype=bool)
        self.omega = 0  # exponent of zeta_8; |omega| is always 1

    def copy(self) -> "CHState":
        c = CHState.__new__(CHState)
        c.n = self.n
        c.G, c.F, c.M = self.G.copy(), self.F.copy(), self.M.copy()
        c.gamma, c.v, c.s = self.gamma.copy(), self.v.copy(), self.s.copy()
        c.omega = self.omega
        return c

    # ---- left multiplication of U_C by C-type gates ----
    def _left_s(self, q):
        self.M[q] ^= self.G[q]
        self.gamma[q] = (self.gamma[q] - 1) % 4

    def _left_sdg(self, q):
        self.M[q] ^= self.G[q]
        self.gamma[q] = (self.gamma[q] + 1) % 4

    def _left_cz(self, q, r):
        self.M[q] ^= self.G[r]
        self.M[r] ^= self.G[q]

    def _left_cx(self, q, r):
        self.gamma[q] = (self.gamma[q] + self.gamma[r] + 2 * np.count_nonzero(self.M[q] & self.F[r])) % 4
        self.G[r] ^= self.G[q]
        self.F[q] ^= self.F[r]
        self.M[q] ^= self.M[r]

    # ---- right multiplication of U_C by C-type gates ----
    def _right_cx(self, q, r):
        self.G[:, q] ^= self.G[:, r]
        self.F[:, r] ^= self.F[:, q]
        self.M[:, q] ^= self.M[:, r]

    def _right_cz(self, q, r):
        self.gamma = (self.gamma + 2 * (self.F[:, q] & self.F[:, r])) % 4
        self.M[:, q] ^= self.F[:, r]
        self.M[:, r] ^= self.F[:, q]

    def _right_s(self, q):
        self.gamma = (self.gamma - self.F[:, q]) % 4
        self.M[:, q] ^= self.F[:, q]

    def _right_sdg(self, q):
        for _ in range(3):
            self._right_s(q)

    # ---- Paulis ----
    def _pull_pauli(self, e, x, z):
        """Act with ``i^e X(x) Z(z)`` on ``U_H |s>`` (after it has been pulled through U_C)."""
        v = self.v
        e = e + 2 * int(np.count_nonzero(x & z & v))
        x2 = np.where(v, z, x)
        z2 = np.where(v, x, z)
        e += 2 * int(np.count_nonzero(z2 & self.s))
        return e % 4, self.s ^ x2

    def _x_row(self, q):
        return int(self.gamma[q]), self.F[q].copy(), self.M[q].copy()

    def _z_row(self, q):
        return 0, np.zeros(self.n, dtype=bool), self.G[q].copy()

    def _pauli_rows(self, kind, q):
        if kind == "X":
            return self._x_row(q)
        if kind == "Z":
            return self._z_row(q)
        # Y = i X Z
        e1, x1, z1 = self._x_row(q)
        _, _, z2 = self._z_row(q)
        # (X(x1) Z(z1)) Z(z2) = X(x1) Z(z1 ^ z2)
        return 1 + e1, x1, z1 ^ z2

    def apply_pauli(self, kind, q):
        e, x, z = self._pauli_rows(kind, q)
        e, s = self._pull_pauli(e, x, z)
        self.s = s
        self.omega = (self.omega + 2 * e) % 8

    def apply_h(self, q):
        ea, xa, za = self._x_row(q)
        eb, xb, zb = self._z_row(q)
        ea, t = self._pull_pauli(ea, xa, za)
        eb, u = self._pull_pauli(eb, xb, zb)
        # H_q |phi> = omega U_C U_H (i^ea |t> + i^eb |u>) / sqrt 2
        if np.array_equal(t, u):
            d = (eb - ea) % 4
            if d == 1:
                self.omega = (self.omega + 2 * ea + 1) % 8
            elif d == 3:
                self.omega = (self.omega + 2 * ea - 1) % 8
            else:
                raise AssertionError("CH form lost normalization")
            self.s = t
            return
        diff = t ^ u
        v0 = np.nonzero(diff & ~self.v)[0]
        v1 = np.nonzero(diff & self.v)[0]
        if len(v0):
            q0 = int(v0[0])
            for j in v0[1:]:
                self._right_cx(q0, int(j))
            for j in v1:
                self._right_cz(q0, int(j))
        else:
            q0 = int(v1[0])
            for j in v1[1:]:
                self._right_cx(int(j), q0)
        # basis strings after the permutation: t' = t with t'_j ^= t_q on diff \ {q}
        others = diff.copy()
        others[q0] = False
        t2 = t.copy()
        if t[q0]:
            t2 ^= others
        y = bool(t2[q0])
        # single-qubit state on q0 is (c0|0> + c1|1>)/sqrt 2 up to the Hadamard
        c0, c1 = (eb, ea) if y else (ea, eb)
        cp = (c1 - c0) % 4  # c1/c0 = i^cp
        s_new = t2.copy()
        if not self.v[q0]:
            # c0 (|0> + i^cp |1>)/sqrt 2 = c0 S^[cp odd] H |[cp >= 2]>
            s_new[q0] = cp in (2, 3)
            if cp in (1, 3):
                self._right_s(q0)
            self.v[q0] = True
            self.omega = (self.omega + 2 * c0) % 8
        else:
            # H (|0> + i^cp |1>)/sqrt 2
            if cp == 0:
                self.v[q0], s_new[q0] = False, False
                self.omega = (self.omega + 2 * c0) % 8
            elif cp == 2:
                self.v[q0], s_new[q0] = False, True
                self.omega = (self.omega + 2 * c0) % 8
            else:
                # H S H |y> = e^{i pi/4} Sdg H Sdg |y>
                self._right_sdg(q0)
                s_new[q0] = cp == 3
                self.omega = (self.omega + 2 * c0 + (1 if cp == 1 else -1)) % 8
        self.s = s_new

    def apply(self, g: Gate):
        k, qs = g.kind, g.qubits
        if k == "H":
            self.apply_h(qs[0])
        elif k == "S":
            self._left_s(qs[0])
        elif k == "SDG":
            self._left_sdg(qs[0])
        elif k in ("X", "Y", "Z"):
            self.apply_pauli(k, qs[0])
        elif k == "CX":
            self._left_cx(*qs)
        elif k == "CZ":
            self._left_cz(*qs)
        elif k == "SWAP":
            a, b = qs
            self._left_cx(a, b)
            self._left_cx(b, a)
            self._left_cx(a, b)
        else:
            raise ValueError(f"gate {k} is not Clifford")
        return self

    def apply_circuit(self, gates):
        for g in gates:
            self.apply(g)
        return self

    def amplitude_zero(self) -> ExactScalar:
        """``<0...0|state>`` exactly."""
        if np.any(self.s & ~self.v):
            return ExactScalar(zero=True)
        return ExactScalar(self.omega, -int(np.count_nonzero(self.v)))

    def amplitude(self, bits) -> ExactScalar:
        c = self.copy()
        for j, b in enumerate(bits):
            if b:
                c.apply_pauli("X", j)
        return c.amplitude_zero()

    def to_vector(self) -> np.ndarray:
        n = self.n
        out = np.zeros(2 ** n, dtype=complex)
        for idx in range(2 ** n):
            out[idx] = complex(self.amplitude([(idx >> j) & 1 for j in range(n)]))
        return out


class StabilizerState:
    """A pure stabilizer state held as a preparation circuit from ``|0^n>``.

    The preparation circuit fixes the global phase; states built from
    generators take the phase of the compiled circuit.
    """

    def __init__(self, num_qubits: int, prep=()):
        self.num_qubits = num_qubits
        self.prep = tuple(prep)

    @classmethod
    def basis(cls, bits) -> "StabilizerState":
        bits = list(bits)
        return cls(len(bits), [Gate("X", (j,)) for j, b in enumerate(bits) if b])

    @classmethod
    def from_circuit(cls, gates, num_qubits: int) -> "StabilizerState":
        return cls(num_qubits, gates)

    @classmethod
    def from_generators(cls, gens) -> "StabilizerState":
        """State stabilized by ``n`` independent commuting Hermitian Paulis."""
        gens = list(gens)
        n = gens[0].num_qubits if gens else 0
        if len(gens) != n:
            raise ValueError("need exactly n generators")
        for a in range(n):
            if not gens[a].is_hermitian():
                raise ValueError("generators must be Hermitian")
            for b in range(a):
                if (gens[a].x & gens[b].z ^ gens[a].z & gens[b].x).bit_count() % 2:
                    raise ValueError("generators do not commute")
        from .tableau import PauliTable
        tab = PauliTable.from_paulis(gens, n)
        sym = tab.symplectic()
        if gf2.rank(sym) < n:
            raise ValueError("generator set is rank deficient")
        X, Z = gf2.complete_symplectic_basis(n, {j: sym[j] for j in range(n)}, {})
        signs = (tab.hermitian_signs() == 2).astype(np.int64) * 2
        t = CliffordTableau.from_symplectic(X, Z, z_phase=signs)
        return cls(n, compile_tableau(t))

    @property
    def generators(self):
        from .tableau import tableau_from_circuit
        t = tableau_from_circuit(self.prep, self.num_qubits)
        return [t.z_image(j) for j in range(self.num_qubits)]

    def ch_form(self) -> CHState:
        return CHState(self.num_qubits).apply_circuit(self.prep)

    def to_vector(self) -> np.ndarray:
        return self.ch_form().to_vector()


def stab_inner_product(a: StabilizerState, b: StabilizerState) -> ExactScalar:
    """Exact ``<a|b>`` including phase."""
    if a.num_qubits != b.num_qubits:
        raise ValueError("size mismatch")
    st = CHState(a.num_qubits).apply_circuit(b.prep)
    st.apply_circuit(g.inverse() for g in reversed(a.prep))
    return st.amplitude_zero()
