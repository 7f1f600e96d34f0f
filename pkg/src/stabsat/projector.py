"""Stabilizer projectors: conjugation, single-qubit projection and the bipartite canonical form."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np

from . import gf2
from .pauli import PauliString
from .tableau import CliffordTableau, PauliTable, compose, conjugate_pauli, tableau_inverse

DENSE_CAP = 12


@dataclass
class StabilizerProjector:
    """``2**log2_scalar * prod_g (I + g)/2`` over commuting independent Hermitian ``g``."""

    num_qubits: int
    table: PauliTable
    log2_scalar: int = 0
    is_zero: bool = False

    @classmethod
    def from_generators(cls, gens, num_qubits: int | None = None, log2_scalar: int = 0, check=True):
        gens = list(gens)
        n = num_qubits if num_qubits is not None else gens[0].num_qubits
        tab = PauliTable.from_paulis(gens, n)
        p = cls(n, tab, log2_scalar)
        if check:
            p.validate()
        return p

    @classmethod
    def identity(cls, n: int) -> "StabilizerProjector":
        return cls(n, PauliTable.empty(n))

    @classmethod
    def zero(cls, n: int) -> "StabilizerProjector":
        return cls(n, PauliTable.empty(n), 0, True)

    @property
    def generators(self) -> list[PauliString]:
        return self.table.rows()

    @property
    def num_generators(self) -> int:
        return len(self.table)

    def copy(self):
        return StabilizerProjector(self.num_qubits, self.table.copy(), self.log2_scalar, self.is_zero)

    def validate(self):
        if np.any(self.table.hermitian_signs() % 2):
            raise ValueError("generators must be Hermitian")
        sym = self.table.symplectic()
        if len(sym):
            if np.any(gf2.symplectic_form(sym, sym)):
                raise ValueError("generators do not commute")
            if gf2.rank(sym) != len(sym):
                raise ValueError("generators are not independent")


def dense_matrix(p: StabilizerProjector, cap: int = DENSE_CAP) -> np.ndarray:
    n = p.num_qubits
    if n > cap:
        raise ValueError(f"{n} qubits exceeds the dense cap {cap}")
    dim = 2 ** n
    if p.is_zero:
        return np.zeros((dim, dim), dtype=complex)
    out = np.eye(dim, dtype=complex) * (2.0 ** p.log2_scalar)
    eye = np.eye(dim, dtype=complex)
    for g in p.generators:
        out = out @ ((eye + g.to_matrix()) / 2)
    return out


def conjugate_projector(p: StabilizerProjector, t: CliffordTableau) -> StabilizerProjector:
    """``U Pi U^dag`` for the tableau of ``U``."""
    if t.num_qubits != p.num_qubits:
        raise ValueError("size mismatch")
    rows = [conjugate_pauli(t, g) for g in p.generators]
    tab = PauliTable.from_paulis(rows, p.num_qubits)
    return StabilizerProjector(p.num_qubits, tab, p.log2_scalar, p.is_zero)


def conjugate_projector_circuit(p: StabilizerProjector, gates, inverse: bool = False) -> StabilizerProjector:
    """Gate-by-gate version: ``U Pi U^dag``, or ``U^dag Pi U`` when ``inverse``."""
    out = p.copy()
    out.table.apply_circuit(gates, inverse=inverse)
    return out


def _drop_column(tab: PauliTable, q: int) -> PauliTable:
    keep = [j for j in range(tab.num_qubits) if j != q]
    return tab.columns(keep)


def project_qubit_zero(p: StabilizerProjector, qubit: int) -> tuple[Fraction, StabilizerProjector]:
    """``<0|_q Pi |0>_q = sigma * Pi'`` with ``sigma`` in {0, 1/2, 1}."""
    n = p.num_qubits
    if not 0 <= qubit < n:
        raise IndexError("qubit out of range")
    if p.is_zero:
        return Fraction(0), StabilizerProjector.zero(n - 1)
    tab = p.table.copy()
    hits = np.nonzero(tab.x[:, qubit])[0]
    if len(hits):
        piv = int(hits[0])
        tab.rowmul_many(hits[1:], piv)
        keep = [i for i in range(len(tab)) if i != piv]
        rest = _drop_column(tab.subset(keep), qubit)
        return Fraction(1, 2), StabilizerProjector(n - 1, rest, p.log2_scalar)
    rest = _drop_column(tab, qubit)
    # a dependency among the restricted rows means +-Z_q lies in the group
    k = len(rest)
    dead = None
    done = np.zeros(k, dtype=bool)
    for j in range(n - 1):
        for arr in (rest.x, rest.z):
            cand = np.nonzero(arr[:, j] & ~done)[0]
            if len(cand) == 0:
                continue
            piv = int(cand[0])
            others = np.nonzero(arr[:, j])[0]
            rest.rowmul_many(others[others != piv], piv)
            done[piv] = True
    left = np.nonzero(~done)[0]
    if len(left) == 0:
        # restore the original (unreduced) generators for readability
        return Fraction(1), StabilizerProjector(n - 1, _drop_column(p.table, qubit), p.log2_scalar)
    assert len(left) == 1
    dead = int(left[0])
    if rest.phase[dead] % 4 == 2:
        return Fraction(0), StabilizerProjector.zero(n - 1)
    keep = [i for i in range(k) if i != dead]
    return Fraction(1), StabilizerProjector(n - 1, rest.subset(keep), p.log2_scalar)


# ---------------------------------------------------------------------------
# bipartite canonical form


def pauli_tableau(p: PauliString) -> CliffordTableau:
    """Tableau of conjugation by the Pauli ``p`` (signs only)."""
    n = p.num_qubits
    t = CliffordTableau.identity(n)
    for j in range(n):
        if (p.z >> j) & 1:
            t.table.phase[j] += 2
        if (p.x >> j) & 1:
            t.table.phase[n + j] += 2
    t.table.phase %= 4
    return t


def tensor_tableau(parts, n: int) -> CliffordTableau:
    """Direct sum of tableaus placed on the given qubit positions of an ``n``-qubit register."""
    t = CliffordTableau.identity(n)
    for sub, pos in parts:
        m = sub.num_qubits
        pos = np.asarray(pos, dtype=np.int64)
        for j in range(m):
            for src, dst in ((j, pos[j]), (m + j, n + pos[j])):
                t.table.x[dst] = False
                t.table.z[dst] = False
                t.table.x[dst, pos] = sub.table.x[src]
                t.table.z[dst, pos] = sub.table.z[src]
                t.table.phase[dst] = sub.table.phase[src]
    return t


@dataclass
class CanonicalBipartiteForm:
    """Local Cliffords and tags putting a projector into product form across a cut.

    Slots are positions in the local registers (slot ``j`` of L is qubit
    ``left[j]``).  Slot order on each side: EPR pairs, Copy pairs, Zero, Free.
    The local maps are ``D_L P_L`` and ``D_R P_R`` (tag frame -> original
    frame), so ``C_L = P_L D_L^dag`` and ``C_R = P_R D_R^dag``.
    """

    left: list
    right: list
    num_epr: int
    num_copy: int
    num_zero_left: int
    num_zero_right: int
    d_left: CliffordTableau
    d_right: CliffordTableau
    pauli_left: PauliString
    pauli_right: PauliString
    log2_scalar: int = 0

    @property
    def l1(self):
        return list(range(self.num_epr))

    @property
    def l2(self):
        return list(range(self.num_epr, self.num_epr + self.num_copy))

    @property
    def l_zero(self):
        a = self.num_epr + self.num_copy
        return list(range(a, a + self.num_zero_left))

    @property
    def l_free(self):
        return list(range(self.num_epr + self.num_copy + self.num_zero_left, len(self.left)))

    @property
    def r1(self):
        return self.l1

    @property
    def r2(self):
        return self.l2

    @property
    def r_zero(self):
        a = self.num_epr + self.num_copy
        return list(range(a, a + self.num_zero_right))

    @property
    def r_free(self):
        return list(range(self.num_epr + self.num_copy + self.num_zero_right, len(self.right)))

    def tags(self) -> dict:
        """``{('L', slot) or ('R', slot): (tag, partner_slot or None)}``."""
        out = {}
        for side, zero, free in (("L", self.l_zero, self.l_free), ("R", self.r_zero, self.r_free)):
            other = "R" if side == "L" else "L"
            for j in self.l1:
                out[(side, j)] = ("EPR", (other, j))
            for j in self.l2:
                out[(side, j)] = ("Copy", (other, j))
            for j in zero:
                out[(side, j)] = ("Zero", None)
            for j in free:
                out[(side, j)] = ("Free", None)
        return out

    @cached_property
    def c_left(self) -> CliffordTableau:
        return compose(tableau_inverse(self.d_left), pauli_tableau(self.pauli_left))

    @cached_property
    def c_right(self) -> CliffordTableau:
        return compose(tableau_inverse(self.d_right), pauli_tableau(self.pauli_right))

    def tag_projector(self) -> StabilizerProjector:
        """The product of |0><0|, EPR and copy projectors on the original register."""
        L, R = self.left, self.right
        n = len(L) + len(R)
        gens = []
        for j in self.l1:
            gens.append(PauliString(n, (1 << L[j]) | (1 << R[j]), 0))
            gens.append(PauliString(n, 0, (1 << L[j]) | (1 << R[j])))
        for j in self.l2:
            gens.append(PauliString(n, 0, (1 << L[j]) | (1 << R[j])))
        for j in self.l_zero:
            gens.append(PauliString(n, 0, 1 << L[j]))
        for j in self.r_zero:
            gens.append(PauliString(n, 0, 1 << R[j]))
        return StabilizerProjector(n, PauliTable.from_paulis(gens, n), self.log2_scalar)

    def reconstruct(self) -> StabilizerProjector:
        """``(C_L x C_R)^dag Pi' (C_L x C_R)``; equals the input projector."""
        n = len(self.left) + len(self.right)
        local_l = compose(pauli_tableau(self.pauli_left), self.d_left)
        local_r = compose(pauli_tableau(self.pauli_right), self.d_right)
        full = tensor_tableau([(local_l, self.left), (local_r, self.right)], n)
        return conjugate_projector(self.tag_projector(), full)


class _Rows:
    """Row-operation helper over a PauliTable with columns ordered L then R."""

    def __init__(self, tab: PauliTable, nl: int):
        self.t = tab
        self.nl = nl

    def eliminate(self, rows, cols):
        """Full reduction of ``rows`` on symplectic columns ``cols`` (list of (array, qubit)).

        Returns (pivot_rows, rest_rows) preserving the discovery order.
        """
        rows = list(rows)
        free = list(rows)
        pivots = []
        for arr_name, q in cols:
            arr = getattr(self.t, arr_name)
            sub = [r for r in free if arr[r, q]]
            if not sub:
                continue
            piv = sub[0]
            targets = [r for r in rows if r != piv and arr[r, q]]
            self.t.rowmul_many(targets, piv)
            pivots.append((piv, arr_name, q))
            free.remove(piv)
        return pivots, free


def _sym_cols(qubits):
    out = []
    for q in qubits:
        out.append(("x", q))
        out.append(("z", q))
    return out


def bipartite_canonical_form(p: StabilizerProjector, left, right) -> CanonicalBipartiteForm:
    """Split ``p`` across the cut ``left | right`` into local Cliffords and product tags."""
    if p.is_zero:
        raise ValueError("zero projector has no canonical form")
    left = [int(q) for q in left]
    right = [int(q) for q in right]
    if sorted(left + right) != list(range(p.num_qubits)):
        raise ValueError("left and right must partition the qubits")
    nl, nr = len(left), len(right)
    tab = p.table.columns(left + right)
    ops = _Rows(tab, nl)
    k = len(tab)
    # 1. rows with an L pivot (A) versus rows living only on R (B)
    piv_a, rest = ops.eliminate(range(k), _sym_cols(range(nl)))
    A = [r for r, _, _ in piv_a]
    B = rest
    # 2. reduce B on R, then clear B's pivots out of A
    piv_b, b_rest = ops.eliminate(B, _sym_cols(range(nl, nl + nr)))
    assert not b_rest, "dependent generators"
    for r, name, q in piv_b:
        arr = getattr(tab, name)
        ops.t.rowmul_many([a for a in A if arr[a, q]], r)
    # 3. A rows with no R support (A0) versus the rest (A1)
    piv_a1, A0 = ops.eliminate(A, _sym_cols(range(nl, nl + nr)))
    A1 = [r for r, _, _ in piv_a1]
    # 4. symplectic Gram-Schmidt on A1 under the L-part form
    sym = tab.symplectic()
    lcols = np.r_[0:nl, nl + nr:2 * nl + nr]

    def om(a, b):
        return gf2.omega(sym[a, lcols], sym[b, lcols])

    pairs, copies = [], []
    pool = list(A1)
    while pool:
        u = pool.pop(0)
        w = next((y for y in pool if om(u, y)), None)
        if w is None:
            copies.append(u)
            continue
        pool.remove(w)
        pairs.append((u, w))
        for y in pool:
            a, b = om(y, w), om(y, u)
            if a:
                tab.rowmul(y, u)
            if b:
                tab.rowmul(y, w)
            if a or b:
                sym[y] = np.concatenate([tab.x[y], tab.z[y]])
    # Hermitian parts and signs
    eps = (tab.phase - np.count_nonzero(tab.x & tab.z, axis=1)) % 4  # 0 or 2

    def lvec(r):
        return np.concatenate([tab.x[r, :nl], tab.z[r, :nl]])

    def rvec(r):
        return np.concatenate([tab.x[r, nl:], tab.z[r, nl:]])

    e, c = len(pairs), len(copies)
    zl_fixed, xl_fixed, zr_fixed, xr_fixed = {}, {}, {}, {}
    pl_x = pl_z = pr_x = pr_z = 0
    for j, (g, h) in enumerate(pairs):
        xl_fixed[j], zl_fixed[j] = lvec(g), lvec(h)
        xr_fixed[j], zr_fixed[j] = rvec(g), rvec(h)
        if eps[g]:
            pr_z |= 1 << j
        if eps[h]:
            pr_x |= 1 << j
    for j, r in enumerate(copies, start=e):
        zl_fixed[j], zr_fixed[j] = lvec(r), rvec(r)
        if eps[r]:
            pr_x |= 1 << j
    for j, r in enumerate(A0, start=e + c):
        zl_fixed[j] = lvec(r)
        if eps[r]:
            pl_x |= 1 << j
    for j, (r, _, _) in enumerate(piv_b, start=e + c):
        zr_fixed[j] = rvec(r)
        if eps[r]:
            pr_x |= 1 << j
    XL, ZL = gf2.complete_symplectic_basis(nl, zl_fixed, xl_fixed)
    XR, ZR = gf2.complete_symplectic_basis(nr, zr_fixed, xr_fixed)
    return CanonicalBipartiteForm(
        left=left, right=right, num_epr=e, num_copy=c, num_zero_left=len(A0), num_zero_right=len(piv_b),
        d_left=CliffordTableau.from_symplectic(XL, ZL), d_right=CliffordTableau.from_symplectic(XR, ZR),
        pauli_left=PauliString(nl, pl_x, pl_z), pauli_right=PauliString(nr, pr_x, pr_z),
        log2_scalar=p.log2_scalar,
    )
