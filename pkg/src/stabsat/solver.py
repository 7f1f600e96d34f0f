"""QCSAT reduction pipeline, exact and randomized value computation, and witness extraction.

The pipeline turns a Clifford+T verifier into

    Val = gamma * 2^(t - r - l1) * max_sigma lambda_max(rho_R1(sigma))

where ``rho_R1(sigma)`` is a reduced density matrix of a ``t``-qubit state
built from magic states, so the cost is polynomial in ``n, m, s`` and
exponential only in the number ``t`` of non-Clifford gates.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .circuit import Gate, QcsatInstance, gadgetize, inverse_circuit
from .pauli import PauliString
from .projector import CanonicalBipartiteForm, StabilizerProjector, bipartite_canonical_form, project_qubit_zero
from .tableau import PauliTable, compile_tableau
from . import oracle

EXACT_CAP = 14
MAGIC_CAP = 26


class CapExceeded(ValueError):
    pass


@dataclass
class ReducedForm:
    gamma: int
    r: int
    t: int
    n: int
    angles: tuple
    form: CanonicalBipartiteForm | None = None

    @property
    def l1(self) -> int:
        return self.form.num_epr if self.form else 0

    @property
    def l2(self) -> int:
        return self.form.num_copy if self.form else 0

    @property
    def log2_scale(self) -> int:
        return self.t - self.r - self.l1

    @property
    def c_left(self):
        return self.form.c_left

    @property
    def c_right(self):
        return self.form.c_right

    # register partition in slot coordinates (see CanonicalBipartiteForm)
    @property
    def partition(self) -> dict:
        f = self.form
        if f is None:
            return {}
        return {"L1'": f.l_zero, "L2'": f.l_free, "L1": f.l1, "L2": f.l2,
                "R1": f.r1, "R2": f.r2, "R3": f.r_zero, "R4": f.r_free}


@dataclass
class WitnessRecipe:
    """Optimal witness ``W (phi x 0...0)``; gates and slots use witness-local qubit indices."""

    w_gates: list
    phi: np.ndarray
    zero_qubits: list
    free_qubits: list
    num_qubits: int

    def state(self) -> np.ndarray:
        """Dense witness vector on the ``n`` witness qubits (small ``n`` only)."""
        n = self.num_qubits
        vec = np.zeros(2 ** n, dtype=complex)
        vec[: len(self.phi)] = self.phi
        return oracle.apply_gates(vec, self.w_gates, n) if n else vec


@dataclass
class ValEstimate:
    value: float
    mantissa: float
    exponent: int
    log2_scale: int
    mode: str
    sigma_star: int
    gamma: int
    r: int
    t: int
    l1: int
    l2: int
    witness: WitnessRecipe | None = None
    wall_time_ms: float = 0.0
    per_sigma: list = field(default_factory=list, repr=False)


def reduce_instance(inst: QcsatInstance) -> ReducedForm:
    """Gadgetize, project onto the acceptance event and split across witness | magic register."""
    gz = gadgetize(inst)
    N = gz.num_qubits
    gens = [PauliString(N, 0, 1 << o, 2) for o in inst.output]
    gens += [PauliString(N, 0, 1 << g, 0) for g in gz.gadget_qubits]
    proj = StabilizerProjector(N, PauliTable.from_paulis(gens, N))
    # Pi2 = C^dag Pi1 C
    proj.table.apply_circuit(gz.gates, inverse=True)
    gamma, r = 1, 0
    for a in sorted(inst.ancilla, reverse=True):
        sigma, proj = project_qubit_zero(proj, a)
        if sigma == 0:
            gamma = 0
            break
        if sigma.denominator == 2:
            r += 1
    rf = ReducedForm(gamma, r, gz.t, inst.n, tuple(gz.angles))
    if gamma == 0:
        return rf
    n, t = inst.n, gz.t
    rf.form = bipartite_canonical_form(proj, range(n), range(n, n + t))
    return rf


def _pauli_gates(p: PauliString, qubits=None) -> list:
    qubits = qubits if qubits is not None else range(p.num_qubits)
    out = []
    for j, q in enumerate(qubits):
        if (p.z >> j) & 1:
            out.append(Gate("Z", (q,)))
        if (p.x >> j) & 1:
            out.append(Gate("X", (q,)))
    return out


def magic_vector(rf: ReducedForm, cap: int = MAGIC_CAP) -> np.ndarray:
    """``C_R |A_theta_1 ... A_theta_t>`` in slot order."""
    t = rf.t
    if t > cap:
        raise CapExceeded(f"t={t} exceeds the magic-state cap {cap}")
    vec = np.ones(1, dtype=complex)
    for th in rf.angles:
        vec = np.kron(np.array([1, np.exp(1j * th)]) / math.sqrt(2), vec)
    if t == 0:
        return vec
    f = rf.form
    gates = inverse_circuit(compile_tableau(f.d_right)) + _pauli_gates(f.pauli_right)
    return oracle.apply_gates(vec, gates, t)


def _eta_stack(rf: ReducedForm, phi: np.ndarray) -> np.ndarray:
    """Matrices ``eta(sigma)`` of shape ``(2^l2, 2^l1, 2^|R4|)``."""
    f = rf.form
    e, c, zr = f.num_epr, f.num_copy, f.num_zero_right
    r4 = rf.t - e - c - zr
    arr = phi.reshape(2 ** r4, 2 ** zr, 2 ** c, 2 ** e)[:, 0, :, :]
    return np.transpose(arr, (1, 2, 0))


def _power_iterations(eta: np.ndarray, q: int, rng: np.random.Generator) -> tuple[float, np.ndarray]:
    """Rayleigh quotient of ``rho^(q-1) phi`` for ``rho = eta eta^dag`` (or the smaller Gram matrix).

    Returns (xi, vector on the R1 side approximating the top eigenvector).
    """
    a, b = eta.shape
    left = a <= b
    d = a if left else b
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    v /= np.linalg.norm(v)

    def rho(x):
        return eta @ (eta.conj().T @ x) if left else eta.conj().T @ (eta @ x)

    for _ in range(q - 1):
        w = rho(v)
        nw = np.linalg.norm(w)
        if nw == 0:
            return 0.0, v
        v = w / nw
    xi = max(float(np.real(np.vdot(v, rho(v)))), 0.0)
    vec = v if left else eta @ v
    nv = np.linalg.norm(vec)
    return xi, (vec / nv if nv else vec)


def lambda_max_power(state: np.ndarray, cut, delta: float, seed=None, iterations: int | None = None) -> float:
    """Power-method estimate of ``lambda_max(rho_A)`` for a normalized pure state.

    ``cut`` lists the qubits of ``A``.  Uses ``ceil(100 q / delta)`` iterations
    unless ``iterations`` is given.
    """
    state = np.asarray(state, dtype=complex)
    nq = int(round(math.log2(len(state))))
    if abs(np.linalg.norm(state) - 1) > 1e-9:
        raise ValueError("state is not normalized")
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    A = sorted(int(q) for q in cut)
    B = [q for q in range(nq) if q not in A]
    tens = state.reshape((2,) * nq)
    axes_a = [nq - 1 - q for q in reversed(A)]
    axes_b = [nq - 1 - q for q in reversed(B)]
    eta = np.transpose(tens, axes_a + axes_b).reshape(2 ** len(A), 2 ** len(B))
    q = iterations if iterations is not None else math.ceil(100 * nq / delta)
    rng = np.random.default_rng(seed)
    return _power_iterations(eta, max(q, 2), rng)[0]


def _sigma_seed(seed, sigma: int):
    return np.random.SeedSequence([0 if seed is None else int(seed), int(sigma)])


def _finish(rf, best, sigma_star, mode, t0, per_sigma, witness=None) -> ValEstimate:
    scale = rf.log2_scale
    if best <= 0 or rf.gamma == 0:
        mant, exp_ = 0.0, 0
        value = 0.0
    else:
        m, e = math.frexp(best)
        mant, exp_ = 2 * m, e - 1 + scale
        value = math.ldexp(best, scale)
    return ValEstimate(value=value, mantissa=mant, exponent=exp_, log2_scale=scale, mode=mode,
                       sigma_star=sigma_star, gamma=rf.gamma, r=rf.r, t=rf.t, l1=rf.l1, l2=rf.l2,
                       witness=witness, wall_time_ms=(time.perf_counter() - t0) * 1e3, per_sigma=per_sigma)


def _witness(rf: ReducedForm, vec_r1: np.ndarray, sigma: int) -> WitnessRecipe:
    f = rf.form
    e, c = f.num_epr, f.num_copy
    phi = np.zeros(2 ** (e + c), dtype=complex)
    # teleportation: the L1 half of an EPR pair must carry the conjugate of the R1 vector
    phi[sigma * 2 ** e + np.arange(2 ** e)] = np.conj(vec_r1)
    w_gates = _pauli_gates(f.pauli_left) + compile_tableau(f.d_left)
    return WitnessRecipe(w_gates=w_gates, phi=phi, zero_qubits=f.l_zero, free_qubits=f.l_free, num_qubits=rf.n)


def _zero_witness(n: int) -> WitnessRecipe:
    return WitnessRecipe(w_gates=[], phi=np.ones(1, dtype=complex), zero_qubits=[], free_qubits=list(range(n)),
                         num_qubits=n)


def exact_val(inst: QcsatInstance, cap: int = EXACT_CAP, rf: ReducedForm | None = None) -> ValEstimate:
    """Value by dense SVD of every ``eta(sigma)``; deterministic."""
    t0 = time.perf_counter()
    rf = rf or reduce_instance(inst)
    if rf.gamma == 0:
        return _finish(rf, 0.0, 0, "exact", t0, [], _zero_witness(rf.n))
    if rf.t > cap:
        raise CapExceeded(f"t={rf.t} exceeds the exact-mode cap {cap}")
    etas = _eta_stack(rf, magic_vector(rf))
    u, s, _ = np.linalg.svd(etas, full_matrices=False)
    lam = s[:, 0] ** 2 if s.shape[1] else np.zeros(len(etas))
    k = int(np.argmax(lam))
    wit = _witness(rf, u[k][:, 0], k)
    return _finish(rf, float(lam[k]), k, "exact", t0, [float(x) for x in lam], wit)


def estimate_val(inst: QcsatInstance, delta: float, seed=None, threads: int = 1,
                 rf: ReducedForm | None = None, cap: int = MAGIC_CAP) -> ValEstimate:
    """Randomized estimate ``xi`` with ``0 <= xi <= Val`` and ``xi >= (1-delta) Val`` w.p. >= 99/100."""
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    t0 = time.perf_counter()
    rf = rf or reduce_instance(inst)
    if rf.gamma == 0:
        return _finish(rf, 0.0, 0, "randomized", t0, [], _zero_witness(rf.n))
    phi = magic_vector(rf, cap)
    etas = _eta_stack(rf, phi)
    nq = rf.t - rf.l2 - rf.form.num_zero_right
    q = max(2, math.ceil(100 * max(nq, 1) / delta))

    def one(sigma):
        eta = etas[sigma]
        norm2 = float(np.real(np.vdot(eta, eta)))
        if norm2 == 0.0:
            return 0.0, np.zeros(eta.shape[0], dtype=complex)
        if eta.shape[0] == 1 or eta.shape[1] == 1:
            # the reduced state is rank one (or a scalar): lambda_max is the squared norm
            vec = eta[:, 0] if eta.shape[1] == 1 else np.ones(1, dtype=complex)
            vec = vec / np.linalg.norm(vec)
            return norm2, vec
        xi, vec = _power_iterations(eta / math.sqrt(norm2), q, np.random.default_rng(_sigma_seed(seed, sigma)))
        return norm2 * xi, vec

    sigmas = range(len(etas))
    if threads > 1 and len(etas) > 1:
        with ThreadPoolExecutor(threads) as ex:
            results = list(ex.map(one, sigmas))
    else:
        results = [one(s) for s in sigmas]
    vals = [r[0] for r in results]
    k = int(np.argmax(vals))
    wit = _witness(rf, results[k][1], k) if vals[k] > 0 else _zero_witness(rf.n)
    return _finish(rf, vals[k], k, "randomized", t0, vals, wit)


def solve(inst: QcsatInstance, mode: str = "auto", delta: float = 0.05, seed=None, threads: int = 1,
          cap: int = EXACT_CAP) -> ValEstimate:
    rf = reduce_instance(inst)
    if mode == "exact" or (mode == "auto" and rf.t <= cap):
        return exact_val(inst, cap=max(cap, rf.t) if mode == "exact" else cap, rf=rf)
    return estimate_val(inst, delta, seed, threads, rf=rf)


def extract_witness(inst: QcsatInstance, mode: str = "exact", delta: float = 0.05, seed=None) -> WitnessRecipe:
    est = solve(inst, mode, delta, seed)
    if est.gamma == 0:
        raise ValueError("gamma = 0: every witness is rejected")
    return est.witness


def decide_qcsat(inst: QcsatInstance, a: float, b: float, seed=None, cap: int = EXACT_CAP, threads: int = 1):
    """``'yes'`` iff the (exact or randomized) value exceeds ``(a+b)/2``.

    Outside the promise ``Val > a`` or ``Val < b`` the answer is unspecified.
    Returns ``(decision, ValEstimate)``.
    """
    if not a > b:
        raise ValueError("need a > b")
    rf = reduce_instance(inst)
    if rf.t <= cap:
        est = exact_val(inst, cap, rf=rf)
    else:
        delta = 1 - (a + b) / (2 * a)
        est = estimate_val(inst, delta, seed, threads, rf=rf)
    return ("yes" if est.value > (a + b) / 2 else "no"), est
