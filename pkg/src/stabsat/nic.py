"""Non-identity check: exact decider for Clifford circuits and the lightcone decider for shallow circuits.

Clifford decider.  With ``H_phi = 2I - e^{-i phi} C - e^{i phi} C^dag`` one
has ``Tr(H_phi^p) = sum_i a_i e^{-i phi i} Tr(C^i)``, and ``||C - e^{i phi} I||^2``
is the top eigenvalue of ``H_phi``.  Traces of Clifford powers are exact
elements of ``Z[zeta_8]`` (computed on a ``2n``-qubit CH-form state), so the
sums over a grid of phases are exact elements of ``Z[zeta_N]``.  The decision
compares the smallest grid value against a rational threshold with no
floating point at the comparison.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np

from .chform import CHState, ExactScalar
from .circuit import Circuit, Gate
from .tableau import CliffordTableau, compile_tableau

PI_UPPER = Fraction(355, 113)  # > pi
LIGHTCONE_CAP = 12
IDENTITY_TOL = 1e-9


class GapTooSmall(ValueError):
    pass


class LightconeTooWide(ValueError):
    pass


@dataclass(frozen=True)
class NicInstance:
    circuit: Circuit
    alpha: float
    beta: float
    depth_bound: int | None = None

    def __post_init__(self):
        if not 0 <= self.beta < self.alpha <= 2:
            raise ValueError("need 0 <= beta < alpha <= 2")


@dataclass
class NicDecision:
    decision: str
    p: int | None = None
    phase_grid: int | None = None
    trace_value: str | None = None
    min_rotated_trace: str | None = None
    threshold: str | None = None
    failing_qubit: int | None = None
    lightcone_size: int | None = None
    depth: int | None = None


# ---------------------------------------------------------------------------
# exact traces


def _as_circuit(c, num_qubits=None):
    if isinstance(c, CliffordTableau):
        return compile_tableau(c), c.num_qubits
    if isinstance(c, Circuit):
        return list(c.gates), c.num_qubits
    if num_qubits is None:
        raise ValueError("num_qubits is required for a bare gate list")
    return list(c), num_qubits


def clifford_trace_powers(c, p: int, num_qubits: int | None = None) -> list[ExactScalar]:
    """``[Tr(C^0), ..., Tr(C^p)]`` exactly, for a fixed circuit representative of ``C``.

    A tableau fixes ``C`` only up to a global phase; it is represented by the
    circuit that :func:`compile_tableau` returns.
    """
    gates, n = _as_circuit(c, num_qubits)
    shifted = [g.remap({q: q + n for q in range(n)}) for g in gates]
    prep = [Gate("H", (j,)) for j in range(n)] + [Gate("CX", (j, n + j)) for j in range(n)]
    unprep = [g.inverse() for g in reversed(prep)]
    st = CHState(2 * n).apply_circuit(prep)
    out = []
    for i in range(p + 1):
        if i:
            st.apply_circuit(shifted)
        probe = st.copy().apply_circuit(unprep)
        out.append(probe.amplitude_zero() * ExactScalar(0, 2 * n))
    return out


def clifford_trace(c, num_qubits: int | None = None) -> ExactScalar:
    """Exact ``Tr(C)``; ``complex(result)`` gives the numeric value."""
    return clifford_trace_powers(c, 1, num_qubits)[1]


def power_coefficients(p: int) -> list[int]:
    """Integer coefficients ``a_{-p} .. a_p`` of ``(2 - x - 1/x)^p``."""
    if p < 1:
        raise ValueError("p must be at least 1")
    coeffs = [1]
    for _ in range(p):
        nxt = [0] * (len(coeffs) + 2)
        for j, a in enumerate(coeffs):
            nxt[j] -= a
            nxt[j + 1] += 2 * a
            nxt[j + 2] -= a
        coeffs = nxt
    return coeffs


@dataclass(frozen=True)
class ZSqrt2:
    """Exact real number ``a + b sqrt 2`` with integer ``a, b``."""

    a: int
    b: int

    def __float__(self):
        return float(mpmath.mpf(self.a) + mpmath.mpf(self.b) * mpmath.sqrt(2))

    def __str__(self):
        if self.b == 0:
            return str(self.a)
        return f"{self.a} + {self.b}*sqrt(2)"


class _CycloN:
    """Arithmetic in ``Z[zeta_N]`` for ``N`` a power of two, basis ``zeta^0 .. zeta^{N/2-1}``."""

    def __init__(self, N: int):
        self.N = N
        self.h = N // 2

    def zero(self):
        return [0] * self.h

    def add_monomial(self, vec, j, c):
        j %= self.N
        if j >= self.h:
            vec[j - self.h] -= c
        else:
            vec[j] += c

    def add_scalar(self, vec, s: ExactScalar, shift: int, coef: int):
        """``vec += coef * zeta_N^shift * s`` for ``s = zeta_8^k 2^(h/2)``."""
        if s.zero:
            return
        base = coef * 2 ** (s.h // 2)
        e8 = self.N // 8
        j = shift + s.k * e8
        if s.h % 2:
            # sqrt 2 = zeta_8 - zeta_8^3
            self.add_monomial(vec, j + e8, base)
            self.add_monomial(vec, j + 3 * e8, -base)
        else:
            self.add_monomial(vec, j, base)

    def mul(self, u, v):
        out = [0] * self.h
        for i, a in enumerate(u):
            if a:
                for j, b in enumerate(v):
                    if b:
                        self.add_monomial(out, i + j, a * b)
        return out

    def real_value(self, vec, prec: int):
        with mpmath.workprec(prec):
            tot = mpmath.mpf(0)
            for j, c in enumerate(vec):
                if c:
                    tot += c * mpmath.cospi(mpmath.mpf(2 * j) / self.N)
            return tot


def trace_h_power(c, p: int, num_qubits: int | None = None) -> ZSqrt2:
    """Exact ``Tr((2I - C - C^dag)^p)`` for a Clifford circuit (or a tableau's compiled representative)."""
    traces = clifford_trace_powers(c, p, num_qubits)
    return _trace_from_powers(traces, power_coefficients(p))


def _trace_from_powers(traces, a) -> ZSqrt2:
    p = len(traces) - 1
    ring = _CycloN(8)
    vec = ring.zero()
    for i in range(-p, p + 1):
        s = traces[abs(i)]
        if i < 0:
            s = s.conjugate()
        ring.add_scalar(vec, s, 0, a[i + p])
    c0, c1, c2, c3 = vec
    if c2 != 0 or c3 != -c1:
        raise AssertionError("trace of a Hermitian power is not real")
    return ZSqrt2(c0, c1)


def _choose_parameters(n: int, alpha: Fraction, beta: Fraction):
    gap = alpha - beta
    N = 8
    while PI_UPPER / N > gap / 2:
        N *= 2
    beta_p = beta + PI_UPPER / N
    # smallest p with alpha^(2p) >= 2 * 2^n * beta'^(2p)
    ratio = float(alpha / beta_p)
    p = max(1, math.ceil((n + 1) * math.log(2) / (2 * math.log(ratio))))

    def ok(k):
        return alpha ** (2 * k) >= 2 * 2 ** n * beta_p ** (2 * k)

    while not ok(p):
        p += 1
    while p > 1 and ok(p - 1):
        p -= 1
    return N, beta_p, p


def _sign_vs_threshold(ring: _CycloN, vec, thr2: Fraction) -> int:
    """Sign of ``f - sqrt(thr2)`` for the real cyclotomic integer ``f >= 0``."""
    sq = ring.mul(vec, vec)
    num, den = thr2.numerator, thr2.denominator
    if sq[0] * den == num and not any(sq[1:]):
        return 0
    mag = sum(abs(c) for c in vec) + 1
    prec = 128 + mag.bit_length()
    while True:
        f = ring.real_value(vec, prec)
        with mpmath.workprec(prec):
            target = mpmath.sqrt(mpmath.mpf(num) / den)
            # each of the N/2 cosines and the running sum carry relative error below 2^-prec
            slack = mpmath.mpf(2) ** (-(prec - 8 - ring.N.bit_length()))
            err = (mpmath.mpf(mag) + abs(target)) * slack
            diff = f - target
            if abs(diff) > err:
                return 1 if diff > 0 else -1
        prec *= 2
        if prec > 1 << 20:
            raise AssertionError("could not separate value from threshold")


def decide_nic_clifford(inst: NicInstance, max_p_factor: int = 64) -> NicDecision:
    """Exact decision for ``d_I(C) >= alpha`` (yes) versus ``d_I(C) <= beta`` (no).

    With ``f(phi) = Tr(H_phi^p)`` evaluated on ``N`` equally spaced phases and
    ``beta' = beta + pi/N`` (covering the phase discretization), yes-instances
    have ``f >= alpha^(2p)`` at every grid phase and no-instances have
    ``f <= 2^n beta'^(2p)`` at some grid phase.  The answer is yes iff the
    minimum over the grid is at least the geometric mean of the two bounds;
    outside the promise it is deterministic but unspecified.
    """
    circ = inst.circuit
    if not circ.is_clifford():
        raise ValueError("circuit has non-Clifford gates; use the lightcone or QCSAT paths")
    n = circ.num_qubits
    alpha = Fraction(str(inst.alpha))
    beta = Fraction(str(inst.beta))
    N, beta_p, p = _choose_parameters(n, alpha, beta)
    if p > max_p_factor * max(n, 1):
        raise GapTooSmall(f"p = {p} exceeds the cap {max_p_factor}*n; the promise gap is too small")
    traces = clifford_trace_powers(circ, p)
    a = power_coefficients(p)
    ring = _CycloN(N)
    thr2 = alpha ** (2 * p) * 2 ** n * beta_p ** (2 * p)
    best_k, best_val, decision = None, None, "yes"
    for k in range(N):
        vec = ring.zero()
        for i in range(-p, p + 1):
            s = traces[abs(i)]
            if i < 0:
                s = s.conjugate()
            ring.add_scalar(vec, s, -k * i, a[i + p])
        val = ring.real_value(vec, 96)
        if best_val is None or val < best_val:
            best_k, best_val = k, val
        if _sign_vs_threshold(ring, vec, thr2) < 0:
            decision = "no"
    trace0 = _trace_from_powers(traces, a)
    return NicDecision(decision=decision, p=p, phase_grid=N, trace_value=str(trace0),
                       min_rotated_trace=mpmath.nstr(best_val, 20),
                       threshold=f"alpha^(2p) * 2^n * beta'^(2p) with beta' = {beta_p}")


# ---------------------------------------------------------------------------
# lightcone decider


def circuit_depth(circ: Circuit) -> int:
    layer = [0] * circ.num_qubits
    for g in circ.gates:
        d = 1 + max(layer[q] for q in g.qubits)
        for q in g.qubits:
            layer[q] = d
    return max(layer, default=0)


def backward_lightcone(circ: Circuit, qubit: int) -> tuple[list[int], list[int]]:
    """Indices of the gates in the backward causal cone of ``qubit`` and the qubits they touch."""
    support = {qubit}
    idx = []
    for k in range(len(circ.gates) - 1, -1, -1):
        g = circ.gates[k]
        if support.intersection(g.qubits):
            support.update(g.qubits)
            idx.append(k)
    return idx[::-1], sorted(support)


def _pauli_on(q, kind, n):
    from .pauli import PauliString
    return PauliString.single(n, q, kind).to_matrix()


def _check_qubit(circ: Circuit, i: int):
    from . import oracle
    idx, support = backward_lightcone(circ, i)
    if len(support) > LIGHTCONE_CAP:
        raise LightconeTooWide(f"lightcone of qubit {i} has {len(support)} qubits, above the cap {LIGHTCONE_CAP}")
    local = {q: j for j, q in enumerate(support)}
    gates = [circ.gates[k].remap(local) for k in idx]
    u = oracle.unitary(gates, len(support))
    j = local[i]
    for kind in ("X", "Z"):
        p = _pauli_on(j, kind, len(support))
        if not np.allclose(u.conj().T @ p @ u, p, atol=IDENTITY_TOL, rtol=0):
            return False, len(support)
    return True, len(support)


def decide_nic_lightcone(inst: NicInstance, threads: int = 1) -> NicDecision:
    """``no`` iff ``U^dag X_i U = X_i`` and ``U^dag Z_i U = Z_i`` for every qubit ``i``.

    Each Heisenberg image only involves the gates in the backward lightcone of
    ``i``, which has at most ``2^depth`` qubits, so the checks are small dense
    computations.  Together they hold exactly when ``U`` is a multiple of the
    identity.
    """
    circ = inst.circuit
    depth = circuit_depth(circ)
    if inst.depth_bound is not None and depth > inst.depth_bound:
        raise ValueError(f"circuit depth {depth} exceeds the bound {inst.depth_bound}")
    qubits = range(circ.num_qubits)
    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            results = list(ex.map(lambda i: _check_qubit(circ, i), qubits))
    else:
        results = [_check_qubit(circ, i) for i in qubits]
    for i, (ok, size) in enumerate(results):
        if not ok:
            return NicDecision(decision="yes", failing_qubit=i, lightcone_size=size, depth=depth)
    return NicDecision(decision="no", depth=depth,
                       lightcone_size=max((s for _, s in results), default=0))
