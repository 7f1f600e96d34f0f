"""Circuit IR, the ``.qcirc`` text format and the T-gate post-selection gadget."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

CLIFFORD_1Q = ("H", "S", "SDG", "X", "Y", "Z")
CLIFFORD_2Q = ("CX", "CZ", "SWAP")
ROTATIONS = ("T", "TDG", "RZ")
KINDS = CLIFFORD_1Q + CLIFFORD_2Q + ROTATIONS

_INVERSE = {"S": "SDG", "SDG": "S", "T": "TDG", "TDG": "T"}


class CircuitFormatError(ValueError):
    """Raised for malformed ``.qcirc`` text; carries the 1-based line number."""

    def __init__(self, msg, line=None):
        self.line = line
        super().__init__(f"line {line}: {msg}" if line else msg)


@dataclass(frozen=True)
class Gate:
    kind: str
    qubits: tuple
    angle: float | None = None
    # only for the dense oracle ("UNITARY" kind); ignored by equality
    matrix: np.ndarray | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "kind", self.kind.upper())
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        k = self.kind
        if k == "UNITARY":
            if self.matrix is None or self.matrix.shape != (2 ** len(self.qubits),) * 2:
                raise ValueError("UNITARY gate needs a matching matrix")
        elif k not in KINDS:
            raise ValueError(f"unknown gate kind {k}")
        elif len(self.qubits) != (2 if k in CLIFFORD_2Q else 1):
            raise ValueError(f"{k} has wrong arity")
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError(f"{k} acts on repeated qubits")
        if k == "RZ" and self.angle is None:
            raise ValueError("RZ needs an angle")

    @property
    def is_clifford(self) -> bool:
        return self.kind in CLIFFORD_1Q or self.kind in CLIFFORD_2Q

    @property
    def rotation_angle(self) -> float:
        return {"T": math.pi / 4, "TDG": -math.pi / 4}.get(self.kind, self.angle)

    def inverse(self) -> "Gate":
        if self.kind == "RZ":
            return Gate("RZ", self.qubits, -self.angle)
        if self.kind == "UNITARY":
            return Gate("UNITARY", self.qubits, matrix=self.matrix.conj().T)
        return Gate(_INVERSE.get(self.kind, self.kind), self.qubits)

    def remap(self, mapping) -> "Gate":
        return Gate(self.kind, tuple(mapping[q] for q in self.qubits), self.angle, self.matrix)

    def __str__(self):
        qs = " ".join(str(q) for q in self.qubits)
        if self.kind == "RZ":
            return f"rz {self.angle!r} {qs}"
        return f"{self.kind.lower()} {qs}"


def inverse_circuit(gates) -> list[Gate]:
    return [g.inverse() for g in reversed(list(gates))]


@dataclass(frozen=True)
class Circuit:
    num_qubits: int
    gates: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            if max(g.qubits) >= self.num_qubits:
                raise ValueError(f"gate {g} out of range")

    def inverse(self) -> "Circuit":
        return Circuit(self.num_qubits, inverse_circuit(self.gates))

    @property
    def t_count(self) -> int:
        return sum(g.kind in ROTATIONS for g in self.gates)

    def is_clifford(self) -> bool:
        return all(g.is_clifford for g in self.gates)


@dataclass(frozen=True)
class QcsatInstance:
    circuit: Circuit
    witness: tuple
    ancilla: tuple
    output: tuple
    a: float | None = None
    b: float | None = None

    def __post_init__(self):
        for name in ("witness", "ancilla", "output"):
            object.__setattr__(self, name, tuple(sorted(int(q) for q in getattr(self, name))))
        n = self.circuit.num_qubits
        w, a, o = set(self.witness), set(self.ancilla), set(self.output)
        if w & a:
            raise ValueError("witness and ancilla registers overlap")
        if w | a != set(range(n)):
            raise ValueError("witness and ancilla must cover all qubits")
        if not o:
            raise ValueError("output register is empty")
        if not o <= set(range(n)):
            raise ValueError("output index out of range")

    @property
    def num_qubits(self):
        return self.circuit.num_qubits

    @property
    def gates(self):
        return self.circuit.gates

    @property
    def n(self):
        return len(self.witness)

    @property
    def m(self):
        return len(self.ancilla)

    @property
    def k(self):
        return len(self.output)

    @property
    def t_count(self):
        return self.circuit.t_count


def _parse_indices(tokens, n, lineno):
    if len(tokens) == 1 and ".." in tokens[0]:
        lo, hi = tokens[0].split("..", 1)
        try:
            lo, hi = int(lo), int(hi)
        except ValueError:
            raise CircuitFormatError(f"bad range {tokens[0]!r}", lineno) from None
        idx = list(range(lo, hi + 1))
    else:
        try:
            idx = [int(t) for t in tokens]
        except ValueError:
            raise CircuitFormatError(f"bad index list {' '.join(tokens)!r}", lineno) from None
    for q in idx:
        if n is not None and not 0 <= q < n:
            raise CircuitFormatError(f"qubit index {q} out of range", lineno)
    if len(set(idx)) != len(idx):
        raise CircuitFormatError("repeated qubit index", lineno)
    return idx


def _parse(text: str, require_registers: bool):
    n = None
    regs: dict[str, tuple[list[int], int]] = {}
    gates: list[Gate] = []
    thresholds = (None, None)
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        head = tok[0].lower()
        if head == "qubits":
            if n is not None:
                raise CircuitFormatError("duplicate qubits declaration", lineno)
            try:
                n = int(tok[1])
                if n < 0 or len(tok) != 2:
                    raise ValueError
            except (ValueError, IndexError):
                raise CircuitFormatError("expected 'qubits <N>'", lineno) from None
            continue
        if n is None:
            raise CircuitFormatError("missing 'qubits' declaration before first statement", lineno)
        if head in ("witness", "ancilla", "output"):
            if head in regs:
                raise CircuitFormatError(f"duplicate {head} declaration", lineno)
            regs[head] = (_parse_indices(tok[1:], n, lineno), lineno)
            continue
        if head == "thresholds":
            try:
                thresholds = (float(tok[1]), float(tok[2]))
            except (ValueError, IndexError):
                raise CircuitFormatError("expected 'thresholds <a> <b>'", lineno) from None
            continue
        kind = head.upper()
        if kind not in KINDS:
            raise CircuitFormatError(f"unknown gate {tok[0]!r}", lineno)
        args = tok[1:]
        angle = None
        if kind == "RZ":
            if not args:
                raise CircuitFormatError("rz needs an angle", lineno)
            try:
                angle = float(args[0])
            except ValueError:
                raise CircuitFormatError(f"bad angle {args[0]!r}", lineno) from None
            args = args[1:]
        arity = 2 if kind in CLIFFORD_2Q else 1
        if len(args) != arity:
            raise CircuitFormatError(f"{head} expects {arity} qubit(s)", lineno)
        qs = _parse_indices(args, n, lineno)
        gates.append(Gate(kind, tuple(qs), angle))
    if n is None:
        raise CircuitFormatError("missing 'qubits' declaration")
    circ = Circuit(n, gates)
    if not require_registers:
        return circ, None
    for name in ("witness", "output"):
        if name not in regs:
            raise CircuitFormatError(f"missing '{name}' declaration")
    wit = regs["witness"][0]
    if "ancilla" in regs:
        anc, ln = regs["ancilla"]
        if set(anc) & set(wit):
            raise CircuitFormatError("ancilla overlaps witness", ln)
    else:
        anc = [q for q in range(n) if q not in wit]
    missing = set(range(n)) - set(wit) - set(anc)
    if missing:
        raise CircuitFormatError(
            f"qubits {sorted(missing)} belong to neither witness nor ancilla", regs.get("ancilla", regs["witness"])[1]
        )
    out, ln = regs["output"]
    if not out:
        raise CircuitFormatError("output register is empty", ln)
    return circ, QcsatInstance(circ, wit, anc, out, *thresholds)


def parse_circuit(text: str) -> QcsatInstance:
    """Parse a ``.qcirc`` instance with register declarations."""
    return _parse(text, True)[1]


def parse_gate_file(text: str) -> Circuit:
    """Parse a ``.qcirc`` file for its gates only; register lines are optional."""
    return _parse(text, False)[0]


def _fmt_reg(name, idx):
    return " ".join([name] + [str(q) for q in idx])


def serialize_circuit(obj) -> str:
    """Normalized text for a :class:`QcsatInstance` or a bare :class:`Circuit`."""
    if isinstance(obj, QcsatInstance):
        circ = obj.circuit
        lines = [f"qubits {circ.num_qubits}", _fmt_reg("witness", obj.witness), _fmt_reg("ancilla", obj.ancilla),
                 _fmt_reg("output", obj.output)]
        if obj.a is not None and obj.b is not None:
            lines.append(f"thresholds {obj.a!r} {obj.b!r}")
    else:
        circ = obj
        lines = [f"qubits {circ.num_qubits}"]
    for g in circ.gates:
        if g.kind == "UNITARY":
            raise ValueError("dense UNITARY gates have no text form")
        lines.append(str(g))
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class Gadgetized:
    gates: tuple
    num_qubits: int
    gadget_qubits: tuple
    t: int
    angles: tuple

    def __iter__(self):
        return iter((list(self.gates), list(self.gadget_qubits), self.t, list(self.angles)))


def gadgetize(inst) -> Gadgetized:
    """Replace every T/Tdg/Rz by a CX onto a fresh magic qubit.

    Fresh qubits get indices ``N, N+1, ...`` in gate order.  Each is prepared in
    ``(|0> + e^{i theta}|1>)/sqrt 2`` and post-selected on ``|0>``; the
    post-selection costs a factor 1/2 in probability per gadget.
    """
    circ = inst.circuit if isinstance(inst, QcsatInstance) else inst
    n = circ.num_qubits
    out, fresh, angles = [], [], []
    for g in circ.gates:
        if g.kind in ROTATIONS:
            f = n + len(fresh)
            fresh.append(f)
            angles.append(g.rotation_angle)
            out.append(Gate("CX", (g.qubits[0], f)))
        elif g.is_clifford:
            out.append(g)
        else:
            raise ValueError(f"cannot gadgetize {g.kind}")
    return Gadgetized(tuple(out), n + len(fresh), tuple(fresh), len(fresh), tuple(angles))
