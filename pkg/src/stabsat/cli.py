"""``stabsat`` command line: solvers, generators and the dense oracle with JSON output."""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import gen, nic, oracle, propagation, solver
from .circuit import CircuitFormatError, parse_circuit, parse_gate_file, serialize_circuit

FORMAT_HELP = "see the 'Circuit format (.qcirc)' section of the README"


class UsageError(Exception):
    pass


def _fmt_float(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        raise ValueError("non-finite float in output")
    s = "%.17g" % x
    if "e" not in s and "." not in s:
        s += ".0"
    return s


def dumps(obj) -> str:
    """JSON with every float written to 17 significant digits."""
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {dumps(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ", ".join(dumps(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


# ---------------------------------------------------------------------------
# result payloads


def witness_json(w: solver.WitnessRecipe | None):
    if w is None:
        return None
    return {"w_gates": [str(g) for g in w.w_gates], "phi_real": np.real(w.phi).tolist(),
            "phi_imag": np.imag(w.phi).tolist(), "zero_qubits": list(w.zero_qubits),
            "free_qubits": list(w.free_qubits), "num_qubits": w.num_qubits}


def witness_from_json(obj) -> solver.WitnessRecipe:
    n = int(obj["num_qubits"])
    gates = parse_gate_file(f"qubits {max(n, 1)}\n" + "\n".join(obj["w_gates"])).gates
    phi = np.asarray(obj["phi_real"], dtype=float) + 1j * np.asarray(obj["phi_imag"], dtype=float)
    return solver.WitnessRecipe(list(gates), phi, list(obj.get("zero_qubits", [])),
                                list(obj.get("free_qubits", [])), n)


def _exact_dyadic(est: solver.ValEstimate) -> str | None:
    if est.mode != "exact" or est.t != 0:
        return None
    frac = Fraction(est.mantissa) * Fraction(2) ** est.exponent if est.mantissa else Fraction(0)
    return str(frac)


def estimate_json(est: solver.ValEstimate) -> dict:
    out = {"value": est.value}
    exact = _exact_dyadic(est)
    if exact is not None:
        out["value_exact"] = exact
    out.update({"mantissa": est.mantissa, "exponent": est.exponent, "log2_scale": est.log2_scale,
                "mode": est.mode, "sigma_star": est.sigma_star, "gamma": est.gamma, "r": est.r, "t": est.t,
                "l1": est.l1, "l2": est.l2, "witness": witness_json(est.witness),
                "wall_time_ms": est.wall_time_ms})
    return out


def nic_json(d: nic.NicDecision) -> dict:
    if d.p is not None:
        return {"decision": d.decision, "p": d.p, "phase_grid": d.phase_grid, "trace_value": d.trace_value,
                "min_rotated_trace": d.min_rotated_trace, "thresholds": d.threshold}
    return {"decision": d.decision, "failing_qubit": d.failing_qubit, "lightcone_size": d.lightcone_size,
            "depth": d.depth}


# ---------------------------------------------------------------------------
# commands


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None


def _instance(args):
    return parse_circuit(_read(args.file))


def _mode(args) -> str:
    if args.exact and args.randomized:
        raise UsageError("--exact and --randomized are mutually exclusive")
    return "exact" if args.exact else "randomized" if args.randomized else "auto"


def cmd_qcsat_solve(args):
    inst = _instance(args)
    est = solver.solve(inst, _mode(args), args.delta, args.seed, args.threads, args.cap)
    return estimate_json(est)


def cmd_qcsat_witness(args):
    inst = _instance(args)
    est = solver.solve(inst, _mode(args), args.delta, args.seed, args.threads, args.cap)
    return {"value": est.value, "gamma": est.gamma, "witness": witness_json(est.witness)}


def cmd_qcsat_decide(args):
    inst = _instance(args)
    a = args.a if args.a is not None else inst.a
    b = args.b if args.b is not None else inst.b
    if a is None or b is None:
        raise UsageError("thresholds missing: pass --a and --b or add a 'thresholds' line")
    decision, est = solver.decide_qcsat(inst, a, b, args.seed, args.cap, args.threads)
    return {"decision": decision, "a": a, "b": b, "estimate": estimate_json(est)}


def cmd_appendix_solve(args):
    res = propagation.solve_appendix(_instance(args), args.delta)
    return {"value": res.value, "lambda_min": res.lambda_min, "b": res.b, "b_projected": res.b_projected,
            "t": res.t, "num_terms": res.num_terms, "mode": "appendix", "wall_time_ms": res.wall_time_ms}


def cmd_appendix_width(args):
    inst = _instance(args)
    b = propagation.predict_width(inst)
    return {"b": b, "t": inst.t_count, "predicted_dim": 2 ** b}


def cmd_nic_clifford(args):
    circ = parse_gate_file(_read(args.file))
    return nic_json(nic.decide_nic_clifford(nic.NicInstance(circ, args.alpha, args.beta)))


def cmd_nic_lightcone(args):
    circ = parse_gate_file(_read(args.file))
    inst = nic.NicInstance(circ, args.alpha, args.beta, args.depth)
    return nic_json(nic.decide_nic_lightcone(inst, args.threads))


def _write_instance(inst, out):
    text = serialize_circuit(inst)
    if out:
        Path(out).write_text(text)
        return {"out": out, "qubits": inst.num_qubits, "gates": len(inst.gates), "t": inst.t_count}
    sys.stdout.write(text)
    return None


def cmd_gen_random(args):
    inst = gen.random_instance(args.n, args.m, args.s, args.t, args.seed, args.outputs)
    return _write_instance(inst, args.out)


def cmd_gen_ising(args):
    spec = gen.parse_edge_list(_read(args.graph))
    wprep = parse_gate_file(_read(args.wprep)) if args.wprep else None
    return _write_instance(gen.ising_to_qcsat(spec, wprep), args.out)


def cmd_oracle_val(args):
    return {"value": oracle.exact_val_dense(_instance(args))}


def cmd_oracle_distance(args):
    circ = parse_gate_file(_read(args.file))
    return {"distance": oracle.identity_distance(circ)}


def _load_witness(path: str, n: int) -> np.ndarray:
    try:
        obj = json.loads(_read(path))
    except json.JSONDecodeError as e:
        raise UsageError(f"witness file is not JSON: {e}") from None
    if isinstance(obj, dict) and "witness" in obj:
        obj = obj["witness"]
    if isinstance(obj, dict) and "w_gates" in obj:
        return witness_from_json(obj).state()
    if isinstance(obj, dict) and "real" in obj:
        vec = np.asarray(obj["real"], dtype=float) + 1j * np.asarray(obj.get("imag", [0.0] * len(obj["real"])))
    elif isinstance(obj, list):
        vec = np.asarray(obj, dtype=complex)
    else:
        raise UsageError("witness must be {real, imag}, a list of amplitudes, or a witness recipe")
    if vec.shape != (2 ** n,):
        raise UsageError(f"witness has {vec.size} amplitudes, expected {2 ** n}")
    return vec


def cmd_oracle_accept(args):
    inst = _instance(args)
    psi = _load_witness(args.witness, inst.n)
    norm = float(np.linalg.norm(psi))
    if abs(norm - 1) > 1e-9:
        raise UsageError(f"witness norm is {norm}, expected 1")
    return {"acceptance_probability": oracle.acceptance_probability(inst, psi)}


# ---------------------------------------------------------------------------
# parser


def _globals(p, suppress: bool):
    d = argparse.SUPPRESS
    p.add_argument("--seed", type=int, default=d if suppress else None, help="master RNG seed")
    p.add_argument("--json", action="store_true", default=d if suppress else False, help="emit JSON")
    p.add_argument("--threads", type=int, default=d if suppress else 1, help="worker threads")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stabsat", description=__doc__)
    _globals(parser, False)
    top = parser.add_subparsers(dest="group", required=True)

    def leaf(group, name, fn, help_):
        sp = group.add_parser(name, help=help_)
        _globals(sp, True)
        sp.set_defaults(fn=fn)
        return sp

    def solver_opts(sp):
        sp.add_argument("file")
        sp.add_argument("--exact", action="store_true")
        sp.add_argument("--randomized", action="store_true")
        sp.add_argument("--delta", type=float, default=0.05)
        sp.add_argument("--cap", type=int, default=solver.EXACT_CAP, help="largest t solved exactly")

    q = top.add_parser("qcsat", help="QCSAT solver").add_subparsers(dest="cmd", required=True)
    solver_opts(leaf(q, "solve", cmd_qcsat_solve, "estimate Val"))
    solver_opts(leaf(q, "witness", cmd_qcsat_witness, "optimal witness recipe"))
    sp = leaf(q, "decide", cmd_qcsat_decide, "promise decision")
    sp.add_argument("file")
    sp.add_argument("--a", type=float)
    sp.add_argument("--b", type=float)
    sp.add_argument("--cap", type=int, default=solver.EXACT_CAP)

    ap = top.add_parser("appendix", help="Pauli propagation solver").add_subparsers(dest="cmd", required=True)
    sp = leaf(ap, "solve", cmd_appendix_solve, "Val via the compressed observable")
    sp.add_argument("file")
    sp.add_argument("--delta", type=float, default=1e-6)
    leaf(ap, "width", cmd_appendix_width, "predicted basis size").add_argument("file")

    ni = top.add_parser("nic", help="non-identity check").add_subparsers(dest="cmd", required=True)
    sp = leaf(ni, "clifford", cmd_nic_clifford, "exact Clifford decider")
    sp.add_argument("file")
    sp.add_argument("--alpha", type=float, required=True)
    sp.add_argument("--beta", type=float, required=True)
    sp = leaf(ni, "lightcone", cmd_nic_lightcone, "constant-depth decider")
    sp.add_argument("file")
    sp.add_argument("--depth", type=int, required=True)
    sp.add_argument("--alpha", type=float, default=1.0)
    sp.add_argument("--beta", type=float, default=0.0)

    g = top.add_parser("gen", help="instance generators").add_subparsers(dest="cmd", required=True)
    sp = leaf(g, "random", cmd_gen_random, "random Clifford+T instance")
    for name in ("n", "m", "s", "t"):
        sp.add_argument(f"--{name}", type=int, required=True)
    sp.add_argument("--outputs", type=int, help="size of the output register")
    sp.add_argument("--out")
    sp = leaf(g, "ising", cmd_gen_ising, "Ising reduction")
    sp.add_argument("--graph", required=True)
    sp.add_argument("--wprep")
    sp.add_argument("--out")

    o = top.add_parser("oracle", help="dense reference").add_subparsers(dest="cmd", required=True)
    leaf(o, "val", cmd_oracle_val, "exact Val by eigensolve").add_argument("file")
    leaf(o, "distance", cmd_oracle_distance, "min_phi ||U - e^{i phi} I||").add_argument("file")
    sp = leaf(o, "accept", cmd_oracle_accept, "acceptance probability of a witness")
    sp.add_argument("file")
    sp.add_argument("--witness", required=True)
    return parser


def _human(obj, indent=0) -> str:
    pad = "  " * indent
    lines = []
    for k, v in obj.items():
        if isinstance(v, dict):
            lines.append(f"{pad}{k}:")
            lines.append(_human(v, indent + 1))
        else:
            lines.append(f"{pad}{k}: {dumps(v) if not isinstance(v, str) else v}")
    return "\n".join(lines)


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        result = args.fn(args)
    except (solver.CapExceeded, oracle.CapExceeded, nic.LightconeTooWide) as e:
        print(f"stabsat: cap exceeded: {e}", file=sys.stderr)
        return 3
    except CircuitFormatError as e:
        print(f"stabsat: {e} ({FORMAT_HELP})", file=sys.stderr)
        return 2
    except (UsageError, ValueError) as e:
        print(f"stabsat: {e}", file=sys.stderr)
        return 2
    if result is not None:
        print(dumps(result) if args.json else _human(result))
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
