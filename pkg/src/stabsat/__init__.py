"""Clifford+T circuit satisfiability and non-identity checking, exponential only in the T-count."""

from .circuit import Circuit, Gate, QcsatInstance, gadgetize, parse_circuit, parse_gate_file, serialize_circuit
from .nic import NicInstance, decide_nic_clifford, decide_nic_lightcone
from .solver import decide_qcsat, estimate_val, exact_val, extract_witness, solve
from .tableau import CliffordTableau, tableau_from_circuit

__version__ = "0.1.0"

__all__ = [
    "Circuit", "Gate", "QcsatInstance", "gadgetize", "parse_circuit", "parse_gate_file", "serialize_circuit",
    "NicInstance", "decide_nic_clifford", "decide_nic_lightcone",
    "decide_qcsat", "estimate_val", "exact_val", "extract_witness", "solve",
    "CliffordTableau", "tableau_from_circuit",
]
