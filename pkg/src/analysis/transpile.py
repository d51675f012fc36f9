"""
Transpilation Analysis Module

Local peephole simplification and template decomposition into the native
gate set {CZ, RZ, SX, X}, used to compare gate counts of circuits found with
different gate sets.

Peephole rules (applied to an instruction and the next instruction sharing
any of its qubits, until no rule fires):
- X·X → ∅
- SX·SX → X
- CZ(a,b)·CZ(a,b) → ∅   (also CZ(a,b)·CZ(b,a))
- CX(c,t)·CX(c,t) → ∅
- RZ(a)·RZ(b) → RZ(a+b)  (bound angles)
- RZ/RX/RY(θ) with θ ≡ 0 (mod 2π) → ∅  (global phase only)

Decomposition templates (circuit order, global phase ignored):
- U ∈ U(2)  → RZ(λ) SX RZ(θ+π) SX RZ(φ+π), with (θ, φ, λ) the Euler angles of U
- RX(θ) symbolic → H RZ(θ) H, H ≅ RZ(π/2) SX RZ(π/2)
- RY(θ) symbolic → RZ(-π/2) RX(θ) RZ(π/2)
- CX(c,t) → H_t CZ(c,t) H_t
"""

import logging
import math
from typing import List, Optional, Tuple

import numpy as np

import sys
import os
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from models.circuit import (
    NATIVE_GATE_SET,
    Circuit,
    CircuitMetrics,
    GateInstruction,
    expand_gadgets,
    is_symbol,
    metrics,
)
from models.statevector import gate_matrix

logger = logging.getLogger(__name__)

ANGLE_TOLERANCE = 1e-12
TWO_PI = 2.0 * math.pi


def is_zero_angle(angle) -> bool:
    """True for a bound angle that is a multiple of 2π."""
    if is_symbol(angle):
        return False
    residue = math.fmod(abs(float(angle)), TWO_PI)
    return residue < ANGLE_TOLERANCE or TWO_PI - residue < ANGLE_TOLERANCE


def _next_on_qubits(gates: List[GateInstruction], index: int) -> Optional[int]:
    qubits = set(gates[index].qubits)
    for j in range(index + 1, len(gates)):
        if qubits & set(gates[j].qubits):
            return j
    return None


def _merge_pair(first: GateInstruction, second: GateInstruction):
    """
    Result of a rewrite on two gates with no gate between them on their qubits.

    Returns:
        None when no rule applies, otherwise the (possibly empty) replacement list
    """
    if first.kind != second.kind:
        return None
    kind = first.kind
    if kind in ("X", "SX") and first.qubits == second.qubits:
        return [] if kind == "X" else [GateInstruction("X", first.qubits)]
    if kind == "CZ" and set(first.qubits) == set(second.qubits):
        return []
    if kind == "CX" and first.qubits == second.qubits:
        return []
    if kind == "RZ" and first.qubits == second.qubits and first.is_bound and second.is_bound:
        return [GateInstruction("RZ", first.qubits, (first.param + second.param,))]
    return None


def _peephole(gates: List[GateInstruction]) -> Tuple[List[GateInstruction], bool]:
    for i, gate in enumerate(gates):
        if gate.kind in ("RZ", "RX", "RY") and is_zero_angle(gate.param):
            return gates[:i] + gates[i + 1:], True
        j = _next_on_qubits(gates, i)
        if j is None:
            continue
        replacement = _merge_pair(gate, gates[j])
        if replacement is not None:
            return gates[:i] + replacement + gates[i + 1:j] + gates[j + 1:], True
    return gates, False


def simplify(circuit: Circuit) -> Circuit:
    """
    Apply the peephole rules until fixpoint.

    Gadgets are expanded first. The parameter list is kept, so a simplified
    circuit binds with the same values as its source.

    Args:
        circuit: Bound or symbolic circuit

    Returns:
        Circuit with no more gates than the expanded input
    """
    gates = list(expand_gadgets(circuit).instructions)
    before = len(gates)
    changed = True
    while changed:
        gates, changed = _peephole(gates)
    logger.debug("simplify: %d → %d gates", before, len(gates))
    return Circuit(circuit.num_qubits, tuple(gates), circuit.parameters)


def euler_angles(matrix: np.ndarray) -> Tuple[float, float, float]:
    """
    (θ, φ, λ) with matrix = e^{iα} U3(θ, φ, λ).

    U3 = [[cos θ/2, -e^{iλ} sin θ/2], [e^{iφ} sin θ/2, e^{i(φ+λ)} cos θ/2]]
    """
    su = matrix / np.sqrt(np.linalg.det(matrix))
    theta = 2.0 * math.atan2(abs(su[1, 0]), abs(su[0, 0]))
    phase_sum = float(np.angle(su[1, 1]))
    phase_diff = float(np.angle(su[1, 0]))
    return theta, phase_sum + phase_diff, phase_sum - phase_diff


def one_qubit_to_native(matrix: np.ndarray, qubit: int) -> List[GateInstruction]:
    """ZSX template for any single-qubit unitary."""
    theta, phi, lam = euler_angles(matrix)
    q = (qubit,)
    return [
        GateInstruction("RZ", q, (lam,)),
        GateInstruction("SX", q),
        GateInstruction("RZ", q, (theta + math.pi,)),
        GateInstruction("SX", q),
        GateInstruction("RZ", q, (phi + math.pi,)),
    ]


def _hadamard(qubit: int) -> List[GateInstruction]:
    q = (qubit,)
    half = math.pi / 2
    return [GateInstruction("RZ", q, (half,)), GateInstruction("SX", q),
            GateInstruction("RZ", q, (half,))]


def _symbolic_rotation(gate: GateInstruction) -> List[GateInstruction]:
    q = gate.qubits
    core = _hadamard(q[0]) + [GateInstruction("RZ", q, (gate.param,))] + _hadamard(q[0])
    if gate.kind == "RX":
        return core
    return ([GateInstruction("RZ", q, (-math.pi / 2,))] + core
            + [GateInstruction("RZ", q, (math.pi / 2,))])


def decompose_to_native(circuit: Circuit) -> Circuit:
    """
    Rewrite RX, RY and CX into {CZ, RZ, SX, X}.

    Args:
        circuit: Circuit over native and/or universal gates (gadgets allowed)

    Returns:
        Equivalent circuit (up to global phase) using native gates only
    """
    gates: List[GateInstruction] = []
    for gate in expand_gadgets(circuit).instructions:
        if gate.kind in ("RX", "RY"):
            if gate.is_bound:
                gates.extend(one_qubit_to_native(gate_matrix(gate.kind, gate.param),
                                                 gate.qubits[0]))
            else:
                gates.extend(_symbolic_rotation(gate))
        elif gate.kind == "CX":
            control, target = gate.qubits
            gates.extend(_hadamard(target))
            gates.append(GateInstruction("CZ", (control, target)))
            gates.extend(_hadamard(target))
        else:
            gates.append(gate)
    return Circuit(circuit.num_qubits, tuple(gates), circuit.parameters)


def transpile_count(circuit: Circuit) -> CircuitMetrics:
    """Native gate metrics after simplify → decompose → simplify."""
    return metrics(simplify(decompose_to_native(simplify(circuit))))


def format_count_row(result: CircuitMetrics) -> str:
    """Row in the #CZ #RZ #SX #X layout."""
    header = " ".join(f"#{kind}" for kind in NATIVE_GATE_SET)
    values = " ".join(f"{result.count(kind):>{len(kind) + 1}d}" for kind in NATIVE_GATE_SET)
    return f"{header}\n{values}"
