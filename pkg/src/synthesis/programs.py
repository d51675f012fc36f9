"""
Circuits as programs.

A circuit is a right-nested chain of gate applications over the empty
circuit I_N; the outermost application is the last gate:

    [X(0), CZ(0,1)] on N=2  →  cz(x(I_2,0),0,1)

to_program and linearize are inverse to each other on elementary circuits.
"""

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

import sys
import os
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from models.circuit import (
    GADGET,
    Circuit,
    GadgetDefinition,
    GateInstruction,
    ParamValue,
    is_symbol,
)


@dataclass(frozen=True)
class EmptyCircuit:
    num_qubits: int

    def __str__(self):
        return f"I_{self.num_qubits}"


@dataclass(frozen=True)
class GateApplication:
    """
    Attributes:
        gate: Gate kind
        child: Subprogram the gate is applied to
        qubits: Qubit arguments
        angles: Angle arguments (empty for X/SX/CZ/CX)
        gadget_id: Gadget identifier for GADGET applications
    """
    gate: str
    child: "ProgramTree"
    qubits: Tuple[int, ...]
    angles: Tuple[ParamValue, ...] = ()
    gadget_id: Optional[str] = None


ProgramTree = Union[EmptyCircuit, GateApplication]


def to_program(circuit: Circuit) -> ProgramTree:
    tree: ProgramTree = EmptyCircuit(circuit.num_qubits)
    for gate in circuit.instructions:
        tree = GateApplication(gate.kind, tree, gate.qubits, gate.params, gate.gadget_id)
    return tree


def applications(tree: ProgramTree) -> List[GateApplication]:
    """Gate applications in circuit order (innermost first)."""
    nodes = []
    while isinstance(tree, GateApplication):
        nodes.append(tree)
        tree = tree.child
    nodes.reverse()
    return nodes


def root_qubits(tree: ProgramTree) -> int:
    while isinstance(tree, GateApplication):
        tree = tree.child
    return tree.num_qubits


def linearize(tree: ProgramTree, gadgets: Sequence[GadgetDefinition] = ()) -> Circuit:
    gates = [GateInstruction(node.gate, node.qubits, node.angles, node.gadget_id)
             for node in applications(tree)]
    used = {g.gadget_id for g in gates if g.kind == GADGET}
    return Circuit.from_gates(root_qubits(tree), gates,
                              [g for g in gadgets if g.gadget_id in used])


def _format_angle(angle: ParamValue) -> str:
    return angle if is_symbol(angle) else f"{angle:.6g}"


def format_program(tree: ProgramTree) -> str:
    """cz(x(I_2,0),0,1) style rendering."""
    text = str(EmptyCircuit(root_qubits(tree)))
    for node in applications(tree):
        name = node.gadget_id if node.gate == GADGET else node.gate.lower()
        args = [text] + [_format_angle(a) for a in node.angles] + [str(q) for q in node.qubits]
        text = f"{name}({','.join(args)})"
    return text
