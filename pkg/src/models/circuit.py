"""
Circuit Intermediate Representation

Gate instructions, parameterized circuits, gadget definitions, parameter
binding and gate-count/depth metrics.

Gate sets:
- Native set:    {CZ, RZ, SX, X}   (no transpilation needed on the target processor)
- Universal set: {RX, RY, RZ, CX}  (baseline for the gate-count comparison)
- GADGET(id):    a composite gate with 1 or 2 qubit arguments and zero or more
                 angle slots, expanded through its GadgetDefinition

Parameters are either bound real angles (radians) or symbolic references
(strings) into the circuit's ordered parameter list.

Qubit ordering: qubit 0 is the most significant bit of a basis index.

Serialization layout is documented in docs/file_formats.md.
"""

import json
import numbers
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import sys
import os
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from grl_errors import (
    GadgetArityError,
    InvalidGateError,
    ParameterCountError,
    QubitIndexError,
    UnboundParameterError,
)


ParamValue = Union[float, str]

ONE_QUBIT_KINDS = ("RZ", "SX", "X", "RX", "RY")
TWO_QUBIT_KINDS = ("CZ", "CX")
PARAMETERIZED_KINDS = ("RZ", "RX", "RY")
GADGET = "GADGET"

NATIVE_GATE_SET = ("CZ", "RZ", "SX", "X")
UNIVERSAL_GATE_SET = ("RX", "RY", "RZ", "CX")

MAX_GADGET_ARITY = 2


def is_symbol(value) -> bool:
    return isinstance(value, str)


def _check_param(value) -> ParamValue:
    if isinstance(value, str):
        if not value:
            raise InvalidGateError("Symbolic parameter names must be non-empty")
        return value
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise InvalidGateError(f"Parameter {value!r} is neither a symbol nor a real angle")
    return float(value)


@dataclass(frozen=True)
class GateInstruction:
    """
    One gate application.

    Attributes:
        kind: Gate kind (see module docstring)
        qubits: Qubit indices the gate acts on (control first for CZ/CX)
        params: Angles or symbols; exactly one for RZ/RX/RY, none for X/SX/CZ/CX,
                one per angle slot for gadgets
        gadget_id: Identifier of the gadget definition (GADGET only)
    """
    kind: str
    qubits: Tuple[int, ...]
    params: Tuple[ParamValue, ...] = ()
    gadget_id: Optional[str] = None

    def __post_init__(self):
        qubits = tuple(int(q) for q in self.qubits)
        params = tuple(_check_param(p) for p in self.params)
        object.__setattr__(self, "qubits", qubits)
        object.__setattr__(self, "params", params)

        if len(set(qubits)) != len(qubits):
            raise InvalidGateError(f"{self.kind} acts on repeated qubits {qubits}")
        if any(q < 0 for q in qubits):
            raise QubitIndexError(f"{self.kind} has a negative qubit index {qubits}")

        if self.kind == GADGET:
            if not self.gadget_id:
                raise InvalidGateError("GADGET instructions need a gadget_id")
            if not 1 <= len(qubits) <= MAX_GADGET_ARITY:
                raise GadgetArityError(f"Gadget {self.gadget_id} placed on {len(qubits)} qubits")
            return

        if self.gadget_id is not None:
            raise InvalidGateError(f"{self.kind} cannot carry a gadget_id")
        if self.kind in TWO_QUBIT_KINDS:
            expected_qubits = 2
        elif self.kind in ONE_QUBIT_KINDS:
            expected_qubits = 1
        else:
            raise InvalidGateError(f"Unknown gate kind {self.kind!r}")
        if len(qubits) != expected_qubits:
            raise InvalidGateError(
                f"{self.kind} takes {expected_qubits} qubit(s), got {len(qubits)}")
        expected_params = 1 if self.kind in PARAMETERIZED_KINDS else 0
        if len(params) != expected_params:
            raise InvalidGateError(
                f"{self.kind} takes {expected_params} parameter(s), got {len(params)}")

    @property
    def param(self) -> Optional[ParamValue]:
        return self.params[0] if self.params else None

    @property
    def is_bound(self) -> bool:
        return not any(is_symbol(p) for p in self.params)

    @property
    def is_two_qubit(self) -> bool:
        return len(self.qubits) == 2

    def symbols(self) -> List[str]:
        return [p for p in self.params if is_symbol(p)]

    def substitute(self, mapping: Mapping[str, ParamValue]) -> "GateInstruction":
        """Replace symbolic parameters found in mapping; others are kept."""
        if not self.params:
            return self
        params = tuple(mapping.get(p, p) if is_symbol(p) else p for p in self.params)
        return GateInstruction(self.kind, self.qubits, params, self.gadget_id)

    def to_dict(self) -> dict:
        entry = {"kind": self.kind, "qubits": list(self.qubits)}
        if self.kind == GADGET:
            entry["gadget"] = self.gadget_id
            entry["params"] = [_param_to_dict(p) for p in self.params]
        else:
            entry["param"] = _param_to_dict(self.param) if self.params else None
        return entry

    @classmethod
    def from_dict(cls, entry: Mapping) -> "GateInstruction":
        kind = entry["kind"]
        if kind == GADGET:
            params = tuple(_param_from_dict(p) for p in entry.get("params", []))
            return cls(kind, tuple(entry["qubits"]), params, entry["gadget"])
        param = entry.get("param")
        params = () if param is None else (_param_from_dict(param),)
        return cls(kind, tuple(entry["qubits"]), params)

    def __str__(self):
        name = self.gadget_id if self.kind == GADGET else self.kind
        args = ",".join(str(q) for q in self.qubits)
        if self.params:
            angles = ",".join(p if is_symbol(p) else f"{p:.6g}" for p in self.params)
            return f"{name}({angles};{args})"
        return f"{name}({args})"


def _param_to_dict(value: ParamValue) -> dict:
    return {"symbol": value} if is_symbol(value) else {"value": float(value)}


def _param_from_dict(entry: Mapping) -> ParamValue:
    if "symbol" in entry:
        return str(entry["symbol"])
    return float(entry["value"])


def slot_name(index: int) -> str:
    return f"a{index}"


@dataclass(frozen=True)
class GadgetDefinition:
    """
    A composite gate extracted from top-performing circuits.

    The body uses local qubit indices 0..arity-1 and angle slots named
    a0..a{angle_slots-1}; placing the gadget maps both onto the host circuit.
    """
    gadget_id: str
    arity: int
    angle_slots: int
    body: Tuple[GateInstruction, ...]
    program: str = ""

    def __post_init__(self):
        object.__setattr__(self, "body", tuple(self.body))
        if not 1 <= self.arity <= MAX_GADGET_ARITY:
            raise GadgetArityError(
                f"Gadget {self.gadget_id} has arity {self.arity}; maximum is {MAX_GADGET_ARITY}")
        if not self.body:
            raise InvalidGateError(f"Gadget {self.gadget_id} has an empty body")
        slots = set(self.slot_names())
        for gate in self.body:
            if gate.kind == GADGET:
                raise InvalidGateError("Gadget bodies must contain elementary gates only")
            if any(q >= self.arity for q in gate.qubits):
                raise QubitIndexError(
                    f"Gadget {self.gadget_id} body addresses qubit outside arity {self.arity}")
            for symbol in gate.symbols():
                if symbol not in slots:
                    raise InvalidGateError(
                        f"Gadget {self.gadget_id} body references unknown slot {symbol!r}")

    def slot_names(self) -> Tuple[str, ...]:
        return tuple(slot_name(i) for i in range(self.angle_slots))

    @property
    def size(self) -> int:
        return len(self.body)

    @property
    def two_qubit_gates(self) -> int:
        return sum(1 for gate in self.body if gate.is_two_qubit)

    def expand(self, qubits: Sequence[int], params: Sequence[ParamValue]) -> List[GateInstruction]:
        """Instantiate the body on host qubits with host parameters."""
        if len(qubits) != self.arity:
            raise InvalidGateError(
                f"Gadget {self.gadget_id} expects {self.arity} qubit(s), got {len(qubits)}")
        if len(params) != self.angle_slots:
            raise ParameterCountError(
                f"Gadget {self.gadget_id} expects {self.angle_slots} angle(s), got {len(params)}")
        slot_values = dict(zip(self.slot_names(), params))
        expanded = []
        for gate in self.body:
            mapped = GateInstruction(gate.kind, tuple(qubits[q] for q in gate.qubits), gate.params)
            expanded.append(mapped.substitute(slot_values))
        return expanded

    def to_dict(self) -> dict:
        return {
            "id": self.gadget_id,
            "arity": self.arity,
            "angle_slots": self.angle_slots,
            "program": self.program,
            "body": [gate.to_dict() for gate in self.body],
        }

    @classmethod
    def from_dict(cls, entry: Mapping) -> "GadgetDefinition":
        return cls(
            gadget_id=entry["id"],
            arity=int(entry["arity"]),
            angle_slots=int(entry["angle_slots"]),
            body=tuple(GateInstruction.from_dict(g) for g in entry["body"]),
            program=entry.get("program", ""),
        )


@dataclass(frozen=True)
class Circuit:
    """
    Parameterized quantum circuit U(θ̄).

    Attributes:
        num_qubits: Register size N
        instructions: Ordered gate instructions
        parameters: Ordered free symbols θ̄
        gadgets: Definitions of every gadget the instructions reference
    """
    num_qubits: int
    instructions: Tuple[GateInstruction, ...] = ()
    parameters: Tuple[str, ...] = ()
    gadgets: Tuple[GadgetDefinition, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "instructions", tuple(self.instructions))
        object.__setattr__(self, "parameters", tuple(self.parameters))
        object.__setattr__(self, "gadgets", tuple(self.gadgets))

        if self.num_qubits < 1:
            raise QubitIndexError(f"A circuit needs at least one qubit, got {self.num_qubits}")
        if len(set(self.parameters)) != len(self.parameters):
            raise InvalidGateError("Parameter list contains duplicates")
        known_gadgets = {g.gadget_id for g in self.gadgets}
        if len(known_gadgets) != len(self.gadgets):
            raise InvalidGateError("Gadget definitions contain duplicate ids")

        declared = set(self.parameters)
        for gate in self.instructions:
            if any(q >= self.num_qubits for q in gate.qubits):
                raise QubitIndexError(
                    f"{gate} addresses a qubit outside a {self.num_qubits}-qubit register")
            for symbol in gate.symbols():
                if symbol not in declared:
                    raise ParameterCountError(f"Symbol {symbol!r} is not a declared parameter")
            if gate.kind == GADGET:
                if gate.gadget_id not in known_gadgets:
                    raise InvalidGateError(f"Unknown gadget {gate.gadget_id!r}")
                definition = self.gadget(gate.gadget_id)
                if len(gate.qubits) != definition.arity or len(gate.params) != definition.angle_slots:
                    raise InvalidGateError(f"{gate} does not match gadget signature")

    @classmethod
    def from_gates(cls, num_qubits: int, gates: Iterable[GateInstruction],
                   gadgets: Sequence[GadgetDefinition] = ()) -> "Circuit":
        """Build a circuit whose parameter list is the symbols in order of first use."""
        gates = tuple(gates)
        parameters: List[str] = []
        for gate in gates:
            for symbol in gate.symbols():
                if symbol not in parameters:
                    parameters.append(symbol)
        return cls(num_qubits, gates, tuple(parameters), tuple(gadgets))

    def __len__(self):
        return len(self.instructions)

    @property
    def num_parameters(self) -> int:
        return len(self.parameters)

    @property
    def is_bound(self) -> bool:
        return not self.parameters and all(g.is_bound for g in self.instructions)

    def gadget(self, gadget_id: str) -> GadgetDefinition:
        for definition in self.gadgets:
            if definition.gadget_id == gadget_id:
                return definition
        raise InvalidGateError(f"Unknown gadget {gadget_id!r}")

    def fresh_symbols(self, count: int) -> Tuple[str, ...]:
        taken = set(self.parameters)
        symbols = []
        index = len(self.parameters)
        while len(symbols) < count:
            candidate = f"theta_{index}"
            if candidate not in taken:
                symbols.append(candidate)
            index += 1
        return tuple(symbols)

    def append(self, gate: GateInstruction,
               gadget: Optional[GadgetDefinition] = None) -> "Circuit":
        """Return a new circuit with gate appended; new symbols join the parameter list."""
        parameters = list(self.parameters)
        for symbol in gate.symbols():
            if symbol not in parameters:
                parameters.append(symbol)
        gadgets = self.gadgets
        if gadget is not None and gadget.gadget_id not in {g.gadget_id for g in gadgets}:
            gadgets = gadgets + (gadget,)
        return Circuit(self.num_qubits, self.instructions + (gate,), tuple(parameters), gadgets)

    def to_dict(self) -> dict:
        entry = {
            "num_qubits": self.num_qubits,
            "instructions": [gate.to_dict() for gate in self.instructions],
            "parameters": list(self.parameters),
        }
        if self.gadgets:
            entry["gadgets"] = [g.to_dict() for g in self.gadgets]
        return entry

    @classmethod
    def from_dict(cls, entry: Mapping) -> "Circuit":
        return cls(
            num_qubits=int(entry["num_qubits"]),
            instructions=tuple(GateInstruction.from_dict(g) for g in entry["instructions"]),
            parameters=tuple(entry.get("parameters", ())),
            gadgets=tuple(GadgetDefinition.from_dict(g) for g in entry.get("gadgets", ())),
        )

    def __str__(self):
        return " ".join(str(g) for g in self.instructions) or "I"


def canonical_key(circuit: Circuit) -> str:
    """Structure-only identity of a circuit: kinds, gadget ids and placements."""
    structure = [[g.kind, g.gadget_id, list(g.qubits)] for g in circuit.instructions]
    return json.dumps([circuit.num_qubits, structure], separators=(",", ":"))


def bind(circuit: Circuit, values: Sequence[float]) -> Circuit:
    """
    Bind every free parameter.

    Args:
        circuit: Circuit with free parameters θ̄
        values: One real angle per parameter, in parameter-list order

    Returns:
        The same circuit with all symbols replaced and an empty parameter list
    """
    values = [float(v) for v in values]
    if len(values) != circuit.num_parameters:
        raise ParameterCountError(
            f"Circuit has {circuit.num_parameters} parameter(s), got {len(values)} value(s)")
    mapping = dict(zip(circuit.parameters, values))
    gates = tuple(g.substitute(mapping) for g in circuit.instructions)
    return Circuit(circuit.num_qubits, gates, (), circuit.gadgets)


def expand_gadgets(circuit: Circuit) -> Circuit:
    """Replace every gadget instruction by its body; parameters are unchanged."""
    if not any(g.kind == GADGET for g in circuit.instructions):
        if not circuit.gadgets:
            return circuit
        return Circuit(circuit.num_qubits, circuit.instructions, circuit.parameters)
    gates: List[GateInstruction] = []
    for gate in circuit.instructions:
        if gate.kind == GADGET:
            gates.extend(circuit.gadget(gate.gadget_id).expand(gate.qubits, gate.params))
        else:
            gates.append(gate)
    return Circuit(circuit.num_qubits, tuple(gates), circuit.parameters)


def require_bound(circuit: Circuit) -> None:
    for gate in circuit.instructions:
        if not gate.is_bound:
            raise UnboundParameterError(f"{gate} carries an unbound parameter")


@dataclass(frozen=True)
class CircuitMetrics:
    """
    Gate-count and depth summary of an elementary-gate circuit.

    Attributes:
        counts: Gate count per kind
        total_gates: Number of elementary gates
        two_qubit_gates: Number of CZ + CX gates
        depth: Number of moments under greedy left-packing
    """
    counts: Dict[str, int] = field(default_factory=dict)
    total_gates: int = 0
    two_qubit_gates: int = 0
    depth: int = 0

    def count(self, kind: str) -> int:
        return self.counts.get(kind, 0)

    def row(self, kinds: Sequence[str] = NATIVE_GATE_SET) -> Tuple[int, ...]:
        return tuple(self.count(k) for k in kinds)

    def to_dict(self) -> dict:
        return {
            "counts": dict(sorted(self.counts.items())),
            "total_gates": self.total_gates,
            "two_qubit_gates": self.two_qubit_gates,
            "depth": self.depth,
        }


def moment_schedule(gates: Sequence[GateInstruction]) -> List[int]:
    """
    Assign each gate to the earliest moment after every earlier gate sharing a qubit.

    Returns:
        Zero-based moment index per gate
    """
    frontier: Dict[int, int] = {}
    moments = []
    for gate in gates:
        moment = max((frontier.get(q, 0) for q in gate.qubits), default=0)
        moments.append(moment)
        for q in gate.qubits:
            frontier[q] = moment + 1
    return moments


def metrics(circuit: Circuit) -> CircuitMetrics:
    """
    Count gates and moments on the elementary (gadget-expanded) circuit.
    """
    gates = expand_gadgets(circuit).instructions
    counts: Dict[str, int] = {}
    for gate in gates:
        counts[gate.kind] = counts.get(gate.kind, 0) + 1
    moments = moment_schedule(gates)
    return CircuitMetrics(
        counts=dict(sorted(counts.items())),
        total_gates=len(gates),
        two_qubit_gates=sum(1 for g in gates if g.is_two_qubit),
        depth=(max(moments) + 1) if moments else 0,
    )
