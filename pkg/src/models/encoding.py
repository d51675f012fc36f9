"""
Circuit Tensor Encoding

Binary observation tensor of shape [T_max × R × N]:

- slice t describes instruction t (one instruction per slice, no moment packing)
- row layout, top to bottom:
    N rows per two-qubit kind       entry [t, block + control, target]
    1 row per one-qubit kind k      entry [t, row_k, qubit]
    1 row per one-qubit gadget      entry [t, row_g, qubit]
    N rows per two-qubit gadget     entry [t, block + first, second]
- with the native set (CZ; RZ, SX, X) and no gadgets R = N + 3
- the flattened observation is t-major, then row, then column (C order)

Angles are not encoded; decode() returns fresh symbolic parameters.
"""

from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

import numpy as np

import sys
import os
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from grl_errors import EncodingError, GadgetArityError, MalformedObservationError
from models.circuit import (
    GADGET,
    MAX_GADGET_ARITY,
    ONE_QUBIT_KINDS,
    PARAMETERIZED_KINDS,
    TWO_QUBIT_KINDS,
    Circuit,
    GadgetDefinition,
    GateInstruction,
)


@dataclass(frozen=True)
class RowBlock:
    key: str  # gate kind or gadget id
    offset: int
    height: int
    arity: int
    is_gadget: bool


@dataclass(frozen=True)
class EncodingSpec:
    """
    Attributes:
        num_qubits: Register size N
        one_qubit_kinds: Ordered one-qubit gate kinds (N_1q of them)
        two_qubit_kinds: Ordered two-qubit gate kinds
        gadget_kinds: Gadget definitions in acceptance order
        t_max: Maximum number of instructions
    """
    num_qubits: int
    one_qubit_kinds: Tuple[str, ...] = ("RZ", "SX", "X")
    two_qubit_kinds: Tuple[str, ...] = ("CZ",)
    gadget_kinds: Tuple[GadgetDefinition, ...] = ()
    t_max: int = 20

    def __post_init__(self):
        object.__setattr__(self, "one_qubit_kinds", tuple(self.one_qubit_kinds))
        object.__setattr__(self, "two_qubit_kinds", tuple(self.two_qubit_kinds))
        object.__setattr__(self, "gadget_kinds", tuple(self.gadget_kinds))
        if self.num_qubits < 1 or self.t_max < 1:
            raise EncodingError("Encoding needs N >= 1 and T_max >= 1")
        for kind in self.one_qubit_kinds:
            if kind not in ONE_QUBIT_KINDS:
                raise EncodingError(f"{kind!r} is not a one-qubit gate kind")
        for kind in self.two_qubit_kinds:
            if kind not in TWO_QUBIT_KINDS:
                raise EncodingError(f"{kind!r} is not a two-qubit gate kind")
        if self.two_qubit_kinds and self.num_qubits < 2:
            raise EncodingError("Two-qubit kinds need at least two qubits")
        for gadget in self.gadget_kinds:
            if gadget.arity > MAX_GADGET_ARITY:
                raise GadgetArityError(f"Gadget {gadget.gadget_id} has arity {gadget.arity}")
        keys = list(self.one_qubit_kinds) + list(self.two_qubit_kinds) + \
            [g.gadget_id for g in self.gadget_kinds]
        if len(set(keys)) != len(keys):
            raise EncodingError("Encoding kinds must be distinct")

    def blocks(self) -> List[RowBlock]:
        n = self.num_qubits
        blocks = []
        offset = 0
        for kind in self.two_qubit_kinds:
            blocks.append(RowBlock(kind, offset, n, 2, False))
            offset += n
        for kind in self.one_qubit_kinds:
            blocks.append(RowBlock(kind, offset, 1, 1, False))
            offset += 1
        for gadget in self.gadget_kinds:
            height = 1 if gadget.arity == 1 else n
            blocks.append(RowBlock(gadget.gadget_id, offset, height, gadget.arity, True))
            offset += height
        return blocks

    @property
    def rows(self) -> int:
        return sum(block.height for block in self.blocks())

    @property
    def shape(self) -> Tuple[int, int, int]:
        return (self.t_max, self.rows, self.num_qubits)

    @property
    def observation_size(self) -> int:
        t, r, n = self.shape
        return t * r * n

    def gadget(self, gadget_id: str) -> GadgetDefinition:
        for gadget in self.gadget_kinds:
            if gadget.gadget_id == gadget_id:
                return gadget
        raise EncodingError(f"Gadget {gadget_id!r} is not part of the encoding")


@dataclass(frozen=True, eq=False)
class CircuitObservation:
    tensor: np.ndarray

    def flat(self) -> np.ndarray:
        return self.tensor.reshape(-1).astype(float)

    @classmethod
    def from_flat(cls, vector: Sequence[float], spec: EncodingSpec) -> "CircuitObservation":
        vector = np.asarray(vector)
        if vector.size != spec.observation_size:
            raise MalformedObservationError(
                f"Observation of size {vector.size} does not match {spec.shape}")
        return cls(vector.reshape(spec.shape))


def _block_lookup(spec: EncodingSpec) -> Dict[str, RowBlock]:
    return {block.key: block for block in spec.blocks()}


def encode(circuit: Circuit, spec: EncodingSpec) -> CircuitObservation:
    """
    Encode the structure of a circuit.

    Args:
        circuit: Circuit with at most T_max instructions over the spec's kinds
        spec: Encoding layout

    Returns:
        Binary observation tensor of shape spec.shape
    """
    if circuit.num_qubits != spec.num_qubits:
        raise EncodingError(
            f"Circuit has {circuit.num_qubits} qubits, encoding expects {spec.num_qubits}")
    if len(circuit) > spec.t_max:
        raise EncodingError(f"Circuit has {len(circuit)} instructions, T_max is {spec.t_max}")
    lookup = _block_lookup(spec)
    tensor = np.zeros(spec.shape, dtype=np.int8)
    for t, gate in enumerate(circuit.instructions):
        key = gate.gadget_id if gate.kind == GADGET else gate.kind
        block = lookup.get(key)
        if block is None or block.is_gadget != (gate.kind == GADGET):
            raise EncodingError(f"Gate kind {key!r} is not part of the encoding")
        if block.arity == 2:
            tensor[t, block.offset + gate.qubits[0], gate.qubits[1]] = 1
        else:
            tensor[t, block.offset, gate.qubits[0]] = 1
    return CircuitObservation(tensor)


def decode(obs: CircuitObservation, spec: EncodingSpec) -> Circuit:
    """
    Recover gate kinds and placements; parameters come back as fresh symbols.

    Args:
        obs: Observation produced under spec
        spec: Encoding layout

    Returns:
        Circuit whose parameters are theta_0, theta_1, ... in order of use
    """
    tensor = np.asarray(obs.tensor)
    if tensor.shape != spec.shape:
        raise MalformedObservationError(f"Observation shape {tensor.shape} != {spec.shape}")
    if np.any((tensor != 0) & (tensor != 1)):
        raise MalformedObservationError("Observation entries must be 0 or 1")

    row_owner: List[RowBlock] = []
    for block in spec.blocks():
        row_owner.extend([block] * block.height)

    gates: List[GateInstruction] = []
    gadgets: List[GadgetDefinition] = []
    symbol_count = 0
    ended = False
    for t in range(spec.t_max):
        entries = np.argwhere(tensor[t])
        if len(entries) == 0:
            ended = True
            continue
        if ended:
            raise MalformedObservationError(f"Slice {t} follows an empty slice")
        if len(entries) > 1:
            raise MalformedObservationError(f"Slice {t} encodes {len(entries)} gates")
        row, col = (int(v) for v in entries[0])
        block = row_owner[row]
        qubits = (row - block.offset, col) if block.arity == 2 else (col,)
        if len(set(qubits)) != len(qubits):
            raise MalformedObservationError(f"Slice {t} places {block.key} on one qubit twice")

        if block.is_gadget:
            gadget = spec.gadget(block.key)
            symbols = tuple(f"theta_{symbol_count + i}" for i in range(gadget.angle_slots))
            symbol_count += gadget.angle_slots
            gates.append(GateInstruction(GADGET, qubits, symbols, gadget.gadget_id))
            if gadget not in gadgets:
                gadgets.append(gadget)
        elif block.key in PARAMETERIZED_KINDS:
            gates.append(GateInstruction(block.key, qubits, (f"theta_{symbol_count}",)))
            symbol_count += 1
        else:
            gates.append(GateInstruction(block.key, qubits))
    return Circuit.from_gates(spec.num_qubits, gates, gadgets)


def extend_for_gadgets(spec: EncodingSpec, gadgets: Sequence[GadgetDefinition]) -> EncodingSpec:
    """
    Append one row block per gadget: 1 row for arity 1, N rows for arity 2.

    Args:
        spec: Current layout
        gadgets: New gadget definitions (arity <= 2)

    Returns:
        Extended layout; unchanged when gadgets is empty
    """
    for gadget in gadgets:
        if gadget.arity > MAX_GADGET_ARITY:
            raise GadgetArityError(f"Gadget {gadget.gadget_id} has arity {gadget.arity}")
    if not gadgets:
        return spec
    return EncodingSpec(
        num_qubits=spec.num_qubits,
        one_qubit_kinds=spec.one_qubit_kinds,
        two_qubit_kinds=spec.two_qubit_kinds,
        gadget_kinds=spec.gadget_kinds + tuple(gadgets),
        t_max=spec.t_max,
    )
