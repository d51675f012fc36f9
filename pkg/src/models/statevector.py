"""
Statevector Simulation Module

Dense complex statevector simulation of circuits, Pauli-sum expectation values
and exact diagonalization (ground-truth oracle).

Conventions:
- Qubit 0 is the most significant bit of a basis index: for N = 2 the basis
  order is |00⟩, |01⟩, |10⟩, |11⟩ and X on qubit 0 maps |00⟩ → |10⟩
- complex128 throughout; global phase is ignored by every equivalence check

Gate matrices:
- X  = [[0, 1], [1, 0]]
- SX = (1/2)[[1+i, 1-i], [1-i, 1+i]]          (SX·SX = X)
- RZ(θ) = diag(e^{-iθ/2}, e^{iθ/2})
- RX(θ) = cos(θ/2) I - i sin(θ/2) X
- RY(θ) = cos(θ/2) I - i sin(θ/2) Y
- CZ = diag(1, 1, 1, -1)                       (symmetric in its qubits)
- CX = |0⟩⟨0| ⊗ I + |1⟩⟨1| ⊗ X                 (control first)

Pauli strings are applied through bitmasks, never through Kronecker products:
X/Y flip a bit, Z/Y contribute a (-1)^bit phase, Y an extra factor i.
"""

import logging
from dataclasses import dataclass
from typing import TYPE_CHECKING, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg

import sys
import os
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from config.grl_parameters import params
from grl_errors import (
    ImaginaryResidueError,
    InvalidGateError,
    InvalidHamiltonianError,
    OracleBoundError,
    ParameterCountError,
    QubitCountMismatchError,
    QubitIndexError,
    UnboundParameterError,
)
from models.circuit import (
    GADGET,
    PARAMETERIZED_KINDS,
    Circuit,
    GateInstruction,
    expand_gadgets,
    is_symbol,
)

if TYPE_CHECKING:
    from models.hamiltonians import PauliHamiltonian

logger = logging.getLogger(__name__)

IMAGINARY_TOLERANCE = 1e-10


# ===================================================================
# GATE MATRICES
# ===================================================================

X_MATRIX = np.array([[0, 1], [1, 0]], dtype=complex)
Y_MATRIX = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z_MATRIX = np.array([[1, 0], [0, -1]], dtype=complex)
SX_MATRIX = 0.5 * np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]], dtype=complex)
CZ_MATRIX = np.diag([1, 1, 1, -1]).astype(complex)
CX_MATRIX = np.array([[1, 0, 0, 0],
                      [0, 1, 0, 0],
                      [0, 0, 0, 1],
                      [0, 0, 1, 0]], dtype=complex)


def rz_matrix(theta: float) -> np.ndarray:
    return np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)])


def rx_matrix(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)


def ry_matrix(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


_FIXED_MATRICES = {"X": X_MATRIX, "SX": SX_MATRIX, "CZ": CZ_MATRIX, "CX": CX_MATRIX}
_ROTATIONS = {"RZ": rz_matrix, "RX": rx_matrix, "RY": ry_matrix}


def gate_matrix(kind: str, angle: Optional[float] = None) -> np.ndarray:
    """
    Unitary of an elementary gate.

    Args:
        kind: Elementary gate kind
        angle: Rotation angle in radians (RZ/RX/RY only)

    Returns:
        2x2 or 4x4 complex matrix (first qubit most significant)
    """
    if kind in _FIXED_MATRICES:
        return _FIXED_MATRICES[kind]
    if kind in _ROTATIONS:
        if angle is None or is_symbol(angle):
            raise UnboundParameterError(f"{kind} needs a bound angle")
        return _ROTATIONS[kind](float(angle))
    raise InvalidGateError(f"No matrix for gate kind {kind!r}")


# ===================================================================
# STATES AND OPERATORS
# ===================================================================

@dataclass(frozen=True, eq=False)
class Statevector:
    """
    Dense statevector of an N-qubit register.

    Attributes:
        amplitudes: 2^N complex amplitudes
        num_qubits: Register size N
    """
    amplitudes: np.ndarray
    num_qubits: int

    def __post_init__(self):
        amplitudes = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if self.num_qubits < 1:
            raise QubitIndexError("A statevector needs at least one qubit")
        if amplitudes.shape[0] != 2 ** self.num_qubits:
            raise QubitCountMismatchError(
                f"{amplitudes.shape[0]} amplitudes do not describe {self.num_qubits} qubits")
        object.__setattr__(self, "amplitudes", amplitudes)

    @classmethod
    def zero(cls, num_qubits: int) -> "Statevector":
        return cls.basis(num_qubits, 0)

    @classmethod
    def basis(cls, num_qubits: int, index: int) -> "Statevector":
        amplitudes = np.zeros(2 ** num_qubits, dtype=complex)
        amplitudes[index] = 1.0
        return cls(amplitudes, num_qubits)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def overlap(self, other: "Statevector") -> complex:
        if other.num_qubits != self.num_qubits:
            raise QubitCountMismatchError("Overlap of states with different qubit counts")
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def fidelity(self, other: "Statevector") -> float:
        """|⟨ψ|φ⟩|, insensitive to global phase."""
        return abs(self.overlap(other))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


@dataclass(frozen=True, eq=False)
class DenseOperator:
    entries: np.ndarray
    num_qubits: int

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        return bool(np.allclose(self.entries, self.entries.conj().T, atol=tol, rtol=0.0))


def _apply_matrix(amplitudes: np.ndarray, num_qubits: int, matrix: np.ndarray,
                  qubits: Sequence[int]) -> np.ndarray:
    """
    Apply a k-qubit matrix to the given qubits.

    amplitudes may carry trailing batch axes (shape (2^N, ...)), which lets the
    same routine build full-register unitaries column by column.
    """
    k = len(qubits)
    batch_shape = amplitudes.shape[1:]
    tensor = amplitudes.reshape((2,) * num_qubits + batch_shape)
    gate = matrix.reshape((2,) * (2 * k))
    tensor = np.tensordot(gate, tensor, axes=(list(range(k, 2 * k)), list(qubits)))
    tensor = np.moveaxis(tensor, list(range(k)), list(qubits))
    return tensor.reshape((2 ** num_qubits,) + batch_shape)


def _check_gate(gate: GateInstruction, num_qubits: int) -> None:
    if any(q >= num_qubits for q in gate.qubits):
        raise QubitIndexError(
            f"{gate} addresses a qubit outside a {num_qubits}-qubit register")
    if gate.kind == GADGET:
        raise InvalidGateError(f"{gate} must be expanded before simulation")
    if not gate.is_bound:
        raise UnboundParameterError(f"{gate} carries an unbound parameter")


def apply_gate(state: Statevector, gate: GateInstruction) -> Statevector:
    """
    Apply one bound elementary gate.

    Args:
        state: Input statevector |ψ⟩
        gate: Bound elementary gate

    Returns:
        U_gate|ψ⟩
    """
    _check_gate(gate, state.num_qubits)
    matrix = gate_matrix(gate.kind, gate.param)
    return Statevector(_apply_matrix(state.amplitudes, state.num_qubits, matrix, gate.qubits),
                       state.num_qubits)


def simulate(circuit: Circuit, initial: Optional[Statevector] = None) -> Statevector:
    """
    Simulate a bound circuit (gadgets are expanded first).

    Args:
        circuit: Bound circuit
        initial: Input state, |0...0⟩ when omitted

    Returns:
        U|initial⟩
    """
    state = initial if initial is not None else Statevector.zero(circuit.num_qubits)
    if state.num_qubits != circuit.num_qubits:
        raise QubitCountMismatchError(
            f"Circuit has {circuit.num_qubits} qubits, state has {state.num_qubits}")
    amplitudes = state.amplitudes
    for gate in expand_gadgets(circuit).instructions:
        _check_gate(gate, circuit.num_qubits)
        amplitudes = _apply_matrix(amplitudes, circuit.num_qubits,
                                   gate_matrix(gate.kind, gate.param), gate.qubits)
    return Statevector(amplitudes, circuit.num_qubits)


def circuit_unitary(circuit: Circuit) -> np.ndarray:
    """Full 2^N x 2^N unitary of a bound circuit."""
    dim = 2 ** circuit.num_qubits
    columns = np.eye(dim, dtype=complex)
    for gate in expand_gadgets(circuit).instructions:
        _check_gate(gate, circuit.num_qubits)
        columns = _apply_matrix(columns, circuit.num_qubits,
                                gate_matrix(gate.kind, gate.param), gate.qubits)
    return columns


# ===================================================================
# PAULI ALGEBRA
# ===================================================================

def _pauli_masks(ops: str, num_qubits: int) -> Tuple[int, int, int]:
    """(flip mask, phase mask, number of Y factors) of a Pauli string."""
    flip = 0
    phase = 0
    y_count = 0
    for q, op in enumerate(ops):
        bit = 1 << (num_qubits - 1 - q)
        if op in ("X", "Y"):
            flip |= bit
        if op in ("Z", "Y"):
            phase |= bit
        if op == "Y":
            y_count += 1
    return flip, phase, y_count


def _parity(values: np.ndarray) -> np.ndarray:
    parity = np.zeros_like(values)
    while np.any(values):
        parity ^= values & 1
        values = values >> 1
    return parity


def apply_pauli(amplitudes: np.ndarray, ops: str) -> np.ndarray:
    """
    Apply the Pauli string P = P_0 ⊗ ... ⊗ P_{N-1} to amplitudes.

    (P ψ)[i ^ flip] = i^{#Y} (-1)^{popcount(i & phase)} ψ[i]
    """
    num_qubits = len(ops)
    flip, phase, y_count = _pauli_masks(ops, num_qubits)
    indices = np.arange(2 ** num_qubits)
    signs = 1 - 2 * _parity(indices & phase)
    signs = signs.reshape((-1,) + (1,) * (amplitudes.ndim - 1))
    result = np.empty_like(amplitudes)
    result[indices ^ flip] = (1j ** y_count) * signs * amplitudes
    return result


def expectation(state: Statevector, ham: "PauliHamiltonian") -> float:
    """
    ⟨ψ|H|ψ⟩ for a Pauli-sum Hamiltonian.

    Args:
        state: Statevector |ψ⟩
        ham: Hamiltonian with the same qubit count

    Returns:
        Real energy; an imaginary residue above 1e-10 raises ImaginaryResidueError
    """
    if state.num_qubits != ham.num_qubits:
        raise QubitCountMismatchError(
            f"State has {state.num_qubits} qubits, Hamiltonian has {ham.num_qubits}")
    total = 0.0 + 0.0j
    for term in ham.terms:
        total += term.coefficient * np.vdot(state.amplitudes, apply_pauli(state.amplitudes, term.ops))
    if abs(total.imag) > IMAGINARY_TOLERANCE:
        raise ImaginaryResidueError(f"Expectation has imaginary part {total.imag:.3e}")
    return float(total.real)


def materialize(ham: "PauliHamiltonian") -> DenseOperator:
    """Dense matrix of a Pauli-sum Hamiltonian."""
    dim = 2 ** ham.num_qubits
    entries = np.zeros((dim, dim), dtype=complex)
    columns = np.eye(dim, dtype=complex)
    for term in ham.terms:
        entries += term.coefficient * apply_pauli(columns, term.ops)
    return DenseOperator(entries, ham.num_qubits)


class GroundStateResult(NamedTuple):
    energy: float
    gap: float


def ground_state_oracle(ham: "PauliHamiltonian",
                        max_qubits: int = params.oracle_max_qubits) -> GroundStateResult:
    """
    Exact ground energy E0 and gap E1 - E0 by dense diagonalization.

    Degenerate ground states give a zero gap.

    Args:
        ham: Hamiltonian with N <= max_qubits
        max_qubits: Feasibility bound for the dense eigensolve

    Returns:
        GroundStateResult(energy, gap)
    """
    if ham.num_qubits > max_qubits:
        raise OracleBoundError(
            f"Dense diagonalization supports N <= {max_qubits}, got N = {ham.num_qubits}")
    matrix = materialize(ham).entries
    if not np.any(matrix.imag):
        matrix = matrix.real
    eigenvalues = linalg.eigh(matrix, eigvals_only=True)
    ground = float(eigenvalues[0])
    gap = float(eigenvalues[1] - eigenvalues[0]) if eigenvalues.shape[0] > 1 else 0.0
    logger.debug("Oracle N=%d: E0=%.12f gap=%.3e", ham.num_qubits, ground, gap)
    return GroundStateResult(ground, max(gap, 0.0))


# ===================================================================
# COMPILED PARAMETERIZED EVOLUTION
# ===================================================================

class CompiledCircuit:
    """
    A parameterized circuit prepared for repeated energy evaluation.

    Runs of gates without free symbols are fused into dense unitaries once;
    each evaluation applies the fused blocks and the symbolic rotations.
    """

    def __init__(self, circuit: Circuit, hamiltonian: Optional["PauliHamiltonian"] = None):
        if hamiltonian is not None and hamiltonian.num_qubits != circuit.num_qubits:
            raise QubitCountMismatchError(
                f"Circuit has {circuit.num_qubits} qubits, Hamiltonian has {hamiltonian.num_qubits}")
        self.num_qubits = circuit.num_qubits
        self.num_parameters = circuit.num_parameters
        self._operator = materialize(hamiltonian).entries if hamiltonian is not None else None

        index = {symbol: i for i, symbol in enumerate(circuit.parameters)}
        dim = 2 ** self.num_qubits
        self._steps: List[tuple] = []
        pending: Optional[np.ndarray] = None
        bits = (np.arange(dim)[:, None] >> (self.num_qubits - 1 - np.arange(self.num_qubits))) & 1
        self._z_signs = (1 - 2 * bits).astype(float)

        for gate in expand_gadgets(circuit).instructions:
            if any(q >= self.num_qubits for q in gate.qubits):
                raise QubitIndexError(f"{gate} addresses a qubit outside the register")
            if gate.kind in PARAMETERIZED_KINDS and is_symbol(gate.param):
                if pending is not None:
                    self._steps.append(("fixed", pending))
                    pending = None
                self._steps.append((gate.kind, gate.qubits[0], index[gate.param]))
                continue
            block = pending if pending is not None else np.eye(dim, dtype=complex)
            pending = _apply_matrix(block, self.num_qubits,
                                    gate_matrix(gate.kind, gate.param), gate.qubits)
        if pending is not None:
            self._steps.append(("fixed", pending))

    def state(self, values: Sequence[float]) -> np.ndarray:
        """Amplitudes of U(θ̄)|0...0⟩."""
        values = np.asarray(values, dtype=float).reshape(-1)
        if values.shape[0] != self.num_parameters:
            raise ParameterCountError(
                f"Expected {self.num_parameters} parameter value(s), got {values.shape[0]}")
        amplitudes = np.zeros(2 ** self.num_qubits, dtype=complex)
        amplitudes[0] = 1.0
        for step in self._steps:
            if step[0] == "fixed":
                amplitudes = step[1] @ amplitudes
            elif step[0] == "RZ":
                _, qubit, slot = step
                amplitudes = amplitudes * np.exp(-0.5j * values[slot] * self._z_signs[:, qubit])
            else:
                kind, qubit, slot = step
                amplitudes = _apply_matrix(amplitudes, self.num_qubits,
                                           _ROTATIONS[kind](values[slot]), (qubit,))
        return amplitudes

    def energy(self, values: Sequence[float]) -> float:
        """⟨0|U†(θ̄) H U(θ̄)|0⟩ against the compiled Hamiltonian."""
        if self._operator is None:
            raise InvalidHamiltonianError("CompiledCircuit was built without a Hamiltonian")
        amplitudes = self.state(values)
        return float(np.vdot(amplitudes, self._operator @ amplitudes).real)
